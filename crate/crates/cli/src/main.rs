//! `smove`: command-line front end for the laboratory.

mod algebra;
mod input;
mod invariants;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Exit, Report};

#[derive(Parser, Debug)]
#[command(name = "smove", version, about = "Free-group words, commutator criteria, slicings and invariants")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, env = "SMOVE_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Free-group operations on word literals.
    Word {
        #[command(subcommand)]
        op: WordOp,
    },
    /// Apply a moves file to a presentation.
    Pres {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        moves: PathBuf,
    },
    /// Commutator criterion workflows.
    Crit {
        #[command(subcommand)]
        op: CritOp,
    },
    /// Slicings of single 2-cell pieces.
    Slice {
        #[command(subcommand)]
        op: SliceOp,
    },
    /// Abstract slice sequences of s-move 3-cells.
    Smove {
        #[command(subcommand)]
        op: SmoveOp,
    },
    /// Invariants.
    Inv {
        #[command(subcommand)]
        op: InvOp,
    },
    /// Demonstrations.
    Demo {
        #[command(subcommand)]
        op: DemoOp,
    },
    /// Composite tests.
    Test {
        #[command(subcommand)]
        op: TestOp,
    },
}

#[derive(Subcommand, Debug)]
pub enum WordOp {
    Reduce { w: String },
    Invert { w: String },
    Mul { u: String, v: String },
    Comm { x: String, y: String },
    Conj { w: String, r: String },
    Equal { u: String, v: String },
    /// Replace generator `gen` (a letter such as `a`) by `repl`.
    Subst { w: String, gen: String, repl: String },
}

/// Where a criterion instance comes from.
#[derive(Args, Debug, Clone)]
pub struct InstanceArg {
    /// Instance file; without it an instance is built from the seed.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Factor count for seed-built instances.
    #[arg(long, default_value_t = 2)]
    pub factors: usize,
    /// Generator count for seed-built instances.
    #[arg(long, default_value_t = 2)]
    pub generators: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ResidualMove {
    Inv,
    Mul,
    Conj,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RelatorSide {
    R,
    S,
}

#[derive(Subcommand, Debug)]
pub enum CritOp {
    /// Check R·S⁻¹·Π[S_α,R_α] = 1.
    Verify {
        #[command(flatten)]
        inst: InstanceArg,
    },
    /// Residual of a relator under inversion or multiplication.
    Residual {
        #[arg(long)]
        word: String,
        #[arg(long = "move", value_enum)]
        mv: ResidualMove,
        /// Right factor for `mul`, letter for `conj`.
        #[arg(long = "with")]
        with: Option<String>,
        #[arg(long, value_enum, default_value_t = RelatorSide::R)]
        side: RelatorSide,
    },
    /// Swap the roles of the two presentations.
    Gauge {
        #[command(flatten)]
        inst: InstanceArg,
    },
    /// Check that the residual of R → S is the inverse commutator product.
    ResidualCommutator {
        #[command(flatten)]
        inst: InstanceArg,
    },
    /// Move R by a Q-move and check that L′·R′·S⁻¹·Π closes.
    Transport {
        #[command(flatten)]
        inst: InstanceArg,
        /// `inv`, `mulr <relator>` or `conj <letter>`.
        #[arg(long)]
        qmove: String,
    },
    /// Apply a Nielsen move (`inv a`, `rmul a b`, `lmul a b`) to both sides.
    Nielsen {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long = "move")]
        mv: String,
        /// Apply to K only.
        #[arg(long)]
        one_sided: bool,
    },
    /// Write a seed-built instance as files.
    Build {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 2)]
        factors: usize,
        #[arg(long, default_value_t = 2)]
        generators: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PieceType {
    Bag,
    Invpair,
    Comm,
    Prod,
}

#[derive(Subcommand, Debug)]
pub enum SliceOp {
    Piece {
        #[arg(long = "type", value_enum)]
        ty: PieceType,
        #[arg(long = "R")]
        r: String,
        #[arg(long = "S")]
        s: Option<String>,
        #[arg(long)]
        identify: bool,
        #[arg(long, value_enum, default_value_t = RelatorSide::R)]
        dominant: RelatorSide,
    },
    /// Inverse-relation slicing of a word.
    Inverse { w: String },
}

#[derive(Subcommand, Debug)]
pub enum SmoveOp {
    Build {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long = "type", default_value = "long")]
        ty: String,
        /// Residual word carried beside R·S⁻¹.
        #[arg(long)]
        residual: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Diag,
    Poly,
}

#[derive(Args, Debug, Clone)]
pub struct BackendArg {
    #[arg(long, default_value_t = 101)]
    pub p: u64,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Diag)]
    pub family: FamilyArg,
    /// Load matrices from a backend dump instead of drawing them.
    #[arg(long)]
    pub backend: Option<PathBuf>,
    /// Write the backend used to this file.
    #[arg(long)]
    pub dump_backend: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MoveSideArg {
    K,
    L,
}

#[derive(Subcommand, Debug)]
pub enum InvOp {
    /// Commuting-matrix invariant of an abstract slice sequence.
    Playground {
        #[command(flatten)]
        inst: InstanceArg,
        #[command(flatten)]
        backend: BackendArg,
        #[arg(long = "type", default_value = "long")]
        ty: String,
        /// Q-move on R (side k) or S (side l): `inv`, `mulr <relator>`, `conj <letter>`.
        #[arg(long)]
        qmove: Option<String>,
        #[arg(long, value_enum, default_value_t = MoveSideArg::K)]
        side: MoveSideArg,
        #[arg(long)]
        gauge: bool,
        #[arg(long)]
        obstruction: bool,
    },
    /// 3j state sums of graphs.
    Statesum {
        #[arg(long, num_args = 1.., required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        moves: Option<PathBuf>,
        #[arg(long)]
        relations: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Polynomial local invariant modulo g.
    Poly {
        /// P_1 .. P_6, in order.
        #[arg(long = "P", num_args = 6, required = true)]
        polys: Vec<String>,
        #[arg(long)]
        g: String,
        #[arg(long)]
        x3: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum DemoOp {
    /// The non-multiplicativity quartic.
    Nonmult {
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Cancellation of S² stabilizations.
    Stabilization {
        #[arg(long, num_args = 1.., default_values_t = [1u32, 2, 3])]
        v: Vec<u32>,
        #[command(flatten)]
        backend: BackendArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum TestOp {
    /// I(K) = I(L), I_gauge(K) = I(L) and I(K) = I_gauge(L).
    ThreeTests {
        /// `<instance file>[:long|mer]`, one per local piece of K.
        #[arg(long = "k", num_args = 1.., required = true)]
        k: Vec<String>,
        /// `<instance file>[:long|mer]`, one per local piece of L.
        #[arg(long = "l", num_args = 1.., required = true)]
        l: Vec<String>,
        #[command(flatten)]
        backend: BackendArg,
    },
}

fn run(cli: Cli, report: &mut Report) -> anyhow::Result<()> {
    let seed = cli.seed;
    match cli.cmd {
        Command::Word { op } => algebra::word(op, report),
        Command::Pres { presentation, moves } => algebra::pres(&presentation, &moves, report),
        Command::Crit { op } => algebra::crit(op, seed, report),
        Command::Slice { op } => algebra::slice(op, report),
        Command::Smove { op } => algebra::smove(op, seed, report),
        Command::Inv { op } => invariants::inv(op, seed, report),
        Command::Demo { op } => invariants::demo(op, seed, report),
        Command::Test { op } => invariants::test(op, seed, report),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Input as u8 } else { 0 });
        }
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut report = Report::new(&args, cli.seed);
    match run(cli, &mut report) {
        Ok(()) => {
            print!("{}", report.render());
            ExitCode::from(report.exit() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Exit::Input as u8)
        }
    }
}

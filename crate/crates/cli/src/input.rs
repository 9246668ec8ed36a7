//! Loaders for the file formats that only the command line needs: instance
//! files and graph move files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use smove::criterion::{self, CommutatorDecomposition, CriterionInstance};
use smove::presentation::{self, QMove};
use smove::slicing::IdentificationType;
use smove::statesum::{self, LocalGraphMove, MoveSequence, TrivalentGraph};

use crate::report::Report;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn sibling(base: &Path, rel: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(rel)
}

/// Reads an instance file:
///
/// ```text
/// K k.pres
/// L l.pres
/// R R
/// S S
/// decomp d.txt        # or inline `factor ...` lines
/// ```
///
/// Paths are relative to the instance file.
pub fn load_instance(report: &mut Report, path: &Path) -> Result<CriterionInstance> {
    let text = report.read(path)?;
    let (mut k, mut l, mut r, mut s) = (None, None, None, None);
    let mut decomp_text = String::new();
    for (no, line) in content_lines(&text) {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "K" => k = Some(presentation::parse_presentation(&report.read(&sibling(path, rest))?)?),
            "L" => l = Some(presentation::parse_presentation(&report.read(&sibling(path, rest))?)?),
            "R" => r = Some(rest.to_string()),
            "S" => s = Some(rest.to_string()),
            "decomp" => decomp_text.push_str(&report.read(&sibling(path, rest))?),
            "factor" => {
                decomp_text.push_str(line);
                decomp_text.push('\n');
            }
            _ => bail!("{}:{no}: unrecognised line {line:?}", path.display()),
        }
    }
    let missing = |what: &str| anyhow!("{}: missing `{what}` line", path.display());
    let decomp: CommutatorDecomposition = criterion::parse_decomposition(&decomp_text)
        .with_context(|| format!("{}: decomposition", path.display()))?;
    Ok(CriterionInstance::new(
        k.ok_or_else(|| missing("K"))?,
        l.ok_or_else(|| missing("L"))?,
        r.ok_or_else(|| missing("R"))?,
        s.ok_or_else(|| missing("S"))?,
        decomp,
    )?)
}

/// Writes `k.pres`, `l.pres`, `decomp.txt` and `instance.txt` into `dir`.
pub fn write_instance(dir: &Path, inst: &CriterionInstance) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
    };
    write("k.pres", inst.k().to_string())?;
    write("l.pres", inst.l().to_string())?;
    write("decomp.txt", criterion::format_decomposition(inst.decomposition()))?;
    write(
        "instance.txt",
        format!(
            "K k.pres\nL l.pres\nR {}\nS {}\ndecomp decomp.txt\n",
            inst.r_name(),
            inst.s_name()
        ),
    )?;
    Ok(dir.join("instance.txt"))
}

pub fn parse_type(s: &str) -> Result<IdentificationType> {
    match s {
        "long" | "longitudinal" => Ok(IdentificationType::Longitudinal),
        "mer" | "meridian" => Ok(IdentificationType::Meridian),
        _ => bail!("unknown identification type {s:?} (expected long or mer)"),
    }
}

/// A Q-move on the distinguished relator named `target`: `inv`,
/// `mulr <relator>` or `conj <letter>`.
pub fn parse_qmove(p: &presentation::Presentation, target: &str, spec: &str) -> Result<QMove> {
    let mut toks = spec.split_whitespace();
    let op = toks.next().ok_or_else(|| anyhow!("empty move"))?;
    let rest: Vec<&str> = toks.collect();
    let line = std::iter::once(op)
        .chain(std::iter::once(target))
        .chain(rest)
        .collect::<Vec<_>>()
        .join(" ");
    match presentation::parse_move_line(p, &line, 1)? {
        presentation::Move::Q(q) => Ok(q),
        _ => bail!("{spec:?} is not a Q-move"),
    }
}

fn builtin_or_file(report: &mut Report, base: &Path, spec: &str) -> Result<TrivalentGraph> {
    Ok(match spec {
        "empty" => TrivalentGraph::empty(),
        "circle" => TrivalentGraph::circle(),
        "theta" => TrivalentGraph::theta(),
        path => statesum::parse_graph(&report.read(&sibling(base, path))?)?,
    })
}

/// Reads a move file:
///
/// ```text
/// graph E empty            # empty | circle | theta | <graph file>
/// graph C circle
/// move E C
/// move C E
/// relation E>C C>E = 1     # `1` is the empty move list
/// ```
pub fn load_moves(report: &mut Report, path: &Path, into: &mut MoveSequence) -> Result<()> {
    let text = report.read(path)?;
    let mut graphs: BTreeMap<String, TrivalentGraph> = BTreeMap::new();
    for (no, line) in content_lines(&text) {
        let at = |e: anyhow::Error| e.context(format!("{}:{no}", path.display()));
        let toks: Vec<&str> = line.split_whitespace().collect();
        let lookup = |name: &str, graphs: &BTreeMap<String, TrivalentGraph>| {
            graphs
                .get(name)
                .cloned()
                .ok_or_else(|| anyhow!("{}:{no}: unknown graph {name:?}", path.display()))
        };
        match toks.as_slice() {
            ["graph", name, spec] => {
                let g = builtin_or_file(report, path, spec).map_err(at)?;
                graphs.insert(name.to_string(), g);
            }
            ["move", a, b] => into.moves.push((lookup(a, &graphs)?, lookup(b, &graphs)?)),
            ["relation", rest @ ..] => {
                let eq = rest
                    .iter()
                    .position(|t| *t == "=")
                    .ok_or_else(|| anyhow!("{}:{no}: relation needs `=`", path.display()))?;
                let side = |toks: &[&str]| -> Result<Vec<LocalGraphMove>> {
                    toks.iter()
                        .filter(|t| **t != "1")
                        .map(|t| {
                            let (a, b) = t
                                .split_once('>')
                                .ok_or_else(|| anyhow!("{}:{no}: expected A>B, got {t:?}", path.display()))?;
                            Ok((lookup(a, &graphs)?, lookup(b, &graphs)?))
                        })
                        .collect()
                };
                into.relations.push((side(&rest[..eq])?, side(&rest[eq + 1..])?));
            }
            _ => bail!("{}:{no}: unrecognised line {line:?}", path.display()),
        }
    }
    Ok(())
}

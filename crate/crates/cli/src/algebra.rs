//! `word`, `pres`, `crit`, `slice` and `smove`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use smove::criterion::{self, BuildParams, CriterionInstance};
use smove::freegroup::{self, Word};
use smove::presentation::{self, Move};
use smove::slicing::{self, Dominant, SliceSequence};

use crate::input::{load_instance, parse_qmove, parse_type, write_instance};
use crate::report::{Exit, Report};
use crate::{CritOp, InstanceArg, PieceType, RelatorSide, ResidualMove, SliceOp, SmoveOp, WordOp};

fn parse_word(s: &str) -> Result<Word> {
    Word::parse(s).with_context(|| format!("word {s:?}"))
}

pub fn word(op: WordOp, report: &mut Report) -> Result<()> {
    let (name, result) = match &op {
        WordOp::Reduce { w } => ("reduce", parse_word(w)?.to_string()),
        WordOp::Invert { w } => ("invert", freegroup::invert(&parse_word(w)?).to_string()),
        WordOp::Mul { u, v } => ("mul", freegroup::multiply(&parse_word(u)?, &parse_word(v)?).to_string()),
        WordOp::Comm { x, y } => ("comm", freegroup::commutator(&parse_word(x)?, &parse_word(y)?).to_string()),
        WordOp::Conj { w, r } => ("conj", freegroup::conjugate(&parse_word(w)?, &parse_word(r)?).to_string()),
        WordOp::Equal { u, v } => {
            let eq = freegroup::equal(&parse_word(u)?, &parse_word(v)?);
            if !eq {
                report.exit_at_least(Exit::Fail);
            }
            ("equal", eq.to_string())
        }
        WordOp::Subst { w, gen, repl } => {
            let letters = freegroup::parse_letters(gen)?;
            let g = match letters.as_slice() {
                [l] if !l.is_inverse() => l.gen(),
                _ => bail!("expected a single positive generator, got {gen:?}"),
            };
            ("subst", freegroup::substitute(&parse_word(w)?, g, &parse_word(repl)?).to_string())
        }
    };
    report.line(&result);
    report.columns(&["op", "result"]);
    report.row([name, &result]);
    Ok(())
}

pub fn pres(presentation: &Path, moves: &Path, report: &mut Report) -> Result<()> {
    let p = presentation::parse_presentation(&report.read(presentation)?)?;
    let text = report.read(moves)?;
    let (out, applied) = presentation::parse_and_apply_moves(&p, &text)?;
    report.line(format!("moves applied: {}", applied.len()));
    report.block(&out.to_string());
    report.columns(&["relator", "word"]);
    for r in out.relators() {
        report.row([r.name.clone(), r.word.to_string()]);
    }
    Ok(())
}

pub fn instance(arg: &InstanceArg, seed: u64, report: &mut Report) -> Result<CriterionInstance> {
    match &arg.instance {
        Some(path) => load_instance(report, path),
        None => {
            report.line(format!(
                "instance: built from seed {seed} ({} generators, {} factors)",
                arg.generators, arg.factors
            ));
            Ok(criterion::build_instance(seed, params(arg.generators, arg.factors)))
        }
    }
}

fn params(generators: u32, factors: usize) -> BuildParams {
    BuildParams {
        generators,
        factors,
        ..BuildParams::default()
    }
}

fn describe(report: &mut Report, inst: &CriterionInstance) {
    report.line(format!("R: {} = {}", inst.r_name(), inst.r_word()));
    report.line(format!("S: {} = {}", inst.s_name(), inst.s_word()));
    report.line("decomposition:");
    report.block(&criterion::format_decomposition(inst.decomposition()));
}

fn verdict(report: &mut Report, name: &str, ok: bool) {
    report.line(format!("{name}: {ok}"));
    report.row([name.to_string(), ok.to_string()]);
    if !ok {
        report.exit_at_least(Exit::Fail);
    }
}

pub fn crit(op: CritOp, seed: u64, report: &mut Report) -> Result<()> {
    report.columns(&["check", "value"]);
    match op {
        CritOp::Verify { inst } => {
            let inst = instance(&inst, seed, report)?;
            describe(report, &inst);
            verdict(report, "verify", criterion::verify(&inst));
            let product = criterion::verify_product_form(&inst);
            report.line(format!("product form: {product}"));
            report.row(["product_form".to_string(), product.to_string()]);
        }
        CritOp::Residual { word: w, mv, with, side } => {
            let w = parse_word(&w)?;
            let new = match (mv, with) {
                (ResidualMove::Inv, _) => w.inverse(),
                (ResidualMove::Mul, Some(x)) => w.mul(&parse_word(&x)?),
                (ResidualMove::Conj, Some(x)) => w.conjugate_by(&parse_word(&x)?),
                (_, None) => bail!("--move mul and --move conj need --with"),
            };
            let residual = match side {
                RelatorSide::R => criterion::residual_r(&w, &new),
                RelatorSide::S => criterion::residual_s(&w, &new),
            };
            report.line(format!("new: {new}"));
            report.line(format!("residual: {residual}"));
            report.row(["new".to_string(), new.to_string()]);
            report.row(["residual".to_string(), residual.to_string()]);
        }
        CritOp::Gauge { inst } => {
            let inst = instance(&inst, seed, report)?;
            let g = criterion::gauge(&inst)?;
            report.line("gauged instance:");
            describe(report, &g);
            verdict(report, "verify", criterion::verify(&g));
        }
        CritOp::ResidualCommutator { inst } => {
            let inst = instance(&inst, seed, report)?;
            let r = criterion::residual_commutator_check(&inst)?;
            report.line(format!("L' = {}", r.l_prime));
            report.line(format!("M'^-1 = {}", r.m_prime_inv));
            report.line(format!("(prod)^-1 = {}", r.inverse_product));
            report.row(["l_prime".to_string(), r.l_prime.to_string()]);
            report.row(["m_prime_inv".to_string(), r.m_prime_inv.to_string()]);
            report.row(["inverse_product".to_string(), r.inverse_product.to_string()]);
            verdict(report, "holds", r.holds);
        }
        CritOp::Transport { inst, qmove } => {
            let inst = instance(&inst, seed, report)?;
            let q = parse_qmove(inst.k(), inst.r_name(), &qmove)?;
            let t = criterion::transport_qmove(&inst, &q)?;
            let closing = t.closing_word(&inst);
            report.line(format!("R' = {}", t.r_new));
            report.line(format!("L' = {}", t.l_prime));
            report.line(format!("closing word: {closing}"));
            report.row(["r_new".to_string(), t.r_new.to_string()]);
            report.row(["l_prime".to_string(), t.l_prime.to_string()]);
            verdict(report, "closes", closing.is_identity());
        }
        CritOp::Nielsen { inst, mv, one_sided } => {
            let inst = instance(&inst, seed, report)?;
            let m = match presentation::parse_move_line(inst.k(), &format!("nielsen {mv}"), 1)? {
                Move::Nielsen(m) => m,
                _ => bail!("{mv:?} is not a Nielsen move"),
            };
            let moved = if one_sided {
                criterion::nielsen_one_sided(&inst, &m)?
            } else {
                criterion::nielsen_transport(&inst, &m)?
            };
            describe(report, &moved);
            verdict(report, "verify", criterion::verify(&moved));
        }
        CritOp::Build { dir, factors, generators } => {
            let inst = criterion::build_instance(seed, params(generators, factors));
            let path = write_instance(&dir, &inst)?;
            report.line(format!("wrote {}", path.display()));
            describe(report, &inst);
            verdict(report, "verify", criterion::verify(&inst));
        }
    }
    Ok(())
}

fn show_sequence(report: &mut Report, seq: &SliceSequence) {
    report.block(&seq.dump());
    let valid = slicing::validate(seq);
    report.line(format!("valid: {}", valid.is_ok()));
    report.row(["valid".to_string(), valid.is_ok().to_string()]);
    if let Err(e) = valid {
        report.line(format!("invalid: {e}"));
        report.exit_at_least(Exit::Fail);
    }
    match slicing::boundary_trace(seq) {
        Ok(w) => {
            report.line(format!("boundary: {w}"));
            report.row(["boundary".to_string(), w.to_string()]);
        }
        Err(e) => {
            report.line(format!("boundary: error: {e}"));
            report.exit_at_least(Exit::Fail);
        }
    }
}

pub fn slice(op: SliceOp, report: &mut Report) -> Result<()> {
    report.columns(&["field", "value"]);
    match op {
        SliceOp::Piece { ty, r, s, identify, dominant } => {
            let r = parse_word(&r)?;
            let need_s = || -> Result<Word> {
                match &s {
                    Some(s) => parse_word(s),
                    None => bail!("this piece needs --S"),
                }
            };
            let seq = match ty {
                PieceType::Bag => slicing::slice_bag(&r, identify),
                PieceType::Invpair => slicing::slice_inverse_pair(&r),
                PieceType::Comm => {
                    let dominant = match dominant {
                        RelatorSide::R => Dominant::RFirst,
                        RelatorSide::S => Dominant::SFirst,
                    };
                    slicing::slice_commutator(&r, &need_s()?, dominant, identify)
                }
                PieceType::Prod => slicing::slice_product(&r, &need_s()?),
            };
            show_sequence(report, &seq);
        }
        SliceOp::Inverse { w } => {
            let t = slicing::inverse_trace(&parse_word(&w)?);
            report.line(format!("inverse trace: {t}"));
            report.row(["inverse_trace".to_string(), t.to_string()]);
        }
    }
    Ok(())
}

pub fn smove(op: SmoveOp, seed: u64, report: &mut Report) -> Result<()> {
    match op {
        SmoveOp::Build { inst, ty, residual } => {
            let inst = instance(&inst, seed, report)?;
            let ty = parse_type(&ty)?;
            let residual = residual.as_deref().map(parse_word).transpose()?;
            let aseq = slicing::build_abstract(&inst, ty, residual.as_ref())?;
            report.line(format!("type: {ty}"));
            report.line(format!("slices: {}", aseq.slices.len()));
            report.block(&aseq.dump());
            report.columns(&["slice", "tokens"]);
            for (k, s) in aseq.slices.iter().enumerate() {
                report.row([k.to_string(), s.to_string()]);
            }
        }
    }
    Ok(())
}

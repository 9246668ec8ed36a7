//! `inv`, `demo` and `test`.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use smove::criterion::{self, BuildParams, CriterionInstance};
use smove::playground::{
    self, Backend, Family, InvarianceReport, MoveSide, Verdict,
};
use smove::slicing::{self, IdentificationType};
use smove::statesum::{self, MoveSequence, Polynomial, ThreeJTable};

use crate::algebra::instance;
use crate::input::{load_instance, load_moves, parse_qmove, parse_type};
use crate::report::{Exit, Report};
use crate::{BackendArg, DemoOp, FamilyArg, InvOp, MoveSideArg, TestOp};

fn exit_of(v: Verdict) -> Exit {
    match v {
        Verdict::Pass => Exit::Ok,
        Verdict::Fail => Exit::Fail,
        Verdict::Obstructed => Exit::Obstructed,
    }
}

fn record(report: &mut Report, check: &str, r: &InvarianceReport) {
    report.line(format!("{check}: {}", r.verdict));
    if let Some(w) = &r.witness {
        report.line(format!("  witness: {w}"));
    }
    report.row([check.to_string(), r.verdict.to_string(), r.witness.clone().unwrap_or_default()]);
    report.exit_at_least(exit_of(r.verdict));
}

/// Loads `--backend` (extended by `labels`) or draws one from the seed.
fn backend(arg: &BackendArg, labels: &[String], seed: u64, report: &mut Report) -> Result<Backend> {
    let b = match &arg.backend {
        Some(path) => Backend::load(&report.read(path)?)?.extended(labels)?,
        None => {
            let family = match arg.family {
                FamilyArg::Diag => Family::Diagonal,
                FamilyArg::Poly => Family::PolynomialInM,
            };
            playground::make_backend(labels, arg.p, arg.d, seed, family)?
        }
    };
    b.check_axioms()?;
    if let Some(out) = &arg.dump_backend {
        std::fs::write(out, b.dump()).with_context(|| format!("writing {}", out.display()))?;
        report.line(format!("backend written to {}", out.display()));
    }
    report.line(format!("backend: p = {}, d = {}, Z(S2) = {}", b.modulus(), b.dim(), b.sphere()));
    Ok(b)
}

pub fn inv(op: InvOp, seed: u64, report: &mut Report) -> Result<()> {
    match op {
        InvOp::Playground { inst, backend: barg, ty, qmove, side, gauge, obstruction } => {
            let inst = instance(&inst, seed, report)?;
            let ty = parse_type(&ty)?;
            let b = backend(&barg, &playground::instance_labels(&inst)?, seed, report)?;
            let aseq = slicing::build_abstract(&inst, ty, None)?;
            let value = playground::perturbed_invariant(&aseq, &b)?;
            let spel = playground::spel_product(&aseq, &b)?;
            report.line(format!("type: {ty}"));
            report.line(format!("invariant: {value}"));
            report.line(format!("spel product: {spel}"));
            report.columns(&["check", "verdict", "witness"]);
            report.row(["invariant".to_string(), String::new(), value.to_string()]);
            if let Some(spec) = qmove {
                let (side, p, target) = match side {
                    MoveSideArg::K => (MoveSide::K, inst.k(), inst.r_name()),
                    MoveSideArg::L => (MoveSide::L, inst.l(), inst.s_name()),
                };
                let q = parse_qmove(p, target, &spec)?;
                let r = playground::check_inside_invariance(&inst, side, &q, ty, &b)?;
                record(report, "inside", &r);
            }
            if gauge {
                let r = playground::check_gauge(&inst, ty, &b)?;
                record(report, "gauge", &r);
            }
            if obstruction {
                let r = playground::between_type_obstruction(&inst, ty, &b)?;
                record(report, "obstruction", &r);
            }
        }
        InvOp::Statesum { graphs, table, moves, relations, jobs } => {
            let t = statesum::parse_table(&report.read(&table)?)?;
            statesum_cmd(report, &graphs, &t, moves.as_deref(), relations.as_deref(), jobs)?;
        }
        InvOp::Poly { polys, g, x3 } => {
            let parse = |s: &str| -> Result<Polynomial> {
                s.parse().map_err(|e| anyhow!("polynomial {s:?}: {e}"))
            };
            let p = polys.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
            let g = parse(&g)?;
            let x3 = parse(&x3)?
                .as_constant()
                .ok_or_else(|| anyhow!("x3 must be a rational constant"))?;
            let inv = statesum::poly_local_invariant(&p, &g, &x3)?;
            report.line(format!("c3 = {}", inv.c3));
            report.columns(&["name", "value"]);
            for (k, q) in inv.q.iter().enumerate() {
                let name = if k == 3 { "Q'_4".to_string() } else { format!("Q_{}", k + 1) };
                report.line(format!("{name} = {q}"));
                report.row([name, q.to_string()]);
            }
            report.line(format!("invariant = {}", inv.value));
            report.row(["c3".to_string(), inv.c3.to_string()]);
            report.row(["invariant".to_string(), inv.value.to_string()]);
        }
    }
    Ok(())
}

fn statesum_cmd(
    report: &mut Report,
    graphs: &[std::path::PathBuf],
    t: &ThreeJTable<Polynomial>,
    moves: Option<&Path>,
    relations: Option<&Path>,
    jobs: usize,
) -> Result<()> {
    report.line(format!("colours: {}", t.color_count()));
    report.columns(&["kind", "graph", "value", "verdict"]);
    let mut parsed = Vec::new();
    for path in graphs {
        let g = statesum::parse_graph(&report.read(path)?)
            .with_context(|| format!("graph {}", path.display()))?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let v = statesum::state_sum_parallel(&g, t, jobs)?;
        report.line(format!("Z({name}) = {v}"));
        report.row(["sum", &name, &v.to_string(), ""]);
        parsed.push((name, g, v));
    }
    for i in 0..parsed.len() {
        for j in i..parsed.len() {
            let (a, ga, va) = &parsed[i];
            let (b, gb, vb) = &parsed[j];
            let joint = statesum::state_sum_parallel(&statesum::wedge(ga, gb), t, jobs)?;
            let ok = joint == va.mul(vb);
            let verdict = if ok { "PASS" } else { "FAIL" };
            let pair = format!("{a} + {b}");
            report.line(format!("multiplicativity {pair}: {verdict} (Z = {joint})"));
            report.row(["union", &pair, &joint.to_string(), verdict]);
            if !ok {
                report.exit_at_least(Exit::Fail);
            }
        }
    }
    if moves.is_some() || relations.is_some() {
        let mut ms = MoveSequence::default();
        if let Some(m) = moves {
            load_moves(report, m, &mut ms)?;
        }
        if let Some(r) = relations {
            let mut rel = MoveSequence::default();
            load_moves(report, r, &mut rel)?;
            if !rel.moves.is_empty() {
                bail!("{}: relations file may not contain `move` lines", r.display());
            }
            ms.relations = rel.relations;
        }
        let value = statesum::invariant(&ms, t)?;
        report.line(format!("moves: {}, relations: {}", ms.moves.len(), ms.relations.len()));
        report.line(format!("invariant = {value}"));
        report.row(["invariant", "", &value.to_string(), ""]);
    }
    Ok(())
}

pub fn demo(op: DemoOp, seed: u64, report: &mut Report) -> Result<()> {
    match op {
        DemoOp::Nonmult { table } => {
            let quartic = statesum::nonmult_expand();
            report.line(format!("quartic: {quartic}"));
            report.columns(&["name", "value"]);
            report.row(["quartic".to_string(), quartic.to_string()]);
            if let Some(path) = table {
                let t = statesum::parse_table(&report.read(&path)?)?;
                let r = statesum::nonmult_check(&t);
                report.line(r.to_string());
                report.row(["S".to_string(), r.s.to_string()]);
                report.row(["value".to_string(), r.value.to_string()]);
                if r.multiplicative == Some(false) {
                    report.exit_at_least(Exit::Fail);
                }
            }
        }
        DemoOp::Stabilization { v, backend: barg } => {
            let inst = criterion::build_instance(seed, BuildParams::default());
            let b = backend(&barg, &playground::instance_labels(&inst)?, seed, report)?;
            report.columns(&["check", "verdict", "witness"]);
            for v in v {
                let r = playground::stabilization_demo(&b, v)?;
                record(report, &format!("v={v}"), &r.report);
            }
        }
    }
    Ok(())
}

fn piece(report: &mut Report, spec: &str) -> Result<(CriterionInstance, IdentificationType)> {
    let (path, ty) = match spec.rsplit_once(':') {
        Some((p, t)) if matches!(t, "long" | "mer" | "longitudinal" | "meridian") => (p, t),
        _ => (spec, "long"),
    };
    Ok((load_instance(report, Path::new(path))?, parse_type(ty)?))
}

pub fn test(op: TestOp, seed: u64, report: &mut Report) -> Result<()> {
    match op {
        TestOp::ThreeTests { k, l, backend: barg } => {
            let kdata = k.iter().map(|s| piece(report, s)).collect::<Result<Vec<_>>>()?;
            let ldata = l.iter().map(|s| piece(report, s)).collect::<Result<Vec<_>>>()?;
            let mut labels = Vec::new();
            for (inst, _) in kdata.iter().chain(&ldata) {
                labels.extend(playground::instance_labels(inst)?);
            }
            labels.sort();
            labels.dedup();
            let b = backend(&barg, &labels, seed, report)?;
            let t = playground::three_tests(&kdata, &ldata, &b)?;
            report.columns(&["test", "equal"]);
            for (name, ok) in [
                ("I(K) = I(L)", t.plain),
                ("I_gauge(K) = I(L)", t.gauge_k),
                ("I(K) = I_gauge(L)", t.gauge_l),
            ] {
                report.line(format!("{name}: {ok}"));
                report.row([name.to_string(), ok.to_string()]);
                if !ok {
                    report.exit_at_least(Exit::Fail);
                }
            }
            if let Some(msg) = t.counterexample() {
                report.line(msg);
            }
        }
    }
    Ok(())
}

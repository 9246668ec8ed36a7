//! The fourteen acceptance criteria. Prints one PASS/FAIL line each and
//! exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use smove::criterion::*;
use smove::freegroup::{commutator, Letter, Word};
use smove::playground::*;
use smove::presentation::{NielsenMove, QMove};
use smove::slicing::*;
use smove::statesum::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_residuals() -> Outcome {
    let mut rng = rng(1);
    for i in 0..500 {
        let r = random_word(&mut rng, 3, 10);
        let rk = random_word(&mut rng, 3, 10);
        let expected = oracle_product(&[r.letters(), &oracle_inverse(rk.letters()), &oracle_inverse(r.letters())]);
        let got = residual_r(&r, &r.mul(&rk));
        ensure(got.letters() == expected.as_slice(), || format!("pair {i}: R={r} R_k={rk} gave {got}"))?;
        let square = oracle_product(&[r.letters(), r.letters()]);
        let got = residual_r(&r, &r.inverse());
        ensure(got.letters() == square.as_slice(), || format!("pair {i}: R={r} inverse gave {got}"))?;
    }
    ensure(residual_r(&w("abA"), &w("abAb")) == w("abABaBA"), || "abA example".into())?;
    ensure(residual_r(&w("ab"), &w("BA")) == w("abab"), || "ab example".into())?;
    Ok("500 pairs".into())
}

fn c2_verification() -> Outcome {
    let mut rng = rng(2);
    let mut broken = 0;
    for seed in 0..1000 {
        let inst = build_instance(seed, BuildParams::default());
        ensure(verify(&inst), || format!("seed {seed} does not verify"))?;
        ensure(verify_product_form(&inst), || format!("seed {seed}: * form disagrees"))?;
        // the * form by hand: R·S⁻¹ against [R_n,S_n]⋯[R_1,S_1]
        let lhs = oracle_product(&[inst.r_word().letters(), &oracle_inverse(inst.s_word().letters())]);
        let rhs = inst
            .factor_words()
            .iter()
            .rev()
            .fold(Vec::new(), |acc, (ra, sa)| oracle_product(&[&acc, commutator(ra, sa).letters()]));
        ensure(lhs == rhs, || format!("seed {seed}: oracle * form fails"))?;
        let mutated = mutate_conjugator(&inst, &mut rng);
        ensure(verify(&mutated) == verify_product_form(&mutated), || format!("seed {seed}: paths disagree on mutation"))?;
        if !verify(&mutated) {
            broken += 1;
        }
    }
    ensure(broken >= 990, || format!("only {broken}/1000 mutations break verification"))?;
    Ok(format!("1000 instances verify; {broken}/1000 mutations rejected"))
}

fn c3_gauge() -> Outcome {
    for seed in 0..1000 {
        let inst = build_instance(seed, BuildParams::default());
        let sr = oracle_product(&[inst.s_word().letters(), &oracle_inverse(inst.r_word().letters())]);
        let rs = oracle_product(&[inst.r_word().letters(), &oracle_inverse(inst.s_word().letters())]);
        ensure(sr == oracle_inverse(&rs), || format!("seed {seed}: S·R⁻¹ != (R·S⁻¹)⁻¹"))?;
        let g = gauge(&inst).map_err(|e| e.to_string())?;
        ensure(verify(&g), || format!("seed {seed}: gauge does not verify"))?;
        ensure(g.product_word().letters() == sr.as_slice(), || format!("seed {seed}: gauged product"))?;
    }
    Ok("1000 instances".into())
}

fn c4_residual_commutator() -> Outcome {
    for seed in 0..1000 {
        let inst = build_instance(seed, BuildParams::default());
        let rep = residual_commutator_check(&inst).map_err(|e| e.to_string())?;
        let inv_prod = inst
            .factor_words()
            .iter()
            .rev()
            .fold(Vec::new(), |acc, (ra, sa)| oracle_product(&[&acc, commutator(ra, sa).letters()]));
        ensure(rep.holds, || format!("seed {seed}: report fails"))?;
        ensure(rep.l_prime.letters() == inv_prod.as_slice(), || format!("seed {seed}: L′ != inverse product"))?;
        ensure(rep.l_prime == rep.m_prime_inv, || format!("seed {seed}: L′ != M′⁻¹"))?;
    }
    Ok("1000 instances".into())
}

const P: u64 = 101;
const D: usize = 4;

fn seeded_backend(seed: u64) -> (CriterionInstance, Backend) {
    let inst = build_instance(seed, BuildParams::default());
    let family = if seed % 2 == 0 { Family::Diagonal } else { Family::PolynomialInM };
    let b = backend_for(&inst, P, D, seed ^ 0x5eed, family).expect("backend");
    (inst, b)
}

fn c5_telescoping() -> Outcome {
    for seed in 0..100 {
        let (inst, b) = seeded_backend(seed);
        for ty in [IdentificationType::Longitudinal, IdentificationType::Meridian] {
            let aseq = build_abstract(&inst, ty, None).map_err(|e| e.to_string())?;
            let a: Vec<Mat> = aseq
                .slices
                .iter()
                .map(|s| s.tokens.iter().fold(mat_id(D), |acc, t| mat_mul(&acc, &mat_of(&b.token(t).unwrap()), P)))
                .collect();
            let mut prod = mat_id(D);
            for k in 0..a.len() - 1 {
                let f = mat_mul(&a[k + 1], &mat_inv(&a[k], P).ok_or("singular slice")?, P);
                prod = mat_mul(&f, &prod, P);
            }
            ensure(prod == mat_id(D), || format!("seed {seed}: oracle product is not I"))?;
            let maps = transitions(&state_modules(&aseq, &b).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(compose(&maps, P, D).is_identity(), || format!("seed {seed}: Π F_k != I"))?;
        }
    }
    Ok("100 backends, both types".into())
}

fn c6_closed_form() -> Outcome {
    for seed in 0..100 {
        let (inst, b) = seeded_backend(seed);
        for ty in [IdentificationType::Longitudinal, IdentificationType::Meridian] {
            let aseq = build_abstract(&inst, ty, None).map_err(|e| e.to_string())?;
            let tok = |t: &CellToken| mat_of(&b.token(t).unwrap());
            let slice = |ts: &[CellToken]| ts.iter().fold(mat_id(D), |acc, t| mat_mul(&acc, &tok(t), P));
            let k = aseq.perturbation_index;
            let spels: Vec<CellToken> = aseq.slices[k].tokens.iter().filter(|t| t.is_spel()).cloned().collect();
            let z_spel = slice(&spels);
            let mut prod = mat_id(D);
            for i in 0..aseq.slices.len() - 1 {
                let mut next = slice(&aseq.slices[i + 1].tokens);
                if i == k {
                    next = mat_mul(&next, &z_spel, P);
                }
                let f = mat_mul(&next, &mat_inv(&slice(&aseq.slices[i].tokens), P).ok_or("singular")?, P);
                prod = mat_mul(&f, &prod, P);
            }
            let lib = mat_of(&perturbed_invariant(&aseq, &b).map_err(|e| e.to_string())?);
            ensure(prod == z_spel, || format!("seed {seed}: brute force != Π Z(SpEl)"))?;
            ensure(lib == z_spel, || format!("seed {seed}: perturbed_invariant != Π Z(SpEl)"))?;
        }
    }
    Ok("100 backend/instance pairs, both types".into())
}

fn c7_inside_invariance() -> Outcome {
    let mut checks = 0;
    for seed in 0..200 {
        let (inst, b) = seeded_backend(seed);
        let mut moves = vec![QMove::InvertRelator(0), QMove::MultiplyRight(0, 1), QMove::MultiplyRight(0, 2)];
        for g in 1..=inst.k().generator_count() {
            moves.push(QMove::ConjugateRelator(0, Letter::pos(g)));
            moves.push(QMove::ConjugateRelator(0, Letter::neg(g)));
        }
        for m in &moves {
            for side in [MoveSide::K, MoveSide::L] {
                for ty in [IdentificationType::Longitudinal, IdentificationType::Meridian] {
                    let rep = check_inside_invariance(&inst, side, m, ty, &b).map_err(|e| e.to_string())?;
                    ensure(rep.verdict == Verdict::Pass, || format!("seed {seed} {m:?} {side:?} {ty}: {:?}", rep.witness))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} checks over 200 instance/backend pairs"))
}

fn c8_obstruction() -> Outcome {
    let (mut obstructed, mut controls) = (0, 0);
    for seed in 0..200 {
        let (inst, b) = seeded_backend(seed);
        let b = if seed % 10 == 0 {
            controls += 1;
            b.with_identity_spels()
        } else {
            b
        };
        let ty = if seed % 3 == 0 { IdentificationType::Meridian } else { IdentificationType::Longitudinal };
        let aseq = build_abstract(&inst, ty, None).map_err(|e| e.to_string())?;
        let trivial = aseq
            .spels()
            .iter()
            .fold(mat_id(D), |acc, t| mat_mul(&acc, &mat_of(&b.token(t).unwrap()), P))
            == mat_id(D);
        let rep = between_type_obstruction(&inst, ty, &b).map_err(|e| e.to_string())?;
        let want = if trivial { Verdict::Pass } else { Verdict::Obstructed };
        ensure(rep.verdict == want, || format!("seed {seed}: {} with trivial={trivial}", rep.verdict))?;
        if rep.verdict == Verdict::Obstructed {
            obstructed += 1;
        }
    }
    ensure(controls == 20, || format!("{controls} controls"))?;
    Ok(format!("200 backends, {obstructed} obstructed, {controls} identity controls"))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn c9_quartic() -> Outcome {
    let q = nonmult_expand();
    let expected: Polynomial = "2S^4 - 4S^3 + 4S^2 - 4S + 2".parse().map_err(|e: PolyError| e.to_string())?;
    ensure(q == expected, || format!("got {q}"))?;
    ensure(q.to_string() == "2S^4 - 4S^3 + 4S^2 - 4S + 2", || format!("rendered {q}"))?;
    // independent expansion of 2) − 1) at K0=K2=L0=L2=1, K1=L1=S, evaluated pointwise
    for s in -5i64..=5 {
        let (k0, k1, k2, l0, l1, l2) = (1, s, 1, 1, s, 1);
        let e1 = (k1 * l1 - k0 * l0) * (k2 * l2 - k1 * l1);
        let e2 = (k1 - k0) * (k2 - k1) * (l1 - l0) * (l2 - l1);
        ensure(q.eval("S", &int(s)) == Polynomial::integer(e2 - e1), || format!("S = {s}"))?;
    }
    ensure(q.eval("S", &int(1)).is_zero(), || "value at 1".into())?;
    ensure(q.eval("S", &int(2)) == Polynomial::integer(10), || "value at 2".into())?;
    let t = parse_table("0,0,0,1\n1,1,1,1\n0,0,1,7\n").map_err(|e| e.to_string())?;
    let rep = nonmult_check(&t);
    ensure(rep.s == Polynomial::integer(2), || format!("Σ|aaa| = {}", rep.s))?;
    ensure(rep.multiplicative == Some(false), || format!("{rep}"))?;
    Ok(format!("{q}; S=1 -> 0, S=2 -> 10"))
}

fn c10_multiplicativity() -> Outcome {
    type F = Zp<1_000_003>;
    let graphs = enumerate_graphs(4, 1);
    let mut pairs = 0;
    for colors in 1..=3 {
        let mut e = Vec::new();
        for a in 0..colors {
            for b in a..colors {
                for c in b..colors {
                    e.push(([a, b, c], F::new((a * 97 + b * 31 + c * 7 + 3) as i64)));
                }
            }
        }
        let t = complete_table(&e, colors).map_err(|e| e.to_string())?;
        let sums: Vec<F> = graphs.iter().map(|g| state_sum(g, &t)).collect();
        for (i, g1) in graphs.iter().enumerate() {
            for (j, g2) in graphs.iter().enumerate() {
                let lhs = state_sum(&wedge(g1, g2), &t);
                ensure(lhs == sums[i].mul(&sums[j]), || format!("{colors} colours: {g1:?} ⊔ {g2:?}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{} graphs, {pairs} ordered pairs over 1..=3 colours", graphs.len()))
}

fn reduced_words(max: usize) -> Vec<Word> {
    let alphabet = [Letter::pos(1), Letter::neg(1), Letter::pos(2), Letter::neg(2)];
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Vec::<Letter>::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for v in &frontier {
            for &l in &alphabet {
                if v.last().is_some_and(|last: &Letter| last.cancels(l)) {
                    continue;
                }
                let mut x = v.clone();
                x.push(l);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned().map(Word::from_letters));
        frontier = next;
    }
    out
}

fn c11_slicing() -> Outcome {
    let words = reduced_words(4);
    for r in &words {
        let bag = slice_bag(r, true);
        validate(&bag).map_err(|e| e.to_string())?;
        ensure(boundary_trace(&bag).map_err(|e| e.to_string())?.is_identity(), || format!("bag {r}"))?;
        for s in &words {
            let prod = slice_product(r, s);
            let rs = oracle_product(&[r.letters(), &oracle_inverse(s.letters())]);
            ensure(boundary_trace(&prod).map_err(|e| e.to_string())?.letters() == rs.as_slice(), || format!("product {r} {s}"))?;
            let comm = oracle_product(&[r.letters(), s.letters(), &oracle_inverse(r.letters()), &oracle_inverse(s.letters())]);
            let read = boundary_trace(&slice_commutator(r, s, Dominant::RFirst, true)).map_err(|e| e.to_string())?;
            let n = comm.len();
            let rotation = n == read.len()
                && (0..n.max(1)).any(|i| (0..n).all(|j| comm[(i + j) % n] == read.letters()[j]));
            ensure(rotation, || format!("commutator {r} {s} read {read}"))?;
        }
    }
    ensure(inverse_trace(&w("aabb")) == w("AABB"), || "inverse_trace(aabb)".into())?;
    Ok(format!("{} words, {} pairs", words.len(), words.len() * words.len()))
}

fn c12_nielsen() -> Outcome {
    for seed in 0..200 {
        let inst = build_instance(seed, BuildParams::default());
        let mut moves = vec![NielsenMove::invert(1), NielsenMove::invert(2)];
        for (t, k) in [(1, 2), (2, 1)] {
            moves.push(NielsenMove::right_multiply(t, k));
            moves.push(NielsenMove::left_multiply(t, k));
        }
        for m in &moves {
            let moved = nielsen_transport(&inst, m).map_err(|e| e.to_string())?;
            ensure(verify(&moved), || format!("seed {seed}: {m:?} breaks the criterion"))?;
        }
    }
    let k = smove::presentation::Presentation::from_literals(2, &[("R", "abA"), ("Ra", "a")]).unwrap();
    let l = smove::presentation::Presentation::from_literals(2, &[("S", "b")]).unwrap();
    let fixture = CriterionInstance::new(
        k,
        l,
        "R",
        "S",
        CommutatorDecomposition::new(vec![Factor { r: ConjugatedRelator::plain("Ra"), s: ConjugatedRelator::plain("S") }]),
    )
    .map_err(|e| e.to_string())?;
    ensure(verify(&fixture), || "fixture".into())?;
    let one_sided = nielsen_one_sided(&fixture, &NielsenMove::right_multiply(2, 1)).map_err(|e| e.to_string())?;
    ensure(!verify(&one_sided), || "one-sided move preserved the criterion".into())?;
    Ok("200 instances x 6 moves; one-sided fixture breaks".into())
}

/// `Q(i)` as pairs `(re, im)`, standing in for `Q[x]/(x² + 1)`.
type Gauss = (BigRational, BigRational);

fn g_mul(a: &Gauss, b: &Gauss) -> Gauss {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn g_inv(a: &Gauss) -> Gauss {
    let n = &a.0 * &a.0 + &a.1 * &a.1;
    (&a.0 / &n, -&a.1 / &n)
}

fn c13_local_invariant() -> Outcome {
    let g: Polynomial = "x^2 + 1".parse().map_err(|e: PolyError| e.to_string())?;
    let ps: Vec<Polynomial> = (1..=6).map(|k| format!("x + {k}").parse().unwrap()).collect();
    let x3 = int(1);
    let inv = poly_local_invariant(&ps, &g, &x3).map_err(|e| e.to_string())?;
    for k in [0usize, 1, 2, 4] {
        let lhs = poly::rem(&inv.q[k].mul(&ps[k]), &g).map_err(|e| e.to_string())?;
        let rhs = poly::rem(&ps[k + 1], &g).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("Q_{} P_{} != P_{}", k + 1, k + 1, k + 2))?;
    }
    // oracle: x ↦ i, P_k = k + i, P′_4 = 4 + c₃ i with c₃ = P_3(x₃) = 4
    let c3 = int(4);
    ensure(inv.c3 == c3, || format!("c3 = {}", inv.c3))?;
    let pk = |k: i64| (int(k), int(1));
    let mut acc: Gauss = (int(1), int(0));
    for k in 1..=5i64 {
        let next = if k == 4 { (int(4), c3.clone()) } else { pk(k + 1) };
        acc = g_mul(&acc, &g_mul(&next, &g_inv(&pk(k))));
    }
    let expected = Polynomial::constant(acc.0.clone()).add(&Polynomial::constant(acc.1.clone()).mul(&Polynomial::var("x")));
    ensure(inv.value == expected, || format!("value {} != oracle {expected}", inv.value))?;
    let again = poly_local_invariant(&ps, &g, &x3).map_err(|e| e.to_string())?;
    ensure(again == inv && again.value.to_string() == inv.value.to_string(), || "not deterministic".into())?;
    for bad in [-3i64, -2] {
        // c₃ = x₃ + 3 ∈ {0, 1}
        let r = poly_local_invariant(&ps, &g, &int(bad));
        ensure(matches!(r, Err(StateSumError::BadC3(_))), || format!("x3 = {bad} accepted"))?;
    }
    Ok(format!("value {}", inv.value))
}

fn c14_stabilization() -> Outcome {
    let (_, b) = seeded_backend(4);
    for v in 1..=3 {
        let rep = stabilization_demo(&b, v).map_err(|e| e.to_string())?;
        ensure(rep.report.verdict == Verdict::Obstructed, || format!("v = {v}: {}", rep.report.verdict))?;
        ensure(rep.annihilator.is_none(), || format!("v = {v}: annihilator {:?}", rep.annihilator))?;
        let witness = rep.report.witness.unwrap_or_default();
        ensure(witness.contains("forces I_K = I_L"), || format!("v = {v}: witness {witness}"))?;
    }
    Ok("v = 1, 2, 3 forced; no annihilator".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("residual formulas", c1_residuals),
        ("criterion verification", c2_verification),
        ("gauge", c3_gauge),
        ("residual-commutator identity", c4_residual_commutator),
        ("telescoping identity", c5_telescoping),
        ("perturbed closed form", c6_closed_form),
        ("inside-type invariance", c7_inside_invariance),
        ("between-type obstruction", c8_obstruction),
        ("non-multiplicativity quartic", c9_quartic),
        ("state-sum multiplicativity", c10_multiplicativity),
        ("slicing readouts", c11_slicing),
        ("Nielsen transport", c12_nielsen),
        ("polynomial local invariant", c13_local_invariant),
        ("stabilization demo", c14_stabilization),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

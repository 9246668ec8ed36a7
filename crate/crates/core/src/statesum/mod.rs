//! 3j state sums on coloured trivalent graphs, the product invariant of a
//! move sequence, the non-multiplicativity quartic and the polynomial local
//! invariant.

pub mod graph;
pub mod poly;
pub mod ring;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use graph::{
    complete_table, enumerate_graphs, eval_coloring, parse_graph, state_sum, state_sum_parallel,
    wedge, ThreeJTable, TrivalentGraph,
};
pub use poly::{PolyError, Polynomial};
pub use ring::{Ring, Zp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateSumError {
    #[error("entries for {triple:?} conflict: {first} vs {second}")]
    TableConflict {
        triple: [usize; 3],
        first: String,
        second: String,
    },
    #[error("colour {color} out of range for {colors} colours")]
    ColorRange { color: usize, colors: usize },
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    Degree { vertex: usize, degree: usize },
    #[error("vertex {0} out of range")]
    VertexRange(usize),
    #[error("colouring has {found} slots, graph needs {expected}")]
    Coloring { expected: usize, found: usize },
    #[error("move {index}: result is not isomorphic to the next move's start")]
    Unchained { index: usize },
    #[error("relation ideal is not univariate principal")]
    MultivariateIdeal,
    #[error("P_{0} is not invertible modulo g")]
    NotInvertible(usize),
    #[error("c3 = P_3(x3) = {0} must differ from 0 and 1")]
    BadC3(String),
    #[error("expected 6 polynomials, got {0}")]
    PolyCount(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// `a,b,c,value` lines; values are integers, `p/q` or polynomial
/// expressions in indeterminates.
pub fn parse_table(text: &str) -> Result<ThreeJTable<Polynomial>, StateSumError> {
    let mut entries = Vec::new();
    let mut max_color = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| StateSumError::Syntax {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.splitn(4, ',').map(str::trim).collect();
        let [a, b, c, value] = fields.as_slice() else {
            return Err(syntax("expected a,b,c,value".into()));
        };
        let mut triple = [0usize; 3];
        for (slot, f) in triple.iter_mut().zip([a, b, c]) {
            *slot = f
                .parse()
                .map_err(|_| syntax(format!("bad colour {f:?}")))?;
            max_color = max_color.max(Some(*slot));
        }
        let value: Polynomial = value.parse().map_err(|e: PolyError| syntax(e.to_string()))?;
        entries.push((triple, value));
    }
    complete_table(&entries, max_color.map_or(0, |m| m + 1))
}

/// `state_sum(after) − state_sum(before)`.
pub fn move_value<R: Ring>(before: &TrivalentGraph, after: &TrivalentGraph, t: &ThreeJTable<R>) -> R {
    state_sum(after, t).sub(&state_sum(before, t))
}

pub type LocalGraphMove = (TrivalentGraph, TrivalentGraph);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveSequence {
    pub moves: Vec<LocalGraphMove>,
    /// Pairs of move lists declared equivalent.
    pub relations: Vec<(Vec<LocalGraphMove>, Vec<LocalGraphMove>)>,
}

impl MoveSequence {
    pub fn new(moves: Vec<LocalGraphMove>) -> Self {
        MoveSequence {
            moves,
            relations: Vec::new(),
        }
    }

    pub fn check_chain(&self) -> Result<(), StateSumError> {
        for (k, pair) in self.moves.windows(2).enumerate() {
            if !pair[0].1.is_isomorphic(&pair[1].0) {
                return Err(StateSumError::Unchained { index: k });
            }
        }
        Ok(())
    }
}

fn moves_product(moves: &[LocalGraphMove], t: &ThreeJTable<Polynomial>) -> Polynomial {
    moves
        .iter()
        .fold(Polynomial::one(), |acc, (b, a)| acc.mul(&move_value(b, a, t)))
}

/// Generator of the relation ideal: `None` for the zero ideal.
pub fn relation_generator(
    ms: &MoveSequence,
    t: &ThreeJTable<Polynomial>,
) -> Result<Option<Polynomial>, StateSumError> {
    let mut g: Option<Polynomial> = None;
    for (a, b) in &ms.relations {
        let diff = moves_product(a, t).sub(&moves_product(b, t));
        if diff.is_zero() {
            continue;
        }
        if diff.single_variable().is_err() {
            return Err(StateSumError::MultivariateIdeal);
        }
        g = Some(match g {
            None => poly::gcd(&diff, &diff).map_err(|_| StateSumError::MultivariateIdeal)?,
            Some(prev) => {
                poly::gcd(&prev, &diff).map_err(|_| StateSumError::MultivariateIdeal)?
            }
        });
    }
    Ok(g)
}

/// Product of the move values, reduced modulo the ideal generated by the
/// declared relations.
pub fn invariant(ms: &MoveSequence, t: &ThreeJTable<Polynomial>) -> Result<Polynomial, StateSumError> {
    ms.check_chain()?;
    let value = moves_product(&ms.moves, t);
    match relation_generator(ms, t)? {
        None => Ok(value),
        Some(g) if g.as_constant().is_some() => Ok(Polynomial::zero()),
        Some(g) => poly::rem(&value, &g).map_err(|_| StateSumError::MultivariateIdeal),
    }
}

fn nonmult_vars() -> [Polynomial; 6] {
    ["K0", "K1", "K2", "L0", "L1", "L2"].map(Polynomial::var)
}

/// The two expansions before any substitution:
/// `(K1·L1 − K0·L0)(K2·L2 − K1·L1)` and `(K1 − K0)(K2 − K1)(L1 − L0)(L2 − L1)`.
pub fn nonmult_expressions() -> (Polynomial, Polynomial) {
    let [k0, k1, k2, l0, l1, l2] = nonmult_vars();
    let e1 = k1.mul(&l1).sub(&k0.mul(&l0)).mul(&k2.mul(&l2).sub(&k1.mul(&l1)));
    let e2 = k1
        .sub(&k0)
        .mul(&k2.sub(&k1))
        .mul(&l1.sub(&l0))
        .mul(&l2.sub(&l1));
    (e1, e2)
}

/// Expression 2 minus expression 1 with the outer slices set to the point
/// value 1 and both middle slices set to `S`.
pub fn nonmult_expand() -> Polynomial {
    let (e1, e2) = nonmult_expressions();
    let one = Polynomial::one();
    let s = Polynomial::var("S");
    let mut d = e2.sub(&e1);
    for v in ["L0", "L2", "K0", "K2"] {
        d = d.substitute(v, &one);
    }
    for v in ["K1", "L1"] {
        d = d.substitute(v, &s);
    }
    d
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonmultReport {
    /// `Σ_a |a a a|`.
    pub s: Polynomial,
    pub value: Polynomial,
    pub multiplicative: Option<bool>,
}

impl fmt::Display for NonmultReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.multiplicative {
            Some(true) => "multiplicative locus",
            Some(false) => "non-multiplicative",
            None => "symbolic",
        };
        write!(f, "S = {}; value = {}; {verdict}", self.s, self.value)
    }
}

pub fn nonmult_check(t: &ThreeJTable<Polynomial>) -> NonmultReport {
    let s = t.circle_sum();
    let quartic = nonmult_expand();
    match s.as_constant() {
        Some(c) => {
            let value = quartic.eval("S", &c);
            NonmultReport {
                multiplicative: Some(value.is_zero()),
                s,
                value,
            }
        }
        None => NonmultReport {
            s,
            value: quartic,
            multiplicative: None,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalInvariant {
    /// `Q_1 .. Q_5` with `Q_4` already replaced by `Q′_4`.
    pub q: Vec<Polynomial>,
    pub c3: BigRational,
    pub value: Polynomial,
}

/// `Q_k ≡ P_{k+1}·P_k⁻¹ (mod g)`, with `Q_4` replaced by `Q′_4 ≡ P′_4·P_4⁻¹`
/// where `P′_4(x) = P_4(c_3·x)` and `c_3 = P_3(x_3)`. The value is the
/// product of the chain maps, reduced mod `g`.
pub fn poly_local_invariant(
    p: &[Polynomial],
    g: &Polynomial,
    x3: &BigRational,
) -> Result<LocalInvariant, StateSumError> {
    if p.len() != 6 {
        return Err(StateSumError::PolyCount(p.len()));
    }
    let var = g.single_variable()?.unwrap_or_else(|| "x".into());
    for q in p {
        match q.single_variable()? {
            Some(v) if v != var => return Err(PolyError::NotUnivariate.into()),
            _ => {}
        }
    }
    let c3 = p[2]
        .eval(&var, x3)
        .as_constant()
        .expect("evaluation leaves a constant");
    if Zero::is_zero(&c3) || One::is_one(&c3) {
        return Err(StateSumError::BadC3(c3.to_string()));
    }
    let mut inverses = Vec::with_capacity(6);
    for (k, pk) in p.iter().enumerate() {
        let inv = poly::inverse_mod(pk, g)?.ok_or(StateSumError::NotInvertible(k + 1))?;
        inverses.push(inv);
    }
    let mut q = Vec::with_capacity(5);
    for k in 0..5 {
        let next = if k == 3 {
            p[3].substitute(&var, &Polynomial::constant(c3.clone()).mul(&Polynomial::var(&var)))
        } else {
            p[k + 1].clone()
        };
        q.push(poly::rem(&next.mul(&inverses[k]), g)?);
    }
    let value = q
        .iter()
        .try_fold(Polynomial::one(), |acc, qk| poly::rem(&acc.mul(qk), g))?;
    Ok(LocalInvariant { q, c3, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn quartic() {
        let q = nonmult_expand();
        assert_eq!(q.to_string(), "2S^4 - 4S^3 + 4S^2 - 4S + 2");
        assert!(q.eval("S", &r(1)).is_zero());
        assert_eq!(q.eval("S", &r(2)), Polynomial::integer(10));
    }

    #[test]
    fn nonmult_check_examples() {
        let on = parse_table("0,0,0,1\n1,1,1,0\n").unwrap();
        assert_eq!(nonmult_check(&on).multiplicative, Some(true));
        let off = parse_table("0,0,0,1\n1,1,1,1\n").unwrap();
        let rep = nonmult_check(&off);
        assert_eq!(rep.multiplicative, Some(false));
        assert_eq!(rep.value, Polynomial::integer(10));
        let sym = parse_table("0,0,0,x\n1,1,1,y\n").unwrap();
        let rep = nonmult_check(&sym);
        assert_eq!(rep.multiplicative, None);
        assert_eq!(rep.value, nonmult_expand());
    }

    #[test]
    fn move_values() {
        let t = parse_table("0,0,0,x\n1,1,1,y\n").unwrap();
        let (e, c) = (TrivalentGraph::empty(), TrivalentGraph::circle());
        assert!(move_value(&c, &c, &t).is_zero());
        assert_eq!(move_value(&e, &c, &t), p("x + y - 1"));
        assert_eq!(move_value(&c, &e, &t), move_value(&e, &c, &t).neg());
    }

    #[test]
    fn sphere_invariant() {
        let t = parse_table("0,0,0,S\n").unwrap();
        let (e, c) = (TrivalentGraph::empty(), TrivalentGraph::circle());
        let ms = MoveSequence::new(vec![(e.clone(), c.clone()), (c.clone(), e.clone())]);
        assert_eq!(invariant(&ms, &t).unwrap(), p("(S - 1)(1 - S)"));
        assert_eq!(invariant(&MoveSequence::default(), &t).unwrap(), Polynomial::one());

        let mut rel = ms.clone();
        rel.relations.push((vec![(e.clone(), c.clone())], vec![(e.clone(), c.clone())]));
        assert_eq!(invariant(&rel, &t).unwrap(), invariant(&ms, &t).unwrap());

        let mut rel = ms.clone();
        rel.relations.push((vec![(e.clone(), c.clone())], vec![]));
        // ideal (S - 2) sends S to 2
        assert_eq!(invariant(&rel, &t).unwrap(), Polynomial::integer(-1));

        let bad = MoveSequence::new(vec![(e.clone(), c.clone()), (e.clone(), c.clone())]);
        assert_eq!(invariant(&bad, &t), Err(StateSumError::Unchained { index: 0 }));

        let t2 = parse_table("0,0,0,x\n1,1,1,y\n").unwrap();
        let mut multi = MoveSequence::new(vec![]);
        multi.relations.push((vec![(e.clone(), c.clone())], vec![]));
        assert_eq!(invariant(&multi, &t2), Err(StateSumError::MultivariateIdeal));
    }

    #[test]
    fn local_invariant_examples() {
        let one = Polynomial::one();
        let g = p("x^2 + 1");
        let mut ps = vec![one.clone(); 6];
        assert!(matches!(
            poly_local_invariant(&ps, &g, &r(2)),
            Err(StateSumError::BadC3(_))
        ));
        ps[2] = p("x");
        let inv = poly_local_invariant(&ps, &g, &r(2)).unwrap();
        assert_eq!(inv.value, one);
        assert_eq!(inv.c3, r(2));

        let ps: Vec<Polynomial> = (1..=6).map(|k| p(&format!("x + {k}"))).collect();
        let a = poly_local_invariant(&ps, &g, &r(1)).unwrap();
        let b = poly_local_invariant(&ps, &g, &r(1)).unwrap();
        assert_eq!(a, b);
        for k in [0, 1, 2, 4] {
            assert_eq!(poly::rem(&a.q[k].mul(&ps[k]), &g).unwrap(), poly::rem(&ps[k + 1], &g).unwrap());
        }
        // x3 = -2 gives c3 = P3(-2) = 1
        assert!(matches!(
            poly_local_invariant(&ps, &g, &r(-2)),
            Err(StateSumError::BadC3(_))
        ));
        let bad = vec![p("x + 1"), p("x^2 + 1"), p("x + 3"), one.clone(), one.clone(), one];
        assert_eq!(poly_local_invariant(&bad, &g, &r(1)), Err(StateSumError::NotInvertible(2)));
    }

    #[test]
    fn table_file() {
        let t = parse_table("# header\n0,0,1,1/2\n2,1,0,x+1\n").unwrap();
        assert_eq!(t.color_count(), 3);
        assert_eq!(t.get(1, 0, 0), p("1/2"));
        assert!(matches!(parse_table("0,0\n"), Err(StateSumError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_table("0,0,1,a\n1,0,0,b\n"),
            Err(StateSumError::TableConflict { .. })
        ));
    }
}

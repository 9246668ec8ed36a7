//! Commuting matrix backends over a prime field and the invariants computed
//! from abstract slice sequences.
//!
//! Every cell token is assigned an invertible `d × d` matrix; all assigned
//! matrices commute and a token shares its matrix with its formal inverse.
//! Slice endomorphisms are products of token matrices and the transition
//! maps are `F_k = A_{k+1} · A_k⁻¹`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::criterion::{self, CriterionError, CriterionInstance};
use crate::freegroup::Word;
use crate::presentation::QMove;
use crate::slicing::{
    self, build_abstract, AbstractSlice, AbstractSliceSequence, CellToken, IdentificationType,
    SliceError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaygroundError {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("dimension must be at least 1")]
    Dimension,
    #[error("no invertible draw for {0:?} after {1} attempts")]
    Degenerate(String, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("token {0:?} has no assigned matrix")]
    Unassigned(String),
    #[error("matrix for {0:?} does not commute with {1:?}")]
    NotCommuting(String, String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("sequence has no perturbation slice")]
    NoPerturbation,
    #[error("relator lists differ in length ({0} vs {1})")]
    Pairing(usize, usize),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Slice(#[from] SliceError),
}

type Result<T> = std::result::Result<T, PlaygroundError>;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= p {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> Option<u64> {
    (a % p != 0).then(|| mod_pow(a, p - 2, p))
}

/// A square matrix over `F_p`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u64,
    d: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zero(p: u64, d: usize) -> Self {
        Matrix {
            p,
            d,
            data: vec![0; d * d],
        }
    }

    pub fn identity(p: u64, d: usize) -> Self {
        Matrix::scalar(p, d, 1)
    }

    pub fn scalar(p: u64, d: usize, c: u64) -> Self {
        let mut m = Matrix::zero(p, d);
        for i in 0..d {
            m.data[i * d + i] = c % p;
        }
        m
    }

    pub fn diagonal(p: u64, entries: &[u64]) -> Self {
        let d = entries.len();
        let mut m = Matrix::zero(p, d);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * d + i] = e % p;
        }
        m
    }

    pub fn from_rows(p: u64, d: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != d * d {
            return Err(PlaygroundError::DimensionMismatch(data.len(), d * d));
        }
        Ok(Matrix {
            p,
            d,
            data: data.into_iter().map(|x| x % p).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.d + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.p, self.d)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.d, other.d, "dimension mismatch");
        let (d, p) = (self.d, self.p);
        let mut out = Matrix::zero(p, d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = (out.data[i * d + j] + a * other.data[k * d + j]) % p;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        Matrix { data, ..self.clone() }
    }

    pub fn scale(&self, c: u64) -> Matrix {
        let c = c % self.p;
        let data = self.data.iter().map(|a| a * c % self.p).collect();
        Matrix { data, ..self.clone() }
    }

    pub fn pow(&self, e: u32) -> Matrix {
        (0..e).fold(Matrix::identity(self.p, self.d), |acc, _| acc.mul(self))
    }

    /// Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix> {
        let (d, p) = (self.d, self.p);
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(p, d).data;
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| a[r * d + col] != 0)
                .ok_or(PlaygroundError::Singular)?;
            if pivot != col {
                for j in 0..d {
                    a.swap(pivot * d + j, col * d + j);
                    inv.swap(pivot * d + j, col * d + j);
                }
            }
            let s = mod_inv(a[col * d + col], p).expect("pivot is nonzero");
            for j in 0..d {
                a[col * d + j] = a[col * d + j] * s % p;
                inv[col * d + j] = inv[col * d + j] * s % p;
            }
            for r in 0..d {
                let f = a[r * d + col];
                if r == col || f == 0 {
                    continue;
                }
                for j in 0..d {
                    a[r * d + j] = (a[r * d + j] + (p - f) * a[col * d + j]) % p;
                    inv[r * d + j] = (inv[r * d + j] + (p - f) * inv[col * d + j]) % p;
                }
            }
        }
        Ok(Matrix { p, d, data: inv })
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_ok()
    }

    pub fn commutes_with(&self, other: &Matrix) -> bool {
        self.mul(other) == other.mul(self)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .data
            .chunks(self.d.max(1))
            .map(|r| {
                r.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Diagonal,
    PolynomialInM,
}

const MAX_DRAWS: usize = 100;

/// 64-bit FNV-1a, used to give every label its own deterministic stream.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Backend {
    p: u64,
    d: usize,
    seed: u64,
    family: Family,
    generator: Option<Matrix>,
    sphere: Matrix,
    assigned: BTreeMap<String, Matrix>,
}

impl Backend {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn sphere(&self) -> &Matrix {
        &self.sphere
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.p, self.d)
    }

    /// Stored labels, in order.
    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.assigned.keys()
    }

    /// Looks up a label, falling back to its formal inverse.
    pub fn get(&self, label: &str) -> Result<&Matrix> {
        if label == "S2" {
            return Ok(&self.sphere);
        }
        self.assigned
            .get(label)
            .or_else(|| self.assigned.get(&slicing::inverse_label(label)))
            .ok_or_else(|| PlaygroundError::Unassigned(label.to_string()))
    }

    pub fn token(&self, t: &CellToken) -> Result<Matrix> {
        match t.label() {
            None => Ok(self.identity()),
            Some(l) => self.get(&l).cloned(),
        }
    }

    fn draw(&self, label: &str) -> Result<Matrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ label_hash(label));
        let (p, d) = (self.p, self.d);
        for _ in 0..MAX_DRAWS {
            let m = match (&self.family, &self.generator) {
                (Family::PolynomialInM, Some(g)) => {
                    let mut acc = Matrix::zero(p, d);
                    let mut power = Matrix::identity(p, d);
                    for _ in 0..d {
                        acc = acc.add(&power.scale(rng.gen_range(0..p)));
                        power = power.mul(g);
                    }
                    acc
                }
                _ => {
                    let diag: Vec<u64> = (0..d).map(|_| rng.gen_range(1..p)).collect();
                    Matrix::diagonal(p, &diag)
                }
            };
            if m.is_invertible() {
                return Ok(m);
            }
        }
        Err(PlaygroundError::Degenerate(label.to_string(), MAX_DRAWS))
    }

    /// Adds a draw for every label whose class is not yet assigned.
    pub fn extend<S: AsRef<str>>(&mut self, labels: &[S]) -> Result<()> {
        for l in labels {
            let l = l.as_ref();
            if l == "S2" || self.get(l).is_ok() {
                continue;
            }
            let key = slicing::canonical_key(l);
            let m = self.draw(&key)?;
            self.assigned.insert(key, m);
        }
        Ok(())
    }

    pub fn extended<S: AsRef<str>>(&self, labels: &[S]) -> Result<Backend> {
        let mut b = self.clone();
        b.extend(labels)?;
        Ok(b)
    }

    /// Overrides one token class; the new matrix must be invertible and
    /// commute with everything already assigned.
    pub fn set(&mut self, label: &str, m: Matrix) -> Result<()> {
        if m.dim() != self.d {
            return Err(PlaygroundError::DimensionMismatch(m.dim(), self.d));
        }
        if !m.is_invertible() {
            return Err(PlaygroundError::Singular);
        }
        let key = slicing::canonical_key(label);
        for (other, om) in &self.assigned {
            if *other != key && !m.commutes_with(om) {
                return Err(PlaygroundError::NotCommuting(key, other.clone()));
            }
        }
        if label == "S2" {
            self.sphere = m;
        } else {
            self.assigned.remove(&slicing::inverse_label(&key));
            self.assigned.insert(key, m);
        }
        Ok(())
    }

    /// Sets every spherical-element token to the identity.
    pub fn with_identity_spels(&self) -> Backend {
        let mut b = self.clone();
        for (k, m) in b.assigned.iter_mut() {
            if k.starts_with("bag[") || k.starts_with("pair[") {
                *m = Matrix::identity(self.p, self.d);
            }
        }
        b
    }

    /// A negative control: each label and its formal inverse receive
    /// different matrices. Still commuting, but `Z(V) ≠ Z(V⁻¹)`.
    pub fn with_broken_aliasing(&self) -> Result<Backend> {
        let mut b = self.clone();
        let keys: Vec<String> = self.assigned.keys().cloned().collect();
        for k in keys {
            let inv = slicing::inverse_label(&k);
            if inv == k {
                continue;
            }
            let base = b.assigned[&k].clone();
            let mut m = b.draw(&format!("broken:{inv}"))?;
            if m == base {
                m = m.mul(&Matrix::scalar(self.p, self.d, 2));
            }
            b.assigned.insert(inv, m);
        }
        Ok(b)
    }

    /// Checks invertibility, pairwise commutation, inverse aliasing and the
    /// sphere value.
    pub fn check_axioms(&self) -> Result<()> {
        if !self.sphere.is_invertible() {
            return Err(PlaygroundError::Singular);
        }
        let all: Vec<(&String, &Matrix)> = self.assigned.iter().collect();
        for (i, (ka, a)) in all.iter().enumerate() {
            if !a.is_invertible() {
                return Err(PlaygroundError::Singular);
            }
            if !a.commutes_with(&self.sphere) {
                return Err(PlaygroundError::NotCommuting((*ka).clone(), "S2".into()));
            }
            for (kb, b) in &all[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(PlaygroundError::NotCommuting((*ka).clone(), (*kb).clone()));
                }
            }
        }
        Ok(())
    }

    /// True iff every stored label agrees with its formal inverse.
    pub fn aliasing_holds(&self) -> bool {
        self.assigned.iter().all(|(k, m)| {
            match self.assigned.get(&slicing::inverse_label(k)) {
                Some(other) => other == m,
                None => true,
            }
        })
    }

    pub fn dump(&self) -> String {
        let mut out = format!("p {} d {}\n", self.p, self.d);
        let row = |m: &Matrix| {
            m.entries()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!("tok S2 {}\n", row(&self.sphere)));
        for (k, m) in &self.assigned {
            out.push_str(&format!("tok {k} {}\n", row(m)));
        }
        out
    }

    pub fn load(text: &str) -> Result<Backend> {
        let mut header: Option<(u64, usize)> = None;
        let mut sphere = None;
        let mut assigned = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| PlaygroundError::Syntax {
                line: i + 1,
                message,
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["p", p, "d", d] => {
                    let p: u64 = p.parse().map_err(|_| syntax(format!("bad prime {p:?}")))?;
                    let d: usize = d.parse().map_err(|_| syntax(format!("bad dimension {d:?}")))?;
                    if !is_prime(p) || p >= 1 << 31 {
                        return Err(PlaygroundError::NotPrime(p));
                    }
                    header = Some((p, d));
                }
                ["tok", label, rest @ ..] => {
                    let (p, d) = header.ok_or_else(|| syntax("tok before header".into()))?;
                    let data = rest
                        .iter()
                        .map(|x| x.parse::<u64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| syntax(e.to_string()))?;
                    let m = Matrix::from_rows(p, d, data).map_err(|e| syntax(e.to_string()))?;
                    if *label == "S2" {
                        sphere = Some(m);
                    } else {
                        assigned.insert(label.to_string(), m);
                    }
                }
                _ => return Err(syntax(format!("unrecognised line {line:?}"))),
            }
        }
        let (p, d) = header.ok_or(PlaygroundError::Syntax {
            line: 0,
            message: "missing header".into(),
        })?;
        let b = Backend {
            p,
            d,
            seed: 0,
            family: Family::Diagonal,
            generator: None,
            sphere: sphere.unwrap_or_else(|| Matrix::identity(p, d)),
            assigned,
        };
        b.check_axioms()?;
        Ok(b)
    }
}

/// Draws a backend with one matrix per token class; draws depend only on
/// the seed and the label, not on the order of `labels`.
pub fn make_backend<S: AsRef<str>>(
    labels: &[S],
    p: u64,
    d: usize,
    seed: u64,
    family: Family,
) -> Result<Backend> {
    if !is_prime(p) || p >= 1 << 31 {
        return Err(PlaygroundError::NotPrime(p));
    }
    if d == 0 {
        return Err(PlaygroundError::Dimension);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generator = match family {
        Family::Diagonal => None,
        Family::PolynomialInM => Some(Matrix::from_rows(
            p,
            d,
            (0..d * d).map(|_| rng.gen_range(0..p)).collect(),
        )?),
    };
    let sphere = Matrix::scalar(p, d, rng.gen_range(1..p));
    let mut b = Backend {
        p,
        d,
        seed,
        family,
        generator,
        sphere,
        assigned: BTreeMap::new(),
    };
    b.extend(labels)?;
    b.check_axioms()?;
    Ok(b)
}

/// Every token label used by the abstract sequences of `inst` in both
/// identification types, for the instance and its gauge.
pub fn instance_labels(inst: &CriterionInstance) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut add = |i: &CriterionInstance| -> Result<()> {
        for ty in [IdentificationType::Longitudinal, IdentificationType::Meridian] {
            out.extend(build_abstract(i, ty, None)?.labels());
        }
        Ok(())
    };
    add(inst)?;
    add(&criterion::gauge(inst)?)?;
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn backend_for(
    inst: &CriterionInstance,
    p: u64,
    d: usize,
    seed: u64,
    family: Family,
) -> Result<Backend> {
    make_backend(&instance_labels(inst)?, p, d, seed, family)
}

/// Product of the token matrices of a slice, in token order.
pub fn slice_endo(s: &AbstractSlice, b: &Backend) -> Result<Matrix> {
    s.tokens
        .iter()
        .try_fold(b.identity(), |acc, t| Ok(acc.mul(&b.token(t)?)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateModuleSeq {
    pub endos: Vec<Matrix>,
}

pub fn state_modules(aseq: &AbstractSliceSequence, b: &Backend) -> Result<StateModuleSeq> {
    Ok(StateModuleSeq {
        endos: aseq
            .slices
            .iter()
            .map(|s| slice_endo(s, b))
            .collect::<Result<_>>()?,
    })
}

/// `F_k = A_{k+1} · A_k⁻¹`.
pub fn transitions(seq: &StateModuleSeq) -> Result<Vec<Matrix>> {
    seq.endos
        .windows(2)
        .map(|w| Ok(w[1].mul(&w[0].inverse()?)))
        .collect()
}

/// `F_m ⋯ F_1 · F_0`.
pub fn compose(maps: &[Matrix], p: u64, d: usize) -> Matrix {
    maps.iter()
        .fold(Matrix::identity(p, d), |acc, f| f.mul(&acc))
}

/// Product of the spherical-element matrices at the perturbation slice.
pub fn spel_product(aseq: &AbstractSliceSequence, b: &Backend) -> Result<Matrix> {
    aseq.spels()
        .into_iter()
        .try_fold(b.identity(), |acc, t| Ok(acc.mul(&b.token(t)?)))
}

/// The perturbed slice after the perturbation index: every commutator
/// composed with the spherical elements of its own factor.
pub fn perturbed_endo(aseq: &AbstractSliceSequence, b: &Backend) -> Result<Matrix> {
    let k = aseq.perturbation_index;
    let (before, after) = match (aseq.slices.get(k), aseq.slices.get(k + 1)) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(PlaygroundError::NoPerturbation),
    };
    let mut acc = b.identity();
    for t in &after.tokens {
        match t {
            CellToken::Commutator { index, .. } => {
                acc = acc.mul(&b.token(t)?);
                for s in before.tokens.iter().filter(|s| s.is_spel()) {
                    let own = match s {
                        CellToken::SpElBag { index: i, .. }
                        | CellToken::SpElInvPair { index: i, .. } => i == index,
                        _ => false,
                    };
                    if own {
                        acc = acc.mul(&b.token(s)?);
                    }
                }
            }
            other => acc = acc.mul(&b.token(other)?),
        }
    }
    Ok(acc)
}

/// `F_6 ⋯ F_4 · F′_3 · F_2 ⋯ F_0` with only the perturbed transition
/// replaced.
pub fn perturbed_invariant(aseq: &AbstractSliceSequence, b: &Backend) -> Result<Matrix> {
    let k = aseq.perturbation_index;
    let seq = state_modules(aseq, b)?;
    let mut maps = transitions(&seq)?;
    if k >= maps.len() {
        return Err(PlaygroundError::NoPerturbation);
    }
    maps[k] = perturbed_endo(aseq, b)?.mul(&seq.endos[k].inverse()?);
    Ok(compose(&maps, b.p, b.d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Obstructed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Obstructed => "OBSTRUCTED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub verdict: Verdict,
    pub witness: Option<String>,
}

impl InvarianceReport {
    fn pass() -> Self {
        InvarianceReport {
            verdict: Verdict::Pass,
            witness: None,
        }
    }

    fn with(verdict: Verdict, witness: String) -> Self {
        InvarianceReport {
            verdict,
            witness: Some(witness),
        }
    }
}

/// Which presentation a Q-move acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveSide {
    K,
    L,
}

/// Compares the invariant with and without a residual cell riding beside
/// `R·S⁻¹`.
pub fn check_residual_absorbed(
    inst: &CriterionInstance,
    ty: IdentificationType,
    residual: &Word,
    b: &Backend,
) -> Result<InvarianceReport> {
    let plain = build_abstract(inst, ty, None)?;
    let with = build_abstract(inst, ty, Some(residual))?;
    let b = b.extended(&with.labels())?;
    let x = perturbed_invariant(&plain, &b)?;
    let y = perturbed_invariant(&with, &b)?;
    Ok(if x == y {
        InvarianceReport::pass()
    } else {
        InvarianceReport::with(
            Verdict::Fail,
            format!("residual {residual}: {x} != {y}"),
        )
    })
}

/// Applies `m` on one side, computes the residual (`L′` or `M′⁻¹`) and
/// checks that it is absorbed.
pub fn check_inside_invariance(
    inst: &CriterionInstance,
    side: MoveSide,
    m: &QMove,
    ty: IdentificationType,
    b: &Backend,
) -> Result<InvarianceReport> {
    if !criterion::verify(inst) {
        return Err(CriterionError::NotVerified.into());
    }
    let residual = match side {
        MoveSide::K => {
            let k2 = crate::presentation::apply_qmove(inst.k(), m)
                .map_err(CriterionError::from)?;
            let r_new = k2.word(inst.r_name()).map_err(CriterionError::from)?;
            let l = criterion::residual_r(inst.r_word(), r_new);
            debug_assert_eq!(l.mul(r_new), *inst.r_word());
            l
        }
        MoveSide::L => {
            let l2 = crate::presentation::apply_qmove(inst.l(), m)
                .map_err(CriterionError::from)?;
            let s_new = l2.word(inst.s_name()).map_err(CriterionError::from)?;
            criterion::residual_s(inst.s_word(), s_new)
        }
    };
    check_residual_absorbed(inst, ty, &residual, b)
}

/// Compares type `ty` on the instance with the other type on its gauge;
/// both the invariant and every slice endomorphism must agree.
pub fn check_gauge(
    inst: &CriterionInstance,
    ty: IdentificationType,
    b: &Backend,
) -> Result<InvarianceReport> {
    let g = criterion::gauge(inst)?;
    let a1 = build_abstract(inst, ty, None)?;
    let a2 = build_abstract(&g, ty.other(), None)?;
    let x = perturbed_invariant(&a1, b)?;
    let y = perturbed_invariant(&a2, b)?;
    if x != y {
        return Ok(InvarianceReport::with(
            Verdict::Fail,
            format!("invariant {x} != gauged {y}"),
        ));
    }
    let s1 = state_modules(&a1, b)?;
    let s2 = state_modules(&a2, b)?;
    for (k, (e1, e2)) in s1.endos.iter().zip(&s2.endos).enumerate() {
        if e1 != e2 {
            return Ok(InvarianceReport::with(
                Verdict::Fail,
                format!("A_{k} = {e1} != gauged A_{k} = {e2}"),
            ));
        }
    }
    Ok(InvarianceReport::pass())
}

/// Transition maps of the two comparison threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threads {
    pub first_f: Vec<Matrix>,
    pub first_h: Vec<Matrix>,
    pub second_f: Vec<Matrix>,
    pub second_h: Vec<Matrix>,
    pub perturbation: Matrix,
}

fn maps_of(endos: &[Matrix]) -> Result<Vec<Matrix>> {
    transitions(&StateModuleSeq {
        endos: endos.to_vec(),
    })
}

/// Builds both threads. In the first, `L′` rides with `S·S⁻¹` and the
/// `H` thread passes through the separate cells `S`, `S⁻¹`. In the second,
/// the `H` thread replaces the sphere slice by the spherical elements.
pub fn comparison_threads(
    inst: &CriterionInstance,
    ty: IdentificationType,
    b: &Backend,
) -> Result<Threads> {
    let aseq = build_abstract(inst, ty, None)?;
    let s = inst.s_word().clone();
    let l_prime = criterion::residual_r(inst.r_word(), &s);
    let l_tok = CellToken::Cell(vec![l_prime]);
    let ss_tok = CellToken::Cell(vec![s.clone(), s.inverse()]);
    let s_tok = CellToken::Cell(vec![s.clone()]);
    let s_inv_tok = CellToken::Cell(vec![s.inverse()]);
    let labels: Vec<String> = [&l_tok, &ss_tok, &s_tok, &s_inv_tok]
        .iter()
        .filter_map(|t| t.label())
        .collect();
    let b = b.extended(&labels)?;
    let k = aseq.perturbation_index;
    let spel = spel_product(&aseq, &b)?;
    let comm = aseq.slices[k + 1]
        .tokens
        .iter()
        .filter(|t| matches!(t, CellToken::Commutator { .. }))
        .try_fold(b.identity(), |acc, t| Ok::<_, PlaygroundError>(acc.mul(&b.token(t)?)))?;
    let sigma = b.sphere().mul(b.sphere());
    let joined = b.token(&CellToken::Cell(Vec::new()))?;
    let l = b.token(&l_tok)?;
    let c = l.mul(&b.token(&ss_tok)?);
    let split = l.mul(&b.token(&s_tok)?).mul(&b.token(&s_inv_tok)?);

    let p1 = c.mul(&sigma);
    let p2 = c.mul(&spel);
    let p3 = c.mul(&comm);
    let first_f = maps_of(&[p1.clone(), p2.clone(), p3.clone(), joined.clone()])?;
    let first_h = maps_of(&[p1, split.mul(&sigma), p2, p3, joined.clone()])?;

    let second_f = maps_of(&[
        l.clone(),
        l.mul(&sigma),
        l.mul(&spel),
        l.mul(&comm),
        joined.clone(),
    ])?;
    let second_h = maps_of(&[l.clone(), l.mul(&spel), l.mul(&comm), joined])?;
    Ok(Threads {
        first_f,
        first_h,
        second_f,
        second_h,
        perturbation: spel,
    })
}

/// Re-derives the chain equalities of both threads, then imposes the second
/// perturbation `F′_2 = F_2 · P` on the second thread. The requirement
/// `F′_2 F_1 F_0 = H_1 H_0` forces `F′_2 = F_2`, which contradicts any
/// `P ≠ 1`.
pub fn between_type_obstruction(
    inst: &CriterionInstance,
    ty: IdentificationType,
    b: &Backend,
) -> Result<InvarianceReport> {
    if !criterion::verify(inst) {
        return Err(CriterionError::NotVerified.into());
    }
    let t = comparison_threads(inst, ty, b)?;
    let (p, d) = (b.p, b.d);
    // first thread: F_1, F_2, F_3 against H_0 .. H_3
    let (f1, f2, f3) = (&t.first_f[0], &t.first_f[1], &t.first_f[2]);
    let h = &t.first_h;
    let first = [
        ("F_2 = H_2", f2 == &h[2]),
        ("F_3 = H_3", f3 == &h[3]),
        ("H_1 H_0 = F_1", h[1].mul(&h[0]) == *f1),
        ("H_3 H_2 H_1 H_0 = F_3 F_2 F_1", compose(h, p, d) == compose(&t.first_f, p, d)),
    ];
    if let Some((name, _)) = first.iter().find(|(_, ok)| !ok) {
        return Ok(InvarianceReport::with(Verdict::Fail, format!("first thread: {name} fails")));
    }
    let f2p = f2.mul(&t.perturbation);
    let h2p = h[2].mul(&t.perturbation);
    if f2p != h2p {
        return Ok(InvarianceReport::with(Verdict::Fail, "first thread: F'_2 != H'_2".into()));
    }

    let (f, hh) = (&t.second_f, &t.second_h);
    let lower_f = compose(&f[..3], p, d);
    let lower_h = compose(&hh[..2], p, d);
    if f[3] != hh[2] || lower_f != lower_h {
        return Ok(InvarianceReport::with(
            Verdict::Fail,
            "second thread: F_3 = H_2 or F_2 F_1 F_0 = H_1 H_0 fails".into(),
        ));
    }
    let f3p = f[3].mul(&t.perturbation);
    let h2p = hh[2].mul(&t.perturbation);
    if f3p != h2p {
        return Ok(InvarianceReport::with(Verdict::Fail, "second thread: F'_3 != H'_2".into()));
    }
    let f2p = f[2].mul(&t.perturbation);
    let required = compose(&[f[0].clone(), f[1].clone(), f2p.clone()], p, d) == lower_h;
    if required {
        Ok(InvarianceReport::pass())
    } else {
        Ok(InvarianceReport::with(
            Verdict::Obstructed,
            format!(
                "F'_2 F_1 F_0 = H_1 H_0 forces F'_2 = F_2, but F'_2 = F_2 * P with P = {} != I",
                t.perturbation
            ),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombineMode {
    Product,
    PermutationSum,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut q = perm.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Multiplies the local invariants in list order, or sums the products over
/// every ordering.
pub fn global_combine(p: u64, d: usize, locals: &[Matrix], mode: CombineMode) -> Result<Matrix> {
    if let Some(m) = locals.iter().find(|m| m.dim() != d) {
        return Err(PlaygroundError::DimensionMismatch(m.dim(), d));
    }
    let product = |order: &[usize]| {
        order
            .iter()
            .fold(Matrix::identity(p, d), |acc, &i| acc.mul(&locals[i]))
    };
    Ok(match mode {
        CombineMode::Product => product(&(0..locals.len()).collect::<Vec<_>>()),
        CombineMode::PermutationSum => permutations(locals.len())
            .iter()
            .fold(Matrix::zero(p, d), |acc, o| acc.add(&product(o))),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeTests {
    pub plain: bool,
    pub gauge_k: bool,
    pub gauge_l: bool,
}

impl ThreeTests {
    pub fn counterexample(&self) -> Option<&'static str> {
        (!self.plain && !self.gauge_k && !self.gauge_l)
            .then_some("we have detected an Andrews-Curtis counterexample")
    }
}

fn side_invariant(
    data: &[(CriterionInstance, IdentificationType)],
    gauged: bool,
    b: &Backend,
) -> Result<Matrix> {
    let mut locals = Vec::new();
    for (inst, ty) in data {
        let aseq = if gauged {
            build_abstract(&criterion::gauge(inst)?, ty.other(), None)?
        } else {
            build_abstract(inst, *ty, None)?
        };
        let b = b.extended(&aseq.labels())?;
        locals.push(perturbed_invariant(&aseq, &b)?);
    }
    global_combine(b.p, b.d, &locals, CombineMode::Product)
}

/// `I(K) = I(L)`, `I_gauge(K) = I(L)` and `I(K) = I_gauge(L)`.
pub fn three_tests(
    kdata: &[(CriterionInstance, IdentificationType)],
    ldata: &[(CriterionInstance, IdentificationType)],
    b: &Backend,
) -> Result<ThreeTests> {
    if kdata.len() != ldata.len() {
        return Err(PlaygroundError::Pairing(kdata.len(), ldata.len()));
    }
    let ik = side_invariant(kdata, false, b)?;
    let il = side_invariant(ldata, false, b)?;
    let gk = side_invariant(kdata, true, b)?;
    let gl = side_invariant(ldata, true, b)?;
    Ok(ThreeTests {
        plain: ik == il,
        gauge_k: gk == il,
        gauge_l: ik == gl,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationReport {
    pub report: InvarianceReport,
    pub v: u32,
    /// Smallest nonzero scalar `w` with `w · Z(S²) = 0`, if any.
    pub annihilator: Option<u64>,
}

/// With `Z_K(S²) = Z_L(S²)` and a split stabilized invariant `I · f^v`,
/// equal stabilized values force equal unstabilized values whenever `f^v`
/// is invertible. The fixture uses `I_K = I_L = Z(first token)` and
/// `f = Z(S²)`.
pub fn stabilization_demo(b: &Backend, v: u32) -> Result<StabilizationReport> {
    let (p, d) = (b.p, b.d);
    let i_k = b
        .assigned
        .values()
        .next()
        .cloned()
        .unwrap_or_else(|| Matrix::identity(p, d));
    let i_l = i_k.clone();
    let fv = b.sphere.pow(v.max(1));
    let s_k = i_k.mul(&fv);
    let s_l = i_l.mul(&fv);
    let fv_inv = fv.inverse()?;
    let recovered_k = s_k.mul(&fv_inv);
    let recovered_l = s_l.mul(&fv_inv);
    let forced = s_k == s_l && recovered_k == i_k && recovered_l == i_l && recovered_k == recovered_l;
    let annihilator = (1..p).find(|&w| b.sphere.scale(w).is_zero());
    let report = if forced {
        InvarianceReport::with(
            Verdict::Obstructed,
            format!(
                "I_K f^{v} = I_L f^{v} with f^{v} invertible forces I_K = I_L = {recovered_k}; {}",
                match annihilator {
                    Some(w) => format!("annihilator w = {w}"),
                    None => "no nonzero annihilator of Z(S^2) over the prime field".into(),
                }
            ),
        )
    } else {
        InvarianceReport::with(Verdict::Fail, "stabilized equality did not force equality".into())
    };
    Ok(StabilizationReport {
        report,
        v,
        annihilator,
    })
}

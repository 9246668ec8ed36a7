//! The commutator criterion for a pair of presentations on a common
//! generator set.
//!
//! An instance fixes relators `R` of `K` and `S` of `L` together with an
//! ordered list of factors `(R_α, S_α)`, each a conjugated relator. The
//! instance holds when
//!
//! ```text
//! R · S⁻¹ · [S_1, R_1] · [S_2, R_2] ⋯ [S_n, R_n] = 1
//! ```
//!
//! in the free group, equivalently `R · S⁻¹ = [R_n, S_n] ⋯ [R_1, S_1]`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::freegroup::{self, Letter, Word, WordParseError};
use crate::presentation::{self, NielsenMove, Presentation, PresentationError, QMove, Relator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("K and L must share a generator count ({0} vs {1})")]
    GeneratorMismatch(u32, u32),
    #[error("the instance does not satisfy the commutator criterion")]
    NotVerified,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Word {
        line: usize,
        #[source]
        source: WordParseError,
    },
}

/// `w · R^{±1} · w⁻¹` for a named relator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjugatedRelator {
    pub conjugator: Word,
    pub base: String,
    pub exponent: i8,
}

impl ConjugatedRelator {
    pub fn new(conjugator: Word, base: impl Into<String>, exponent: i8) -> Self {
        ConjugatedRelator {
            conjugator,
            base: base.into(),
            exponent: if exponent < 0 { -1 } else { 1 },
        }
    }

    pub fn plain(base: impl Into<String>) -> Self {
        ConjugatedRelator::new(Word::identity(), base, 1)
    }

    /// Same conjugator, opposite exponent.
    pub fn inverse(&self) -> Self {
        ConjugatedRelator {
            exponent: -self.exponent,
            ..self.clone()
        }
    }
}

impl fmt::Display for ConjugatedRelator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.exponent < 0 { "-1" } else { "+1" };
        write!(f, "{}.{}^{}", self.conjugator, self.base, sign)
    }
}

pub fn expand(c: &ConjugatedRelator, p: &Presentation) -> Result<Word, CriterionError> {
    let base = p.word(&c.base)?;
    let base = if c.exponent < 0 {
        base.inverse()
    } else {
        base.clone()
    };
    Ok(freegroup::conjugate(&c.conjugator, &base))
}

/// One factor `(R_α, S_α)`; `r` resolves in `K`, `s` in `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub r: ConjugatedRelator,
    pub s: ConjugatedRelator,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CommutatorDecomposition {
    pub factors: Vec<Factor>,
}

impl CommutatorDecomposition {
    pub fn new(factors: Vec<Factor>) -> Self {
        CommutatorDecomposition { factors }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionInstance {
    k: Presentation,
    l: Presentation,
    r: String,
    s: String,
    decomp: CommutatorDecomposition,
}

impl CriterionInstance {
    /// Checks that the presentations share a generator count and that every
    /// relator name resolves in its presentation.
    pub fn new(
        k: Presentation,
        l: Presentation,
        r: impl Into<String>,
        s: impl Into<String>,
        decomp: CommutatorDecomposition,
    ) -> Result<Self, CriterionError> {
        let (r, s) = (r.into(), s.into());
        if k.generator_count() != l.generator_count() {
            return Err(CriterionError::GeneratorMismatch(
                k.generator_count(),
                l.generator_count(),
            ));
        }
        k.index_of(&r)?;
        l.index_of(&s)?;
        for f in &decomp.factors {
            k.index_of(&f.r.base)?;
            l.index_of(&f.s.base)?;
            f.r.conjugator
                .check_bound(k.generator_count())
                .and(f.s.conjugator.check_bound(l.generator_count()))
                .map_err(|source| CriterionError::Word { line: 0, source })?;
        }
        Ok(CriterionInstance { k, l, r, s, decomp })
    }

    pub fn k(&self) -> &Presentation {
        &self.k
    }

    pub fn l(&self) -> &Presentation {
        &self.l
    }

    pub fn r_name(&self) -> &str {
        &self.r
    }

    pub fn s_name(&self) -> &str {
        &self.s
    }

    pub fn decomposition(&self) -> &CommutatorDecomposition {
        &self.decomp
    }

    pub fn r_word(&self) -> &Word {
        self.k.word(&self.r).expect("validated at construction")
    }

    pub fn s_word(&self) -> &Word {
        self.l.word(&self.s).expect("validated at construction")
    }

    /// Expanded `(R_α, S_α)` words in factor order.
    pub fn factor_words(&self) -> Vec<(Word, Word)> {
        self.decomp
            .factors
            .iter()
            .map(|f| {
                (
                    expand(&f.r, &self.k).expect("validated at construction"),
                    expand(&f.s, &self.l).expect("validated at construction"),
                )
            })
            .collect()
    }

    /// `[S_1, R_1] ⋯ [S_n, R_n]`
    pub fn commutator_product(&self) -> Word {
        self.factor_words()
            .iter()
            .fold(Word::identity(), |acc, (ra, sa)| {
                acc.mul(&freegroup::commutator(sa, ra))
            })
    }

    /// `R · S⁻¹`
    pub fn product_word(&self) -> Word {
        self.r_word().mul(&self.s_word().inverse())
    }

    /// Replaces the presentations, keeping names and factors.
    pub fn with_presentations(
        &self,
        k: Presentation,
        l: Presentation,
    ) -> Result<Self, CriterionError> {
        CriterionInstance::new(k, l, self.r.clone(), self.s.clone(), self.decomp.clone())
    }
}

/// The `R · S⁻¹ · Π [S_α, R_α] = 1` evaluation.
pub fn verify(inst: &CriterionInstance) -> bool {
    inst.product_word()
        .mul(&inst.commutator_product())
        .is_identity()
}

/// The `R · S⁻¹ = [R_n, S_n] ⋯ [R_1, S_1]` evaluation, computed without the
/// combined word.
pub fn verify_product_form(inst: &CriterionInstance) -> bool {
    let rhs = inst
        .factor_words()
        .iter()
        .rev()
        .fold(Word::identity(), |acc, (ra, sa)| {
            acc.mul(&freegroup::commutator(ra, sa))
        });
    freegroup::equal(&inst.product_word(), &rhs)
}

/// `L′ = R · R_new⁻¹`, so that `L′ · R_new = R`.
pub fn residual_r(r: &Word, r_new: &Word) -> Word {
    r.mul(&r_new.inverse())
}

/// `M′⁻¹ = S_new · S⁻¹`, so that `S_new⁻¹ · M′⁻¹ = S⁻¹`.
pub fn residual_s(s: &Word, s_new: &Word) -> Word {
    s_new.mul(&s.inverse())
}

/// Swaps the roles of `K`/`R` and `L`/`S`; the factor list is reversed and
/// each factor's sides exchanged, so the new product word is `S · R⁻¹`.
pub fn gauge(inst: &CriterionInstance) -> Result<CriterionInstance, CriterionError> {
    if !verify(inst) {
        return Err(CriterionError::NotVerified);
    }
    let factors = inst
        .decomp
        .factors
        .iter()
        .rev()
        .map(|f| Factor {
            r: f.s.clone(),
            s: f.r.clone(),
        })
        .collect();
    CriterionInstance::new(
        inst.l.clone(),
        inst.k.clone(),
        inst.s.clone(),
        inst.r.clone(),
        CommutatorDecomposition::new(factors),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualCommutatorReport {
    /// `residual_r(R, S)`
    pub l_prime: Word,
    /// `residual_s(S, R)`
    pub m_prime_inv: Word,
    /// `(Π [S_α, R_α])⁻¹`
    pub inverse_product: Word,
    pub holds: bool,
}

/// With `R → S` as the transformed relator, checks that the residual is the
/// inverse commutator product and agrees with the `S`-side residual.
pub fn residual_commutator_check(
    inst: &CriterionInstance,
) -> Result<ResidualCommutatorReport, CriterionError> {
    if !verify(inst) {
        return Err(CriterionError::NotVerified);
    }
    let l_prime = residual_r(inst.r_word(), inst.s_word());
    let m_prime_inv = residual_s(inst.s_word(), inst.r_word());
    let inverse_product = inst.commutator_product().inverse();
    let holds = l_prime == inverse_product && l_prime == m_prime_inv;
    Ok(ResidualCommutatorReport {
        l_prime,
        m_prime_inv,
        inverse_product,
        holds,
    })
}

/// Result of moving `R` by a Q-move inside `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMoveTransport {
    pub instance: CriterionInstance,
    pub r_new: Word,
    pub l_prime: Word,
}

impl QMoveTransport {
    /// `L′ · R′ · S⁻¹ · Π [S_α, R_α]`, which must reduce to `1`.
    pub fn closing_word(&self, original: &CriterionInstance) -> Word {
        self.l_prime
            .mul(&self.r_new)
            .mul(&original.s_word().inverse())
            .mul(&original.commutator_product())
    }
}

/// Applies `m` to `K` and records the residual of `R`. The commutator
/// product of the original instance is kept fixed.
pub fn transport_qmove(
    inst: &CriterionInstance,
    m: &QMove,
) -> Result<QMoveTransport, CriterionError> {
    let k2 = presentation::apply_qmove(&inst.k, m)?;
    let r_new = k2.word(&inst.r)?.clone();
    let l_prime = residual_r(inst.r_word(), &r_new);
    let instance = inst.with_presentations(k2, inst.l.clone())?;
    Ok(QMoveTransport {
        instance,
        r_new,
        l_prime,
    })
}

fn nielsen_conjugators(d: &CommutatorDecomposition, m: &NielsenMove, both: bool) -> CommutatorDecomposition {
    let map = |c: &ConjugatedRelator| ConjugatedRelator {
        conjugator: m.apply_to_word(&c.conjugator),
        ..c.clone()
    };
    CommutatorDecomposition::new(
        d.factors
            .iter()
            .map(|f| Factor {
                r: map(&f.r),
                s: if both { map(&f.s) } else { f.s.clone() },
            })
            .collect(),
    )
}

/// Substitutes the generator in both presentations and in every conjugator.
pub fn nielsen_transport(
    inst: &CriterionInstance,
    m: &NielsenMove,
) -> Result<CriterionInstance, CriterionError> {
    let (k2, l2) = presentation::apply_nielsen_pair(&inst.k, &inst.l, m)?;
    CriterionInstance::new(k2, l2, inst.r.clone(), inst.s.clone(), nielsen_conjugators(&inst.decomp, m, true))
}

/// Substitutes the generator in `K` (and its conjugators) only.
pub fn nielsen_one_sided(
    inst: &CriterionInstance,
    m: &NielsenMove,
) -> Result<CriterionInstance, CriterionError> {
    let k2 = presentation::apply_nielsen(&inst.k, m)?;
    CriterionInstance::new(
        k2,
        inst.l.clone(),
        inst.r.clone(),
        inst.s.clone(),
        nielsen_conjugators(&inst.decomp, m, false),
    )
}

/// Parameters for [`build_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildParams {
    pub generators: u32,
    pub factors: usize,
    pub max_conjugator_len: usize,
    pub max_relator_len: usize,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams {
            generators: 2,
            factors: 2,
            max_conjugator_len: 3,
            max_relator_len: 8,
        }
    }
}

/// A uniformly drawn reduced word of length `len` (exactly).
pub fn random_reduced_word<R: Rng>(rng: &mut R, generators: u32, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::new(rng.gen_range(1..=generators), if rng.gen() { 1 } else { -1 });
        if letters.last().is_some_and(|last| last.cancels(l)) {
            continue;
        }
        letters.push(l);
    }
    Word::from_letters(letters)
}

/// A factor relator of length at least 2 that, over two or more generators,
/// mentions two distinct generators. Such a word is not a power of a single
/// letter, so conjugating it by any letter changes it.
fn factor_relator<R: Rng>(rng: &mut R, generators: u32, max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(2..=max_len.max(2));
        let w = random_reduced_word(rng, generators, len);
        let first = w.letters()[0].gen();
        if generators < 2 || w.letters().iter().any(|l| l.gen() != first) {
            return w;
        }
    }
}

/// Draws conjugated relators and a random `S`, then sets
/// `R := [R_n, S_n] ⋯ [R_1, S_1] · S` so the criterion holds by construction.
///
/// `K` carries `R` and one relator `K<α>` per factor; `L` carries `S` and
/// `L<α>`. Deterministic in `seed`.
pub fn build_instance(seed: u64, params: BuildParams) -> CriterionInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.generators.max(1);
    let word = |rng: &mut ChaCha8Rng, min: usize, max: usize| {
        let len = rng.gen_range(min..=max.max(min));
        random_reduced_word(rng, n, len)
    };

    let s_word = word(&mut rng, 1, params.max_relator_len);
    let mut k_rels = Vec::new();
    let mut l_rels = vec![Relator {
        name: "S".into(),
        word: s_word.clone(),
    }];
    let mut factors = Vec::new();
    for alpha in 1..=params.factors {
        let rk = factor_relator(&mut rng, n, params.max_relator_len);
        let sk = factor_relator(&mut rng, n, params.max_relator_len);
        k_rels.push(Relator {
            name: format!("K{alpha}"),
            word: rk,
        });
        l_rels.push(Relator {
            name: format!("L{alpha}"),
            word: sk,
        });
        let rc = word(&mut rng, 0, params.max_conjugator_len);
        let sc = word(&mut rng, 0, params.max_conjugator_len);
        let signs = [1i8, -1];
        factors.push(Factor {
            r: ConjugatedRelator::new(rc, format!("K{alpha}"), *signs.choose(&mut rng).unwrap()),
            s: ConjugatedRelator::new(sc, format!("L{alpha}"), *signs.choose(&mut rng).unwrap()),
        });
    }

    let l = Presentation::new(n, l_rels).expect("generated names are unique");
    let mut k_probe = k_rels.clone();
    k_probe.insert(
        0,
        Relator {
            name: "R".into(),
            word: Word::identity(),
        },
    );
    let k_probe = Presentation::new(n, k_probe).expect("generated names are unique");

    let rhs = factors.iter().rev().fold(Word::identity(), |acc, f| {
        let ra = expand(&f.r, &k_probe).expect("generated");
        let sa = expand(&f.s, &l).expect("generated");
        acc.mul(&freegroup::commutator(&ra, &sa))
    });
    let r_word = rhs.mul(&s_word);
    k_rels.insert(
        0,
        Relator {
            name: "R".into(),
            word: r_word,
        },
    );
    let k = Presentation::new(n, k_rels).expect("generated names are unique");
    CriterionInstance::new(k, l, "R", "S", CommutatorDecomposition::new(factors))
        .expect("generated instance is well formed")
}

/// Parses a decomposition file: one
/// `factor wR=<word> R=<name>^<+1|-1> wS=<word> S=<name>^<+1|-1>` per line.
pub fn parse_decomposition(text: &str) -> Result<CommutatorDecomposition, CriterionError> {
    let mut factors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| CriterionError::Syntax {
            line: line_no,
            message,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [kw, wr, r, ws, s] = toks.as_slice() else {
            return Err(syntax(format!("expected 5 fields, got {}", toks.len())));
        };
        if *kw != "factor" {
            return Err(syntax(format!("expected `factor`, got {kw:?}")));
        }
        let field = |tok: &str, key: &str| -> Result<String, CriterionError> {
            tok.strip_prefix(key)
                .map(str::to_string)
                .ok_or_else(|| syntax(format!("expected `{key}...`, got {tok:?}")))
        };
        let word = |lit: String| {
            Word::parse(&lit).map_err(|source| CriterionError::Word {
                line: line_no,
                source,
            })
        };
        let rel = |spec: String| -> Result<(String, i8), CriterionError> {
            let (name, exp) = spec
                .rsplit_once('^')
                .ok_or_else(|| syntax(format!("expected <name>^<+1|-1>, got {spec:?}")))?;
            let exp = match exp {
                "+1" | "1" => 1,
                "-1" => -1,
                other => return Err(syntax(format!("bad exponent {other:?}"))),
            };
            Ok((name.to_string(), exp))
        };
        let (rn, re) = rel(field(r, "R=")?)?;
        let (sn, se) = rel(field(s, "S=")?)?;
        factors.push(Factor {
            r: ConjugatedRelator::new(word(field(wr, "wR=")?)?, rn, re),
            s: ConjugatedRelator::new(word(field(ws, "wS=")?)?, sn, se),
        });
    }
    Ok(CommutatorDecomposition::new(factors))
}

pub fn format_decomposition(d: &CommutatorDecomposition) -> String {
    let exp = |e: i8| if e < 0 { "-1" } else { "+1" };
    d.factors
        .iter()
        .map(|f| {
            format!(
                "factor wR={} R={}^{} wS={} S={}^{}\n",
                f.r.conjugator,
                f.r.base,
                exp(f.r.exponent),
                f.s.conjugator,
                f.s.base,
                exp(f.s.exponent)
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    /// `R = abA`, `S = b` with the single factor `(a, b)`.
    pub(crate) fn fixture() -> CriterionInstance {
        let k = Presentation::from_literals(2, &[("R", "abA"), ("Ra", "a")]).unwrap();
        let l = Presentation::from_literals(2, &[("S", "b")]).unwrap();
        let d = CommutatorDecomposition::new(vec![Factor {
            r: ConjugatedRelator::plain("Ra"),
            s: ConjugatedRelator::plain("S"),
        }]);
        CriterionInstance::new(k, l, "R", "S", d).unwrap()
    }

    #[test]
    fn expand_examples() {
        let p = Presentation::from_literals(2, &[("R", "ab"), ("Q", "b")]).unwrap();
        assert_eq!(expand(&ConjugatedRelator::plain("R"), &p).unwrap(), w("ab"));
        assert_eq!(
            expand(&ConjugatedRelator::new(w("a"), "Q", 1), &p).unwrap(),
            w("abA")
        );
        assert_eq!(
            expand(&ConjugatedRelator::new(w(""), "R", -1), &p).unwrap(),
            w("BA")
        );
        assert!(matches!(
            expand(&ConjugatedRelator::plain("X"), &p),
            Err(CriterionError::Presentation(PresentationError::UnknownRelator(_)))
        ));
    }

    #[test]
    fn verify_examples() {
        let inst = fixture();
        assert!(verify(&inst));
        assert!(verify_product_form(&inst));

        let p = Presentation::from_literals(2, &[("R", "abAb")]).unwrap();
        let q = Presentation::from_literals(2, &[("S", "abAb")]).unwrap();
        let trivial =
            CriterionInstance::new(p, q, "R", "S", CommutatorDecomposition::default()).unwrap();
        assert!(verify(&trivial));

        // flip the first letter of R
        let k = Presentation::from_literals(2, &[("R", "AbA"), ("Ra", "a")]).unwrap();
        let broken = inst.with_presentations(k, inst.l().clone()).unwrap();
        assert!(!verify(&broken));
        assert!(!verify_product_form(&broken));
    }

    #[test]
    fn residual_examples() {
        let r = w("abA");
        let rk = w("b");
        assert_eq!(residual_r(&r, &r.mul(&rk)).to_string(), "abABaBA");
        assert_eq!(residual_r(&w("ab"), &w("ab").inverse()).to_string(), "abab");
        assert_eq!(residual_r(&r, &r), Word::identity());

        assert_eq!(residual_s(&w("b"), &w("b")), Word::identity());
        assert_eq!(residual_s(&w("b"), &w("ba")).to_string(), "baB");
        let (s, s2) = (w("abA"), w("bbA"));
        assert_eq!(residual_s(&s, &s2), residual_r(&s2, &s));
    }

    #[test]
    fn gauge_examples() {
        let inst = fixture();
        let g = gauge(&inst).unwrap();
        assert_eq!(g.product_word().to_string(), "baBA");
        assert_eq!(g.product_word(), freegroup::commutator(&w("b"), &w("a")));
        assert!(verify(&g));
        let gg = gauge(&g).unwrap();
        assert!(verify(&gg));
        assert_eq!(gg, inst);

        let p = Presentation::from_literals(2, &[("R", "ab")]).unwrap();
        let q = Presentation::from_literals(2, &[("S", "ab")]).unwrap();
        let trivial = CriterionInstance::new(p, q, "R", "S", Default::default()).unwrap();
        let gt = gauge(&trivial).unwrap();
        assert_eq!(gt.r_name(), "S");
        assert!(verify(&gt));
    }

    #[test]
    fn gauge_rejects_unverified() {
        let inst = fixture();
        let k = Presentation::from_literals(2, &[("R", "ab"), ("Ra", "a")]).unwrap();
        let broken = inst.with_presentations(k, inst.l().clone()).unwrap();
        assert_eq!(gauge(&broken), Err(CriterionError::NotVerified));
        assert_eq!(
            residual_commutator_check(&broken),
            Err(CriterionError::NotVerified)
        );
    }

    #[test]
    fn residual_commutator_examples() {
        let rep = residual_commutator_check(&fixture()).unwrap();
        assert_eq!(rep.l_prime.to_string(), "abAB");
        assert_eq!(rep.l_prime, freegroup::commutator(&w("a"), &w("b")));
        assert_eq!(rep.l_prime, rep.m_prime_inv);
        assert!(rep.holds);

        let p = Presentation::from_literals(1, &[("R", "aa")]).unwrap();
        let trivial =
            CriterionInstance::new(p.clone(), p, "R", "R", Default::default()).unwrap();
        let rep = residual_commutator_check(&trivial).unwrap();
        assert!(rep.holds);
        assert!(rep.l_prime.is_identity());
    }

    #[test]
    fn build_instance_examples() {
        let zero = build_instance(
            7,
            BuildParams {
                factors: 0,
                ..Default::default()
            },
        );
        assert_eq!(zero.r_word(), zero.s_word());
        assert!(verify(&zero));

        let two = build_instance(11, BuildParams::default());
        assert_eq!(two.decomposition().len(), 2);
        assert!(verify(&two));
        assert_eq!(build_instance(11, BuildParams::default()), two);
        assert_ne!(build_instance(12, BuildParams::default()), two);
    }

    #[test]
    fn instance_validation() {
        let k = Presentation::from_literals(2, &[("R", "a")]).unwrap();
        let l = Presentation::from_literals(3, &[("S", "a")]).unwrap();
        assert_eq!(
            CriterionInstance::new(k.clone(), l, "R", "S", Default::default()),
            Err(CriterionError::GeneratorMismatch(2, 3))
        );
        let l = Presentation::from_literals(2, &[("S", "a")]).unwrap();
        let d = CommutatorDecomposition::new(vec![Factor {
            r: ConjugatedRelator::plain("Nope"),
            s: ConjugatedRelator::plain("S"),
        }]);
        assert!(matches!(
            CriterionInstance::new(k, l, "R", "S", d),
            Err(CriterionError::Presentation(PresentationError::UnknownRelator(_)))
        ));
    }

    #[test]
    fn qmove_transport_closes() {
        let inst = build_instance(3, BuildParams::default());
        for m in [
            QMove::InvertRelator(0),
            QMove::MultiplyRight(0, 1),
            QMove::ConjugateRelator(0, Letter::neg(2)),
        ] {
            let t = transport_qmove(&inst, &m).unwrap();
            assert!(t.closing_word(&inst).is_identity(), "{m:?}");
        }
    }

    #[test]
    fn one_sided_nielsen_breaks_fixture() {
        let inst = fixture();
        let m = NielsenMove::right_multiply(2, 1);
        assert!(verify(&nielsen_transport(&inst, &m).unwrap()));
        assert!(!verify(&nielsen_one_sided(&inst, &m).unwrap()));
    }

    #[test]
    fn decomposition_file_round_trip() {
        let text = "# two factors\nfactor wR=1 R=Ra^+1 wS=ab S=S^-1\nfactor wR=B R=R^-1 wS=1 S=S^+1\n";
        let d = parse_decomposition(text).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.factors[0].s, ConjugatedRelator::new(w("ab"), "S", -1));
        assert_eq!(parse_decomposition(&format_decomposition(&d)).unwrap(), d);
        assert!(matches!(
            parse_decomposition("factor wR=1 R=Ra wS=1 S=S^+1"),
            Err(CriterionError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_decomposition("factor wR=1x R=Ra^+1 wS=1 S=S^+1"),
            Err(CriterionError::Word { line: 1, .. })
        ));
    }
}

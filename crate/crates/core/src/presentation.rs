//! Presentations `⟨a_1..a_n | R_1..R_m⟩` and the moves acting on them.
//!
//! Relator-level moves ([`QMove`]) are the Andrews-Curtis moves: invert a
//! relator, multiply it on the right by another, conjugate it by a letter.
//! Generator-level moves ([`NielsenMove`]) substitute a generator in every
//! relator. [`prolong`] adds a fresh generator together with the relator
//! equal to it.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::freegroup::{self, Letter, Word, WordParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("relator index {index} out of range (presentation has {count} relators)")]
    RelatorIndex { index: usize, count: usize },
    #[error("unknown relator {0:?}")]
    UnknownRelator(String),
    #[error("duplicate relator name {0:?}")]
    DuplicateName(String),
    #[error("invalid relator name {0:?}")]
    BadName(String),
    #[error("generator {gen} out of range (presentation has {count} generators)")]
    GeneratorIndex { gen: u32, count: u32 },
    #[error("multiplying relator {0} by itself is not a Q-move")]
    SelfMultiply(usize),
    #[error("nielsen move on generator {0} needs a second, different generator")]
    SameGenerator(u32),
    #[error("generator counts differ: {0} vs {1}")]
    GeneratorCountMismatch(u32, u32),
    #[error("relator {name:?}: {source}")]
    Word {
        name: String,
        #[source]
        source: WordParseError,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relator {
    pub name: String,
    pub word: Word,
}

/// A finite presentation. Relator names are unique and every relator word
/// only uses generators `1..=generator_count`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presentation {
    generator_count: u32,
    relators: Vec<Relator>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Presentation {
    pub fn new(generator_count: u32, relators: Vec<Relator>) -> Result<Self, PresentationError> {
        let mut seen = HashSet::new();
        for r in &relators {
            if !valid_name(&r.name) {
                return Err(PresentationError::BadName(r.name.clone()));
            }
            if !seen.insert(r.name.as_str()) {
                return Err(PresentationError::DuplicateName(r.name.clone()));
            }
            r.word
                .check_bound(generator_count)
                .map_err(|source| PresentationError::Word {
                    name: r.name.clone(),
                    source,
                })?;
        }
        Ok(Presentation {
            generator_count,
            relators,
        })
    }

    /// Convenience constructor from `(name, literal)` pairs.
    pub fn from_literals(
        generator_count: u32,
        relators: &[(&str, &str)],
    ) -> Result<Self, PresentationError> {
        let rels = relators
            .iter()
            .map(|(name, lit)| {
                Word::parse(lit)
                    .map(|word| Relator {
                        name: name.to_string(),
                        word,
                    })
                    .map_err(|source| PresentationError::Word {
                        name: name.to_string(),
                        source,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::new(generator_count, rels)
    }

    pub fn generator_count(&self) -> u32 {
        self.generator_count
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    pub fn index_of(&self, name: &str) -> Result<usize, PresentationError> {
        self.relators
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| PresentationError::UnknownRelator(name.to_string()))
    }

    pub fn word(&self, name: &str) -> Result<&Word, PresentationError> {
        Ok(&self.relators[self.index_of(name)?].word)
    }

    fn check_relator(&self, index: usize) -> Result<(), PresentationError> {
        if index < self.relators.len() {
            Ok(())
        } else {
            Err(PresentationError::RelatorIndex {
                index,
                count: self.relators.len(),
            })
        }
    }

    fn check_generator(&self, gen: u32) -> Result<(), PresentationError> {
        if gen >= 1 && gen <= self.generator_count {
            Ok(())
        } else {
            Err(PresentationError::GeneratorIndex {
                gen,
                count: self.generator_count,
            })
        }
    }

    fn with_relator(&self, index: usize, word: Word) -> Presentation {
        let mut next = self.clone();
        next.relators[index].word = word;
        next
    }

    /// Applies `f` to every relator word.
    pub fn map_words(&self, f: impl Fn(&Word) -> Word) -> Presentation {
        Presentation {
            generator_count: self.generator_count,
            relators: self
                .relators
                .iter()
                .map(|r| Relator {
                    name: r.name.clone(),
                    word: f(&r.word),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens {}", self.generator_count)?;
        for r in &self.relators {
            writeln!(f, "rel {} {}", r.name, r.word)?;
        }
        Ok(())
    }
}

/// An Andrews-Curtis move on one relator; indices refer to relator positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QMove {
    /// `R_i → R_i⁻¹`
    InvertRelator(usize),
    /// `R_i → R_i · R_k`, `i ≠ k`
    MultiplyRight(usize, usize),
    /// `R_i → g · R_i · g⁻¹`
    ConjugateRelator(usize, Letter),
}

impl QMove {
    /// The relator this move rewrites.
    pub fn target(&self) -> usize {
        match *self {
            QMove::InvertRelator(i) | QMove::MultiplyRight(i, _) | QMove::ConjugateRelator(i, _) => {
                i
            }
        }
    }

    /// A move sequence that undoes `self`.
    pub fn inverse_sequence(&self) -> Vec<QMove> {
        match *self {
            QMove::InvertRelator(i) => vec![QMove::InvertRelator(i)],
            QMove::MultiplyRight(i, k) => vec![
                QMove::InvertRelator(k),
                QMove::MultiplyRight(i, k),
                QMove::InvertRelator(k),
            ],
            QMove::ConjugateRelator(i, g) => vec![QMove::ConjugateRelator(i, g.inverse())],
        }
    }
}

/// One conjugated relator `w · R_index^{±1} · w⁻¹` of a normal-closure witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTerm {
    pub conjugator: Word,
    pub relator: usize,
    pub exponent: i8,
}

/// The new relator of `apply_qmove(p, m)` written as a product of conjugates
/// of relators of `p`.
pub fn qmove_witness(m: &QMove) -> Vec<ClosureTerm> {
    let term = |conjugator: Word, relator, exponent| ClosureTerm {
        conjugator,
        relator,
        exponent,
    };
    match *m {
        QMove::InvertRelator(i) => vec![term(Word::identity(), i, -1)],
        QMove::MultiplyRight(i, k) => vec![term(Word::identity(), i, 1), term(Word::identity(), k, 1)],
        QMove::ConjugateRelator(i, g) => vec![term(Word::from_letter(g), i, 1)],
    }
}

/// Expands a witness against the relators of `p`.
pub fn expand_witness(p: &Presentation, terms: &[ClosureTerm]) -> Word {
    terms.iter().fold(Word::identity(), |acc, t| {
        let base = p.relators[t.relator].word.pow(t.exponent as i64);
        acc.mul(&base.conjugate_by(&t.conjugator))
    })
}

pub fn apply_qmove(p: &Presentation, m: &QMove) -> Result<Presentation, PresentationError> {
    match *m {
        QMove::InvertRelator(i) => {
            p.check_relator(i)?;
            Ok(p.with_relator(i, p.relators[i].word.inverse()))
        }
        QMove::MultiplyRight(i, k) => {
            p.check_relator(i)?;
            p.check_relator(k)?;
            if i == k {
                return Err(PresentationError::SelfMultiply(i));
            }
            Ok(p.with_relator(i, p.relators[i].word.mul(&p.relators[k].word)))
        }
        QMove::ConjugateRelator(i, g) => {
            p.check_relator(i)?;
            p.check_generator(g.gen())?;
            Ok(p.with_relator(i, p.relators[i].word.conjugate_by(&Word::from_letter(g))))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NielsenKind {
    /// `a_i → a_i⁻¹`
    Invert,
    /// `a_i → a_i · a_k`
    RightMultiply(u32),
    /// `a_i → a_k · a_i`
    LeftMultiply(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NielsenMove {
    pub target: u32,
    pub kind: NielsenKind,
}

impl NielsenMove {
    pub fn invert(target: u32) -> Self {
        NielsenMove {
            target,
            kind: NielsenKind::Invert,
        }
    }

    pub fn right_multiply(target: u32, by: u32) -> Self {
        NielsenMove {
            target,
            kind: NielsenKind::RightMultiply(by),
        }
    }

    pub fn left_multiply(target: u32, by: u32) -> Self {
        NielsenMove {
            target,
            kind: NielsenKind::LeftMultiply(by),
        }
    }

    /// The word that replaces `a_target`.
    pub fn image(&self) -> Word {
        let ai = Letter::pos(self.target);
        match self.kind {
            NielsenKind::Invert => Word::from_letter(ai.inverse()),
            NielsenKind::RightMultiply(k) => Word::from_letters([ai, Letter::pos(k)]),
            NielsenKind::LeftMultiply(k) => Word::from_letters([Letter::pos(k), ai]),
        }
    }

    /// Substitutes `a_target` in `w`.
    pub fn apply_to_word(&self, w: &Word) -> Word {
        freegroup::substitute(w, self.target, &self.image())
    }

    pub fn inverse_sequence(&self) -> Vec<NielsenMove> {
        match self.kind {
            NielsenKind::Invert => vec![*self],
            NielsenKind::RightMultiply(k) | NielsenKind::LeftMultiply(k) => {
                vec![NielsenMove::invert(k), *self, NielsenMove::invert(k)]
            }
        }
    }

    fn check(&self, generator_count: u32) -> Result<(), PresentationError> {
        let in_range = |g: u32| {
            if g >= 1 && g <= generator_count {
                Ok(())
            } else {
                Err(PresentationError::GeneratorIndex {
                    gen: g,
                    count: generator_count,
                })
            }
        };
        in_range(self.target)?;
        match self.kind {
            NielsenKind::Invert => Ok(()),
            NielsenKind::RightMultiply(k) | NielsenKind::LeftMultiply(k) => {
                in_range(k)?;
                if k == self.target {
                    Err(PresentationError::SameGenerator(k))
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub fn apply_nielsen(p: &Presentation, m: &NielsenMove) -> Result<Presentation, PresentationError> {
    m.check(p.generator_count)?;
    Ok(p.map_words(|w| m.apply_to_word(w)))
}

/// Applies the same Nielsen move to both presentations of a pair.
pub fn apply_nielsen_pair(
    k: &Presentation,
    l: &Presentation,
    m: &NielsenMove,
) -> Result<(Presentation, Presentation), PresentationError> {
    if k.generator_count != l.generator_count {
        return Err(PresentationError::GeneratorCountMismatch(
            k.generator_count,
            l.generator_count,
        ));
    }
    Ok((apply_nielsen(k, m)?, apply_nielsen(l, m)?))
}

/// Adds generator `n+1` and the relator `T<n+1> = a_{n+1}`.
pub fn prolong(p: &Presentation) -> Presentation {
    let gen = p.generator_count + 1;
    let mut next = p.clone();
    next.generator_count = gen;
    let mut name = format!("T{gen}");
    // A user relator may already carry the name; primes keep it unique.
    while next.relators.iter().any(|r| r.name == name) {
        name.push('\'');
    }
    next.relators.push(Relator {
        name,
        word: Word::from_letter(Letter::pos(gen)),
    });
    next
}

/// One line of a moves file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Q(QMove),
    Nielsen(NielsenMove),
    Prolong,
}

pub fn apply_move(p: &Presentation, m: &Move) -> Result<Presentation, PresentationError> {
    match m {
        Move::Q(q) => apply_qmove(p, q),
        Move::Nielsen(n) => apply_nielsen(p, n),
        Move::Prolong => Ok(prolong(p)),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Parses the `gens <n>` / `rel <name> <word>` format.
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let syntax = |line, message: String| PresentationError::Syntax { line, message };
    let mut lines = content_lines(text);
    let (first_no, first) = lines
        .next()
        .ok_or_else(|| syntax(1, "empty presentation file".into()))?;
    let mut head = first.split_whitespace();
    let count = match (head.next(), head.next(), head.next()) {
        (Some("gens"), Some(n), None) => n
            .parse::<u32>()
            .map_err(|_| syntax(first_no, format!("bad generator count {n:?}")))?,
        _ => return Err(syntax(first_no, "expected `gens <n>`".into())),
    };
    let mut relators = Vec::new();
    for (no, line) in lines {
        let mut parts = line.splitn(3, char::is_whitespace);
        match (parts.next(), parts.next(), parts.next()) {
            (Some("rel"), Some(name), Some(lit)) => {
                let word = Word::parse(lit).map_err(|source| PresentationError::Word {
                    name: name.to_string(),
                    source,
                })?;
                relators.push(Relator {
                    name: name.to_string(),
                    word,
                });
            }
            _ => return Err(syntax(no, "expected `rel <name> <word>`".into())),
        }
    }
    Presentation::new(count, relators)
}

fn parse_single_letter(tok: &str, line: usize) -> Result<Letter, PresentationError> {
    let letters = freegroup::parse_letters(tok).map_err(|e| PresentationError::Syntax {
        line,
        message: e.to_string(),
    })?;
    match letters.as_slice() {
        [l] => Ok(*l),
        _ => Err(PresentationError::Syntax {
            line,
            message: format!("expected a single letter, got {tok:?}"),
        }),
    }
}

/// Parses a moves file, resolving relator names against `p` as the moves are
/// applied (so `prolong` can introduce names used by later lines).
pub fn parse_and_apply_moves(
    p: &Presentation,
    text: &str,
) -> Result<(Presentation, Vec<Move>), PresentationError> {
    let mut current = p.clone();
    let mut applied = Vec::new();
    for (no, line) in content_lines(text) {
        let m = parse_move_line(&current, line, no)?;
        current = apply_move(&current, &m)?;
        applied.push(m);
    }
    Ok((current, applied))
}

/// Parses one move, resolving names against `p`.
pub fn parse_move_line(p: &Presentation, line: &str, no: usize) -> Result<Move, PresentationError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let gen_of = |tok: &str| -> Result<u32, PresentationError> {
        let l = parse_single_letter(tok, no)?;
        if l.is_inverse() {
            return Err(PresentationError::Syntax {
                line: no,
                message: format!("nielsen moves take positive generators, got {tok:?}"),
            });
        }
        Ok(l.gen())
    };
    let m = match toks.as_slice() {
        ["inv", r] => Move::Q(QMove::InvertRelator(p.index_of(r)?)),
        ["mulr", r, k] => Move::Q(QMove::MultiplyRight(p.index_of(r)?, p.index_of(k)?)),
        ["conj", r, g] => Move::Q(QMove::ConjugateRelator(
            p.index_of(r)?,
            parse_single_letter(g, no)?,
        )),
        ["nielsen", "inv", g] => Move::Nielsen(NielsenMove::invert(gen_of(g)?)),
        ["nielsen", "rmul", g, k] => Move::Nielsen(NielsenMove::right_multiply(gen_of(g)?, gen_of(k)?)),
        ["nielsen", "lmul", g, k] => Move::Nielsen(NielsenMove::left_multiply(gen_of(g)?, gen_of(k)?)),
        ["prolong"] => Move::Prolong,
        _ => {
            return Err(PresentationError::Syntax {
                line: no,
                message: format!("unrecognised move {line:?}"),
            })
        }
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(n: u32, rels: &[(&str, &str)]) -> Presentation {
        Presentation::from_literals(n, rels).unwrap()
    }

    fn rel(p: &Presentation, name: &str) -> String {
        p.word(name).unwrap().to_string()
    }

    #[test]
    fn qmove_examples() {
        let p = pres(2, &[("R", "ab")]);
        assert_eq!(rel(&apply_qmove(&p, &QMove::InvertRelator(0)).unwrap(), "R"), "BA");

        let p = pres(2, &[("R", "abA"), ("S", "b")]);
        let q = apply_qmove(&p, &QMove::MultiplyRight(0, 1)).unwrap();
        assert_eq!(rel(&q, "R"), "abAb");
        assert_eq!(rel(&q, "S"), "b");

        let p = pres(2, &[("R", "b")]);
        let q = apply_qmove(&p, &QMove::ConjugateRelator(0, Letter::pos(1))).unwrap();
        assert_eq!(rel(&q, "R"), "abA");
    }

    #[test]
    fn qmove_errors() {
        let p = pres(2, &[("R", "ab"), ("S", "b")]);
        assert_eq!(
            apply_qmove(&p, &QMove::InvertRelator(2)),
            Err(PresentationError::RelatorIndex { index: 2, count: 2 })
        );
        assert_eq!(
            apply_qmove(&p, &QMove::MultiplyRight(1, 1)),
            Err(PresentationError::SelfMultiply(1))
        );
        assert!(matches!(
            apply_qmove(&p, &QMove::ConjugateRelator(0, Letter::pos(3))),
            Err(PresentationError::GeneratorIndex { gen: 3, .. })
        ));
    }

    #[test]
    fn nielsen_examples() {
        let p = pres(2, &[("R", "aa")]);
        assert_eq!(rel(&apply_nielsen(&p, &NielsenMove::invert(1)).unwrap(), "R"), "AA");

        let p = pres(2, &[("R", "aB")]);
        let q = apply_nielsen(&p, &NielsenMove::right_multiply(1, 2)).unwrap();
        assert_eq!(rel(&q, "R"), "a");

        let p = pres(3, &[("R", "bc")]);
        for m in [
            NielsenMove::invert(1),
            NielsenMove::right_multiply(1, 2),
            NielsenMove::left_multiply(1, 3),
        ] {
            assert_eq!(apply_nielsen(&p, &m).unwrap(), p);
        }
        assert_eq!(
            apply_nielsen(&p, &NielsenMove::left_multiply(2, 2)),
            Err(PresentationError::SameGenerator(2))
        );
    }

    #[test]
    fn nielsen_pair_requires_equal_generator_counts() {
        let k = pres(2, &[("R", "ab")]);
        let l = pres(3, &[("S", "ab")]);
        assert_eq!(
            apply_nielsen_pair(&k, &l, &NielsenMove::invert(1)),
            Err(PresentationError::GeneratorCountMismatch(2, 3))
        );
        let l = pres(2, &[("S", "ba")]);
        let (k2, l2) = apply_nielsen_pair(&k, &l, &NielsenMove::invert(1)).unwrap();
        assert_eq!(rel(&k2, "R"), "Ab");
        assert_eq!(rel(&l2, "S"), "bA");
    }

    #[test]
    fn prolong_adds_generator_and_relator() {
        let p = pres(1, &[("R", "aa")]);
        let q = prolong(&p);
        assert_eq!(q.to_string(), "gens 2\nrel R aa\nrel T2 b\n");
        let q2 = prolong(&q);
        assert_eq!(q2.generator_count(), 3);
        assert_eq!(rel(&q2, "T3"), "c");
        assert_eq!(q2.relators().len(), 3);
    }

    #[test]
    fn prolong_avoids_name_clash() {
        let p = pres(1, &[("T2", "a")]);
        let q = prolong(&p);
        assert_eq!(q.relators()[1].name, "T2'");
    }

    #[test]
    fn qmove_inverse_sequences_restore() {
        let p = pres(3, &[("R", "abC"), ("S", "cb"), ("T", "aa")]);
        let moves = [
            QMove::InvertRelator(0),
            QMove::MultiplyRight(0, 1),
            QMove::MultiplyRight(2, 0),
            QMove::ConjugateRelator(1, Letter::neg(1)),
        ];
        for m in moves {
            let mut q = apply_qmove(&p, &m).unwrap();
            for undo in m.inverse_sequence() {
                q = apply_qmove(&q, &undo).unwrap();
            }
            assert_eq!(q, p, "{m:?}");
        }
    }

    #[test]
    fn witness_reproduces_new_relator() {
        let p = pres(2, &[("R", "abA"), ("S", "bb")]);
        for m in [
            QMove::InvertRelator(1),
            QMove::MultiplyRight(0, 1),
            QMove::ConjugateRelator(0, Letter::neg(2)),
        ] {
            let q = apply_qmove(&p, &m).unwrap();
            let w = qmove_witness(&m);
            assert!(w.len() <= 4);
            assert_eq!(expand_witness(&p, &w), q.relators()[m.target()].word);
        }
    }

    #[test]
    fn parse_presentation_file() {
        let text = "# comment\ngens 2\n\nrel R abA  # trailing\nrel S b\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p, pres(2, &[("R", "abA"), ("S", "b")]));
        assert!(matches!(
            parse_presentation("gens 1\nrel R ab\n"),
            Err(PresentationError::Word { .. })
        ));
        assert!(matches!(
            parse_presentation("gens 2\nrel R a\nrel R b\n"),
            Err(PresentationError::DuplicateName(_))
        ));
        assert!(matches!(
            parse_presentation("rel R a\n"),
            Err(PresentationError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn moves_file_applies_in_order() {
        let p = pres(2, &[("R", "ab"), ("S", "b")]);
        let text = "inv R\nmulr R S\nconj S a\nnielsen inv b\nprolong\nmulr T3 R\n";
        let (q, moves) = parse_and_apply_moves(&p, text).unwrap();
        assert_eq!(moves.len(), 6);
        // R: ab -> BA -> BAb ; S: b -> abA ; then b -> B everywhere.
        assert_eq!(rel(&q, "R"), "bAB");
        assert_eq!(rel(&q, "S"), "aBA");
        assert_eq!(rel(&q, "T3"), "cbAB");
        assert!(matches!(
            parse_and_apply_moves(&p, "frobnicate R"),
            Err(PresentationError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_and_apply_moves(&p, "inv Q"),
            Err(PresentationError::UnknownRelator(_))
        ));
    }
}

//! Words in a free group on generators `1..=n`.
//!
//! A [`Letter`] is a generator with a sign. A [`Word`] is always freely
//! reduced; unreduced letter sequences are accepted by [`reduce`] and by the
//! literal parser, which reduces on the way in.
//!
//! Literal syntax: `a`..`z` are generators 1..26, `A`..`Z` their inverses,
//! `g<k>`/`G<k>` name generator `k` (or its inverse) for any `k >= 1`. The
//! empty word is written `1`. Whitespace between tokens is ignored.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A generator `a_k` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    gen: u32,
    inv: bool,
}

impl Letter {
    /// Positive letter for generator `gen` (1-based).
    ///
    /// Panics when `gen == 0`.
    pub fn pos(gen: u32) -> Self {
        assert!(gen >= 1, "generator indices start at 1");
        Letter { gen, inv: false }
    }

    /// Inverse letter for generator `gen` (1-based).
    pub fn neg(gen: u32) -> Self {
        assert!(gen >= 1, "generator indices start at 1");
        Letter { gen, inv: true }
    }

    pub fn new(gen: u32, sign: i8) -> Self {
        if sign < 0 {
            Letter::neg(gen)
        } else {
            Letter::pos(gen)
        }
    }

    pub fn gen(self) -> u32 {
        self.gen
    }

    pub fn is_inverse(self) -> bool {
        self.inv
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gen <= 26 {
            let base = if self.inv { b'A' } else { b'a' };
            write!(f, "{}", (base + (self.gen - 1) as u8) as char)
        } else if self.inv {
            write!(f, "G{}", self.gen)
        } else {
            write!(f, "g{}", self.gen)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordParseError {
    #[error("unexpected character {ch:?} at byte {pos} in word literal {literal:?}")]
    BadChar {
        ch: char,
        pos: usize,
        literal: String,
    },
    #[error("escape `{prefix}` at byte {pos} needs a positive generator index in {literal:?}")]
    BadEscape {
        prefix: char,
        pos: usize,
        literal: String,
    },
    #[error("letter {letter} exceeds the generator count {count}")]
    OutOfRange { letter: String, count: u32 },
}

/// Parses a literal into its raw (possibly unreduced) letter sequence.
pub fn parse_letters(literal: &str) -> Result<Vec<Letter>, WordParseError> {
    let trimmed = literal.trim();
    if trimmed == "1" {
        return Ok(Vec::new());
    }
    let bytes = literal.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if (c == 'g' || c == 'G') && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            let gen: u32 = literal[start..end]
                .parse()
                .ok()
                .filter(|&g| g >= 1)
                .ok_or_else(|| WordParseError::BadEscape {
                    prefix: c,
                    pos: i,
                    literal: literal.to_string(),
                })?;
            out.push(Letter::new(gen, if c == 'G' { -1 } else { 1 }));
            i = end;
            continue;
        }
        if c.is_ascii_lowercase() {
            out.push(Letter::pos((c as u8 - b'a') as u32 + 1));
        } else if c.is_ascii_uppercase() {
            out.push(Letter::neg((c as u8 - b'A') as u32 + 1));
        } else {
            // `char_indices` would be nicer but literals are ASCII by grammar.
            let ch = literal[i..].chars().next().unwrap_or(c);
            return Err(WordParseError::BadChar {
                ch,
                pos: i,
                literal: literal.to_string(),
            });
        }
        i += 1;
    }
    Ok(out)
}

/// Free reduction with a pushdown stack: each letter either cancels the top
/// of the stack or is pushed.
pub fn reduce(letters: &[Letter]) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word(stack)
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn from_letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Reduces `letters` and wraps the result.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let v: Vec<Letter> = letters.into_iter().collect();
        reduce(&v)
    }

    pub fn parse(literal: &str) -> Result<Self, WordParseError> {
        Ok(reduce(&parse_letters(literal)?))
    }

    /// Parses and checks every letter against `generator_count`.
    pub fn parse_bounded(literal: &str, generator_count: u32) -> Result<Self, WordParseError> {
        let w = Word::parse(literal)?;
        w.check_bound(generator_count)?;
        Ok(w)
    }

    pub fn check_bound(&self, generator_count: u32) -> Result<(), WordParseError> {
        match self.0.iter().find(|l| l.gen() > generator_count) {
            Some(l) => Err(WordParseError::OutOfRange {
                letter: l.to_string(),
                count: generator_count,
            }),
            None => Ok(()),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used, 0 for the identity.
    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|l| l.gen()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Word) -> Word {
        // Only the seam can cancel since both sides are reduced.
        let mut left = self.0.clone();
        let mut k = 0;
        while k < other.0.len() {
            match left.last() {
                Some(&top) if top.cancels(other.0[k]) => {
                    left.pop();
                    k += 1;
                }
                _ => break,
            }
        }
        left.extend_from_slice(&other.0[k..]);
        Word(left)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `w · self · w⁻¹`
    pub fn conjugate_by(&self, w: &Word) -> Word {
        w.mul(self).mul(&w.inverse())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// All cyclic rotations of the letter sequence (not re-reduced).
    pub fn rotations(&self) -> Vec<Vec<Letter>> {
        let n = self.0.len();
        if n == 0 {
            return vec![Vec::new()];
        }
        (0..n)
            .map(|k| self.0[k..].iter().chain(&self.0[..k]).copied().collect())
            .collect()
    }

    /// True when `other` equals some cyclic rotation of `self` letterwise.
    pub fn is_rotation_of(&self, other: &Word) -> bool {
        self.len() == other.len() && self.rotations().iter().any(|r| r == other.letters())
    }
}

impl FromStr for Word {
    type Err = WordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Formats a raw letter sequence with the word-literal syntax.
pub fn format_letters(letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "1".to_string();
    }
    letters.iter().map(|l| l.to_string()).collect()
}

pub fn multiply(u: &Word, v: &Word) -> Word {
    u.mul(v)
}

pub fn invert(w: &Word) -> Word {
    w.inverse()
}

/// `w · r · w⁻¹`
pub fn conjugate(w: &Word, r: &Word) -> Word {
    r.conjugate_by(w)
}

/// `x · y · x⁻¹ · y⁻¹`
pub fn commutator(x: &Word, y: &Word) -> Word {
    x.mul(y).mul(&x.inverse()).mul(&y.inverse())
}

pub fn equal(u: &Word, v: &Word) -> bool {
    u == v
}

/// Replaces generator `gen` by `repl` (and its inverse by `repl⁻¹`).
pub fn substitute(w: &Word, gen: u32, repl: &Word) -> Word {
    let repl_inv = repl.inverse();
    let mut raw = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if l.gen() == gen {
            let r = if l.is_inverse() { &repl_inv } else { repl };
            raw.extend_from_slice(r.letters());
        } else {
            raw.push(l);
        }
    }
    reduce(&raw)
}

//! Exact multivariate polynomials with rational coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;



#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("operation needs polynomials in at most one common variable")]
    NotUnivariate,
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// Variables with positive exponents, sorted by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(name.to_string(), exp)])
        }
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, var: &str) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| v == var)
            .map_or(0, |(_, e)| *e)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<String, u32> = self.0.iter().cloned().collect();
        for (v, e) in &other.0 {
            *m.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(m.into_iter().collect())
    }

    fn without(&self, var: &str) -> Monomial {
        Monomial(self.0.iter().filter(|(v, _)| v != var).cloned().collect())
    }
}

/// Canonical form: no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn integer(n: i64) -> Self {
        Polynomial::constant(rat(n))
    }

    pub fn var(name: &str) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(name, 1), BigRational::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        (0..e).fold(Polynomial::one(), |acc, _| acc.mul(self))
    }

    /// Replaces `var` by `value` everywhere.
    pub fn substitute(&self, var: &str, value: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let rest = Polynomial {
                terms: [(m.without(var), c.clone())].into_iter().collect(),
            };
            out = out.add(&rest.mul(&value.pow(m.exponent(var))));
        }
        out
    }

    pub fn eval(&self, var: &str, x: &BigRational) -> Polynomial {
        self.substitute(var, &Polynomial::constant(x.clone()))
    }

    /// The only variable, `Ok(None)` for constants.
    pub fn single_variable(&self) -> Result<Option<String>, PolyError> {
        let vars = self.variables();
        match vars.len() {
            0 => Ok(None),
            1 => Ok(vars.into_iter().next()),
            _ => Err(PolyError::NotUnivariate),
        }
    }

    /// Coefficients in ascending degree, with no trailing zeros.
    pub fn to_dense(&self, var: &str) -> Result<Vec<BigRational>, PolyError> {
        let mut out = vec![BigRational::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            if m.0.iter().any(|(v, _)| v != var) {
                return Err(PolyError::NotUnivariate);
            }
            out[m.exponent(var) as usize] = c.clone();
        }
        while out.last().is_some_and(Zero::is_zero) {
            out.pop();
        }
        Ok(out)
    }

    pub fn from_dense(var: &str, coeffs: &[BigRational]) -> Polynomial {
        let mut out = Polynomial::zero();
        for (i, c) in coeffs.iter().enumerate() {
            out.add_term(Monomial::var(var, i as u32), c.clone());
        }
        out
    }
}

fn common_var(a: &Polynomial, b: &Polynomial) -> Result<String, PolyError> {
    let mut vars = a.variables();
    vars.extend(b.variables());
    match vars.len() {
        0 => Ok("x".into()),
        1 => Ok(vars.into_iter().next().unwrap()),
        _ => Err(PolyError::NotUnivariate),
    }
}

fn dense_div_rem(
    a: &[BigRational],
    b: &[BigRational],
) -> Result<(Vec<BigRational>, Vec<BigRational>), PolyError> {
    let lead = b.last().ok_or(PolyError::DivisionByZero)?;
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / lead;
        for (i, bc) in b.iter().enumerate() {
            let t = &r[i + shift] - &f * bc;
            r[i + shift] = t;
        }
        q[shift] = f;
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    Ok((q, r))
}

/// Univariate division with remainder.
pub fn div_rem(a: &Polynomial, b: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
    let var = common_var(a, b)?;
    let (q, r) = dense_div_rem(&a.to_dense(&var)?, &b.to_dense(&var)?)?;
    Ok((Polynomial::from_dense(&var, &q), Polynomial::from_dense(&var, &r)))
}

pub fn rem(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    Ok(div_rem(a, b)?.1)
}

fn monic(p: &Polynomial) -> Result<Polynomial, PolyError> {
    if p.is_zero() {
        return Ok(p.clone());
    }
    let var = common_var(p, p)?;
    let dense = p.to_dense(&var)?;
    let lead = dense.last().unwrap().clone();
    Ok(p.scale(&(BigRational::one() / lead)))
}

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    common_var(a, b)?;
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = rem(&x, &y)?;
        x = y;
        y = r;
    }
    monic(&x)
}

/// `(g, s, t)` with `s·a + t·b = g` and `g` monic.
pub fn ext_gcd(
    a: &Polynomial,
    b: &Polynomial,
) -> Result<(Polynomial, Polynomial, Polynomial), PolyError> {
    common_var(a, b)?;
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Polynomial::one(), Polynomial::zero());
    let (mut t0, mut t1) = (Polynomial::zero(), Polynomial::one());
    while !r1.is_zero() {
        let (q, r) = div_rem(&r0, &r1)?;
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
        (t0, t1) = (t1, t);
    }
    if r0.is_zero() {
        return Ok((r0, s0, t0));
    }
    let var = common_var(&r0, &r0)?;
    let lead = r0.to_dense(&var)?.last().unwrap().clone();
    let inv = BigRational::one() / lead;
    Ok((r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)))
}

/// The inverse of `a` modulo `g`, if `gcd(a, g) = 1`.
pub fn inverse_mod(a: &Polynomial, g: &Polynomial) -> Result<Option<Polynomial>, PolyError> {
    let (d, s, _) = ext_gcd(a, g)?;
    if d != Polynomial::one() {
        return Ok(None);
    }
    Ok(Some(rem(&s, g)?))
}

impl super::ring::Ring for Polynomial {
    fn zero() -> Self {
        Polynomial::zero()
    }

    fn one() -> Self {
        Polynomial::one()
    }

    fn add(&self, other: &Self) -> Self {
        Polynomial::add(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        Polynomial::mul(self, other)
    }

    fn neg(&self) -> Self {
        Polynomial::neg(self)
    }

    fn from_i64(n: i64) -> Self {
        Polynomial::integer(n)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &BigRational)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> =
                m.0.iter()
                    .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                    .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                if abs.is_integer() {
                    write!(f, "{abs}")?;
                } else {
                    write!(f, "({abs})")?;
                }
            }
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'(' => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: u32 = match digits.parse() {
                Ok(e) => e,
                Err(_) => return self.err("expected an exponent"),
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match digits.parse() {
            Ok(n) => Ok(n),
            Err(_) => self.err("expected a number"),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                if self.src.get(self.pos) == Some(&b'/')
                    && self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit)
                {
                    self.pos += 1;
                    let d = self.number()?;
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    return Ok(Polynomial::constant(BigRational::new(n, d)));
                }
                Ok(Polynomial::constant(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Polynomial::var(name))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

impl FromStr for Polynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let out = p.expr()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn display_is_descending() {
        assert_eq!(p("2 + 2S^4 - 4S + 4S^2 - 4S^3").to_string(), "2S^4 - 4S^3 + 4S^2 - 4S + 2");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("-x").to_string(), "-x");
        assert_eq!(p("1/2 x").to_string(), "(1/2)x");
        assert_eq!(p("K1*L1 - 1").to_string(), "K1*L1 - 1");
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!("x +".parse::<Polynomial>().is_err());
        assert!("x ^ y".parse::<Polynomial>().is_err());
        assert!("1/0".parse::<Polynomial>().is_err());
        assert!("(x".parse::<Polynomial>().is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(p("(x+1)^2"), p("x^2 + 2x + 1"));
        assert_eq!(p("(x+1)(x-1)"), p("x^2 - 1"));
        assert!(p("x - x").is_zero());
        assert_eq!(p("x^2 + y").substitute("x", &p("y + 1")), p("y^2 + 3y + 1"));
        assert_eq!(p("x^3").eval("x", &rat(2)), Polynomial::integer(8));
    }

    #[test]
    fn division_and_gcd() {
        let (q, r) = div_rem(&p("x^3 + 2x + 5"), &p("x^2 + 1")).unwrap();
        assert_eq!(q, p("x"));
        assert_eq!(r, p("x + 5"));
        assert_eq!(gcd(&p("x^2 - 1"), &p("2x + 2")).unwrap(), p("x + 1"));
        assert_eq!(gcd(&p("x^2 + 1"), &p("x")).unwrap(), Polynomial::one());
        let inv = inverse_mod(&p("x + 1"), &p("x^2 + 1")).unwrap().unwrap();
        assert_eq!(rem(&inv.mul(&p("x + 1")), &p("x^2 + 1")).unwrap(), Polynomial::one());
        assert_eq!(inverse_mod(&p("x + 1"), &p("x^2 - 1")).unwrap(), None);
        assert_eq!(div_rem(&p("x*y"), &p("x")), Err(PolyError::NotUnivariate));
        assert_eq!(div_rem(&p("x"), &p("0")), Err(PolyError::DivisionByZero));
    }
}

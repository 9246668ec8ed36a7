use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The exact commutative rings state sums are evaluated in.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn from_i64(n: i64) -> Self {
        let mut acc = Self::zero();
        let unit = if n < 0 { Self::one().neg() } else { Self::one() };
        for _ in 0..n.unsigned_abs() {
            acc = acc.add(&unit);
        }
        acc
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Integers modulo the prime `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Zp<const P: u64>(u64);

impl<const P: u64> Zp<P> {
    pub fn new(n: i64) -> Self {
        Zp(n.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl<const P: u64> fmt::Display for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Ring for Zp<P> {
    fn zero() -> Self {
        Zp(0)
    }

    fn one() -> Self {
        Zp(1 % P)
    }

    fn add(&self, other: &Self) -> Self {
        Zp((self.0 + other.0) % P)
    }

    fn mul(&self, other: &Self) -> Self {
        if P <= u32::MAX as u64 {
            Zp(self.0 * other.0 % P)
        } else {
            Zp(((self.0 as u128 * other.0 as u128) % P as u128) as u64)
        }
    }

    fn neg(&self) -> Self {
        Zp((P - self.0) % P)
    }

    fn from_i64(n: i64) -> Self {
        Zp::new(n)
    }
}

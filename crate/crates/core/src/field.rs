//! Field abstraction so the closure engine runs both over exact rationals and
//! over univariate rational functions (one formal symbol kept symbolic).

use num::{BigInt, BigRational, One, Signed, Zero};

pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// None exactly when `self` is zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    fn from_rat(r: &BigRational) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Integer power with negative exponents; None when inverting zero.
    fn powi(&self, k: i64) -> Option<Self> {
        if k >= 0 {
            Some(self.pow(k as u64))
        } else {
            self.inv().map(|i| i.pow((-k) as u64))
        }
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        <BigRational as Zero>::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Option<Self> {
        if <BigRational as Zero>::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_rat(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Crude size proxy used only to pick small pivots in elimination.
pub fn rat_size(r: &BigRational) -> usize {
    r.numer().abs().bits() as usize + r.denom().bits() as usize
}

//! Coefficient rings.
//!
//! Every series and polynomial in the crate is generic over a [`Ring`]
//! context. The context carries whatever runtime data the ring needs (the
//! modulus `p^N`, the defining polynomial of an extension, ...) so element
//! types stay plain values.

mod ext;
mod laurent;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use ext::{ExtElem, ExtRing};
pub use laurent::{Laurent, LaurentRing};

/// A commutative ring with identity, described by a context value.
pub trait Ring: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Image of an integer under the structure map `Z -> R`.
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Multiplicative inverse, or `None` when `a` is not a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(v))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, &self.one()))
    }

    /// Image of a rational number; fails when the denominator is not a unit.
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem> {
        let num = self.from_bigint(q.numer());
        if q.denom().is_one() {
            return Ok(num);
        }
        let den = self.from_bigint(q.denom());
        let inv = self.inv(&den).ok_or_else(|| Error::DenominatorNotInvertible {
            denominator: q.denom().to_string(),
        })?;
        Ok(self.mul(&num, &inv))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn scale_i64(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        self.mul(a, &self.from_i64(k))
    }

    fn fmt_elem(&self, a: &Self::Elem) -> String {
        format!("{a:?}")
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
    fn fmt_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }
}

/// The ring of integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        if a.abs().is_one() {
            Some(a.clone())
        } else {
            None
        }
    }
    fn fmt_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }
}

/// `true` when every prime factor of `q`'s denominator divides `base`.
pub fn denominator_divides_power_of(q: &BigRational, base: u64) -> bool {
    let mut d = q.denom().clone();
    let b = BigInt::from(base);
    loop {
        if d.is_one() {
            return true;
        }
        let g = num_integer::Integer::gcd(&d, &b);
        if g.is_one() {
            return false;
        }
        while (&d % &g).is_zero() {
            d /= &g;
        }
    }
}

/// `true` when `q` has no `p` in its denominator.
pub fn is_p_integral(q: &BigRational, p: u64) -> bool {
    !(q.denom() % BigInt::from(p)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_pow_and_inverse() {
        let r = Rationals;
        assert_eq!(r.pow(&q(2, 3), 3), q(8, 27));
        assert_eq!(r.inv(&q(2, 3)), Some(q(3, 2)));
        assert_eq!(r.inv(&q(0, 1)), None);
    }

    #[test]
    fn denominator_scans() {
        assert!(denominator_divides_power_of(&q(5, 81), 3));
        assert!(denominator_divides_power_of(&q(5, 24), 6));
        assert!(!denominator_divides_power_of(&q(5, 10), 3));
        assert!(is_p_integral(&q(7, 9), 5));
        assert!(!is_p_integral(&q(7, 25), 5));
    }
}

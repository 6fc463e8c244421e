//! Exact arithmetic in `Z/p^N`, `F_q`, and the unramified ring `W(F_q)/p^N`.

mod field;
mod unramified;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::ring::Ring;

pub use field::{FiniteField, FqElem};
pub use unramified::{UnramifiedElement, UnramifiedRing};

/// `p^prec`, refusing moduli that would overflow 63 bits.
pub fn modulus_for(p: u64, prec: u32) -> Result<u64> {
    p.checked_pow(prec)
        .filter(|m| *m < (1u64 << 63))
        .ok_or(Error::PrecisionOverflow { p, prec })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// `v_p(k)` together with the unit part `k / p^{v_p(k)}`.
#[inline]
pub(crate) fn split_p(mut k: u64, p: u64) -> (u32, u64) {
    let mut v = 0;
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    (v, k)
}

/// An element of `Z/p^N` with its precision carried alongside.
///
/// Binary operations on values of different precision reduce to the
/// smaller one.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicInt {
    value: u64,
    p: u64,
    prec: u32,
    modulus: u64,
}

impl PadicInt {
    pub fn new(value: i128, p: u64, prec: u32) -> Result<Self> {
        if prec == 0 {
            return Err(Error::InvalidParameter("precision must be at least 1".into()));
        }
        let modulus = modulus_for(p, prec)?;
        Ok(PadicInt {
            value: value.rem_euclid(modulus as i128) as u64,
            p,
            prec,
            modulus,
        })
    }

    pub(crate) fn from_parts(value: u64, p: u64, prec: u32, modulus: u64) -> Self {
        debug_assert!(value < modulus);
        PadicInt {
            value,
            p,
            prec,
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        self.value % self.p != 0
    }

    /// Signed representative in `(-p^N/2, p^N/2]`.
    pub fn centered(&self) -> i128 {
        let v = self.value as i128;
        if v > (self.modulus / 2) as i128 {
            v - self.modulus as i128
        } else {
            v
        }
    }

    /// Reduce to a lower precision.
    pub fn truncate(&self, prec: u32) -> PadicInt {
        assert!(prec >= 1 && prec <= self.prec, "cannot raise precision by truncation");
        let modulus = self.p.pow(prec);
        PadicInt::from_parts(self.value % modulus, self.p, prec, modulus)
    }

    /// `p`-adic valuation, capped at the precision.
    pub fn valuation(&self) -> u32 {
        if self.value == 0 {
            return self.prec;
        }
        split_p(self.value, self.p).0
    }

    pub fn pow(&self, e: u64) -> PadicInt {
        let mut acc = 1 % self.modulus;
        let mut base = self.value;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, self.modulus);
            }
            base = mul_mod(base, base, self.modulus);
            e >>= 1;
        }
        PadicInt::from_parts(acc, self.p, self.prec, self.modulus)
    }

    fn aligned(self, other: PadicInt) -> (u64, u64, u32, u64) {
        assert_eq!(self.p, other.p, "mixed primes in p-adic arithmetic");
        if self.prec <= other.prec {
            (self.value, other.value % self.modulus, self.prec, self.modulus)
        } else {
            (self.value % other.modulus, other.value, other.prec, other.modulus)
        }
    }
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.value, self.p, self.prec)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: PadicInt) -> PadicInt {
        let (a, b, prec, m) = self.aligned(rhs);
        let s = a + b;
        PadicInt::from_parts(if s >= m { s - m } else { s }, self.p, prec, m)
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: PadicInt) -> PadicInt {
        let (a, b, prec, m) = self.aligned(rhs);
        PadicInt::from_parts(if a >= b { a - b } else { a + m - b }, self.p, prec, m)
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: PadicInt) -> PadicInt {
        let (a, b, prec, m) = self.aligned(rhs);
        PadicInt::from_parts(mul_mod(a, b, m), self.p, prec, m)
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        let v = if self.value == 0 { 0 } else { self.modulus - self.value };
        PadicInt::from_parts(v, self.p, self.prec, self.modulus)
    }
}

/// Inverse of a `p`-adic unit.
pub fn padic_inverse(a: PadicInt) -> Result<PadicInt> {
    if !a.is_unit() {
        return Err(Error::NonUnit { p: a.p });
    }
    let inv = inv_mod(a.value, a.modulus).ok_or(Error::NonUnit { p: a.p })?;
    Ok(PadicInt::from_parts(inv, a.p, a.prec, a.modulus))
}

/// The ring `Z/p^N` as a [`Ring`] context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zpn {
    p: u64,
    prec: u32,
    modulus: u64,
}

impl Zpn {
    pub fn new(p: u64, prec: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if prec == 0 {
            return Err(Error::InvalidParameter("precision must be at least 1".into()));
        }
        Ok(Zpn {
            p,
            prec,
            modulus: modulus_for(p, prec)?,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elem(&self, v: i128) -> PadicInt {
        PadicInt::from_parts(
            v.rem_euclid(self.modulus as i128) as u64,
            self.p,
            self.prec,
            self.modulus,
        )
    }

    pub(crate) fn from_u64(&self, v: u64) -> PadicInt {
        PadicInt::from_parts(v % self.modulus, self.p, self.prec, self.modulus)
    }
}

impl Ring for Zpn {
    type Elem = PadicInt;

    fn zero(&self) -> PadicInt {
        self.from_u64(0)
    }
    fn one(&self) -> PadicInt {
        self.from_u64(1)
    }
    fn add(&self, a: &PadicInt, b: &PadicInt) -> PadicInt {
        *a + *b
    }
    fn sub(&self, a: &PadicInt, b: &PadicInt) -> PadicInt {
        *a - *b
    }
    fn neg(&self, a: &PadicInt) -> PadicInt {
        -*a
    }
    fn mul(&self, a: &PadicInt, b: &PadicInt) -> PadicInt {
        *a * *b
    }
    fn is_zero(&self, a: &PadicInt) -> bool {
        a.value == 0
    }
    fn from_bigint(&self, v: &BigInt) -> PadicInt {
        let m = BigInt::from(self.modulus);
        let r = v.mod_floor(&m);
        self.from_u64(r.to_u64().expect("reduced below modulus"))
    }
    fn from_i64(&self, v: i64) -> PadicInt {
        self.elem(v as i128)
    }
    fn inv(&self, a: &PadicInt) -> Option<PadicInt> {
        padic_inverse(*a).ok()
    }
    fn pow(&self, a: &PadicInt, e: u64) -> PadicInt {
        a.pow(e)
    }
    fn fmt_elem(&self, a: &PadicInt) -> String {
        a.value.to_string()
    }
}

/// Reduce a rational with `p`-free denominator into `Z/p^N`.
pub fn rational_to_padic(q: &num_rational::BigRational, ring: &Zpn) -> Result<PadicInt> {
    ring.from_rational(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_examples() {
        let one = PadicInt::new(1, 7, 3).unwrap();
        assert_eq!(padic_inverse(one).unwrap().value(), 1);
        let two = PadicInt::new(2, 7, 2).unwrap();
        assert_eq!(padic_inverse(two).unwrap().value(), 25);
        let seven = PadicInt::new(7, 7, 2).unwrap();
        assert_eq!(padic_inverse(seven), Err(Error::NonUnit { p: 7 }));
    }

    #[test]
    fn mixed_precision_reduces_to_minimum() {
        let a = PadicInt::new(100, 5, 3).unwrap();
        let b = PadicInt::new(7, 5, 2).unwrap();
        let s = a + b;
        assert_eq!(s.precision(), 2);
        assert_eq!(s.value(), (100 + 7) % 25);
        assert_eq!((a * b).value(), (100 * 7) % 25);
    }

    #[test]
    fn precision_overflow_is_an_error() {
        assert!(matches!(PadicInt::new(1, 13, 20), Err(Error::PrecisionOverflow { .. })));
    }

    #[test]
    fn valuation_and_centered() {
        let a = PadicInt::new(50, 5, 4).unwrap();
        assert_eq!(a.valuation(), 2);
        assert_eq!(PadicInt::new(-1, 5, 2).unwrap().centered(), -1);
    }

    proptest! {
        #[test]
        fn inverse_is_an_involution(v in 1i128..100_000, prec in 1u32..6) {
            let p = 7u64;
            let a = PadicInt::new(v, p, prec).unwrap();
            prop_assume!(a.is_unit());
            let inv = padic_inverse(a).unwrap();
            prop_assert_eq!((a * inv).value(), 1);
            prop_assert_eq!(padic_inverse(inv).unwrap(), a);
        }

        #[test]
        fn truncation_is_a_ring_map(a in 0i128..1_000_000, b in 0i128..1_000_000) {
            let x = PadicInt::new(a, 5, 6).unwrap();
            let y = PadicInt::new(b, 5, 6).unwrap();
            prop_assert_eq!((x * y).truncate(3), x.truncate(3) * y.truncate(3));
            prop_assert_eq!((x + y).truncate(2), x.truncate(2) + y.truncate(2));
        }
    }
}

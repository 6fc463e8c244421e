use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{inv_mod, is_prime, mul_mod};
use crate::error::{Error, Result};
use crate::ring::Ring;

const MAX_FIELD_SIZE: u64 = 1 << 24;

/// Element of a [`FiniteField`]: the index `sum_i c_i p^i` of its
/// coordinates `c_i` in the basis `1, x, ..., x^{r-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(pub u32);

#[derive(Debug)]
struct Tables {
    p: u64,
    r: usize,
    q: u64,
    /// `m_0` as lower coefficients; the leading 1 is implicit.
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// `F_q = F_p[x]/(m_0)` with `m_0` the lexicographically smallest monic
/// irreducible of degree `r` (coefficients compared from `x^{r-1}` down).
///
/// Multiplication goes through discrete-log tables, so `q` is limited to
/// `2^24`.
#[derive(Clone, Debug)]
pub struct FiniteField {
    t: Arc<Tables>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.modulus == other.t.modulus
    }
}

impl FiniteField {
    pub fn new(p: u64, r: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(Error::InvalidParameter("extension degree must be at least 1".into()));
        }
        let q = p
            .checked_pow(r as u32)
            .filter(|q| *q <= MAX_FIELD_SIZE)
            .ok_or_else(|| Error::InvalidParameter(format!("field {p}^{r} is too large")))?;
        let modulus = smallest_irreducible(p, r);
        Ok(Self::with_modulus(p, r, q, modulus))
    }

    fn with_modulus(p: u64, r: usize, q: u64, modulus: Vec<u64>) -> Self {
        let mut t = Tables {
            p,
            r,
            q,
            modulus,
            exp: Vec::new(),
            log: vec![u32::MAX; q as usize],
        };
        let generator = (1..q)
            .find(|&g| multiplicative_order(&t, g as u32) == q - 1)
            .expect("F_q^* is cyclic");
        let mut e = 1u32;
        t.exp.reserve((q - 1) as usize);
        for k in 0..q - 1 {
            t.exp.push(e);
            t.log[e as usize] = k as u32;
            e = slow_mul(&t, e, generator as u32);
        }
        FiniteField { t: Arc::new(t) }
    }

    pub fn p(&self) -> u64 {
        self.t.p
    }

    pub fn degree(&self) -> usize {
        self.t.r
    }

    pub fn order(&self) -> u64 {
        self.t.q
    }

    /// Lower coefficients of the defining polynomial `m_0`.
    pub fn modulus(&self) -> &[u64] {
        &self.t.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.t.q as u32).map(FqElem)
    }

    pub fn from_coefficients(&self, c: &[u64]) -> FqElem {
        let mut idx = 0u64;
        for ci in c.iter().take(self.t.r).rev() {
            idx = idx * self.t.p + ci % self.t.p;
        }
        FqElem(idx as u32)
    }

    pub fn coefficients(&self, a: FqElem) -> Vec<u64> {
        let mut v = a.0 as u64;
        (0..self.t.r)
            .map(|_| {
                let d = v % self.t.p;
                v /= self.t.p;
                d
            })
            .collect()
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> FqElem {
        FqElem(v.rem_euclid(self.t.p as i64) as u32)
    }

    /// The class of `x`.
    pub fn generator(&self) -> FqElem {
        if self.t.r == 1 {
            self.from_int(-(self.t.modulus[0] as i64))
        } else {
            FqElem(self.t.p as u32)
        }
    }

    #[inline]
    pub fn add_elems(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.t.p as u32;
        if self.t.r == 1 {
            let s = a.0 + b.0;
            return FqElem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        for _ in 0..self.t.r {
            let d = (x % p + y % p) % p;
            out += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn neg_elem(&self, a: FqElem) -> FqElem {
        let p = self.t.p as u32;
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        for _ in 0..self.t.r {
            let d = x % p;
            out += ((p - d) % p) * place;
            place *= p;
            x /= p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn mul_elems(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem(0);
        }
        let n = self.t.q - 1;
        let k = (self.t.log[a.0 as usize] as u64 + self.t.log[b.0 as usize] as u64) % n;
        FqElem(self.t.exp[k as usize])
    }

    pub fn pow_elem(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem(1);
        }
        if a.0 == 0 {
            return FqElem(0);
        }
        let n = self.t.q - 1;
        let k = mul_mod(self.t.log[a.0 as usize] as u64, e % n, n);
        FqElem(self.t.exp[k as usize])
    }

    pub fn inv_elem(&self, a: FqElem) -> Option<FqElem> {
        if a.0 == 0 {
            return None;
        }
        let n = self.t.q - 1;
        let k = (n - self.t.log[a.0 as usize] as u64) % n;
        Some(FqElem(self.t.exp[k as usize]))
    }

    /// Discrete logarithm with respect to the table generator.
    pub fn log(&self, a: FqElem) -> Option<u64> {
        (a.0 != 0).then(|| self.t.log[a.0 as usize] as u64)
    }

    /// Quadratic character: 0, 1 or -1 (odd characteristic only).
    pub fn quadratic_character(&self, a: FqElem) -> i32 {
        match self.log(a) {
            None => 0,
            Some(k) if k % 2 == 0 => 1,
            Some(_) => -1,
        }
    }

    /// The absolute Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: FqElem) -> FqElem {
        self.pow_elem(a, self.t.p)
    }

    /// An embedding `self -> into`, as the image of every element indexed by
    /// its `FqElem` value. Requires `deg self | deg into`.
    pub fn embedding_into(&self, into: &FiniteField) -> Result<Vec<FqElem>> {
        if self.p() != into.p() || into.degree() % self.degree() != 0 {
            return Err(Error::InvalidParameter("no field embedding exists".into()));
        }
        // Root of m_0 in the larger field; smallest index wins.
        let root = into
            .elements()
            .find(|&z| {
                let mut acc = FqElem(1);
                for _ in 0..self.degree() {
                    acc = into.mul_elems(acc, z);
                }
                let mut val = acc;
                let mut zp = FqElem(1);
                for &c in self.modulus() {
                    val = into.add_elems(val, into.mul_elems(into.from_int(c as i64), zp));
                    zp = into.mul_elems(zp, z);
                }
                val.0 == 0
            })
            .ok_or_else(|| Error::ConsistencyFailure("defining polynomial has no root".into()))?;
        Ok(self
            .elements()
            .map(|a| {
                let mut acc = FqElem(0);
                let mut zp = FqElem(1);
                for c in self.coefficients(a) {
                    acc = into.add_elems(acc, into.mul_elems(into.from_int(c as i64), zp));
                    zp = into.mul_elems(zp, root);
                }
                acc
            })
            .collect())
    }
}

impl Ring for FiniteField {
    type Elem = FqElem;

    fn zero(&self) -> FqElem {
        FqElem(0)
    }
    fn one(&self) -> FqElem {
        FqElem(1)
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add_elems(*a, *b)
    }
    fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add_elems(*a, self.neg_elem(*b))
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        self.neg_elem(*a)
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.mul_elems(*a, *b)
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.0 == 0
    }
    fn from_bigint(&self, v: &BigInt) -> FqElem {
        let r = v.mod_floor(&BigInt::from(self.t.p));
        FqElem(r.to_u32().expect("reduced mod p"))
    }
    fn from_i64(&self, v: i64) -> FqElem {
        self.from_int(v)
    }
    fn inv(&self, a: &FqElem) -> Option<FqElem> {
        self.inv_elem(*a)
    }
    fn pow(&self, a: &FqElem, e: u64) -> FqElem {
        self.pow_elem(*a, e)
    }
    fn fmt_elem(&self, a: &FqElem) -> String {
        if self.t.r == 1 {
            a.0.to_string()
        } else {
            format!("{:?}", self.coefficients(*a))
        }
    }
}

fn slow_mul(t: &Tables, a: u32, b: u32) -> u32 {
    let p = t.p;
    let r = t.r;
    let digits = |mut v: u64| -> Vec<u64> {
        (0..r)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    };
    let (x, y) = (digits(a as u64), digits(b as u64));
    let mut prod = vec![0u64; 2 * r - 1];
    for i in 0..r {
        for j in 0..r {
            prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
        }
    }
    poly_rem_monic(&mut prod, &t.modulus, p);
    prod.iter().rev().fold(0u64, |acc, d| acc * p + d) as u32
}

fn multiplicative_order(t: &Tables, g: u32) -> u64 {
    let mut e = g;
    let mut k = 1u64;
    while e != 1 {
        e = slow_mul(t, e, g);
        k += 1;
        if k > t.q {
            return 0;
        }
    }
    k
}

/// Reduce `c` (coefficients, low first) modulo the monic polynomial with
/// lower coefficients `m`; leaves `deg m` coefficients.
fn poly_rem_monic(c: &mut Vec<u64>, m: &[u64], p: u64) {
    let r = m.len();
    while c.len() > r {
        let top = c.pop().unwrap() % p;
        if top == 0 {
            continue;
        }
        let shift = c.len() - r;
        for (i, mi) in m.iter().enumerate() {
            c[shift + i] = (c[shift + i] + p * p - top * mi % p) % p;
        }
    }
    c.resize(r, 0);
}

// Dense polynomials over F_p for the irreducibility test; coefficient
// vectors are low-first and trimmed.

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem_monic(&mut prod, m, p);
    trim(&mut prod);
    prod
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    trim(&mut a);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p).expect("nonzero leading coefficient");
    while a.len() > db {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % p;
        for (i, bi) in b.iter().enumerate() {
            let idx = top - db + i;
            a[idx] = (a[idx] + p * p - c * bi % p) % p;
        }
        trim(&mut a);
    }
    a
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `x^{p^k} mod m` by repeated `p`-th powering.
fn frobenius_power_of_x(m: &[u64], p: u64, k: usize) -> Vec<u64> {
    let mut cur = vec![0, 1];
    poly_rem_monic(&mut cur, m, p);
    trim(&mut cur);
    for _ in 0..k {
        let mut acc = vec![1u64];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        cur = acc;
    }
    cur
}

/// Rabin's test for the monic polynomial with lower coefficients `m`.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let r = m.len();
    if r == 1 {
        return true;
    }
    if m[0] % p == 0 {
        return false;
    }
    let mut full = m.to_vec();
    full.push(1);
    let xr = frobenius_power_of_x(m, p, r);
    let mut diff = xr.clone();
    diff.resize(2.max(diff.len()), 0);
    diff[1] = (diff[1] + p - 1) % p;
    trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    let primes: Vec<usize> = (2..=r).filter(|l| r % l == 0 && is_prime(*l as u64)).collect();
    for l in primes {
        let mut h = frobenius_power_of_x(m, p, r / l);
        h.resize(2.max(h.len()), 0);
        h[1] = (h[1] + p - 1) % p;
        trim(&mut h);
        let g = poly_gcd(&full, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u64, r: usize) -> Vec<u64> {
    let q = p.pow(r as u32);
    (0..q)
        .map(|idx| {
            let mut v = idx;
            (0..r)
                .map(|_| {
                    let d = v % p;
                    v /= p;
                    d
                })
                .collect::<Vec<u64>>()
        })
        .find(|m| is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_modulus_is_x() {
        let f = FiniteField::new(5, 1).unwrap();
        assert_eq!(f.modulus(), &[0]);
        assert_eq!(f.generator(), FqElem(0));
    }

    #[test]
    fn f25_modulus_is_x2_plus_2() {
        let f = FiniteField::new(5, 2).unwrap();
        assert_eq!(f.modulus(), &[2, 0]);
    }

    #[test]
    fn irreducibility_scan_matches_root_search_for_quadratics() {
        for p in [3u64, 5, 7, 11] {
            for a0 in 0..p {
                for a1 in 0..p {
                    let has_root = (0..p).any(|x| (x * x + a1 * x + a0) % p == 0);
                    assert_eq!(is_irreducible(&[a0, a1], p), !has_root, "p={p} a0={a0} a1={a1}");
                }
            }
        }
    }

    #[test]
    fn orders_divide_q_minus_one() {
        let f = FiniteField::new(3, 3).unwrap();
        for a in f.elements().skip(1) {
            assert_eq!(f.pow_elem(a, f.order() - 1), FqElem(1));
        }
    }

    #[test]
    fn field_axioms_on_f49() {
        let f = FiniteField::new(7, 2).unwrap();
        let elems: Vec<FqElem> = f.elements().collect();
        for &a in elems.iter().step_by(5) {
            for &b in elems.iter().step_by(3) {
                for &c in elems.iter().step_by(7) {
                    let lhs = f.mul_elems(a, f.add_elems(b, c));
                    let rhs = f.add_elems(f.mul_elems(a, b), f.mul_elems(a, c));
                    assert_eq!(lhs, rhs);
                }
            }
            if a.0 != 0 {
                assert_eq!(f.mul_elems(a, f.inv_elem(a).unwrap()), FqElem(1));
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = FiniteField::new(5, 2).unwrap();
        let big = FiniteField::new(5, 4).unwrap();
        let emb = small.embedding_into(&big).unwrap();
        for a in small.elements() {
            for b in small.elements().step_by(3) {
                let s = emb[small.add_elems(a, b).0 as usize];
                assert_eq!(s, big.add_elems(emb[a.0 as usize], emb[b.0 as usize]));
                let m = emb[small.mul_elems(a, b).0 as usize];
                assert_eq!(m, big.mul_elems(emb[a.0 as usize], emb[b.0 as usize]));
            }
        }
    }
}

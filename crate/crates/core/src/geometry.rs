//! The Dwork pencil itself: the coefficients `A_m`, exhaustive point
//! counts, and Frobenius data of the genus-one fibers.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::padic::{is_prime, padic_inverse, FiniteField, FqElem, PadicInt, Zpn};
use crate::ring::{Integers, Rationals, Ring};
use crate::series::{Poly, PolyRing};

/// Default cap on the estimated number of field operations in a count.
pub const DEFAULT_BUDGET: u128 = 1 << 34;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "DWORK_LAB_BUDGET";

/// The budget in force: `DWORK_LAB_BUDGET` if set and valid, else the default.
pub fn configured_budget() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// A fiber `X_t` of the pencil over `F_q`.
#[derive(Clone, Debug)]
pub struct FamilyPoint {
    n: usize,
    field: FiniteField,
    t: FqElem,
}

impl FamilyPoint {
    pub fn new(n: usize, field: FiniteField, t: FqElem) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("n must be at least 2".into()));
        }
        let p = field.p();
        if (n as u64 + 1) % p == 0 {
            return Err(Error::BadCharacteristic {
                p,
                n_plus_one: n as u64 + 1,
            });
        }
        if t.0 as u64 >= field.order() {
            return Err(Error::InvalidParameter("t is not an element of the field".into()));
        }
        Ok(FamilyPoint { n, field, t })
    }

    /// Build from `t` given by its coordinates in the power basis of `F_q`.
    pub fn from_coefficients(n: usize, p: u64, r: usize, t: &[u64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        let field = FiniteField::new(p, r)?;
        if t.len() > r {
            return Err(Error::InvalidParameter(format!("t has more than {r} coordinates")));
        }
        let t = field.from_coefficients(t);
        Self::new(n, field, t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn r(&self) -> usize {
        self.field.degree()
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn t(&self) -> FqElem {
        self.t
    }

    pub fn is_smooth(&self) -> bool {
        self.field.pow_elem(self.t, self.n as u64 + 1) != self.field.one()
    }

    /// `lambda = t^{-(n+1)}`.
    pub fn lambda(&self) -> Result<FqElem> {
        let inv = self.field.inv_elem(self.t).ok_or(Error::ZeroParameter)?;
        Ok(self.field.pow_elem(inv, self.n as u64 + 1))
    }
}

/// Exact point counts of a fiber over `F_{q^k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub k: usize,
    /// `q^k`.
    pub field_size: u64,
    /// Points of the affine cone in `A^{n+1}`.
    pub affine: u64,
    /// Points of the hypersurface in `P^n`.
    pub projective: u64,
    pub elapsed: Duration,
}

fn multinomial(parts: &[u64]) -> BigInt {
    let mut acc = BigInt::one();
    let mut total = 0u64;
    for &k in parts {
        for i in 1..=k {
            total += 1;
            acc = acc * BigInt::from(total) / BigInt::from(i);
        }
    }
    acc
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    multinomial(&[k, n - k])
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `A_m(t)`, the coefficient of `(X_1 ... X_{n+1})^m` in `P_t^m`, by the
/// multinomial expansion.
pub fn a_m_direct(n: usize, m: usize) -> Poly<BigInt> {
    let ring = PolyRing::new(Integers);
    let n1 = n as u64 + 1;
    let m = m as u64;
    let mut coeffs = vec![BigInt::zero(); m as usize + 1];
    let mut r = 0u64;
    while n1 * r <= m {
        let j = m - n1 * r;
        let mut parts = vec![r; n1 as usize];
        parts.push(j);
        let c = multinomial(&parts) * BigInt::from(-(n1 as i64)).pow(j as u32);
        coeffs[j as usize] += c;
        r += 1;
    }
    ring.from_coeffs(coeffs)
}

/// `A_m(t)` from its hypergeometric closed form, assembled over `Q`.
pub fn a_m_closed(n: usize, m: usize) -> Poly<BigRational> {
    let ring = PolyRing::new(Rationals);
    let n1 = n as u64 + 1;
    let m = m as u64;
    let lead = BigRational::from_integer(BigInt::from(-(n1 as i64)).pow(m as u32));
    let mut coeffs = vec![BigRational::zero(); m as usize + 1];
    let mut r = 0u64;
    while n1 * r <= m {
        let num = binomial(m, n1 * r) * factorial(n1 * r);
        let den = BigInt::from(-(n1 as i64)).pow((n1 * r) as u32) * factorial(r).pow(n1 as u32);
        // t^m * t^{-(n+1) r}
        coeffs[(m - n1 * r) as usize] += &lead * BigRational::new(num, den);
        r += 1;
    }
    ring.from_coeffs(coeffs)
}

/// Count `P_t = 0` over `F_{q^k}` with the default or configured budget.
pub fn count_points(fp: &FamilyPoint, k: usize) -> Result<CountReport> {
    count_points_with_budget(fp, k, configured_budget())
}

pub fn count_points_with_budget(fp: &FamilyPoint, k: usize, budget: u128) -> Result<CountReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("extension degree must be at least 1".into()));
    }
    let start = Instant::now();
    let big_q = (fp.q() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    let n = fp.n();
    let estimate = big_q
        .saturating_pow(n as u32)
        .saturating_mul(n as u128 + 1)
        .saturating_add(big_q.saturating_mul(big_q));
    if estimate > budget {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    let field = if k == 1 {
        fp.field().clone()
    } else {
        FiniteField::new(fp.p(), fp.r() * k)?
    };
    let t = if k == 1 {
        fp.t()
    } else {
        fp.field().embedding_into(&field)?[fp.t().0 as usize]
    };
    let affine = affine_count(&field, n, t);
    let size = field.order();
    if (affine - 1) % (size - 1) != 0 {
        return Err(Error::ConsistencyFailure("affine count is not 1 mod q - 1".into()));
    }
    Ok(CountReport {
        k,
        field_size: size,
        affine,
        projective: (affine - 1) / (size - 1),
        elapsed: start.elapsed(),
    })
}

const TABLE_LIMIT: u64 = 1 << 11;

/// `#{x in F^{n+1} : sum x_i^{n+1} = (n+1) t prod x_i}`, enumerating the
/// first `n` coordinates and solving for the last.
fn affine_count(field: &FiniteField, n: usize, t: FqElem) -> u64 {
    let size = field.order();
    let e = n as u64 + 1;
    let powers: Vec<FqElem> = field.elements().map(|x| field.pow_elem(x, e)).collect();
    let coef = field.mul_elems(field.from_int(e as i64), t);
    // solutions[c * size + v] = #{y : y^{n+1} - c y = v}
    let table: Option<Vec<u32>> = (size <= TABLE_LIMIT).then(|| {
        let mut tab = vec![0u32; (size * size) as usize];
        for c in field.elements() {
            for y in field.elements() {
                let v = field.add_elems(powers[y.0 as usize], field.neg_elem(field.mul_elems(c, y)));
                tab[(c.0 as u64 * size + v.0 as u64) as usize] += 1;
            }
        }
        tab
    });
    let solve = |c: FqElem, v: FqElem| -> u64 {
        match &table {
            Some(tab) => tab[(c.0 as u64 * size + v.0 as u64) as usize] as u64,
            None => field
                .elements()
                .filter(|&y| field.add_elems(powers[y.0 as usize], field.neg_elem(field.mul_elems(c, y))) == v)
                .count() as u64,
        }
    };
    (0..size as u32)
        .into_par_iter()
        .map(|x1| {
            let x1 = FqElem(x1);
            let mut total = 0u64;
            // Odometer over x_2..x_n, carrying the running sum and product.
            let inner = n - 1;
            let mut digits = vec![0u32; inner];
            loop {
                let mut sum = powers[x1.0 as usize];
                let mut prod = field.mul_elems(coef, x1);
                for &d in &digits {
                    sum = field.add_elems(sum, powers[d as usize]);
                    prod = field.mul_elems(prod, FqElem(d));
                }
                total += solve(prod, field.neg_elem(sum));
                let mut i = 0;
                loop {
                    if i == inner {
                        return total;
                    }
                    digits[i] += 1;
                    if digits[i] as u64 == size {
                        digits[i] = 0;
                        i += 1;
                    } else {
                        break;
                    }
                }
            }
        })
        .sum()
}

/// Trace of Frobenius `a` of a genus-one curve over `F_q`; the
/// characteristic polynomial is `T^2 - a T + q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EllipticFrobenius {
    pub p: u64,
    pub q: u64,
    pub a: i64,
}

impl EllipticFrobenius {
    fn checked(p: u64, q: u64, a: i64) -> Result<Self> {
        if (a as i128).pow(2) > 4 * q as i128 {
            return Err(Error::ConsistencyFailure(format!(
                "trace {a} violates the Hasse bound for q = {q}"
            )));
        }
        Ok(EllipticFrobenius { p, q, a })
    }

    pub fn is_ordinary(&self) -> bool {
        self.a.rem_euclid(self.p as i64) != 0
    }

    /// Coefficients `q, -a, 1` of `T^2 - a T + q`, low first.
    pub fn char_poly(&self) -> [i64; 3] {
        [self.q as i64, -self.a, 1]
    }
}

/// Frobenius data of the plane cubic `X_t` (`n = 2`) from its point count.
pub fn elliptic_frobenius(fp: &FamilyPoint) -> Result<EllipticFrobenius> {
    if fp.n() != 2 {
        return Err(Error::InvalidParameter("elliptic data needs n = 2".into()));
    }
    if !fp.is_smooth() {
        return Err(Error::SingularFiber);
    }
    let report = count_points(fp, 1)?;
    let a = fp.q() as i64 + 1 - report.projective as i64;
    EllipticFrobenius::checked(fp.p(), fp.q(), a)
}

/// Frobenius data of `y^2 = x(x-1)(x-lambda)` over `field`.
pub fn legendre_frobenius(field: &FiniteField, lambda: FqElem) -> Result<EllipticFrobenius> {
    if field.p() == 2 {
        return Err(Error::InvalidParameter("the Legendre family needs odd p".into()));
    }
    let one = field.one();
    if lambda.0 == 0 || lambda == one {
        return Err(Error::SingularFiber);
    }
    let minus_one = field.neg_elem(one);
    let minus_lambda = field.neg_elem(lambda);
    let sum: i64 = field
        .elements()
        .map(|x| {
            let f = field.mul_elems(
                field.mul_elems(x, field.add_elems(x, minus_one)),
                field.add_elems(x, minus_lambda),
            );
            field.quadratic_character(f) as i64
        })
        .sum();
    EllipticFrobenius::checked(field.p(), field.order(), -sum)
}

/// The unit root of `T^2 - a T + q` in `Z_p` to precision `prec`, by Newton
/// iteration from `T = a mod p`.
pub fn unit_root_from_counts(frob: &EllipticFrobenius, prec: u32) -> Result<PadicInt> {
    if !frob.is_ordinary() {
        return Err(Error::NotOrdinary);
    }
    let ring = Zpn::new(frob.p, prec)?;
    let a = ring.elem(frob.a as i128);
    let q = ring.elem(frob.q as i128);
    let mut x = a;
    for _ in 0..=prec {
        let f = x * x - a * x + q;
        let df = x + x - a;
        x = x - f * padic_inverse(df)?;
    }
    if (x * x - a * x + q).value() != 0 {
        return Err(Error::ConsistencyFailure("Newton iteration did not converge".into()));
    }
    Ok(x)
}

/// `lhs = rhs` after reducing coefficients mod `p`.
pub fn poly_eq_mod_p(lhs: &Poly<BigInt>, rhs: &Poly<BigInt>, p: u64) -> bool {
    let pp = BigInt::from(p);
    let len = lhs.0.len().max(rhs.0.len());
    (0..len).all(|k| {
        let a = lhs.0.get(k).cloned().unwrap_or_default();
        let b = rhs.0.get(k).cloned().unwrap_or_default();
        (a - b).mod_floor(&pp).is_zero()
    })
}

/// Reduce an integer polynomial to coefficients in `[0, p)`.
pub fn reduce_mod_p(poly: &Poly<BigInt>, p: u64) -> Vec<u64> {
    let pp = BigInt::from(p);
    let mut c: Vec<u64> = poly
        .0
        .iter()
        .map(|x| x.mod_floor(&pp).to_u64().expect("reduced"))
        .collect();
    while c.last() == Some(&0) {
        c.pop();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    /// Expand `P_t^m` monomial by monomial and read off the diagonal term.
    fn a_m_by_expansion(n: usize, m: usize) -> Vec<BigInt> {
        // Map from (exponent vector, power of t) to coefficient.
        let mut acc: HashMap<(Vec<usize>, usize), BigInt> = HashMap::new();
        acc.insert((vec![0; n + 1], 0), BigInt::one());
        for _ in 0..m {
            let mut next: HashMap<(Vec<usize>, usize), BigInt> = HashMap::new();
            for ((e, tp), c) in &acc {
                for i in 0..=n {
                    let mut e2 = e.clone();
                    e2[i] += n + 1;
                    *next.entry((e2, *tp)).or_default() += c;
                }
                let e2: Vec<usize> = e.iter().map(|x| x + 1).collect();
                *next.entry((e2, tp + 1)).or_default() += c * BigInt::from(-(n as i64 + 1));
            }
            acc = next;
        }
        let mut out = vec![BigInt::zero(); m + 1];
        for ((e, tp), c) in acc {
            if e.iter().all(|&x| x == m) {
                out[tp] += c;
            }
        }
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }

    #[test]
    fn small_coefficients() {
        assert_eq!(a_m_direct(2, 0).0, vec![BigInt::one()]);
        for n in 2..=5usize {
            assert_eq!(a_m_direct(n, 1).0, vec![BigInt::zero(), BigInt::from(-(n as i64 + 1))]);
        }
    }

    #[test]
    fn direct_matches_expansion_and_closed_form() {
        for n in 2..=4 {
            for m in 0..=12 {
                let direct = a_m_direct(n, m);
                assert_eq!(direct.0.len(), m + 1);
                if m <= 7 {
                    assert_eq!(direct.0, a_m_by_expansion(n, m), "n={n} m={m}");
                }
                let closed = a_m_closed(n, m);
                let as_q: Vec<BigRational> = direct.0.iter().cloned().map(BigRational::from_integer).collect();
                assert_eq!(closed.0, as_q, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn fermat_cubic_over_f2() {
        let fp = FamilyPoint::from_coefficients(2, 2, 1, &[0]).unwrap();
        let rep = count_points(&fp, 1).unwrap();
        assert_eq!((rep.affine, rep.projective), (4, 3));
    }

    /// Count projective points by normalizing the first nonzero coordinate.
    fn projective_count(field: &FiniteField, n: usize, t: FqElem) -> u64 {
        let size = field.order();
        let coef = field.mul_elems(field.from_int(n as i64 + 1), t);
        let mut count = 0;
        let total = size.pow(n as u32 + 1);
        for idx in 0..total {
            let mut v = idx;
            let xs: Vec<FqElem> = (0..=n)
                .map(|_| {
                    let d = v % size;
                    v /= size;
                    FqElem(d as u32)
                })
                .collect();
            match xs.iter().find(|x| x.0 != 0) {
                Some(first) if *first == field.one() => {}
                _ => continue,
            }
            let mut sum = field.zero();
            let mut prod = coef;
            for &x in &xs {
                sum = field.add_elems(sum, field.pow_elem(x, n as u64 + 1));
                prod = field.mul_elems(prod, x);
            }
            if sum == prod {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn kernel_count_matches_projective_enumeration() {
        for (n, p, r) in [
            (2usize, 5u64, 1usize),
            (2, 7, 1),
            (3, 5, 1),
            (2, 2, 2),
            (2, 5, 2),
            (4, 3, 1),
        ] {
            if (n as u64 + 1) % p == 0 {
                continue;
            }
            let field = FiniteField::new(p, r).unwrap();
            for t in field.elements() {
                let fp = FamilyPoint::new(n, field.clone(), t).unwrap();
                let rep = count_points(&fp, 1).unwrap();
                assert_eq!(
                    rep.projective,
                    projective_count(&field, n, t),
                    "n={n} p={p} r={r} t={t:?}"
                );
            }
        }
    }

    #[test]
    fn extension_counts_use_embedded_parameter() {
        let fp = FamilyPoint::from_coefficients(2, 5, 1, &[2]).unwrap();
        let rep = count_points(&fp, 2).unwrap();
        let big = FiniteField::new(5, 2).unwrap();
        let fp2 = FamilyPoint::new(2, big.clone(), big.from_int(2)).unwrap();
        let direct = count_points(&fp2, 1).unwrap();
        assert_eq!(
            (rep.field_size, rep.affine, rep.projective),
            (direct.field_size, direct.affine, direct.projective)
        );
        // Over F_25 the trace is a_1^2 - 2q.
        let a1 = elliptic_frobenius(&fp).unwrap().a;
        let a2 = elliptic_frobenius(&fp2).unwrap().a;
        assert_eq!(a2, a1 * a1 - 10);
    }

    #[test]
    fn budget_guard() {
        let fp = FamilyPoint::from_coefficients(3, 7, 1, &[2]).unwrap();
        assert!(matches!(
            count_points_with_budget(&fp, 1, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn legendre_trace_by_hand() {
        // y^2 = x(x-1)(x-2) over F_5: f(x) = 0, 0, 0, 1, 4 at x = 0..4.
        let f5 = FiniteField::new(5, 1).unwrap();
        let frob = legendre_frobenius(&f5, f5.from_int(2)).unwrap();
        assert_eq!(frob.a, -2);
        assert_eq!(legendre_frobenius(&f5, f5.one()), Err(Error::SingularFiber));
    }

    #[test]
    fn trace_congruent_to_affine_count() {
        for p in [5u64, 7, 11] {
            let field = FiniteField::new(p, 1).unwrap();
            for t in field.elements() {
                let fp = FamilyPoint::new(2, field.clone(), t).unwrap();
                if !fp.is_smooth() {
                    assert_eq!(elliptic_frobenius(&fp), Err(Error::SingularFiber));
                    continue;
                }
                let a = elliptic_frobenius(&fp).unwrap().a;
                let affine = count_points(&fp, 1).unwrap().affine as i64;
                assert_eq!((a - affine).rem_euclid(p as i64), 0);
            }
        }
    }

    #[test]
    fn newton_root_properties() {
        let f7 = FiniteField::new(7, 1).unwrap();
        let frob = legendre_frobenius(&f7, f7.from_int(3)).unwrap();
        let pi = unit_root_from_counts(&frob, 5).unwrap();
        let zpn = Zpn::new(7, 5).unwrap();
        let other = zpn.elem(7) * padic_inverse(pi).unwrap();
        assert_eq!((pi * other).value(), 7);
        assert_eq!(pi.value() % 7, frob.a.rem_euclid(7) as u64);
        let ss = EllipticFrobenius { p: 7, q: 7, a: 0 };
        assert_eq!(unit_root_from_counts(&ss, 3), Err(Error::NotOrdinary));
    }
}

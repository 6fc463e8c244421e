use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::truncated::{SeriesRing, TruncatedSeries};
use crate::error::{Error, Result};
use crate::padic::{inv_mod, mul_mod, split_p, PadicInt, UnramifiedElement, UnramifiedRing, Zpn};
use crate::ring::Ring;

/// The series `sum_k B(k) x^k`, `B(k) = prod_i (c_i/d)_k / (k!)^n`, for
/// upper parameters `c_1/d, ..., c_n/d` and all lower parameters 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HypergeomSpec {
    denom: u64,
    numer: Vec<u64>,
}

impl HypergeomSpec {
    /// Parameters `i/(n+1)`, `i = 1..n`.
    pub fn dwork(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Ok(HypergeomSpec {
            denom: n as u64 + 1,
            numer: (1..=n as u64).collect(),
        })
    }

    /// Gauss `2F1(1/2, 1/2; 1; x)`.
    pub fn legendre() -> Self {
        HypergeomSpec {
            denom: 2,
            numer: vec![1, 1],
        }
    }

    /// Upper parameters `c_i/d` with `0 < c_i < d`.
    pub fn new(denom: u64, numer: Vec<u64>) -> Result<Self> {
        if denom < 2 || numer.is_empty() || numer.iter().any(|&c| c == 0 || c >= denom) {
            return Err(Error::InvalidParameter(
                "parameters must lie strictly between 0 and 1".into(),
            ));
        }
        Ok(HypergeomSpec { denom, numer })
    }

    /// Number of upper parameters, which is also the operator order.
    pub fn n(&self) -> usize {
        self.numer.len()
    }

    pub fn denominator(&self) -> u64 {
        self.denom
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numer
    }

    pub fn params(&self) -> Vec<BigRational> {
        self.numer
            .iter()
            .map(|&c| BigRational::new(c.into(), self.denom.into()))
            .collect()
    }

    /// Stable under `a -> 1 - a` as a multiset.
    pub fn is_symmetric(&self) -> bool {
        let mut a = self.numer.clone();
        let mut b: Vec<u64> = self.numer.iter().map(|c| self.denom - c).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    /// `B(k)`, computed and cached over `Q`.
    pub fn coefficient(&self, k: usize) -> BigRational {
        self.coefficients(k + 1)[k].clone()
    }

    /// `B(0), ..., B(len - 1)`, shared through a process-wide cache.
    pub fn coefficients(&self, len: usize) -> Arc<Vec<BigRational>> {
        static CACHE: OnceLock<Mutex<HashMap<HypergeomSpec, Arc<Vec<BigRational>>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("coefficient cache poisoned");
        let entry = guard
            .entry(self.clone())
            .or_insert_with(|| Arc::new(vec![BigRational::one()]));
        if entry.len() < len {
            let mut v = (**entry).clone();
            v.reserve(len - v.len());
            while v.len() < len {
                let k = v.len() as u64;
                let next = &v[v.len() - 1] * self.ratio(k);
                v.push(next);
            }
            *entry = Arc::new(v);
        }
        Arc::clone(entry)
    }

    /// `B(k) / B(k-1)`.
    fn ratio(&self, k: u64) -> BigRational {
        let mut num = BigInt::one();
        for &c in &self.numer {
            num *= BigInt::from(self.denom * (k - 1) + c);
        }
        let den = BigInt::from(self.denom * k).pow(self.numer.len() as u32);
        BigRational::new(num, den)
    }

    /// `B(0), ..., B(len - 1)` in `Z/p^N` without leaving machine integers.
    ///
    /// `B(k)` is tracked as `p^v u` with `u` a unit; since every `B(k)` is
    /// `p`-integral, `v` never goes negative and `u` is exact mod `p^N`.
    pub fn coefficients_mod(&self, len: usize, ring: &Zpn) -> Result<Vec<PadicInt>> {
        let mut out = Vec::with_capacity(len);
        self.stream_mod(len as u64, ring, |_, b| out.push(b))?;
        Ok(out)
    }

    /// Feed `(k, B(k) mod p^N)` for `k < len` to `sink`.
    pub fn stream_mod(&self, len: u64, ring: &Zpn, mut sink: impl FnMut(u64, PadicInt)) -> Result<()> {
        let p = ring.p();
        if self.denom % p == 0 {
            return Err(Error::DenominatorNotInvertible {
                denominator: self.denom.to_string(),
            });
        }
        let m = ring.modulus();
        let prec = ring.precision();
        let n = self.numer.len() as u32;
        let dinv_n = pow_mod(inv_mod(self.denom % m, m).expect("coprime"), n as u64, m);
        let p_pows: Vec<u64> = (0..prec).map(|e| p.pow(e)).collect();
        let mut v: i64 = 0;
        let mut u: u64 = 1 % m;
        if len > 0 {
            sink(0, ring.one());
        }
        const BLOCK: u64 = 4096;
        let mut k = 1u64;
        let mut units = Vec::with_capacity(BLOCK as usize);
        let mut vals = Vec::with_capacity(BLOCK as usize);
        let mut prefix = Vec::with_capacity(BLOCK as usize);
        while k < len {
            let end = (k + BLOCK).min(len);
            units.clear();
            vals.clear();
            // Unit parts of k for batch inversion.
            for j in k..end {
                let (e, w) = split_p(j, p);
                vals.push(e);
                units.push(w % m);
            }
            prefix.clear();
            let mut acc = 1 % m;
            for &w in &units {
                acc = mul_mod(acc, w, m);
                prefix.push(acc);
            }
            let mut inv_acc = inv_mod(acc, m).expect("unit");
            let mut invs = vec![0u64; units.len()];
            for idx in (0..units.len()).rev() {
                let before = if idx == 0 { 1 % m } else { prefix[idx - 1] };
                invs[idx] = mul_mod(inv_acc, before, m);
                inv_acc = mul_mod(inv_acc, units[idx], m);
            }
            for (idx, j) in (k..end).enumerate() {
                for &c in &self.numer {
                    let (e, w) = split_p(self.denom * (j - 1) + c, p);
                    v += e as i64;
                    u = mul_mod(u, w % m, m);
                }
                v -= (n * vals[idx]) as i64;
                debug_assert!(v >= 0);
                let kinv = invs[idx];
                let kinv_n = pow_mod(kinv, n as u64, m);
                u = mul_mod(mul_mod(u, kinv_n, m), dinv_n, m);
                let value = if (v as u64) < prec as u64 {
                    mul_mod(u, p_pows[v as usize], m)
                } else {
                    0
                };
                sink(j, ring.from_u64(value));
            }
            k = end;
        }
        Ok(())
    }
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// `B(r)` for the Dwork parameters `i/(n+1)`.
pub fn hyperg_coeff(n: usize, r: usize) -> Result<BigRational> {
    Ok(HypergeomSpec::dwork(n)?.coefficient(r))
}

/// `F^{<s}`, the series truncated below degree `s`, mapped into `ring`.
pub fn truncated_f<R: Ring>(spec: &HypergeomSpec, s: usize, ring: &R) -> Result<TruncatedSeries<R::Elem>> {
    let coeffs = spec.coefficients(s);
    let c = coeffs[..s]
        .iter()
        .map(|b| ring.from_rational(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries { coeffs: c })
}

/// Apply `theta^n - x prod_i (theta + a_i)` to a series of order `D`.
///
/// The result keeps order `D`: its coefficient of `x^k` only involves the
/// input coefficients of index `k` and `k - 1`.
pub fn apply_pf_operator<R: Ring>(
    ring: &R,
    series: &TruncatedSeries<R::Elem>,
    spec: &HypergeomSpec,
) -> Result<TruncatedSeries<R::Elem>> {
    let d = series.order();
    if d < 2 {
        return Err(Error::InsufficientDegree { have: d, need: 2 });
    }
    let params = spec
        .params()
        .iter()
        .map(|a| ring.from_rational(a))
        .collect::<Result<Vec<_>>>()?;
    let n = spec.n() as u64;
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let kk = ring.from_i64(k as i64);
        let mut term = ring.mul(&ring.pow(&kk, n), &series.coeffs[k]);
        if k >= 1 {
            let km1 = ring.from_i64(k as i64 - 1);
            let mut prod = series.coeffs[k - 1].clone();
            for a in &params {
                prod = ring.mul(&prod, &ring.add(&km1, a));
            }
            term = ring.sub(&term, &prod);
        }
        out.push(term);
    }
    Ok(TruncatedSeries { coeffs: out })
}

/// Sums `S_j[b] = sum_{k < p^j, k = b mod L} B(k)` modulo `p^P`.
///
/// When `L` is a multiple of `q - 1`, a nonzero Teichmueller point `z`
/// satisfies `F^{<p^j}(z) = sum_b S_j[b] z^b`.
#[derive(Clone, Debug)]
pub struct ResidueTable {
    p: u64,
    prec: u32,
    period: usize,
    /// `levels[j]` holds the sums for `k < p^j`.
    levels: Vec<Vec<PadicInt>>,
}

impl ResidueTable {
    pub fn build(spec: &HypergeomSpec, p: u64, prec: u32, period: usize) -> Result<Self> {
        let ring = Zpn::new(p, prec)?;
        let len = p.checked_pow(prec).ok_or(Error::PrecisionOverflow { p, prec })?;
        let mut current = vec![ring.zero(); period];
        let mut levels = Vec::with_capacity(prec as usize + 1);
        let mut next_level = 1u64;
        spec.stream_mod(len, &ring, |k, b| {
            if k == next_level {
                levels.push(current.clone());
                next_level *= p;
            }
            let slot = &mut current[(k % period as u64) as usize];
            *slot = *slot + b;
        })?;
        levels.push(current);
        Ok(ResidueTable {
            p,
            prec,
            period,
            levels,
        })
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `F^{<p^j}(z)` in `ring`, for `z` a nonzero Teichmueller point with
    /// `(q - 1) | L`. Requires `ring.precision() <= P` and `j <= P`.
    pub fn eval(&self, ring: &UnramifiedRing, j: u32, z: &UnramifiedElement) -> UnramifiedElement {
        assert!(j <= self.prec && ring.precision() <= self.prec);
        let prec = ring.precision();
        let sums = &self.levels[j as usize];
        let mut acc = ring.zero();
        let mut zb = ring.one();
        for s in sums {
            let c = ring.constant(s.truncate(prec));
            acc = ring.add(&acc, &ring.mul(&c, &zb));
            zb = ring.mul(&zb, z);
        }
        acc
    }
}

/// `F_i(z) / F(z)` for `F_i` the `i`-th derivative, evaluated on the
/// truncations `F^{<p^{N-1}}, F^{<p^N}, F^{<p^{N+1}}`.
///
/// Returns the value from the highest truncation together with the largest
/// precision `N' <= N` at which consecutive levels agree.
pub fn derivative_ratio_eval(
    spec: &HypergeomSpec,
    i: usize,
    ring: &UnramifiedRing,
    z: &UnramifiedElement,
) -> Result<(UnramifiedElement, u32)> {
    let p = ring.p();
    let prec = ring.precision();
    let field = ring.residue_field();
    let lam = ring.reduce(z);
    if lam.0 == 0 || lam == field.one() {
        return Err(Error::SingularParameter);
    }
    let residue = Zpn::new(p, 1)?;
    let hasse = spec.coefficients_mod(p as usize, &residue)?;
    let mut h = field.zero();
    for c in hasse.iter().rev() {
        h = field.add(&field.mul(&h, &lam), &field.from_int(c.value() as i64));
    }
    if h.0 == 0 {
        return Err(Error::NotOrdinary);
    }
    let bound = |e: u32| -> Result<usize> {
        p.checked_pow(e)
            .map(|v| v as usize)
            .ok_or(Error::PrecisionOverflow { p, prec: e })
    };
    let top = bound(prec + 1)?;
    let coeffs = spec.coefficients_mod(top + i, ring.zpn())?;
    let levels = [bound(prec - 1)?, bound(prec)?, top];
    let values = levels
        .iter()
        .map(|&s| {
            let f = eval_derivative(ring, &coeffs, 0, s, z);
            let fi = eval_derivative(ring, &coeffs, i, s, z);
            let inv = ring.inv(&f).ok_or(Error::NonUnit { p })?;
            Ok(ring.mul(&fi, &inv))
        })
        .collect::<Result<Vec<_>>>()?;
    let agree = |a: &UnramifiedElement, b: &UnramifiedElement| -> u32 {
        let diff = ring.sub(a, b);
        diff.0.iter().map(|c| c.valuation()).min().unwrap_or(prec)
    };
    let stable = agree(&values[1], &values[2]).min(prec);
    Ok((values[2].clone(), stable))
}

/// `(d/dx)^i F^{<s}` at `z`, using the coefficients of `F`.
fn eval_derivative(
    ring: &UnramifiedRing,
    coeffs: &[PadicInt],
    i: usize,
    s: usize,
    z: &UnramifiedElement,
) -> UnramifiedElement {
    let zpn = ring.zpn();
    let mut acc = ring.zero();
    for k in (i..s).rev() {
        let mut falling = zpn.one();
        for j in 0..i {
            falling = falling * zpn.from_u64((k - j) as u64);
        }
        let c = ring.constant(coeffs[k] * falling);
        acc = ring.add(&ring.mul(&acc, z), &c);
    }
    acc
}

/// `F^{<s}` as a series of order `s` over `Q`.
pub fn series_over_q(spec: &HypergeomSpec, s: usize) -> TruncatedSeries<BigRational> {
    TruncatedSeries {
        coeffs: spec.coefficients(s)[..s].to_vec(),
    }
}

/// `true` when every coefficient of the series vanishes.
pub fn is_annihilated<R: Ring>(ring: &R, series: &TruncatedSeries<R::Elem>, spec: &HypergeomSpec) -> Result<bool> {
    let out = apply_pf_operator(ring, series, spec)?;
    let s = SeriesRing::new(ring.clone(), out.order());
    Ok(s.is_zero(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::FiniteField;
    use crate::ring::Rationals;
    use num_integer::Integer;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn factorial(n: u64) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
    }

    #[test]
    fn first_coefficients() {
        assert_eq!(hyperg_coeff(2, 0).unwrap(), BigRational::one());
        assert_eq!(hyperg_coeff(2, 1).unwrap(), BigRational::new(2.into(), 9.into()));
    }

    #[test]
    fn multinomial_identity() {
        for n in 2..=5u64 {
            let spec = HypergeomSpec::dwork(n as usize).unwrap();
            for r in 0..=50u64 {
                let scaled = spec.coefficient(r as usize)
                    * BigRational::from_integer(BigInt::from(n + 1).pow(((n + 1) * r) as u32));
                let expected = factorial((n + 1) * r) / factorial(r).pow((n + 1) as u32);
                assert!(scaled.is_integer());
                assert_eq!(scaled.to_integer(), expected, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn hasse_polynomial_for_cubic_mod_7() {
        let f7 = Zpn::new(7, 1).unwrap();
        let spec = HypergeomSpec::dwork(2).unwrap();
        let h = truncated_f(&spec, 7, &f7).unwrap();
        let vals: Vec<u64> = h.coeffs.iter().map(|c| c.value()).collect();
        assert_eq!(vals, vec![1, 1, 6, 0, 0, 0, 0]);
        assert_eq!(truncated_f(&spec, 1, &f7).unwrap().coeffs.len(), 1);
    }

    #[test]
    fn non_invertible_denominator() {
        let z9 = Zpn::new(3, 2).unwrap();
        let spec = HypergeomSpec::dwork(2).unwrap();
        assert!(matches!(
            truncated_f(&spec, 3, &z9),
            Err(Error::DenominatorNotInvertible { .. })
        ));
    }

    #[test]
    fn streaming_matches_rational_reduction() {
        for (n, p, prec) in [(2usize, 7u64, 3u32), (3, 5, 4), (4, 7, 2), (2, 5, 5)] {
            let spec = HypergeomSpec::dwork(n).unwrap();
            let ring = Zpn::new(p, prec).unwrap();
            let len = 400;
            let streamed = spec.coefficients_mod(len, &ring).unwrap();
            let exact = truncated_f(&spec, len, &ring).unwrap();
            assert_eq!(streamed, exact.coeffs, "n={n} p={p}");
        }
        let leg = HypergeomSpec::legendre();
        let ring = Zpn::new(5, 3).unwrap();
        assert_eq!(
            leg.coefficients_mod(300, &ring).unwrap(),
            truncated_f(&leg, 300, &ring).unwrap().coeffs
        );
    }

    #[test]
    fn operator_annihilates_solution() {
        for n in 2..=5 {
            let spec = HypergeomSpec::dwork(n).unwrap();
            let f = series_over_q(&spec, 30);
            assert!(is_annihilated(&Rationals, &f, &spec).unwrap());
        }
        let leg = HypergeomSpec::legendre();
        assert!(is_annihilated(&Rationals, &series_over_q(&leg, 31), &leg).unwrap());
        // Gauss series coefficients are binomial(2k, k)^2 / 16^k.
        for k in 0..10u64 {
            let c = factorial(2 * k) / (factorial(k) * factorial(k));
            assert_eq!(
                leg.coefficient(k as usize),
                BigRational::new(&c * &c, BigInt::from(16).pow(k as u32))
            );
        }
    }

    #[test]
    fn operator_on_constant() {
        let spec = HypergeomSpec::dwork(2).unwrap();
        let s = SeriesRing::new(Rationals, 4);
        let one = s.one();
        let out = apply_pf_operator(&Rationals, &one, &spec).unwrap();
        assert_eq!(out.coeffs[0], BigRational::zero());
        assert_eq!(out.coeffs[1], BigRational::new((-2).into(), 9.into()));
        assert!(out.coeffs[2..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn coefficient_recurrence() {
        for n in 2..=5 {
            let spec = HypergeomSpec::dwork(n).unwrap();
            let params = spec.params();
            for r in 1..=50usize {
                let rr = BigRational::from_integer(r.into());
                let lhs = spec.coefficient(r) * rr.pow(n as i32);
                let mut rhs = spec.coefficient(r - 1);
                for a in &params {
                    rhs *= &rr - BigRational::one() + a;
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn residue_table_matches_direct_evaluation() {
        let spec = HypergeomSpec::dwork(2).unwrap();
        let p = 5;
        let table = ResidueTable::build(&spec, p, 3, (p * p - 1) as usize).unwrap();
        let w = UnramifiedRing::new(p, 2, 3).unwrap();
        let coeffs = spec.coefficients_mod(125, w.zpn()).unwrap();
        let field: FiniteField = w.residue_field().clone();
        for a in field.elements().skip(1) {
            let z = w.teichmueller(a);
            for j in 0..=3u32 {
                let s = p.pow(j) as usize;
                let direct = eval_derivative(&w, &coeffs, 0, s, &z);
                assert_eq!(table.eval(&w, j, &z), direct);
            }
        }
    }

    #[test]
    fn derivative_ratio_stabilizes() {
        let spec = HypergeomSpec::dwork(2).unwrap();
        let w = UnramifiedRing::new(7, 1, 3).unwrap();
        let z = w.teichmueller(w.residue_field().from_int(6));
        let (v0, _) = derivative_ratio_eval(&spec, 0, &w, &z).unwrap();
        assert_eq!(v0, w.one());
        let (_, stable) = derivative_ratio_eval(&spec, 1, &w, &z).unwrap();
        assert_eq!(stable, 3);
        // Mod 5 the Hasse polynomial is 1 + 3x, vanishing at 3.
        let w5 = UnramifiedRing::new(5, 1, 2).unwrap();
        let bad = w5.teichmueller(w5.residue_field().from_int(3));
        assert_eq!(derivative_ratio_eval(&spec, 1, &w5, &bad), Err(Error::NotOrdinary));
        let one = w.one();
        assert_eq!(derivative_ratio_eval(&spec, 1, &w, &one), Err(Error::SingularParameter));
    }

    proptest! {
        #[test]
        fn shifted_coefficients_factor_mod_p(n in 2usize..5, pi in 0usize..4) {
            let p = [5u64, 7, 11, 13][pi];
            prop_assume!((n as u64 + 1).gcd(&p) == 1);
            let spec = HypergeomSpec::dwork(n).unwrap();
            let ring = Zpn::new(p, 1).unwrap();
            let b = spec.coefficients_mod(2 * p as usize, &ring).unwrap();
            for c in 0..p as usize {
                prop_assert_eq!(b[c + p as usize], b[c] * b[1]);
            }
        }
    }
}

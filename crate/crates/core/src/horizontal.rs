//! The horizontal section `u` built from a solution `g` of
//! `L = theta^n - lambda prod (theta + a_i)`, checked in the differential
//! module spanned by `eta, theta eta, ..., theta^{n-1} eta`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{Rationals, Ring};
use crate::series::{HypergeomSpec, SeriesRing, TruncatedSeries};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn binom(n: i64, k: i64) -> BigRational {
    if k < 0 || n < k || n < 0 {
        BigRational::zero()
    } else {
        BigRational::from_integer(binomial(BigInt::from(n), BigInt::from(k)))
    }
}

fn sign(i: usize) -> BigRational {
    if i % 2 == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// Coefficients `b_0, ..., b_d` of `prod (x + r_i) = sum b_i x^{d-i}`.
pub fn elementary_coefficients(roots: &[BigRational]) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    for r in roots {
        let mut next = b.clone();
        next.push(BigRational::zero());
        for (i, bi) in b.iter().enumerate() {
            next[i + 1] += bi * r;
        }
        b = next;
    }
    b
}

fn b_at(b: &[BigRational], k: i64) -> BigRational {
    if k < 0 {
        BigRational::zero()
    } else {
        b.get(k as usize).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// The pairs `a_i, 1 - a_i` for `i = 1..m`.
fn paired(a: &[BigRational]) -> Vec<BigRational> {
    a.iter().flat_map(|x| [x.clone(), BigRational::one() - x]).collect()
}

/// `sum_{r=0}^m (-1)^r C(m-k+r, k-1) C(m, r)`.
pub fn alternating_binomial_sum(k: i64, m: i64) -> BigRational {
    (0..=m)
        .map(|r| sign(r as usize) * binom(m - k + r, k - 1) * binom(m, r))
        .sum()
}

fn weighted_alternating(beta: &[BigRational], k: i64, top: i64, shift: i64) -> BigRational {
    (0..=top)
        .map(|i| sign(i as usize) * binom(k - 1 + shift + i, k - 1 + shift) * b_at(beta, top - i))
        .sum()
}

/// The three families of identities behind the section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaInput {
    /// The alternating sum vanishes when `k - 1 < m`.
    Ai0 { k: i64, m: i64 },
    /// `b(x) = prod (x + a_i)(x + 1 - a_i)`.
    NEven(Vec<BigRational>),
    /// `beta(x) = (x + 1/2) prod (x + a_i)(x + 1 - a_i)`.
    NOdd(Vec<BigRational>),
}

pub fn lemma_checks(input: &LemmaInput) -> bool {
    match input {
        LemmaInput::Ai0 { k, m } => alternating_binomial_sum(*k, *m).is_zero(),
        LemmaInput::NEven(a) => {
            let m = a.len() as i64;
            let b = elementary_coefficients(&paired(a));
            (1..=m).all(|k| weighted_alternating(&b, k, 2 * m - 2 * k + 1, 0).is_zero())
        }
        LemmaInput::NOdd(a) => {
            let m = a.len() as i64;
            let mut roots = paired(a);
            roots.push(BigRational::new(1.into(), 2.into()));
            let beta = elementary_coefficients(&roots);
            let first: BigRational = (0..=2 * m).map(|i| sign(i as usize) * b_at(&beta, 2 * m - i)).sum();
            let half = BigRational::new(1.into(), 2.into());
            first == rat(2) * b_at(&beta, 2 * m + 1)
                && (1..=m).all(|k| {
                    weighted_alternating(&beta, k, 2 * m - 2 * k + 1, 0)
                        == &half * weighted_alternating(&beta, k, 2 * m - 2 * k, 1)
                })
        }
    }
}

/// `c_{ij} = sum_{r=0}^j (-1)^r C(i+r-1, i-1) b_{j-r}`, for `i >= 1`.
pub fn c_coefficient(b: &[BigRational], i: usize, j: usize) -> BigRational {
    assert!(i >= 1, "c_{{ij}} needs i >= 1");
    (0..=j)
        .map(|r| sign(r) * binom((i + r - 1) as i64, i as i64 - 1) * b_at(b, j as i64 - r as i64))
        .sum()
}

/// `table[i][j] = c_{ij}` for `1 <= i <= imax`, `0 <= j <= jmax`; row 0 is empty.
pub fn c_table(b: &[BigRational], imax: usize, jmax: usize) -> Vec<Vec<BigRational>> {
    let mut t = vec![Vec::new()];
    for i in 1..=imax {
        t.push((0..=jmax).map(|j| c_coefficient(b, i, j)).collect());
    }
    t
}

/// The section `u = sum_j w_j eta^{(j)}` together with its ingredients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionCoefficients {
    pub n: usize,
    pub params: Vec<BigRational>,
    /// `prod (x + a_i) = sum b_i x^{n-i}`.
    pub b: Vec<BigRational>,
    pub m: usize,
    pub epsilon: usize,
    pub c: Vec<Vec<BigRational>>,
    pub g: TruncatedSeries<BigRational>,
    /// `w[j]` multiplies `eta^{(j)}`.
    pub w: Vec<TruncatedSeries<BigRational>>,
    /// `(i, c_{i, n+1-2i})` for the terms present only when `n` is odd.
    pub epsilon_terms: Vec<(usize, BigRational)>,
}

impl SectionCoefficients {
    pub fn order(&self) -> usize {
        self.g.order()
    }

    /// `C_i`, the coefficient of `eta^{(n-1-i)}`.
    pub fn big_c(&self, i: usize) -> &TruncatedSeries<BigRational> {
        &self.w[self.n - 1 - i]
    }
}

fn is_symmetric(a: &[BigRational]) -> bool {
    let mut x = a.to_vec();
    let mut y: Vec<_> = a.iter().map(|v| BigRational::one() - v).collect();
    x.sort();
    y.sort();
    x == y
}

/// `L g = theta^n g - lambda sum_i b_i theta^{n-i} g`.
pub fn apply_l(
    s: &SeriesRing<Rationals>,
    b: &[BigRational],
    g: &TruncatedSeries<BigRational>,
) -> TruncatedSeries<BigRational> {
    let n = b.len() - 1;
    let d = g.order();
    let mut pows = vec![g.clone()];
    for i in 1..=n {
        pows.push(s.theta(&pows[i - 1]));
    }
    let mut inner = s.with_order(Vec::new(), d);
    for (i, bi) in b.iter().enumerate() {
        inner = s.add(&inner, &s.scale(&pows[n - i], bi));
    }
    let shifted = s.truncate(&s.shift(&inner), d);
    s.sub(&pows[n], &shifted)
}

fn lambda_times(s: &SeriesRing<Rationals>, a: &TruncatedSeries<BigRational>) -> TruncatedSeries<BigRational> {
    s.truncate(&s.shift(a), a.order())
}

/// Assemble `u` from `g`.
pub fn build_section(params: &[BigRational], g: &TruncatedSeries<BigRational>) -> Result<SectionCoefficients> {
    let sc = assemble(params, g)?;
    let s = SeriesRing::new(Rationals, g.order());
    if let Some(k) = s.valuation(&apply_l(&s, &sc.b, g)) {
        return Err(Error::NotASolution { order: k });
    }
    Ok(sc)
}

fn assemble(params: &[BigRational], g: &TruncatedSeries<BigRational>) -> Result<SectionCoefficients> {
    let n = params.len();
    if n < 1 {
        return Err(Error::InvalidParameter("need at least one parameter".into()));
    }
    if !is_symmetric(params) {
        return Err(Error::ParameterSetNotSymmetric);
    }
    let d = g.order();
    let s = SeriesRing::new(Rationals, d);
    let b = elementary_coefficients(params);
    let epsilon = n % 2;
    let m = (n + epsilon) / 2;
    let c = c_table(&b, n + 1, n + 1);

    let mut gd = vec![g.clone()];
    for i in 1..n {
        gd.push(s.theta(&gd[i - 1]));
    }
    let mut w = vec![s.with_order(Vec::new(), d); n];
    let add = |w: &mut Vec<TruncatedSeries<BigRational>>, j: usize, v: TruncatedSeries<BigRational>| {
        w[j] = s.add(&w[j], &v);
    };

    let one_minus = |a: &TruncatedSeries<BigRational>| s.sub(a, &lambda_times(&s, a));
    for (i, gi) in gd.iter().enumerate() {
        add(&mut w, n - 1 - i, s.scale(&one_minus(gi), &sign(i)));
    }
    let eps_sign = sign(epsilon);
    for i in 1..m {
        for j in 1..=n - 2 * i {
            let coef = sign(i) * &c[i][j];
            add(&mut w, n - i - j, lambda_times(&s, &s.scale(&gd[i - 1], &coef)));
            let back = -(&coef * &eps_sign);
            add(&mut w, i - 1, lambda_times(&s, &s.scale(&gd[n - i - j], &back)));
        }
    }
    let mut epsilon_terms = Vec::new();
    if epsilon == 1 {
        for i in 1..m {
            let cc = c[i][n + 1 - 2 * i].clone();
            let coef = sign(i) * &cc;
            add(&mut w, i - 1, lambda_times(&s, &s.scale(&gd[i - 1], &coef)));
            epsilon_terms.push((i, cc));
        }
    }
    Ok(SectionCoefficients {
        n,
        params: params.to_vec(),
        b,
        m,
        epsilon,
        c,
        g: g.clone(),
        w,
        epsilon_terms,
    })
}

/// `theta(u)` in the basis `eta^{(j)}`, using
/// `(1 - lambda) eta^{(n)} = lambda sum_{i>=1} b_i eta^{(n-i)}`.
pub fn theta_of_section(sc: &SectionCoefficients) -> Vec<TruncatedSeries<BigRational>> {
    let n = sc.n;
    let d = sc.order();
    let s = SeriesRing::new(Rationals, d);
    let mut out: Vec<_> = sc.w.iter().map(|wj| s.theta(wj)).collect();
    for j in 1..n {
        out[j] = s.add(&out[j], &sc.w[j - 1]);
    }
    // lambda / (1 - lambda) = lambda + lambda^2 + ...
    let mut geo = vec![BigRational::one(); d];
    geo[0] = BigRational::zero();
    let top = s.mul(&sc.w[n - 1], &s.from_coeffs(geo));
    for i in 1..=n {
        out[n - i] = s.add(&out[n - i], &s.scale(&top, &sc.b[i]));
    }
    out
}

/// Result of checking `theta(u) = 0` through a truncation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HorizontalReport {
    pub n: usize,
    pub d: usize,
    /// Lowest power of `lambda` where some coordinate of `theta(u)` is nonzero.
    pub first_nonzero: Option<usize>,
}

impl HorizontalReport {
    /// `theta(u)` vanishes below this power of `lambda`.
    pub fn zero_through(&self) -> usize {
        self.first_nonzero.unwrap_or(self.d)
    }

    pub fn passed(&self) -> bool {
        self.zero_through() + self.n >= self.d
    }
}

fn report(sc: &SectionCoefficients) -> HorizontalReport {
    let s = SeriesRing::new(Rationals, sc.order());
    let first_nonzero = theta_of_section(sc).iter().filter_map(|c| s.valuation(c)).min();
    HorizontalReport {
        n: sc.n,
        d: sc.order(),
        first_nonzero,
    }
}

/// Check `theta(u) = 0` for an arbitrary `g`, without requiring `L g = 0`.
pub fn verify_section(params: &[BigRational], g: &TruncatedSeries<BigRational>) -> Result<HorizontalReport> {
    Ok(report(&assemble(params, g)?))
}

/// The Dwork parameters `i/(n+1)` and `g = F` truncated at `d`.
pub fn dwork_section(n: usize, d: usize) -> Result<SectionCoefficients> {
    let spec = HypergeomSpec::dwork(n)?;
    let g = TruncatedSeries {
        coeffs: spec.coefficients(d)[..d].to_vec(),
    };
    build_section(&spec.params(), &g)
}

pub fn verify_horizontal(n: usize, d: usize) -> Result<HorizontalReport> {
    Ok(report(&dwork_section(n, d)?))
}

/// The Legendre section `a = (1/2, 1/2)` with `g = 2F1(1/2, 1/2; 1; lambda)`.
pub fn legendre_section(d: usize) -> Result<SectionCoefficients> {
    let spec = HypergeomSpec::legendre();
    let g = TruncatedSeries {
        coeffs: spec.coefficients(d)[..d].to_vec(),
    };
    build_section(&spec.params(), &g)
}

/// For `n = 2`, `u = w_0 omega + w_1 lambda omega'` with `eta = omega`,
/// `theta eta = lambda omega'`; returns the coefficients of `omega'` and
/// `omega`, truncated to `d - 1`.
pub fn dlambda_form(sc: &SectionCoefficients) -> Result<(TruncatedSeries<BigRational>, TruncatedSeries<BigRational>)> {
    if sc.n != 2 {
        return Err(Error::InvalidParameter("the d/dlambda form is for n = 2".into()));
    }
    let d = sc.order();
    let s = SeriesRing::new(Rationals, d);
    let omega_prime = s.truncate(&s.shift(&sc.w[1]), d - 1);
    let omega = s.truncate(&sc.w[0], d - 1);
    Ok((omega_prime, omega))
}

/// `lambda (1 - lambda) F` and `-lambda (1 - lambda) F'`, through degree `d - 2`.
pub fn legendre_expected(d: usize) -> (TruncatedSeries<BigRational>, TruncatedSeries<BigRational>) {
    let s = SeriesRing::new(Rationals, d);
    let f = TruncatedSeries {
        coeffs: HypergeomSpec::legendre().coefficients(d)[..d].to_vec(),
    };
    let ll = |a: &TruncatedSeries<BigRational>| {
        let la = s.shift(a);
        let l2a = s.shift(&la);
        s.truncate(&s.sub(&s.truncate(&la, d - 1), &s.truncate(&l2a, d - 1)), d - 1)
    };
    let fp = s.derivative(&f);
    let first = ll(&s.truncate(&f, d - 1));
    let second = s.truncate(&s.neg(&ll(&fp)), d - 1);
    (first, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn random_rationals(rng: &mut ChaCha8Rng, k: usize) -> Vec<BigRational> {
        (0..k)
            .map(|_| q(rng.gen_range(-20..=20), rng.gen_range(1..=12)))
            .collect()
    }

    #[test]
    fn ai0_examples() {
        assert!(lemma_checks(&LemmaInput::Ai0 { k: 1, m: 2 }));
        for m in 1..12 {
            for k in 1..=m {
                assert!(lemma_checks(&LemmaInput::Ai0 { k, m }), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn neven_m1() {
        let a = q(2, 7);
        let b = elementary_coefficients(&paired(&[a.clone()]));
        assert_eq!(b, vec![q(1, 1), q(1, 1), &a * (q(1, 1) - &a)]);
        assert!(lemma_checks(&LemmaInput::NEven(vec![a])));
    }

    #[test]
    fn lemmas_on_random_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..100 {
            let m = 1 + trial % 4;
            let a = random_rationals(&mut rng, m);
            assert!(lemma_checks(&LemmaInput::NEven(a.clone())), "{a:?}");
            assert!(lemma_checks(&LemmaInput::NOdd(a.clone())), "{a:?}");
        }
    }

    #[test]
    fn c_table_recurrences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut b = vec![q(1, 1)];
            b.extend(random_rationals(&mut rng, 6));
            let t = c_table(&b, 14, 14);
            for i in 0..=12 {
                assert_eq!(t[i + 1][0], q(1, 1));
                for j in 0..=12 {
                    assert_eq!(&t[i + 2][j] + &t[i + 2][j + 1], t[i + 1][j + 1], "i={i} j={j}");
                }
            }
            for j in 0..=12 {
                assert_eq!(&t[1][j] + &t[1][j + 1], b_at(&b, j as i64 + 1));
            }
        }
    }

    #[test]
    fn legendre_section_matches_closed_form() {
        let d = 20;
        let sc = legendre_section(d).unwrap();
        assert!(sc.epsilon_terms.is_empty());
        assert_eq!(dlambda_form(&sc).unwrap(), legendre_expected(d));
        assert!(report(&sc).first_nonzero.is_none());
    }

    #[test]
    fn c0_is_one_minus_lambda_times_g() {
        for n in 2..=5 {
            let sc = dwork_section(n, 15).unwrap();
            let s = SeriesRing::new(Rationals, 15);
            assert_eq!(*sc.big_c(0), s.sub(&sc.g, &lambda_times(&s, &sc.g)), "n={n}");
        }
    }

    #[test]
    fn epsilon_term_only_for_odd_n() {
        assert!(dwork_section(2, 8).unwrap().epsilon_terms.is_empty());
        assert!(dwork_section(4, 8).unwrap().epsilon_terms.is_empty());
        let odd = dwork_section(3, 8).unwrap();
        assert_eq!(odd.epsilon_terms.len(), 1);
        assert!(!odd.epsilon_terms[0].1.is_zero());
    }

    #[test]
    fn horizontal_for_dwork() {
        for n in 2..=5 {
            let r = verify_horizontal(n, 25).unwrap();
            assert!(r.passed(), "n={n}: {r:?}");
        }
        assert!(verify_horizontal(2, 30).unwrap().zero_through() >= 28);
    }

    #[test]
    fn non_solution_is_caught() {
        let spec = HypergeomSpec::dwork(3).unwrap();
        let mut g = TruncatedSeries {
            coeffs: spec.coefficients(20)[..20].to_vec(),
        };
        g.coeffs[3] = BigRational::zero();
        assert!(matches!(
            build_section(&spec.params(), &g),
            Err(Error::NotASolution { order: 3 })
        ));
        let r = verify_section(&spec.params(), &g).unwrap();
        assert!(!r.passed());
        assert!(r.zero_through() <= 4);
    }

    #[test]
    fn asymmetric_parameters_rejected() {
        let g = TruncatedSeries {
            coeffs: vec![q(1, 1); 4],
        };
        assert!(matches!(
            build_section(&[q(1, 3), q(1, 3)], &g),
            Err(Error::ParameterSetNotSymmetric)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn symmetric_parameters_give_horizontal_sections(
            raw in proptest::collection::vec((1i64..9, 2i64..10), 1..3),
            odd in any::<bool>(),
        ) {
            let mut a: Vec<BigRational> = raw.iter().map(|&(x, y)| q(x, y)).collect();
            a = paired(&a);
            if odd {
                a.push(q(1, 2));
            }
            let d = 12;
            let s = SeriesRing::new(Rationals, d);
            let b = elementary_coefficients(&a);
            let mut c = vec![BigRational::one()];
            let n = a.len();
            for k in 1..d {
                let kk = q(k as i64, 1);
                let num: BigRational = a.iter().fold(BigRational::one(), |acc, ai| acc * (ai + &kk - q(1, 1)));
                let den = kk.pow(n as i32);
                let next = c[k - 1].clone() * num / den;
                c.push(next);
            }
            let g = s.from_coeffs(c);
            prop_assert!(s.valuation(&apply_l(&s, &b, &g)).is_none());
            let r = report(&build_section(&a, &g).unwrap());
            prop_assert!(r.first_nonzero.is_none(), "{:?}", r);
        }
    }
}

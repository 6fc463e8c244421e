//! One-dimensional formal group laws given by logarithms, their heights,
//! the polynomials `G_{mu,s}` and the Cartier route to the unit root.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::check::CheckOutcome;
use crate::error::{Error, Result};
use crate::geometry::{a_m_direct, configured_budget, FamilyPoint};
use crate::padic::{
    inv_mod, is_prime, mul_mod, split_p, FiniteField, FqElem, PadicInt, UnramifiedElement, UnramifiedRing, Zpn,
};
use crate::ring::{denominator_divides_power_of, is_p_integral, ExtElem, ExtRing, Rationals, Ring};
use crate::series::{BivariateRing, BivariateSeries, HypergeomSpec, Poly, PolyRing, SeriesRing, TruncatedSeries};
use crate::unit_root::{f_eval, hasse_invariant, ordinary_test, unit_root};

/// A formal group law `G = l^{-1}(l(x) + l(y))` known through total degree
/// `D - 1`, where `D` is the order of the logarithm.
#[derive(Debug)]
pub struct FormalGroupLaw<R: Ring> {
    series: SeriesRing<R>,
    log: TruncatedSeries<R::Elem>,
    exp: TruncatedSeries<R::Elem>,
    law: OnceLock<BivariateSeries<R::Elem>>,
}

/// Build the law with logarithm `log`, which must vanish at 0 and have an
/// invertible linear coefficient.
pub fn group_law_from_log<R: Ring>(ring: R, log: TruncatedSeries<R::Elem>) -> Result<FormalGroupLaw<R>> {
    let series = SeriesRing::new(ring, log.order());
    let exp = series.reversion(&log)?;
    Ok(FormalGroupLaw {
        series,
        log,
        exp,
        law: OnceLock::new(),
    })
}

/// The logarithm `sum_m c_m tau^{m+1}/(m+1)`; fails if some `m+1` is not
/// invertible in the ring.
pub fn log_from_coefficients<R: Ring>(ring: &R, c: &[R::Elem]) -> Result<TruncatedSeries<R::Elem>> {
    let mut coeffs = vec![ring.zero()];
    for (m, cm) in c.iter().enumerate() {
        let inv = ring
            .from_rational(&BigRational::new(BigInt::one(), BigInt::from(m + 1)))
            .map_err(|_| Error::NonIntegralCoefficient {
                coefficient: format!("1/{}", m + 1),
            })?;
        coeffs.push(ring.mul(cm, &inv));
    }
    Ok(TruncatedSeries { coeffs })
}

impl<R: Ring> FormalGroupLaw<R> {
    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn ring(&self) -> &R {
        self.series.base()
    }

    pub fn series_ring(&self) -> &SeriesRing<R> {
        &self.series
    }

    pub fn log(&self) -> &TruncatedSeries<R::Elem> {
        &self.log
    }

    pub fn exp(&self) -> &TruncatedSeries<R::Elem> {
        &self.exp
    }

    pub fn bivariate_ring(&self) -> BivariateRing<R> {
        BivariateRing::new(self.ring().clone(), self.order())
    }

    /// `G(x, y)`, computed on first use.
    pub fn law(&self) -> &BivariateSeries<R::Elem> {
        self.law.get_or_init(|| {
            let b = self.bivariate_ring();
            let sum = b.add(&b.from_x(&self.log), &b.from_y(&self.log));
            b.compose(&self.exp, &sum)
        })
    }

    /// `[k](tau) = l^{-1}(k l(tau))`.
    pub fn multiply(&self, k: i64) -> TruncatedSeries<R::Elem> {
        let s = &self.series;
        let scaled = s.scale(&self.log, &self.ring().from_i64(k));
        s.compose(&self.exp, &scaled).expect("logarithm vanishes at 0")
    }

    /// Unit, commutativity, associativity and `l(G) = l(x) + l(y)`.
    pub fn check_axioms(&self) -> Vec<CheckOutcome> {
        let b = self.bivariate_ring();
        let base = self.ring();
        let g = self.law();
        let d = self.order();

        let unit = (0..d).all(|i| {
            let want = if i == 1 { base.one() } else { base.zero() };
            b.coefficient(g, i, 0) == want && b.coefficient(g, 0, i) == want
        });
        let comm = b.swap(g) == *g;
        let lhs = b.compose(&self.log, g);
        let rhs = b.add(&b.from_x(&self.log), &b.from_y(&self.log));
        let logarithm = b.sub(&lhs, &rhs).rows.iter().flatten().all(|c| base.is_zero(c));

        let s = &self.series;
        let lin = |k: i64| s.scale(&s.variable(), &base.from_i64(k));
        let assoc = [(1, 2, 3), (2, -1, 5), (-3, 4, 1)].iter().all(|&(u, v, w)| {
            let (u, v, w) = (lin(u), lin(v), lin(w));
            let left = b.substitute(g, &b.substitute(g, &u, &v), &w);
            let right = b.substitute(g, &u, &b.substitute(g, &v, &w));
            left == right
        });
        vec![
            CheckOutcome::new("unit", unit, format!("degree < {d}")),
            CheckOutcome::new("commutativity", comm, format!("degree < {d}")),
            CheckOutcome::new("associativity", assoc, "three scalar lines".to_string()),
            CheckOutcome::new("logarithm", logarithm, format!("degree < {d}")),
        ]
    }
}

/// The logarithm of `G_t` over `Q[t]`: `sum_m A_m(t) tau^{m+1}/(m+1)`.
pub fn dwork_log(n: usize, d: usize) -> Result<TruncatedSeries<Poly<BigRational>>> {
    let ring = PolyRing::new(Rationals);
    let c: Vec<_> = (0..d.saturating_sub(1))
        .map(|m| {
            let a = a_m_direct(n, m);
            ring.from_coeffs(a.0.into_iter().map(BigRational::from_integer).collect())
        })
        .collect();
    log_from_coefficients(&ring, &c)
}

/// The logarithm of `G_t` at a specific parameter value `t` in `ring`.
pub fn dwork_log_at<R: Ring>(n: usize, d: usize, ring: &R, t: &R::Elem) -> Result<TruncatedSeries<R::Elem>> {
    let c: Vec<_> = (0..d.saturating_sub(1))
        .map(|m| {
            let a = a_m_direct(n, m);
            a.0.iter()
                .rev()
                .fold(ring.zero(), |acc, c| ring.add(&ring.mul(&acc, t), &ring.from_bigint(c)))
        })
        .collect();
    log_from_coefficients(ring, &c)
}

/// The law `G_t` over `Q[t]` to total degree `d - 1`, with a scan that all
/// coefficient denominators are powers of `n + 1`.
pub fn dwork_law_integrality(n: usize, d: usize) -> Result<CheckOutcome> {
    let law = group_law_from_log(PolyRing::new(Rationals), dwork_log(n, d)?)?;
    let mut bad = None;
    'scan: for (i, row) in law.law().rows.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if let Some(q) = c.0.iter().find(|q| !denominator_divides_power_of(q, n as u64 + 1)) {
                bad = Some(format!("x^{i} y^{j}: {q}"));
                break 'scan;
            }
        }
    }
    Ok(CheckOutcome::new(
        format!("dwork_law_integral_n{n}"),
        bad.is_none(),
        bad.unwrap_or_else(|| format!("denominators are powers of {} below degree {d}", n + 1)),
    ))
}

/// Height of a formal group over `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Height {
    Finite(u32),
    /// No term of `[p]` survives through degree `p^h`.
    AboveCutoff(u32),
}

/// Height from `[p](tau)` computed over a characteristic-0 lift and reduced
/// with `reduce`.
pub fn p_series_height<R: Ring>(
    law: &FormalGroupLaw<R>,
    p: u64,
    h_max: u32,
    reduce: impl Fn(&R::Elem) -> Result<FqElem>,
) -> Result<Height> {
    let need = p.pow(h_max) as usize + 1;
    if law.order() < need {
        return Err(Error::InsufficientDegree {
            have: law.order(),
            need,
        });
    }
    let series = law.multiply(p as i64);
    leading_height(&series.coeffs[..need], p, h_max, |c| Ok(reduce(c)?.0 != 0))
}

fn leading_height<T>(coeffs: &[T], p: u64, h_max: u32, nonzero: impl Fn(&T) -> Result<bool>) -> Result<Height> {
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        if nonzero(c)? {
            let mut h = 0;
            let mut v = k as u64;
            while v % p == 0 {
                v /= p;
                h += 1;
            }
            return if v == 1 {
                Ok(Height::Finite(h))
            } else {
                Err(Error::ConsistencyFailure(format!("[p] has leading degree {k}")))
            };
        }
    }
    Ok(Height::AboveCutoff(h_max))
}

/// `[p](tau)` over `F_q` by repeated substitution `[k] = G([k-1], tau)`.
pub fn p_series_recursive(field: &FiniteField, law: &BivariateSeries<FqElem>, p: u64) -> TruncatedSeries<FqElem> {
    let b = BivariateRing::new(field.clone(), law.order());
    let s = SeriesRing::new(field.clone(), law.order());
    let tau = s.variable();
    let mut acc = tau.clone();
    for _ in 1..p {
        acc = b.substitute(law, &acc, &tau);
    }
    acc
}

/// `Q[x]/(M)` for the integer lift `M` of the defining polynomial of `field`.
pub fn lift_ring(field: &FiniteField) -> ExtRing<Rationals> {
    let modulus = field
        .modulus()
        .iter()
        .map(|&c| BigRational::from_integer(BigInt::from(c)))
        .collect();
    ExtRing::new(Rationals, modulus)
}

/// Lift of an element of `F_q` into [`lift_ring`].
pub fn lift_elem(ring: &ExtRing<Rationals>, field: &FiniteField, a: FqElem) -> ExtElem<BigRational> {
    let c = field
        .coefficients(a)
        .into_iter()
        .map(|c| BigRational::from_integer(BigInt::from(c)))
        .collect();
    ring.reduce(c)
}

/// Reduction of a `p`-integral element of [`lift_ring`] to `F_q`.
pub fn reduce_lift(field: &FiniteField, a: &ExtElem<BigRational>) -> Result<FqElem> {
    let zp = Zpn::new(field.p(), 1)?;
    let c =
        a.0.iter()
            .map(|q| {
                zp.from_rational(q)
                    .map(|v| v.value())
                    .map_err(|_| Error::NonIntegralCoefficient {
                        coefficient: q.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
    Ok(field.from_coefficients(&c))
}

/// `G_{t^}` over the lift of `F_q`, to total degree `d - 1`.
pub fn fiber_law(fp: &FamilyPoint, d: usize) -> Result<FormalGroupLaw<ExtRing<Rationals>>> {
    let ring = lift_ring(fp.field());
    let t = lift_elem(&ring, fp.field(), fp.t());
    let log = dwork_log_at(fp.n(), d, &ring, &t)?;
    group_law_from_log(ring, log)
}

/// Height of the reduction of `G_t` at a fiber, up to `h_max`.
pub fn fiber_height(fp: &FamilyPoint, h_max: u32) -> Result<Height> {
    let d = fp.p().pow(h_max) as usize + 1;
    let law = fiber_law(fp, d)?;
    p_series_height(&law, fp.p(), h_max, |c| reduce_lift(fp.field(), c))
}

/// Sequence `c_0 = 1`, `c_r = c_{r-1} * prod num(r) / prod den(r)` reduced
/// mod `p^N`, for `r < len`; each `c_r` must be `p`-integral. A zero
/// numerator factor ends the sequence.
fn ratio_stream(ring: &Zpn, len: usize, step: impl Fn(u64) -> (Vec<i64>, Vec<i64>)) -> Result<Vec<PadicInt>> {
    let p = ring.p();
    let m = ring.modulus();
    let prec = ring.precision() as i64;
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return Ok(out);
    }
    out.push(ring.one());
    let mut v: i64 = 0;
    let mut u: u64 = 1 % m;
    for r in 1..len as u64 {
        let (num, den) = step(r);
        if num.contains(&0) {
            break;
        }
        for f in num {
            let (e, w) = split_p(f.unsigned_abs(), p);
            v += e as i64;
            u = mul_mod(u, w % m, m);
            if f < 0 {
                u = (m - u) % m;
            }
        }
        for f in den {
            let (e, w) = split_p(f.unsigned_abs(), p);
            v -= e as i64;
            u = mul_mod(u, inv_mod(w % m, m).expect("unit"), m);
            if f < 0 {
                u = (m - u) % m;
            }
        }
        if v < 0 {
            return Err(Error::NonIntegralCoefficient {
                coefficient: format!("term {r} has valuation {v}"),
            });
        }
        let val = if v >= prec { 0 } else { mul_mod(p.pow(v as u32), u, m) };
        out.push(ring.elem(val as i128));
    }
    out.resize(len, ring.zero());
    Ok(out)
}

/// `G_{mu,s}`, the terminating hypergeometric polynomial with upper
/// parameters `(i - mu p^s)/(n+1)`, `i = 1..n+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GPolynomial {
    pub n: usize,
    pub mu: u64,
    pub s: u32,
    pub p: u64,
    pub poly: Poly<BigRational>,
}

impl GPolynomial {
    /// `mu p^s`.
    pub fn index(&self) -> u64 {
        self.mu * self.p.pow(self.s)
    }

    /// `floor((mu p^s - 1)/(n+1))`.
    pub fn degree_bound(&self) -> usize {
        ((self.index() - 1) / (self.n as u64 + 1)) as usize
    }

    pub fn reduce(&self, ring: &Zpn) -> Result<Poly<PadicInt>> {
        let c = self
            .poly
            .0
            .iter()
            .map(|q| ring.from_rational(q))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyRing::new(ring.clone()).from_coeffs(c))
    }

    /// `(-(n+1) t)^{mu p^s - 1} G_{mu,s}(t^{-(n+1)})` as a polynomial in `t`.
    pub fn in_t(&self) -> Poly<BigRational> {
        let n1 = self.n as u64 + 1;
        let k = self.index() - 1;
        let lead = BigRational::from_integer(BigInt::from(-(n1 as i64)).pow(k as u32));
        let mut c = vec![BigRational::zero(); k as usize + 1];
        for (r, g) in self.poly.0.iter().enumerate() {
            c[(k - n1 * r as u64) as usize] = &lead * g;
        }
        PolyRing::new(Rationals).from_coeffs(c)
    }
}

fn g_step(n: usize, k: u64) -> impl Fn(u64) -> (Vec<i64>, Vec<i64>) {
    let n1 = n as i64 + 1;
    move |r| {
        let num = (1..=n1).map(|i| i - k as i64 + n1 * (r as i64 - 1)).collect();
        let mut den = vec![n1; n1 as usize];
        den.extend(std::iter::repeat(r as i64).take(n1 as usize));
        (num, den)
    }
}

pub fn g_polynomial(n: usize, mu: u64, s: u32, p: u64) -> Result<GPolynomial> {
    if mu == 0 {
        return Err(Error::InvalidParameter("mu must be positive".into()));
    }
    let n1 = n as u64 + 1;
    let k = mu * p.pow(s);
    let step = g_step(n, k);
    let deg = ((k - 1) / n1) as usize;
    let mut c = vec![BigRational::one()];
    for r in 1..=deg as u64 {
        let (num, den) = step(r);
        let num: BigInt = num.into_iter().map(BigInt::from).product();
        let den: BigInt = den.into_iter().map(BigInt::from).product();
        let next = c.last().expect("nonempty") * BigRational::new(num, den);
        c.push(next);
    }
    Ok(GPolynomial {
        n,
        mu,
        s,
        p,
        poly: PolyRing::new(Rationals).from_coeffs(c),
    })
}

/// `G_{mu,s} mod p^N` without leaving machine integers.
pub fn g_polynomial_mod(n: usize, mu: u64, s: u32, ring: &Zpn) -> Result<Poly<PadicInt>> {
    let k = mu * ring.p().pow(s);
    let deg = ((k - 1) / (n as u64 + 1)) as usize;
    let c = ratio_stream(ring, deg + 1, g_step(n, k))?;
    Ok(PolyRing::new(ring.clone()).from_coeffs(c))
}

/// Nonzero coefficients of `A_m(t)` mod `p^N` as `(r, a_r)` with `a_r` the
/// coefficient of `t^{m - (n+1) r}`.
pub fn a_m_mod(n: usize, m: u64, ring: &Zpn) -> Result<Vec<PadicInt>> {
    let n1 = n as i64 + 1;
    let len = (m / n1 as u64) as usize + 1;
    let mut c = ratio_stream(ring, len, |r| {
        let top = m as i64 - n1 * (r as i64 - 1);
        let num = (0..n1).map(|i| top - i).collect();
        let mut den = vec![r as i64; n1 as usize];
        den.extend(std::iter::repeat(-n1).take(n1 as usize));
        (num, den)
    })?;
    let lead = ring.elem(-(n1 as i128)).pow(m);
    for x in &mut c {
        *x = ring.mul(x, &lead);
    }
    Ok(c)
}

fn validate(n: usize, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if (n as u64 + 1) % p == 0 {
        return Err(Error::BadCharacteristic {
            p,
            n_plus_one: n as u64 + 1,
        });
    }
    Ok(())
}

fn poly_eq<R: Ring>(ring: &PolyRing<R>, a: &Poly<R::Elem>, b: &Poly<R::Elem>) -> bool {
    ring.is_zero(&ring.sub(a, b))
}

fn f_trunc(spec: &HypergeomSpec, len: u64, ring: &Zpn) -> Result<Poly<PadicInt>> {
    Ok(PolyRing::new(ring.clone()).from_coeffs(spec.coefficients_mod(len as usize, ring)?))
}

/// `F_{m,s+1}(x) G_{mu,s}(x^p) = F_{m,s}(x^p) G_{mu,s+1}(x) mod p^{s+1}`.
pub fn two_hypergeometric_check(n: usize, p: u64, m: u64, mu: u64, s: u32) -> Result<CheckOutcome> {
    validate(n, p)?;
    let zp = Zpn::new(p, s + 1)?;
    let ring = PolyRing::new(zp.clone());
    let spec = HypergeomSpec::dwork(n)?;
    let f_hi = f_trunc(&spec, m * p.pow(s + 1), &zp)?;
    let f_lo = f_trunc(&spec, m * p.pow(s), &zp)?;
    let g_lo = g_polynomial_mod(n, mu, s, &zp)?;
    let g_hi = g_polynomial_mod(n, mu, s + 1, &zp)?;
    let lhs = ring.mul(&f_hi, &ring.dilate(&g_lo, p as usize));
    let rhs = ring.mul(&ring.dilate(&f_lo, p as usize), &g_hi);
    Ok(CheckOutcome::new(
        format!("two_hypergeometric n={n} p={p} m={m} mu={mu} s={s}"),
        poly_eq(&ring, &lhs, &rhs),
        format!("exact mod {p}^{}", s + 1),
    ))
}

/// `F_{m,s+1}(x) F(x^p) = F_{m,s}(x^p) F(x) mod (p^{s+1}, x^{p^{s+2}})`.
pub fn dwork_f_congruence(n: usize, p: u64, m: u64, s: u32) -> Result<CheckOutcome> {
    validate(n, p)?;
    let zp = Zpn::new(p, s + 1)?;
    let ring = PolyRing::new(zp.clone());
    let spec = HypergeomSpec::dwork(n)?;
    let len = p.pow(s + 2).max(m * p.pow(s + 1) + 1) as usize;
    let full = f_trunc(&spec, len as u64, &zp)?;
    let f_hi = f_trunc(&spec, m * p.pow(s + 1), &zp)?;
    let f_lo = f_trunc(&spec, m * p.pow(s), &zp)?;
    let lhs = ring.mul_trunc(&f_hi, &ring.dilate(&full, p as usize), len);
    let rhs = ring.mul_trunc(&ring.dilate(&f_lo, p as usize), &full, len);
    Ok(CheckOutcome::new(
        format!("dwork_f_congruence n={n} p={p} m={m} s={s}"),
        poly_eq(&ring, &lhs, &rhs),
        format!("mod {p}^{} through degree {}", s + 1, len - 1),
    ))
}

/// `G_{mu,1} = H mod p` for `1 <= mu <= n+1`.
pub fn g_hasse_check(n: usize, p: u64, mu: u64) -> Result<CheckOutcome> {
    validate(n, p)?;
    let zp = Zpn::new(p, 1)?;
    let ring = PolyRing::new(zp.clone());
    let h = f_trunc(&HypergeomSpec::dwork(n)?, p, &zp)?;
    let g = g_polynomial_mod(n, mu, 1, &zp)?;
    Ok(CheckOutcome::new(
        format!("g_equals_hasse n={n} p={p} mu={mu}"),
        poly_eq(&ring, &g, &h),
        format!("mod {p}"),
    ))
}

/// `G_{mu,s+1} = G_{mu,0}(x^{p^{s+1}}) prod_{i<=s} H(x^{p^i}) mod p`.
pub fn g_frobenius_product_check(n: usize, p: u64, mu: u64, s: u32) -> Result<CheckOutcome> {
    validate(n, p)?;
    let zp = Zpn::new(p, 1)?;
    let ring = PolyRing::new(zp.clone());
    let h = f_trunc(&HypergeomSpec::dwork(n)?, p, &zp)?;
    let mut rhs = ring.dilate(&g_polynomial_mod(n, mu, 0, &zp)?, p.pow(s + 1) as usize);
    for i in 0..=s {
        rhs = ring.mul(&rhs, &ring.dilate(&h, p.pow(i) as usize));
    }
    let lhs = g_polynomial_mod(n, mu, s + 1, &zp)?;
    Ok(CheckOutcome::new(
        format!("g_frobenius_product n={n} p={p} mu={mu} s={s}"),
        poly_eq(&ring, &lhs, &rhs),
        format!("mod {p}"),
    ))
}

/// At every ordinary Teichmueller point of `F_{p^r}`: `G_{mu,s}` is a unit
/// there and `G_{mu,s+1}(z) / G_{mu,s}(z^p) = f(z) mod p^{s+1}`.
pub fn g_ratio_checks(n: usize, p: u64, r: usize, mu: u64, s: u32) -> Result<Vec<CheckOutcome>> {
    validate(n, p)?;
    let w = UnramifiedRing::new(p, r, s + 1)?;
    let g_lo = g_polynomial_mod(n, mu, s, w.zpn())?;
    let g_hi = g_polynomial_mod(n, mu, s + 1, w.zpn())?;
    let spec = HypergeomSpec::dwork(n)?;
    let hasse = hasse_invariant(n, p)?;
    let field = w.residue_field().clone();
    let eval = |g: &Poly<PadicInt>, z: &UnramifiedElement| {
        g.0.iter()
            .rev()
            .fold(w.zero(), |acc, c| w.add(&w.mul(&acc, z), &w.constant(*c)))
    };
    let mut points = 0;
    let mut units = true;
    let mut ratio = true;
    let mut first_bad = String::new();
    for lambda in field.elements() {
        if lambda == field.zero() || lambda == field.one() || hasse.eval(&field, lambda).0 == 0 {
            continue;
        }
        points += 1;
        let z = w.teichmueller(lambda);
        let lo = eval(&g_lo, &w.frobenius(&z));
        let hi = eval(&g_hi, &z);
        let unit = w.reduce(&lo).0 != 0 && w.reduce(&hi).0 != 0;
        units &= unit;
        if !unit {
            first_bad = format!("G not a unit at index {}", lambda.0);
            ratio = false;
            continue;
        }
        let q = w.mul(&hi, &w.inv(&lo).ok_or(Error::NonUnit { p })?);
        if q != f_eval(&spec, &w, &z)? {
            ratio = false;
            if first_bad.is_empty() {
                first_bad = format!("ratio differs from f at index {}", lambda.0);
            }
        }
    }
    let tag = format!("n={n} p={p} r={r} mu={mu} s={s}");
    let detail = if first_bad.is_empty() {
        format!("{points} ordinary points")
    } else {
        first_bad
    };
    Ok(vec![
        CheckOutcome::new(format!("g_unit {tag}"), units, detail.clone()),
        CheckOutcome::new(format!("g_ratio_is_f {tag}"), ratio, detail),
    ])
}

/// `A_{q-1} = A_{p-1}^{(q-1)/(p-1)}` and `A_{p-1} = t^{p-1} H(t^{-(n+1)})`
/// mod `p`, as polynomials in `t`, with `q = p^r`.
pub fn a_m_mod_p_checks(n: usize, p: u64, r: u32) -> Result<Vec<CheckOutcome>> {
    validate(n, p)?;
    let zp = Zpn::new(p, 1)?;
    let ring = PolyRing::new(zp.clone());
    let n1 = n as u64 + 1;
    let dense = |m: u64| -> Result<Poly<PadicInt>> {
        let sparse = a_m_mod(n, m, &zp)?;
        let mut c = vec![zp.zero(); m as usize + 1];
        for (i, a) in sparse.into_iter().enumerate() {
            c[(m - n1 * i as u64) as usize] = a;
        }
        Ok(ring.from_coeffs(c))
    };
    let q = p.pow(r);
    let a_p = dense(p - 1)?;
    let power = ring.pow(&a_p, (q - 1) / (p - 1));
    let first = poly_eq(&ring, &dense(q - 1)?, &power);

    let h = HypergeomSpec::dwork(n)?.coefficients_mod(p as usize, &zp)?;
    let mut c = vec![zp.zero(); p as usize];
    for (i, hi) in h.iter().enumerate() {
        if n1 * i as u64 <= p - 1 {
            c[(p - 1 - n1 * i as u64) as usize] = *hi;
        } else if !zp.is_zero(hi) {
            c.clear();
            break;
        }
    }
    let second = !c.is_empty() && poly_eq(&ring, &a_p, &ring.from_coeffs(c));
    Ok(vec![
        CheckOutcome::new(format!("a_q_is_power n={n} p={p} r={r}"), first, format!("mod {p}")),
        CheckOutcome::new(format!("a_p_is_hasse n={n} p={p}"), second, format!("mod {p}")),
    ])
}

/// `B(c + p) = B(c) B(1) mod p` for `0 <= c < p`, and the series form
/// `F(x) = F^{<p}(x) F(x^p) mod (p, x^{p^2})`.
pub fn b_shift_checks(n: usize, p: u64) -> Result<Vec<CheckOutcome>> {
    validate(n, p)?;
    let zp = Zpn::new(p, 1)?;
    let spec = HypergeomSpec::dwork(n)?;
    let len = (p * p) as usize;
    let b = spec.coefficients_mod(len, &zp)?;
    let coeff = (0..p as usize).all(|c| b[c + p as usize] == zp.mul(&b[c], &b[1]));
    let ring = PolyRing::new(zp.clone());
    let full = ring.from_coeffs(b.clone());
    let h = ring.from_coeffs(b[..p as usize].to_vec());
    let rhs = ring.mul_trunc(&h, &ring.dilate(&full, p as usize), len);
    let series = poly_eq(&ring, &full, &rhs);
    Ok(vec![
        CheckOutcome::new(format!("b_shift n={n} p={p}"), coeff, format!("0 <= c < {p}")),
        CheckOutcome::new(
            format!("f_factorization n={n} p={p}"),
            series,
            format!("through degree {}", len - 1),
        ),
    ])
}

/// Parameter ranges for [`congruence_suite`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteRanges {
    pub m: Vec<u64>,
    pub mu: Vec<u64>,
    pub s: Vec<u32>,
}

impl Default for SuiteRanges {
    fn default() -> Self {
        SuiteRanges {
            m: vec![1, 2],
            mu: vec![1, 2],
            s: vec![0, 1, 2],
        }
    }
}

enum Job {
    TwoHyperg(u64, u64, u32),
    DworkF(u64, u32),
    Hasse(u64),
    Product(u64, u32),
    Ratio(usize, u64, u32),
    AmModP(u32),
    BShift,
}

/// Every congruence for one `(n, p)`, in a fixed order.
pub fn congruence_suite(n: usize, p: u64, ranges: &SuiteRanges) -> Result<Vec<CheckOutcome>> {
    validate(n, p)?;
    let s_max = ranges.s.iter().copied().max().unwrap_or(0);
    let m_max = ranges.m.iter().copied().max().unwrap_or(1);
    let len = (p.pow(s_max + 2)).max(m_max * p.pow(s_max + 1)) as u128;
    let estimate = len * len;
    let budget = configured_budget();
    if estimate > budget {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    let mut jobs = Vec::new();
    for &s in &ranges.s {
        for &m in &ranges.m {
            for &mu in &ranges.mu {
                jobs.push(Job::TwoHyperg(m, mu, s));
            }
            jobs.push(Job::DworkF(m, s));
        }
        for &mu in &ranges.mu {
            jobs.push(Job::Product(mu, s));
            for r in [1, 2] {
                jobs.push(Job::Ratio(r, mu, s));
            }
        }
    }
    for mu in 1..=n as u64 + 1 {
        jobs.push(Job::Hasse(mu));
    }
    jobs.push(Job::AmModP(2));
    jobs.push(Job::BShift);
    let results: Vec<Result<Vec<CheckOutcome>>> = jobs
        .par_iter()
        .map(|job| match *job {
            Job::TwoHyperg(m, mu, s) => two_hypergeometric_check(n, p, m, mu, s).map(|c| vec![c]),
            Job::DworkF(m, s) => dwork_f_congruence(n, p, m, s).map(|c| vec![c]),
            Job::Hasse(mu) => g_hasse_check(n, p, mu).map(|c| vec![c]),
            Job::Product(mu, s) => g_frobenius_product_check(n, p, mu, s).map(|c| vec![c]),
            Job::Ratio(r, mu, s) => g_ratio_checks(n, p, r, mu, s),
            Job::AmModP(r) => a_m_mod_p_checks(n, p, r),
            Job::BShift => b_shift_checks(n, p),
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Isomorphism `h = l2^{-1}(c l1)` between two laws given by logarithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness<T> {
    pub series: TruncatedSeries<T>,
    /// `h = tau + O(tau^2)`.
    pub strict: bool,
    /// Every coefficient passed the membership test.
    pub integral: bool,
}

impl<T> IsoWitness<T> {
    pub fn holds(&self, want_strict: bool) -> bool {
        self.integral && (self.strict || !want_strict)
    }
}

pub fn strict_iso_check<R: Ring>(
    ring: &R,
    l1: &TruncatedSeries<R::Elem>,
    l2: &TruncatedSeries<R::Elem>,
    scale: Option<&R::Elem>,
    member: impl Fn(&R::Elem) -> bool,
) -> Result<IsoWitness<R::Elem>> {
    let d = l1.order().min(l2.order());
    if d < 2 {
        return Err(Error::InsufficientDegree { have: d, need: 2 });
    }
    let s = SeriesRing::new(ring.clone(), d);
    let l1 = s.truncate(l1, d);
    let l2 = s.truncate(l2, d);
    let e2 = s.reversion(&l2)?;
    let inner = match scale {
        Some(c) => s.scale(&l1, c),
        None => l1,
    };
    let h = s.compose(&e2, &inner)?;
    let strict = ring.is_one(&h.coeffs[1]);
    let integral = h.coeffs.iter().all(&member);
    Ok(IsoWitness {
        series: h,
        strict,
        integral,
    })
}

/// Logarithm with coefficient `G_{mu,s}(lambda)` at `tau^k / k` (`k = mu p^s`),
/// in the variable `u = -(n+1) t tau`, over `Q[lambda]`.
fn g_log_normalized(n: usize, p: u64, d: usize) -> Result<TruncatedSeries<Poly<BigRational>>> {
    let ring = PolyRing::new(Rationals);
    let c = (1..d as u64)
        .map(|k| Ok(g_polynomial(n, k, 0, p)?.poly))
        .collect::<Result<Vec<_>>>()?;
    log_from_coefficients(&ring, &c)
}

/// Logarithm with coefficient `F^{<k}(lambda)` at `tau^k / k` in the
/// variable `u = t tau`; each exponent `k` is counted once.
fn j_log_normalized(n: usize, d: usize) -> Result<TruncatedSeries<Poly<BigRational>>> {
    let ring = PolyRing::new(Rationals);
    let b = HypergeomSpec::dwork(n)?.coefficients(d);
    let c: Vec<_> = (1..d).map(|k| ring.from_coeffs(b[..k].to_vec())).collect();
    log_from_coefficients(&ring, &c)
}

/// The logarithm `j_t = sum_k t^{k-1} F^{<k}(lambda) tau^k / k` of `J_t` over
/// `Q[t, t^{-1}]`.
pub fn j_log_laurent(n: usize, d: usize) -> Result<TruncatedSeries<crate::ring::Laurent<BigRational>>> {
    let ring = crate::ring::LaurentRing::new(Rationals);
    let b = HypergeomSpec::dwork(n)?.coefficients(d);
    let n1 = n as i64 + 1;
    let c: Vec<_> = (1..d)
        .map(|k| {
            let k1 = k as i64 - 1;
            let mut acc = ring.zero();
            for (j, bj) in b[..k].iter().enumerate() {
                acc = ring.add(&acc, &ring.monomial(bj.clone(), k1 - n1 * j as i64));
            }
            acc
        })
        .collect();
    log_from_coefficients(&ring, &c)
}

/// The logarithm of `G_t` over `Q[t, t^{-1}]`.
pub fn g_log_laurent(n: usize, d: usize) -> Result<TruncatedSeries<crate::ring::Laurent<BigRational>>> {
    let ring = crate::ring::LaurentRing::new(Rationals);
    let c: Vec<_> = (0..d.saturating_sub(1))
        .map(|m| {
            let a = a_m_direct(n, m);
            ring.normalize(0, a.0.into_iter().map(BigRational::from_integer).collect())
        })
        .collect();
    log_from_coefficients(&ring, &c)
}

/// `J_t` against `G_t` over `Z_p[t, t^{-1}]` through degree `d - 1`.
///
/// Both logarithms become series over `Q[lambda]` after the substitutions
/// `u = t tau` and `u = -(n+1) t tau`, so the witness is
/// `h(tau) = K(t tau) / (-(n+1) t)` for `K = E_G(-(n+1) L_J(u))`, and its
/// coefficient of `tau^k` is `K_k(lambda) t^{k-1} / (-(n+1))`.
pub fn j_to_g_witness(n: usize, p: u64, d: usize) -> Result<IsoWitness<crate::ring::Laurent<BigRational>>> {
    validate(n, p)?;
    let ring = PolyRing::new(Rationals);
    let lg = g_log_normalized(n, p, d)?;
    let lj = j_log_normalized(n, d)?;
    let c = ring.constant(BigRational::from_integer(BigInt::from(-(n as i64 + 1))));
    let k = strict_iso_check(&ring, &lj, &lg, Some(&c), |_| true)?.series;
    let laurent = crate::ring::LaurentRing::new(Rationals);
    let n1 = n as i64 + 1;
    let unit = BigRational::new(BigInt::one(), BigInt::from(-n1));
    let coeffs: Vec<_> = k
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, kk)| {
            let mut acc = laurent.zero();
            for (j, c) in kk.0.iter().enumerate() {
                acc = laurent.add(&acc, &laurent.monomial(c * &unit, idx as i64 - 1 - n1 * j as i64));
            }
            acc
        })
        .collect();
    let integral = coeffs.iter().all(|l| l.coeffs.iter().all(|q| is_p_integral(q, p)));
    let strict = coeffs.get(1).is_some_and(|l| laurent.is_one(l));
    Ok(IsoWitness {
        series: TruncatedSeries { coeffs },
        strict,
        integral,
    })
}

/// Reduce a `p`-integral Laurent series mod `p^N`.
pub fn reduce_laurent_series(
    h: &TruncatedSeries<crate::ring::Laurent<BigRational>>,
    ring: &Zpn,
) -> Result<TruncatedSeries<crate::ring::Laurent<PadicInt>>> {
    let target = crate::ring::LaurentRing::new(ring.clone());
    let coeffs = h
        .coeffs
        .iter()
        .map(|l| {
            let c = l
                .coeffs
                .iter()
                .map(|q| ring.from_rational(q))
                .collect::<Result<Vec<_>>>()?;
            Ok(target.normalize(l.low, c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries { coeffs })
}

/// The law `G_inf` with logarithm `sum (-(n+1))^m tau^{m+1}/(m+1)` against
/// the multiplicative law `log(1 + tau)`: the witness is `(n+1) tau`.
pub fn g_infinity_witness(n: usize, d: usize) -> Result<IsoWitness<BigRational>> {
    let n1 = BigInt::from(n as i64 + 1);
    let c_inf: Vec<_> = (0..d as u32 - 1)
        .map(|m| BigRational::from_integer((-&n1).pow(m)))
        .collect();
    let c_mult: Vec<_> = (0..d as u32 - 1)
        .map(|m| BigRational::from_integer(if m % 2 == 0 { BigInt::one() } else { -BigInt::one() }))
        .collect();
    let l_inf = log_from_coefficients(&Rationals, &c_inf)?;
    let l_mult = log_from_coefficients(&Rationals, &c_mult)?;
    let scale = BigRational::from_integer(n1.clone());
    strict_iso_check(&Rationals, &l_inf, &l_mult, Some(&scale), |q| q.is_integer())
}

fn teichmueller_power(w: &UnramifiedRing, z: &UnramifiedElement, e: u64) -> UnramifiedElement {
    w.pow(z, e % (w.q() - 1))
}

/// `A_m(t^)` for a nonzero Teichmueller `t^`, using `lambda^ = t^^{-(n+1)}`.
fn a_m_at(n: usize, m: u64, w: &UnramifiedRing, t: &UnramifiedElement) -> Result<UnramifiedElement> {
    let coeffs = a_m_mod(n, m, w.zpn())?;
    let n1 = n as u64 + 1;
    let lambda = teichmueller_power(w, t, (w.q() - 1) * n1 - n1);
    let sum = coeffs
        .iter()
        .rev()
        .fold(w.zero(), |acc, c| w.add(&w.mul(&acc, &lambda), &w.constant(*c)));
    Ok(w.mul(&teichmueller_power(w, t, m), &sum))
}

/// Frobenius eigenvalue factor `a = A_{p^N - 1}(t^) / A_{p^{N-1} - 1}(t^^p)`,
/// the ratio of the `tau^{p^N}` and `tau^{p^{N-1}}` log coefficients of `G_{t^}`.
pub fn cartier_factor(fp: &FamilyPoint, prec: u32) -> Result<UnramifiedElement> {
    if fp.t().0 == 0 {
        return Err(Error::ZeroParameter);
    }
    if !ordinary_test(fp)? {
        return Err(Error::NotOrdinary);
    }
    let p = fp.p();
    let w = UnramifiedRing::over(fp.field().clone(), prec)?;
    let t = w.teichmueller(fp.t());
    let top = a_m_at(fp.n(), p.pow(prec) - 1, &w, &t)?;
    let bottom = a_m_at(fp.n(), p.pow(prec - 1) - 1, &w, &w.frobenius(&t))?;
    let inv = w.inv(&bottom).ok_or(Error::NonUnit { p })?;
    Ok(w.mul(&top, &inv))
}

/// `a a^sigma ... a^{sigma^{r-1}}` for the factor of [`cartier_factor`].
pub fn cartier_norm(fp: &FamilyPoint, prec: u32) -> Result<PadicInt> {
    let w = UnramifiedRing::over(fp.field().clone(), prec)?;
    let a = cartier_factor(fp, prec)?;
    w.as_constant(&w.norm(&a))
        .ok_or_else(|| Error::ConsistencyFailure("norm is not in Z_p".into()))
}

/// [`cartier_norm`], asserted equal to the unit root at the same precision.
pub fn cartier_eigenvalue(fp: &FamilyPoint, prec: u32) -> Result<PadicInt> {
    let a = cartier_norm(fp, prec)?;
    let pi = unit_root(fp, prec)?.pi;
    if a != pi {
        return Err(Error::ConsistencyFailure(format!(
            "cartier norm {} differs from unit root {} mod {}^{prec}",
            a.value(),
            pi.value(),
            fp.p()
        )));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{a_m_closed, elliptic_frobenius, unit_root_from_counts};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn multiplicative_law_from_log() {
        let n = 2;
        let c: Vec<_> = (0..8u32)
            .map(|m| BigRational::from_integer(BigInt::from(-3).pow(m)))
            .collect();
        let log = log_from_coefficients(&Rationals, &c).unwrap();
        let g = group_law_from_log(Rationals, log).unwrap();
        let b = g.bivariate_ring();
        for i in 0..g.order() {
            for j in 0..g.order() - i {
                let want = match (i, j) {
                    (1, 0) | (0, 1) => q(1, 1),
                    (1, 1) => q(n + 1, 1),
                    _ => q(0, 1),
                };
                assert_eq!(b.coefficient(g.law(), i, j), want, "x^{i} y^{j}");
            }
        }
        assert!(g.check_axioms().iter().all(|c| c.passed));
    }

    #[test]
    fn additive_law() {
        let g = group_law_from_log(
            Rationals,
            TruncatedSeries {
                coeffs: vec![q(0, 1), q(1, 1), q(0, 1), q(0, 1)],
            },
        )
        .unwrap();
        let b = g.bivariate_ring();
        let want = b.add(
            &b.from_x(&SeriesRing::new(Rationals, 4).variable()),
            &b.from_y(&SeriesRing::new(Rationals, 4).variable()),
        );
        assert_eq!(*g.law(), want);
    }

    #[test]
    fn non_unit_linear_term() {
        let zp = Zpn::new(5, 3).unwrap();
        let log = TruncatedSeries {
            coeffs: vec![zp.zero(), zp.elem(5), zp.one()],
        };
        assert!(matches!(group_law_from_log(zp, log), Err(Error::NonUnitLinearTerm)));
    }

    #[test]
    fn log_denominator_not_absorbed() {
        let zp = Zpn::new(3, 4).unwrap();
        let c = vec![zp.one(); 4];
        assert!(matches!(
            log_from_coefficients(&zp, &c),
            Err(Error::NonIntegralCoefficient { .. })
        ));
    }

    #[test]
    fn dwork_law_denominators() {
        let c = dwork_law_integrality(2, 10).unwrap();
        assert!(c.passed, "{}", c.detail);
    }

    #[test]
    fn dwork_law_axioms_symbolic() {
        let g = group_law_from_log(PolyRing::new(Rationals), dwork_log(2, 7).unwrap()).unwrap();
        for c in g.check_axioms() {
            assert!(c.passed, "{}", c.name);
        }
    }

    #[test]
    fn height_of_multiplicative_law() {
        let field = FiniteField::new(5, 1).unwrap();
        let c: Vec<_> = (0..6).map(|m| q(if m % 2 == 0 { 1 } else { -1 }, 1)).collect();
        let g = group_law_from_log(Rationals, log_from_coefficients(&Rationals, &c).unwrap()).unwrap();
        let zp = Zpn::new(5, 1).unwrap();
        let h = p_series_height(&g, 5, 1, |c| Ok(field.from_int(zp.from_rational(c)?.value() as i64))).unwrap();
        assert_eq!(h, Height::Finite(1));
        assert!(matches!(
            p_series_height(&g, 5, 2, |_| Ok(field.zero())),
            Err(Error::InsufficientDegree { .. })
        ));
    }

    #[test]
    fn height_one_on_ordinary_fibers() {
        let hasse = hasse_invariant(2, 7).unwrap();
        for t in 1..7u64 {
            let fp = FamilyPoint::from_coefficients(2, 7, 1, &[t]).unwrap();
            if !fp.is_smooth() {
                continue;
            }
            let lambda = fp.lambda().unwrap();
            let ordinary = hasse.eval(fp.field(), lambda).0 != 0;
            let h = fiber_height(&fp, 1).unwrap();
            assert_eq!(ordinary, h == Height::Finite(1), "t={t}");
        }
    }

    #[test]
    fn height_two_on_supersingular_fibers() {
        let field = FiniteField::new(7, 2).unwrap();
        let hasse = hasse_invariant(2, 7).unwrap();
        let mut seen = 0;
        for t in field.elements() {
            let Ok(fp) = FamilyPoint::new(2, field.clone(), t) else {
                continue;
            };
            if t.0 == 0 || !fp.is_smooth() || hasse.eval(&field, fp.lambda().unwrap()).0 != 0 {
                continue;
            }
            seen += 1;
            if seen > 2 {
                break;
            }
            assert_eq!(fiber_height(&fp, 2).unwrap(), Height::Finite(2), "t={}", t.0);
        }
        assert!(seen > 0);
    }

    #[test]
    fn recursive_p_series_matches_log_route() {
        for (r, t) in [(1, vec![3u64]), (2, vec![1, 2])] {
            let fp = FamilyPoint::from_coefficients(2, 5, r, &t).unwrap();
            let law = fiber_law(&fp, 6).unwrap();
            let field = fp.field().clone();
            let reduced = law
                .bivariate_ring()
                .map::<FiniteField>(law.law(), |c| reduce_lift(&field, c).unwrap());
            let rec = p_series_recursive(&field, &reduced, 5);
            let direct: Vec<_> = law
                .multiply(5)
                .coeffs
                .iter()
                .map(|c| reduce_lift(&field, c).unwrap())
                .collect();
            assert_eq!(rec.coeffs, direct);
        }
    }

    #[test]
    fn g_polynomials() {
        for n in 2..5 {
            for mu in 1..=n as u64 + 1 {
                let g = g_polynomial(n, mu, 0, 5).unwrap();
                assert_eq!(g.poly.0, vec![q(1, 1)]);
            }
        }
        for (n, mu, s, p) in [(2, 1, 1, 5), (2, 2, 2, 7), (3, 2, 1, 7), (4, 1, 2, 7)] {
            let g = g_polynomial(n, mu, s, p).unwrap();
            assert_eq!(g.poly.0.len() - 1, g.degree_bound());
            let zp = Zpn::new(p, 3).unwrap();
            assert_eq!(g.reduce(&zp).unwrap(), g_polynomial_mod(n, mu, s, &zp).unwrap());
        }
    }

    #[test]
    fn g_prime_is_log_coefficient() {
        let g = g_polynomial(2, 1, 1, 5).unwrap();
        assert_eq!(g.in_t(), a_m_closed(2, 4));
        let g = g_polynomial(3, 2, 1, 7).unwrap();
        assert_eq!(g.in_t(), a_m_closed(3, 13));
    }

    #[test]
    fn a_m_stream_matches_expansion() {
        let zp = Zpn::new(7, 3).unwrap();
        for (n, m) in [(2, 48u64), (3, 30), (4, 24)] {
            let direct = a_m_direct(n, m as usize);
            let c = a_m_mod(n, m, &zp).unwrap();
            for (r, a) in c.iter().enumerate() {
                let e = m as usize - (n + 1) * r;
                assert_eq!(*a, zp.from_bigint(&direct.0[e]), "n={n} m={m} r={r}");
            }
        }
    }

    #[test]
    fn small_congruences() {
        assert!(two_hypergeometric_check(2, 5, 1, 1, 0).unwrap().passed);
        assert!(g_hasse_check(2, 7, 3).unwrap().passed);
        assert!(g_frobenius_product_check(2, 5, 1, 0).unwrap().passed);
        assert!(a_m_mod_p_checks(2, 5, 2).unwrap().iter().all(|c| c.passed));
        assert!(b_shift_checks(3, 7).unwrap().iter().all(|c| c.passed));
        assert!(g_ratio_checks(2, 5, 1, 1, 1).unwrap().iter().all(|c| c.passed));
        assert!(matches!(
            congruence_suite(2, 3, &SuiteRanges::default()),
            Err(Error::BadCharacteristic { .. })
        ));
    }

    #[test]
    fn g_infinity_scaling() {
        let w = g_infinity_witness(2, 10).unwrap();
        assert!(w.holds(false));
        assert!(!w.strict);
        let mut want = vec![q(0, 1); 10];
        want[1] = q(3, 1);
        assert_eq!(w.series.coeffs, want);
    }

    #[test]
    fn identity_isomorphism() {
        let l = dwork_log_at(2, 8, &Rationals, &q(2, 1)).unwrap();
        let w = strict_iso_check(&Rationals, &l, &l, None, |_| true).unwrap();
        assert_eq!(w.series, SeriesRing::new(Rationals, 8).variable());
        assert!(w.strict);
    }

    #[test]
    fn normalized_witness_matches_laurent_route() {
        let d = 8;
        let w = j_to_g_witness(2, 5, d).unwrap();
        let laurent = crate::ring::LaurentRing::new(Rationals);
        let direct = strict_iso_check(
            &laurent,
            &j_log_laurent(2, d).unwrap(),
            &g_log_laurent(2, d).unwrap(),
            None,
            |_| true,
        )
        .unwrap();
        assert_eq!(w.series, direct.series);
    }

    #[test]
    fn cartier_route_agrees_with_counts() {
        for (p, r, t) in [(7u64, 1usize, vec![3u64]), (7, 2, vec![2, 1]), (5, 1, vec![2])] {
            let fp = FamilyPoint::from_coefficients(2, p, r, &t).unwrap();
            if !ordinary_test(&fp).unwrap() {
                continue;
            }
            let a = cartier_eigenvalue(&fp, 3).unwrap();
            let frob = elliptic_frobenius(&fp).unwrap();
            assert_eq!(a, unit_root_from_counts(&frob, 3).unwrap());
        }
    }

    #[test]
    fn cartier_factor_is_t_times_f() {
        let fp = FamilyPoint::from_coefficients(2, 7, 2, &[3, 1]).unwrap();
        let w = UnramifiedRing::over(fp.field().clone(), 3).unwrap();
        let a = cartier_factor(&fp, 3).unwrap();
        let t = w.teichmueller(fp.t());
        let z = w.teichmueller(fp.lambda().unwrap());
        let f = f_eval(&HypergeomSpec::dwork(2).unwrap(), &w, &z).unwrap();
        assert_eq!(a, w.mul(&w.pow(&t, 6), &f));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_logs_give_group_laws(c in proptest::collection::vec((-5i64..6, 1i64..4), 5)) {
            let mut coeffs = vec![q(1, 1)];
            coeffs.extend(c.iter().map(|&(a, b)| q(a, b)));
            let log = log_from_coefficients(&Rationals, &coeffs).unwrap();
            let g = group_law_from_log(Rationals, log).unwrap();
            for check in g.check_axioms() {
                prop_assert!(check.passed, "{}", check.name);
            }
        }
    }
}

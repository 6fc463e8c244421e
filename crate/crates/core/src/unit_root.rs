//! Hasse invariants, the ordinarity test and the unit root
//! `pi = f(z) f(z^p) ... f(z^{p^{r-1}})` with `f(x) = F(x)/F(x^p)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::FamilyPoint;
use crate::padic::{is_prime, FiniteField, FqElem, PadicInt, UnramifiedElement, UnramifiedRing, Zpn};
use crate::ring::Ring;
use crate::series::{HypergeomSpec, ResidueTable};

/// `H = F^{<p} mod p` for a hypergeometric series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HasseData {
    pub spec: HypergeomSpec,
    pub p: u64,
    /// Coefficients in `[0, p)`, low first, without trailing zeros.
    pub coeffs: Vec<u64>,
    /// Every coefficient above this index vanishes.
    pub degree_bound: usize,
}

impl HasseData {
    pub fn eval(&self, field: &FiniteField, x: FqElem) -> FqElem {
        self.coeffs.iter().rev().fold(field.zero(), |acc, &c| {
            field.add_elems(field.mul_elems(acc, x), field.from_int(c as i64))
        })
    }

    /// `H^{1 + p + ... + p^{r-1}}(x)`, the norm of `H(x)` down to `F_p`.
    pub fn norm_value(&self, field: &FiniteField, x: FqElem) -> u64 {
        let h = self.eval(field, x);
        let exp = (field.order() - 1) / (field.p() - 1);
        let v = field.pow_elem(h, exp);
        field.coefficients(v)[0]
    }
}

/// The Hasse invariant of the Dwork parameters `i/(n+1)`.
pub fn hasse_invariant(n: usize, p: u64) -> Result<HasseData> {
    if (n as u64 + 1) % p == 0 {
        return Err(Error::BadCharacteristic {
            p,
            n_plus_one: n as u64 + 1,
        });
    }
    hasse_for_spec(&HypergeomSpec::dwork(n)?, p)
}

pub fn hasse_for_spec(spec: &HypergeomSpec, p: u64) -> Result<HasseData> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if spec.denominator() % p == 0 {
        return Err(Error::BadCharacteristic {
            p,
            n_plus_one: spec.denominator(),
        });
    }
    let ring = Zpn::new(p, 1)?;
    let mut coeffs: Vec<u64> = spec
        .coefficients_mod(p as usize, &ring)?
        .iter()
        .map(|c| c.value())
        .collect();
    let degree_bound = ((p - 1) / spec.denominator()) as usize;
    if coeffs.iter().skip(degree_bound + 1).any(|&c| c != 0) {
        return Err(Error::ConsistencyFailure(
            "Hasse coefficient above the degree bound".into(),
        ));
    }
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    Ok(HasseData {
        spec: spec.clone(),
        p,
        coeffs,
        degree_bound,
    })
}

/// `H(lambda) != 0` for `lambda = t^{-(n+1)}`.
pub fn ordinary_test(fp: &FamilyPoint) -> Result<bool> {
    if fp.t().0 == 0 {
        return Err(Error::ZeroParameter);
    }
    if !fp.is_smooth() {
        return Err(Error::SingularFiber);
    }
    let h = hasse_invariant(fp.n(), fp.p())?;
    Ok(h.eval(fp.field(), fp.lambda()?).0 != 0)
}

/// Ordinarity of the Fermat fiber `t = 0`: `p = 1 mod (n+1)`.
pub fn ordinary_at_zero(n: usize, p: u64) -> bool {
    p % (n as u64 + 1) == 1
}

/// Bucket period for residue tables: a multiple of `q - 1`, shared between
/// `r = 1` and `r = 2`.
fn period_for(p: u64, r: usize) -> usize {
    if r == 1 {
        (p * p - 1) as usize
    } else {
        (p.pow(r as u32) - 1) as usize
    }
}

type TableKey = (HypergeomSpec, u64, usize);

/// Residue table with precision at least `prec`, shared process-wide. A
/// table built at higher precision serves every lower one.
pub fn residue_table(spec: &HypergeomSpec, p: u64, prec: u32, period: usize) -> Result<Arc<ResidueTable>> {
    static TABLES: OnceLock<Mutex<HashMap<TableKey, Arc<ResidueTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    let key = (spec.clone(), p, period);
    let mut guard = tables.lock().expect("table cache poisoned");
    if let Some(t) = guard.get(&key) {
        if t.precision() >= prec {
            return Ok(Arc::clone(t));
        }
    }
    let table = Arc::new(ResidueTable::build(spec, p, prec, period)?);
    guard.insert(key, Arc::clone(&table));
    Ok(table)
}

/// Tuning for [`f_eval`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Extra `p`-adic digits carried internally and then discarded.
    pub slack: u32,
}

fn check_point(spec: &HypergeomSpec, ring: &UnramifiedRing, lambda: FqElem) -> Result<()> {
    let field = ring.residue_field();
    if lambda.0 == 0 || lambda == field.one() {
        return Err(Error::SingularParameter);
    }
    let h = hasse_for_spec(spec, ring.p())?;
    if h.eval(field, lambda).0 == 0 {
        return Err(Error::NotOrdinary);
    }
    Ok(())
}

/// `f(z) = F^{<p^N}(z) / F^{<p^{N-1}}(z^p)` in `W(F_q)/p^N`.
pub fn f_eval(spec: &HypergeomSpec, ring: &UnramifiedRing, z: &UnramifiedElement) -> Result<UnramifiedElement> {
    f_eval_with(spec, ring, z, EvalOptions::default())
}

pub fn f_eval_with(
    spec: &HypergeomSpec,
    ring: &UnramifiedRing,
    z: &UnramifiedElement,
    opts: EvalOptions,
) -> Result<UnramifiedElement> {
    let lambda = ring.reduce(z);
    check_point(spec, ring, lambda)?;
    let prec = ring.precision();
    let work_prec = prec + opts.slack;
    let work = if opts.slack == 0 {
        ring.clone()
    } else {
        UnramifiedRing::over(ring.residue_field().clone(), work_prec)?
    };
    let p = ring.p();
    let teichmueller = ring.pow(z, ring.q()) == *z;
    let value = if teichmueller {
        let zw = if opts.slack == 0 {
            z.clone()
        } else {
            work.teichmueller(lambda)
        };
        let table = residue_table(spec, p, work_prec, period_for(p, ring.degree()))?;
        let num = table.eval(&work, work_prec, &zw);
        let den = table.eval(&work, work_prec - 1, &work.pow(&zw, p));
        work.mul(&num, &work.inv(&den).ok_or(Error::NonUnit { p })?)
    } else {
        if opts.slack != 0 {
            return Err(Error::InvalidParameter("slack needs a Teichmueller point".into()));
        }
        let top = p.checked_pow(prec).ok_or(Error::PrecisionOverflow { p, prec })? as usize;
        let coeffs = spec.coefficients_mod(top, ring.zpn())?;
        let horner = |x: &UnramifiedElement, len: usize| {
            coeffs[..len]
                .iter()
                .rev()
                .fold(ring.zero(), |acc, c| ring.add(&ring.mul(&acc, x), &ring.constant(*c)))
        };
        let num = horner(z, top);
        let den = horner(&ring.frobenius(z), top / p as usize);
        ring.mul(&num, &ring.inv(&den).ok_or(Error::NonUnit { p })?)
    };
    Ok(ring.truncate_elem(&value, prec))
}

/// `pi` together with its factors `f(z^{p^i})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitRootResult {
    pub pi: PadicInt,
    pub factors: Vec<UnramifiedElement>,
    /// Truncation bounds of the numerator and denominator of `f`.
    pub bounds: (u64, u64),
    /// Sign factor applied to the product (`1` outside the Legendre family).
    pub sign: i64,
}

fn product_of_factors(
    spec: &HypergeomSpec,
    ring: &UnramifiedRing,
    lambda: FqElem,
    opts: EvalOptions,
) -> Result<(Vec<UnramifiedElement>, PadicInt)> {
    let z = ring.teichmueller(lambda);
    let mut factors = Vec::with_capacity(ring.degree());
    let mut zi = z;
    for _ in 0..ring.degree() {
        factors.push(f_eval_with(spec, ring, &zi, opts)?);
        zi = ring.pow(&zi, ring.p());
    }
    let prod = factors.iter().fold(ring.one(), |acc, f| ring.mul(&acc, f));
    let pi = ring
        .as_constant(&prod)
        .ok_or_else(|| Error::ConsistencyFailure("factor product is not Frobenius invariant".into()))?;
    Ok((factors, pi))
}

/// The unit root of an ordinary fiber to precision `prec`.
pub fn unit_root(fp: &FamilyPoint, prec: u32) -> Result<UnitRootResult> {
    unit_root_with(fp, prec, EvalOptions::default())
}

pub fn unit_root_with(fp: &FamilyPoint, prec: u32, opts: EvalOptions) -> Result<UnitRootResult> {
    if !ordinary_test(fp)? {
        return Err(Error::NotOrdinary);
    }
    let spec = HypergeomSpec::dwork(fp.n())?;
    let lambda = fp.lambda()?;
    let ring = UnramifiedRing::over(fp.field().clone(), prec)?;
    let (factors, pi) = product_of_factors(&spec, &ring, lambda, opts)?;
    let hasse = hasse_invariant(fp.n(), fp.p())?;
    if pi.value() % fp.p() != hasse.norm_value(fp.field(), lambda) {
        return Err(Error::ConsistencyFailure(
            "unit root is not the Hasse norm mod p".into(),
        ));
    }
    let p = fp.p();
    Ok(UnitRootResult {
        pi,
        factors,
        bounds: (p.pow(prec + opts.slack), p.pow(prec + opts.slack - 1)),
        sign: 1,
    })
}

/// The unit root of `y^2 = x(x-1)(x-lambda)` over `field`, with the sign
/// `((-1)^{(p-1)/2})^r`.
pub fn legendre_unit_root(field: &FiniteField, lambda: FqElem, prec: u32) -> Result<UnitRootResult> {
    legendre_unit_root_with(field, lambda, prec, EvalOptions::default())
}

pub fn legendre_unit_root_with(
    field: &FiniteField,
    lambda: FqElem,
    prec: u32,
    opts: EvalOptions,
) -> Result<UnitRootResult> {
    let p = field.p();
    if p == 2 {
        return Err(Error::InvalidParameter("the Legendre family needs odd p".into()));
    }
    let spec = HypergeomSpec::legendre();
    let ring = UnramifiedRing::over(field.clone(), prec)?;
    check_point(&spec, &ring, lambda)?;
    let (factors, prod) = product_of_factors(&spec, &ring, lambda, opts)?;
    let eps: i64 = if p % 4 == 1 { 1 } else { -1 };
    let sign = eps.pow(field.degree() as u32);
    let pi = if sign == 1 { prod } else { -prod };
    let hasse = hasse_for_spec(&spec, p)?;
    let expected = (sign * hasse.norm_value(field, lambda) as i64).rem_euclid(p as i64) as u64;
    if pi.value() % p != expected {
        return Err(Error::ConsistencyFailure(
            "unit root is not the signed Hasse norm mod p".into(),
        ));
    }
    Ok(UnitRootResult {
        pi,
        factors,
        bounds: (p.pow(prec + opts.slack), p.pow(prec + opts.slack - 1)),
        sign,
    })
}

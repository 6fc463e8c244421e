//! Acceptance criteria 1-9. Prints one line per criterion and exits nonzero
//! if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dwork_core::formal_group::{
    cartier_eigenvalue, congruence_suite, dwork_law_integrality, fiber_height, g_infinity_witness, j_to_g_witness,
    reduce_laurent_series, Height, SuiteRanges,
};
use dwork_core::geometry::{count_points, elliptic_frobenius, legendre_frobenius, unit_root_from_counts, FamilyPoint};
use dwork_core::horizontal::{
    dlambda_form, legendre_expected, legendre_section, lemma_checks, verify_horizontal, LemmaInput,
};
use dwork_core::padic::{FiniteField, PadicInt, Zpn};
use dwork_core::ring::Ring;
use dwork_core::unit_root::{hasse_invariant, legendre_unit_root, ordinary_test, unit_root};
use dwork_core::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Precision of the full agreement checks.
const PREC: u32 = 5;
/// Precision of the cross-proof check.
const CARTIER_PREC: u32 = 3;
/// Extra digits for the precision coherence check.
const EXTRA_PREC: u32 = 2;
const ELLIPTIC_PRIMES: [u64; 4] = [5, 7, 11, 13];
const RANDOM_TUPLES: usize = 100;
const HORIZONTAL_ORDER: usize = 25;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        detail: detail.into(),
    })
}

/// Ordinary smooth fibers of the cubic pencil over `F_{p^r}`.
fn elliptic_fibers() -> Result<Vec<FamilyPoint>> {
    let mut out = Vec::new();
    for p in ELLIPTIC_PRIMES {
        for r in [1, 2] {
            let field = FiniteField::new(p, r)?;
            for t in field.elements() {
                if t.0 == 0 {
                    continue;
                }
                let fp = FamilyPoint::new(2, field.clone(), t)?;
                if fp.is_smooth() && ordinary_test(&fp)? {
                    out.push(fp);
                }
            }
        }
    }
    Ok(out)
}

fn describe(fp: &FamilyPoint) -> String {
    format!("p={} r={} t={:?}", fp.p(), fp.r(), fp.field().coefficients(fp.t()))
}

fn first_failure(items: Vec<Result<Option<String>>>) -> Result<Option<String>> {
    for i in items {
        if let Some(msg) = i? {
            return Ok(Some(msg));
        }
    }
    Ok(None)
}

fn criterion_1() -> Result<Outcome> {
    let fibers = elliptic_fibers()?;
    let bad = first_failure(
        fibers
            .par_iter()
            .map(|fp| {
                let pi = unit_root(fp, PREC)?.pi;
                let oracle = unit_root_from_counts(&elliptic_frobenius(fp)?, PREC)?;
                Ok((pi != oracle).then(|| format!("{}: {} vs {}", describe(fp), pi.value(), oracle.value())))
            })
            .collect(),
    )?;
    outcome(
        bad.is_none(),
        bad.unwrap_or(format!("{} fibers mod p^{PREC}", fibers.len())),
    )
}

fn criterion_2() -> Result<Outcome> {
    let mut points = Vec::new();
    for p in ELLIPTIC_PRIMES {
        for r in [1, 2] {
            let field = FiniteField::new(p, r)?;
            let hasse = dwork_core::unit_root::hasse_for_spec(&dwork_core::series::HypergeomSpec::legendre(), p)?;
            for l in field.elements() {
                if l.0 != 0 && l != field.one() && hasse.eval(&field, l).0 != 0 {
                    points.push((field.clone(), l));
                }
            }
        }
    }
    let bad = first_failure(
        points
            .par_iter()
            .map(|(field, l)| {
                let res = legendre_unit_root(field, *l, PREC)?;
                let oracle = unit_root_from_counts(&legendre_frobenius(field, *l)?, PREC)?;
                Ok((res.pi != oracle).then(|| {
                    format!(
                        "p={} r={} lambda={}: {} vs {}",
                        field.p(),
                        field.degree(),
                        l.0,
                        res.pi.value(),
                        oracle.value()
                    )
                }))
            })
            .collect(),
    )?;
    outcome(
        bad.is_none(),
        bad.unwrap_or(format!("{} parameters mod p^{PREC}", points.len())),
    )
}

fn criterion_3() -> Result<Outcome> {
    let mut fibers = Vec::new();
    for (n, p) in [(3usize, 5u64), (3, 7), (4, 7)] {
        let field = FiniteField::new(p, 1)?;
        for t in field.elements() {
            if t.0 == 0 {
                continue;
            }
            let fp = FamilyPoint::new(n, field.clone(), t)?;
            if fp.is_smooth() && ordinary_test(&fp)? {
                fibers.push(fp);
            }
        }
    }
    let bad = first_failure(
        fibers
            .par_iter()
            .map(|fp| {
                let p = fp.p();
                let pi = unit_root(fp, PREC)?.pi.value() % p;
                let hasse = hasse_invariant(fp.n(), p)?.norm_value(fp.field(), fp.lambda()?);
                let affine = count_points(fp, 1)?.affine;
                let sign: i64 = if fp.n() % 2 == 0 { 1 } else { -1 };
                let counted = (sign * (affine % p) as i64).rem_euclid(p as i64) as u64;
                Ok((pi != hasse || hasse != counted)
                    .then(|| format!("n={} {}: pi={pi} H={hasse} count={counted}", fp.n(), describe(fp))))
            })
            .collect(),
    )?;
    outcome(bad.is_none(), bad.unwrap_or(format!("{} fibers mod p", fibers.len())))
}

fn criterion_4() -> Result<Outcome> {
    let mut fibers = Vec::new();
    for n in [2usize, 3] {
        for p in [5u64, 7] {
            for r in [1, 2] {
                let field = FiniteField::new(p, r)?;
                for t in field.elements() {
                    if t.0 == 0 {
                        continue;
                    }
                    let fp = FamilyPoint::new(n, field.clone(), t)?;
                    if fp.is_smooth() {
                        fibers.push(fp);
                    }
                }
            }
        }
    }
    let bad = first_failure(
        fibers
            .par_iter()
            .map(|fp| {
                let ordinary = ordinary_test(fp)?;
                let h = fiber_height(fp, 1)?;
                let height_one = match h {
                    Height::Finite(1) => true,
                    Height::AboveCutoff(1) => false,
                    other => return Ok(Some(format!("n={} {}: unexpected {other:?}", fp.n(), describe(fp)))),
                };
                Ok((ordinary != height_one)
                    .then(|| format!("n={} {}: ordinary={ordinary} {h:?}", fp.n(), describe(fp))))
            })
            .collect(),
    )?;
    outcome(bad.is_none(), bad.unwrap_or(format!("{} fibers", fibers.len())))
}

fn criterion_5() -> Result<Outcome> {
    let mut total = 0;
    for (n, p) in [(2usize, 5u64), (2, 7), (3, 5), (3, 7), (4, 7)] {
        let checks = congruence_suite(n, p, &SuiteRanges::default())?;
        total += checks.len();
        if let Some(c) = checks.iter().find(|c| !c.passed) {
            return outcome(false, format!("{}: {}", c.name, c.detail));
        }
    }
    outcome(true, format!("{total} congruences"))
}

fn criterion_6() -> Result<Outcome> {
    for n in [2, 3] {
        let c = dwork_law_integrality(n, 12)?;
        if !c.passed {
            return outcome(false, c.detail);
        }
    }
    let g_inf = g_infinity_witness(2, 12)?;
    let three = BigRational::from_integer(BigInt::from(3));
    let scaling = g_inf.holds(false)
        && g_inf.series.coeffs[1] == three
        && g_inf
            .series
            .coeffs
            .iter()
            .skip(2)
            .all(|c| *c == BigRational::from_integer(0.into()));
    if !scaling {
        return outcome(false, "G_inf witness is not 3 tau");
    }
    let w = j_to_g_witness(2, 5, 25)?;
    if !w.holds(true) {
        return outcome(
            false,
            format!("J_t witness strict={} integral={}", w.strict, w.integral),
        );
    }
    let reduced = reduce_laurent_series(&w.series, &Zpn::new(5, 2)?)?;
    outcome(
        reduced.coeffs.len() == 25,
        "integral law denominators, scaling witness 3 tau, strict J_t witness mod 25 at degree 25",
    )
}

fn criterion_7() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..RANDOM_TUPLES {
        let m = 1 + trial % 4;
        let a: Vec<BigRational> = (0..m)
            .map(|_| BigRational::new(rng.gen_range(-30..=30).into(), rng.gen_range(1..=15).into()))
            .collect();
        let m = m as i64;
        let k = rng.gen_range(1..=m);
        let ai0 = lemma_checks(&LemmaInput::Ai0 { k, m });
        if !(ai0 && lemma_checks(&LemmaInput::NEven(a.clone())) && lemma_checks(&LemmaInput::NOdd(a.clone()))) {
            return outcome(false, format!("lemma failure on {a:?}"));
        }
    }
    for n in 2..=5 {
        let r = verify_horizontal(n, HORIZONTAL_ORDER)?;
        if !r.passed() {
            return outcome(false, format!("n={n}: zero through {}", r.zero_through()));
        }
    }
    let sc = legendre_section(HORIZONTAL_ORDER)?;
    let legendre = dlambda_form(&sc)? == legendre_expected(HORIZONTAL_ORDER);
    outcome(
        legendre,
        format!("{RANDOM_TUPLES} tuples, n = 2..5 at D = {HORIZONTAL_ORDER}, Legendre form"),
    )
}

fn criterion_8() -> Result<Outcome> {
    let fibers = elliptic_fibers()?;
    let bad = first_failure(
        fibers
            .par_iter()
            .map(|fp| {
                let a = match cartier_eigenvalue(fp, CARTIER_PREC) {
                    Ok(a) => a,
                    Err(Error::ConsistencyFailure(msg)) => return Ok(Some(format!("{}: {msg}", describe(fp)))),
                    Err(e) => return Err(e),
                };
                let pi = unit_root(fp, CARTIER_PREC)?.pi;
                Ok((a != pi).then(|| describe(fp)))
            })
            .collect(),
    )?;
    outcome(
        bad.is_none(),
        bad.unwrap_or(format!("{} fibers mod p^{CARTIER_PREC}", fibers.len())),
    )
}

fn coherent(hi: &PadicInt, lo: &PadicInt) -> bool {
    hi.truncate(lo.precision()) == *lo
}

fn criterion_9() -> Result<Outcome> {
    let fibers = elliptic_fibers()?;
    let hi_prec = PREC + EXTRA_PREC;
    let bad = first_failure(
        fibers
            .par_iter()
            .map(|fp| {
                let lo = unit_root(fp, PREC)?;
                let hi = unit_root(fp, hi_prec)?;
                let frob = elliptic_frobenius(fp)?;
                let mut ok = coherent(&hi.pi, &lo.pi)
                    && coherent(
                        &unit_root_from_counts(&frob, hi_prec)?,
                        &unit_root_from_counts(&frob, PREC)?,
                    )
                    && coherent(&cartier_eigenvalue(fp, PREC)?, &cartier_eigenvalue(fp, CARTIER_PREC)?);
                for (h, l) in hi.factors.iter().zip(&lo.factors) {
                    ok &= h.0.iter().zip(&l.0).all(|(a, b)| coherent(a, b));
                }
                Ok((!ok).then(|| describe(fp)))
            })
            .collect(),
    )?;
    outcome(
        bad.is_none(),
        bad.unwrap_or(format!("{} fibers, {} -> {}", fibers.len(), hi_prec, PREC)),
    )
}

type Criterion = (u32, &'static str, fn() -> Result<Outcome>, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            1,
            "elliptic unit root vs point counts",
            criterion_1,
            Duration::from_secs(120),
        ),
        (2, "Legendre unit root with sign", criterion_2, Duration::from_secs(120)),
        (
            3,
            "higher-dimensional mod-p congruences",
            criterion_3,
            Duration::from_secs(300),
        ),
        (
            4,
            "Hasse locus vs formal group height",
            criterion_4,
            Duration::from_secs(120),
        ),
        (5, "congruence suites", criterion_5, Duration::from_secs(180)),
        (
            6,
            "formal group integrality and isomorphisms",
            criterion_6,
            Duration::from_secs(120),
        ),
        (7, "horizontal sections", criterion_7, Duration::from_secs(60)),
        (
            8,
            "Cartier eigenvalue vs unit root",
            criterion_8,
            Duration::from_secs(60),
        ),
        (9, "precision coherence", criterion_9, Duration::from_secs(600)),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= limit, o.detail),
            Err(e) => (false, format!("error {}: {e}", e.name())),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "criterion {id} [{name}]: {} ({detail}; {:.1}s of {}s)",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

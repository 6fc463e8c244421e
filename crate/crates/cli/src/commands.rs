use dwork_core::formal_group::{
    congruence_suite, dwork_law_integrality, dwork_log, fiber_height, g_infinity_witness, group_law_from_log,
    j_to_g_witness, Height, SuiteRanges,
};
use dwork_core::geometry::{count_points, elliptic_frobenius, legendre_frobenius, unit_root_from_counts, FamilyPoint};
use dwork_core::horizontal::{dlambda_form, dwork_section, legendre_expected, legendre_section, verify_horizontal};
use dwork_core::padic::{FiniteField, FqElem, PadicInt};
use dwork_core::ring::{Rationals, Ring};
use dwork_core::series::{apply_pf_operator, series_over_q, HypergeomSpec, SeriesRing};
use dwork_core::unit_root::{
    hasse_for_spec, hasse_invariant, legendre_unit_root, ordinary_at_zero, ordinary_test, unit_root, UnitRootResult,
};
use dwork_core::Error;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{format_element, parse_element, JobConfig};
use crate::report::{num, nums, Check, CliError, Outcome, Status};

type CmdResult = Result<Outcome, CliError>;

const DEFAULT_FGL_DEGREE: usize = 8;
const DEFAULT_HORIZONTAL_DEGREE: usize = 25;
const DEFAULT_PF_DEGREE: usize = 30;
/// Heights are resolved up to 2 while `[p]` to degree `p^2` stays cheap.
const MAX_HEIGHT_2_DEGREE: u64 = 25;

pub fn run(cfg: &JobConfig) -> CmdResult {
    match cfg.command.as_str() {
        "hasse" => hasse(cfg),
        "unit-root" => unit_root_cmd(cfg, false),
        "verify" => unit_root_cmd(cfg, true),
        "legendre" => legendre(cfg),
        "count" => count(cfg),
        "congruences" => congruences(cfg),
        "fgl" => fgl(cfg),
        "horizontal" => horizontal(cfg),
        "pf-check" => pf_check(cfg),
        other => Err(CliError::validation("UnknownCommand", other.to_string())),
    }
}

fn padic_json(a: &PadicInt) -> Value {
    json!({ "value": num(a.value()), "p": num(a.p()), "prec": num(a.precision()) })
}

fn passed_summary(checks: &[Check]) -> String {
    let pass = checks.iter().filter(|c| c.status == Status::Pass).count();
    format!("{pass}/{} checks passed", checks.len())
}

/// The fiber named by `--n --p --r --t`.
fn fiber(cfg: &JobConfig) -> Result<FamilyPoint, CliError> {
    let n = cfg.require_n()?;
    let p = cfg.require_good_p(n)?;
    let field = cfg.field(p)?;
    let t = cfg.t.as_deref().ok_or_else(|| CliError::missing("t"))?;
    let t = parse_element(&field, "t", t)?;
    FamilyPoint::new(n, field, t).map_err(CliError::from_validation)
}

/// Every fiber with `t != 0` over the configured field, in element order.
fn all_fibers(cfg: &JobConfig) -> Result<Vec<FamilyPoint>, CliError> {
    let n = cfg.require_n()?;
    let p = cfg.require_good_p(n)?;
    let field = cfg.field(p)?;
    field
        .elements()
        .filter(|t| t.0 != 0)
        .map(|t| FamilyPoint::new(n, field.clone(), t).map_err(CliError::from_validation))
        .collect()
}

fn hasse(cfg: &JobConfig) -> CmdResult {
    let n = cfg.require_n()?;
    let p = cfg.require_good_p(n)?;
    let field = cfg.field(p)?;
    let h = hasse_invariant(n, p)?;
    let zeros: Vec<FqElem> = field.elements().filter(|&l| h.eval(&field, l).0 == 0).collect();
    let bad_t: Vec<String> = field
        .elements()
        .filter(|&t| t.0 != 0)
        .filter_map(|t| {
            let fp = FamilyPoint::new(n, field.clone(), t).ok()?;
            (fp.is_smooth() && !ordinary_test(&fp).ok()?).then(|| format_element(&field, t))
        })
        .collect();
    let degree = h.coeffs.len().saturating_sub(1);
    let checks = vec![Check::new(
        "degree_bound",
        degree <= h.degree_bound,
        format!("deg H = {degree}, bound {}", h.degree_bound),
    )];
    let result = json!({
        "hasse": nums(&h.coeffs),
        "degree": num(degree),
        "degree_bound": num(h.degree_bound),
        "field_size": num(field.order()),
        "non_ordinary_lambda": Value::Array(zeros.iter().map(|&l| Value::String(format_element(&field, l))).collect()),
        "non_ordinary_t": Value::Array(bad_t.iter().cloned().map(Value::String).collect()),
        "ordinary_at_zero": ordinary_at_zero(n, p),
    });
    Ok(Outcome {
        summary: format!(
            "H = {:?} mod {p}; {} non-ordinary lambda in F_{}",
            h.coeffs,
            zeros.len(),
            field.order()
        ),
        result,
        checks,
    })
}

fn factors_json(res: &UnitRootResult) -> Value {
    Value::Array(
        res.factors
            .iter()
            .map(|f| nums(f.0.iter().map(|c| c.value())))
            .collect(),
    )
}

/// Unit root of one fiber plus its oracle checks. With `strict`, a check
/// that could not run is an error rather than a skip.
fn fiber_unit_root(fp: &FamilyPoint, prec: u32, strict: bool) -> Result<(Value, Vec<Check>), CliError> {
    let p = fp.p();
    let res = unit_root(fp, prec)?;
    let hasse = hasse_invariant(fp.n(), p)?.norm_value(fp.field(), fp.lambda()?);
    let mut checks = vec![Check::new(
        "hasse_norm_mod_p",
        res.pi.value() % p == hasse,
        format!("pi mod {p} = {}, H norm = {hasse}", res.pi.value() % p),
    )];
    let mut oracle_value = Value::Null;
    let oracle = if fp.n() == 2 {
        elliptic_frobenius(fp)
            .and_then(|frob| Ok((frob, unit_root_from_counts(&frob, prec)?)))
            .map(|(frob, u)| {
                oracle_value = json!({ "trace": num(frob.a), "unit_root": padic_json(&u) });
                Check::new(
                    "matches_count_oracle",
                    u == res.pi,
                    format!("count oracle {} mod {p}^{prec}", u.value()),
                )
            })
    } else {
        count_points(fp, 1).map(|c| {
            let sign: i64 = if fp.n() % 2 == 0 { 1 } else { -1 };
            let counted = (sign * (c.affine % p) as i64).rem_euclid(p as i64) as u64;
            oracle_value = json!({ "affine": num(c.affine), "projective": num(c.projective), "mod_p": num(counted) });
            Check::new(
                "matches_count_mod_p",
                counted == res.pi.value() % p,
                format!("(-1)^n N' mod {p} = {counted}"),
            )
        })
    };
    match oracle {
        Ok(c) => checks.push(c),
        Err(e @ Error::BudgetExceeded { .. }) if !strict => checks.push(Check::skipped("count_oracle", e.to_string())),
        Err(e) => return Err(e.into()),
    }
    let result = json!({
        "t": format_element(fp.field(), fp.t()),
        "pi": padic_json(&res.pi),
        "modulus": num(res.pi.modulus()),
        "factors": factors_json(&res),
        "bounds": nums([res.bounds.0, res.bounds.1]),
        "hasse_norm": num(hasse),
        "oracle": oracle_value,
    });
    Ok((result, checks))
}

/// Tag each check with the sweep parameter.
fn tagged(prefix: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|c| Check {
            name: format!("{} [{prefix}]", c.name),
            ..c
        })
        .collect()
}

fn error_entry(key: &str, label: String, e: &CliError) -> Value {
    let mut m = Map::new();
    m.insert(key.into(), Value::String(label));
    m.insert("error".into(), json!({ "name": e.name, "message": e.message }));
    Value::Object(m)
}

/// Fibers skipped in a sweep: singular, non-ordinary.
fn sweep_skippable(e: &CliError) -> bool {
    matches!(e.name.as_str(), "NotOrdinary" | "SingularFiber" | "SingularParameter")
}

fn unit_root_cmd(cfg: &JobConfig, strict: bool) -> CmdResult {
    if cfg.all_t {
        let fibers = all_fibers(cfg)?;
        let prec = cfg.checked_prec(fibers[0].p())?;
        let runs: Vec<_> = fibers.par_iter().map(|fp| fiber_unit_root(fp, prec, strict)).collect();
        let mut entries = Vec::new();
        let mut checks = Vec::new();
        for (fp, run) in fibers.iter().zip(runs) {
            let label = format_element(fp.field(), fp.t());
            match run {
                Ok((v, c)) => {
                    entries.push(v);
                    checks.extend(tagged(&format!("t={label}"), c));
                }
                Err(e) if sweep_skippable(&e) => entries.push(error_entry("t", label, &e)),
                Err(e) => return Err(e),
            }
        }
        let summary = format!("{} fibers; {}", entries.len(), passed_summary(&checks));
        return Ok(Outcome {
            result: json!({ "fibers": entries }),
            checks,
            summary,
        });
    }
    let fp = fiber(cfg)?;
    let prec = cfg.checked_prec(fp.p())?;
    let (result, checks) = fiber_unit_root(&fp, prec, strict)?;
    let summary = format!(
        "pi = {} mod {}^{prec}; {}",
        result["pi"]["value"].as_str().unwrap_or("?"),
        fp.p(),
        passed_summary(&checks)
    );
    Ok(Outcome {
        result,
        checks,
        summary,
    })
}

fn legendre_point(field: &FiniteField, lambda: FqElem, prec: u32) -> Result<(Value, Vec<Check>), CliError> {
    let res = legendre_unit_root(field, lambda, prec)?;
    let frob = legendre_frobenius(field, lambda)?;
    let oracle = unit_root_from_counts(&frob, prec)?;
    let checks = vec![Check::new(
        "matches_count_oracle",
        oracle == res.pi,
        format!("count oracle {} mod {}^{prec}", oracle.value(), field.p()),
    )];
    let result = json!({
        "lambda": format_element(field, lambda),
        "pi": padic_json(&res.pi),
        "modulus": num(res.pi.modulus()),
        "sign": num(res.sign),
        "factors": factors_json(&res),
        "trace": num(frob.a),
    });
    Ok((result, checks))
}

fn legendre(cfg: &JobConfig) -> CmdResult {
    let p = cfg.require_p()?;
    if p == 2 {
        return Err(CliError::validation(
            "InvalidParameter",
            "the Legendre family needs odd p",
        ));
    }
    let field = cfg.field(p)?;
    let prec = cfg.checked_prec(p)?;
    if cfg.all_t {
        let points: Vec<FqElem> = field.elements().filter(|&l| l.0 != 0 && l != field.one()).collect();
        let runs: Vec<_> = points.par_iter().map(|&l| legendre_point(&field, l, prec)).collect();
        let mut entries = Vec::new();
        let mut checks = Vec::new();
        for (&l, run) in points.iter().zip(runs) {
            let label = format_element(&field, l);
            match run {
                Ok((v, c)) => {
                    entries.push(v);
                    checks.extend(tagged(&format!("lambda={label}"), c));
                }
                Err(e) if sweep_skippable(&e) => entries.push(error_entry("lambda", label, &e)),
                Err(e) => return Err(e),
            }
        }
        let summary = format!("{} parameters; {}", entries.len(), passed_summary(&checks));
        return Ok(Outcome {
            result: json!({ "points": entries }),
            checks,
            summary,
        });
    }
    let text = cfg.lambda.as_deref().ok_or_else(|| CliError::missing("lambda"))?;
    let lambda = parse_element(&field, "lambda", text)?;
    if lambda.0 == 0 || lambda == field.one() {
        return Err(CliError::validation(
            "SingularParameter",
            "lambda must differ from 0 and 1",
        ));
    }
    let hasse = hasse_for_spec(&HypergeomSpec::legendre(), p)?;
    let (mut result, checks) = legendre_point(&field, lambda, prec)?;
    result["hasse"] = nums(&hasse.coeffs);
    let summary = format!(
        "pi = {} mod {p}^{prec}; {}",
        result["pi"]["value"].as_str().unwrap_or("?"),
        passed_summary(&checks)
    );
    Ok(Outcome {
        result,
        checks,
        summary,
    })
}

fn count(cfg: &JobConfig) -> CmdResult {
    if cfg.extension == 0 {
        return Err(CliError::validation(
            "InvalidParameter",
            "extension degree must be at least 1",
        ));
    }
    let fp = fiber(cfg)?;
    let report = count_points(&fp, cfg.extension)?;
    let q = report.field_size;
    let checks = vec![Check::new(
        "affine_projective_relation",
        report.affine == 1 + (q - 1) * report.projective,
        format!("N' = 1 + (q - 1) N with q = {q}"),
    )];
    let result = json!({
        "t": format_element(fp.field(), fp.t()),
        "k": num(report.k),
        "field_size": num(q),
        "projective": num(report.projective),
        "affine": num(report.affine),
        "smooth": fp.is_smooth(),
    });
    Ok(Outcome {
        summary: format!("N = {}, N' = {} over F_{q}", report.projective, report.affine),
        result,
        checks,
    })
}

fn congruences(cfg: &JobConfig) -> CmdResult {
    let n = cfg.require_n()?;
    let p = cfg.require_good_p(n)?;
    let checks: Vec<Check> = congruence_suite(n, p, &SuiteRanges::default())?
        .into_iter()
        .map(Check::from)
        .collect();
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    Ok(Outcome {
        summary: format!("n = {n}, p = {p}: {}", passed_summary(&checks)),
        result: json!({ "total": num(checks.len()), "failed": num(failed) }),
        checks,
    })
}

fn rational_list(c: &[BigRational]) -> Value {
    nums(c.iter())
}

fn fgl(cfg: &JobConfig) -> CmdResult {
    let n = cfg.require_n()?;
    let d = cfg.degree.unwrap_or(DEFAULT_FGL_DEGREE);
    if d < 3 {
        return Err(CliError::validation("InvalidParameter", "degree must be at least 3"));
    }
    let law = group_law_from_log(dwork_core::series::PolyRing::new(Rationals), dwork_log(n, d)?)?;
    let mut terms = Vec::new();
    for total in 1..d {
        for i in (0..=total).rev() {
            let j = total - i;
            let c = law.law().rows.get(i).and_then(|row| row.get(j));
            if let Some(c) = c.filter(|c| !c.0.is_empty()) {
                terms.push(json!({ "x": num(i), "y": num(j), "coefficient": rational_list(&c.0) }));
            }
        }
    }
    let mut checks: Vec<Check> = law.check_axioms().into_iter().map(Check::from).collect();
    checks.push(dwork_law_integrality(n, d)?.into());
    let w = g_infinity_witness(n, d)?;
    checks.push(Check::new(
        "g_infinity_to_multiplicative",
        w.holds(false),
        format!(
            "h = {} tau + ..., integral = {}",
            w.series.coeffs.get(1).map_or("0".into(), |c| c.to_string()),
            w.integral
        ),
    ));
    let mut result = Map::new();
    result.insert("degree".into(), num(d));
    result.insert(
        "log".into(),
        Value::Array(law.log().coeffs.iter().map(|c| rational_list(&c.0)).collect()),
    );
    result.insert("law".into(), Value::Array(terms));
    if cfg.p.is_some() {
        let p = cfg.require_good_p(n)?;
        let witness = j_to_g_witness(n, p, d)?;
        checks.push(Check::new(
            "j_to_g_strict_isomorphism",
            witness.holds(true),
            format!(
                "strict = {}, p-integral = {} below degree {d}",
                witness.strict, witness.integral
            ),
        ));
        if cfg.t.is_some() {
            let fp = fiber(cfg)?;
            let h_max = if p * p <= MAX_HEIGHT_2_DEGREE { 2 } else { 1 };
            let height = match fiber_height(&fp, h_max)? {
                Height::Finite(h) => json!({ "finite": num(h) }),
                Height::AboveCutoff(h) => json!({ "above": num(h) }),
            };
            result.insert("height".into(), height);
        }
    }
    let result = Value::Object(result);
    Ok(Outcome {
        summary: format!("G_t for n = {n} below degree {d}; {}", passed_summary(&checks)),
        result,
        checks,
    })
}

fn horizontal(cfg: &JobConfig) -> CmdResult {
    let n = cfg.require_n()?;
    let d = cfg.degree.unwrap_or(DEFAULT_HORIZONTAL_DEGREE);
    if d <= n + 1 {
        return Err(CliError::validation("InvalidParameter", "degree must exceed n + 1"));
    }
    let report = verify_horizontal(n, d)?;
    let sc = dwork_section(n, d)?;
    let mut checks = vec![Check::new(
        "theta_annihilates_section",
        report.passed(),
        format!(
            "theta(u) vanishes below lambda^{}, need {}",
            report.zero_through(),
            d - n
        ),
    )];
    if n == 2 {
        let (got_prime, got) = dlambda_form(&legendre_section(d)?)?;
        let (want_prime, want) = legendre_expected(d);
        checks.push(Check::new(
            "legendre_dlambda_form",
            got_prime == want_prime && got == want,
            format!("through lambda^{}", d - 2),
        ));
    }
    let shown = d.min(6);
    let big_c: Vec<Value> = (0..n).map(|i| rational_list(&sc.big_c(i).coeffs[..shown])).collect();
    let result = json!({
        "degree": num(d),
        "m": num(sc.m),
        "epsilon": num(sc.epsilon),
        "zero_through": num(report.zero_through()),
        "first_nonzero": report.first_nonzero.map_or(Value::Null, num),
        "c_leading": big_c,
    });
    Ok(Outcome {
        summary: format!("n = {n}, D = {d}: {}", passed_summary(&checks)),
        result,
        checks,
    })
}

fn pf_check(cfg: &JobConfig) -> CmdResult {
    let n = cfg.require_n()?;
    let d = cfg.degree.unwrap_or(DEFAULT_PF_DEGREE);
    if d < 2 {
        return Err(CliError::validation("InvalidParameter", "degree must be at least 2"));
    }
    let spec = HypergeomSpec::dwork(n)?;
    let s = SeriesRing::new(Rationals, d);
    let f = series_over_q(&spec, d);
    let image = apply_pf_operator(&Rationals, &f, &spec)?;
    let nonzero = image.coeffs.iter().filter(|c| !Rationals.is_zero(c)).count();
    let mut perturbed = f.clone();
    perturbed.coeffs[d - 1] = Rationals.add(&perturbed.coeffs[d - 1], &Rationals.one());
    let detected = !s.is_zero(&apply_pf_operator(&Rationals, &perturbed, &spec)?);
    let checks = vec![
        Check::new(
            "annihilates_f",
            nonzero == 0,
            format!("{nonzero} nonzero coefficients below x^{d}"),
        ),
        Check::new("detects_perturbation", detected, format!("F + x^{}", d - 1)),
    ];
    Ok(Outcome {
        summary: format!("n = {n}, D = {d}: {}", passed_summary(&checks)),
        result: json!({ "degree": num(d), "nonzero_terms": num(nonzero) }),
        checks,
    })
}

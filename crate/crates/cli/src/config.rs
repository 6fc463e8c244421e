use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dwork_core::geometry::BUDGET_ENV;
use dwork_core::padic::{is_prime, FiniteField, FqElem};
use serde::Deserialize;
use serde_json::Value;

use crate::report::CliError;

/// Parameters as read from `--config`; every field is optional and flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub n: Option<usize>,
    pub p: Option<u64>,
    pub r: Option<usize>,
    pub t: Option<Value>,
    pub lambda: Option<Value>,
    pub prec: Option<u32>,
    pub degree: Option<usize>,
    pub extension: Option<usize>,
    pub budget: Option<u128>,
    pub out: Option<PathBuf>,
    pub all_t: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation("InvalidConfig", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::validation("InvalidConfig", e.to_string()))
    }
}

/// A validated job.
#[derive(Clone, Debug, Default)]
pub struct JobConfig {
    pub command: String,
    pub n: Option<usize>,
    pub p: Option<u64>,
    pub r: usize,
    pub t: Option<String>,
    pub lambda: Option<String>,
    pub prec: u32,
    pub degree: Option<usize>,
    pub extension: usize,
    pub budget: Option<u128>,
    pub out: Option<PathBuf>,
    pub all_t: bool,
}

fn value_to_string(v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|i| i.as_u64().map(|x| x.to_string()))
            .collect::<Option<Vec<_>>>()
            .map(|v| v.join(","))
            .ok_or_else(|| CliError::validation("InvalidConfig", "field elements are lists of integers")),
        _ => Err(CliError::validation(
            "InvalidConfig",
            "field elements are strings, integers or lists",
        )),
    }
}

impl JobConfig {
    pub fn from_file(command: &str, file: FileConfig) -> Result<Self, CliError> {
        if let Some(c) = &file.command {
            if c != command {
                return Err(CliError::validation(
                    "InvalidConfig",
                    format!("config is for `{c}`, not `{command}`"),
                ));
            }
        }
        Ok(JobConfig {
            command: command.to_string(),
            n: file.n,
            p: file.p,
            r: file.r.unwrap_or(1),
            t: file.t.as_ref().map(value_to_string).transpose()?,
            lambda: file.lambda.as_ref().map(value_to_string).transpose()?,
            prec: file.prec.unwrap_or(5),
            degree: file.degree,
            extension: file.extension.unwrap_or(1),
            budget: file.budget,
            out: file.out,
            all_t: file.all_t.unwrap_or(false),
        })
    }

    pub fn require_n(&self) -> Result<usize, CliError> {
        let n = self.n.ok_or_else(|| CliError::missing("n"))?;
        if n < 2 {
            return Err(CliError::validation("InvalidParameter", "n must be at least 2"));
        }
        Ok(n)
    }

    pub fn require_p(&self) -> Result<u64, CliError> {
        let p = self.p.ok_or_else(|| CliError::missing("p"))?;
        if !is_prime(p) {
            return Err(CliError::validation("InvalidParameter", format!("{p} is not prime")));
        }
        Ok(p)
    }

    /// `p` with `gcd(p, n+1) = 1`.
    pub fn require_good_p(&self, n: usize) -> Result<u64, CliError> {
        let p = self.require_p()?;
        if (n as u64 + 1) % p == 0 {
            return Err(CliError::validation(
                "BadCharacteristic",
                format!("p = {p} divides n + 1 = {}", n + 1),
            ));
        }
        Ok(p)
    }

    pub fn field(&self, p: u64) -> Result<FiniteField, CliError> {
        if self.r == 0 {
            return Err(CliError::validation("InvalidParameter", "r must be at least 1"));
        }
        let q = (p as u128).checked_pow(self.r as u32).unwrap_or(u128::MAX);
        if q > 1 << 24 {
            return Err(CliError::validation("InvalidParameter", "q = p^r must be at most 2^24"));
        }
        FiniteField::new(p, self.r).map_err(CliError::from_validation)
    }

    pub fn checked_prec(&self, p: u64) -> Result<u32, CliError> {
        if self.prec == 0 || dwork_core::padic::modulus_for(p, self.prec).is_err() {
            return Err(CliError::validation(
                "PrecisionOverflow",
                format!("need 1 <= N and p^N < 2^63, got N = {}", self.prec),
            ));
        }
        Ok(self.prec)
    }

    /// Installs `--budget` as the process-wide enumeration budget.
    pub fn apply_budget(&self) -> Result<(), CliError> {
        if let Some(b) = self.budget {
            if b == 0 {
                return Err(CliError::validation("InvalidParameter", "budget must be positive"));
            }
            std::env::set_var(BUDGET_ENV, b.to_string());
        }
        Ok(())
    }

    pub fn params(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("n", self.n.map(|v| v.to_string()));
        put("p", self.p.map(|v| v.to_string()));
        put("r", Some(self.r.to_string()));
        put("t", self.t.clone());
        put("lambda", self.lambda.clone());
        put("prec", Some(self.prec.to_string()));
        put("degree", self.degree.map(|v| v.to_string()));
        put("extension", Some(self.extension.to_string()));
        put("budget", self.budget.map(|v| v.to_string()));
        put("all_t", Some(self.all_t.to_string()));
        m
    }
}

/// Parse `"c0,c1,..."` (power-basis coordinates, low first) into `F_q`.
pub fn parse_element(field: &FiniteField, name: &str, text: &str) -> Result<FqElem, CliError> {
    let coords = text
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            CliError::validation(
                "InvalidParameter",
                format!("{name} = {text:?} is not a list of integers"),
            )
        })?;
    if coords.len() > field.degree() || coords.iter().any(|&c| c >= field.p()) {
        return Err(CliError::validation(
            "InvalidParameter",
            format!(
                "{name} needs at most {} coordinates below {}",
                field.degree(),
                field.p()
            ),
        ));
    }
    Ok(field.from_coefficients(&coords))
}

pub fn format_element(field: &FiniteField, a: FqElem) -> String {
    let c = field.coefficients(a);
    let used = c.iter().rposition(|&x| x != 0).map_or(1, |i| i + 1);
    c[..used].iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

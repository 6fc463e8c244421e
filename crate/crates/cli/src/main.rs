//! `dwork-lab`: batch front end emitting one JSON document per run.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use config::{FileConfig, JobConfig};
use report::{CliError, Document, ErrorBody, Status, SCHEMA};

#[derive(Parser, Debug)]
#[command(
    name = "dwork-lab",
    version,
    about = "Unit roots, Hasse invariants and formal groups of the Dwork family"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Hasse invariant and the non-ordinary locus over F_q.
    Hasse,
    /// Unit root mod p^N with its factors.
    UnitRoot,
    /// Unit root against the point-count oracle.
    Verify,
    /// Unit root of the Legendre family.
    Legendre,
    /// Point counts of one fiber.
    Count,
    /// Congruences between truncated hypergeometric polynomials.
    Congruences,
    /// Formal group law expansion, isomorphisms and height.
    Fgl,
    /// Horizontal section of the Gauss-Manin connection.
    Horizontal,
    /// Annihilation of F by the Picard-Fuchs operator.
    PfCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Hasse => "hasse",
            Command::UnitRoot => "unit-root",
            Command::Verify => "verify",
            Command::Legendre => "legendre",
            Command::Count => "count",
            Command::Congruences => "congruences",
            Command::Fgl => "fgl",
            Command::Horizontal => "horizontal",
            Command::PfCheck => "pf-check",
        }
    }
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Dimension parameter: the family lives in P^n.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Degree of F_q over F_p.
    #[arg(long, global = true)]
    r: Option<usize>,
    /// Fiber parameter as comma-separated coordinates, lowest first.
    #[arg(long, global = true)]
    t: Option<String>,
    /// Legendre parameter, same format as --t.
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// p-adic precision N.
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// Truncation order D.
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Count over F_{q^k}.
    #[arg(long, global = true)]
    extension: Option<usize>,
    /// Enumeration budget, overriding DWORK_LAB_BUDGET.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON job file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Sweep every nonzero parameter of F_q.
    #[arg(long, global = true)]
    all_t: bool,
}

fn resolve(command: Command, flags: Flags) -> Result<JobConfig, CliError> {
    let file = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut cfg = JobConfig::from_file(command.name(), file)?;
    macro_rules! over {
        ($($field:ident),*) => {
            $(if flags.$field.is_some() {
                cfg.$field = flags.$field;
            })*
        };
    }
    over!(n, p, t, lambda, degree, budget, out);
    if let Some(r) = flags.r {
        cfg.r = r;
    }
    if let Some(prec) = flags.prec {
        cfg.prec = prec;
    }
    if let Some(k) = flags.extension {
        cfg.extension = k;
    }
    cfg.all_t |= flags.all_t;
    cfg.apply_budget()?;
    Ok(cfg)
}

fn emit(doc: &Document, out: Option<&PathBuf>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let command = cli.command;
    let resolved = resolve(command, cli.flags);
    let params = resolved.as_ref().map(JobConfig::params).unwrap_or_default();
    let (cfg, run) = match resolved {
        Ok(cfg) => {
            let run = commands::run(&cfg);
            (cfg, run)
        }
        Err(e) => (
            JobConfig {
                command: command.name().into(),
                ..Default::default()
            },
            Err(e),
        ),
    };
    let elapsed = start.elapsed().as_millis();
    let (doc, code, summary) = match run {
        Ok(outcome) => {
            let failed = outcome.checks.iter().filter(|c| c.status == Status::Fail).count();
            let error = (failed > 0).then(|| ErrorBody {
                name: "ConsistencyFailure".into(),
                message: format!("{failed} checks failed"),
            });
            let code = if failed > 0 { 2 } else { 0 };
            let doc = Document {
                schema: SCHEMA,
                command: cfg.command.clone(),
                params: params.clone(),
                result: outcome.result,
                checks: outcome.checks,
                error,
                timing_ms: elapsed.to_string(),
            };
            (doc, code, outcome.summary)
        }
        Err(e) => {
            let summary = format!("error {}: {}", e.name, e.message);
            let doc = Document {
                schema: SCHEMA,
                command: cfg.command.clone(),
                params,
                result: Value::Null,
                checks: Vec::new(),
                error: Some(ErrorBody {
                    name: e.name.clone(),
                    message: e.message.clone(),
                }),
                timing_ms: elapsed.to_string(),
            };
            (doc, e.exit_code(), summary)
        }
    };
    eprintln!("{}: {summary} ({elapsed} ms)", cfg.command);
    if let Err(e) = emit(&doc, cfg.out.as_ref()) {
        eprintln!("cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}

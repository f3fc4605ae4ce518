//! Command-line front end: `audit`, `tradeoff`, `pir` and `compare`.
//!
//! Parameters come from an optional JSON config file, overridden by flags.
//! Output goes to `--out` or stdout and depends only on the configuration.
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.

mod config;
mod report;

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::{Parser, Subcommand};

use crate::algebra::{lower_convex_envelope, rat, TradeoffPoint};
use crate::auditor::{audit, WorldSpec};
use crate::bounds::{compare_curves, write_curves_csv, CurveRow};
use crate::caching::{parse_caching, tradeoff_point_at, tradeoff_points, Generator, SchemeParams};
use crate::pir::parse_pir;

pub use config::{CommonArgs, FaultArg, Format, RunConfig};
pub use report::{pir_report, PirReport};

#[derive(Debug, Parser)]
#[command(name = "privcache", version, about = "Private coded caching and two-server PIR: exhaustive audits and tradeoff tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate every world of a caching scheme and check decodability, privacy and load.
    Audit(CommonArgs),
    /// Memory-load points of a private caching construction.
    Tradeoff(CommonArgs),
    /// Costs, privacy, independence, recovery sets and lower bound of a PIR scheme.
    Pir(CommonArgs),
    /// Virtual-users and capacity-composition load curves on a common memory grid.
    Compare(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Audit(_) => "audit",
            Command::Tradeoff(_) => "tradeoff",
            Command::Pir(_) => "pir",
            Command::Compare(_) => "compare",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Audit(a) | Command::Tradeoff(a) | Command::Pir(a) | Command::Compare(a) => a,
        }
    }
}

/// Usage and configuration errors (exit 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(&cli.command) {
        Ok(passed) => {
            if passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Runs a parsed command; `Ok(false)` means a gating check failed.
pub fn execute(command: &Command) -> Result<bool, UsageError> {
    let cfg = RunConfig::resolve(command.name(), command.args())?;
    match command {
        Command::Audit(_) => cmd_audit(&cfg),
        Command::Tradeoff(_) => cmd_tradeoff(&cfg),
        Command::Pir(_) => cmd_pir(&cfg),
        Command::Compare(_) => cmd_compare(&cfg),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), UsageError> {
    match out {
        Some(path) => {
            let mut f = File::create(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            f.write_all(bytes)?;
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, UsageError> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, UsageError> {
    v.ok_or_else(|| UsageError(format!("missing --{flag}")))
}

pub fn cmd_audit(cfg: &RunConfig) -> Result<bool, UsageError> {
    let scheme_id = cfg.scheme.as_deref().ok_or_else(|| UsageError("missing --scheme".into()))?;
    let params = SchemeParams {
        n: require(cfg.n, "n")?,
        k: require(cfg.k, "k")?,
        t: require(cfg.t, "t")?,
        q: cfg.q,
        symbol_len: cfg.symbol_len.unwrap_or(1),
    };
    let format = cfg.format.unwrap_or(Format::Json);
    if format != Format::Json {
        return Err(UsageError("audit writes JSON; use --dump-table for the CSV table".into()));
    }
    let mut spec = WorldSpec::new(parse_caching(scheme_id, params)?);
    if let Some(b) = cfg.budget {
        spec = spec.with_budget(b as u128);
    }
    if let Some(f) = cfg.fault {
        spec = spec.with_fault(f.into());
    }
    let (report, enumeration) = audit(&spec)?;
    if let Some(path) = &cfg.dump_table {
        let f = File::create(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        enumeration.table.write_csv(f)?;
    }
    emit(cfg.out.as_deref(), &to_json(&report)?)?;
    eprintln!("decodability: {}", verdict(report.decodability.passed));
    for (d, c) in report.demand_privacy.iter().zip(&report.cache_privacy) {
        eprintln!(
            "user {}: demand privacy {} (MI {:.6} bits), cache privacy {} (MI {:.6} bits)",
            d.user,
            verdict(d.passed),
            d.mi_bits,
            verdict(c.passed),
            c.mi_bits
        );
    }
    eprintln!(
        "measured (M, R) = ({}, {}); {}",
        report.measured.memory,
        report.measured.load,
        if report.passed { "all checks pass" } else { "some checks FAIL" }
    );
    Ok(report.passed)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Builds a tradeoff generator from its id.
pub fn parse_generator(cfg: &RunConfig) -> Result<Generator, UsageError> {
    let id = cfg.scheme.as_deref().ok_or_else(|| UsageError("missing --scheme".into()))?;
    let mu = cfg.mu.clone();
    Ok(match id {
        "thm2" | "vu" => Generator::VirtualUsers,
        "cor1" => Generator::CapacityPir,
        "cor_smallN" | "cor_small_n" => Generator::SmallN {
            mu1: mu.unwrap_or_else(|| rat(1, 2)),
        },
        "privacy_key" | "pk" => Generator::PrivacyKey,
        other => match other.strip_prefix("compose:") {
            Some(pir) => Generator::Compose {
                pir: parse_pir(pir, cfg.q)?,
                mu1: mu.unwrap_or_else(|| rat(1, 1)),
            },
            None => return Err(UsageError(format!("unknown tradeoff generator {other:?}"))),
        },
    })
}

pub fn cmd_tradeoff(cfg: &RunConfig) -> Result<bool, UsageError> {
    let generator = parse_generator(cfg)?;
    let (n, k) = (require(cfg.n, "n")?, require(cfg.k, "k")?);
    let points: Vec<TradeoffPoint> = match cfg.t {
        Some(t) => vec![tradeoff_point_at(&generator, n, k, t)?],
        None if cfg.raw => tradeoff_points(&generator, n, k)?,
        None => lower_convex_envelope(&tradeoff_points(&generator, n, k)?)?,
    };
    let rows: Vec<CurveRow> = points
        .into_iter()
        .map(|p| CurveRow {
            scheme: generator.name(),
            memory: p.memory,
            load: p.load,
            subpacketization: Some(p.subpacketization.to_string()),
        })
        .collect();
    write_rows(cfg, &rows)?;
    Ok(true)
}

fn write_rows(cfg: &RunConfig, rows: &[CurveRow]) -> Result<(), UsageError> {
    let bytes = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_curves_csv(rows, &mut buf)?;
            buf
        }
        Format::Json => to_json(&rows)?,
        Format::Text => return Err(UsageError("use --format csv or json".into())),
    };
    emit(cfg.out.as_deref(), &bytes)
}

pub fn cmd_pir(cfg: &RunConfig) -> Result<bool, UsageError> {
    let id = cfg.scheme.as_deref().ok_or_else(|| UsageError("missing --scheme".into()))?;
    let scheme = parse_pir(id, cfg.q)?;
    let report = pir_report(scheme.as_ref(), cfg.budget.map(|b| b as u128))?;
    let bytes = match cfg.format.unwrap_or(Format::Text) {
        Format::Text => report.render_text().into_bytes(),
        Format::Json => to_json(&report)?,
        Format::Csv => return Err(UsageError("pir reports are text or JSON".into())),
    };
    emit(cfg.out.as_deref(), &bytes)?;
    Ok(report.passed)
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<bool, UsageError> {
    let rows = compare_curves(require(cfg.n, "n")?, require(cfg.k, "k")?)?;
    write_rows(cfg, &rows)?;
    Ok(true)
}

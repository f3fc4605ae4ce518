use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_rational, Rational};
use crate::auditor::Fault;

use super::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultArg {
    CorruptPayload,
    LeakQ1InMetadata,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::CorruptPayload => Fault::CorruptPayload,
            FaultArg::LeakQ1InMetadata => Fault::LeakQ1InMetadata,
        }
    }
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct CommonArgs {
    /// JSON file with any of the fields below; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scheme or generator id, e.g. compose:signed4, vu, man, tsc2, cc2pir:man:9:3, cor1.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Number of files (messages).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of users.
    #[arg(long)]
    pub k: Option<usize>,
    /// Cache parameter t.
    #[arg(long)]
    pub t: Option<usize>,
    /// Field size (prime).
    #[arg(long)]
    pub q: Option<u32>,
    /// Time-sharing weight of server 1, as a/b.
    #[arg(long)]
    pub mu: Option<String>,
    /// Symbols per subfile.
    #[arg(long)]
    pub symbol_len: Option<usize>,
    /// Accepted for sampled runs; exhaustive audits ignore it.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Maximum number of enumerated worlds.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Also write the joint distribution table as CSV (audit).
    #[arg(long)]
    pub dump_table: Option<PathBuf>,
    /// Inject a defect (audit).
    #[arg(long, value_enum)]
    pub fault: Option<FaultArg>,
    /// Emit raw points instead of the lower convex envelope (tradeoff).
    #[arg(long)]
    pub raw: bool,
}

/// Fields of the JSON config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub scheme: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub t: Option<usize>,
    pub q: Option<u32>,
    pub mu: Option<String>,
    pub symbol_len: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub budget: Option<u64>,
    pub dump_table: Option<PathBuf>,
    pub fault: Option<FaultArg>,
    #[serde(default)]
    pub raw: bool,
}

/// Effective configuration of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub scheme: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub t: Option<usize>,
    pub q: Option<u32>,
    pub mu: Option<Rational>,
    pub symbol_len: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub budget: Option<u64>,
    pub dump_table: Option<PathBuf>,
    pub fault: Option<FaultArg>,
    pub raw: bool,
}

impl RunConfig {
    pub fn resolve(command: &str, args: &CommonArgs) -> Result<RunConfig, UsageError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        if let Some(c) = &file.command {
            if c != command {
                return Err(UsageError(format!("config is for command {c:?}, not {command:?}")));
            }
        }
        let mu = match args.mu.clone().or(file.mu) {
            Some(s) => Some(parse_rational(&s).map_err(|_| UsageError(format!("bad --mu {s:?}; expected a/b")))?),
            None => None,
        };
        Ok(RunConfig {
            command: command.to_string(),
            scheme: args.scheme.clone().or(file.scheme),
            n: args.n.or(file.n),
            k: args.k.or(file.k),
            t: args.t.or(file.t),
            q: args.q.or(file.q),
            mu,
            symbol_len: args.symbol_len.or(file.symbol_len),
            seed: args.seed.or(file.seed),
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format),
            budget: args.budget.or(file.budget),
            dump_table: args.dump_table.clone().or(file.dump_table),
            fault: args.fault.or(file.fault),
            raw: args.raw || file.raw,
        })
    }
}

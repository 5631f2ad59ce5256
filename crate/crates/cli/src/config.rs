//! Run settings: command-line flags over a flat `key = value` config file
//! over built-in defaults.

use std::path::{Path, PathBuf};

use bbg_core::hp::{DEFAULT_MANTISSA_BITS, PRECISION_ENV_VAR};
use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Flags shared by every subcommand; unset flags fall back to the config
/// file, then to the command's default.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Number of terms, or the orbit length for `discrepancy`.
    #[arg(long, global = true)]
    pub n: Option<u64>,
    /// Rotation angle for `sum`, as a decimal.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Wild threshold: `sin n > 1 - delta`.
    #[arg(long, global = true)]
    pub delta: Option<String>,
    /// Highest harmonic for `harmonics`.
    #[arg(long, global = true)]
    pub kmax: Option<u64>,
    /// Truncation point for `harmonics` and `phi`.
    #[arg(long, global = true)]
    pub terms: Option<u64>,
    /// Dirichlet exponent for `phi`.
    #[arg(long, global = true)]
    pub s: Option<String>,
    /// Number of partial quotients for `cf`.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Comma-separated ascending checkpoints.
    #[arg(long, global = true, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    /// Mantissa bits; overrides the config file and BBG_PRECISION_BITS.
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Reduce every sine directly instead of using the rotation stream.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Search bound for `wild` and `plotdata wild`.
    #[arg(long, global = true)]
    pub max: Option<u64>,
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Decimal parameter accepted as a quoted string or a bare number.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Decimal {
    Text(String),
    Number(f64),
}

impl Decimal {
    fn into_text(self) -> String {
        match self {
            Decimal::Text(s) => s,
            // shortest round-trip form, so `0.1` stays the decimal 0.1
            Decimal::Number(x) => x.to_string(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<u64>,
    pub alpha: Option<Decimal>,
    pub delta: Option<Decimal>,
    pub kmax: Option<u64>,
    pub terms: Option<u64>,
    pub s: Option<Decimal>,
    pub depth: Option<usize>,
    pub checkpoints: Option<Vec<u64>>,
    pub prec: Option<u32>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub exact: Option<bool>,
    pub max: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }
}

/// Fully merged settings; command defaults are applied at use.
#[derive(Debug, Clone)]
pub struct Settings {
    pub n: Option<u64>,
    pub alpha: Option<String>,
    pub delta: Option<String>,
    pub kmax: Option<u64>,
    pub terms: Option<u64>,
    pub s: Option<String>,
    pub depth: Option<usize>,
    pub checkpoints: Option<Vec<u64>>,
    pub prec: u32,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub exact: bool,
    pub max: Option<u64>,
}

impl Settings {
    /// `env_prec` is the value of `BBG_PRECISION_BITS`, if set.
    pub fn resolve(flags: Flags, file: FileConfig, env_prec: Option<&str>) -> Result<Self, String> {
        let env_prec = env_prec
            .map(|raw| {
                raw.trim()
                    .parse::<u32>()
                    .map_err(|_| format!("{PRECISION_ENV_VAR}={raw:?} is not an integer"))
            })
            .transpose()?;
        Ok(Self {
            n: flags.n.or(file.n),
            alpha: flags.alpha.or(file.alpha.map(Decimal::into_text)),
            delta: flags.delta.or(file.delta.map(Decimal::into_text)),
            kmax: flags.kmax.or(file.kmax),
            terms: flags.terms.or(file.terms),
            s: flags.s.or(file.s.map(Decimal::into_text)),
            depth: flags.depth.or(file.depth),
            checkpoints: flags.checkpoints.or(file.checkpoints),
            prec: flags.prec.or(file.prec).or(env_prec).unwrap_or(DEFAULT_MANTISSA_BITS),
            format: flags.format.or(file.format),
            out: flags.out.or(file.out),
            exact: flags.exact || file.exact.unwrap_or(false),
            max: flags.max.or(file.max),
        })
    }
}

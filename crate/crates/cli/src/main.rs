mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use bbg_core::hp::PRECISION_ENV_VAR;
use bbg_core::PrecisionContext;
use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{CliError, Output, PlotKind};
use config::{FileConfig, Flags, Format, Settings};

/// Extended-precision experiments on the series sum (1/n)((2 + sin n)/3)^n.
///
/// Exit status: 0 on success, 1 when a reported check fails, 2 on a usage
/// error or a violated precondition.
#[derive(Parser, Debug)]
#[command(name = "bbg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Partial sum S_N, optionally with sin(n alpha).
    Sum,
    /// S_N split into the averaged part M_N and the remainder R_N.
    Decompose,
    /// Harmonic contributions 2 Re H_k(1), k = 1..kmax.
    Harmonics,
    /// Integers with sin n close to 1 and the saddle-point audit.
    Wild,
    /// Certified continued fraction of 1/(2 pi).
    Cf,
    /// Star discrepancy of n/(2 pi) mod 1 and the Erdos-Turan bound.
    Discrepancy,
    /// Dirichlet remainder series Phi(s).
    Phi,
    /// Full reproduction battery as one document.
    Report,
    /// CSV data for plotting.
    Plotdata {
        #[arg(value_enum)]
        kind: PlotKind,
    },
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Sum => "sum",
            Command::Decompose => "decompose",
            Command::Harmonics => "harmonics",
            Command::Wild => "wild",
            Command::Cf => "cf",
            Command::Discrepancy => "discrepancy",
            Command::Phi => "phi",
            Command::Report => "report",
            Command::Plotdata { .. } => "plotdata",
        }
    }
}

fn settings(flags: Flags) -> Result<Settings, CliError> {
    let file = match &flags.config {
        Some(path) => FileConfig::load(path).map_err(CliError::Usage)?,
        None => FileConfig::default(),
    };
    let env = std::env::var(PRECISION_ENV_VAR).ok();
    Settings::resolve(flags, file, env.as_deref()).map_err(CliError::Usage)
}

fn execute(command: Command, s: &Settings, ctx: &PrecisionContext) -> Result<Output, CliError> {
    match command {
        Command::Sum => commands::sum(s, ctx),
        Command::Decompose => commands::decompose(s, ctx),
        Command::Harmonics => commands::harmonics(s, ctx),
        Command::Wild => commands::wild(s, ctx),
        Command::Cf => commands::cf(s, ctx),
        Command::Discrepancy => commands::discrepancy(s, ctx),
        Command::Phi => commands::phi(s, ctx),
        Command::Report => commands::report(ctx),
        Command::Plotdata { kind } => commands::plotdata(kind, s, ctx),
    }
}

fn render(command: Command, out: &Output, format: Format, precision_bits: u32, runtime_ms: u128) -> String {
    match format {
        Format::Json => {
            // everything outside "metadata" is reproducible byte for byte
            let doc = json!({
                "command": command.name(),
                "precision_bits": precision_bits,
                "result": out.result,
                "metadata": { "runtime_ms": runtime_ms },
            });
            bbg_core::export::to_json(&doc)
        }
        Format::Csv => out.table.to_csv_string(),
        Format::Text => out.text.clone(),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let s = settings(cli.flags)?;
    let ctx = PrecisionContext::with_mantissa_bits(s.prec)?;
    let start = Instant::now();
    let out = execute(cli.command, &s, &ctx)?;
    let runtime_ms = start.elapsed().as_millis();
    let format = match cli.command {
        Command::Plotdata { .. } => Format::Csv,
        _ => s.format.unwrap_or(out.default_format),
    };
    let body = render(cli.command, &out, format, ctx.mantissa_bits(), runtime_ms);
    match &s.out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(if out.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bbg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

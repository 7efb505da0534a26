use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use thiserror::Error;

mod commands;
mod config;

use commands::Outcome;
use config::{Cli, Command, Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Compute(#[from] dualhankel::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Compute(dualhankel::Error::Domain { .. }) => 2,
            _ => 1,
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify => "verify",
        Command::Kernel { .. } => "kernel",
        Command::Transform { .. } => "transform",
        Command::Spectrum { .. } => "spectrum",
        Command::Nullspace { .. } => "nullspace",
        Command::Quadrature { .. } => "quadrature",
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Verify => commands::verify(cfg),
        Command::Kernel { q, x, p } => commands::kernel(cfg, q, *x, p.as_deref()),
        Command::Transform { coeffs, q } => commands::transform(cfg, coeffs, q),
        Command::Spectrum { p_grid } => commands::spectrum(cfg, p_grid),
        Command::Nullspace {
            zeros_of,
            scan,
            scan_max,
        } => commands::nullspace(cfg, *zeros_of, *scan, *scan_max),
        Command::Quadrature { family } => commands::quadrature(cfg, *family),
    }
}

fn render(cmd: &Command, cfg: &RunConfig, out: Outcome) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => {
            let doc = json!({
                "version": dualhankel::verify::VERSION,
                "command": command_name(cmd),
                "params": cfg.params,
                "truncation": cfg.truncation,
                "seed": cfg.seed,
                "report": out.json,
            });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut s = out.csv_header.join(",");
            s.push('\n');
            for row in out.csv_rows {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            Ok(s)
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let cfg = RunConfig::resolve(&cli.common)?;
    let out = dispatch(&cli.command, &cfg)?;
    let failed = out.failed.clone();
    let text = render(&cli.command, &cfg, out)?;
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string()))?,
    }
    Ok(failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(failed) if failed.is_empty() => ExitCode::SUCCESS,
        Ok(failed) => {
            for f in failed {
                eprintln!("check failed: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

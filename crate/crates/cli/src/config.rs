use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualhankel::Params;
use serde::Serialize;

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "dualhankel", version, about = "Numerical lab for the dual fractional Hankel transform")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. All are optional so that a config file
/// can supply them; flags win over the file.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Laguerre parameter, alpha > -1.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Weight exponent beta > 0.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Weight exponent eta > 0.
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Frozen kernel argument y >= 0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// Truncation (series terms, matrix size or node count; see each command).
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Override every tolerance of `verify`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized inputs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file with defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Run the identity suite; exit 1 if any check fails.
    Verify,
    /// Evaluate the Hankel kernel R_q(x, y) in closed form and as a series.
    Kernel {
        /// Point of the ball as `w,x,y,z`.
        #[arg(long, default_value = "0.3,0.2,0,0", allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        /// Also evaluate the Bergman kernel K(p, q).
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
    },
    /// Apply S^alpha_y to a Laguerre expansion.
    Transform {
        /// Coefficients of phi_0, phi_1, ... separated by `;`, each real or `w,x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// Evaluation points separated by `;`.
        #[arg(long, default_value = "0,0,0,0;0.5,0,0,0;0.3,0.4,0,0", allow_hyphen_values = true)]
        q: String,
    },
    /// Singular values, c_n, Schatten sums and boundedness diagnostics.
    Spectrum {
        /// Schatten exponents separated by commas.
        #[arg(long, default_value = "1,1.5,2,3,4,6,8")]
        p_grid: String,
    },
    /// Null set N_y and the surviving range directions.
    Nullspace {
        /// Report each zero of L_n^(alpha) instead of the configured y.
        #[arg(long)]
        zeros_of: Option<usize>,
        /// Report this many random y in [0, scan_max).
        #[arg(long)]
        scan: Option<usize>,
        #[arg(long, default_value_t = 10.0)]
        scan_max: f64,
    },
    /// Dump a Gauss rule.
    Quadrature {
        #[arg(long, value_enum, default_value_t = Family::Laguerre)]
        family: Family,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Laguerre,
    Jacobi,
}

/// Fully resolved settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: Params,
    pub truncation: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 20240611;

impl RunConfig {
    pub fn resolve(flags: &CommonArgs) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_config_file(path)?,
            None => CommonArgs::default(),
        };
        let pick = |a: Option<f64>, b: Option<f64>, d: f64| a.or(b).unwrap_or(d);
        let params = Params::new(
            pick(flags.alpha, file.alpha, 0.0),
            pick(flags.beta, file.beta, 1.0),
            pick(flags.eta, file.eta, 1.0),
            pick(flags.y, file.y, 0.5),
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let tol = flags.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t > 0.0) {
                return Err(CliError::Config(format!("tol must be positive, got {t}")));
            }
        }
        let truncation = flags.trunc.or(file.trunc);
        if truncation == Some(0) {
            return Err(CliError::Config("trunc must be at least 1".into()));
        }
        Ok(Self {
            params,
            truncation,
            tol,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            format: flags.format.or(file.format).unwrap_or_default(),
            out: flags.out.clone().or(file.out),
        })
    }
}

/// Parses `key = value` lines; `#` starts a comment. Unknown keys are errors.
pub fn parse_config(text: &str) -> Result<CommonArgs, CliError> {
    let mut c = CommonArgs::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| CliError::Config(format!("config line {}: {msg}", lineno + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let (key, value) = (key.trim(), value.trim());
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad(&format!("bad number {v:?}")));
        let int = |v: &str| v.parse::<u64>().map_err(|_| bad(&format!("bad integer {v:?}")));
        match key {
            "alpha" => c.alpha = Some(num(value)?),
            "beta" => c.beta = Some(num(value)?),
            "eta" => c.eta = Some(num(value)?),
            "y" => c.y = Some(num(value)?),
            "tol" => c.tol = Some(num(value)?),
            "trunc" => c.trunc = Some(int(value)? as usize),
            "seed" => c.seed = Some(int(value)?),
            "format" => {
                c.format = Some(Format::from_str(value, true).map_err(|_| bad(&format!("bad format {value:?}")))?)
            }
            "out" => c.out = Some(PathBuf::from(value)),
            other => return Err(bad(&format!("unknown key {other:?}"))),
        }
    }
    Ok(c)
}

fn read_config_file(path: &Path) -> Result<CommonArgs, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

use dualhankel::kernels::{
    bergman_kernel_closed, bergman_kernel_series, hankel_kernel_series, HankelKernel, DEFAULT_BERGMAN_TERMS,
    DEFAULT_HILLE_HARDY_TERMS,
};
use dualhankel::ops::{
    dual_transform_spectral, range_basis_report, DualTransform, LaguerreCoeffs, DEFAULT_LAGUERRE_NODES,
};
use dualhankel::quad::{gauss_jacobi_unit, gauss_laguerre};
use dualhankel::spectral::spectral_report;
use dualhankel::specfun::laguerre_zeros;
use dualhankel::verify::{run_verify, VerifyConfig};
use dualhankel::Quaternion;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Family, RunConfig};
use crate::CliError;

/// A command's result: the JSON body, a CSV table, and whether it counts as a
/// failure for the exit status.
pub struct Outcome {
    pub json: Value,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    pub failed: Vec<String>,
}

impl Outcome {
    fn new(body: impl Serialize, csv_header: Vec<&'static str>, csv_rows: Vec<Vec<String>>) -> Result<Self, CliError> {
        Ok(Self {
            json: serde_json::to_value(body).map_err(|e| CliError::Output(e.to_string()))?,
            csv_header,
            csv_rows,
            failed: Vec::new(),
        })
    }
}

/// 17 significant digits, round-trips every double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn quat_cells(q: Quaternion) -> [String; 4] {
    q.to_array().map(num)
}

pub fn parse_quaternion(s: &str) -> Result<Quaternion, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("bad quaternion {s:?}")))?;
    match parts.as_slice() {
        [w] => Ok(Quaternion::real(*w)),
        [w, x, y, z] => Ok(Quaternion::new(*w, *x, *y, *z)),
        _ => Err(CliError::Config(format!("quaternion {s:?} needs 1 or 4 components"))),
    }
}

fn parse_list(s: &str) -> Result<Vec<Quaternion>, CliError> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_quaternion).collect()
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let vc = VerifyConfig {
        params: cfg.params,
        truncation: cfg.truncation.unwrap_or(40),
        tol: cfg.tol,
        seed: cfg.seed,
    };
    let report = run_verify(&vc);
    let rows = report
        .checks
        .iter()
        .map(|c| vec![c.name.clone(), num(c.error), num(c.tolerance), c.passed.to_string()])
        .collect();
    let failed = report
        .failures()
        .map(|c| format!("{}: error {:.3e} > tolerance {:.3e}", c.name, c.error, c.tolerance))
        .collect();
    let mut out = Outcome::new(&report.checks, vec!["name", "error", "tolerance", "passed"], rows)?;
    out.json = json!({ "passed": report.passed, "checks": out.json });
    out.failed = failed;
    Ok(out)
}

#[derive(Serialize)]
struct KernelReport {
    q: Quaternion,
    x: f64,
    y: f64,
    closed: Quaternion,
    series: Quaternion,
    series_terms: usize,
    abs_diff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bergman: Option<BergmanReport>,
}

#[derive(Serialize)]
struct BergmanReport {
    p: Quaternion,
    series: Quaternion,
    series_terms: usize,
    /// Present when `p` and `q` share a slice.
    closed: Option<Quaternion>,
}

pub fn kernel(cfg: &RunConfig, q: &str, x: f64, p: Option<&str>) -> Result<Outcome, CliError> {
    let q = parse_quaternion(q)?;
    let a = cfg.params.alpha;
    let y = cfg.params.y;
    let terms = cfg.truncation.unwrap_or(DEFAULT_HILLE_HARDY_TERMS);
    let closed = HankelKernel::new(a)?.eval(q, x, y)?;
    let series = hankel_kernel_series(q, x, y, a, terms)?;
    let mut rows = vec![
        [vec!["hankel_closed".to_string()], quat_cells(closed).to_vec()].concat(),
        [vec!["hankel_series".to_string()], quat_cells(series).to_vec()].concat(),
    ];
    let bergman = match p {
        Some(p) => {
            let p = parse_quaternion(p)?;
            let (b, e) = (cfg.params.beta, cfg.params.eta);
            let series = bergman_kernel_series(p, q, b, e, DEFAULT_BERGMAN_TERMS)?;
            let closed = if b == 1.0 { bergman_kernel_closed(p, q, e).ok() } else { None };
            rows.push([vec!["bergman_series".to_string()], quat_cells(series).to_vec()].concat());
            if let Some(c) = closed {
                rows.push([vec!["bergman_closed".to_string()], quat_cells(c).to_vec()].concat());
            }
            Some(BergmanReport {
                p,
                series,
                series_terms: DEFAULT_BERGMAN_TERMS,
                closed,
            })
        }
        None => None,
    };
    let report = KernelReport {
        q,
        x,
        y,
        abs_diff: closed.max_abs_diff(series),
        closed,
        series,
        series_terms: terms,
        bergman,
    };
    Outcome::new(report, vec!["quantity", "w", "x", "y", "z"], rows)
}

#[derive(Serialize)]
struct TransformPoint {
    q: Quaternion,
    spectral: Quaternion,
    quadrature: Quaternion,
    abs_diff: f64,
}

#[derive(Serialize)]
struct TransformReport {
    input: Vec<Quaternion>,
    image_coeffs: Vec<Quaternion>,
    nodes: usize,
    points: Vec<TransformPoint>,
}

pub fn transform(cfg: &RunConfig, coeffs: &str, q: &str) -> Result<Outcome, CliError> {
    let phi = LaguerreCoeffs::new(cfg.params.alpha, parse_list(coeffs)?)?;
    if phi.is_empty() {
        return Err(CliError::Config("no coefficients given".into()));
    }
    let nodes = cfg.truncation.unwrap_or(DEFAULT_LAGUERRE_NODES);
    let image = dual_transform_spectral(&phi, cfg.params.y)?;
    let st = DualTransform::new(cfg.params.alpha, cfg.params.y, nodes)?;
    let samples = st.sample_coeffs(&phi)?;
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for q in parse_list(q)? {
        let spectral = image.eval(q)?;
        let quadrature = st.apply_sampled(&samples, q)?;
        rows.push([quat_cells(q), quat_cells(spectral), quat_cells(quadrature)].concat());
        points.push(TransformPoint {
            q,
            abs_diff: spectral.max_abs_diff(quadrature),
            spectral,
            quadrature,
        });
    }
    let report = TransformReport {
        input: phi.coeffs.clone(),
        image_coeffs: image.coeffs,
        nodes,
        points,
    };
    let header = vec![
        "q_w", "q_x", "q_y", "q_z", "spec_w", "spec_x", "spec_y", "spec_z", "quad_w", "quad_x", "quad_y", "quad_z",
    ];
    Outcome::new(report, header, rows)
}

pub fn spectrum(cfg: &RunConfig, p_grid: &str) -> Result<Outcome, CliError> {
    let ps: Vec<f64> = p_grid
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("bad p grid {p_grid:?}")))?;
    let n = cfg.truncation.unwrap_or(1000);
    if n < 20 {
        return Err(CliError::Config("spectrum needs trunc >= 20".into()));
    }
    let report = spectral_report(&cfg.params, n, &ps)?;
    let rows = report
        .singular_values
        .iter()
        .zip(&report.c_sequence)
        .enumerate()
        .map(|(k, (s, c))| vec![k.to_string(), num(*s), num(*c)])
        .collect();
    Outcome::new(report, vec!["n", "s_n", "c_n"], rows)
}

#[derive(Serialize)]
struct NullEntry {
    y: f64,
    null_indices: Vec<usize>,
    dim_ker: usize,
    strict_inclusion: bool,
}

#[derive(Serialize)]
struct NullReport {
    truncation: usize,
    entries: Vec<NullEntry>,
    /// Number of entries with a nonempty null set.
    nonempty: usize,
}

pub fn nullspace(cfg: &RunConfig, zeros_of: Option<usize>, scan: Option<usize>, scan_max: f64) -> Result<Outcome, CliError> {
    let n = cfg.truncation.unwrap_or(50);
    let a = cfg.params.alpha;
    let ys: Vec<f64> = match (zeros_of, scan) {
        (Some(_), Some(_)) => return Err(CliError::Config("use either --zeros-of or --scan".into())),
        (Some(k), None) => laguerre_zeros(k, a)?,
        (None, Some(count)) => {
            if !(scan_max > 0.0) {
                return Err(CliError::Config("scan-max must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..count).map(|_| rng.gen_range(0.0..scan_max)).collect()
        }
        (None, None) => vec![cfg.params.y],
    };
    let mut entries = Vec::new();
    for y in ys {
        let r = range_basis_report(y, a, n)?;
        entries.push(NullEntry {
            y,
            dim_ker: r.null_indices.len(),
            strict_inclusion: r.strict_inclusion,
            null_indices: r.null_indices,
        });
    }
    let rows = entries
        .iter()
        .map(|e| {
            let idx: Vec<String> = e.null_indices.iter().map(|k| k.to_string()).collect();
            vec![num(e.y), e.dim_ker.to_string(), idx.join(";"), e.strict_inclusion.to_string()]
        })
        .collect();
    let report = NullReport {
        truncation: n,
        nonempty: entries.iter().filter(|e| e.dim_ker > 0).count(),
        entries,
    };
    Outcome::new(report, vec!["y", "dim_ker", "null_indices", "strict_inclusion"], rows)
}

pub fn quadrature(cfg: &RunConfig, family: Family) -> Result<Outcome, CliError> {
    let n = cfg.truncation.unwrap_or(64);
    let rule = match family {
        Family::Laguerre => gauss_laguerre(n, cfg.params.alpha)?,
        Family::Jacobi => gauss_jacobi_unit(n, cfg.params.beta, cfg.params.eta)?,
    };
    let rows = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .enumerate()
        .map(|(i, (x, w))| vec![i.to_string(), num(*x), num(*w)])
        .collect();
    Outcome::new(&rule, vec!["i", "node", "weight"], rows)
}

//! Named identity checks with measured errors, run as one suite.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernels::{diagonal_identity_check, hankel_kernel_series, kernel_reproduce_check, BergmanKernel, HankelKernel};
use crate::ops::{
    adjoint_apply_quadrature, adjoint_apply_spectral, bargmann_apply, build_operator_matrix, dual_transform_spectral,
    inner_omega_quadrature, null_space_indices, slice_derivative, DualTransform, FractionalHankel, LaguerreCoeffs,
    MatrixForm, MonomialCoeffs, DEFAULT_LAGUERRE_NODES, DEFAULT_NULL_TOL,
};
use crate::quad::{disk_rule, gauss_laguerre};
use crate::quat::{lift, unit_axis, Quaternion, SlicePoint};
use crate::spectral::{decay_fit, schatten_report, singular_values_closed, svd_factorization_check, svd_small};
use crate::specfun::{gamma, gamma_moments, laguerre_zeros, phi_n, phi_sequence, Params};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub params: Params,
    /// Size of the operator truncation used by the matrix checks.
    pub truncation: usize,
    /// Replaces every per-check tolerance when set.
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            params: Params::new(0.0, 1.0, 1.0, 0.5).expect("valid defaults"),
            truncation: 40,
            tol: None,
            seed: 20240611,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Measured error against the default tolerance.
struct Measured {
    error: f64,
    tolerance: f64,
    detail: Option<String>,
}

impl Measured {
    fn new(error: f64, tolerance: f64) -> Self {
        Self {
            error,
            tolerance,
            detail: None,
        }
    }

    fn note(mut self, s: String) -> Self {
        self.detail = Some(s);
        self
    }
}

type CheckFn = fn(&VerifyConfig) -> Result<Measured>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("adjoint_coefficients", adjoint_coefficients),
    ("adjoint_quadrature", adjoint_quadrature),
    ("bargmann_proportionality", bargmann_proportionality),
    ("bergman_moments", bergman_moments),
    ("decay_slope_y0", decay_slope_y0),
    ("decay_slope_y1", decay_slope_y1),
    ("diagonal_identity", diagonal_identity),
    ("eigen_relation", eigen_relation),
    ("factorization", factorization),
    ("hille_hardy", hille_hardy),
    ("kernel_reproduces_kernel", kernel_reproduces),
    ("null_space", null_space),
    ("parseval", parseval),
    ("partial_isometry_projection", projection),
    ("reproducing_property", reproducing),
    ("schatten_verdicts", schatten_verdicts),
    ("semigroup", semigroup),
    ("slice_regularity", slice_regularity),
    ("svd_cross_check", svd_cross_check),
];

/// Names of the checks in report order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check concurrently; the report is ordered by check name.
pub fn run_verify(config: &VerifyConfig) -> VerifyReport {
    let mut checks: Vec<CheckResult> = CHECKS
        .par_iter()
        .map(|(name, f)| {
            let (error, tol, detail) = match f(config) {
                Ok(m) => (m.error, m.tolerance, m.detail),
                Err(e) => (f64::INFINITY, 0.0, Some(e.to_string())),
            };
            let tolerance = config.tol.unwrap_or(tol);
            CheckResult {
                name: name.to_string(),
                passed: error <= tolerance,
                error,
                tolerance,
                detail,
            }
        })
        .collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    VerifyReport {
        version: VERSION.to_string(),
        config: *config,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn rng(cfg: &VerifyConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

fn random_quat(r: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
    )
}

fn random_coeffs(r: &mut ChaCha8Rng, n: usize) -> Vec<Quaternion> {
    (0..n).map(|_| random_quat(r)).collect()
}

fn axes() -> Vec<Quaternion> {
    [
        Quaternion::new(0.0, 1.0, 0.0, 0.0),
        Quaternion::new(0.0, 0.0, 0.6, 0.8),
        Quaternion::new(0.0, 1.0, -1.0, 1.0),
    ]
    .into_iter()
    .map(|a| unit_axis(a).expect("nonzero axis"))
    .collect()
}

/// Interior points on the three test slices with `|q| <= r_max`.
fn q_grid(r_max: f64) -> Vec<Quaternion> {
    let mut out = vec![Quaternion::ZERO];
    for (i, axis) in axes().into_iter().enumerate() {
        for k in 1..=3 {
            let r = r_max * k as f64 / 3.0;
            out.push(lift(Complex64::from_polar(r, 0.4 + 1.1 * i as f64 + 0.7 * k as f64), axis));
        }
    }
    out
}

fn with_config<T: PartialEq + Copy>(grid: &[T], extra: T) -> Vec<T> {
    let mut v = grid.to_vec();
    if !v.contains(&extra) {
        v.push(extra);
    }
    v
}

fn hille_hardy(cfg: &VerifyConfig) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for a in with_config(&[-0.5, 0.0, 1.0, 2.5], cfg.params.alpha) {
        let k = HankelKernel::new(a)?;
        for (i, axis) in axes().into_iter().enumerate() {
            for &r in &[0.3, 0.5, 0.7] {
                let q = lift(Complex64::from_polar(r, 0.4 + 1.1 * i as f64), axis);
                for &x in &[0.1, 1.0, 5.0, 10.0] {
                    for &y in &[0.1, 1.0, 5.0, 10.0] {
                        let c = k.eval(q, x, y)?;
                        let s = hankel_kernel_series(q, x, y, a, 80)?;
                        worst = worst.max(c.max_abs_diff(s));
                    }
                }
            }
        }
    }
    Ok(Measured::new(worst, 1e-9))
}

fn eigen_relation(cfg: &VerifyConfig) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for a in with_config(&[0.0, 1.5], cfg.params.alpha) {
        for y in with_config(&[0.0, 0.5, 3.0], cfg.params.y) {
            let st = DualTransform::new(a, y, DEFAULT_LAGUERRE_NODES)?;
            for n in 0..=15 {
                let s = st.sample(|x| Ok(Quaternion::real(phi_n(n, a, x)?)))?;
                let py = phi_n(n, a, y)?;
                for q in q_grid(0.7) {
                    let got = st.apply_sampled(&s, q)?;
                    worst = worst.max(got.max_abs_diff(q.powi(n as u32) * py));
                }
            }
        }
    }
    Ok(Measured::new(worst, 1e-8))
}

fn bergman_moments(cfg: &VerifyConfig) -> Result<Measured> {
    let p = &cfg.params;
    let mut worst: f64 = 0.0;
    for (b, e) in with_config(&[(1.0, 1.0), (2.0, 1.5), (1.0, 3.0)], (p.beta, p.eta)) {
        let disk = disk_rule(16, 32, b, e)?;
        let g = gamma_moments(b, e, 11)?;
        for m in 0..=10 {
            for n in 0..=10 {
                let v = disk.integrate(|z| z.conj().powu(m as u32) * z.powu(n as u32));
                let want = if m == n { PI * g[n] } else { 0.0 };
                worst = worst.max((v - want).norm());
            }
        }
    }
    Ok(Measured::new(worst, 1e-12))
}

fn parseval(cfg: &VerifyConfig) -> Result<Measured> {
    let p = &cfg.params;
    let mut r = rng(cfg, 1);
    let phi = LaguerreCoeffs::new(p.alpha, random_coeffs(&mut r, 20))?;
    let image = dual_transform_spectral(&phi, p.y)?;
    let disk = disk_rule(32, 64, p.beta, p.eta)?;
    let axis = unit_axis(Quaternion::new(0.0, 1.0, 2.0, -1.0))?;
    let f = |q: Quaternion| image.eval(q);
    let quad = inner_omega_quadrature(f, f, &disk, axis)?.w;
    let ph = phi_sequence(20, p.alpha, p.y)?;
    let g = gamma_moments(p.beta, p.eta, 20)?;
    let want: f64 = (0..20).map(|n| PI * g[n] * (ph[n] * phi.coeffs[n].norm()).powi(2)).sum();
    Ok(Measured::new((quad - want).abs() / want, 1e-8))
}

fn reproducing(cfg: &VerifyConfig) -> Result<Measured> {
    let p = &cfg.params;
    let disk = disk_rule(16, 48, p.beta, p.eta)?;
    let bk = BergmanKernel::new(p.beta, p.eta, 600)?;
    let mut worst: f64 = 0.0;
    for q in q_grid(0.6) {
        let sp = crate::quat::slice_decompose(q);
        let s = sp.to_complex();
        for m in 0..=10u32 {
            // the kernel column has radius 1/|q|, the monomial is entire
            let ra = if s.norm() > 0.0 { Some(1.0 / s.norm()) } else { None };
            let v = disk.pairing(ra, None, |z| bk.eval_slice(z, s), |z| z.powu(m));
            worst = worst.max((v - s.powu(m)).norm());
        }
    }
    Ok(Measured::new(worst, 1e-8))
}

fn diagonal_identity(cfg: &VerifyConfig) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for a in with_config(&[0.0, 1.5], cfg.params.alpha) {
        let k = HankelKernel::new(a)?;
        let rule = gauss_laguerre(256, a)?;
        for y in with_config(&[0.0, 0.5, 3.0], cfg.params.y) {
            for q in q_grid(0.5) {
                worst = worst.max(diagonal_identity_check(&k, q, y, &rule)?.rel_error());
            }
        }
    }
    Ok(Measured::new(worst, 1e-8))
}

fn kernel_reproduces(cfg: &VerifyConfig) -> Result<Measured> {
    let p = &cfg.params;
    let disk = disk_rule(32, 128, p.beta, p.eta)?;
    let bk = BergmanKernel::new(p.beta, p.eta, 600)?;
    let k = HankelKernel::new(p.alpha)?;
    let mut worst: f64 = 0.0;
    for q in q_grid(0.5) {
        for &(x, y) in &[(0.1, 1.0), (1.0, 5.0), (5.0, 5.0), (1.0, p.y)] {
            let (lhs, rhs) = kernel_reproduce_check(&k, &bk, q, x, y, &disk)?;
            worst = worst.max(lhs.max_abs_diff(rhs));
        }
    }
    Ok(Measured::new(worst, 1e-7))
}

fn svd_cross_check(cfg: &VerifyConfig) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    let sets = with_config(
        &[Params::new(0.0, 1.0, 1.0, 1.0)?, Params::new(1.5, 2.0, 1.5, 0.5)?],
        cfg.params,
    );
    for p in sets {
        let m = build_operator_matrix(&p, 40, MatrixForm::Discretized, DEFAULT_LAGUERRE_NODES)?;
        let svd = svd_small(&m, 1e-14)?;
        let mut closed = singular_values_closed(&p, 40)?;
        closed.sort_by(|a, b| b.total_cmp(a));
        for k in 0..10 {
            worst = worst.max((svd.sigma[k] - closed[k]).abs() / closed[k]);
        }
    }
    Ok(Measured::new(worst, 1e-6))
}

fn adjoint_coefficients(cfg: &VerifyConfig) -> Result<Measured> {
    let p = &cfg.params;
    let mut r = rng(cfg, 2);
    let phi = LaguerreCoeffs::new(p.alpha, random_coeffs(&mut r, 20))?;
    let g = MonomialCoeffs::new(random_coeffs(&mut r, 20));
    let lhs = dual_transform_spectral(&phi, p.y)?.inner_omega(&g, p.beta, p.eta)?;
    let rhs = phi.inner(&adjoint_apply_spectral(&g, p)?);
    Ok(Measured::new(lhs.max_abs_diff(rhs), 1e-10))
}

/// `<S phi, G>_omega` from coefficients against `<phi, S^* G>` with the
/// adjoint by disk quadrature and the outer pairing by Laguerre quadrature.
fn adjoint_quadrature(cfg: &VerifyConfig) -> Result<Measured> {
    let p = &cfg.params;
    let mut r = rng(cfg, 3);
    let phi = LaguerreCoeffs::new(p.alpha, random_coeffs(&mut r, 8))?;
    let g = MonomialCoeffs::new(random_coeffs(&mut r, 6));
    let lhs = dual_transform_spectral(&phi, p.y)?.inner_omega(&g, p.beta, p.eta)?;
    let kernel = HankelKernel::new(p.alpha)?;
    let disk = disk_rule(32, 128, p.beta, p.eta)?;
    let axis = unit_axis(Quaternion::new(0.0, 0.0, 1.0, 1.0))?;
    let rule = gauss_laguerre(20, p.alpha)?;
    let mut rhs = Quaternion::ZERO;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let sg = adjoint_apply_quadrature(|q| g.eval(q), None, x, &kernel, p.y, &disk, axis)?;
        rhs += phi.eval(x)?.conj() * sg * w;
    }
    Ok(Measured::new(lhs.max_abs_diff(rhs), 1e-7))
}

fn semigroup(cfg: &VerifyConfig) -> Result<Measured> {
    let mut r = rng(cfg, 4);
    let phi = LaguerreCoeffs::new(cfg.params.alpha, random_coeffs(&mut r, 30))?;
    let mut worst: f64 = 0.0;
    for axis in axes() {
        let s = lift(Complex64::new(r.gen_range(-0.7..0.7), r.gen_range(-0.7..0.7)), axis);
        let t = lift(Complex64::new(r.gen_range(-0.7..0.7), r.gen_range(-0.7..0.7)), axis);
        let (ls, lt) = (FractionalHankel::new(s)?, FractionalHankel::new(t)?);
        let two = ls.apply(&lt.apply(&phi));
        let one = ls.compose(&lt)?.apply(&phi);
        for (a, b) in two.coeffs.iter().zip(&one.coeffs) {
            worst = worst.max(a.max_abs_diff(*b));
        }
    }
    Ok(Measured::new(worst, 1e-14))
}

fn decay_slope_y0(_: &VerifyConfig) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (a, e) in [(0.0, 2.0), (1.0, 1.0)] {
        let f = decay_fit(&Params::new(a, 1.0, e, 0.0)?, 500, 5000)?;
        worst = worst.max((f.slope - (a - e)).abs());
        notes.push(format!("alpha={a} eta={e}: {:.4}", f.slope));
    }
    Ok(Measured::new(worst, 0.05).note(notes.join(", ")))
}

fn decay_slope_y1(_: &VerifyConfig) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for e in [1.0, 2.0] {
        let f = decay_fit(&Params::new(0.0, 1.0, e, 1.0)?, 500, 5000)?;
        worst = worst.max((f.slope + e + 0.5).abs());
        notes.push(format!("eta={e}: {:.4}", f.slope));
    }
    Ok(Measured::new(worst, 0.2).note(notes.join(", ")))
}

/// Convergence verdicts from the term slopes; the error is the margin by which
/// a verdict is violated.
fn schatten_verdicts(_: &VerifyConfig) -> Result<Measured> {
    let y1 = Params::new(0.0, 1.0, 1.0, 1.0)?;
    let y0 = Params::new(0.0, 1.0, 1.0, 0.0)?;
    let conv_y1 = schatten_report(&y1, 1.5, 5000)?.term_fit.slope;
    let div_y1 = schatten_report(&y1, 1.0, 5000)?.term_fit.slope;
    let conv_y0 = schatten_report(&y0, 3.0, 5000)?.term_fit.slope;
    let div_y0 = schatten_report(&y0, 1.5, 5000)?.term_fit.slope;
    let err = [
        (conv_y1 + 1.0).max(0.0),
        (-0.8 - div_y1).max(0.0),
        (conv_y0 + 1.0).max(0.0),
        (-1.0 - div_y0).max(0.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(Measured::new(err, 0.0).note(format!(
        "y=1: p=1.5 slope {conv_y1:.4}, p=1 slope {div_y1:.4}; y=0: p=3 slope {conv_y0:.4}, p=1.5 slope {div_y0:.4}"
    )))
}

fn null_space(cfg: &VerifyConfig) -> Result<Measured> {
    let a = cfg.params.alpha;
    let mut worst: f64 = 0.0;
    for y in laguerre_zeros(5, a)? {
        if !null_space_indices(y, a, 10, DEFAULT_NULL_TOL)?.contains(&5) {
            return Ok(Measured::new(f64::INFINITY, 1e-7).note(format!("5 missing from the null set at y={y}")));
        }
        let p = Params::new(a, cfg.params.beta, cfg.params.eta, y)?;
        let m = build_operator_matrix(&p, 8, MatrixForm::Discretized, DEFAULT_LAGUERRE_NODES)?;
        let col: f64 = (0..8).map(|k| m[(k, 5)].norm_sqr()).sum();
        worst = worst.max(col.sqrt());
    }
    if !null_space_indices(0.0, a, cfg.truncation, DEFAULT_NULL_TOL)?.is_empty() {
        return Ok(Measured::new(f64::INFINITY, 1e-7).note("nonempty null set at y=0".into()));
    }
    Ok(Measured::new(worst, 1e-7))
}

fn bargmann_proportionality(cfg: &VerifyConfig) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for a in with_config(&[0.0, 1.5], cfg.params.alpha) {
        let rule = gauss_laguerre(DEFAULT_LAGUERRE_NODES, a)?;
        let st = DualTransform::with_rule(0.0, rule.clone())?;
        let c = gamma(a + 1.0)?;
        for n in [0usize, 3, 7] {
            let f = |x: f64| Ok(Quaternion::new(phi_n(n, a, x)?, 0.0, 0.5 * x, 0.0));
            let samples = st.sample(f)?;
            for q in q_grid(0.7) {
                let b = bargmann_apply(f, q, &rule)?;
                worst = worst.max(b.max_abs_diff(st.apply_sampled(&samples, q)? * c));
            }
        }
    }
    Ok(Measured::new(worst, 1e-10))
}

fn factorization(cfg: &VerifyConfig) -> Result<Measured> {
    let f = svd_factorization_check(&cfg.params, 30)?;
    Ok(Measured::new(f.factorization_residual, 1e-12))
}

fn projection(cfg: &VerifyConfig) -> Result<Measured> {
    let f = svd_factorization_check(&cfg.params, 30)?;
    let err = f
        .projection_residual
        .max(f.idempotence_residual)
        .max(f.self_adjoint_residual);
    Ok(Measured::new(err, 1e-12))
}

fn slice_regularity(cfg: &VerifyConfig) -> Result<Measured> {
    let p = &cfg.params;
    let st = DualTransform::new(p.alpha, p.y, DEFAULT_LAGUERRE_NODES)?;
    let mut r = rng(cfg, 5);
    let phi = LaguerreCoeffs::new(p.alpha, random_coeffs(&mut r, 10))?;
    let s = st.sample_coeffs(&phi)?;
    let mut worst: f64 = 0.0;
    for axis in axes() {
        for &(u, v) in &[(0.1, 0.2), (-0.4, 0.3), (0.0, 0.6), (0.3, -0.3)] {
            let pt = SlicePoint::new(u, v, axis)?;
            let d = slice_derivative(|x| st.apply_sampled(&s, x), &pt, 1e-4)?;
            worst = worst.max(d.norm());
        }
    }
    Ok(Measured::new(worst, 1e-6))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let r = run_verify(&VerifyConfig::default());
        for c in &r.checks {
            println!("{} {:.3e} <= {:.1e} {:?}", c.name, c.error, c.tolerance, c.detail);
        }
        assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
        let names: Vec<_> = r.checks.iter().map(|c| c.name.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn tight_tolerance_fails() {
        let cfg = VerifyConfig {
            tol: Some(1e-15),
            ..VerifyConfig::default()
        };
        let r = run_verify(&cfg);
        assert!(!r.passed);
        assert!(r.failures().any(|c| c.name == "eigen_relation"));
    }
}

//! Singular values of `S^alpha_y`, Schatten sums, decay fits, boundedness
//! diagnostics and the polar factorization `S = U |S|`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::kernels::HankelKernel;
use crate::linalg::{svd_one_sided_jacobi, CMatrix, Svd};
use crate::ops::{build_operator_matrix, null_space_indices, LaguerreCoeffs, MatrixForm, MonomialCoeffs, DEFAULT_NULL_TOL};
use crate::quad::gauss_jacobi_unit;
use crate::quat::Quaternion;
use crate::specfun::{gamma_moments, ln_gamma, phi_sequence, Params};

/// Exponents reported by [`spectral_report`].
pub const DEFAULT_P_GRID: [f64; 7] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
/// Slopes above this count as growth in the boundedness verdict.
pub const GROWTH_SLOPE_TOL: f64 = 0.05;
const ELL_NODES: usize = 64;

/// `sqrt(pi gamma_n) phi_n(y)` for `n < N`, with sign.
pub fn signed_singular_values(params: &Params, n: usize) -> Result<Vec<f64>> {
    let p = phi_sequence(n, params.alpha, params.y)?;
    let g = gamma_moments(params.beta, params.eta, n)?;
    Ok(p.iter().zip(&g).map(|(p, g)| (PI * g).sqrt() * p).collect())
}

/// `s_n = sqrt(pi gamma_n) |phi_n(y)|` for `n < N`, in index order.
pub fn singular_values_closed(params: &Params, n: usize) -> Result<Vec<f64>> {
    Ok(signed_singular_values(params, n)?.into_iter().map(f64::abs).collect())
}

/// `c_n = pi gamma_n phi_n(y)^2 = s_n^2` for `n < N`.
pub fn c_sequence(params: &Params, n: usize) -> Result<Vec<f64>> {
    Ok(signed_singular_values(params, n)?.into_iter().map(|s| s * s).collect())
}

/// One-sided Jacobi SVD with descending singular values.
pub fn svd_small(m: &CMatrix, tol: f64) -> Result<Svd> {
    svd_one_sided_jacobi(m, tol)
}

/// Least-squares line through `(log n, log value)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub n_lo: usize,
    pub n_hi: usize,
    /// Number of fitted points (blocks when averaged).
    pub points: usize,
    pub averaged: bool,
}

impl DecayFit {
    /// Fitted value at `n`.
    pub fn at(&self, n: f64) -> f64 {
        (self.intercept + self.slope * n.ln()).exp()
    }
}

/// Fits `log values[n]` against `log n` on `[n_lo, n_hi]`.
///
/// For `y > 0` the sequence carries a `cos^2(2 sqrt(n y) - ...)` factor whose
/// period in `n` is about `pi sqrt(n / y)`; blocks of one period are averaged
/// before fitting. At `y = 0`, or when the range holds fewer than three
/// periods, every point is fitted.
pub fn fit_power_law(values: &[f64], y: f64, n_lo: usize, n_hi: usize) -> Result<DecayFit> {
    ensure(n_lo >= 1, "n_lo", n_lo as f64, "n_lo >= 1")?;
    ensure(n_hi > n_lo, "n_hi", n_hi as f64, "n_hi > n_lo")?;
    ensure(n_hi < values.len(), "n_hi", n_hi as f64, "n_hi < len(values)")?;
    let pointwise = || -> Vec<(f64, f64)> {
        (n_lo..=n_hi)
            .filter(|&k| values[k] > 0.0)
            .map(|k| ((k as f64).ln(), values[k].ln()))
            .collect()
    };
    let mut averaged = false;
    let mut pts = Vec::new();
    if y > 0.0 {
        let mut n = n_lo;
        while n <= n_hi {
            let len = (PI * (n as f64 / y).sqrt()).ceil() as usize;
            let end = n + len.max(1);
            if end > n_hi + 1 {
                break;
            }
            let mean = values[n..end].iter().sum::<f64>() / (end - n) as f64;
            let centre = 0.5 * (n + end - 1) as f64;
            if mean > 0.0 {
                pts.push((centre.ln(), mean.ln()));
            }
            n = end;
        }
        averaged = pts.len() >= 3;
    }
    if !averaged {
        // range shorter than a few periods: fit every point
        pts = pointwise();
    }
    ensure(pts.len() >= 2, "fit points", pts.len() as f64, "at least two positive values")?;
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit {
        slope,
        intercept: my - slope * mx,
        n_lo,
        n_hi,
        points: pts.len(),
        averaged,
    })
}

/// Slope of `log c_n` against `log n` on `[n_lo, n_hi]`.
pub fn decay_fit(params: &Params, n_lo: usize, n_hi: usize) -> Result<DecayFit> {
    let c = c_sequence(params, n_hi + 1)?;
    fit_power_law(&c, params.y, n_lo, n_hi)
}

/// Partial sums of `s_n^p` and a convergence verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchattenReport {
    pub p: f64,
    pub truncation: usize,
    /// `sum_{k<=n} s_k^p` for `n < N`.
    pub partial_sums: Vec<f64>,
    /// Power-law fit of the (period-averaged) terms `s_n^p` on `[N/10, N)`.
    pub term_fit: DecayFit,
    /// Terms decay faster than `1/n`.
    pub convergent: bool,
    /// `S_N - S_{N/2}`.
    pub half_increment: f64,
    /// Remainder `sum_{n>=N} s_n^p` extrapolated from `term_fit`; infinite when
    /// the fit does not decay faster than `1/n`.
    pub tail_estimate: f64,
    /// Exponent above which the sufficient condition holds:
    /// `4/(1+2 eta)` for `y > 0`, `2/(eta-alpha)` for `y = 0` (none if `eta <= alpha`).
    pub threshold: Option<f64>,
    pub above_threshold: Option<bool>,
}

pub fn schatten_report(params: &Params, p: f64, n: usize) -> Result<SchattenReport> {
    ensure(p >= 1.0, "p", p, "p >= 1")?;
    ensure(n >= 20, "N", n as f64, "N >= 20")?;
    let s = singular_values_closed(params, n)?;
    let terms: Vec<f64> = s.iter().map(|v| v.powf(p)).collect();
    let mut acc = 0.0;
    let partial_sums: Vec<f64> = terms
        .iter()
        .map(|t| {
            acc += t;
            acc
        })
        .collect();
    let term_fit = fit_power_law(&terms, params.y, (n / 10).max(1), n - 1)?;
    let convergent = term_fit.slope < -1.0;
    let tail_estimate = if convergent {
        let e = term_fit.slope + 1.0;
        // int_N^inf C n^slope dn
        term_fit.intercept.exp() * (n as f64).powf(e) / -e
    } else {
        f64::INFINITY
    };
    let threshold = if params.y > 0.0 {
        Some(4.0 / (1.0 + 2.0 * params.eta))
    } else if params.eta > params.alpha {
        Some(2.0 / (params.eta - params.alpha))
    } else {
        None
    };
    Ok(SchattenReport {
        p,
        truncation: n,
        half_increment: partial_sums[n - 1] - partial_sums[n / 2 - 1],
        partial_sums,
        term_fit,
        convergent,
        tail_estimate,
        above_threshold: threshold.map(|t| p > t),
        threshold,
    })
}

/// The two normalizations of the `y = 0` boundedness integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Y0Normalization {
    /// `Gamma(alpha+1)^{-1} int omega(t) (1-t)^{-alpha-1} dt`, the kernel limit.
    pub kernel_limit: f64,
    /// The same with the extra factor `2^{-alpha}`.
    pub with_power_of_two: f64,
    /// `kernel_limit / with_power_of_two = 2^alpha`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub y: f64,
    pub truncation: usize,
    pub sup_c: f64,
    pub argmax: usize,
    pub decay: DecayFit,
    /// `sup c_n < inf` judged from the fitted slope.
    pub bounded: bool,
    /// `ell = pi int_0^1 R_t(y, y) omega(t) dt`, `None` when the integral diverges.
    pub ell: Option<f64>,
    pub y0_normalization: Option<Y0Normalization>,
}

/// `ell = pi int_0^1 R_t(y, y) t^{beta-1} (1-t)^{eta-1} dt`; equals `sum_n c_n`.
///
/// At `y = 0` the integrand is `(1-t)^{-alpha-1} / Gamma(alpha+1)` times the
/// weight, finite iff `eta > alpha + 1`; for `y > 0` it behaves like
/// `(1-t)^{eta-3/2}`, finite iff `eta > 1/2`. The singular factor is moved
/// into the Gauss-Jacobi weight.
pub fn ell_integral(params: &Params) -> Result<Option<f64>> {
    let (a, b, e, y) = (params.alpha, params.beta, params.eta, params.y);
    if y == 0.0 {
        if e <= a + 1.0 {
            return Ok(None);
        }
        let rule = gauss_jacobi_unit(ELL_NODES, b, e - a - 1.0)?;
        let g = ln_gamma(a + 1.0)?.exp();
        Ok(Some(PI * rule.integrate(|_| 1.0) / g))
    } else {
        if e <= 0.5 {
            return Ok(None);
        }
        let kernel = HankelKernel::new(a)?;
        let rule = gauss_jacobi_unit(ELL_NODES, b, e - 0.5)?;
        let v = rule.integrate(|t| {
            (1.0 - t).sqrt() * kernel.eval_slice(num_complex::Complex64::new(t, 0.0), y, y).re
        });
        Ok(Some(PI * v))
    }
}

pub fn boundedness_report(params: &Params, n: usize) -> Result<BoundednessReport> {
    ensure(n >= 20, "N", n as f64, "N >= 20")?;
    let c = c_sequence(params, n)?;
    let (argmax, sup_c) = c
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let decay = fit_power_law(&c, params.y, (n / 10).max(1), n - 1)?;
    let y0_normalization = if params.y == 0.0 && params.eta > params.alpha + 1.0 {
        let rule = gauss_jacobi_unit(ELL_NODES, params.beta, params.eta - params.alpha - 1.0)?;
        let kernel_limit = rule.integrate(|_| 1.0) / ln_gamma(params.alpha + 1.0)?.exp();
        let two = 2f64.powf(params.alpha);
        Some(Y0Normalization {
            kernel_limit,
            with_power_of_two: kernel_limit / two,
            ratio: two,
        })
    } else {
        None
    };
    Ok(BoundednessReport {
        y: params.y,
        truncation: n,
        sup_c,
        argmax,
        bounded: decay.slope <= GROWTH_SLOPE_TOL,
        decay,
        ell: ell_integral(params)?,
        y0_normalization,
    })
}

/// `U^alpha_y`: `a_n -> sign(phi_n(y)) a_n / sqrt(pi gamma_n)`, zero on the null set.
pub fn partial_isometry_apply(phi: &LaguerreCoeffs, params: &Params) -> Result<MonomialCoeffs> {
    let n = phi.coeffs.len();
    let p = phi_sequence(n, params.alpha, params.y)?;
    let g = gamma_moments(params.beta, params.eta, n)?;
    let null = if n == 0 {
        Vec::new()
    } else {
        null_space_indices(params.y, params.alpha, n - 1, DEFAULT_NULL_TOL)?
    };
    Ok(MonomialCoeffs::new(
        phi.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if null.contains(&k) {
                    Quaternion::ZERO
                } else {
                    *a * (p[k].signum() / (PI * g[k]).sqrt())
                }
            })
            .collect(),
    ))
}

/// Residuals of `S = U |S|` and of `U^* U` against the projection onto the
/// complement of the null directions, on the `N x N` truncation in the
/// orthonormal pair `(phi_n)`, `(e_n / sqrt(pi gamma_n))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub truncation: usize,
    pub factorization_residual: f64,
    pub projection_residual: f64,
    pub idempotence_residual: f64,
    pub self_adjoint_residual: f64,
    pub null_columns: Vec<usize>,
}

pub fn svd_factorization_check(params: &Params, n: usize) -> Result<FactorizationCheck> {
    ensure(n >= 1, "N", n as f64, "N >= 1")?;
    let s = build_operator_matrix(params, n, MatrixForm::Closed, 0)?;
    let abs_s = CMatrix::from_real_diagonal(&singular_values_closed(params, n)?);
    let g = gamma_moments(params.beta, params.eta, n)?;
    // columns of U from its action on the basis, read in the orthonormal monomials
    let mut u = CMatrix::zeros(n, n);
    for k in 0..n {
        let img = partial_isometry_apply(&LaguerreCoeffs::basis(params.alpha, k)?, params)?;
        for (m, c) in img.coeffs.iter().enumerate() {
            u[(m, k)] = num_complex::Complex64::new(c.w, c.x) * (PI * g[m]).sqrt();
        }
    }
    let null = null_space_indices(params.y, params.alpha, n - 1, DEFAULT_NULL_TOL)?;
    let proj: Vec<f64> = (0..n).map(|k| if null.contains(&k) { 0.0 } else { 1.0 }).collect();
    let proj = CMatrix::from_real_diagonal(&proj);
    let us = &u * &abs_s;
    let utu = &u.adjoint() * &u;
    let null_columns = (0..n)
        .filter(|&k| (0..n).all(|m| u[(m, k)].norm() == 0.0))
        .collect();
    Ok(FactorizationCheck {
        truncation: n,
        factorization_residual: s.max_abs_diff(&us),
        projection_residual: utu.max_abs_diff(&proj),
        idempotence_residual: (&utu * &utu).max_abs_diff(&utu),
        self_adjoint_residual: utu.adjoint().max_abs_diff(&utu),
        null_columns,
    })
}

/// Everything about the spectrum at one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub params: Params,
    pub truncation: usize,
    pub singular_values: Vec<f64>,
    pub c_sequence: Vec<f64>,
    /// Partial sums keyed by the exponent `p` (formatted as text).
    pub schatten_partial_sums: BTreeMap<String, Vec<f64>>,
    pub schatten: Vec<SchattenSummary>,
    pub null_indices: Vec<usize>,
    pub sup_c: f64,
    pub decay_slope: f64,
    pub bounded: bool,
    pub ell_integral: Option<f64>,
    pub y0_normalization: Option<Y0Normalization>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchattenSummary {
    pub p: f64,
    pub partial_sum: f64,
    pub term_slope: f64,
    pub convergent: bool,
    pub tail_estimate: Option<f64>,
    pub threshold: Option<f64>,
    pub above_threshold: Option<bool>,
}

pub fn spectral_report(params: &Params, n: usize, ps: &[f64]) -> Result<SpectralReport> {
    let singular_values = singular_values_closed(params, n)?;
    let c = c_sequence(params, n)?;
    let b = boundedness_report(params, n)?;
    let mut sums = BTreeMap::new();
    let mut schatten = Vec::new();
    for &p in ps {
        let r = schatten_report(params, p, n)?;
        schatten.push(SchattenSummary {
            p,
            partial_sum: *r.partial_sums.last().unwrap_or(&0.0),
            term_slope: r.term_fit.slope,
            convergent: r.convergent,
            tail_estimate: r.tail_estimate.is_finite().then_some(r.tail_estimate),
            threshold: r.threshold,
            above_threshold: r.above_threshold,
        });
        sums.insert(format!("{p}"), r.partial_sums);
    }
    Ok(SpectralReport {
        params: *params,
        truncation: n,
        null_indices: null_space_indices(params.y, params.alpha, n - 1, DEFAULT_NULL_TOL)?,
        singular_values,
        c_sequence: c,
        schatten_partial_sums: sums,
        schatten,
        sup_c: b.sup_c,
        decay_slope: b.decay.slope,
        bounded: b.bounded,
        ell_integral: b.ell,
        y0_normalization: b.y0_normalization,
    })
}

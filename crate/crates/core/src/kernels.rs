//! The fractional Hankel kernel `R_q^alpha(x, y)` and the reproducing kernel
//! `K_{beta,eta}(p, q)` of the weighted slice Bergman space.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::quad::{DiskRule, QuadratureRule};
use crate::quat::{eval_real_series, lift, slice_decompose, Quaternion};
use crate::specfun::{gamma_moments, ln_gamma, phi_sequence, BesselG, Params};

/// Default truncation of the hypergeometric / Bergman series.
pub const DEFAULT_BERGMAN_TERMS: usize = 400;
/// Default truncation of the Hille-Hardy series.
pub const DEFAULT_HILLE_HARDY_TERMS: usize = 80;
/// Terms smaller than this (in norm) end a series early.
pub const DEFAULT_TERM_TOL: f64 = 1e-16;

/// Truncation control for the kernel series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelEvalRequest {
    pub params: Params,
    pub truncation: usize,
    pub tolerance: f64,
}

impl KernelEvalRequest {
    pub fn new(params: Params, truncation: usize, tolerance: f64) -> Result<Self> {
        ensure(truncation >= 1, "N", truncation as f64, "N >= 1")?;
        ensure(tolerance > 0.0, "tolerance", tolerance, "tolerance > 0")?;
        Ok(Self {
            params,
            truncation,
            tolerance,
        })
    }

    pub fn bergman(&self, p: Quaternion, q: Quaternion) -> Result<Quaternion> {
        bergman_kernel_series_tol(
            p,
            q,
            self.params.beta,
            self.params.eta,
            self.truncation,
            self.tolerance,
        )
    }

    pub fn hankel_series(&self, q: Quaternion, x: f64) -> Result<Quaternion> {
        hankel_kernel_series(q, x, self.params.y, self.params.alpha, self.truncation)
    }
}

/// `sum_{k<=n} (a)_k (b)_k / ((c)_k k!) p^k q^k` with the ordered products
/// `p^k q^k`; stops once terms are decreasing and below `tol`.
pub fn hyper2f1_star(
    a: f64,
    b: f64,
    c: f64,
    p: Quaternion,
    q: Quaternion,
    n: usize,
    tol: f64,
) -> Result<Quaternion> {
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::Domain {
            name: "c",
            value: c,
            constraint: "c not a nonpositive integer",
        });
    }
    let pq = p.norm() * q.norm();
    if pq >= 1.0 {
        return Err(Error::Divergence(format!("|p||q| = {pq} >= 1")));
    }
    let mut coef = 1.0;
    let (mut pk, mut qk) = (Quaternion::ONE, Quaternion::ONE);
    let mut sum = Quaternion::ONE;
    for k in 0..n {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0));
        coef *= ratio;
        pk *= p;
        qk *= q;
        let term = pk * qk * coef;
        sum += term;
        if term.norm() < tol && ratio.abs() * pq < 1.0 {
            break;
        }
    }
    if !sum.is_finite() {
        return Err(Error::Divergence("2F1* partial sums overflowed".into()));
    }
    Ok(sum)
}

/// `K_{beta,eta}(p, q) = Gamma(beta+eta) / (pi Gamma(eta) Gamma(beta)) 2F1*(1, beta+eta; beta; [p, conj q])`
/// `= (1/pi) sum_n p^n conj(q)^n / gamma_n`.
pub fn bergman_kernel_series(
    p: Quaternion,
    q: Quaternion,
    beta: f64,
    eta: f64,
    n: usize,
) -> Result<Quaternion> {
    bergman_kernel_series_tol(p, q, beta, eta, n, DEFAULT_TERM_TOL)
}

fn bergman_kernel_series_tol(
    p: Quaternion,
    q: Quaternion,
    beta: f64,
    eta: f64,
    n: usize,
    tol: f64,
) -> Result<Quaternion> {
    ensure(beta > 0.0, "beta", beta, "beta > 0")?;
    ensure(eta > 0.0, "eta", eta, "eta > 0")?;
    for r in [p.norm(), q.norm()] {
        if r >= 1.0 {
            return Err(Error::OutsideBall(r));
        }
    }
    let lead = (ln_gamma(beta + eta)? - ln_gamma(eta)? - ln_gamma(beta)?).exp() / PI;
    Ok(hyper2f1_star(1.0, beta + eta, beta, p, q.conj(), n, tol / lead)? * lead)
}

/// Bergman kernel between two points of one slice, in slice coordinates:
/// `(1/pi) sum_n (z conj w)^n / gamma_n`.
pub fn bergman_kernel_slice(z: Complex64, w: Complex64, beta: f64, eta: f64, n: usize) -> Result<Complex64> {
    let t = z * w.conj();
    if t.norm() >= 1.0 {
        return Err(Error::Divergence(format!("|z||w| = {} >= 1", t.norm())));
    }
    let gammas = gamma_moments(beta, eta, n + 1)?;
    Ok(slice_kernel_sum(t, &gammas) / PI)
}

fn slice_kernel_sum(t: Complex64, gammas: &[f64]) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut tk = Complex64::new(1.0, 0.0);
    for g in gammas {
        let term = tk / *g;
        sum += term;
        if term.norm() < DEFAULT_TERM_TOL * sum.norm() && tk.norm() < 0.5 {
            break;
        }
        tk *= t;
    }
    sum
}

/// Precomputed `1/gamma_n` table for repeated slice evaluations of `K`.
#[derive(Clone, Debug)]
pub struct BergmanKernel {
    gammas: Vec<f64>,
}

impl BergmanKernel {
    pub fn new(beta: f64, eta: f64, n: usize) -> Result<Self> {
        Ok(Self {
            gammas: gamma_moments(beta, eta, n + 1)?,
        })
    }

    /// `K(z, w)` for `z`, `w` in slice coordinates.
    pub fn eval_slice(&self, z: Complex64, w: Complex64) -> Complex64 {
        slice_kernel_sum(z * w.conj(), &self.gammas) / PI
    }
}

/// `K_{eta,1}(z, w) = (eta/pi) (1 - z conj w)^{-eta-1}` on one slice.
pub fn bergman_kernel_closed_slice(z: Complex64, w: Complex64, eta: f64) -> Result<Complex64> {
    ensure(eta > 0.0, "eta", eta, "eta > 0")?;
    for r in [z.norm(), w.norm()] {
        if r >= 1.0 {
            return Err(Error::OutsideBall(r));
        }
    }
    Ok((eta / PI) * (1.0 - z * w.conj()).powf(-eta - 1.0))
}

/// Quaternionic form of [`bergman_kernel_closed_slice`] for two points on a
/// common slice.
pub fn bergman_kernel_closed(p: Quaternion, q: Quaternion, eta: f64) -> Result<Quaternion> {
    let axis = common_axis(p, q)?;
    let v = bergman_kernel_closed_slice(to_slice(p, axis), to_slice(q, axis), eta)?;
    Ok(lift(v, axis))
}

fn common_axis(p: Quaternion, q: Quaternion) -> Result<Quaternion> {
    if !p.commutes_with(q, 1e-12 * (1.0 + p.norm() * q.norm())) {
        return Err(Error::SliceMismatch);
    }
    let (sp, sq) = (slice_decompose(p), slice_decompose(q));
    Ok(if sp.v >= sq.v { sp.axis } else { sq.axis })
}

fn to_slice(q: Quaternion, axis: Quaternion) -> Complex64 {
    crate::quat::project(q, axis)
}

/// The fractional Hankel kernel
/// `R_q(x, y) = (1-q)^{-(alpha+1)} exp(-q(x+y)/(1-q)) g_alpha(q x y / (1-q)^2)`,
/// evaluated on the slice of `q` without fractional powers of `q x y`.
#[derive(Debug)]
pub struct HankelKernel {
    alpha: f64,
    g: BesselG,
}

impl HankelKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            g: BesselG::new(alpha)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `R_s(x, y)` for a slice coordinate `s`, `|s| < 1`.
    pub fn eval_slice(&self, s: Complex64, x: f64, y: f64) -> Complex64 {
        let one_minus = 1.0 - s;
        let w = s * (x * y) / (one_minus * one_minus);
        let sc = self.g.scaled(w);
        let expo = -(self.alpha + 1.0) * one_minus.ln() - s * (x + y) / one_minus + sc.z;
        expo.exp() * sc.value
    }

    /// `R_q(x, y)` for `|q| < 1`.
    pub fn eval(&self, q: Quaternion, x: f64, y: f64) -> Result<Quaternion> {
        let r = q.norm();
        if r >= 1.0 {
            return Err(Error::OutsideBall(r));
        }
        ensure(x >= 0.0, "x", x, "x >= 0")?;
        ensure(y >= 0.0, "y", y, "y >= 0")?;
        let sp = slice_decompose(q);
        Ok(lift(self.eval_slice(sp.to_complex(), x, y), sp.axis))
    }
}

/// One-shot [`HankelKernel::eval`].
pub fn hankel_kernel_closed(q: Quaternion, x: f64, y: f64, alpha: f64) -> Result<Quaternion> {
    HankelKernel::new(alpha)?.eval(q, x, y)
}

/// Hille-Hardy partial sum `sum_{n<=N} q^n phi_n(x) phi_n(y)`.
pub fn hankel_kernel_series(q: Quaternion, x: f64, y: f64, alpha: f64, n: usize) -> Result<Quaternion> {
    let r = q.norm();
    if r >= 1.0 {
        return Err(Error::OutsideBall(r));
    }
    let px = phi_sequence(n + 1, alpha, x)?;
    let py = phi_sequence(n + 1, alpha, y)?;
    let coeffs: Vec<f64> = px.iter().zip(&py).map(|(a, b)| a * b).collect();
    eval_real_series(&coeffs, q)
}

/// Both sides of `R_{|q|^2}(y, y) = int_0^inf |R_q(x, y)|^2 x^alpha e^{-x} dx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn abs_error(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    pub fn rel_error(&self) -> f64 {
        self.abs_error() / self.lhs.abs().max(f64::MIN_POSITIVE)
    }
}

/// Diagonal identity, the right side by the Laguerre rule `rule`.
pub fn diagonal_identity_check(
    kernel: &HankelKernel,
    q: Quaternion,
    y: f64,
    rule: &QuadratureRule,
) -> Result<IdentityCheck> {
    let s = slice_decompose(q).to_complex();
    let lhs = kernel.eval_slice(Complex64::new(s.norm_sqr(), 0.0), y, y).re;
    let rhs = rule.integrate(|x| kernel.eval_slice(s, x, y).norm_sqr());
    Ok(IdentityCheck { lhs, rhs })
}

/// Both sides of `R_q(x, y) = int_{B_I} conj(K(p, q)) R_p(x, y) omega(|p|^2) dlambda(p)`
/// on the slice of `q`.
pub fn kernel_reproduce_check(
    kernel: &HankelKernel,
    bergman: &BergmanKernel,
    q: Quaternion,
    x: f64,
    y: f64,
    disk: &DiskRule,
) -> Result<(Quaternion, Quaternion)> {
    let r = q.norm();
    if r >= 1.0 {
        return Err(Error::OutsideBall(r));
    }
    let sp = slice_decompose(q);
    let s = sp.to_complex();
    let lhs = kernel.eval_slice(s, x, y);
    let ra = if r > 0.0 { Some(1.0 / r) } else { None };
    let rhs = disk.pairing(
        ra,
        Some(1.0),
        |p| bergman.eval_slice(p, s),
        |p| kernel.eval_slice(p, x, y),
    );
    Ok((lift(lhs, sp.axis), lift(rhs, sp.axis)))
}

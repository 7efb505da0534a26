//! Gauss rules for the Laguerre measure `x^alpha e^{-x} dx` on the half-line
//! and the Beta measure `t^{beta-1} (1-t)^{eta-1} dt` on `(0, 1)`, and the
//! tensor rule on the unit disk of a slice.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::tridiagonal_eigen;
use crate::quat::Quaternion;
use crate::specfun::{beta_fn, gamma};

const NEWTON_STEPS: usize = 12;
const RESCALE: f64 = 1e120;

/// Which measure a rule integrates against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RuleKind {
    Laguerre { alpha: f64 },
    Jacobi { beta: f64, eta: f64 },
}

/// A one-dimensional Gauss rule. Nodes are strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Values that can be accumulated with real weights.
pub trait Weighted: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Weighted for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Weighted for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

impl Weighted for Quaternion {
    fn zero() -> Self {
        Quaternion::ZERO
    }
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate<T: Weighted>(&self, f: impl Fn(f64) -> T) -> T {
        integrate(self, f)
    }
}

/// `sum_i w_i f(x_i)`.
pub fn integrate<T: Weighted>(rule: &QuadratureRule, f: impl Fn(f64) -> T) -> T {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .filter(|(_, &w)| w != 0.0)
        .fold(T::zero(), |acc, (&x, &w)| acc + f(x) * w)
}

/// Like [`integrate`] for fallible integrands; the first error is returned.
pub fn try_integrate<T: Weighted>(
    rule: &QuadratureRule,
    f: impl Fn(f64) -> Result<T>,
) -> Result<T> {
    let mut acc = T::zero();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        if w != 0.0 {
            acc = acc + f(x)? * w;
        }
    }
    Ok(acc)
}

/// Three-term recurrence of the orthonormal polynomials of a measure:
/// `b[k+1] p_{k+1} = (x - a[k]) p_k - b[k] p_{k-1}`, `p_0 = mass^{-1/2}`.
pub(crate) struct Recurrence {
    pub a: Vec<f64>,
    /// `b[k] = sqrt(beta_k)`, with `b[0]` unused.
    pub b: Vec<f64>,
    pub mass: f64,
}

impl Recurrence {
    pub fn laguerre(n: usize, alpha: f64) -> Result<Self> {
        ensure(alpha > -1.0, "alpha", alpha, "alpha > -1")?;
        let a = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
        let b = (0..n)
            .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
            .collect();
        Ok(Self {
            a,
            b,
            mass: gamma(alpha + 1.0)?,
        })
    }

    /// Jacobi recurrence on `(0, 1)` for `t^{beta-1} (1-t)^{eta-1}`, mapped
    /// from `(1-x)^a (1+x)^b` on `[-1, 1]` with `a = eta-1`, `b = beta-1`.
    pub fn jacobi_unit(n: usize, beta: f64, eta: f64) -> Result<Self> {
        ensure(beta > 0.0, "beta", beta, "beta > 0")?;
        ensure(eta > 0.0, "eta", eta, "eta > 0")?;
        let (a, b) = (eta - 1.0, beta - 1.0);
        let s = a + b;
        let diag = (0..n).map(|k| {
            let alpha_k = if k == 0 {
                (b - a) / (s + 2.0)
            } else {
                let t = 2.0 * k as f64 + s;
                (b - a) * (b + a) / (t * (t + 2.0))
            };
            0.5 * (1.0 + alpha_k)
        });
        let off = (0..n).map(|k| {
            let beta_k = match k {
                0 => 0.0,
                1 => 4.0 * (1.0 + a) * (1.0 + b) / ((s + 2.0).powi(2) * (s + 3.0)),
                _ => {
                    let k = k as f64;
                    let t = 2.0 * k + s;
                    4.0 * k * (k + a) * (k + b) * (k + s) / (t * t * (t + 1.0) * (t - 1.0))
                }
            };
            0.5 * beta_k.sqrt()
        });
        Ok(Self {
            a: diag.collect(),
            b: off.collect(),
            mass: beta_fn(beta, eta)?,
        })
    }

    /// Evaluates `p_n(x)` and `p_n'(x)` together with `sum_{k<n} p_k(x)^2`.
    /// Values are carried with a common scale; the returned `ln_scale` is
    /// the logarithm of the factor that was divided out.
    fn eval(&self, n: usize, x: f64) -> Evaluated {
        let mut p_prev = 0.0;
        let mut p = 1.0 / self.mass.sqrt();
        let mut d_prev = 0.0;
        let mut d = 0.0;
        let mut sum = 0.0;
        let mut ln_scale = 0.0;
        for k in 0..n {
            sum += p * p;
            let bk = if k == 0 { 0.0 } else { self.b[k] };
            // p_n itself only matters up to a constant factor
            let bnext = self.b.get(k + 1).copied().unwrap_or(1.0);
            let p_next = ((x - self.a[k]) * p - bk * p_prev) / bnext;
            let d_next = (p + (x - self.a[k]) * d - bk * d_prev) / bnext;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            if p.abs() > RESCALE || d.abs() > RESCALE {
                p /= RESCALE;
                p_prev /= RESCALE;
                d /= RESCALE;
                d_prev /= RESCALE;
                sum /= RESCALE * RESCALE;
                ln_scale += RESCALE.ln();
            }
        }
        Evaluated {
            value: p,
            derivative: d,
            sum_squares: sum,
            ln_scale,
        }
    }
}

struct Evaluated {
    value: f64,
    derivative: f64,
    sum_squares: f64,
    ln_scale: f64,
}

/// Nodes and Christoffel weights of the `n`-point Gauss rule.
///
/// Nodes come from the Jacobi matrix and are polished by Newton steps on the
/// recurrence. Weights are `1 / sum_{k<n} p_k(x_i)^2`, evaluated in scaled form
/// so that the far Laguerre nodes give tiny (possibly underflowed) weights
/// instead of overflow.
pub(crate) fn gauss_from_recurrence(rec: &Recurrence, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Domain {
            name: "N",
            value: 0.0,
            constraint: "N >= 1",
        });
    }
    let off: Vec<f64> = rec.b[1..n].to_vec();
    let eig = tridiagonal_eigen(&rec.a[..n], &off, &[])?;
    let mut nodes = eig.values;
    nodes.sort_by(f64::total_cmp);

    let mut converged = true;
    for i in 0..n {
        let lo = if i > 0 { nodes[i - 1] } else { f64::NEG_INFINITY };
        let hi = if i + 1 < n { nodes[i + 1] } else { f64::INFINITY };
        let mut x = nodes[i];
        let mut ok = false;
        for _ in 0..NEWTON_STEPS {
            let ev = rec.eval(n, x);
            if ev.derivative == 0.0 {
                break;
            }
            let dx = ev.value / ev.derivative;
            let next = x - dx;
            if !(next > lo && next < hi) {
                break;
            }
            x = next;
            if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                ok = true;
                break;
            }
        }
        // eigenvalues are already accurate to a few ulps times the matrix
        // norm; Newton failing to move is not an error
        if !ok {
            let ev = rec.eval(n, x);
            let dx = if ev.derivative != 0.0 {
                (ev.value / ev.derivative).abs()
            } else {
                0.0
            };
            if dx > 1e-10 * x.abs().max(1.0) {
                converged = false;
            }
        }
        nodes[i] = x;
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "Gauss node refinement",
            iterations: NEWTON_STEPS,
        });
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let ev = rec.eval(n, x);
            (-ev.sum_squares.ln() - 2.0 * ev.ln_scale).exp()
        })
        .collect();
    Ok((nodes, weights))
}

/// `n`-point Gauss rule for `x^alpha e^{-x} dx` on `(0, inf)`.
pub fn gauss_laguerre(n: usize, alpha: f64) -> Result<QuadratureRule> {
    let rec = Recurrence::laguerre(n, alpha)?;
    let (nodes, weights) = gauss_from_recurrence(&rec, n)?;
    Ok(QuadratureRule {
        kind: RuleKind::Laguerre { alpha },
        nodes,
        weights,
    })
}

/// `n`-point Gauss rule for `t^{beta-1} (1-t)^{eta-1} dt` on `(0, 1)`.
pub fn gauss_jacobi_unit(n: usize, beta: f64, eta: f64) -> Result<QuadratureRule> {
    let rec = Recurrence::jacobi_unit(n, beta, eta)?;
    let (nodes, weights) = gauss_from_recurrence(&rec, n)?;
    Ok(QuadratureRule {
        kind: RuleKind::Jacobi { beta, eta },
        nodes,
        weights,
    })
}

/// Tensor rule on the unit disk of a slice for the measure
/// `omega(|z|^2) du dv`, `omega(t) = t^{beta-1} (1-t)^{eta-1}`.
///
/// With `t = r^2` the integral is `1/2 int_0^1 int_0^{2pi} f(sqrt(t) e^{i theta})
/// omega(t) dtheta dt`; radial Gauss-Jacobi times uniform angles.
#[derive(Clone, Debug)]
pub struct DiskRule {
    pub radial: QuadratureRule,
    pub ntheta: usize,
    radii: Vec<f64>,
    angles: Vec<Complex64>,
}

/// Radius of analyticity used by [`DiskRule::pairing`]; `None` means entire.
pub type Radius = Option<f64>;

const ENTIRE_MARGIN: f64 = 1.5625;

impl DiskRule {
    pub fn new(nr: usize, ntheta: usize, beta: f64, eta: f64) -> Result<Self> {
        ensure(ntheta >= 1, "Ntheta", ntheta as f64, "Ntheta >= 1")?;
        let radial = gauss_jacobi_unit(nr, beta, eta)?;
        let radii = radial.nodes.iter().map(|t| t.sqrt()).collect();
        let angles = (0..ntheta)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / ntheta as f64))
            .collect();
        Ok(Self {
            radial,
            ntheta,
            radii,
            angles,
        })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.radii.len() * self.ntheta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points with their weights, ring by ring.
    pub fn points(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.radii
            .iter()
            .zip(&self.radial.weights)
            .flat_map(move |(&r, &w)| {
                let wt = PI * w / self.ntheta as f64;
                self.angles.iter().map(move |&e| (e * r, wt))
            })
    }

    /// `int_{disk} f omega(|z|^2) du dv`.
    pub fn integrate<T: Weighted>(&self, f: impl Fn(Complex64) -> T) -> T {
        self.points()
            .filter(|(_, w)| *w != 0.0)
            .fold(T::zero(), |acc, (z, w)| acc + f(z) * w)
    }

    /// `int conj(a) b omega du dv` for `a`, `b` holomorphic on discs of radius
    /// `ra`, `rb` about the origin.
    ///
    /// Ring `r` is split into circles of radii `r^2/rho` (for `a`) and `rho`
    /// (for `b`), which leaves every term `conj(a_n) b_n r^{2n}` unchanged but
    /// moves both evaluations away from their singularities. The plain rule
    /// loses accuracy when a singularity sits just outside the unit circle.
    pub fn pairing(
        &self,
        ra: Radius,
        rb: Radius,
        a: impl Fn(Complex64) -> Complex64,
        b: impl Fn(Complex64) -> Complex64,
    ) -> Complex64 {
        let factor = shift_factor(ra, rb);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&r, &w) in self.radii.iter().zip(&self.radial.weights) {
            if w == 0.0 {
                continue;
            }
            let rho = r * factor;
            let ra_ring = if rho > 0.0 { r * r / rho } else { 0.0 };
            let ring: Complex64 = self
                .angles
                .iter()
                .map(|&e| a(e * ra_ring).conj() * b(e * rho))
                .sum();
            acc += ring * (PI * w / self.ntheta as f64);
        }
        acc
    }

    /// Radii at which [`DiskRule::pairing`] evaluates its two arguments, for
    /// callers that precompute values on the shifted circles.
    pub fn shifted_points(&self, ra: Radius, rb: Radius) -> Vec<ShiftedPoint> {
        let factor = shift_factor(ra, rb);
        let mut out = Vec::with_capacity(self.len());
        for (&r, &w) in self.radii.iter().zip(&self.radial.weights) {
            let rho = r * factor;
            let ra_ring = if rho > 0.0 { r * r / rho } else { 0.0 };
            let wt = PI * w / self.ntheta as f64;
            for &e in &self.angles {
                out.push(ShiftedPoint {
                    left: e * ra_ring,
                    right: e * rho,
                    weight: wt,
                });
            }
        }
        out
    }
}

/// One node of the shifted pairing: `weight * conj(a(left)) * b(right)`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftedPoint {
    pub left: Complex64,
    pub right: Complex64,
    pub weight: f64,
}

fn shift_factor(ra: Radius, rb: Radius) -> f64 {
    match (ra, rb) {
        (None, None) => 1.0,
        (Some(ra), Some(rb)) => (rb / ra).sqrt(),
        (None, Some(rb)) => (rb / (ENTIRE_MARGIN * rb)).sqrt(),
        (Some(ra), None) => (ENTIRE_MARGIN * ra / ra).sqrt(),
    }
}

/// `disk_rule(Nr, Ntheta, beta, eta)`.
pub fn disk_rule(nr: usize, ntheta: usize, beta: f64, eta: f64) -> Result<DiskRule> {
    DiskRule::new(nr, ntheta, beta, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma_moment, ln_gamma, phi_n};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn laguerre_small_rules() {
        let r = gauss_laguerre(1, 0.7).unwrap();
        assert!(rel(r.nodes[0], 1.7) < 1e-15);
        assert!(rel(r.weights[0], gamma(1.7).unwrap()) < 1e-14);
        let r = gauss_laguerre(2, 0.0).unwrap();
        assert!((r.nodes[0] - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert!((r.nodes[1] - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn integrate_examples() {
        let r = gauss_laguerre(8, 0.0).unwrap();
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((r.integrate(|x| x) - 1.0).abs() < 1e-14);
        let p = r.integrate(|x| phi_n(3, 0.0, x).unwrap().powi(2));
        assert!((p - 1.0).abs() < 1e-13);
        let q: Quaternion = r.integrate(|x| Quaternion::new(1.0, x, 0.0, -x * x));
        assert!(q.max_abs_diff(Quaternion::new(1.0, 1.0, 0.0, -2.0)) < 1e-13);
    }

    #[test]
    fn jacobi_examples() {
        let r = gauss_jacobi_unit(10, 1.0, 1.0).unwrap();
        assert!((r.integrate(|t| t) - 0.5).abs() < 1e-15);
        let r = gauss_jacobi_unit(10, 2.0, 3.0).unwrap();
        let want = gamma(3.0).unwrap() * gamma(7.0).unwrap() / gamma(10.0).unwrap();
        assert!(rel(r.integrate(|t| t.powi(5)), want) < 1e-13);
        assert!(rel(r.weights.iter().sum(), beta_fn(2.0, 3.0).unwrap()) < 1e-14);
        let r = gauss_jacobi_unit(64, 2.0, 1.5).unwrap();
        let want = gamma(1.5).unwrap() * gamma(5.0).unwrap() / gamma(6.5).unwrap();
        assert!(rel(r.integrate(|t| t.powi(3)), want) < 1e-13);
    }

    #[test]
    fn large_laguerre_rule() {
        let r = gauss_laguerre(200, 0.0).unwrap();
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes[0] > 0.0 && *r.nodes.last().unwrap() < 4.0 * 200.0 + 4.0);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        for k in [1u32, 5, 20, 60] {
            let want = ln_gamma(k as f64 + 1.0).unwrap();
            let got = r.integrate(|x| x.powi(k as i32)).ln();
            assert!((got - want).abs() < 1e-12 * want.max(1.0), "k={k}");
        }
        let r = gauss_laguerre(200, 2.5).unwrap();
        let m = r.integrate(|x| x * x);
        assert!(rel(m, gamma(5.5).unwrap()) < 1e-12);
    }

    #[test]
    fn laguerre_orthonormality() {
        let alpha = 0.8;
        let r = gauss_laguerre(21, alpha).unwrap();
        for m in 0..=20 {
            for n in m..=20 {
                let v = r.integrate(|x| phi_n(m, alpha, x).unwrap() * phi_n(n, alpha, x).unwrap());
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12, "m={m} n={n} v={v}");
            }
        }
    }

    #[test]
    fn disk_monomials() {
        let (beta, eta) = (1.3, 2.2);
        let d = disk_rule(32, 64, beta, eta).unwrap();
        for m in 0..=10 {
            for n in 0..=10 {
                let v = d.integrate(|z| z.powu(m).conj() * z.powu(n));
                let want = if m == n {
                    PI * gamma_moment(n as usize, beta, eta).unwrap()
                } else {
                    0.0
                };
                assert!((v - want).norm() < 1e-12, "m={m} n={n}");
            }
        }
        let c = d.integrate(|_| 1.0);
        assert!(rel(c, PI * gamma_moment(0, beta, eta).unwrap()) < 1e-14);
        let p = d.pairing(Some(2.0), None, |z| z.powu(4), |z| z.powu(4));
        assert!(rel(p.re, PI * gamma_moment(4, beta, eta).unwrap()) < 1e-12);
        assert!(p.im.abs() < 1e-14);
    }

    #[test]
    fn shifted_pairing_near_boundary() {
        // a = K(., q) = 1/(pi (1 - z conj(q))^2) for beta = eta = 1, b = 1/(1-z)
        let (beta, eta) = (1.0, 1.0);
        let q = Complex64::new(0.2, 0.68);
        let d = disk_rule(32, 128, beta, eta).unwrap();
        // <b, a> with a(z) = sum (n+1) (z conj q)^n / pi, b(z) = sum z^n
        // = sum_n conj((n+1)/pi q̄^n) * pi/(n+1) = sum q^n = 1/(1-q)
        let a = |z: Complex64| 1.0 / (PI * (1.0 - z * q.conj()).powu(2));
        let b = |z: Complex64| 1.0 / (1.0 - z);
        let v = d.pairing(Some(1.0 / q.norm()), Some(1.0), a, b);
        let want = 1.0 / (1.0 - q);
        assert!((v - want).norm() < 1e-8, "{v} vs {want}");
        let plain = d.pairing(None, None, a, b);
        assert!((plain - want).norm() > 10.0 * (v - want).norm());
    }

    proptest! {
        #[test]
        fn jacobi_exactness(beta in 0.2f64..4.0, eta in 0.2f64..4.0, n in 1usize..24) {
            let r = gauss_jacobi_unit(n, beta, eta).unwrap();
            prop_assert!(r.nodes.iter().all(|&t| t > 0.0 && t < 1.0));
            for k in 0..(2 * n) {
                let got = r.integrate(|t| t.powi(k as i32));
                let want = gamma_moment(k, beta, eta).unwrap();
                prop_assert!(rel(got, want) < 1e-12, "k={} got={} want={}", k, got, want);
            }
        }

        #[test]
        fn laguerre_exactness(alpha in -0.9f64..5.0, n in 1usize..30) {
            let r = gauss_laguerre(n, alpha).unwrap();
            prop_assert!(r.nodes.iter().all(|&x| x > 0.0 && x < 4.0 * n as f64 + 2.0 * alpha + 4.0));
            for k in 0..(2 * n) {
                let got = r.integrate(|x| x.powi(k as i32));
                let want = ln_gamma(alpha + 1.0 + k as f64).unwrap().exp();
                prop_assert!(rel(got, want) < 1e-12, "k={} got={} want={}", k, got, want);
            }
        }
    }
}

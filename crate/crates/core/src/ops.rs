//! The dual transform `S^alpha_y` (spectral and quadrature forms), its
//! adjoint, the fractional Hankel transform, the second Bargmann transform,
//! the slice derivative and finite matrix representations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::kernels::HankelKernel;
use crate::linalg::CMatrix;
use crate::quad::{gauss_laguerre, DiskRule, QuadratureRule, Radius, RuleKind};
use crate::quat::{eval_power_series, lift, slice_decompose, Quaternion, SlicePoint};
use crate::specfun::{gamma_moments, laguerre_sequence, phi_sequence, Params};

/// Default number of Laguerre nodes for the quadrature forms.
pub const DEFAULT_LAGUERRE_NODES: usize = 200;
/// Default step of [`slice_derivative`].
pub const DEFAULT_SLICE_STEP: f64 = 1e-5;
/// Disk rule used for the discretized operator matrix.
pub const MATRIX_DISK: (usize, usize) = (32, 128);

/// `phi = sum_n phi_n^alpha a_n` with quaternion coefficients on the right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaguerreCoeffs {
    pub alpha: f64,
    pub coeffs: Vec<Quaternion>,
}

impl LaguerreCoeffs {
    pub fn new(alpha: f64, coeffs: Vec<Quaternion>) -> Result<Self> {
        ensure(alpha > -1.0, "alpha", alpha, "alpha > -1")?;
        Ok(Self { alpha, coeffs })
    }

    /// The basis function `phi_n`.
    pub fn basis(alpha: f64, n: usize) -> Result<Self> {
        let mut coeffs = vec![Quaternion::ZERO; n + 1];
        coeffs[n] = Quaternion::ONE;
        Self::new(alpha, coeffs)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `phi(x)`.
    pub fn eval(&self, x: f64) -> Result<Quaternion> {
        let phis = phi_sequence(self.coeffs.len(), self.alpha, x)?;
        Ok(phis.iter().zip(&self.coeffs).map(|(p, a)| *a * *p).sum())
    }

    /// `||phi||^2 = sum |a_n|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self, other> = sum conj(a_n) b_n`.
    pub fn inner(&self, other: &Self) -> Quaternion {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * *b)
            .sum()
    }
}

/// `f(q) = sum_n q^n c_n`, a slice-regular function on the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialCoeffs {
    pub coeffs: Vec<Quaternion>,
}

impl MonomialCoeffs {
    pub fn new(coeffs: Vec<Quaternion>) -> Self {
        Self { coeffs }
    }

    /// The monomial `e_n(q) = q^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Quaternion::ZERO; n + 1];
        coeffs[n] = Quaternion::ONE;
        Self { coeffs }
    }

    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        eval_power_series(&self.coeffs, q)
    }

    /// `<f, g>_omega = pi sum gamma_n conj(c_n) d_n`.
    pub fn inner_omega(&self, other: &Self, beta: f64, eta: f64) -> Result<Quaternion> {
        let n = self.coeffs.len().min(other.coeffs.len());
        let g = gamma_moments(beta, eta, n)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .zip(&g)
            .map(|((c, d), g)| c.conj() * *d * (PI * g))
            .sum())
    }

    /// `||f||_omega^2 = pi sum gamma_n |c_n|^2`.
    pub fn norm_sqr_omega(&self, beta: f64, eta: f64) -> Result<f64> {
        Ok(self.inner_omega(self, beta, eta)?.w)
    }
}

/// `int_{B_I} conj(f) g omega(|q|^2) du dv` on the slice of `axis`.
pub fn inner_omega_quadrature(
    f: impl Fn(Quaternion) -> Result<Quaternion> + Sync,
    g: impl Fn(Quaternion) -> Result<Quaternion> + Sync,
    disk: &DiskRule,
    axis: Quaternion,
) -> Result<Quaternion> {
    let pts: Vec<(Complex64, f64)> = disk.points().collect();
    pts.par_iter()
        .filter(|(_, w)| *w != 0.0)
        .map(|&(z, w)| {
            let q = lift(z, axis);
            Ok(f(q)?.conj() * g(q)? * w)
        })
        .try_reduce(|| Quaternion::ZERO, |a, b| Ok(a + b))
}

/// `S^alpha_y` in coefficients: `c_n = phi_n^alpha(y) a_n`.
pub fn dual_transform_spectral(phi: &LaguerreCoeffs, y: f64) -> Result<MonomialCoeffs> {
    let p = phi_sequence(phi.coeffs.len(), phi.alpha, y)?;
    Ok(MonomialCoeffs::new(
        phi.coeffs.iter().zip(&p).map(|(a, p)| *a * *p).collect(),
    ))
}

/// The integral form `S^alpha_y phi(q) = int_0^inf R_q(x, y) phi(x) x^alpha e^{-x} dx`
/// by a Gauss-Laguerre rule.
#[derive(Debug)]
pub struct DualTransform {
    y: f64,
    kernel: HankelKernel,
    rule: QuadratureRule,
}

impl DualTransform {
    pub fn new(alpha: f64, y: f64, nodes: usize) -> Result<Self> {
        Self::with_rule(y, gauss_laguerre(nodes, alpha)?)
    }

    pub fn with_rule(y: f64, rule: QuadratureRule) -> Result<Self> {
        ensure(y >= 0.0, "y", y, "y >= 0")?;
        let RuleKind::Laguerre { alpha } = rule.kind else {
            return Err(Error::Dimension("dual transform needs a Laguerre rule".into()));
        };
        Ok(Self {
            y,
            kernel: HankelKernel::new(alpha)?,
            rule,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.kernel.alpha()
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn kernel(&self) -> &HankelKernel {
        &self.kernel
    }

    /// `w_i R_s(x_i, y)` for a slice coordinate `s`.
    pub fn kernel_row(&self, s: Complex64) -> Vec<Complex64> {
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(|(&x, &w)| {
                if w == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.kernel.eval_slice(s, x, self.y) * w
                }
            })
            .collect()
    }

    /// `phi` at the rule nodes.
    pub fn sample(&self, phi: impl Fn(f64) -> Result<Quaternion>) -> Result<Vec<Quaternion>> {
        self.rule.nodes.iter().map(|&x| phi(x)).collect()
    }

    /// Samples of `sum a_n phi_n` at the rule nodes.
    pub fn sample_coeffs(&self, phi: &LaguerreCoeffs) -> Result<Vec<Quaternion>> {
        if (phi.alpha - self.alpha()).abs() > 0.0 {
            return Err(Error::Dimension(format!(
                "coefficients for alpha = {} applied with alpha = {}",
                phi.alpha,
                self.alpha()
            )));
        }
        self.sample(|x| phi.eval(x))
    }

    /// The transform of pre-sampled `phi` at `q`; the kernel multiplies from
    /// the left.
    pub fn apply_sampled(&self, samples: &[Quaternion], q: Quaternion) -> Result<Quaternion> {
        if samples.len() != self.rule.len() {
            return Err(Error::Dimension(format!(
                "{} samples for {} nodes",
                samples.len(),
                self.rule.len()
            )));
        }
        let r = q.norm();
        if r >= 1.0 {
            return Err(Error::OutsideBall(r));
        }
        let sp = slice_decompose(q);
        let row = self.kernel_row(sp.to_complex());
        Ok(row
            .iter()
            .zip(samples)
            .map(|(k, f)| lift(*k, sp.axis) * *f)
            .sum())
    }

    pub fn apply(&self, phi: impl Fn(f64) -> Result<Quaternion>, q: Quaternion) -> Result<Quaternion> {
        let s = self.sample(phi)?;
        self.apply_sampled(&s, q)
    }
}

/// One-shot quadrature form of `S^alpha_y phi(q)`; `rule` must be a Laguerre rule.
pub fn dual_transform_quadrature(
    phi: impl Fn(f64) -> Result<Quaternion>,
    y: f64,
    rule: &QuadratureRule,
    q: Quaternion,
) -> Result<Quaternion> {
    DualTransform::with_rule(y, rule.clone())?.apply(phi, q)
}

/// Adjoint in coefficients: `b_n = pi gamma_n phi_n^alpha(y) g_n`.
pub fn adjoint_apply_spectral(g: &MonomialCoeffs, params: &Params) -> Result<LaguerreCoeffs> {
    let n = g.coeffs.len();
    let p = phi_sequence(n, params.alpha, params.y)?;
    let gam = gamma_moments(params.beta, params.eta, n)?;
    LaguerreCoeffs::new(
        params.alpha,
        g.coeffs
            .iter()
            .zip(p.iter().zip(&gam))
            .map(|(c, (p, gm))| *c * (PI * gm * p))
            .collect(),
    )
}

/// `(S^alpha_y)^* G(x) = int_{B_I} R_{conj q}(x, y) G(q) omega(|q|^2) dlambda(q)` by the
/// disk rule (whose radial factor fixes `omega`), on the slice of `axis`.
///
/// `g_radius` is the radius of analyticity of `G` (`None` for entire
/// functions such as polynomials); it steers the contour shift.
pub fn adjoint_apply_quadrature(
    g: impl Fn(Quaternion) -> Result<Quaternion> + Sync,
    g_radius: Radius,
    x: f64,
    kernel: &HankelKernel,
    y: f64,
    disk: &DiskRule,
    axis: Quaternion,
) -> Result<Quaternion> {
    let pts = disk.shifted_points(Some(1.0), g_radius);
    pts.par_iter()
        .filter(|p| p.weight != 0.0)
        .map(|p| {
            let r = lift(kernel.eval_slice(p.left, x, y), axis).conj();
            Ok(r * g(lift(p.right, axis))? * p.weight)
        })
        .try_reduce(|| Quaternion::ZERO, |a, b| Ok(a + b))
}

/// The fractional Hankel transform `L_t^alpha`: `a_n -> t^n a_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalHankel {
    pub t: Quaternion,
}

impl FractionalHankel {
    pub fn new(t: Quaternion) -> Result<Self> {
        let r = t.norm();
        if r > 1.0 + 1e-15 {
            return Err(Error::OutsideBall(r));
        }
        Ok(Self { t })
    }

    pub fn apply(&self, phi: &LaguerreCoeffs) -> LaguerreCoeffs {
        let mut tn = Quaternion::ONE;
        let coeffs = phi
            .coeffs
            .iter()
            .map(|a| {
                let v = tn * *a;
                tn *= self.t;
                v
            })
            .collect();
        LaguerreCoeffs {
            alpha: phi.alpha,
            coeffs,
        }
    }

    /// `L_s o L_t = L_{st}`, defined only when `s` and `t` lie on a common slice.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !self.t.commutes_with(inner.t, 1e-14) {
            return Err(Error::SliceMismatch);
        }
        Ok(Self {
            t: self.t * inner.t,
        })
    }
}

/// `hankel_fractional_apply(phi, t)`.
pub fn hankel_fractional_apply(phi: &LaguerreCoeffs, t: Quaternion) -> Result<LaguerreCoeffs> {
    Ok(FractionalHankel::new(t)?.apply(phi))
}

/// Second Bargmann transform
/// `(1-q)^{-(alpha+1)} int_0^inf t^alpha exp(-t/(1-q)) phi(t) dt`, written against the
/// Laguerre measure as `int [e^{-t q/(1-q)} phi(t)] t^alpha e^{-t} dt`.
pub fn bargmann_apply(
    phi: impl Fn(f64) -> Result<Quaternion>,
    q: Quaternion,
    rule: &QuadratureRule,
) -> Result<Quaternion> {
    let RuleKind::Laguerre { alpha } = rule.kind else {
        return Err(Error::Dimension("Bargmann transform needs a Laguerre rule".into()));
    };
    let r = q.norm();
    if r >= 1.0 {
        return Err(Error::OutsideBall(r));
    }
    let sp = slice_decompose(q);
    let s = sp.to_complex();
    let om = 1.0 - s;
    let pre = -(alpha + 1.0) * om.ln();
    let mut acc = Quaternion::ZERO;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        if w == 0.0 {
            continue;
        }
        let k = (pre - s * t / om).exp() * w;
        acc += lift(k, sp.axis) * phi(t)?;
    }
    Ok(acc)
}

/// `1/2 (d/du + I d/dv) f` on the slice of `point` by central differences.
pub fn slice_derivative(
    f: impl Fn(Quaternion) -> Result<Quaternion>,
    point: &SlicePoint,
    h: f64,
) -> Result<Quaternion> {
    ensure(h > 0.0, "h", h, "h > 0")?;
    let q = point.recompose();
    let du = (f(q + Quaternion::real(h))? - f(q - Quaternion::real(h))?) * (0.5 / h);
    let step = point.axis * h;
    let dv = (f(q + step)? - f(q - step)?) * (0.5 / h);
    Ok((du + point.axis * dv) * 0.5)
}

/// Which matrix [`build_operator_matrix`] assembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixForm {
    Closed,
    Discretized,
}

/// `N x N` matrix of `S^alpha_y` from `(phi_n)` to the orthonormal monomials
/// `e_m / sqrt(pi gamma_m)`, indices `0..N`.
///
/// The closed form is `diag(sqrt(pi gamma_n) phi_n(y))`; the discretized form
/// pairs each normalized monomial with the quadrature image of `phi_n` over the
/// disk rule [`MATRIX_DISK`] and a Laguerre rule with `nodes` points.
pub fn build_operator_matrix(params: &Params, n: usize, form: MatrixForm, nodes: usize) -> Result<CMatrix> {
    ensure(n >= 1, "N", n as f64, "N >= 1")?;
    let gam = gamma_moments(params.beta, params.eta, n)?;
    match form {
        MatrixForm::Closed => {
            let p = phi_sequence(n, params.alpha, params.y)?;
            let d: Vec<f64> = p.iter().zip(&gam).map(|(p, g)| (PI * g).sqrt() * p).collect();
            Ok(CMatrix::from_real_diagonal(&d))
        }
        MatrixForm::Discretized => {
            let st = DualTransform::new(params.alpha, params.y, nodes)?;
            let disk = DiskRule::new(MATRIX_DISK.0, MATRIX_DISK.1, params.beta, params.eta)?;
            // phi_n at the Laguerre nodes, row-major in node
            let phis: Vec<Vec<f64>> = st
                .rule()
                .nodes
                .iter()
                .map(|&x| phi_sequence(n, params.alpha, x))
                .collect::<Result<_>>()?;
            let pts = disk.shifted_points(None, Some(1.0));
            let acc = pts
                .par_iter()
                .filter(|p| p.weight != 0.0)
                .fold(
                    || vec![Complex64::new(0.0, 0.0); n * n],
                    |mut acc, p| {
                        let row = st.kernel_row(p.right);
                        let mut image = vec![Complex64::new(0.0, 0.0); n];
                        for (k, ph) in row.iter().zip(&phis) {
                            for (img, v) in image.iter_mut().zip(ph) {
                                *img += *k * *v;
                            }
                        }
                        let zc = p.left.conj();
                        let mut zm = Complex64::new(p.weight, 0.0);
                        for m in 0..n {
                            for (j, img) in image.iter().enumerate() {
                                acc[m * n + j] += zm * img;
                            }
                            zm *= zc;
                        }
                        acc
                    },
                )
                .reduce(
                    || vec![Complex64::new(0.0, 0.0); n * n],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                );
            Ok(CMatrix::from_fn(n, n, |m, j| acc[m * n + j] / (PI * gam[m]).sqrt()))
        }
    }
}

/// `{ n <= N : L_n^{(alpha)}(y) = 0 }` up to `tol` times the local scale of
/// the neighbouring values.
pub fn null_space_indices(y: f64, alpha: f64, n: usize, tol: f64) -> Result<Vec<usize>> {
    ensure(y >= 0.0, "y", y, "y >= 0")?;
    ensure(tol > 0.0, "tol", tol, "tol > 0")?;
    let l = laguerre_sequence(n + 2, alpha, y)?;
    Ok((0..=n)
        .filter(|&k| {
            let prev = if k > 0 { l[k - 1].abs() } else { 0.0 };
            let scale = 1f64.max(prev).max(l[k + 1].abs());
            l[k].abs() <= tol * scale
        })
        .collect())
}

/// Default tolerance of [`null_space_indices`].
pub const DEFAULT_NULL_TOL: f64 = 1e-9;

/// Surviving monomial directions of the range of `S^alpha_y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub y: f64,
    pub alpha: f64,
    pub truncation: usize,
    pub null_indices: Vec<usize>,
    pub surviving: Vec<usize>,
    /// Set when some monomial is missing, so the closure of the range is a
    /// proper subspace of the Bergman space.
    pub strict_inclusion: bool,
}

pub fn range_basis_report(y: f64, alpha: f64, n: usize) -> Result<RangeReport> {
    let null = null_space_indices(y, alpha, n, DEFAULT_NULL_TOL)?;
    let surviving = (0..=n).filter(|k| !null.contains(k)).collect();
    Ok(RangeReport {
        y,
        alpha,
        truncation: n,
        strict_inclusion: !null.is_empty(),
        null_indices: null,
        surviving,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::disk_rule;
    use crate::quat::unit_axis;
    use crate::specfun::{gamma, laguerre_zeros, phi_n};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn random_quat(rng: &mut ChaCha8Rng) -> Quaternion {
        q(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    }

    fn q_grid() -> Vec<Quaternion> {
        vec![
            Quaternion::ZERO,
            q(0.5, 0.0, 0.0, 0.0),
            q(-0.6, 0.0, 0.0, 0.0),
            q(0.3, 0.4, 0.0, 0.0),
            q(-0.2, 0.0, 0.5, 0.3),
            q(0.1, 0.3, -0.3, 0.4),
            q(0.0, 0.0, 0.0, 0.7),
        ]
    }

    #[test]
    fn spectral_examples() {
        let phi = LaguerreCoeffs::basis(0.0, 0).unwrap();
        let s = dual_transform_spectral(&phi, 0.0).unwrap();
        assert_eq!(s.coeffs[0], Quaternion::ONE);
        let z = laguerre_zeros(4, 1.5).unwrap();
        let phi = LaguerreCoeffs::basis(1.5, 4).unwrap();
        let s = dual_transform_spectral(&phi, z[2]).unwrap();
        assert!(s.coeffs[4].norm() < 1e-13);
    }

    #[test]
    fn eigen_relation_by_quadrature() {
        let mut worst: f64 = 0.0;
        for &a in &[0.0, 1.5] {
            for &y in &[0.0, 0.5, 3.0] {
                let st = DualTransform::new(a, y, DEFAULT_LAGUERRE_NODES).unwrap();
                for n in 0..=15 {
                    let s = st.sample(|x| Ok(Quaternion::real(phi_n(n, a, x)?))).unwrap();
                    let py = phi_n(n, a, y).unwrap();
                    for qq in q_grid() {
                        let got = st.apply_sampled(&s, qq).unwrap();
                        worst = worst.max(got.max_abs_diff(qq.powi(n as u32) * py));
                    }
                }
            }
        }
        assert!(worst <= 1e-8, "{worst}");
    }

    #[test]
    fn quadrature_trivial_cases() {
        let rule = gauss_laguerre(200, 0.0).unwrap();
        let v = dual_transform_quadrature(|_| Ok(Quaternion::ONE), 0.0, &rule, q(0.5, 0.0, 0.0, 0.0)).unwrap();
        assert!(v.max_abs_diff(Quaternion::ONE) < 1e-12);
        // q = 0 keeps only the phi_0 component: phi_0(y) <phi_0, phi>
        let phi = LaguerreCoeffs::new(0.0, vec![q(0.3, 1.0, 0.0, 0.0), q(2.0, 0.0, 1.0, 0.0)]).unwrap();
        let v = dual_transform_quadrature(|x| phi.eval(x), 2.0, &rule, Quaternion::ZERO).unwrap();
        let want = phi.coeffs[0] * phi_n(0, 0.0, 2.0).unwrap();
        assert!(v.max_abs_diff(want) < 1e-12);
    }

    #[test]
    fn quaternion_coefficients_sit_on_the_right() {
        let a = 0.7;
        let y = 1.3;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = LaguerreCoeffs::new(a, (0..8).map(|_| random_quat(&mut rng)).collect()).unwrap();
        let st = DualTransform::new(a, y, 200).unwrap();
        let s = st.sample_coeffs(&phi).unwrap();
        let spec = dual_transform_spectral(&phi, y).unwrap();
        for qq in q_grid() {
            let got = st.apply_sampled(&s, qq).unwrap();
            assert!(got.max_abs_diff(spec.eval(qq).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn parseval_through_the_disk() {
        // the image is evaluated from its coefficients: the quadrature form is
        // only accurate for |q| <~ 0.95, and the outer disk nodes sit at 0.999
        let params = Params::new(1.0, 2.0, 1.5, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let phi = LaguerreCoeffs::new(1.0, (0..20).map(|_| random_quat(&mut rng)).collect()).unwrap();
        let spec = dual_transform_spectral(&phi, params.y).unwrap();
        let disk = disk_rule(32, 64, params.beta, params.eta).unwrap();
        let axis = unit_axis(q(0.0, 1.0, 2.0, -1.0)).unwrap();
        let f = |p: Quaternion| spec.eval(p);
        let quad = inner_omega_quadrature(f, f, &disk, axis).unwrap().w;
        let p = phi_sequence(20, 1.0, params.y).unwrap();
        let g = gamma_moments(params.beta, params.eta, 20).unwrap();
        let want: f64 = (0..20).map(|n| PI * g[n] * (p[n] * phi.coeffs[n].norm()).powi(2)).sum();
        assert!((quad - want).abs() < 1e-8 * want, "{quad} vs {want}");
    }

    #[test]
    fn adjoint_duality_coefficients() {
        let params = Params::new(0.5, 1.5, 2.0, 1.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let phi = LaguerreCoeffs::new(0.5, (0..20).map(|_| random_quat(&mut rng)).collect()).unwrap();
        let g = MonomialCoeffs::new((0..20).map(|_| random_quat(&mut rng)).collect());
        let lhs = dual_transform_spectral(&phi, params.y)
            .unwrap()
            .inner_omega(&g, params.beta, params.eta)
            .unwrap();
        let rhs = phi.inner(&adjoint_apply_spectral(&g, &params).unwrap());
        assert!(lhs.max_abs_diff(rhs) < 1e-10);
    }

    #[test]
    fn adjoint_quadrature_examples() {
        for &a in &[0.5, 2.0] {
            let y = 0.9;
            let kernel = HankelKernel::new(a).unwrap();
            // beta = 1, eta = alpha gives the weight (1 - |q|^2)^{alpha - 1}
            let params = Params::new(a, 1.0, a, y).unwrap();
            let disk = disk_rule(32, 128, 1.0, a).unwrap();
            let axis = unit_axis(q(0.0, 0.0, 1.0, 1.0)).unwrap();
            for &x in &[0.2, 1.0, 4.0] {
                for k in [0usize, 2, 5] {
                    let g = MonomialCoeffs::monomial(k);
                    let got =
                        adjoint_apply_quadrature(|p| g.eval(p), None, x, &kernel, y, &disk, axis).unwrap();
                    let b = adjoint_apply_spectral(&g, &params).unwrap();
                    let want = b.eval(x).unwrap();
                    assert!(got.max_abs_diff(want) < 1e-7, "a={a} x={x} k={k}: {got} vs {want}");
                }
            }
            let zero = adjoint_apply_quadrature(|_| Ok(Quaternion::ZERO), None, 1.0, &kernel, y, &disk, axis).unwrap();
            assert_eq!(zero, Quaternion::ZERO);
        }
    }

    #[test]
    fn semigroup_on_a_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = LaguerreCoeffs::new(0.0, (0..30).map(|_| random_quat(&mut rng)).collect()).unwrap();
        let axis = unit_axis(q(0.0, 0.3, -0.5, 0.8)).unwrap();
        let (p, t) = (lift(Complex64::new(0.4, 0.7), axis), lift(Complex64::new(-0.6, 0.2), axis));
        let lp = FractionalHankel::new(p).unwrap();
        let lt = FractionalHankel::new(t).unwrap();
        let two = lp.apply(&lt.apply(&phi));
        let one = lp.compose(&lt).unwrap().apply(&phi);
        for (a, b) in two.coeffs.iter().zip(&one.coeffs) {
            assert!(a.max_abs_diff(*b) <= 1e-14);
        }
        let id = hankel_fractional_apply(&phi, Quaternion::ONE).unwrap();
        assert_eq!(id, phi);
        let proj = hankel_fractional_apply(&phi, Quaternion::ZERO).unwrap();
        assert_eq!(proj.coeffs[0], phi.coeffs[0]);
        assert!(proj.coeffs[1..].iter().all(|c| *c == Quaternion::ZERO));
        let other = FractionalHankel::new(q(0.0, 0.0, 0.5, 0.0)).unwrap();
        assert_eq!(lp.compose(&other), Err(Error::SliceMismatch));
        assert!(FractionalHankel::new(q(1.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn bargmann_is_proportional_to_s0() {
        for &a in &[0.0, 1.5] {
            let rule = gauss_laguerre(200, a).unwrap();
            let st = DualTransform::with_rule(0.0, rule.clone()).unwrap();
            let c = gamma(a + 1.0).unwrap();
            let phi0 = |x: f64| Ok(Quaternion::real(phi_n(0, a, x)?));
            let v = bargmann_apply(phi0, Quaternion::ZERO, &rule).unwrap();
            assert!((v.w - c.sqrt()).abs() < 1e-12);
            for n in [0usize, 3, 7] {
                let f = |x: f64| Ok(Quaternion::new(phi_n(n, a, x)?, 0.0, 0.5 * x, 0.0));
                for qq in q_grid() {
                    let b = bargmann_apply(f, qq, &rule).unwrap();
                    let s = st.apply(f, qq).unwrap();
                    assert!(b.max_abs_diff(s * c) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn slice_derivative_examples() {
        let p = SlicePoint::new(0.2, 0.3, q(0.0, 1.0, 1.0, 0.0)).unwrap();
        let e3 = MonomialCoeffs::monomial(3);
        let d = slice_derivative(|x| e3.eval(x), &p, 1e-4).unwrap();
        assert!(d.norm() < 1e-8);
        let d = slice_derivative(|x| Ok(x.conj()), &p, 1e-4).unwrap();
        assert!(d.max_abs_diff(Quaternion::ONE) < 1e-12);
    }

    #[test]
    fn transform_output_is_slice_regular() {
        let st = DualTransform::new(1.0, 0.7, 200).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = LaguerreCoeffs::new(1.0, (0..10).map(|_| random_quat(&mut rng)).collect()).unwrap();
        let s = st.sample_coeffs(&phi).unwrap();
        for &(u, v) in &[(0.1, 0.2), (-0.4, 0.3), (0.0, 0.6)] {
            let p = SlicePoint::new(u, v, q(0.0, 0.2, 0.9, -0.1)).unwrap();
            let d = slice_derivative(|x| st.apply_sampled(&s, x), &p, 1e-4).unwrap();
            assert!(d.norm() < 1e-6, "{d}");
        }
    }

    #[test]
    fn matrices() {
        let params = Params::new(0.0, 1.0, 1.0, 0.0).unwrap();
        let c = build_operator_matrix(&params, 5, MatrixForm::Closed, 200).unwrap();
        assert!((c[(0, 0)].re - PI.sqrt()).abs() < 1e-15);
        let params = Params::new(0.5, 2.0, 1.5, 1.2).unwrap();
        let c = build_operator_matrix(&params, 20, MatrixForm::Closed, 200).unwrap();
        let d = build_operator_matrix(&params, 20, MatrixForm::Discretized, 200).unwrap();
        assert!(c.max_abs_diff(&d) <= 1e-7, "{}", c.max_abs_diff(&d));
    }

    #[test]
    fn null_space_examples() {
        assert!(null_space_indices(0.0, 0.0, 60, 1e-9).unwrap().is_empty());
        assert!(null_space_indices(0.0, 2.5, 60, 1e-9).unwrap().is_empty());
        let z = laguerre_zeros(5, 0.0).unwrap();
        assert!(null_space_indices(z[4], 0.0, 20, 1e-9).unwrap().contains(&5));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let y: f64 = rng.gen_range(0.0..1.0);
            assert!(null_space_indices(y, 0.0, 50, 1e-9).unwrap().is_empty(), "y={y}");
        }
    }

    #[test]
    fn range_reports() {
        let r = range_basis_report(0.0, 1.0, 12).unwrap();
        assert_eq!(r.surviving, (0..=12).collect::<Vec<_>>());
        assert!(!r.strict_inclusion);
        let z = laguerre_zeros(5, 0.0).unwrap();
        let r = range_basis_report(z[1], 0.0, 12).unwrap();
        assert!(r.null_indices.contains(&5) && !r.surviving.contains(&5));
        assert!(r.strict_inclusion);
        let r = range_basis_report(0.37, 0.0, 0).unwrap();
        assert_eq!(r.surviving, vec![0]);
    }

    #[test]
    fn cauchy_schwarz_bound() {
        let a = 0.5;
        let y = 2.0;
        let st = DualTransform::new(a, y, 200).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = LaguerreCoeffs::new(a, (0..12).map(|_| random_quat(&mut rng)).collect()).unwrap();
        let s = st.sample_coeffs(&phi).unwrap();
        for qq in q_grid() {
            let v = st.apply_sampled(&s, qq).unwrap().norm_sqr();
            let d = st.kernel().eval_slice(Complex64::new(qq.norm_sqr(), 0.0), y, y).re;
            assert!(v <= d * phi.norm_sqr() * (1.0 + 1e-10));
        }
    }
}

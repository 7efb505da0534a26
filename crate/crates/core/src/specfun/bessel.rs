use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::gamma::ln_gamma_pos;
use crate::error::{ensure, Result};
use crate::quad::{gauss_jacobi_unit, QuadratureRule};

const SERIES_MAX_TERMS: usize = 2000;
const ASYM_MIN: f64 = 20.0;
const RULE_SIZES: [usize; 10] = [24, 32, 48, 64, 96, 128, 192, 256, 384, 512];

/// `g_nu(w) = sum_n w^n / (n! Gamma(nu+n+1))`, so that
/// `I_nu(xi) = (xi/2)^nu g_nu((xi/2)^2)`.
///
/// Values are returned scaled by `e^{-z}` with `z = 2 sqrt(w)` on the
/// principal branch, which keeps them bounded for `Re w -> inf`. Three
/// regimes: the power series near the origin and along the positive axis,
/// a Poisson integral by Gauss-Jacobi quadrature at moderate `|z|`, and the
/// Hankel asymptotic expansion for `|z| >= max(20, nu^2)`. The switch is
/// early on purpose: near the imaginary axis the Poisson integral cancels
/// down to `|z|^{-nu-1/2}` of its integrand.
#[derive(Debug)]
pub struct BesselG {
    nu: f64,
    ln_gamma_nu1: f64,
    inner: Inner,
}

#[derive(Debug)]
enum Inner {
    /// `nu > -1/2`: direct Poisson integral.
    Direct { rules: Vec<OnceLock<QuadratureRule>> },
    /// `nu <= -1/2`: `g_nu = (nu+1) g_{nu+1} + w g_{nu+2}`.
    Shifted {
        up1: Box<BesselG>,
        up2: Box<BesselG>,
    },
}

/// `e^{-z} g(w)` together with the `z` that was used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub z: Complex64,
    pub value: Complex64,
}

impl Scaled {
    /// The unscaled `g(w)`.
    pub fn unscaled(self) -> Complex64 {
        self.value * self.z.exp()
    }
}

impl BesselG {
    pub fn new(nu: f64) -> Result<Self> {
        ensure(nu > -1.0, "alpha", nu, "alpha > -1")?;
        let inner = if nu > -0.5 {
            Inner::Direct {
                rules: RULE_SIZES.iter().map(|_| OnceLock::new()).collect(),
            }
        } else {
            Inner::Shifted {
                up1: Box::new(BesselG::new(nu + 1.0)?),
                up2: Box::new(BesselG::new(nu + 2.0)?),
            }
        };
        Ok(Self {
            nu,
            ln_gamma_nu1: ln_gamma_pos(nu + 1.0),
            inner,
        })
    }

    pub fn order(&self) -> f64 {
        self.nu
    }

    fn asym_threshold(&self) -> f64 {
        ASYM_MIN.max(self.nu * self.nu)
    }

    /// `g(w)` for real `w`.
    pub fn eval_real(&self, w: f64) -> f64 {
        self.eval(Complex64::new(w, 0.0)).re
    }

    /// `g(w)`.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        if w.im == 0.0 && w.re >= 0.0 && 2.0 * w.re.sqrt() < self.asym_threshold() {
            // positive axis: plain series, no cancellation
            return self.series(w);
        }
        self.scaled(w).unscaled()
    }

    /// `e^{-z} g(w)` with `z = 2 sqrt(w)`.
    pub fn scaled(&self, w: Complex64) -> Scaled {
        let z = 2.0 * w.sqrt();
        let az = z.norm();
        let value = if w.norm() <= 1.0 || (w.im == 0.0 && w.re >= 0.0 && az < ASYM_MIN) {
            self.series(w) * (-z).exp()
        } else if az >= self.asym_threshold() {
            self.asymptotic(w, z)
        } else {
            self.integral(w, z)
        };
        Scaled { z, value }
    }

    fn series(&self, w: Complex64) -> Complex64 {
        let mut term = Complex64::new((-self.ln_gamma_nu1).exp(), 0.0);
        let mut sum = term;
        for n in 0..SERIES_MAX_TERMS {
            let k = n as f64 + 1.0;
            term = term * w / (k * (self.nu + k));
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() && k > w.norm().sqrt() {
                break;
            }
        }
        sum
    }

    fn integral(&self, w: Complex64, z: Complex64) -> Complex64 {
        match &self.inner {
            Inner::Shifted { up1, up2 } => {
                (self.nu + 1.0) * up1.integral(w, z) + w * up2.integral(w, z)
            }
            Inner::Direct { rules } => {
                // g(w) = 2^{2nu} / (sqrt(pi) Gamma(nu+1/2)) int_0^1 (s(1-s))^{nu-1/2}
                //        cosh(z(2s-1)) ds; the symmetric rule folds cosh into one
                // exponential after scaling by e^{-z}
                let need = 0.6 * z.norm() + 20.0;
                let idx = RULE_SIZES
                    .iter()
                    .position(|&m| m as f64 >= need)
                    .unwrap_or(RULE_SIZES.len() - 1);
                let b = self.nu + 0.5;
                let rule = rules[idx].get_or_init(|| {
                    gauss_jacobi_unit(RULE_SIZES[idx], b, b)
                        .expect("Gauss-Jacobi rule for the Poisson integral")
                });
                let sum: Complex64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&s, &wt)| (z * (2.0 * s - 2.0)).exp() * wt)
                    .sum();
                let ln_c = 2.0 * self.nu * 2f64.ln() - 0.5 * PI.ln() - ln_gamma_pos(b);
                sum * ln_c.exp()
            }
        }
    }

    fn asymptotic(&self, w: Complex64, z: Complex64) -> Complex64 {
        // I_nu(z) e^{-z} ~ (2 pi z)^{-1/2} [ sum (-1)^k a_k z^{-k}
        //                  +- i e^{+- i nu pi} e^{-2z} sum a_k z^{-k} ]
        let mu = 4.0 * self.nu * self.nu;
        let zinv = 1.0 / z;
        let mut a = Complex64::new(1.0, 0.0);
        let mut s_alt = a;
        let mut s_pos = a;
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let kf = k as f64;
            let next = a * zinv * ((mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf));
            let size = next.norm();
            if size >= last || size == 0.0 {
                break;
            }
            a = next;
            last = size;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            s_alt += a * sign;
            s_pos += a;
            if size < 1e-17 {
                break;
            }
        }
        let sgn = if z.im >= 0.0 { 1.0 } else { -1.0 };
        let rot = Complex64::new(0.0, sgn) * Complex64::from_polar(1.0, sgn * self.nu * PI);
        let i_scaled = (s_alt + rot * (-2.0 * z).exp() * s_pos) / (2.0 * PI * z).sqrt();
        // g = I / (z/2)^nu and z/2 = sqrt(w)
        i_scaled / (0.5 * self.nu * w.ln()).exp()
    }
}

/// `g_alpha(w)` for real `w`.
pub fn bessel_i_scaled(alpha: f64, w: f64) -> Result<f64> {
    ensure(w.is_finite(), "w", w, "finite")?;
    Ok(BesselG::new(alpha)?.eval_real(w))
}

/// `I_alpha(xi) = (xi/2)^alpha g_alpha((xi/2)^2)` for `xi >= 0`.
pub fn bessel_i(alpha: f64, xi: f64) -> Result<f64> {
    ensure(xi >= 0.0, "xi", xi, "xi >= 0")?;
    let h = 0.5 * xi;
    let g = bessel_i_scaled(alpha, h * h)?;
    Ok(if h == 0.0 {
        if alpha == 0.0 {
            g
        } else if alpha > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        h.powf(alpha) * g
    })
}

use std::f64::consts::PI;

use super::gamma::ln_gamma_pos;
use crate::error::{ensure, Result};
use crate::quad::{gauss_from_recurrence, Recurrence};

/// `L_n^{(alpha)}(x)` by the three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> Result<f64> {
    ensure(alpha > -1.0, "alpha", alpha, "alpha > -1")?;
    ensure(x.is_finite(), "x", x, "finite")?;
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `L_0^{(alpha)}(x), ..., L_{count-1}^{(alpha)}(x)`.
pub fn laguerre_sequence(count: usize, alpha: f64, x: f64) -> Result<Vec<f64>> {
    ensure(alpha > -1.0, "alpha", alpha, "alpha > -1")?;
    let mut out = Vec::with_capacity(count);
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..count {
        out.push(cur);
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// Normalized Laguerre function `phi_n^alpha(y) = (n!/Gamma(alpha+n+1))^{1/2} L_n^{(alpha)}(y)`,
/// orthonormal for `y^alpha e^{-y} dy`.
pub fn phi_n(n: usize, alpha: f64, y: f64) -> Result<f64> {
    ensure(y >= 0.0, "y", y, "y >= 0")?;
    let l = laguerre(n, alpha, y)?;
    let nf = n as f64;
    let ln_c = 0.5 * (ln_gamma_pos(nf + 1.0) - ln_gamma_pos(alpha + nf + 1.0));
    Ok(ln_c.exp() * l)
}

/// `phi_0^alpha(y), ..., phi_{count-1}^alpha(y)` by the orthonormal recurrence
/// `sqrt((n+1)(n+alpha+1)) phi_{n+1} = (2n+1+alpha-y) phi_n - sqrt(n(n+alpha)) phi_{n-1}`.
pub fn phi_sequence(count: usize, alpha: f64, y: f64) -> Result<Vec<f64>> {
    ensure(alpha > -1.0, "alpha", alpha, "alpha > -1")?;
    ensure(y >= 0.0, "y", y, "y >= 0")?;
    let mut out = Vec::with_capacity(count);
    let mut prev = 0.0;
    let mut cur = (-0.5 * ln_gamma_pos(alpha + 1.0)).exp();
    for n in 0..count {
        out.push(cur);
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + alpha - y) * cur - (nf * (nf + alpha)).sqrt() * prev)
            / ((nf + 1.0) * (nf + alpha + 1.0)).sqrt();
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// The `n` zeros of `L_n^{(alpha)}`, increasing.
pub fn laguerre_zeros(n: usize, alpha: f64) -> Result<Vec<f64>> {
    ensure(n >= 1, "n", n as f64, "n >= 1")?;
    let rec = Recurrence::laguerre(n, alpha)?;
    Ok(gauss_from_recurrence(&rec, n)?.0)
}

/// Amplitude of the large-`n` oscillation of `L_n^{(alpha)}(y)`:
/// `e^{y/2} pi^{-1/2} y^{-(2alpha+1)/4} n^{(2alpha-1)/4}`.
pub fn laguerre_envelope(n: f64, alpha: f64, y: f64) -> Result<f64> {
    ensure(y > 0.0, "y", y, "y > 0")?;
    ensure(n >= 1.0, "n", n, "n >= 1")?;
    ensure(alpha > -1.0, "alpha", alpha, "alpha > -1")?;
    Ok((0.5 * y).exp() / PI.sqrt()
        * y.powf(-(2.0 * alpha + 1.0) / 4.0)
        * n.powf((2.0 * alpha - 1.0) / 4.0))
}

/// Leading term of the oscillatory asymptotics of `L_n^{(alpha)}(y)`, `y > 0`:
/// envelope times `cos(2 sqrt(n y) - pi (2alpha+1)/4)`. `n` may be fractional.
pub fn laguerre_asymptotic(n: f64, alpha: f64, y: f64) -> Result<f64> {
    let amp = laguerre_envelope(n, alpha, y)?;
    Ok(amp * (2.0 * (n * y).sqrt() - PI * (2.0 * alpha + 1.0) / 4.0).cos())
}

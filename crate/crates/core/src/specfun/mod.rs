//! Real special functions: log-gamma, Pochhammer symbols, the scaled
//! modified Bessel function, generalized Laguerre polynomials and the
//! Beta-moment constants of the radial weight.

mod bessel;
mod gamma;
mod laguerre;

pub use bessel::{bessel_i, bessel_i_scaled, BesselG};
pub use gamma::{beta_fn, gamma, gamma_moment, gamma_moments, ln_gamma, pochhammer};
pub use laguerre::{
    laguerre, laguerre_asymptotic, laguerre_envelope, laguerre_sequence, laguerre_zeros, phi_n,
    phi_sequence,
};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// The parameter pack `(alpha, beta, eta, y)`.
///
/// `alpha > -1` indexes the Laguerre measure `x^alpha e^{-x} dx`,
/// `beta, eta > 0` the radial weight `t^{beta-1} (1-t)^{eta-1}`, and
/// `y >= 0` the frozen kernel argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub y: f64,
}

impl Params {
    pub fn new(alpha: f64, beta: f64, eta: f64, y: f64) -> Result<Self> {
        ensure(alpha > -1.0, "alpha", alpha, "alpha > -1")?;
        ensure(beta > 0.0, "beta", beta, "beta > 0")?;
        ensure(eta > 0.0, "eta", eta, "eta > 0")?;
        ensure(y >= 0.0, "y", y, "y >= 0")?;
        Ok(Self {
            alpha,
            beta,
            eta,
            y,
        })
    }

    pub fn with_y(self, y: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.eta, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_domain() {
        assert!(Params::new(0.0, 1.0, 1.0, 0.0).is_ok());
        assert!(Params::new(-1.0, 1.0, 1.0, 0.0).is_err());
        assert!(Params::new(-1.5, 1.0, 1.0, 0.0).is_err());
        assert!(Params::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(Params::new(0.0, 1.0, -2.0, 0.0).is_err());
        assert!(Params::new(0.0, 1.0, 1.0, -0.1).is_err());
        assert!(Params::new(f64::NAN, 1.0, 1.0, 0.0).is_err());
    }
}

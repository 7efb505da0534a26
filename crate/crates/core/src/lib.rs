//! Numerical laboratory for the dual fractional Hankel transform on weighted
//! slice Bergman spaces of slice-regular quaternionic functions.
//!
//! Everything is computed in double precision. Quaternionic evaluation goes
//! through slices: a point `q = u + v I` is handled as the complex number
//! `u + i v` and lifted back along the axis `I`.

pub mod error;
pub mod kernels;
pub mod linalg;
pub mod ops;
pub mod quad;
pub mod quat;
pub mod spectral;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use quat::{Quaternion, SlicePoint};
pub use specfun::Params;

//! Quaternion arithmetic and slice decomposition.
//!
//! Every quaternion `q` with nonzero imaginary part lies on exactly one slice
//! `C_I = R + I R`, where `I` is the unit vector along its imaginary part.
//! Functions with real Taylor coefficients (the intrinsic ones) are evaluated
//! by moving to that slice, doing complex arithmetic, and lifting back.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Partial sums beyond this magnitude are treated as divergent.
pub const OVERFLOW_GUARD: f64 = 1e300;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        // hypot-style scaling keeps tiny and huge components exact enough
        let m = self
            .w
            .abs()
            .max(self.x.abs())
            .max(self.y.abs())
            .max(self.z.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let s = self * (1.0 / m);
        m * s.norm_sqr().sqrt()
    }

    /// Norm of the imaginary part.
    pub fn imag_norm(self) -> f64 {
        Self::new(0.0, self.x, self.y, self.z).norm()
    }

    pub fn imag(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn inv(self) -> Self {
        self.conj() * (1.0 / self.norm_sqr())
    }

    /// `self^n` by repeated squaring.
    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Whether `self` and `other` commute, up to a relative tolerance.
    pub fn commutes_with(self, other: Self, tol: f64) -> bool {
        let c = self * other - other * self;
        c.norm() <= tol * (1.0 + self.norm() * other.norm())
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.w.abs().max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        self * (1.0 / s)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// A quaternion written as `u + v I` with `v >= 0` and `I` a unit imaginary
/// quaternion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub u: f64,
    pub v: f64,
    pub axis: Quaternion,
}

impl SlicePoint {
    /// Builds a point on the slice of `axis`; the axis is normalized and
    /// its real part discarded.
    pub fn new(u: f64, v: f64, axis: Quaternion) -> Result<Self> {
        let axis = unit_axis(axis)?;
        Ok(Self { u, v, axis })
    }

    pub fn recompose(&self) -> Quaternion {
        lift(Complex64::new(self.u, self.v), self.axis)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub fn in_ball(&self) -> bool {
        self.u * self.u + self.v * self.v < 1.0
    }
}

/// Normalizes the imaginary part of `axis` to a unit vector.
pub fn unit_axis(axis: Quaternion) -> Result<Quaternion> {
    let n = axis.imag_norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Domain {
            name: "axis",
            value: n,
            constraint: "nonzero finite imaginary part",
        });
    }
    Ok(axis.imag() / n)
}

/// `q = u + v I`, `v >= 0`. Real quaternions get the canonical axis `i`.
pub fn slice_decompose(q: Quaternion) -> SlicePoint {
    let v = q.imag_norm();
    let axis = if v > 0.0 { q.imag() / v } else { Quaternion::I };
    SlicePoint { u: q.w, v, axis }
}

/// Maps `c = a + b i` to `a + b I` for the unit imaginary `axis`.
pub fn lift(c: Complex64, axis: Quaternion) -> Quaternion {
    Quaternion::new(c.re, c.im * axis.x, c.im * axis.y, c.im * axis.z)
}

/// Projects a quaternion lying on the slice of `axis` to the complex plane.
/// Components orthogonal to the slice are discarded.
pub fn project(q: Quaternion, axis: Quaternion) -> Complex64 {
    Complex64::new(q.w, q.x * axis.x + q.y * axis.y + q.z * axis.z)
}

/// `sum_n q^n c_n` with right coefficients, nested as
/// `c_0 + q (c_1 + q (c_2 + ...))`.
pub fn eval_power_series(coeffs: &[Quaternion], q: Quaternion) -> Result<Quaternion> {
    let mut acc = Quaternion::ZERO;
    for (k, c) in coeffs.iter().enumerate().rev() {
        acc = *c + q * acc;
        if !acc.is_finite() || acc.norm() > OVERFLOW_GUARD {
            return Err(Error::Divergence(format!(
                "partial sum overflow at coefficient {k}"
            )));
        }
    }
    Ok(acc)
}

/// Power series with real coefficients, evaluated on the slice of `q`.
pub fn eval_real_series(coeffs: &[f64], q: Quaternion) -> Result<Quaternion> {
    let s = slice_decompose(q);
    let z = s.to_complex();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate().rev() {
        acc = acc * z + *c;
        if !acc.is_finite() || acc.norm() > OVERFLOW_GUARD {
            return Err(Error::Divergence(format!(
                "partial sum overflow at coefficient {k}"
            )));
        }
    }
    Ok(lift(acc, s.axis))
}

/// The ordered product `p^k q^k` (not `(pq)^k`).
pub fn star_power_pair(p: Quaternion, q: Quaternion, k: u32) -> Quaternion {
    p.powi(k) * q.powi(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn basis_products() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::I * Quaternion::I, -Quaternion::ONE);
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.7);
        assert_eq!(q * Quaternion::ONE, q);
    }

    #[test]
    fn distributive_expansion() {
        let a = Quaternion::ONE + Quaternion::I;
        let b = Quaternion::ONE + Quaternion::J;
        assert_eq!(a * b, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn decompose_examples() {
        let s = slice_decompose(Quaternion::new(3.0, 4.0, 0.0, 0.0));
        assert_eq!((s.u, s.v, s.axis), (3.0, 4.0, Quaternion::I));

        let s = slice_decompose(Quaternion::real(0.5));
        assert_eq!((s.u, s.v, s.axis), (0.5, 0.0, Quaternion::I));

        let s = slice_decompose(Quaternion::new(1.0, 1.0, 1.0, 1.0));
        let r3 = 3f64.sqrt();
        assert!((s.v - r3).abs() < 1e-15);
        assert!(close(s.axis, Quaternion::new(0.0, 1.0, 1.0, 1.0) / r3, 1e-16));
        assert!(close(s.axis * s.axis, -Quaternion::ONE, 1e-15));
    }

    #[test]
    fn power_series_examples() {
        let mut c = vec![Quaternion::ZERO; 10];
        c[0] = Quaternion::ONE;
        let q = Quaternion::new(0.1, 0.2, -0.3, 0.4);
        assert_eq!(eval_power_series(&c, q).unwrap(), Quaternion::ONE);

        let c = [Quaternion::ZERO, Quaternion::ONE];
        assert_eq!(eval_power_series(&c, Quaternion::J).unwrap(), Quaternion::J);

        // geometric partial sum at 0.5 with 50 terms: 2 (1 - 2^-50)
        let c = vec![Quaternion::ONE; 50];
        let v = eval_power_series(&c, Quaternion::real(0.5)).unwrap();
        assert!((v.w - 2.0 * (1.0 - 0.5f64.powi(50))).abs() < 1e-15);
        assert!((v.w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn power_series_divergence_guard() {
        let c = vec![Quaternion::ONE; 400];
        let err = eval_power_series(&c, Quaternion::real(10.0)).unwrap_err();
        assert!(matches!(err, Error::Divergence(_)));
    }

    #[test]
    fn star_power_examples() {
        assert_eq!(star_power_pair(Quaternion::I, Quaternion::J, 1), Quaternion::K);
        assert_eq!(star_power_pair(Quaternion::I, Quaternion::J, 2), Quaternion::ONE);
        assert_eq!((Quaternion::I * Quaternion::J).powi(2), -Quaternion::ONE);
        let v = star_power_pair(Quaternion::real(0.5), Quaternion::real(0.5), 3);
        assert_eq!(v, Quaternion::real(0.015625));
    }

    #[test]
    fn unit_axis_rejects_real() {
        assert!(unit_axis(Quaternion::real(2.0)).is_err());
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
    }

    fn ball_point() -> impl Strategy<Value = Quaternion> {
        (quat(), 0.0..0.95f64).prop_filter_map("nonzero", |(q, r)| {
            let n = q.norm();
            (n > 1e-3).then(|| q * (r / n))
        })
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in quat(), b in quat()) {
            let lhs = (a * b).norm();
            let rhs = a.norm() * b.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(1e-300));
        }

        #[test]
        fn conjugate_gives_norm(a in quat()) {
            let p = a * a.conj();
            prop_assert!(close(p, Quaternion::real(a.norm_sqr()), 1e-14 * (1.0 + a.norm_sqr())));
        }

        #[test]
        fn product_is_associative(a in quat(), b in quat(), c in quat()) {
            prop_assert!(close((a * b) * c, a * (b * c), 1e-13));
        }

        #[test]
        fn decompose_recompose(q in quat()) {
            let s = slice_decompose(q);
            prop_assert!(s.v >= 0.0);
            prop_assert!(close(s.recompose(), q, 1e-15 * (1.0 + q.norm())));
            prop_assert!(close(s.axis * s.axis, -Quaternion::ONE, 1e-15));
        }

        #[test]
        fn real_series_matches_quaternion_powers(
            q in ball_point(),
            coeffs in proptest::collection::vec(-1.0..1.0f64, 1..30),
        ) {
            let quat_coeffs: Vec<Quaternion> = coeffs.iter().map(|&c| Quaternion::real(c)).collect();
            let a = eval_power_series(&quat_coeffs, q).unwrap();
            let b = eval_real_series(&coeffs, q).unwrap();
            prop_assert!(close(a, b, 1e-13));
        }

        #[test]
        fn noncommuting_pairs_differ(a in quat(), b in quat()) {
            prop_assume!(!a.commutes_with(b, 1e-6));
            prop_assume!(a.norm() > 0.3 && b.norm() > 0.3);
            let star = star_power_pair(a, b, 2);
            let prod = (a * b).powi(2);
            prop_assert!(star.max_abs_diff(prod) > 1e-12);
        }
    }
}

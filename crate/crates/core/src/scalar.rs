//! Scalar field abstraction shared by every solver component.
//!
//! Two instantiations exist: `f64` and [`Complex64`]. Inner products
//! conjugate their left argument, so the real case is the ordinary dot
//! product.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Unit roundoff of IEEE binary64 (2^-53).
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("division by a scalar of zero magnitude")]
pub struct DivisionByZero;

pub trait Scalar:
    Copy
    + Send
    + Sync
    + Debug
    + Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(re: f64) -> Self;
    /// Builds a scalar from real and imaginary parts. Returns `None` for a
    /// nonzero imaginary part on a real field.
    fn from_parts(re: f64, im: f64) -> Option<Self>;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    fn magnitude(self) -> f64;
    fn is_finite(self) -> bool;

    /// Draws a scalar whose real (and, for complex, imaginary) part is
    /// `N(mean, stddev^2)`; the mean shifts the real part only.
    fn sample_gaussian<R: Rng + ?Sized>(rng: &mut R, mean: f64, stddev: f64) -> Self;
    /// Real (and imaginary) part uniform on `[lo, hi)`.
    fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Self;

    fn checked_div(self, rhs: Self) -> Result<Self, DivisionByZero> {
        if rhs.magnitude() == 0.0 {
            Err(DivisionByZero)
        } else {
            Ok(self / rhs)
        }
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_real(re: f64) -> Self {
        re
    }
    fn from_parts(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn magnitude(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn sample_gaussian<R: Rng + ?Sized>(rng: &mut R, mean: f64, stddev: f64) -> Self {
        let z: f64 = StandardNormal.sample(rng);
        mean + stddev * z
    }

    fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Self {
        rng.random_range(lo..hi)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn from_real(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }
    fn from_parts(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn magnitude(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }

    fn sample_gaussian<R: Rng + ?Sized>(rng: &mut R, mean: f64, stddev: f64) -> Self {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(mean + stddev * re, stddev * im)
    }

    fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Self {
        let re = rng.random_range(lo..hi);
        let im = rng.random_range(lo..hi);
        Complex64::new(re, im)
    }
}

/// Euclidean norm.
pub fn norm2<S: Scalar>(v: &[S]) -> f64 {
    v.iter()
        .map(|x| {
            let m = x.magnitude();
            m * m
        })
        .sum::<f64>()
        .sqrt()
}

/// Max-magnitude norm.
pub fn norm_inf<S: Scalar>(v: &[S]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.magnitude()))
}

/// Euclidean distance between two vectors of equal length.
pub fn dist2<S: Scalar>(u: &[S], v: &[S]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter()
        .zip(v)
        .map(|(&a, &b)| {
            let m = (a - b).magnitude();
            m * m
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn magnitude_examples() {
        assert_eq!(3.0_f64.magnitude(), 3.0);
        assert_eq!((-2.5_f64).magnitude(), 2.5);
        assert_eq!(Complex64::new(3.0, 4.0).magnitude(), 5.0);
        assert_eq!(Complex64::zero().magnitude(), 0.0);
    }

    #[test]
    fn division_by_zero_is_detected() {
        assert_eq!(1.0_f64.checked_div(0.0), Err(DivisionByZero));
        assert_eq!(1.0_f64.checked_div(-0.0), Err(DivisionByZero));
        assert_eq!(
            Complex64::one().checked_div(Complex64::zero()),
            Err(DivisionByZero)
        );
        assert_eq!(6.0_f64.checked_div(3.0), Ok(2.0));
    }

    #[test]
    fn from_parts_rejects_imaginary_on_reals() {
        assert_eq!(f64::from_parts(1.0, 0.0), Some(1.0));
        assert_eq!(f64::from_parts(1.0, 2.0), None);
        assert_eq!(
            Complex64::from_parts(1.0, 2.0),
            Some(Complex64::new(1.0, 2.0))
        );
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6..1e6_f64, -1.0..1.0_f64]
    }

    proptest! {
        #[test]
        fn real_division_round_trip(a in finite(), b in finite()) {
            prop_assume!(b.magnitude() > 1e-300);
            let back = a.checked_div(b).unwrap() * b - a;
            prop_assert!(back.magnitude() <= 8.0 * UNIT_ROUNDOFF * a.magnitude());
        }

        #[test]
        fn complex_division_round_trip(ar in finite(), ai in finite(), br in finite(), bi in finite()) {
            let a = Complex64::new(ar, ai);
            let b = Complex64::new(br, bi);
            prop_assume!(b.magnitude() > 1e-300);
            let back = a.checked_div(b).unwrap() * b - a;
            prop_assert!(back.magnitude() <= 8.0 * UNIT_ROUNDOFF * a.magnitude());
        }

        #[test]
        fn conjugation_is_an_involution(re in finite(), im in finite()) {
            let c = Complex64::new(re, im);
            prop_assert_eq!(Scalar::conj(Scalar::conj(c)), c);
            prop_assert_eq!(Scalar::conj(Scalar::conj(re)), re);
        }

        #[test]
        fn magnitude_is_nonnegative(re in finite(), im in finite()) {
            let c = Complex64::new(re, im);
            prop_assert!(c.magnitude() >= 0.0);
            prop_assert_eq!(c.magnitude() == 0.0, re == 0.0 && im == 0.0);
        }
    }
}

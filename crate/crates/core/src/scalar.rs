//! Scalar abstraction shared by the numerical modules.
//!
//! Matrix code, braid generators and gate distances are written once over
//! [`Real`] and instantiated for `f32` and `f64`. Exact quantities (conformal
//! weights, quantum dimensions, q-series exponents) use rationals instead.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable as the real part of matrix entries.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Machine epsilon scaled for accumulated rounding in small dense products.
    fn loose_eps() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Golden ratio δ = (1 + √5)/2.
pub fn golden<T: Real>() -> T {
    (T::one() + T::lit(5.0).sqrt()) / T::lit(2.0)
}

/// τ = 1/δ = (√5 − 1)/2.
pub fn tau<T: Real>() -> T {
    (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0)
}

/// e^{iθ}.
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// q = e^{iπ/5}.
pub fn q<T: Real>() -> Complex<T> {
    cis(T::PI() / T::lit(5.0))
}

/// q^k for integer k, evaluated directly from the angle.
pub fn q_pow<T: Real>(k: i32) -> Complex<T> {
    cis(T::PI() * T::lit(f64::from(k)) / T::lit(5.0))
}

/// Converts a complex number between scalar types.
pub fn cast_complex<S: Real, T: Real>(z: Complex<S>) -> Complex<T> {
    Complex::new(
        T::from_f64(z.re.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(T::nan),
        T::from_f64(z.im.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(T::nan),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_identities() {
        let d: f64 = golden();
        let t: f64 = tau();
        assert!((d * d - d - 1.0).abs() < 1e-15);
        assert!((d * t - 1.0).abs() < 1e-15);
        assert!((t * t + t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_is_primitive_tenth_root() {
        let z: Complex<f64> = q_pow(10);
        assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-14);
        let z5: Complex<f64> = q_pow(5);
        assert!((z5 + Complex::new(1.0, 0.0)).norm() < 1e-14);
        let qf: Complex<f32> = q();
        assert!((qf.norm() - 1.0).abs() < 1e-6);
    }
}

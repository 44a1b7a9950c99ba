//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

/// Real scalar the models are generic over: `f32` or `f64`.
///
/// Tolerances quoted in the docs (e.g. the Marcum Q absolute error) refer to
/// `f64`; `f32` works everywhere but at single precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Infallible for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Draws from U[0, 1).
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draws from N(0, 1).
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            #[inline]
            fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardUniform.sample(rng)
            }

            #[inline]
            fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }
        }
    )*};
}

impl_real!(f32, f64);

/// Degrees to radians.
#[inline]
pub fn deg<T: Real>(degrees: T) -> T {
    degrees.to_radians()
}

/// Decibels to a linear power ratio.
#[inline]
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

#[inline]
pub fn linear_to_db<T: Real>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

/// dBm to watts.
#[inline]
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    db_to_linear(dbm - T::lit(30.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversions() {
        assert!((dbm_to_watts(-93.0_f64) - 10f64.powf(-12.3)).abs() < 1e-27);
        assert!((db_to_linear(10.0_f64) - 10.0).abs() < 1e-12);
        assert!((linear_to_db(100.0_f32) - 20.0).abs() < 1e-5);
        assert!((deg(180.0_f64) - std::f64::consts::PI).abs() < 1e-15);
    }
}

//! Link model: SNR of the serving link and the Rician (noncentral chi-squared)
//! power gain.
//!
//! The gain `G = (Z1 + sqrt(2K))^2 + Z2^2` with independent standard normal
//! `Z1, Z2` has two degrees of freedom, noncentrality `2K`, and mean `2K + 2`.
//! [`gain_cdf`], [`gain_pdf`] and [`sample_gain`] describe that raw variable.
//! The gain that enters the SNR is `G / s`, where the scale `s` comes from the
//! link's [`GainNormalization`]: `2K + 2` for unit-mean fading (the default)
//! or `1` for the raw gain.

mod special;

pub use special::{bessel_i0, bessel_i0e, marcum_q1};

use rand::Rng;

use crate::error::{ensure, Result};
use crate::scalar::{dbm_to_watts, Real};

/// How the raw fading gain is scaled before it multiplies the received power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainNormalization {
    /// Divide by the mean `2K + 2` so the fading carries unit average power.
    #[default]
    UnitMean,
    /// Use the noncentral chi-squared variable as is.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    pub tx_power_w: T,
    pub noise_power_w: T,
    pub path_loss_exponent: T,
    /// Ratio of line-of-sight to scattered power.
    pub rician_k: T,
    pub normalization: GainNormalization,
}

impl<T: Real> Default for LinkBudget<T> {
    /// 10 W transmit power, -93 dBm noise, free-space exponent 2, K = 100.
    fn default() -> Self {
        Self {
            tx_power_w: T::lit(10.0),
            noise_power_w: dbm_to_watts(T::lit(-93.0)),
            path_loss_exponent: T::lit(2.0),
            rician_k: T::lit(100.0),
            normalization: GainNormalization::UnitMean,
        }
    }
}

impl<T: Real> LinkBudget<T> {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.tx_power_w > T::zero() && self.tx_power_w.is_finite(),
            "tx_power_w",
            self.tx_power_w.to_f64_lossy(),
            "must be positive",
        )?;
        ensure(
            self.noise_power_w > T::zero() && self.noise_power_w.is_finite(),
            "noise_power_w",
            self.noise_power_w.to_f64_lossy(),
            "must be positive",
        )?;
        ensure(
            self.path_loss_exponent >= T::lit(2.0) && self.path_loss_exponent.is_finite(),
            "path_loss_exponent",
            self.path_loss_exponent.to_f64_lossy(),
            "must be at least 2",
        )?;
        ensure(
            self.rician_k >= T::zero() && self.rician_k.is_finite(),
            "rician_k",
            self.rician_k.to_f64_lossy(),
            "must be nonnegative",
        )
    }

    /// Divisor applied to the raw gain before it enters the SNR.
    pub fn gain_scale(&self) -> T {
        match self.normalization {
            GainNormalization::UnitMean => T::lit(2.0) * self.rician_k + T::lit(2.0),
            GainNormalization::Raw => T::one(),
        }
    }

    /// Mean of the raw gain, `2K + 2`.
    pub fn raw_gain_mean(&self) -> T {
        T::lit(2.0) * self.rician_k + T::lit(2.0)
    }

    /// `p_s / sigma^2`, the SNR of a unit gain at unit distance.
    pub fn power_ratio(&self) -> T {
        self.tx_power_w / self.noise_power_w
    }
}

/// SNR of the serving link for an effective `gain` at `distance_m`; zero when
/// the satellite lies beyond `r_max_m` (below the minimum elevation).
pub fn snr<T: Real>(lb: &LinkBudget<T>, gain: T, distance_m: T, r_max_m: T) -> T {
    if distance_m > r_max_m {
        return T::zero();
    }
    lb.power_ratio() * gain * distance_m.powf(-lb.path_loss_exponent)
}

/// CDF of the raw gain, `1 - Q1(sqrt(2K), sqrt(g))`.
pub fn gain_cdf<T: Real>(lb: &LinkBudget<T>, g: T) -> T {
    T::one() - gain_ccdf(lb, g)
}

/// Survival function of the raw gain, `Q1(sqrt(2K), sqrt(g))`. Accurate deep
/// into the upper tail, unlike `1 - gain_cdf`.
pub fn gain_ccdf<T: Real>(lb: &LinkBudget<T>, g: T) -> T {
    if g <= T::zero() {
        return T::one();
    }
    marcum_q1((T::lit(2.0) * lb.rician_k).sqrt(), g.sqrt())
}

/// Density of the raw gain, `exp(-(g + 2K)/2) I0(sqrt(2 K g)) / 2`.
pub fn gain_pdf<T: Real>(lb: &LinkBudget<T>, g: T) -> T {
    if g < T::zero() {
        return T::zero();
    }
    let nc = (T::lit(2.0) * lb.rician_k).sqrt();
    let root = g.sqrt();
    let d = root - nc;
    // e^{-(g+2K)/2} I0(nc * root) = e^{-(root - nc)^2 / 2} * [e^{-nc*root} I0(nc*root)]
    (-d * d / T::lit(2.0)).exp() * bessel_i0e(nc * root) / T::lit(2.0)
}

/// Raw gain value whose upper tail mass is `tail`, by bisection on the
/// survival function.
pub fn gain_upper_quantile<T: Real>(lb: &LinkBudget<T>, tail: T) -> T {
    let mut lo = T::zero();
    let mut hi = lb.raw_gain_mean().max(T::one());
    while gain_ccdf(lb, hi) > tail {
        lo = hi;
        hi = hi * T::lit(2.0);
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if gain_ccdf(lb, mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Draws one raw gain `(Z1 + sqrt(2K))^2 + Z2^2`.
pub fn sample_gain<T: Real, R: Rng + ?Sized>(lb: &LinkBudget<T>, rng: &mut R) -> T {
    let los = (T::lit(2.0) * lb.rician_k).sqrt();
    let i = T::sample_normal(rng) + los;
    let q = T::sample_normal(rng);
    i * i + q * q
}

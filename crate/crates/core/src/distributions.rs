//! Distance and latitude distributions of satellites on the shell, and the
//! effective satellite count that maps an inclined constellation onto an
//! equivalent uniform one.

use crate::error::{ensure, Error, Result};
use crate::geometry::{ConstellationConfig, EarthModel};
use crate::scalar::Real;

/// Distance law of a shell of `n` satellites placed independently and
/// uniformly. `n` is real so a non-integer effective count can be used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceDistribution<T> {
    pub cfg: ConstellationConfig<T>,
    pub earth: EarthModel<T>,
    pub n: T,
}

impl<T: Real> DistanceDistribution<T> {
    pub fn new(cfg: ConstellationConfig<T>, earth: EarthModel<T>, n: T) -> Result<Self> {
        ensure(
            n > T::zero() && n.is_finite(),
            "n",
            n.to_f64_lossy(),
            "must be positive",
        )?;
        Ok(Self { cfg, earth, n })
    }

    fn r_min(&self) -> T {
        self.cfg.altitude_m
    }

    /// Largest possible distance: the far side of the shell.
    pub fn r_far(&self) -> T {
        T::lit(2.0) * self.earth.radius_m + self.cfg.altitude_m
    }

    /// `4 r_e (r_e + h)`: the normalizer of the single-satellite CDF.
    fn cap_norm(&self) -> T {
        T::lit(4.0) * self.earth.radius_m * self.cfg.shell_radius(&self.earth)
    }
}

/// CDF of the distance from the user to one uniformly placed satellite:
/// the shell-area fraction of the cap within `r`.
pub fn single_distance_cdf<T: Real>(d: &DistanceDistribution<T>, r: T) -> T {
    if r < d.r_min() {
        T::zero()
    } else if r > d.r_far() {
        T::one()
    } else {
        let h = d.r_min();
        ((r * r - h * h) / d.cap_norm()).min(T::one())
    }
}

/// Density of the single-satellite distance, `r / (2 r_e (r_e + h))`.
pub fn single_distance_pdf<T: Real>(d: &DistanceDistribution<T>, r: T) -> T {
    if r < d.r_min() || r > d.r_far() {
        T::zero()
    } else {
        T::lit(2.0) * r / d.cap_norm()
    }
}

/// CDF of the distance to the nearest of the `n` satellites,
/// `1 - (1 - F_R(r0))^n`.
pub fn serving_distance_cdf<T: Real>(d: &DistanceDistribution<T>, r0: T) -> T {
    T::one() - (T::one() - single_distance_cdf(d, r0)).powf(d.n)
}

/// Density of the nearest-satellite distance,
/// `n (1 - F_R(r0))^{n-1} f_R(r0)`.
pub fn serving_distance_pdf<T: Real>(d: &DistanceDistribution<T>, r0: T) -> T {
    let f = single_distance_pdf(d, r0);
    if f == T::zero() {
        return T::zero();
    }
    d.n * (T::one() - single_distance_cdf(d, r0)).powf(d.n - T::one()) * f
}

/// `cos(2 phi) - cos(2 iota)` written as `2 sin(iota - |phi|) sin(iota + |phi|)`,
/// which stays accurate as `|phi|` approaches `iota`.
fn latitude_gap<T: Real>(inclination_rad: T, latitude_rad: T) -> T {
    let phi = latitude_rad.abs();
    T::lit(2.0) * (inclination_rad - phi).sin() * (inclination_rad + phi).sin()
}

/// Density of a satellite's latitude when its argument of latitude is uniform
/// around the orbit. Zero beyond the inclination, `+inf` exactly at it.
pub fn satellite_latitude_pdf<T: Real>(inclination_rad: T, latitude_rad: T) -> T {
    let phi = latitude_rad.abs();
    if phi > inclination_rad {
        return T::zero();
    }
    if phi == inclination_rad {
        return T::infinity();
    }
    T::SQRT_2() / T::PI() * latitude_rad.cos() / latitude_gap(inclination_rad, latitude_rad).sqrt()
}

/// CDF of the satellite latitude: `sin(phi) / sin(iota)` follows the arcsine
/// law, so `F(phi) = 1 - acos(sin(phi) / sin(iota)) / pi`.
pub fn satellite_latitude_cdf<T: Real>(inclination_rad: T, latitude_rad: T) -> T {
    if latitude_rad <= -inclination_rad {
        return T::zero();
    }
    if latitude_rad >= inclination_rad {
        return T::one();
    }
    let v = (latitude_rad.sin() / inclination_rad.sin())
        .max(-T::one())
        .min(T::one());
    T::one() - v.acos() / T::PI()
}

/// Size of the uniform constellation whose density equals the inclined
/// constellation's density at the user's latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCount<T> {
    pub value: T,
    pub user_latitude_rad: T,
    pub inclination_rad: T,
}

impl<T: Real> EffectiveCount<T> {
    pub fn rounded(&self) -> u64 {
        self.value.round().to_u64().unwrap_or(u64::MAX)
    }
}

/// `N_eff / N_act = 2 f(phi) / cos(phi) = (2 sqrt 2 / pi) / sqrt(cos 2phi - cos 2iota)`.
pub fn density_ratio<T: Real>(inclination_rad: T, latitude_rad: T) -> Result<T> {
    if latitude_rad.abs() >= inclination_rad {
        return Err(Error::EffectiveCountSingular {
            latitude_deg: latitude_rad.to_degrees().to_f64_lossy(),
            inclination_deg: inclination_rad.to_degrees().to_f64_lossy(),
        });
    }
    Ok(T::lit(2.0) * T::SQRT_2() / T::PI() / latitude_gap(inclination_rad, latitude_rad).sqrt())
}

/// Effective number of satellites seen by a user at `user_latitude_rad`.
///
/// Fails at and beyond the inclination limit, where the inclined density
/// diverges (or vanishes).
pub fn effective_satellite_count<T: Real>(
    n_act: usize,
    inclination_rad: T,
    user_latitude_rad: T,
) -> Result<EffectiveCount<T>> {
    ensure(n_act >= 1, "n_act", n_act as f64, "must be at least 1")?;
    ensure(
        inclination_rad > T::zero() && inclination_rad <= T::FRAC_PI_2(),
        "inclination_rad",
        inclination_rad.to_f64_lossy(),
        "must lie in (0, pi/2]",
    )?;
    let ratio = density_ratio(inclination_rad, user_latitude_rad)?;
    Ok(EffectiveCount {
        value: T::from_usize(n_act).unwrap() * ratio,
        user_latitude_rad,
        inclination_rad,
    })
}

/// Smallest inclination for which some latitude has `N_eff = N_act`:
/// `acos(1 - 8/pi^2) / 2`, about 39.54 degrees.
pub fn matching_threshold_inclination<T: Real>() -> T {
    let eight_over_pi2 = T::lit(8.0) / (T::PI() * T::PI());
    (T::one() - eight_over_pi2).acos() / T::lit(2.0)
}

/// The two latitudes `±acos(8/pi^2 + cos 2iota) / 2` where the effective and
/// actual counts coincide, or `None` below the threshold inclination (the
/// effective count then exceeds the actual one everywhere).
pub fn matching_latitudes<T: Real>(inclination_rad: T) -> Option<(T, T)> {
    let arg = T::lit(8.0) / (T::PI() * T::PI()) + (T::lit(2.0) * inclination_rad).cos();
    if arg > T::one() {
        return None;
    }
    let phi = arg.max(-T::one()).acos() / T::lit(2.0);
    Some((-phi, phi))
}

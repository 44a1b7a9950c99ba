//! Spherical geometry of the Earth and a single circular orbital shell.
//!
//! Lengths are meters and angles radians throughout. The Earth is a perfect
//! sphere; the user sits on its surface and every satellite of the shell sits
//! at the same altitude above it.

use crate::error::{ensure, Error, Result};
use crate::scalar::Real;

/// Mean Earth radius used by default, meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel<T> {
    pub radius_m: T,
}

impl<T: Real> Default for EarthModel<T> {
    fn default() -> Self {
        Self {
            radius_m: T::lit(EARTH_RADIUS_M),
        }
    }
}

impl<T: Real> EarthModel<T> {
    pub fn new(radius_m: T) -> Result<Self> {
        let earth = Self { radius_m };
        earth.validate()?;
        Ok(earth)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.radius_m > T::zero() && self.radius_m.is_finite(),
            "radius_m",
            self.radius_m.to_f64_lossy(),
            "must be positive",
        )
    }
}

/// One orbital shell: every satellite shares altitude and inclination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationConfig<T> {
    /// Number of satellites actually in orbit.
    pub n_act: usize,
    /// Altitude above the surface; also the user-to-satellite distance at zenith.
    pub altitude_m: T,
    pub inclination_rad: T,
    /// Elevation below which a satellite cannot serve the user.
    pub min_elevation_rad: T,
}

impl<T: Real> ConstellationConfig<T> {
    pub fn new(n_act: usize, altitude_m: T, inclination_rad: T, min_elevation_rad: T) -> Result<Self> {
        let cfg = Self {
            n_act,
            altitude_m,
            inclination_rad,
            min_elevation_rad,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the shell invariants. A minimum elevation of exactly 90 degrees
    /// is accepted as the zenith-only limit.
    pub fn validate(&self) -> Result<()> {
        let half_pi = T::FRAC_PI_2();
        ensure(self.n_act >= 1, "n_act", self.n_act as f64, "must be at least 1")?;
        ensure(
            self.altitude_m > T::zero() && self.altitude_m.is_finite(),
            "altitude_m",
            self.altitude_m.to_f64_lossy(),
            "must be positive",
        )?;
        ensure(
            self.inclination_rad > T::zero() && self.inclination_rad <= half_pi,
            "inclination_rad",
            self.inclination_rad.to_f64_lossy(),
            "must lie in (0, pi/2]",
        )?;
        ensure(
            self.min_elevation_rad >= T::zero() && self.min_elevation_rad <= half_pi,
            "min_elevation_rad",
            self.min_elevation_rad.to_f64_lossy(),
            "must lie in [0, pi/2]",
        )
    }

    /// Radius of the orbital shell measured from the Earth's center.
    #[inline]
    pub fn shell_radius(&self, earth: &EarthModel<T>) -> T {
        earth.radius_m + self.altitude_m
    }
}

/// Ground user. Only the latitude matters to the shell statistics; the
/// longitude is used by the simulator for deterministic constellations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UserLocation<T> {
    pub latitude_rad: T,
    pub longitude_rad: T,
}

impl<T: Real> UserLocation<T> {
    pub fn new(latitude_rad: T) -> Result<Self> {
        let user = Self {
            latitude_rad,
            longitude_rad: T::zero(),
        };
        user.validate()?;
        Ok(user)
    }

    pub fn with_longitude(self, longitude_rad: T) -> Self {
        Self { longitude_rad, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.latitude_rad.abs() <= T::FRAC_PI_2(),
            "latitude_rad",
            self.latitude_rad.to_f64_lossy(),
            "must lie in [-pi/2, pi/2]",
        )
    }

    /// Earth-centered Cartesian position of the user on the surface.
    pub fn position(&self, earth: &EarthModel<T>) -> [T; 3] {
        let (sin_lat, cos_lat) = self.latitude_rad.sin_cos();
        let (sin_lon, cos_lon) = self.longitude_rad.sin_cos();
        let r = earth.radius_m;
        [r * cos_lat * cos_lon, r * cos_lat * sin_lon, r * sin_lat]
    }
}

/// Earth-centered Cartesian position of one satellite, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteState<T> {
    pub position_m: [T; 3],
}

impl<T: Real> SatelliteState<T> {
    pub fn radius(&self) -> T {
        norm(self.position_m)
    }

    pub fn latitude(&self) -> T {
        let [x, y, z] = self.position_m;
        z.atan2(x.hypot(y))
    }

    pub fn longitude(&self) -> T {
        let [x, y, _] = self.position_m;
        y.atan2(x)
    }
}

#[inline]
pub(crate) fn norm<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub(crate) fn distance_squared<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

/// Largest user-to-satellite distance at which the satellite is still at or
/// above the minimum elevation.
pub fn max_slant_range<T: Real>(cfg: &ConstellationConfig<T>, earth: &EarthModel<T>) -> T {
    let re = earth.radius_m;
    let h = cfg.altitude_m / re;
    let s = cfg.min_elevation_rad.sin();
    re * ((h * (h + T::lit(2.0)) + s * s).sqrt() - s)
}

/// Highest user latitude (absolute value) from which any satellite of the
/// shell can ever be seen, clamped to pi/2.
pub fn coverage_latitude_limit<T: Real>(cfg: &ConstellationConfig<T>, earth: &EarthModel<T>) -> T {
    let re = earth.radius_m;
    let h = cfg.altitude_m;
    let r_max = max_slant_range(cfg, earth);
    let arg = (re * re + re * h + (h * h - r_max * r_max) / T::lit(2.0)) / (re * (re + h));
    // Central angle between the user and the farthest visible sub-satellite point.
    debug_assert!(
        arg <= T::one() + T::lit(1e-12) && arg >= -T::one() - T::lit(1e-12),
        "arccos argument out of range"
    );
    let arg = arg.max(-T::one()).min(T::one());
    (cfg.inclination_rad + arg.acos()).min(T::FRAC_PI_2())
}

/// Lowest altitude at which a shell of the given inclination reaches the
/// poles. Returns zero when the surface itself would already suffice.
pub fn min_altitude_for_global_coverage<T: Real>(
    inclination_rad: T,
    min_elevation_rad: T,
    earth: &EarthModel<T>,
) -> Result<T> {
    if inclination_rad <= min_elevation_rad {
        return Err(Error::NoGlobalCoverage {
            inclination_deg: inclination_rad.to_degrees().to_f64_lossy(),
            min_elevation_deg: min_elevation_rad.to_degrees().to_f64_lossy(),
        });
    }
    let re = earth.radius_m;
    let h = re * min_elevation_rad.cos() / (inclination_rad - min_elevation_rad).sin() - re;
    Ok(h.max(T::zero()))
}

/// Probability that one uniformly placed satellite of the shell is visible:
/// the area of the visible spherical cap over the area of the shell.
pub fn visibility_probability<T: Real>(cfg: &ConstellationConfig<T>, earth: &EarthModel<T>) -> T {
    let r_max = max_slant_range(cfg, earth);
    let p = (cfg.altitude_m - r_max * cfg.min_elevation_rad.sin()) / (T::lit(2.0) * cfg.shell_radius(earth));
    p.max(T::zero()).min(T::one())
}

/// Position of a satellite with argument of latitude `u` in the orbital plane
/// whose ascending node sits at right ascension `raan`.
///
/// The in-plane circle is tilted by the inclination about the y axis and
/// then turned about the polar axis by `raan`. With `raan = 0` the latitude is
/// `atan(-cos u sin i / sqrt(cos^2 u cos^2 i + sin^2 u))`.
pub fn satellite_position<T: Real>(
    argument_of_latitude_rad: T,
    raan_rad: T,
    cfg: &ConstellationConfig<T>,
    earth: &EarthModel<T>,
) -> SatelliteState<T> {
    let rho = cfg.shell_radius(earth);
    let (sin_u, cos_u) = argument_of_latitude_rad.sin_cos();
    let (sin_i, cos_i) = cfg.inclination_rad.sin_cos();
    let x = rho * cos_u * cos_i;
    let y = rho * sin_u;
    let z = -rho * cos_u * sin_i;
    let (sin_o, cos_o) = raan_rad.sin_cos();
    SatelliteState {
        position_m: [x * cos_o - y * sin_o, x * sin_o + y * cos_o, z],
    }
}

/// Straight-line distance from the user to a satellite.
pub fn slant_range<T: Real>(user: &UserLocation<T>, sat: &SatelliteState<T>, earth: &EarthModel<T>) -> T {
    distance_squared(user.position(earth), sat.position_m).sqrt()
}

/// Elevation of a satellite above the user's local horizon.
pub fn elevation_angle<T: Real>(user: &UserLocation<T>, sat: &SatelliteState<T>, earth: &EarthModel<T>) -> T {
    let u = user.position(earth);
    let s = sat.position_m;
    let d = [s[0] - u[0], s[1] - u[1], s[2] - u[2]];
    let up = [u[0] / earth.radius_m, u[1] / earth.radius_m, u[2] / earth.radius_m];
    let along = d[0] * up[0] + d[1] * up[1] + d[2] * up[2];
    (along / norm(d)).max(-T::one()).min(T::one()).asin()
}

//! Downlink coverage probability and average rate for a user served by the
//! nearest satellite of a LEO constellation.
//!
//! Two routes to the same metrics:
//!
//! * [`analytic`]: closed-form distance laws plus one-dimensional quadrature,
//!   with the satellite count either the actual count or the latitude
//!   dependent effective count of an inclined constellation.
//! * [`simulator`]: Monte Carlo over explicitly generated constellations.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*F64`
//! and `*F32` aliases below fix the scalar. Lengths are meters, angles radians.

pub mod analytic;
pub mod channel;
pub mod distributions;
pub mod error;
pub mod geometry;
pub mod metric;
pub mod quadrature;
pub mod scalar;
pub mod simulator;

pub use analytic::{
    apply_sweep_value, average_rate, coverage_probability, coverage_upper_bound, sweep, Metric, NMode, Scenario,
    SweepRow, SweepSpec, SweepVariable,
};
pub use channel::{
    bessel_i0, bessel_i0e, gain_ccdf, gain_cdf, gain_pdf, gain_upper_quantile, marcum_q1, sample_gain, snr,
    GainNormalization, LinkBudget,
};
pub use distributions::{
    density_ratio, effective_satellite_count, matching_latitudes, matching_threshold_inclination,
    satellite_latitude_cdf, satellite_latitude_pdf, serving_distance_cdf, serving_distance_pdf, single_distance_cdf,
    single_distance_pdf, DistanceDistribution, EffectiveCount,
};
pub use error::{Error, Result};
pub use geometry::{
    coverage_latitude_limit, elevation_angle, max_slant_range, min_altitude_for_global_coverage, satellite_position,
    slant_range, visibility_probability, ConstellationConfig, EarthModel, SatelliteState, UserLocation, EARTH_RADIUS_M,
};
pub use metric::{Method, MetricResult};
pub use quadrature::{integrate, Integral, QuadratureSpec};
pub use scalar::{db_to_linear, dbm_to_watts, deg, linear_to_db, Real};
pub use simulator::{
    estimate, generate, generate_into, run_trial, simulate, summarize, Estimate, GeneratorKind, MonteCarloSpec,
    TrialOutcome,
};

pub type EarthModelF64 = EarthModel<f64>;
pub type ConstellationConfigF64 = ConstellationConfig<f64>;
pub type UserLocationF64 = UserLocation<f64>;
pub type SatelliteStateF64 = SatelliteState<f64>;
pub type LinkBudgetF64 = LinkBudget<f64>;
pub type QuadratureSpecF64 = QuadratureSpec<f64>;
pub type DistanceDistributionF64 = DistanceDistribution<f64>;
pub type EffectiveCountF64 = EffectiveCount<f64>;
pub type ScenarioF64 = Scenario<f64>;
pub type SweepSpecF64 = SweepSpec<f64>;
pub type MetricResultF64 = MetricResult<f64>;
pub type EstimateF64 = Estimate<f64>;

pub type EarthModelF32 = EarthModel<f32>;
pub type ConstellationConfigF32 = ConstellationConfig<f32>;
pub type UserLocationF32 = UserLocation<f32>;
pub type SatelliteStateF32 = SatelliteState<f32>;
pub type LinkBudgetF32 = LinkBudget<f32>;
pub type QuadratureSpecF32 = QuadratureSpec<f32>;
pub type DistanceDistributionF32 = DistanceDistribution<f32>;
pub type EffectiveCountF32 = EffectiveCount<f32>;
pub type ScenarioF32 = Scenario<f32>;
pub type SweepSpecF32 = SweepSpec<f32>;
pub type MetricResultF32 = MetricResult<f32>;
pub type EstimateF32 = Estimate<f32>;

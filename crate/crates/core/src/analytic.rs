//! Coverage probability, its visibility upper bound, and the ergodic rate of
//! a user served by the nearest satellite of a uniform shell of `N`
//! satellites, evaluated by adaptive quadrature for real-valued `N`.

use std::cell::Cell;

use rayon::prelude::*;

use crate::channel::{gain_ccdf, gain_pdf, gain_upper_quantile, LinkBudget};
use crate::distributions::{effective_satellite_count, serving_distance_pdf, DistanceDistribution};
use crate::error::{ensure, Error, Result};
use crate::geometry::{max_slant_range, visibility_probability, ConstellationConfig, EarthModel, UserLocation};
use crate::metric::{Method, MetricResult};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::scalar::{db_to_linear, Real};

/// Which satellite count feeds the uniform-shell formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NMode<T> {
    /// The constellation's real satellite count.
    Actual,
    /// The effective count at the user's latitude.
    Effective,
    Explicit(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario<T> {
    pub cfg: ConstellationConfig<T>,
    pub earth: EarthModel<T>,
    pub link: LinkBudget<T>,
    pub user: UserLocation<T>,
    pub n_mode: NMode<T>,
}

impl<T: Real> Scenario<T> {
    pub fn validate(&self) -> Result<()> {
        self.earth.validate()?;
        self.cfg.validate()?;
        self.link.validate()?;
        self.user.validate()?;
        if let NMode::Explicit(n) = self.n_mode {
            ensure(
                n > T::zero() && n.is_finite(),
                "n",
                n.to_f64_lossy(),
                "must be positive",
            )?;
        }
        Ok(())
    }

    /// The satellite count used by the formulas. Effective mode fails when the
    /// user is at or beyond the inclination limit.
    pub fn resolve_n(&self) -> Result<T> {
        match self.n_mode {
            NMode::Actual => Ok(T::from_usize(self.cfg.n_act).unwrap()),
            NMode::Effective => {
                Ok(effective_satellite_count(self.cfg.n_act, self.cfg.inclination_rad, self.user.latitude_rad)?.value)
            }
            NMode::Explicit(n) => Ok(n),
        }
    }

    pub fn with_n_mode(self, n_mode: NMode<T>) -> Self {
        Self { n_mode, ..self }
    }

    pub fn distance_distribution(&self) -> Result<DistanceDistribution<T>> {
        DistanceDistribution::new(self.cfg, self.earth, self.resolve_n()?)
    }
}

/// Probability that the serving-link SNR exceeds `threshold_db`.
///
/// Integrates `P(G > T r^alpha sigma^2 / p_s) f_R0(r)` over the visible
/// range `[r_min, r_max]`.
pub fn coverage_probability<T: Real>(
    s: &Scenario<T>,
    threshold_db: T,
    q: &QuadratureSpec<T>,
) -> Result<MetricResult<T>> {
    s.validate()?;
    q.validate()?;
    let d = s.distance_distribution()?;
    let r_max = max_slant_range(&s.cfg, &s.earth);
    let lb = s.link;
    // Raw-gain threshold per unit r^alpha.
    let per_r = db_to_linear(threshold_db) * lb.gain_scale() / lb.power_ratio();
    let integral = integrate(
        |r| gain_ccdf(&lb, per_r * r.powf(lb.path_loss_exponent)) * serving_distance_pdf(&d, r),
        s.cfg.altitude_m,
        r_max,
        q,
    )?;
    // Coverage cannot exceed the probability that a satellite is visible.
    let bound = T::one() - (T::one() - visibility_probability(&s.cfg, &s.earth)).powf(d.n);
    Ok(MetricResult {
        value: integral.value.max(T::zero()).min(bound),
        method: Method::Analytic,
        n_used: d.n,
        uncertainty: integral.abs_error,
        trials: None,
    })
}

/// Coverage in the limit of a vanishing threshold: the probability that at
/// least one of the `N` satellites is visible, `1 - (1 - P_V)^N`.
pub fn coverage_upper_bound<T: Real>(s: &Scenario<T>) -> Result<T> {
    s.validate()?;
    let n = s.resolve_n()?;
    let p_v = visibility_probability(&s.cfg, &s.earth);
    Ok(T::one() - (T::one() - p_v).powf(n))
}

/// `E[ln(1 + c G / scale)]` over the raw gain, truncated at the upper
/// `gain_tail_mass` quantile. Returns the value and its error estimate.
fn expected_log_gain<T: Real>(lb: &LinkBudget<T>, c: T, g_max: T, q: &QuadratureSpec<T>) -> Result<(T, T)> {
    let scale = lb.gain_scale();
    let f = |g: T| (c * g / scale).ln_1p() * gain_pdf(lb, g);
    // Split at the mean so the initial rule resolves narrow (large K) densities.
    let mean = lb.raw_gain_mean();
    if mean < g_max {
        let a = integrate(f, T::zero(), mean, q)?;
        let b = integrate(f, mean, g_max, q)?;
        Ok((a.value + b.value, a.abs_error + b.abs_error))
    } else {
        let a = integrate(f, T::zero(), g_max, q)?;
        Ok((a.value, a.abs_error))
    }
}

/// Ergodic rate `E[log2(1 + SNR)]` of the serving link, bits/s/Hz.
pub fn average_rate<T: Real>(s: &Scenario<T>, q: &QuadratureSpec<T>) -> Result<MetricResult<T>> {
    s.validate()?;
    q.validate()?;
    let d = s.distance_distribution()?;
    let r_max = max_slant_range(&s.cfg, &s.earth);
    let lb = s.link;
    let g_max = gain_upper_quantile(&lb, q.gain_tail_mass);

    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner_error = Cell::new(T::zero());
    let outer = integrate(
        |r| {
            let c = lb.power_ratio() * r.powf(-lb.path_loss_exponent);
            match expected_log_gain(&lb, c, g_max, q) {
                Ok((v, e)) => {
                    let pdf = serving_distance_pdf(&d, r);
                    inner_error.set(inner_error.get().max(e * pdf));
                    v * pdf
                }
                Err(err) => {
                    failure.set(Some(err));
                    T::zero()
                }
            }
        },
        s.cfg.altitude_m,
        r_max,
        q,
    )?;
    if let Some(err) = failure.take() {
        return Err(err);
    }
    let span = r_max - s.cfg.altitude_m;
    Ok(MetricResult {
        value: (outer.value / T::LN_2()).max(T::zero()),
        method: Method::Analytic,
        n_used: d.n,
        uncertainty: (outer.abs_error + inner_error.get() * span) / T::LN_2(),
        trials: None,
    })
}

/// Parameter a sweep varies. Values are in internal units: dB for the
/// threshold, watts, meters, radians, and a satellite count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    ThresholdDb,
    TxPower,
    NAct,
    Altitude,
    MinElevation,
    Inclination,
    UserLatitude,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 7] = [
        SweepVariable::ThresholdDb,
        SweepVariable::TxPower,
        SweepVariable::NAct,
        SweepVariable::Altitude,
        SweepVariable::MinElevation,
        SweepVariable::Inclination,
        SweepVariable::UserLatitude,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::ThresholdDb => "threshold_db",
            SweepVariable::TxPower => "tx_power",
            SweepVariable::NAct => "n_act",
            SweepVariable::Altitude => "altitude",
            SweepVariable::MinElevation => "min_elevation",
            SweepVariable::Inclination => "inclination",
            SweepVariable::UserLatitude => "user_latitude",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Coverage,
    Rate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T> {
    pub variable: SweepVariable,
    pub values: Vec<T>,
    /// Threshold used by coverage rows unless the threshold itself is swept.
    pub threshold_db: T,
    pub metric: Metric,
}

impl<T: Real> SweepSpec<T> {
    /// `points` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(
        variable: SweepVariable,
        start: T,
        stop: T,
        points: usize,
        threshold_db: T,
        metric: Metric,
    ) -> Result<Self> {
        if points < 2 {
            return Err(Error::SweepTooShort(points));
        }
        let step = (stop - start) / T::from_usize(points - 1).unwrap();
        let values = (0..points)
            .map(|i| {
                if i == points - 1 {
                    stop
                } else {
                    start + step * T::from_usize(i).unwrap()
                }
            })
            .collect();
        Ok(Self {
            variable,
            values,
            threshold_db,
            metric,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(Error::SweepTooShort(self.values.len()));
        }
        for v in &self.values {
            ensure(v.is_finite(), "sweep value", v.to_f64_lossy(), "must be finite")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub value: T,
    pub result: Result<MetricResult<T>>,
}

/// Scenario and threshold for one grid point of a sweep.
pub fn apply_sweep_value<T: Real>(
    s: &Scenario<T>,
    variable: SweepVariable,
    value: T,
    threshold_db: T,
) -> Result<(Scenario<T>, T)> {
    let mut out = *s;
    let mut threshold = threshold_db;
    match variable {
        SweepVariable::ThresholdDb => threshold = value,
        SweepVariable::TxPower => out.link.tx_power_w = value,
        SweepVariable::NAct => {
            ensure(value >= T::one(), "n_act", value.to_f64_lossy(), "must be at least 1")?;
            out.cfg.n_act = value.round().to_usize().unwrap_or(usize::MAX);
        }
        SweepVariable::Altitude => out.cfg.altitude_m = value,
        SweepVariable::MinElevation => out.cfg.min_elevation_rad = value,
        SweepVariable::Inclination => out.cfg.inclination_rad = value,
        SweepVariable::UserLatitude => out.user.latitude_rad = value,
    }
    out.validate()?;
    Ok((out, threshold))
}

/// Evaluates the metric at every grid point. Rows run in parallel but come
/// back in grid order; a failing row records its error and the sweep goes on.
pub fn sweep<T: Real>(s: &Scenario<T>, spec: &SweepSpec<T>, q: &QuadratureSpec<T>) -> Result<Vec<SweepRow<T>>> {
    spec.validate()?;
    q.validate()?;
    Ok(spec
        .values
        .par_iter()
        .map(|&value| {
            let result = apply_sweep_value(s, spec.variable, value, spec.threshold_db).and_then(|(row, threshold)| {
                match spec.metric {
                    Metric::Coverage => coverage_probability(&row, threshold, q),
                    Metric::Rate => average_rate(&row, q),
                }
            });
            SweepRow { value, result }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::serving_distance_cdf;
    use crate::scalar::deg;

    fn scenario(h_km: f64, n_act: usize, n_mode: NMode<f64>) -> Scenario<f64> {
        Scenario {
            cfg: ConstellationConfig::new(n_act, h_km * 1e3, deg(70.0), deg(10.0)).unwrap(),
            earth: EarthModel::default(),
            link: LinkBudget::default(),
            user: UserLocation::new(0.0).unwrap(),
            n_mode,
        }
    }

    #[test]
    fn vanishing_threshold_reaches_upper_bound() {
        let q = QuadratureSpec::default();
        for (n_act, mode) in [(648, NMode::Effective), (120, NMode::Effective), (439, NMode::Actual)] {
            let s = scenario(500.0, n_act, mode);
            let pc = coverage_probability(&s, -200.0, &q).unwrap();
            let ub = coverage_upper_bound(&s).unwrap();
            assert!((pc.value - ub).abs() < 1e-6, "pc={} ub={ub}", pc.value);
            let d = s.distance_distribution().unwrap();
            let direct = serving_distance_cdf(&d, max_slant_range(&s.cfg, &s.earth));
            assert!((ub - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn deep_threshold_vanishes() {
        let s = scenario(500.0, 439, NMode::Actual);
        let pc = coverage_probability(&s, 60.0, &QuadratureSpec::default()).unwrap();
        assert!(pc.value < 1e-3);
    }

    #[test]
    fn upper_bound_examples() {
        let s = scenario(500.0, 648, NMode::Explicit(120.0));
        assert!((coverage_upper_bound(&s).unwrap() - 0.83638).abs() < 1e-5);
        let s = s.with_n_mode(NMode::Explicit(81.0));
        assert!((coverage_upper_bound(&s).unwrap() - 0.70532).abs() < 1e-5);
        let mut s = scenario(500.0, 648, NMode::Actual);
        s.cfg.min_elevation_rad = deg(90.0);
        assert_eq!(coverage_upper_bound(&s).unwrap(), 0.0);
    }

    #[test]
    fn effective_mode_singularity_propagates() {
        let mut s = scenario(500.0, 648, NMode::Effective);
        s.user.latitude_rad = deg(75.0);
        assert!(matches!(
            coverage_probability(&s, 10.0, &QuadratureSpec::default()),
            Err(Error::EffectiveCountSingular { .. })
        ));
        assert!(average_rate(&s, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn coverage_monotone_and_bounded() {
        let q = QuadratureSpec::default();
        let s = scenario(1000.0, 648, NMode::Effective);
        let ub = coverage_upper_bound(&s).unwrap();
        let mut prev = 1.0;
        for t in -20..=40 {
            let pc = coverage_probability(&s, t as f64, &q).unwrap().value;
            assert!(pc <= prev + 1e-9);
            assert!(pc <= ub + 1e-9);
            prev = pc;
        }
        let mut prev = 0.0;
        for n in [10.0, 50.0, 120.5, 300.0, 439.0, 1000.0] {
            let pc = coverage_probability(&s.with_n_mode(NMode::Explicit(n)), 8.0, &q)
                .unwrap()
                .value;
            assert!(pc >= prev - 1e-9);
            prev = pc;
        }
        let mut prev = 1.0;
        for e in [0.0, 5.0, 10.0, 20.0, 40.0] {
            let mut t = s;
            t.cfg.min_elevation_rad = deg(e);
            let pc = coverage_probability(&t, 8.0, &q).unwrap().value;
            assert!(pc <= prev + 1e-9);
            prev = pc;
        }
    }

    #[test]
    fn rate_monotone_and_vanishing_power() {
        let q = QuadratureSpec::default();
        let s = scenario(500.0, 648, NMode::Effective);
        let mut prev = 0.0;
        for p in [1e-3, 0.1, 1.0, 10.0, 100.0] {
            let mut t = s;
            t.link.tx_power_w = p;
            let r = average_rate(&t, &q).unwrap().value;
            assert!(r > prev);
            prev = r;
        }
        let mut t = s;
        t.link.tx_power_w = 1e-30;
        assert!(average_rate(&t, &q).unwrap().value < 1e-12);
        let mut prev = 0.0;
        for n in [20.0, 81.3, 439.0, 2000.0] {
            let r = average_rate(&s.with_n_mode(NMode::Explicit(n)), &q).unwrap().value;
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn rate_approaches_deterministic_gain_limit() {
        // As K grows the unit-mean gain concentrates at 1, so the rate tends to
        // E_R0[log2(1 + p_s r^-alpha / sigma^2)]. Oracle: that single integral.
        let q = QuadratureSpec::default();
        let mut s = scenario(500.0, 648, NMode::Effective);
        s.link.rician_k = 1e4;
        let rate = average_rate(&s, &q).unwrap().value;
        let d = s.distance_distribution().unwrap();
        let lb = s.link;
        let pinned = integrate(
            |r: f64| (1.0 + lb.power_ratio() * r.powf(-lb.path_loss_exponent)).log2() * serving_distance_pdf(&d, r),
            s.cfg.altitude_m,
            max_slant_range(&s.cfg, &s.earth),
            &q,
        )
        .unwrap()
        .value;
        assert!(((rate - pinned) / pinned).abs() < 0.01, "rate={rate} pinned={pinned}");
    }

    #[test]
    fn halving_tolerance_stays_within_error_estimate() {
        let q = QuadratureSpec::default();
        let tight = q.scaled(0.5);
        let s = scenario(1000.0, 120, NMode::Effective);
        for t in [-5.0, 5.0, 12.0] {
            let a = coverage_probability(&s, t, &q).unwrap();
            let b = coverage_probability(&s, t, &tight).unwrap();
            assert!((a.value - b.value).abs() <= a.uncertainty.max(1e-15));
        }
        let a = average_rate(&s, &q).unwrap();
        let b = average_rate(&s, &tight).unwrap();
        assert!((a.value - b.value).abs() <= a.uncertainty.max(1e-12));
    }

    #[test]
    fn sweep_rows_keep_order_and_record_errors() {
        let q = QuadratureSpec::default();
        let s = scenario(500.0, 648, NMode::Effective);
        let spec = SweepSpec::linspace(SweepVariable::ThresholdDb, -10.0, 30.0, 9, 10.0, Metric::Coverage).unwrap();
        let rows = sweep(&s, &spec, &q).unwrap();
        assert_eq!(rows.len(), 9);
        let mut prev = 1.0;
        for (row, want) in rows.iter().zip(&spec.values) {
            assert_eq!(row.value, *want);
            let v = row.result.as_ref().unwrap().value;
            assert!(v <= prev + 1e-12);
            prev = v;
        }

        let spec = SweepSpec {
            variable: SweepVariable::UserLatitude,
            values: vec![0.0, deg(50.0), deg(80.0)],
            threshold_db: 10.0,
            metric: Metric::Coverage,
        };
        let rows = sweep(&s, &spec, &q).unwrap();
        assert!(rows[0].result.is_ok() && rows[1].result.is_ok());
        assert!(matches!(rows[2].result, Err(Error::EffectiveCountSingular { .. })));

        let spec = SweepSpec {
            variable: SweepVariable::NAct,
            values: vec![120.0, 648.0],
            threshold_db: 10.0,
            metric: Metric::Coverage,
        };
        let rows = sweep(&s, &spec, &q).unwrap();
        assert!(rows[1].result.as_ref().unwrap().value >= rows[0].result.as_ref().unwrap().value);

        assert!(matches!(
            SweepSpec::linspace(SweepVariable::Altitude, 4e5, 2e6, 1, 10.0, Metric::Coverage),
            Err(Error::SweepTooShort(1))
        ));
    }

    #[test]
    fn sweep_variable_names_round_trip() {
        for v in SweepVariable::ALL {
            assert_eq!(SweepVariable::from_name(v.name()), Some(v));
        }
        assert_eq!(SweepVariable::from_name("bogus"), None);
    }
}

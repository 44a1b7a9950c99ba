use clap::{Args, ValueEnum};
use leocov::{
    apply_sweep_value, average_rate, coverage_latitude_limit, coverage_probability, coverage_upper_bound, deg,
    density_ratio, effective_satellite_count, estimate, max_slant_range, min_altitude_for_global_coverage,
    simulate as run_monte_carlo, summarize, sweep, visibility_probability, GeneratorKind, Metric, MetricResult, NMode,
    QuadratureSpec, ScenarioF64, SweepSpec, SweepVariable, TrialOutcome,
};

use crate::config::{NModeSetting, RunConfig};
use crate::csvio::{write_table, Cell};
use crate::CliError;

/// Sweep variables in CLI units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum CliSweepVariable {
    ThresholdDb,
    TxPowerW,
    NAct,
    AltitudeKm,
    MinElevationDeg,
    InclinationDeg,
    UserLatDeg,
}

impl CliSweepVariable {
    fn name(self) -> &'static str {
        match self {
            Self::ThresholdDb => "threshold_db",
            Self::TxPowerW => "tx_power_w",
            Self::NAct => "n_act",
            Self::AltitudeKm => "altitude_km",
            Self::MinElevationDeg => "min_elevation_deg",
            Self::InclinationDeg => "inclination_deg",
            Self::UserLatDeg => "user_lat_deg",
        }
    }

    fn internal(self) -> SweepVariable {
        match self {
            Self::ThresholdDb => SweepVariable::ThresholdDb,
            Self::TxPowerW => SweepVariable::TxPower,
            Self::NAct => SweepVariable::NAct,
            Self::AltitudeKm => SweepVariable::Altitude,
            Self::MinElevationDeg => SweepVariable::MinElevation,
            Self::InclinationDeg => SweepVariable::Inclination,
            Self::UserLatDeg => SweepVariable::UserLatitude,
        }
    }

    /// CLI value to internal units.
    fn to_internal(self, v: f64) -> f64 {
        match self {
            Self::AltitudeKm => v * 1e3,
            Self::MinElevationDeg | Self::InclinationDeg | Self::UserLatDeg => deg(v),
            _ => v,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Swept parameter. Defaults to threshold_db for coverage and tx_power_w for rate.
    #[arg(long, value_enum)]
    pub sweep: Option<CliSweepVariable>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 9)]
    pub points: usize,
    /// Geometric instead of linear spacing.
    #[arg(long)]
    pub log: bool,
    /// Explicit grid, comma separated; replaces --from/--to/--points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
    /// SINR threshold for coverage rows when the threshold is not swept.
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub threshold_db: f64,
    /// Add Monte Carlo estimates with the configured generator.
    #[arg(long)]
    pub simulate: bool,
}

fn grid(a: &SweepArgs, metric: Metric) -> Result<(CliSweepVariable, Vec<f64>), CliError> {
    let (var, from, to, log) = match (a.sweep, metric) {
        (Some(v), _) => (v, a.from, a.to, a.log),
        (None, Metric::Coverage) => (
            CliSweepVariable::ThresholdDb,
            a.from.or(Some(-10.0)),
            a.to.or(Some(30.0)),
            a.log,
        ),
        (None, Metric::Rate) => (
            CliSweepVariable::TxPowerW,
            a.from.or(Some(0.1)),
            a.to.or(Some(1000.0)),
            a.from.is_none() || a.log,
        ),
    };
    if let Some(values) = &a.values {
        if values.len() < 2 {
            return Err(CliError::Usage(format!(
                "sweep needs at least two values, got {}",
                values.len()
            )));
        }
        return Ok((var, values.clone()));
    }
    let (Some(from), Some(to)) = (from, to) else {
        return Err(CliError::Usage("--sweep needs --from and --to, or --values".into()));
    };
    if a.points < 2 || from == to || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Usage(format!(
            "empty sweep range: {} points from {from} to {to}",
            a.points
        )));
    }
    let n = a.points - 1;
    let values = if log {
        if from <= 0.0 || to <= 0.0 {
            return Err(CliError::Usage("--log needs positive --from and --to".into()));
        }
        let (l0, l1) = (from.ln(), to.ln());
        (0..=n)
            .map(|i| {
                if i == n {
                    to
                } else {
                    (l0 + (l1 - l0) * i as f64 / n as f64).exp()
                }
            })
            .collect()
    } else {
        (0..=n)
            .map(|i| {
                if i == n {
                    to
                } else {
                    from + (to - from) * i as f64 / n as f64
                }
            })
            .collect()
    };
    Ok((var, values))
}

/// Monte Carlo value and half-width at one scenario.
fn mc_at(s: &ScenarioF64, cfg: &RunConfig, threshold_db: f64, metric: Metric) -> leocov::Result<(f64, f64)> {
    let e = estimate(
        cfg.generator.0,
        &s.cfg,
        &s.earth,
        &s.link,
        &s.user,
        &cfg.monte_carlo(),
        threshold_db,
    )?;
    let m = match metric {
        Metric::Coverage => e.coverage,
        Metric::Rate => e.rate,
    };
    Ok((m.value, m.uncertainty))
}

pub fn sweep_command(cfg: &RunConfig, a: &SweepArgs, metric: Metric) -> Result<(), CliError> {
    let (var, values) = grid(a, metric)?;
    let internal: Vec<f64> = values.iter().map(|&v| var.to_internal(v)).collect();
    let base = cfg.scenario()?;
    let q = QuadratureSpec::default();
    let effective_mode = match cfg.n_mode {
        NModeSetting::Actual => NMode::Actual,
        NModeSetting::Effective => NMode::Effective,
        NModeSetting::Explicit(n) => NMode::Explicit(n),
    };
    let spec = SweepSpec {
        variable: var.internal(),
        values: internal.clone(),
        threshold_db: a.threshold_db,
        metric,
    };
    let actual = sweep(&base.with_n_mode(NMode::Actual), &spec, &q)?;
    let effective = sweep(&base.with_n_mode(effective_mode), &spec, &q)?;

    // A threshold sweep reuses one set of trials for every row.
    let shared: Option<leocov::Result<Vec<TrialOutcome<f64>>>> = (a.simulate && var == CliSweepVariable::ThresholdDb)
        .then(|| {
            run_monte_carlo(
                cfg.generator.0,
                &base.cfg,
                &base.earth,
                &base.link,
                &base.user,
                &cfg.monte_carlo(),
            )
        });

    let mut rows = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        let mut errors: Vec<String> = Vec::new();
        let mut take = |r: &leocov::Result<MetricResult<f64>>| match r {
            Ok(m) => Some(m.value),
            Err(e) => {
                let msg = e.to_string();
                if !errors.contains(&msg) {
                    errors.push(msg);
                }
                None
            }
        };
        let act = take(&actual[i].result);
        let eff = take(&effective[i].result);
        let n_eff = effective[i].result.as_ref().ok().map(|m| m.n_used);
        let mc = if !a.simulate {
            None
        } else if let Some(shared) = &shared {
            match shared {
                Ok(outcomes) => {
                    let e = summarize(outcomes, internal[i], cfg.n_act);
                    let m = match metric {
                        Metric::Coverage => e.coverage,
                        Metric::Rate => e.rate,
                    };
                    Some((m.value, m.uncertainty))
                }
                Err(e) => {
                    errors.push(format!("monte carlo: {e}"));
                    None
                }
            }
        } else {
            match apply_sweep_value(&base, var.internal(), internal[i], a.threshold_db)
                .and_then(|(s, t)| mc_at(&s, cfg, t, metric))
            {
                Ok(v) => Some(v),
                Err(e) => {
                    errors.push(format!("monte carlo: {e}"));
                    None
                }
            }
        };
        rows.push(vec![
            Cell::from(var.name()),
            Cell::from(v),
            Cell::from(act),
            Cell::from(eff),
            Cell::from(mc.map(|m| m.0)),
            Cell::from(mc.map(|m| m.1)),
            Cell::from(n_eff),
            Cell::from(errors.join("; ")),
        ]);
    }
    write_table(
        cfg.out.as_deref(),
        &[
            "sweep_variable",
            "value",
            "metric_analytic_actualN",
            "metric_analytic_effectiveN",
            "metric_mc",
            "mc_halfwidth",
            "n_eff_used",
            "error",
        ],
        &rows,
    )?;
    Ok(())
}

pub fn geometry(cfg: &RunConfig) -> Result<(), CliError> {
    let s = cfg.scenario()?;
    let r_max = max_slant_range(&s.cfg, &s.earth);
    let p_v = visibility_probability(&s.cfg, &s.earth);
    let lat = coverage_latitude_limit(&s.cfg, &s.earth);
    let h_min = min_altitude_for_global_coverage(s.cfg.inclination_rad, s.cfg.min_elevation_rad, &s.earth);
    let (h_cell, h_err) = match &h_min {
        Ok(h) => (Cell::Num(h / 1e3), Cell::Empty),
        Err(e) => (Cell::Empty, Cell::Text(e.to_string())),
    };
    let rows = vec![
        vec![
            "max_slant_range".into(),
            Cell::Num(r_max / 1e3),
            "km".into(),
            Cell::Empty,
        ],
        vec!["visibility_probability".into(), Cell::Num(p_v), "".into(), Cell::Empty],
        vec![
            "coverage_latitude_limit".into(),
            Cell::Num(lat.to_degrees()),
            "deg".into(),
            Cell::Empty,
        ],
        vec!["min_global_coverage_altitude".into(), h_cell, "km".into(), h_err],
    ];
    write_table(cfg.out.as_deref(), &["quantity", "value", "unit", "error"], &rows)?;
    h_min.map(|_| ()).map_err(CliError::from)
}

#[derive(Debug, Clone, Args)]
pub struct NeffArgs {
    /// User latitudes in degrees, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub latitudes_deg: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
}

pub fn neff(cfg: &RunConfig, a: &NeffArgs) -> Result<(), CliError> {
    let latitudes = match (&a.latitudes_deg, a.from, a.to) {
        (Some(l), None, None) => l.clone(),
        (None, Some(from), Some(to)) => {
            if a.points < 2 {
                return Err(CliError::Usage("latitude grid needs at least two points".into()));
            }
            let n = a.points - 1;
            (0..=n).map(|i| from + (to - from) * i as f64 / n as f64).collect()
        }
        (None, None, None) => vec![cfg.user_lat_deg],
        _ => return Err(CliError::Usage("use either --latitudes-deg or --from/--to".into())),
    };
    let s = cfg.scenario()?;
    let rows = latitudes
        .iter()
        .map(|&lat| {
            let phi = deg(lat);
            match effective_satellite_count(s.cfg.n_act, s.cfg.inclination_rad, phi)
                .and_then(|n| Ok((n, density_ratio(s.cfg.inclination_rad, phi)?)))
            {
                Ok((n, ratio)) => vec![
                    Cell::Num(lat),
                    Cell::Num(n.value),
                    Cell::Num(n.rounded() as f64),
                    Cell::Num(ratio),
                    Cell::Empty,
                ],
                Err(e) => vec![
                    Cell::Num(lat),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text(e.to_string()),
                ],
            }
        })
        .collect::<Vec<_>>();
    write_table(
        cfg.out.as_deref(),
        &["latitude_deg", "n_eff", "n_eff_rounded", "ratio", "error"],
        &rows,
    )?;
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub threshold_db: f64,
}

pub fn simulate(cfg: &RunConfig, a: &SimulateArgs) -> Result<(), CliError> {
    let s = cfg.scenario()?;
    let q = QuadratureSpec::default();
    let e = estimate(
        cfg.generator.0,
        &s.cfg,
        &s.earth,
        &s.link,
        &s.user,
        &cfg.monte_carlo(),
        a.threshold_db,
    )?;
    let cov = coverage_probability(&s, a.threshold_db, &q)?;
    let rate = average_rate(&s, &q)?;
    let bound = coverage_upper_bound(&s)?;
    let rows = vec![
        vec![
            "coverage".into(),
            Cell::Num(e.coverage.value),
            Cell::Num(e.coverage.uncertainty),
            Cell::Num(cov.value),
            Cell::Num(cov.n_used),
        ],
        vec![
            "rate".into(),
            Cell::Num(e.rate.value),
            Cell::Num(e.rate.uncertainty),
            Cell::Num(rate.value),
            Cell::Num(rate.n_used),
        ],
        vec![
            "visible_fraction".into(),
            Cell::Num(e.visible_fraction),
            Cell::Num(1.959_963_984_540_054 * e.visible_std_error),
            Cell::Num(bound),
            Cell::Num(cov.n_used),
        ],
    ];
    write_table(
        cfg.out.as_deref(),
        &["metric", "mc", "mc_halfwidth", "analytic", "n_used"],
        &rows,
    )?;
    Ok(())
}

const VERIFY_THRESHOLDS_DB: [f64; 3] = [0.0, 10.0, 20.0];

struct Check {
    name: &'static str,
    threshold_db: Option<f64>,
    analytic: f64,
    mc: f64,
    halfwidth: f64,
    /// Absolute deviation for coverage, relative for rate.
    deviation: f64,
    tolerance: f64,
    /// Half-width on the same scale as `deviation`.
    precision: f64,
}

impl Check {
    fn status(&self) -> &'static str {
        if self.precision > self.tolerance {
            "insufficient_precision"
        } else if self.deviation <= self.tolerance {
            "pass"
        } else {
            "fail"
        }
    }
}

fn verify_family(
    checks: &mut Vec<Check>,
    s: &ScenarioF64,
    kind: GeneratorKind,
    cfg: &RunConfig,
    seed: u64,
    names: (&'static str, &'static str),
    tolerances: (f64, f64),
) -> Result<(), CliError> {
    let q = QuadratureSpec::default();
    let mc = leocov::MonteCarloSpec {
        seed,
        ..cfg.monte_carlo()
    };
    let outcomes = run_monte_carlo(kind, &s.cfg, &s.earth, &s.link, &s.user, &mc)?;
    for t in VERIFY_THRESHOLDS_DB {
        let a = coverage_probability(s, t, &q)?.value;
        let e = summarize(&outcomes, t, s.cfg.n_act).coverage;
        checks.push(Check {
            name: names.0,
            threshold_db: Some(t),
            analytic: a,
            mc: e.value,
            halfwidth: e.uncertainty,
            deviation: (a - e.value).abs(),
            tolerance: tolerances.0,
            precision: e.uncertainty,
        });
    }
    let a = average_rate(s, &q)?.value;
    let e = summarize(&outcomes, 0.0, s.cfg.n_act).rate;
    let scale = e.value.abs().max(f64::MIN_POSITIVE);
    checks.push(Check {
        name: names.1,
        threshold_db: None,
        analytic: a,
        mc: e.value,
        halfwidth: e.uncertainty,
        deviation: (a - e.value).abs() / scale,
        tolerance: tolerances.1,
        precision: e.uncertainty / scale,
    });
    Ok(())
}

/// Uniform shell with the actual count against the quadrature, then the
/// inclined constellation against the effective count.
pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let s = cfg.scenario()?;
    let mut checks = Vec::new();
    verify_family(
        &mut checks,
        &s.with_n_mode(NMode::Actual),
        GeneratorKind::UniformShell,
        cfg,
        cfg.seed,
        ("uniform_coverage", "uniform_rate"),
        (0.005, 0.01),
    )?;
    verify_family(
        &mut checks,
        &s.with_n_mode(NMode::Effective),
        GeneratorKind::RandomInclined,
        cfg,
        cfg.seed.wrapping_add(1),
        ("neff_coverage", "neff_rate"),
        (0.02, 0.03),
    )?;

    let max_cov = checks
        .iter()
        .filter(|c| c.threshold_db.is_some())
        .map(|c| c.deviation)
        .fold(0.0, f64::max);
    let overall = if checks.iter().any(|c| c.status() == "fail") {
        "fail"
    } else if checks.iter().any(|c| c.status() == "insufficient_precision") {
        "insufficient_precision"
    } else {
        "pass"
    };
    let mut rows: Vec<Vec<Cell>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.into(),
                Cell::from(c.threshold_db),
                Cell::Num(c.analytic),
                Cell::Num(c.mc),
                Cell::Num(c.halfwidth),
                Cell::Num(c.deviation),
                Cell::Num(c.tolerance),
                c.status().into(),
            ]
        })
        .collect();
    rows.push(vec![
        "max_abs_coverage_deviation".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Num(max_cov),
        Cell::Empty,
        overall.into(),
    ]);
    write_table(
        cfg.out.as_deref(),
        &[
            "check",
            "threshold_db",
            "analytic",
            "mc",
            "mc_halfwidth",
            "deviation",
            "tolerance",
            "status",
        ],
        &rows,
    )?;
    match overall {
        "pass" => Ok(()),
        "fail" => Err(CliError::Verification(format!(
            "analytic and Monte Carlo disagree beyond tolerance (max coverage deviation {max_cov:.4})"
        ))),
        _ => Err(CliError::Verification(format!(
            "insufficient precision: {} trials leave a confidence half-width above the tolerance",
            cfg.trials
        ))),
    }
}

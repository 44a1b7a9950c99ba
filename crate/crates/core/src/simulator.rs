//! Monte Carlo estimation of coverage and rate over explicitly generated
//! constellations.
//!
//! Every trial draws a fresh constellation realization (or, for the fixed
//! Walker geometry, a fresh user longitude) and a fresh fading gain. Trials are
//! split into `workers` contiguous blocks; block `w` draws from ChaCha8
//! stream `w` of the run seed and blocks are merged in worker order, so a run
//! is bit-reproducible for a given `(seed, workers, trials)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{sample_gain, snr, LinkBudget};
use crate::error::{ensure, Error, Result};
use crate::geometry::{
    distance_squared, max_slant_range, satellite_position, ConstellationConfig, EarthModel, SatelliteState,
    UserLocation,
};
use crate::metric::{Method, MetricResult};
use crate::scalar::{db_to_linear, Real};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Satellites independently uniform on the shell.
    UniformShell,
    /// Satellites on circular orbits of the configured inclination, each with
    /// independent uniform argument of latitude and ascending node.
    RandomInclined,
    /// Walker delta pattern `planes / sats_per_plane / phasing`.
    WalkerDelta {
        planes: usize,
        sats_per_plane: usize,
        phasing: usize,
    },
}

impl GeneratorKind {
    pub fn validate(&self, n_act: usize) -> Result<()> {
        if let GeneratorKind::WalkerDelta {
            planes, sats_per_plane, ..
        } = *self
        {
            if planes == 0 || sats_per_plane == 0 || planes * sats_per_plane != n_act {
                return Err(Error::WalkerMismatch {
                    planes,
                    sats_per_plane,
                    n_act,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloSpec {
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for MonteCarloSpec {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            workers: 8,
        }
    }
}

impl MonteCarloSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.trials >= 1, "trials", self.trials as f64, "must be at least 1")?;
        ensure(self.workers >= 1, "workers", self.workers as f64, "must be at least 1")
    }
}

/// Result of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome<T> {
    /// Distance to the nearest satellite, visible or not.
    pub nearest_distance_m: T,
    /// Index of the nearest satellite in the generated list.
    pub nearest_index: usize,
    pub r_max_m: T,
    pub snr_linear: T,
}

impl<T: Real> TrialOutcome<T> {
    /// Serving distance, or `None` when no satellite is above the minimum elevation.
    pub fn serving_distance_m(&self) -> Option<T> {
        (self.nearest_distance_m <= self.r_max_m).then_some(self.nearest_distance_m)
    }

    pub fn visible(&self) -> bool {
        self.nearest_distance_m <= self.r_max_m
    }

    pub fn covered(&self, threshold_linear: T) -> bool {
        self.snr_linear > threshold_linear
    }

    pub fn rate_bits(&self) -> T {
        self.snr_linear.ln_1p() / T::LN_2()
    }
}

fn uniform_angle<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::TAU() * T::sample_unit(rng)
}

/// Appends one realization of the constellation to `out` (cleared first).
pub fn generate_into<T: Real, R: Rng + ?Sized>(
    kind: GeneratorKind,
    cfg: &ConstellationConfig<T>,
    earth: &EarthModel<T>,
    rng: &mut R,
    out: &mut Vec<SatelliteState<T>>,
) -> Result<()> {
    kind.validate(cfg.n_act)?;
    out.clear();
    out.reserve(cfg.n_act);
    match kind {
        GeneratorKind::UniformShell => {
            let rho = cfg.shell_radius(earth);
            for _ in 0..cfg.n_act {
                // Archimedes: z uniform on [-1, 1] gives a uniform point on the sphere.
                let z = T::lit(2.0) * T::sample_unit(rng) - T::one();
                let lon: T = uniform_angle(rng);
                let ring = (T::one() - z * z).max(T::zero()).sqrt();
                let (s, c) = lon.sin_cos();
                out.push(SatelliteState {
                    position_m: [rho * ring * c, rho * ring * s, rho * z],
                });
            }
        }
        GeneratorKind::RandomInclined => {
            for _ in 0..cfg.n_act {
                let u = uniform_angle(rng);
                let raan = uniform_angle(rng);
                out.push(satellite_position(u, raan, cfg, earth));
            }
        }
        GeneratorKind::WalkerDelta {
            planes,
            sats_per_plane,
            phasing,
        } => {
            let n = T::from_usize(cfg.n_act).unwrap();
            for p in 0..planes {
                let pf = T::from_usize(p).unwrap();
                let raan = T::TAU() * pf / T::from_usize(planes).unwrap();
                let phase = T::TAU() * T::from_usize(phasing).unwrap() * pf / n;
                for s in 0..sats_per_plane {
                    let u = T::TAU() * T::from_usize(s).unwrap() / T::from_usize(sats_per_plane).unwrap() + phase;
                    out.push(satellite_position(u, raan, cfg, earth));
                }
            }
        }
    }
    Ok(())
}

/// One realization of the constellation.
pub fn generate<T: Real, R: Rng + ?Sized>(
    kind: GeneratorKind,
    cfg: &ConstellationConfig<T>,
    earth: &EarthModel<T>,
    rng: &mut R,
) -> Result<Vec<SatelliteState<T>>> {
    let mut out = Vec::new();
    generate_into(kind, cfg, earth, rng, &mut out)?;
    Ok(out)
}

/// Serves the user from the nearest satellite (lowest index on ties) and
/// draws the fading gain when that satellite is visible.
///
/// # Panics
/// If `sats` is empty.
pub fn run_trial<T: Real, R: Rng + ?Sized>(
    sats: &[SatelliteState<T>],
    user: &UserLocation<T>,
    cfg: &ConstellationConfig<T>,
    earth: &EarthModel<T>,
    lb: &LinkBudget<T>,
    rng: &mut R,
) -> TrialOutcome<T> {
    assert!(!sats.is_empty(), "run_trial needs at least one satellite");
    let up = user.position(earth);
    let mut best = 0;
    let mut best_d2 = T::infinity();
    for (i, s) in sats.iter().enumerate() {
        let d2 = distance_squared(up, s.position_m);
        if d2 < best_d2 {
            best = i;
            best_d2 = d2;
        }
    }
    let distance = best_d2.sqrt();
    let r_max = max_slant_range(cfg, earth);
    let snr_linear = if distance <= r_max {
        let gain = sample_gain(lb, rng) / lb.gain_scale();
        snr(lb, gain, distance, r_max)
    } else {
        T::zero()
    };
    TrialOutcome {
        nearest_distance_m: distance,
        nearest_index: best,
        r_max_m: r_max,
        snr_linear,
    }
}

fn run_block<T: Real>(
    kind: GeneratorKind,
    cfg: &ConstellationConfig<T>,
    earth: &EarthModel<T>,
    lb: &LinkBudget<T>,
    user: &UserLocation<T>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TrialOutcome<T>>> {
    let mut out = Vec::with_capacity(trials);
    let mut sats = Vec::new();
    if let GeneratorKind::WalkerDelta { .. } = kind {
        generate_into(kind, cfg, earth, rng, &mut sats)?;
        for _ in 0..trials {
            let u = user.with_longitude(uniform_angle(rng));
            out.push(run_trial(&sats, &u, cfg, earth, lb, rng));
        }
    } else {
        for _ in 0..trials {
            generate_into(kind, cfg, earth, rng, &mut sats)?;
            out.push(run_trial(&sats, user, cfg, earth, lb, rng));
        }
    }
    Ok(out)
}

/// Runs `mc.trials` independent trials and returns the outcomes in a
/// deterministic order.
pub fn simulate<T: Real>(
    kind: GeneratorKind,
    cfg: &ConstellationConfig<T>,
    earth: &EarthModel<T>,
    lb: &LinkBudget<T>,
    user: &UserLocation<T>,
    mc: &MonteCarloSpec,
) -> Result<Vec<TrialOutcome<T>>> {
    mc.validate()?;
    cfg.validate()?;
    earth.validate()?;
    lb.validate()?;
    user.validate()?;
    kind.validate(cfg.n_act)?;
    let blocks: Vec<Result<Vec<TrialOutcome<T>>>> = (0..mc.workers)
        .into_par_iter()
        .map(|w| {
            let begin = mc.trials * w / mc.workers;
            let end = mc.trials * (w + 1) / mc.workers;
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(w as u64);
            run_block(kind, cfg, earth, lb, user, end - begin, &mut rng)
        })
        .collect();
    let mut out = Vec::with_capacity(mc.trials);
    for block in blocks {
        out.extend(block?);
    }
    Ok(out)
}

/// Coverage and rate estimates from one batch of trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub coverage: MetricResult<T>,
    pub rate: MetricResult<T>,
    /// Fraction of trials with at least one visible satellite.
    pub visible_fraction: T,
    /// Standard error of `visible_fraction`.
    pub visible_std_error: T,
}

/// Fraction of `hits` among `n` with its binomial standard error.
fn proportion<T: Real>(hits: usize, n: usize) -> (T, T) {
    let nf = T::from_usize(n).unwrap();
    let p = T::from_usize(hits).unwrap() / nf;
    (p, (p * (T::one() - p) / nf).sqrt())
}

/// Aggregates outcomes at one threshold. `n_act` is recorded as the count used.
pub fn summarize<T: Real>(outcomes: &[TrialOutcome<T>], threshold_db: T, n_act: usize) -> Estimate<T> {
    let n = outcomes.len().max(1);
    let nf = T::from_usize(n).unwrap();
    let threshold = db_to_linear(threshold_db);
    let covered = outcomes.iter().filter(|o| o.covered(threshold)).count();
    let visible = outcomes.iter().filter(|o| o.visible()).count();
    let (coverage, coverage_se) = proportion::<T>(covered, n);
    let (visible_fraction, visible_std_error) = proportion::<T>(visible, n);

    let mean = outcomes.iter().fold(T::zero(), |s, o| s + o.rate_bits()) / nf;
    let var = if n > 1 {
        outcomes.iter().fold(T::zero(), |s, o| {
            let d = o.rate_bits() - mean;
            s + d * d
        }) / T::from_usize(n - 1).unwrap()
    } else {
        T::zero()
    };
    let n_used = T::from_usize(n_act).unwrap();
    let z = T::lit(Z95);
    Estimate {
        coverage: MetricResult {
            value: coverage,
            method: Method::MonteCarlo,
            n_used,
            uncertainty: z * coverage_se,
            trials: Some(outcomes.len()),
        },
        rate: MetricResult {
            value: mean,
            method: Method::MonteCarlo,
            n_used,
            uncertainty: z * (var / nf).sqrt(),
            trials: Some(outcomes.len()),
        },
        visible_fraction,
        visible_std_error,
    }
}

/// Simulates and summarizes at one threshold.
pub fn estimate<T: Real>(
    kind: GeneratorKind,
    cfg: &ConstellationConfig<T>,
    earth: &EarthModel<T>,
    lb: &LinkBudget<T>,
    user: &UserLocation<T>,
    mc: &MonteCarloSpec,
    threshold_db: T,
) -> Result<Estimate<T>> {
    let outcomes = simulate(kind, cfg, earth, lb, user, mc)?;
    Ok(summarize(&outcomes, threshold_db, cfg.n_act))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::satellite_latitude_cdf;
    use crate::scalar::deg;

    fn cfg(n: usize) -> ConstellationConfig<f64> {
        ConstellationConfig::new(n, 500e3, deg(70.0), deg(10.0)).unwrap()
    }

    fn ks_uniform(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn generators_place_exactly_n_on_shell() {
        let earth = EarthModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [
            GeneratorKind::UniformShell,
            GeneratorKind::RandomInclined,
            GeneratorKind::WalkerDelta {
                planes: 6,
                sats_per_plane: 108,
                phasing: 1,
            },
        ] {
            let sats = generate(kind, &cfg(648), &earth, &mut rng).unwrap();
            assert_eq!(sats.len(), 648);
            let rho = cfg(648).shell_radius(&earth);
            for s in &sats {
                assert!(((s.radius() - rho) / rho).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn walker_spacing() {
        let earth = EarthModel::default();
        let c = cfg(648);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let kind = GeneratorKind::WalkerDelta {
            planes: 6,
            sats_per_plane: 108,
            phasing: 1,
        };
        let sats = generate(kind, &c, &earth, &mut rng).unwrap();
        // Ascending node of plane p: the in-plane point at u = pi, where the
        // orbit crosses the equator northbound under this rotation.
        for p in 0..6 {
            let node = satellite_position(
                std::f64::consts::PI,
                2.0 * std::f64::consts::PI * p as f64 / 6.0,
                &c,
                &earth,
            );
            let next = satellite_position(
                std::f64::consts::PI,
                2.0 * std::f64::consts::PI * ((p + 1) % 6) as f64 / 6.0,
                &c,
                &earth,
            );
            let dlon = (next.longitude() - node.longitude()).rem_euclid(2.0 * std::f64::consts::PI);
            assert!((dlon.to_degrees() - 60.0).abs() < 1e-9);
        }
        // Consecutive satellites in a plane are separated by 360/108 degrees of arc.
        let rho = c.shell_radius(&earth);
        for p in 0..6 {
            for s in 0..107 {
                let a = sats[p * 108 + s].position_m;
                let b = sats[p * 108 + s + 1].position_m;
                let cos = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (rho * rho);
                assert!((cos.acos().to_degrees() - 360.0 / 108.0).abs() < 1e-6);
            }
        }
        assert!(generate(
            GeneratorKind::WalkerDelta {
                planes: 5,
                sats_per_plane: 100,
                phasing: 1
            },
            &c,
            &earth,
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn uniform_shell_z_is_uniform() {
        let earth = EarthModel::default();
        let c = ConstellationConfig::new(1_000_000, 500e3, deg(70.0), deg(10.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sats = generate(GeneratorKind::UniformShell, &c, &earth, &mut rng).unwrap();
        let rho = c.shell_radius(&earth);
        let zs: Vec<f64> = sats.iter().map(|s| s.position_m[2] / rho).collect();
        let ks = ks_uniform(zs, |z| (z + 1.0) / 2.0);
        assert!(ks < 0.002, "ks = {ks}");
    }

    #[test]
    fn inclined_latitudes_bounded_and_match_density() {
        let earth = EarthModel::default();
        let c = ConstellationConfig::new(100_000, 500e3, deg(70.0), deg(10.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sats = generate(GeneratorKind::RandomInclined, &c, &earth, &mut rng).unwrap();
        let lats: Vec<f64> = sats.iter().map(|s| s.latitude()).collect();
        assert!(lats.iter().all(|l| l.abs() <= deg(70.0) + 1e-12));
        let ks = ks_uniform(lats, |l| satellite_latitude_cdf(deg(70.0), l));
        assert!(ks < 0.006, "ks = {ks}");
    }

    #[test]
    fn trial_examples() {
        let earth = EarthModel::default();
        let c = cfg(1);
        let lb = LinkBudget::default();
        let user = UserLocation::new(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = c.shell_radius(&earth);

        let zenith = [SatelliteState {
            position_m: [rho, 0.0, 0.0],
        }];
        let o = run_trial(&zenith, &user, &c, &earth, &lb, &mut rng);
        assert!(o.snr_linear > 0.0);
        assert!((o.serving_distance_m().unwrap() - 500e3).abs() < 1e-6);

        let below = [
            SatelliteState {
                position_m: [-rho, 0.0, 0.0],
            },
            SatelliteState {
                position_m: [0.0, rho, 0.0],
            },
        ];
        let o = run_trial(&below, &user, &c, &earth, &lb, &mut rng);
        assert_eq!(o.snr_linear, 0.0);
        assert_eq!(o.rate_bits(), 0.0);
        assert!(o.serving_distance_m().is_none());

        let (s, cth) = deg(5.0_f64).sin_cos();
        let mirrored = [
            SatelliteState {
                position_m: [rho * cth, rho * s, 0.0],
            },
            SatelliteState {
                position_m: [rho * cth, -rho * s, 0.0],
            },
        ];
        let o = run_trial(&mirrored, &user, &c, &earth, &lb, &mut rng);
        assert_eq!(o.nearest_index, 0);
    }

    #[test]
    fn reproducible_and_worker_dependent_only_through_streams() {
        let earth = EarthModel::default();
        let lb = LinkBudget::default();
        let user = UserLocation::new(0.0).unwrap();
        let mc = MonteCarloSpec {
            trials: 2000,
            seed: 42,
            workers: 3,
        };
        let a = simulate(GeneratorKind::RandomInclined, &cfg(120), &earth, &lb, &user, &mc).unwrap();
        let b = simulate(GeneratorKind::RandomInclined, &cfg(120), &earth, &lb, &user, &mc).unwrap();
        assert_eq!(a.len(), 2000);
        assert!(a
            .iter()
            .zip(&b)
            .all(|(x, y)| x.snr_linear.to_bits() == y.snr_linear.to_bits()));
        let other = simulate(
            GeneratorKind::RandomInclined,
            &cfg(120),
            &earth,
            &lb,
            &user,
            &MonteCarloSpec { seed: 43, ..mc },
        )
        .unwrap();
        assert!(a.iter().zip(&other).any(|(x, y)| x.snr_linear != y.snr_linear));
    }

    #[test]
    fn single_trial_coverage_is_binary() {
        let earth = EarthModel::default();
        let mc = MonteCarloSpec {
            trials: 1,
            seed: 9,
            workers: 4,
        };
        let e = estimate(
            GeneratorKind::RandomInclined,
            &cfg(648),
            &earth,
            &LinkBudget::default(),
            &UserLocation::new(0.0).unwrap(),
            &mc,
            10.0,
        )
        .unwrap();
        assert!(e.coverage.value == 0.0 || e.coverage.value == 1.0);
        assert_eq!(e.coverage.trials, Some(1));
    }

    #[test]
    fn vanishing_threshold_coverage_equals_visible_fraction() {
        let earth = EarthModel::default();
        let mc = MonteCarloSpec {
            trials: 20_000,
            seed: 5,
            workers: 4,
        };
        let outcomes = simulate(
            GeneratorKind::UniformShell,
            &cfg(120),
            &earth,
            &LinkBudget::default(),
            &UserLocation::new(0.0).unwrap(),
            &mc,
        )
        .unwrap();
        let e = summarize(&outcomes, -200.0, 120);
        assert_eq!(e.coverage.value, e.visible_fraction);
        assert!(e.visible_fraction > 0.5 && e.visible_fraction < 1.0);
    }

    #[test]
    fn walker_trials_vary_user_longitude() {
        let earth = EarthModel::default();
        let mc = MonteCarloSpec {
            trials: 500,
            seed: 1,
            workers: 2,
        };
        let kind = GeneratorKind::WalkerDelta {
            planes: 12,
            sats_per_plane: 54,
            phasing: 1,
        };
        let outcomes = simulate(
            kind,
            &cfg(648),
            &earth,
            &LinkBudget::default(),
            &UserLocation::new(0.0).unwrap(),
            &mc,
        )
        .unwrap();
        let first = outcomes[0].nearest_distance_m;
        assert!(outcomes.iter().any(|o| o.nearest_distance_m != first));
    }

    #[test]
    fn rejects_bad_specs() {
        let earth = EarthModel::default();
        let user = UserLocation::new(0.0).unwrap();
        let lb = LinkBudget::default();
        for mc in [
            MonteCarloSpec {
                trials: 0,
                ..MonteCarloSpec::default()
            },
            MonteCarloSpec {
                workers: 0,
                ..MonteCarloSpec::default()
            },
        ] {
            assert!(simulate(GeneratorKind::UniformShell, &cfg(10), &earth, &lb, &user, &mc).is_err());
        }
    }
}

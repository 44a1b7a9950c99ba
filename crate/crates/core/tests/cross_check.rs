//! Quadrature results against Monte Carlo over a uniform shell with the same
//! satellite count, where the analytic model is exact.

use leocov::*;

fn scenario(n: usize, altitude_km: f64, min_elevation_deg: f64) -> ScenarioF64 {
    Scenario {
        cfg: ConstellationConfig::new(n, altitude_km * 1e3, deg(70.0), deg(min_elevation_deg)).unwrap(),
        earth: EarthModel::default(),
        link: LinkBudget::default(),
        user: UserLocation::new(0.0).unwrap(),
        n_mode: NMode::Actual,
    }
}

fn check(s: &ScenarioF64, seed: u64) {
    let q = QuadratureSpec::default();
    let mc = MonteCarloSpec {
        trials: 1_000_000,
        seed,
        workers: 8,
    };
    let outcomes = simulate(GeneratorKind::UniformShell, &s.cfg, &s.earth, &s.link, &s.user, &mc).unwrap();
    for t in [0.0, 10.0, 20.0] {
        let mc_est = summarize(&outcomes, t, s.cfg.n_act);
        let a = coverage_probability(s, t, &q).unwrap().value;
        let tol = 0.005_f64.max(3.0 * mc_est.coverage.uncertainty);
        assert!(
            (a - mc_est.coverage.value).abs() < tol,
            "T={t}: analytic {a} vs MC {}",
            mc_est.coverage.value
        );
    }
    let mc_rate = summarize(&outcomes, 0.0, s.cfg.n_act).rate.value;
    let rate = average_rate(s, &q).unwrap().value;
    assert!(((rate - mc_rate) / mc_rate).abs() < 0.01, "rate {rate} vs MC {mc_rate}");
}

#[test]
fn uniform_shell_matches_quadrature_default_effective_count() {
    // 439 is the effective count of the 648-satellite default constellation.
    check(&scenario(439, 500.0, 10.0), 11);
}

#[test]
fn uniform_shell_matches_quadrature_sparse_high_shell() {
    check(&scenario(120, 1000.0, 20.0), 12);
}

#[test]
fn effective_scenario_matches_uniform_shell_at_effective_count() {
    let q = QuadratureSpec::default();
    let mut s = scenario(648, 500.0, 10.0);
    s.n_mode = NMode::Effective;
    let n = s.resolve_n().unwrap();
    assert_eq!(n.round(), 439.0);
    let a = coverage_probability(&s, 10.0, &q).unwrap().value;
    let shell = scenario(439, 500.0, 10.0);
    let b = coverage_probability(&shell, 10.0, &q).unwrap().value;
    // A fraction of a satellite moves coverage only marginally.
    assert!((a - b).abs() < 1e-3, "{a} vs {b}");
}

#[test]
fn walker_constellation_tracks_effective_count() {
    let q = QuadratureSpec::default();
    let mut s = scenario(648, 500.0, 10.0);
    s.n_mode = NMode::Effective;
    let mc = MonteCarloSpec {
        trials: 100_000,
        seed: 3,
        workers: 8,
    };
    let kind = GeneratorKind::WalkerDelta {
        planes: 18,
        sats_per_plane: 36,
        phasing: 1,
    };
    let est = estimate(kind, &s.cfg, &s.earth, &s.link, &s.user, &mc, 10.0).unwrap();
    let a = coverage_probability(&s, 10.0, &q).unwrap().value;
    // A fixed pattern is not a random shell; only rough agreement is expected.
    assert!((a - est.coverage.value).abs() < 0.1, "{a} vs {}", est.coverage.value);
}

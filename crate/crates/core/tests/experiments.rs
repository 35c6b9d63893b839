use mafia_dynamics::scenario::{classify_outcomes_detailed, Experiment};
use mafia_dynamics::{settling_time, IntegrationConfig, Method, Sign};

fn run(e: Experiment) -> mafia_dynamics::scenario::ExperimentRun {
    e.scenario().run(&IntegrationConfig::default()).unwrap()
}

#[test]
fn every_experiment_starts_converged() {
    for e in Experiment::ALL {
        let eq = e.scenario().equilibrium().unwrap();
        assert!(eq.converged, "{e}: {}", eq.residuals);
    }
}

#[test]
fn base_run_grows_crime_after_unification() {
    let traj = run(Experiment::Base).trajectory;
    let before = traj.at(59.0).unwrap().state;
    let after = traj.last().state;
    assert!(after.bandits > before.bandits);
    assert!(after.mafia > before.mafia);
    assert_eq!(traj.clamp_events, 0);
}

#[test]
fn table_rows_reproduced() {
    for e in Experiment::ALL {
        let traj = run(e).trajectory;
        let (pre, post) = e.comparison_windows();
        let detail = classify_outcomes_detailed(&traj, pre, post, 0.01).unwrap();
        assert_eq!(
            detail.signs,
            e.published_outcome(),
            "{e}: pre {:?} post {:?}",
            detail.pre_means,
            detail.post_means
        );
    }
}

#[test]
fn low_output_mafia_unchanged_in_base_windows() {
    let traj = run(Experiment::LowOutput).trajectory;
    let signs =
        mafia_dynamics::classify_outcomes(&traj, (40.0, 60.0), (280.0, 300.0), 0.01).unwrap();
    assert_eq!(signs.mafia, Sign::NoChange);
    assert_eq!(signs.bandits, Sign::Plus);
}

#[test]
fn base_run_settles() {
    let traj = run(Experiment::Base).trajectory;
    let t = settling_time(&traj, 1e-3).unwrap();
    assert!(t > 60.0 && t <= 130.0, "settled at {t}");
}

#[test]
fn fixed_point_holds_without_interventions() {
    let scenario = Experiment::Base.scenario();
    let eq = scenario.equilibrium().unwrap();
    let traj = mafia_dynamics::simulate(
        &eq.state,
        &scenario.initial_params,
        &[],
        60.0,
        &IntegrationConfig::default(),
    )
    .unwrap();
    for s in &traj.samples {
        for (a, b) in [
            (s.state.peasants, eq.state.peasants),
            (s.state.bandits, eq.state.bandits),
            (s.state.mafia, eq.state.mafia),
        ] {
            assert!((a - b).abs() <= 1e-3 * b, "{a} vs {b}");
        }
    }
}

#[test]
fn runs_are_bit_identical() {
    let cfg = IntegrationConfig {
        method: Method::Rk4,
        ..Default::default()
    };
    let a = Experiment::EliminateMafia
        .scenario()
        .run(&cfg)
        .unwrap()
        .trajectory;
    let b = Experiment::EliminateMafia
        .scenario()
        .run(&cfg)
        .unwrap()
        .trajectory;
    assert_eq!(a, b);
}

#[test]
fn productivity_shock_matches_low_output_until_shock() {
    let low = run(Experiment::LowOutput).trajectory;
    let shock = run(Experiment::ProductivityShock).trajectory;
    for (a, b) in low
        .samples
        .iter()
        .zip(&shock.samples)
        .take_while(|(a, _)| a.t < 150.0)
    {
        assert_eq!(a.state, b.state);
    }
}

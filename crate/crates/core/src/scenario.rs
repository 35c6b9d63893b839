//! Timed interventions, the built-in experiments and outcome classification.
//!
//! A scenario file is TOML with a `[parameters]` table holding every
//! parameter, an optional `[initial]` stock guess that seeds the equilibrium
//! solver, and an `[[interventions]]` array of `{ time, target, value }`
//! records. `target` is a parameter name (numeric `value`) or an override
//! name (boolean `value`).

use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    find_fixed_point, FixedPointResult, DEFAULT_MAX_HORIZON, DEFAULT_TOLERANCE,
};
use crate::error::{ScenarioError, SimulationError};
use crate::integrator::{simulate, IntegrationConfig, Trajectory};
use crate::model::{OverrideName, Overrides, ParameterName, Parameters, StockState};

/// Months in every built-in experiment.
pub const HORIZON: f64 = 300.0;
/// Time of the collapse of authority control.
pub const UNIFICATION_TIME: f64 = 60.0;
/// Time of the second intervention in the two-step experiments.
pub const SECOND_INTERVENTION_TIME: f64 = 150.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    SetParameter(ParameterName, f64),
    SetOverride(OverrideName, bool),
}

impl Action {
    pub fn apply(&self, params: &mut Parameters, overrides: &mut Overrides) {
        match *self {
            Action::SetParameter(name, value) => params.set(name, value),
            Action::SetOverride(name, on) => overrides.set(name, on),
        }
    }

    pub fn target(&self) -> &'static str {
        match self {
            Action::SetParameter(name, _) => name.as_str(),
            Action::SetOverride(name, _) => name.as_str(),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::SetParameter(name, value) => write!(f, "{name} <- {value}"),
            Action::SetOverride(name, on) => {
                write!(f, "{name} <- {}", if *on { "on" } else { "off" })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intervention {
    pub time: f64,
    pub action: Action,
}

impl Intervention {
    pub fn set_parameter(time: f64, name: ParameterName, value: f64) -> Self {
        Intervention {
            time,
            action: Action::SetParameter(name, value),
        }
    }

    pub fn set_override(time: f64, name: OverrideName) -> Self {
        Intervention {
            time,
            action: Action::SetOverride(name, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub initial_params: Parameters,
    /// Seed for the equilibrium solver; `None` uses [`default_guess`].
    pub initial_guess: Option<StockState>,
    /// Sorted by time; ties keep their declaration order.
    pub interventions: Vec<Intervention>,
    pub horizon: f64,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        initial_params: Parameters,
        initial_guess: Option<StockState>,
        mut interventions: Vec<Intervention>,
        horizon: f64,
    ) -> Result<Self, ScenarioError> {
        interventions.sort_by(|a, b| a.time.total_cmp(&b.time));
        let scenario = Scenario {
            name: name.into(),
            initial_params,
            initial_guess,
            interventions,
            horizon,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.initial_params.validate()?;
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(ScenarioError::Invalid(format!(
                "horizon {} must be positive",
                self.horizon
            )));
        }
        if let Some(guess) = &self.initial_guess {
            guess.validate(self.initial_params.population)?;
        }
        let mut last = f64::NEG_INFINITY;
        for iv in &self.interventions {
            if !(0.0..=self.horizon).contains(&iv.time) {
                return Err(ScenarioError::Invalid(format!(
                    "intervention time {} outside [0, {}]",
                    iv.time, self.horizon
                )));
            }
            if iv.time < last {
                return Err(ScenarioError::Invalid(
                    "interventions are not sorted by time".into(),
                ));
            }
            last = iv.time;
            if let Action::SetParameter(name, value) = iv.action {
                if name == ParameterName::Population {
                    return Err(ScenarioError::Invalid(
                        "the total population N cannot change during a run".into(),
                    ));
                }
                name.check(value)?;
            }
        }
        Ok(())
    }

    /// The guess handed to the equilibrium solver.
    pub fn guess(&self) -> StockState {
        self.initial_guess
            .unwrap_or_else(|| default_guess(&self.initial_params))
    }

    pub fn equilibrium(&self) -> Result<FixedPointResult, SimulationError> {
        find_fixed_point(
            &self.initial_params,
            &self.guess(),
            DEFAULT_TOLERANCE,
            DEFAULT_MAX_HORIZON,
        )
    }

    /// Solves for the starting equilibrium and integrates to the horizon.
    pub fn run(&self, config: &IntegrationConfig) -> Result<ExperimentRun, SimulationError> {
        let equilibrium = self.equilibrium()?;
        if !equilibrium.converged {
            warn!(
                "{}: initial equilibrium not converged (max residual {:e})",
                self.name,
                equilibrium.max_residual()
            );
        }
        let trajectory = self.run_from(&equilibrium.state, config)?;
        Ok(ExperimentRun {
            equilibrium,
            trajectory,
        })
    }

    /// Integrates from an explicit initial state, skipping the solver.
    pub fn run_from(
        &self,
        initial: &StockState,
        config: &IntegrationConfig,
    ) -> Result<Trajectory, SimulationError> {
        let mut start = *initial;
        start.t = 0.0;
        simulate(
            &start,
            &self.initial_params,
            &self.interventions,
            self.horizon,
            config,
        )
    }

    /// Renders the scenario in the file format read by [`Scenario::from_toml`].
    pub fn to_toml(&self) -> String {
        let file = ScenarioFile {
            name: Some(self.name.clone()),
            horizon: Some(self.horizon),
            parameters: self.initial_params,
            initial: self.initial_guess.map(|s| InitialGuess {
                peasants: s.peasants,
                bandits: s.bandits,
                mafia: s.mafia,
                perceived_peasant_income: s.perceived_peasant_income,
                perceived_bandit_income: s.perceived_bandit_income,
            }),
            interventions: self
                .interventions
                .iter()
                .map(|iv| InterventionRecord {
                    time: iv.time,
                    target: iv.action.target().to_string(),
                    value: match iv.action {
                        Action::SetParameter(_, v) => RecordValue::Number(v),
                        Action::SetOverride(_, on) => RecordValue::Flag(on),
                    },
                })
                .collect(),
        };
        toml::to_string(&file).expect("scenario serializes to TOML")
    }

    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| ScenarioError::Parse(e.message().to_string()))?;
        let population = file.parameters.population;
        let initial = file.initial.map(|g| StockState {
            t: 0.0,
            peasants: g.peasants,
            bandits: g.bandits,
            mafia: g.mafia,
            perceived_peasant_income: g.perceived_peasant_income,
            perceived_bandit_income: g.perceived_bandit_income,
        });
        if let Some(state) = &initial {
            state.validate(population)?;
        }
        let interventions = file
            .interventions
            .into_iter()
            .map(InterventionRecord::into_intervention)
            .collect::<Result<Vec<_>, _>>()?;
        Scenario::new(
            file.name.unwrap_or_else(|| "custom".to_string()),
            file.parameters,
            initial,
            interventions,
            file.horizon.unwrap_or(HORIZON),
        )
    }
}

/// Starting guess with the base-run shares: 97.3% peasants, incomes near
/// the ones of a lawful economy.
pub fn default_guess(params: &Parameters) -> StockState {
    let n = params.population;
    StockState::from_criminals(
        0.0,
        n,
        n * 3.0 / 110.0,
        0.0,
        params.marginal_product * 0.998,
        params.marginal_product * 0.028,
    )
}

/// Output of [`Scenario::run`].
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub equilibrium: FixedPointResult,
    pub trajectory: Trajectory,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<InitialGuess>,
    #[serde(default)]
    interventions: Vec<InterventionRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialGuess {
    #[serde(rename = "P")]
    peasants: f64,
    #[serde(rename = "B")]
    bandits: f64,
    #[serde(rename = "M")]
    mafia: f64,
    #[serde(rename = "ihat_P")]
    perceived_peasant_income: f64,
    #[serde(rename = "ihat_B")]
    perceived_bandit_income: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InterventionRecord {
    time: f64,
    target: String,
    value: RecordValue,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RecordValue {
    Flag(bool),
    Number(f64),
}

impl InterventionRecord {
    fn into_intervention(self) -> Result<Intervention, ScenarioError> {
        let action = if let Ok(name) = self.target.parse::<ParameterName>() {
            match self.value {
                RecordValue::Number(v) => Action::SetParameter(name, v),
                RecordValue::Flag(_) => {
                    return Err(ScenarioError::Parse(format!(
                        "parameter {name} needs a numeric value"
                    )))
                }
            }
        } else if let Ok(name) = self.target.parse::<OverrideName>() {
            match self.value {
                RecordValue::Flag(on) => Action::SetOverride(name, on),
                RecordValue::Number(_) => {
                    return Err(ScenarioError::Parse(format!(
                        "override {name} needs a boolean value"
                    )))
                }
            }
        } else {
            return Err(ScenarioError::Parse(format!(
                "unknown intervention target `{}`",
                self.target
            )));
        };
        Ok(Intervention {
            time: self.time,
            action,
        })
    }
}

/// Applies, in order, every intervention of `scenario` due at or before `t`.
pub fn apply_interventions(
    scenario: &Scenario,
    t: f64,
    current: (Parameters, Overrides),
) -> (Parameters, Overrides) {
    let (mut params, mut overrides) = current;
    for iv in scenario
        .interventions
        .iter()
        .take_while(|iv| iv.time <= t + 1e-9)
    {
        iv.action.apply(&mut params, &mut overrides);
    }
    (params, overrides)
}

/// The six built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Base,
    LowOutput,
    ProductivityShock,
    EliminateMafia,
    NoBandits,
    StateControl,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Base,
        Experiment::LowOutput,
        Experiment::ProductivityShock,
        Experiment::EliminateMafia,
        Experiment::NoBandits,
        Experiment::StateControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Base => "base",
            Experiment::LowOutput => "low-output",
            Experiment::ProductivityShock => "productivity-shock",
            Experiment::EliminateMafia => "eliminate-mafia",
            Experiment::NoBandits => "no-bandits",
            Experiment::StateControl => "state-control",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Experiment::Base => "Base run",
            Experiment::LowOutput => "Low output",
            Experiment::ProductivityShock => "Positive productivity shock",
            Experiment::EliminateMafia => "Eliminating the mafia",
            Experiment::NoBandits => "No bandits",
            Experiment::StateControl => "Increasing state control",
        }
    }

    pub fn valid_names() -> String {
        Experiment::ALL.map(Experiment::name).join(", ")
    }

    fn low_output_family(self) -> bool {
        matches!(self, Experiment::LowOutput | Experiment::ProductivityShock)
    }

    pub fn has_second_intervention(self) -> bool {
        !matches!(self, Experiment::Base | Experiment::LowOutput)
    }

    /// Pre and post windows used to classify this experiment's outcome.
    pub fn comparison_windows(self) -> ((f64, f64), (f64, f64)) {
        let pre = if self.has_second_intervention() {
            (130.0, SECOND_INTERVENTION_TIME)
        } else {
            (40.0, UNIFICATION_TIME)
        };
        (pre, (280.0, HORIZON))
    }

    pub fn scenario(self) -> Scenario {
        let (params, guess) = if self.low_output_family() {
            (
                Parameters::low_output(),
                StockState::from_criminals(0.0, 110.0, 10.0, 0.0, 1.0, 0.1),
            )
        } else {
            (
                Parameters::base(),
                StockState::from_criminals(0.0, 110.0, 3.0, 0.0, 9.98, 0.28),
            )
        };
        let mut interventions = vec![Intervention::set_parameter(
            UNIFICATION_TIME,
            ParameterName::AuthorityControl,
            0.0,
        )];
        let t2 = SECOND_INTERVENTION_TIME;
        match self {
            Experiment::Base | Experiment::LowOutput => {}
            Experiment::ProductivityShock => interventions.push(Intervention::set_parameter(
                t2,
                ParameterName::MarginalProduct,
                10.0,
            )),
            Experiment::EliminateMafia => {
                interventions.push(Intervention::set_override(t2, OverrideName::DemandZero))
            }
            Experiment::NoBandits => interventions.push(Intervention::set_override(
                t2,
                OverrideName::PotentialBanditsZero,
            )),
            Experiment::StateControl => interventions.push(Intervention::set_parameter(
                t2,
                ParameterName::AuthorityControl,
                0.5,
            )),
        }
        Scenario::new(self.name(), params, Some(guess), interventions, HORIZON)
            .expect("built-in scenarios are valid")
    }

    /// Directional outcome reported for this experiment in the published summary table.
    pub fn published_outcome(self) -> OutcomeSigns {
        use Sign::{Minus as M, NoChange as N, Plus as P};
        let row = match self {
            Experiment::Base => [M, P, P, P, M],
            Experiment::LowOutput => [M, P, N, P, M],
            Experiment::ProductivityShock => [P, M, P, M, P],
            Experiment::EliminateMafia => [M, P, M, P, M],
            Experiment::NoBandits => [P, M, M, M, P],
            Experiment::StateControl => [P, M, M, M, P],
        };
        OutcomeSigns::from_row(row)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| ScenarioError::UnknownExperiment {
                name: s.to_string(),
                valid: Experiment::valid_names(),
            })
    }
}

pub fn builtin_experiment(name: &str) -> Result<Scenario, ScenarioError> {
    name.parse::<Experiment>().map(Experiment::scenario)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
    NoChange,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::NoChange => "n/c",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutcomeSigns {
    pub peasants: Sign,
    pub bandits: Sign,
    pub mafia: Sign,
    pub lawlessness: Sign,
    pub integrity: Sign,
}

impl OutcomeSigns {
    pub const LABELS: [&'static str; 5] = [
        "Peasants",
        "Bandits",
        "Mafia",
        "Lawlessness",
        "Economic integrity",
    ];

    fn from_row(row: [Sign; 5]) -> Self {
        OutcomeSigns {
            peasants: row[0],
            bandits: row[1],
            mafia: row[2],
            lawlessness: row[3],
            integrity: row[4],
        }
    }

    pub fn row(&self) -> [Sign; 5] {
        [
            self.peasants,
            self.bandits,
            self.mafia,
            self.lawlessness,
            self.integrity,
        ]
    }
}

impl fmt::Display for OutcomeSigns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.row().iter().map(Sign::to_string).collect();
        f.write_str(&cells.join(" "))
    }
}

/// Window means behind an [`OutcomeSigns`] value, in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDetail {
    pub signs: OutcomeSigns,
    pub pre_means: [f64; 5],
    pub post_means: [f64; 5],
}

/// Relative change below this pre-window mean switches to an absolute test.
const SMALL_MEAN: f64 = 0.01;
const ABSOLUTE_THRESHOLD: f64 = 0.005;

fn classify(pre: f64, post: f64, threshold: f64) -> Sign {
    let margin = if pre.abs() < SMALL_MEAN {
        ABSOLUTE_THRESHOLD
    } else {
        threshold * pre.abs()
    };
    if post - pre > margin {
        Sign::Plus
    } else if pre - post > margin {
        Sign::Minus
    } else {
        Sign::NoChange
    }
}

fn window_means(traj: &Trajectory, window: (f64, f64)) -> Result<[f64; 5], ScenarioError> {
    let mut sums = [0.0; 5];
    let mut count = 0usize;
    for s in traj.window(window.0, window.1) {
        let n = s.params.population;
        let values = [
            s.state.peasants / n,
            s.state.bandits / n,
            s.state.mafia / n,
            s.aux.lawlessness,
            s.aux.integrity,
        ];
        for (acc, v) in sums.iter_mut().zip(values) {
            *acc += v;
        }
        count += 1;
    }
    if count == 0 {
        return Err(ScenarioError::EmptyWindow(window.0, window.1));
    }
    Ok(sums.map(|s| s / count as f64))
}

/// Signs of the change in window means between `pre` and `post`.
///
/// Populations are compared as shares of `N`; lawlessness and integrity are
/// already shares.
pub fn classify_outcomes_detailed(
    traj: &Trajectory,
    pre: (f64, f64),
    post: (f64, f64),
    threshold: f64,
) -> Result<OutcomeDetail, ScenarioError> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(ScenarioError::Invalid(format!(
            "threshold {threshold} must be positive"
        )));
    }
    if pre.0 > pre.1 || post.0 > post.1 || pre.1 > post.0 {
        return Err(ScenarioError::Invalid(format!(
            "windows [{}, {}] and [{}, {}] are not ordered",
            pre.0, pre.1, post.0, post.1
        )));
    }
    let pre_means = window_means(traj, pre)?;
    let post_means = window_means(traj, post)?;
    let mut row = [Sign::NoChange; 5];
    for (i, sign) in row.iter_mut().enumerate() {
        *sign = classify(pre_means[i], post_means[i], threshold);
    }
    Ok(OutcomeDetail {
        signs: OutcomeSigns::from_row(row),
        pre_means,
        post_means,
    })
}

pub fn classify_outcomes(
    traj: &Trajectory,
    pre: (f64, f64),
    post: (f64, f64),
    threshold: f64,
) -> Result<OutcomeSigns, ScenarioError> {
    classify_outcomes_detailed(traj, pre, post, threshold).map(|d| d.signs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::Sample;
    use crate::model::AuxiliaryValues;

    #[test]
    fn builtin_interventions() {
        let base = builtin_experiment("base").unwrap();
        assert_eq!(
            base.interventions,
            vec![Intervention::set_parameter(
                60.0,
                ParameterName::AuthorityControl,
                0.0
            )]
        );
        assert_eq!(base.horizon, 300.0);

        let shock = builtin_experiment("productivity-shock").unwrap();
        assert_eq!(shock.initial_params.marginal_product, 1.0);
        assert_eq!(
            shock.interventions,
            vec![
                Intervention::set_parameter(60.0, ParameterName::AuthorityControl, 0.0),
                Intervention::set_parameter(150.0, ParameterName::MarginalProduct, 10.0),
            ]
        );

        let nb = builtin_experiment("no-bandits").unwrap();
        assert_eq!(
            nb.interventions[1],
            Intervention::set_override(150.0, OverrideName::PotentialBanditsZero)
        );
    }

    #[test]
    fn unknown_experiment_lists_names() {
        let err = builtin_experiment("nosuch").unwrap_err().to_string();
        for e in Experiment::ALL {
            assert!(err.contains(e.name()), "{err}");
        }
    }

    #[test]
    fn intervention_timing() {
        let base = Experiment::Base.scenario();
        let start = (base.initial_params, Overrides::default());
        assert_eq!(
            apply_interventions(&base, 59.875, start)
                .0
                .authority_control,
            0.9
        );
        assert_eq!(
            apply_interventions(&base, 60.0, start).0.authority_control,
            0.0
        );

        let elim = Experiment::EliminateMafia.scenario();
        let (p, o) = apply_interventions(&elim, 200.0, (elim.initial_params, Overrides::default()));
        assert_eq!(p.authority_control, 0.0);
        assert!(o.demand_zero);
        assert!(!o.potential_bandits_zero);
    }

    #[test]
    fn later_interventions_win() {
        let s = Scenario::new(
            "twice",
            Parameters::base(),
            None,
            vec![
                Intervention::set_parameter(20.0, ParameterName::AuthorityControl, 0.3),
                Intervention::set_parameter(10.0, ParameterName::AuthorityControl, 0.1),
            ],
            100.0,
        )
        .unwrap();
        let (p, _) = apply_interventions(&s, 50.0, (s.initial_params, Overrides::default()));
        assert_eq!(p.authority_control, 0.3);
    }

    #[test]
    fn invalid_scenarios() {
        let late = Scenario::new(
            "late",
            Parameters::base(),
            None,
            vec![Intervention::set_parameter(
                400.0,
                ParameterName::AuthorityControl,
                0.0,
            )],
            300.0,
        );
        assert!(late.is_err());
        let bad_value = Scenario::new(
            "bad",
            Parameters::base(),
            None,
            vec![Intervention::set_parameter(
                10.0,
                ParameterName::AuthorityControl,
                2.0,
            )],
            300.0,
        );
        assert!(bad_value.is_err());
        let population = Scenario::new(
            "grow",
            Parameters::base(),
            None,
            vec![Intervention::set_parameter(
                10.0,
                ParameterName::Population,
                200.0,
            )],
            300.0,
        );
        assert!(population.is_err());
    }

    fn flat(len: usize) -> Trajectory {
        let params = Parameters::base();
        let state = StockState::from_criminals(0.0, 110.0, 10.0, 2.0, 5.0, 1.0);
        let aux = AuxiliaryValues {
            lawlessness: 12.0 / 110.0,
            integrity: 0.8,
            ..Default::default()
        };
        Trajectory {
            samples: (0..len)
                .map(|i| Sample {
                    t: i as f64,
                    state: StockState {
                        t: i as f64,
                        ..state
                    },
                    aux,
                    params,
                    overrides: Overrides::default(),
                })
                .collect(),
            config: IntegrationConfig::default(),
            clamp_events: 0,
        }
    }

    #[test]
    fn constant_trajectory_has_no_change() {
        let signs = classify_outcomes(&flat(301), (40.0, 60.0), (280.0, 300.0), 0.01).unwrap();
        assert!(signs.row().iter().all(|s| *s == Sign::NoChange));
    }

    #[test]
    fn empty_window_is_an_error() {
        let r = classify_outcomes(&flat(100), (40.0, 60.0), (280.0, 300.0), 0.01);
        assert!(matches!(r, Err(ScenarioError::EmptyWindow(..))));
    }

    #[test]
    fn classification_rule() {
        assert_eq!(classify(0.5, 0.506, 0.01), Sign::Plus);
        assert_eq!(classify(0.5, 0.504, 0.01), Sign::NoChange);
        assert_eq!(classify(0.5, 0.49, 0.01), Sign::Minus);
        // Small pre mean falls back to the absolute margin.
        assert_eq!(classify(0.001, 0.0005, 0.01), Sign::NoChange);
        assert_eq!(classify(0.001, 0.03, 0.01), Sign::Plus);
    }

    #[test]
    fn file_round_trip() {
        for e in Experiment::ALL {
            let s = e.scenario();
            let text = s.to_toml();
            let back = Scenario::from_toml(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.to_toml(), text);
        }
    }

    #[test]
    fn file_parsing() {
        let text = r#"
name = "handmade"

[parameters]
a_P = 10
theta_B = 3
theta_M = 0.2
c_M = 10
lambda_A = 0.9
tbar_M = 0.2
tau = 10
tau_B = 3
tau_M = 5
N = 110

[[interventions]]
time = 150
target = "demand_zero"
value = true

[[interventions]]
time = 60
target = "lambda_A"
value = 0
"#;
        let s = Scenario::from_toml(text).unwrap();
        assert_eq!(s.name, "handmade");
        assert_eq!(s.horizon, HORIZON);
        assert_eq!(s.initial_params, Parameters::base());
        assert_eq!(s.interventions[0].time, 60.0);
        assert_eq!(
            s.interventions[1].action,
            Action::SetOverride(OverrideName::DemandZero, true)
        );

        let missing = text.replace("N = 110\n", "");
        assert!(Scenario::from_toml(&missing).is_err());
        let unknown = text.replace("\"lambda_A\"", "\"lambda_Q\"");
        assert!(Scenario::from_toml(&unknown).is_err());
        let typed = text.replace("value = true", "value = 1.0");
        assert!(Scenario::from_toml(&typed).is_err());
    }
}

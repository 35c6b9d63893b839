//! Fixed-step integration of the stock equations.

use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::SimulationError;
use crate::model::{
    derivatives_from, evaluate_auxiliaries, AuxiliaryValues, Overrides, Parameters,
    StateDerivative, StockState,
};
use crate::scenario::Intervention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Method {
    #[default]
    Euler,
    Rk4,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Euler => "euler",
            Method::Rk4 => "rk4",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SimulationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euler" | "explicit-euler" => Ok(Method::Euler),
            "rk4" | "classical-rk4" => Ok(Method::Rk4),
            other => Err(SimulationError::Config(format!(
                "unknown method `{other}` (expected euler or rk4)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    /// Step size in months.
    pub dt: f64,
    pub method: Method,
    /// Months between recorded samples; an integer multiple of `dt`.
    pub sample_interval: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            dt: 0.125,
            method: Method::Euler,
            sample_interval: 1.0,
        }
    }
}

impl IntegrationConfig {
    pub fn with_dt(dt: f64) -> Self {
        IntegrationConfig {
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimulationError::Config(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if !(self.sample_interval.is_finite() && self.sample_interval >= self.dt) {
            return Err(SimulationError::Config(format!(
                "sample interval {} must be at least dt = {}",
                self.sample_interval, self.dt
            )));
        }
        self.steps_for(self.sample_interval, "sample interval")?;
        Ok(())
    }

    /// Number of whole steps spanning `duration`, or an error if `dt` does not divide it.
    pub fn steps_for(&self, duration: f64, what: &str) -> Result<u64, SimulationError> {
        let steps = (duration / self.dt).round();
        if !steps.is_finite()
            || steps < 0.0
            || (steps * self.dt - duration).abs() > 1e-9 * duration.abs().max(1.0)
        {
            return Err(SimulationError::Config(format!(
                "{what} {duration} is not a multiple of dt = {}",
                self.dt
            )));
        }
        Ok(steps as u64)
    }
}

/// One recorded point of a [`Trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: StockState,
    pub aux: AuxiliaryValues,
    /// Parameters in effect when the sample was taken.
    pub params: Parameters,
    pub overrides: Overrides,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub config: IntegrationConfig,
    /// Steps where a stock had to be clamped back into its domain.
    pub clamp_events: usize,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples
            .last()
            .expect("trajectory has at least one sample")
    }

    /// Samples with `t0 <= t <= t1`.
    pub fn window(&self, t0: f64, t1: f64) -> impl Iterator<Item = &Sample> {
        self.samples
            .iter()
            .filter(move |s| s.t >= t0 - 1e-9 && s.t <= t1 + 1e-9)
    }

    pub fn at(&self, t: f64) -> Option<&Sample> {
        self.samples.iter().find(|s| (s.t - t).abs() < 1e-9)
    }
}

/// Result of one integration step before it is exposed as a plain state.
#[derive(Debug, Clone, Copy)]
struct Advance {
    state: StockState,
    clamped: bool,
}

fn checked_derivative(
    state: &StockState,
    params: &Parameters,
    overrides: Overrides,
) -> Result<StateDerivative, SimulationError> {
    let aux = evaluate_auxiliaries(state, params, overrides);
    if let Some(quantity) = aux.first_non_finite() {
        return Err(SimulationError::NonFinite {
            quantity,
            t: state.t,
        });
    }
    let d = derivatives_from(state, &aux, params);
    let named = [
        ("dB/dt", d.bandits),
        ("dM/dt", d.mafia),
        ("dihat_P/dt", d.perceived_peasant_income),
        ("dihat_B/dt", d.perceived_bandit_income),
    ];
    match named.into_iter().find(|(_, v)| !v.is_finite()) {
        Some((quantity, _)) => Err(SimulationError::NonFinite {
            quantity,
            t: state.t,
        }),
        None => Ok(d),
    }
}

/// Moves the independent stocks along `d` for `h` months without clamping.
fn displaced(state: &StockState, d: &StateDerivative, h: f64, population: f64) -> StockState {
    StockState::from_criminals(
        state.t + h,
        population,
        state.bandits + h * d.bandits,
        state.mafia + h * d.mafia,
        state.perceived_peasant_income + h * d.perceived_peasant_income,
        state.perceived_bandit_income + h * d.perceived_bandit_income,
    )
}

fn advance(
    state: &StockState,
    params: &Parameters,
    overrides: Overrides,
    dt: f64,
    method: Method,
) -> Result<Advance, SimulationError> {
    let n = params.population;
    let k1 = checked_derivative(state, params, overrides)?;
    let slope = match method {
        Method::Euler => k1,
        Method::Rk4 => {
            let k2 = checked_derivative(&displaced(state, &k1, dt / 2.0, n), params, overrides)?;
            let k3 = checked_derivative(&displaced(state, &k2, dt / 2.0, n), params, overrides)?;
            let k4 = checked_derivative(&displaced(state, &k3, dt, n), params, overrides)?;
            let avg = |a: f64, b: f64, c: f64, d: f64| (a + 2.0 * b + 2.0 * c + d) / 6.0;
            StateDerivative {
                bandits: avg(k1.bandits, k2.bandits, k3.bandits, k4.bandits),
                mafia: avg(k1.mafia, k2.mafia, k3.mafia, k4.mafia),
                perceived_peasant_income: avg(
                    k1.perceived_peasant_income,
                    k2.perceived_peasant_income,
                    k3.perceived_peasant_income,
                    k4.perceived_peasant_income,
                ),
                perceived_bandit_income: avg(
                    k1.perceived_bandit_income,
                    k2.perceived_bandit_income,
                    k3.perceived_bandit_income,
                    k4.perceived_bandit_income,
                ),
            }
        }
    };
    let raw = displaced(state, &slope, dt, n);

    let bandits = raw.bandits.clamp(0.0, n);
    let mafia = raw.mafia.clamp(0.0, n - bandits);
    let ihat_p = raw.perceived_peasant_income.max(0.0);
    let ihat_b = raw.perceived_bandit_income.max(0.0);
    let clamped = bandits != raw.bandits
        || mafia != raw.mafia
        || ihat_p != raw.perceived_peasant_income
        || ihat_b != raw.perceived_bandit_income;

    Ok(Advance {
        state: StockState::from_criminals(raw.t, n, bandits, mafia, ihat_p, ihat_b),
        clamped,
    })
}

/// Advances `state` by one step of size `dt`.
///
/// Bandits and mafia are clamped to `[0, N]`, perceived incomes to `>= 0`,
/// and peasants are reset to the residual `N - B - M`.
pub fn step(
    state: &StockState,
    params: &Parameters,
    overrides: Overrides,
    dt: f64,
    method: Method,
) -> Result<StockState, SimulationError> {
    advance(state, params, overrides, dt, method).map(|a| a.state)
}

/// Integrates from `initial` to `horizon`, applying `interventions` at the
/// start of the step that begins at their scheduled time.
pub fn simulate(
    initial: &StockState,
    params: &Parameters,
    interventions: &[Intervention],
    horizon: f64,
    config: &IntegrationConfig,
) -> Result<Trajectory, SimulationError> {
    config.validate()?;
    params.validate()?;
    initial.validate(params.population)?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(SimulationError::Config(format!(
            "horizon {horizon} must be positive"
        )));
    }
    let total_steps = config.steps_for(horizon, "horizon")?;
    let sample_every = config.steps_for(config.sample_interval, "sample interval")?;

    let mut schedule = Vec::with_capacity(interventions.len());
    for iv in interventions {
        if !(0.0..=horizon).contains(&iv.time) {
            return Err(SimulationError::Scenario(format!(
                "intervention at t = {} lies outside [0, {horizon}]",
                iv.time
            )));
        }
        schedule.push((config.steps_for(iv.time, "intervention time")?, iv));
    }
    // Stable sort keeps file order for interventions sharing a time.
    schedule.sort_by_key(|(k, _)| *k);

    let t0 = initial.t;
    let mut params = *params;
    let mut overrides = Overrides::default();
    let mut state = *initial;
    let mut pending = schedule.into_iter().peekable();
    let mut samples = Vec::with_capacity((total_steps / sample_every) as usize + 2);
    let mut clamp_events = 0;

    for k in 0..=total_steps {
        state.t = t0 + k as f64 * config.dt;
        while let Some((_, iv)) = pending.next_if(|(due, _)| *due <= k) {
            iv.action.apply(&mut params, &mut overrides);
        }
        if k % sample_every == 0 || k == total_steps {
            let aux = evaluate_auxiliaries(&state, &params, overrides);
            if let Some(quantity) = aux.first_non_finite() {
                return Err(SimulationError::NonFinite {
                    quantity,
                    t: state.t,
                });
            }
            samples.push(Sample {
                t: state.t,
                state,
                aux,
                params,
                overrides,
            });
        }
        if k == total_steps {
            break;
        }
        let next = advance(&state, &params, overrides, config.dt, config.method)?;
        if next.clamped {
            clamp_events += 1;
            warn!("stock clamped at t = {}", next.state.t);
        }
        state = next.state;
    }

    Ok(Trajectory {
        samples,
        config: *config,
        clamp_events,
    })
}

/// Earliest sample time after which the per-month relative change of every
/// population stock stays below `epsilon` until the end of the trajectory.
pub fn settling_time(traj: &Trajectory, epsilon: f64) -> Option<f64> {
    let samples = &traj.samples;
    if samples.is_empty() {
        return None;
    }
    let mut settled_from = samples.len() - 1;
    for k in (0..samples.len() - 1).rev() {
        let (a, b) = (&samples[k], &samples[k + 1]);
        let span = b.t - a.t;
        let rate = [
            (a.state.peasants, b.state.peasants),
            (a.state.bandits, b.state.bandits),
            (a.state.mafia, b.state.mafia),
        ]
        .into_iter()
        .map(|(x0, x1)| relative_change(x0, x1) / span)
        .fold(0.0, f64::max);
        if rate >= epsilon {
            break;
        }
        settled_from = k;
    }
    if settled_from == samples.len() - 1 && samples.len() > 1 {
        // The final interval itself is still moving.
        return None;
    }
    Some(samples[settled_from].t)
}

fn relative_change(from: f64, to: f64) -> f64 {
    if from == to {
        0.0
    } else if from == 0.0 {
        f64::INFINITY
    } else {
        ((to - from) / from).abs()
    }
}

//! Fixed points of the stock equations by relaxation.
//!
//! The solver simply integrates the model with constant parameters until all
//! residuals fall below the tolerance, so whatever it returns is an attractor
//! of the same dynamics the experiments run.

use std::fmt;

use crate::error::SimulationError;
use crate::integrator::{step, Method};
use crate::model::{derivatives_from, evaluate_auxiliaries, Overrides, Parameters, StockState};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_HORIZON: f64 = 5000.0;
const RELAXATION_DT: f64 = 0.125;

/// Absolute residuals of the stationarity conditions at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub d_bandits: f64,
    pub d_mafia: f64,
    pub d_perceived_peasant_income: f64,
    pub d_perceived_bandit_income: f64,
    /// `|B* - B|`
    pub recruitment_gap: f64,
    /// `|D_M - M|`
    pub demand_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualReport {
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("dB/dt", self.d_bandits),
            ("dM/dt", self.d_mafia),
            ("dihat_P/dt", self.d_perceived_peasant_income),
            ("dihat_B/dt", self.d_perceived_bandit_income),
            ("|B_star-B|", self.recruitment_gap),
            ("|D_M-M|", self.demand_gap),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, value) in self.named() {
            writeln!(f, "{name:<12} {value:.3e}")?;
        }
        write!(
            f,
            "tolerance    {:.3e}\nverdict      {}",
            self.tolerance,
            if self.passed { "pass" } else { "fail" }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointResult {
    pub state: StockState,
    pub residuals: ResidualReport,
    /// Simulated months spent relaxing.
    pub months: f64,
    pub converged: bool,
}

impl FixedPointResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.max()
    }
}

/// Residuals of `state` under constant `params` with no overrides.
pub fn verify_fixed_point(state: &StockState, params: &Parameters, tol: f64) -> ResidualReport {
    let aux = evaluate_auxiliaries(state, params, Overrides::default());
    let d = derivatives_from(state, &aux, params);
    let mut report = ResidualReport {
        d_bandits: d.bandits.abs(),
        d_mafia: d.mafia.abs(),
        d_perceived_peasant_income: d.perceived_peasant_income.abs(),
        d_perceived_bandit_income: d.perceived_bandit_income.abs(),
        recruitment_gap: (aux.potential_bandits - state.bandits).abs(),
        demand_gap: (aux.protection_demand - state.mafia).abs(),
        tolerance: tol,
        passed: false,
    };
    // NaN residuals never pass.
    report.passed = report.named().iter().all(|(_, v)| *v < tol);
    report
}

/// Relaxes `guess` under constant `params` until every residual of
/// [`verify_fixed_point`] is below `tol` or `max_horizon` months elapse.
pub fn find_fixed_point(
    params: &Parameters,
    guess: &StockState,
    tol: f64,
    max_horizon: f64,
) -> Result<FixedPointResult, SimulationError> {
    params.validate()?;
    guess.validate(params.population)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(SimulationError::Config(format!(
            "tolerance {tol} must be positive"
        )));
    }

    let mut state = StockState { t: 0.0, ..*guess };
    let max_steps = (max_horizon / RELAXATION_DT).ceil().max(0.0) as u64;
    let mut steps = 0u64;
    loop {
        let residuals = verify_fixed_point(&state, params, tol);
        if residuals.passed || steps >= max_steps {
            let months = steps as f64 * RELAXATION_DT;
            state.t = 0.0;
            return Ok(FixedPointResult {
                state,
                residuals,
                months,
                converged: residuals.passed,
            });
        }
        state = step(
            &state,
            params,
            Overrides::default(),
            RELAXATION_DT,
            Method::Euler,
        )?;
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_state() -> StockState {
        StockState::from_criminals(0.0, 110.0, 3.0, 0.0, 9.98, 0.28)
    }

    #[test]
    fn base_fixed_point_converges() {
        let params = Parameters::base();
        let fp = find_fixed_point(&params, &table_state(), 1e-8, 5000.0).unwrap();
        assert!(fp.converged, "{}", fp.residuals);
        let report = verify_fixed_point(&fp.state, &params, 1e-8);
        assert!(report.passed);
        let aux = evaluate_auxiliaries(&fp.state, &params, Overrides::default());
        assert!((aux.potential_bandits - fp.state.bandits).abs() < 1e-8);
        assert!((aux.income_per_peasant - fp.state.perceived_peasant_income).abs() < 1e-7);
        assert!(fp.state.validate(110.0).is_ok());
    }

    #[test]
    fn idempotent_from_own_result() {
        let params = Parameters::low_output();
        let guess = StockState::from_criminals(0.0, 110.0, 10.0, 0.0, 1.0, 0.1);
        let first = find_fixed_point(&params, &guess, 1e-8, 5000.0).unwrap();
        assert!(first.converged);
        let second = find_fixed_point(&params, &first.state, 1e-8, 5000.0).unwrap();
        assert!(second.converged);
        assert_eq!(second.months, 0.0);
        assert_eq!(second.state, first.state);
    }

    #[test]
    fn negligible_theft_empties_crime() {
        let params = Parameters {
            bandit_technology: 1e-9,
            ..Parameters::base()
        };
        let fp = find_fixed_point(&params, &table_state(), 1e-8, 5000.0).unwrap();
        assert!(fp.converged);
        assert!(fp.state.bandits < 1e-6, "{:?}", fp.state);
        assert!(fp.state.mafia < 1e-6);
        assert!((fp.state.peasants - 110.0).abs() < 1e-6);
    }

    #[test]
    fn table_state_is_not_a_fixed_point() {
        let report = verify_fixed_point(&table_state(), &Parameters::base(), 1e-3);
        assert!(!report.passed);
        // i_B at the table state is about 2.767 against a perceived 0.28.
        assert!((report.d_perceived_bandit_income - (2.76724 - 0.28) / 10.0).abs() < 1e-4);
    }

    #[test]
    fn vacuous_tolerance_passes() {
        assert!(verify_fixed_point(&table_state(), &Parameters::base(), 1e12).passed);
    }

    #[test]
    fn short_horizon_reports_non_convergence() {
        let fp = find_fixed_point(&Parameters::base(), &table_state(), 1e-8, 1.0).unwrap();
        assert!(!fp.converged);
        assert_eq!(fp.months, 1.0);
    }

    #[test]
    fn rejects_invalid_guess() {
        let bad = StockState::from_criminals(0.0, 100.0, 3.0, 0.0, 1.0, 1.0);
        assert!(find_fixed_point(&Parameters::base(), &bad, 1e-8, 10.0).is_err());
    }
}

//! Continuous-time model of a peasant economy preyed on by bandits and
//! policed by a protection-selling mafia.
//!
//! * [`model`]: the algebraic layer and stock derivatives.
//! * [`integrator`]: fixed-step Euler / RK4 integration into trajectories.
//! * [`equilibrium`]: fixed points by relaxation.
//! * [`scenario`]: timed interventions, the six built-in experiments and
//!   directional outcome classification.
//! * [`loops`]: the signed causal graph and feedback-loop enumeration.

pub mod equilibrium;
pub mod error;
pub mod integrator;
pub mod loops;
pub mod model;
pub mod scenario;

pub use equilibrium::{find_fixed_point, verify_fixed_point, FixedPointResult, ResidualReport};
pub use error::{ModelError, ScenarioError, SimulationError};
pub use integrator::{
    settling_time, simulate, step, IntegrationConfig, Method, Sample, Trajectory,
};
pub use model::{
    derivatives, evaluate_auxiliaries, AuxiliaryValues, OverrideName, Overrides, ParameterName,
    Parameters, StateDerivative, StockState,
};
pub use scenario::{
    apply_interventions, builtin_experiment, classify_outcomes, Experiment, Intervention,
    OutcomeSigns, Scenario, Sign,
};

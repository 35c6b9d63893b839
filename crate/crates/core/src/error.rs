use thiserror::Error;

/// Invalid inputs to the model layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter {name} = {value} is outside its domain")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("unknown override `{0}` (expected demand_zero or potential_bandits_zero)")]
    UnknownOverride(String),
    #[error("stock {name} = {value} must be finite and non-negative")]
    InvalidState { name: &'static str, value: f64 },
    #[error("P + B + M = {total} does not match population N = {population}")]
    Conservation { total: f64, population: f64 },
}

/// Failures while advancing or configuring a simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("non-finite value of {quantity} at t = {t}")]
    NonFinite { quantity: &'static str, t: f64 },
    #[error("invalid integration config: {0}")]
    Config(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
}

/// Errors raised while building, reading or classifying scenarios.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown experiment `{name}`; valid names: {valid}")]
    UnknownExperiment { name: String, valid: String },
    #[error("scenario file: {0}")]
    Parse(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Invalid(String),
    #[error("window [{0}, {1}] contains no samples")]
    EmptyWindow(f64, f64),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
}

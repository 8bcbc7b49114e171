use alloc::string::String;
use alloc::vec::Vec;

use crate::model::SteadyState;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("`{name}` must be a positive finite rate, got {value}")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("`{name}` is invalid: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("steady-state iteration did not converge after {iterations} iterations (residual {residual:e}); the pump may be in a bistable regime")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("steady-state equations have {} distinct branches", branches.len())]
    NonUniqueSteadyState { branches: Vec<SteadyState> },

    #[error("cavity matrix (gamma_1 + i Delta'_1)(gamma_2 + i Delta'_2) + J^2 is singular")]
    SingularCavityMatrix,

    #[error("linear response system is singular (operating point at an instability)")]
    SingularSystem,

    #[error("precondition violated: {0}")]
    PreconditionViolation(&'static str),

    #[error("gamma_1 equals gamma_m: the critical drive is unbounded")]
    DegenerateRates,

    #[error("fluctuation dynamics are not stable (margin {margin:e})")]
    UnstableSystem { margin: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSpec(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

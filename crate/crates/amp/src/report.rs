//! JSON reports for the single-point subcommands.

use optomech_core::dynamics::{is_stable, StabilityReport};
use optomech_core::model::{
    reduce, reduced_from_direct, rwa_warnings, solve_pump_steady_state, steady_state_residual,
    ReducedParams,
};
use optomech_core::response::{transmission_general, TransmissionMethod};
use optomech_core::C64;
use serde::{Deserialize, Serialize};

use crate::config::{Parameters, RunConfig};
use crate::{CliError, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

impl Complex {
    fn scaled(z: C64, scale: f64) -> Self {
        (z * scale).into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub stable: bool,
    pub marginal: bool,
    /// Scaled by `unit_scale`.
    pub margin: f64,
    pub eigenvalues: Vec<Complex>,
}

impl StabilitySummary {
    fn new(report: &StabilityReport, scale: f64) -> Self {
        StabilitySummary {
            stable: report.stable,
            marginal: report.marginal,
            margin: report.margin * scale,
            eigenvalues: report
                .eigenvalues
                .iter()
                .map(|&l| Complex::scaled(l, scale))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmitReport {
    pub version: String,
    pub t21: Complex,
    pub t12: Complex,
    #[serde(rename = "T21")]
    pub t21_prob: f64,
    #[serde(rename = "T12")]
    pub t12_prob: f64,
    pub isolation_db: f64,
    pub method: String,
    pub stability: StabilitySummary,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyReport {
    pub version: String,
    pub a1: Complex,
    pub a2: Complex,
    pub b: Complex,
    /// Effective detunings, scaled by `unit_scale`.
    #[serde(rename = "Delta_prime_1")]
    pub delta_1_prime: f64,
    #[serde(rename = "Delta_prime_2")]
    pub delta_2_prime: f64,
    /// Enhanced couplings `g_i <a_i>`, scaled by `unit_scale`.
    #[serde(rename = "G_1")]
    pub coupling_1: Complex,
    #[serde(rename = "G_2")]
    pub coupling_2: Complex,
    pub iterations: usize,
    pub residual: f64,
    /// Residual of the steady-state equations themselves.
    pub equation_residual: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOutput {
    pub version: String,
    #[serde(flatten)]
    pub stability: StabilitySummary,
    pub warnings: Vec<String>,
}

fn method_name(m: TransmissionMethod) -> &'static str {
    match m {
        TransmissionMethod::DirectSolve => "direct-solve",
        TransmissionMethod::ClosedForm => "closed-form",
        TransmissionMethod::Simplified => "simplified",
        TransmissionMethod::SpecialPoint => "special-point",
    }
}

/// Reduced parameters for a config, plus any RWA warnings raised on the way.
pub fn resolve(cfg: &RunConfig) -> Result<(ReducedParams, Vec<String>), CliError> {
    match cfg.parameters()? {
        Parameters::Direct(p) => Ok((reduced_from_direct(&p)?, Vec::new())),
        Parameters::Pipeline {
            system,
            drive,
            solver,
        } => {
            let ss = solve_pump_steady_state(&system, &drive, &solver)?;
            let warnings = rwa_warnings(&system, &drive, &ss)
                .iter()
                .map(ToString::to_string)
                .collect();
            Ok((reduce(&system, &drive, &ss)?, warnings))
        }
    }
}

pub fn transmit(cfg: &RunConfig) -> Result<TransmitReport, CliError> {
    let (rp, warnings) = resolve(cfg)?;
    let tr = transmission_general(&rp)?;
    Ok(TransmitReport {
        version: VERSION.into(),
        t21: tr.t21.into(),
        t12: tr.t12.into(),
        t21_prob: tr.t21_prob,
        t12_prob: tr.t12_prob,
        isolation_db: tr.isolation_db,
        method: method_name(tr.method).into(),
        stability: StabilitySummary::new(&is_stable(&rp), cfg.unit_scale),
        warnings,
    })
}

pub fn stability(cfg: &RunConfig) -> Result<StabilityOutput, CliError> {
    let (rp, warnings) = resolve(cfg)?;
    Ok(StabilityOutput {
        version: VERSION.into(),
        stability: StabilitySummary::new(&is_stable(&rp), cfg.unit_scale),
        warnings,
    })
}

pub fn steady(cfg: &RunConfig) -> Result<SteadyReport, CliError> {
    let Parameters::Pipeline {
        system,
        drive,
        solver,
    } = cfg.parameters()?
    else {
        return Err(CliError::Config(
            "`steady` needs mode = \"full-pipeline\"".into(),
        ));
    };
    let ss = solve_pump_steady_state(&system, &drive, &solver)?;
    let scale = cfg.unit_scale;
    Ok(SteadyReport {
        version: VERSION.into(),
        a1: ss.a1_avg.into(),
        a2: ss.a2_avg.into(),
        b: ss.b_avg.into(),
        delta_1_prime: ss.delta_1_prime * scale,
        delta_2_prime: ss.delta_2_prime * scale,
        coupling_1: Complex::scaled(ss.a1_avg * system.g_1, scale),
        coupling_2: Complex::scaled(ss.a2_avg * system.g_2, scale),
        iterations: ss.iterations,
        residual: ss.residual,
        equation_residual: steady_state_residual(&system, &drive, &ss),
        warnings: rwa_warnings(&system, &drive, &ss)
            .iter()
            .map(ToString::to_string)
            .collect(),
    })
}

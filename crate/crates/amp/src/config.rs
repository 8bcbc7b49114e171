//! Run configuration: a TOML file whose keys are the physical symbols.
//!
//! ```toml
//! mode = "direct-reduced"
//!
//! [reduced]
//! G = 1.0
//! theta = "pi/2"
//! J = 1.0
//! gamma_1 = 1.1
//! gamma_2 = 1.5
//! y = 20
//! phi = "pi/2"
//!
//! [sweep]
//! link_detunings = true
//! axes = [{ param = "Delta_m", start = -5, stop = 5, count = 401 }]
//!
//! [output]
//! format = "csv"
//! path = "fig2c.csv"
//! ```
//!
//! Angles accept plain numbers or strings such as `"pi/2"`, `"3pi/2"`,
//! `"-0.25*pi"`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use optomech_core::model::{DirectParams, DriveConfig, Port, SolverOptions, SystemParams};
use optomech_core::sweep::{Axis, AxisParam, Output, SweepBase, SweepSpec, DEFAULT_POINTS};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::CliError;

/// Parses `"pi"`, `"-pi/4"`, `"3pi/2"`, `"0.5*pi"` or a plain number.
pub fn parse_angle(text: &str) -> Option<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(at) = s.find("pi") else {
        return s.parse().ok();
    };
    let (coef, rest) = (&s[..at], &s[at + 2..]);
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let denom = match rest {
        "" => 1.0,
        r => r.strip_prefix('/')?.parse::<f64>().ok()?,
    };
    let v = coef * std::f64::consts::PI / denom;
    v.is_finite().then_some(v)
}

/// A real number that may be written as a multiple of pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an expression like \"pi/2\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v)
                    .map(Angle)
                    .ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }

        deserializer.deserialize_any(AngleVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Mode {
    #[serde(rename = "direct-reduced")]
    DirectReduced,
    #[serde(rename = "full-pipeline")]
    FullPipeline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

fn one() -> f64 {
    1.0
}

fn zero_angle() -> Angle {
    Angle(0.0)
}

fn port_one() -> u8 {
    1
}

fn default_count() -> usize {
    DEFAULT_POINTS
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedBlock {
    #[serde(rename = "G")]
    pub g: f64,
    pub theta: Angle,
    #[serde(rename = "J")]
    pub j: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    #[serde(default = "one")]
    pub gamma_m: f64,
    #[serde(default = "one")]
    pub eta_1: f64,
    #[serde(default = "one")]
    pub eta_2: f64,
    #[serde(rename = "Delta_m", default)]
    pub delta_m: f64,
    #[serde(rename = "Delta_pp_1", default)]
    pub delta_pp_1: f64,
    #[serde(rename = "Delta_pp_2", default)]
    pub delta_pp_2: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default = "zero_angle")]
    pub phi: Angle,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_m: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    #[serde(default = "one")]
    pub gamma_m: f64,
    pub g_1: f64,
    pub g_2: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(default = "one")]
    pub eta_1: f64,
    #[serde(default = "one")]
    pub eta_2: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveBlock {
    #[serde(default)]
    pub omega_d: f64,
    pub eps_1: f64,
    pub eps_2: f64,
    #[serde(default = "zero_angle")]
    pub theta_1: Angle,
    #[serde(default = "zero_angle")]
    pub theta_2: Angle,
    #[serde(default = "port_one")]
    pub probe_port: u8,
    pub omega_p: f64,
    #[serde(default = "one")]
    pub eps_p: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default = "zero_angle")]
    pub phi: Angle,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: f64,
    pub check_branches: bool,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverOptions::default();
        SolverBlock {
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            damping: d.damping,
            check_branches: d.check_branches,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBlock {
    pub param: String,
    pub start: Angle,
    pub stop: Angle,
    #[serde(default = "default_count")]
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axes: Vec<AxisBlock>,
    #[serde(default)]
    pub link_detunings: bool,
    #[serde(default)]
    pub outputs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
    pub plot_script: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Multiplies frequency-valued outputs; inputs are in units of `gamma_m`.
    #[serde(default = "one")]
    pub unit_scale: f64,
    pub reduced: Option<ReducedBlock>,
    pub system: Option<SystemBlock>,
    pub drive: Option<DriveBlock>,
    #[serde(default)]
    pub solver: SolverBlock,
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

/// Parameters resolved for one of the two modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Parameters {
    Direct(DirectParams),
    Pipeline {
        system: SystemParams,
        drive: DriveConfig,
        solver: SolverOptions,
    },
}

impl FromStr for RunConfig {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check_blocks()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        text.parse().map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn check_blocks(&self) -> Result<(), CliError> {
        if !(self.unit_scale.is_finite() && self.unit_scale > 0.0) {
            return Err(CliError::Config(format!(
                "`unit_scale` must be positive, got {}",
                self.unit_scale
            )));
        }
        match self.mode {
            Mode::DirectReduced => {
                if self.reduced.is_none() {
                    return Err(CliError::Config(
                        "mode `direct-reduced` needs a [reduced] block".into(),
                    ));
                }
                if self.system.is_some() || self.drive.is_some() {
                    return Err(CliError::Config(
                        "mode `direct-reduced` takes no [system]/[drive] block".into(),
                    ));
                }
            }
            Mode::FullPipeline => {
                if self.system.is_none() || self.drive.is_none() {
                    return Err(CliError::Config(
                        "mode `full-pipeline` needs [system] and [drive] blocks".into(),
                    ));
                }
                if self.reduced.is_some() {
                    return Err(CliError::Config(
                        "mode `full-pipeline` takes no [reduced] block".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Resolved physical parameters, validated.
    pub fn parameters(&self) -> Result<Parameters, CliError> {
        let params = match self.mode {
            Mode::DirectReduced => {
                let r = self.reduced.as_ref().expect("checked at parse time");
                let p = DirectParams {
                    g: r.g,
                    theta: r.theta.0,
                    j: r.j,
                    gamma_1: r.gamma_1,
                    gamma_2: r.gamma_2,
                    gamma_m: r.gamma_m,
                    eta_1: r.eta_1,
                    eta_2: r.eta_2,
                    delta_m: r.delta_m,
                    delta_pp_1: r.delta_pp_1,
                    delta_pp_2: r.delta_pp_2,
                    y: r.y,
                    phi: r.phi.0,
                };
                optomech_core::model::reduced_from_direct(&p).map_err(config_error)?;
                Parameters::Direct(p)
            }
            Mode::FullPipeline => {
                let s = self.system.as_ref().expect("checked at parse time");
                let d = self.drive.as_ref().expect("checked at parse time");
                let probe_port = match d.probe_port {
                    1 => Port::Port1,
                    2 => Port::Port2,
                    other => {
                        return Err(CliError::Config(format!(
                            "`probe_port` must be 1 or 2, got {other}"
                        )))
                    }
                };
                let system = SystemParams {
                    omega_1: s.omega_1,
                    omega_2: s.omega_2,
                    omega_m: s.omega_m,
                    gamma_1: s.gamma_1,
                    gamma_2: s.gamma_2,
                    gamma_m: s.gamma_m,
                    g_1: s.g_1,
                    g_2: s.g_2,
                    j: s.j,
                    eta_1: s.eta_1,
                    eta_2: s.eta_2,
                };
                let drive = DriveConfig {
                    omega_d: d.omega_d,
                    eps_1: d.eps_1,
                    eps_2: d.eps_2,
                    theta_1: d.theta_1.0,
                    theta_2: d.theta_2.0,
                    probe_port,
                    omega_p: d.omega_p,
                    eps_p: d.eps_p,
                    y: d.y,
                    phi: d.phi.0,
                };
                let solver = SolverOptions {
                    tolerance: self.solver.tolerance,
                    max_iterations: self.solver.max_iterations,
                    damping: self.solver.damping,
                    check_branches: self.solver.check_branches,
                };
                system.validate().map_err(config_error)?;
                drive.validate().map_err(config_error)?;
                solver.validate().map_err(config_error)?;
                Parameters::Pipeline {
                    system,
                    drive,
                    solver,
                }
            }
        };
        Ok(params)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let block = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [sweep] block".into()))?;
        let base = match self.parameters()? {
            Parameters::Direct(p) => SweepBase::Direct(p),
            Parameters::Pipeline {
                system,
                drive,
                solver,
            } => SweepBase::Pipeline {
                system,
                drive,
                solver,
            },
        };
        let axes = block
            .axes
            .iter()
            .map(|a| {
                let param: AxisParam = a.param.parse().map_err(config_error)?;
                Ok(Axis::new(param, a.start.0, a.stop.0, a.count))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let outputs = match &block.outputs {
            None => Output::defaults(),
            Some(names) => names
                .iter()
                .map(|n| n.parse::<Output>().map_err(config_error))
                .collect::<Result<Vec<_>, _>>()?,
        };
        let spec = SweepSpec {
            base,
            axes,
            link_detunings: block.link_detunings,
            outputs,
        };
        spec.validate().map_err(config_error)?;
        Ok(spec)
    }
}

fn config_error(err: optomech_core::Error) -> CliError {
    CliError::Config(err.to_string())
}

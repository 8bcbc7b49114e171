//! Transmission over one- and two-dimensional parameter grids, and the
//! named presets for the standard figure sweeps (`fig2a` .. `fig4`).
//!
//! Rows are ordered row-major over the axes (first axis slowest). Every row
//! is a pure function of the spec and its index, so rows can be evaluated in
//! any order or in parallel and reassembled with [`assemble`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;
use core::str::FromStr;

use crate::dynamics::is_stable;
use crate::model::{
    reduce, reduced_from_direct, solve_pump_steady_state, DirectParams, DriveConfig, ReducedParams,
    SolverOptions, SystemParams,
};
use crate::response::transmission_general;
use crate::{Error, Result};

/// Grid density of the figure presets.
pub const DEFAULT_POINTS: usize = 401;

/// Value written into every output column of a flagged row.
pub const SENTINEL: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisParam {
    DeltaM,
    Theta,
    Phi,
    Y,
    G,
    J,
    Gamma1,
    Gamma2,
}

impl AxisParam {
    pub const ALL: [AxisParam; 8] = [
        AxisParam::DeltaM,
        AxisParam::Theta,
        AxisParam::Phi,
        AxisParam::Y,
        AxisParam::G,
        AxisParam::J,
        AxisParam::Gamma1,
        AxisParam::Gamma2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxisParam::DeltaM => "Delta_m",
            AxisParam::Theta => "theta",
            AxisParam::Phi => "phi",
            AxisParam::Y => "y",
            AxisParam::G => "G",
            AxisParam::J => "J",
            AxisParam::Gamma1 => "gamma_1",
            AxisParam::Gamma2 => "gamma_2",
        }
    }

    /// Whether the parameter carries the frequency unit (as opposed to a
    /// phase or a dimensionless ratio).
    pub fn is_frequency(self) -> bool {
        !matches!(self, AxisParam::Theta | AxisParam::Phi | AxisParam::Y)
    }
}

impl fmt::Display for AxisParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxisParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxisParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown axis parameter `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: AxisParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: AxisParam, start: f64, stop: f64, count: usize) -> Axis {
        Axis {
            param,
            start,
            stop,
            count,
        }
    }

    /// Evenly spaced grid value; the endpoints are hit exactly.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.stop
        } else {
            self.start + (self.stop - self.start) * (i as f64) / ((self.count - 1) as f64)
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepBase {
    /// Figure-level parameters, `G_1 = G`, `G_2 = G e^{i theta}`.
    Direct(DirectParams),
    /// Physical parameters; every point solves the pump steady state first.
    Pipeline {
        system: SystemParams,
        drive: DriveConfig,
        solver: SolverOptions,
    },
}

/// Quantities a sweep can tabulate. Columns appear in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    T21,
    T12,
    /// Complex `t21`, two columns.
    T21Complex,
    T12Complex,
    IsolationDb,
    Stable,
}

impl Output {
    pub const ALL: [Output; 6] = [
        Output::T21,
        Output::T12,
        Output::T21Complex,
        Output::T12Complex,
        Output::IsolationDb,
        Output::Stable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::T21 => "T21",
            Output::T12 => "T12",
            Output::T21Complex => "t21",
            Output::T12Complex => "t12",
            Output::IsolationDb => "isolation_db",
            Output::Stable => "stable",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Output::T21 => &["T21"],
            Output::T12 => &["T12"],
            Output::T21Complex => &["t21_re", "t21_im"],
            Output::T12Complex => &["t12_re", "t12_im"],
            Output::IsolationDb => &["isolation_db"],
            Output::Stable => &["stable"],
        }
    }

    pub fn defaults() -> Vec<Output> {
        Vec::from([Output::T21, Output::T12, Output::IsolationDb])
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown output `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SweepBase,
    pub axes: Vec<Axis>,
    /// Tie `Delta''_1 = Delta''_2 = Delta_m` on a `Delta_m` axis (direct mode only).
    pub link_detunings: bool,
    pub outputs: Vec<Output>,
}

/// Per-row status. Flagged rows carry [`SENTINEL`] in every output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PointFlag {
    Ok = 0,
    Singular = 1,
    NonConvergent = 2,
    Multistable = 3,
    Invalid = 4,
}

impl PointFlag {
    pub fn code(self) -> u8 {
        self as u8
    }

    fn from_error(err: &Error) -> PointFlag {
        match err {
            Error::SingularSystem | Error::SingularCavityMatrix => PointFlag::Singular,
            Error::NonConvergence { .. } => PointFlag::NonConvergent,
            Error::NonUniqueSteadyState { .. } => PointFlag::Multistable,
            _ => PointFlag::Invalid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    pub flag: PointFlag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    pub grids: Vec<Vec<f64>>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
    /// Base parameters of the sweep, keyed by configuration name.
    pub metadata: Vec<(&'static str, f64)>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

enum PointParams {
    Direct(DirectParams),
    Pipeline(SystemParams, DriveConfig, SolverOptions),
}

impl SweepSpec {
    /// Checks axis shape and that every grid point yields valid parameters.
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(invalid(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(invalid(format!(
                "axis `{}` given twice",
                self.axes[0].param
            )));
        }
        for axis in &self.axes {
            if axis.count < 2 {
                return Err(invalid(format!(
                    "axis `{}` needs count >= 2, got {}",
                    axis.param, axis.count
                )));
            }
            if !axis.start.is_finite() || !axis.stop.is_finite() {
                return Err(invalid(format!(
                    "axis `{}` has a non-finite bound",
                    axis.param
                )));
            }
            if axis.start == axis.stop {
                return Err(invalid(format!("axis `{}` has start == stop", axis.param)));
            }
            if let SweepBase::Pipeline { .. } = self.base {
                if matches!(axis.param, AxisParam::G | AxisParam::Theta) {
                    return Err(invalid(format!(
                        "axis `{}` is derived from the pump in full-pipeline mode",
                        axis.param
                    )));
                }
            }
        }
        if self.outputs.is_empty() {
            return Err(invalid("no outputs requested"));
        }
        match &self.base {
            SweepBase::Direct(p) => {
                reduced_from_direct(p).map_err(|e| invalid(e.to_string()))?;
            }
            SweepBase::Pipeline {
                system,
                drive,
                solver,
            } => {
                system.validate().map_err(|e| invalid(e.to_string()))?;
                drive.validate().map_err(|e| invalid(e.to_string()))?;
                solver.validate().map_err(|e| invalid(e.to_string()))?;
            }
        }
        // grid values are monotone between the endpoints, so the corners suffice
        let corners: &[[usize; 2]] = if self.axes.len() == 1 {
            &[[0, 0], [1, 0]]
        } else {
            &[[0, 0], [0, 1], [1, 0], [1, 1]]
        };
        for corner in corners {
            let coords: Vec<f64> = self
                .axes
                .iter()
                .zip(corner)
                .map(|(a, &end)| if end == 0 { a.start } else { a.stop })
                .collect();
            let check = match self.params_at(&coords) {
                PointParams::Direct(p) => reduced_from_direct(&p).map(|_| ()),
                PointParams::Pipeline(s, d, _) => s.validate().and_then(|_| d.validate()),
            };
            check.map_err(|e| invalid(format!("grid leaves the valid domain: {e}")))?;
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Axis values of row `index`.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut coords = Vec::with_capacity(self.axes.len());
        for (k, axis) in self.axes.iter().enumerate() {
            let stride: usize = self.axes[k + 1..].iter().map(|a| a.count).product();
            coords.push(axis.value(rest / stride));
            rest %= stride;
        }
        coords
    }

    /// Column names after the axis columns, in output order.
    pub fn columns(&self) -> Vec<&'static str> {
        self.sorted_outputs()
            .into_iter()
            .flat_map(|o| o.columns().iter().copied())
            .collect()
    }

    fn sorted_outputs(&self) -> Vec<Output> {
        let mut outs = self.outputs.clone();
        outs.sort();
        outs.dedup();
        outs
    }

    fn params_at(&self, coords: &[f64]) -> PointParams {
        match &self.base {
            SweepBase::Direct(base) => {
                let mut p = *base;
                for (axis, &v) in self.axes.iter().zip(coords) {
                    match axis.param {
                        AxisParam::DeltaM => {
                            p.delta_m = v;
                            if self.link_detunings {
                                p.delta_pp_1 = v;
                                p.delta_pp_2 = v;
                            }
                        }
                        AxisParam::Theta => p.theta = v,
                        AxisParam::Phi => p.phi = v,
                        AxisParam::Y => p.y = v,
                        AxisParam::G => p.g = v,
                        AxisParam::J => p.j = v,
                        AxisParam::Gamma1 => p.gamma_1 = v,
                        AxisParam::Gamma2 => p.gamma_2 = v,
                    }
                }
                PointParams::Direct(p)
            }
            SweepBase::Pipeline {
                system,
                drive,
                solver,
            } => {
                let (mut s, mut d) = (*system, *drive);
                for (axis, &v) in self.axes.iter().zip(coords) {
                    match axis.param {
                        AxisParam::DeltaM => d.omega_p = d.omega_d + s.omega_m - v,
                        AxisParam::Phi => d.phi = v,
                        AxisParam::Y => d.y = v,
                        AxisParam::J => s.j = v,
                        AxisParam::Gamma1 => s.gamma_1 = v,
                        AxisParam::Gamma2 => s.gamma_2 = v,
                        // rejected by validate()
                        AxisParam::G | AxisParam::Theta => {}
                    }
                }
                PointParams::Pipeline(s, d, *solver)
            }
        }
    }

    pub fn metadata(&self) -> Vec<(&'static str, f64)> {
        match &self.base {
            SweepBase::Direct(p) => Vec::from([
                ("G", p.g),
                ("theta", p.theta),
                ("J", p.j),
                ("gamma_1", p.gamma_1),
                ("gamma_2", p.gamma_2),
                ("gamma_m", p.gamma_m),
                ("eta_1", p.eta_1),
                ("eta_2", p.eta_2),
                ("Delta_m", p.delta_m),
                ("Delta_pp_1", p.delta_pp_1),
                ("Delta_pp_2", p.delta_pp_2),
                ("y", p.y),
                ("phi", p.phi),
                (
                    "link_detunings",
                    if self.link_detunings { 1.0 } else { 0.0 },
                ),
            ]),
            SweepBase::Pipeline { system, drive, .. } => Vec::from([
                ("omega_1", system.omega_1),
                ("omega_2", system.omega_2),
                ("omega_m", system.omega_m),
                ("gamma_1", system.gamma_1),
                ("gamma_2", system.gamma_2),
                ("gamma_m", system.gamma_m),
                ("g_1", system.g_1),
                ("g_2", system.g_2),
                ("J", system.j),
                ("eta_1", system.eta_1),
                ("eta_2", system.eta_2),
                ("omega_d", drive.omega_d),
                ("eps_1", drive.eps_1),
                ("eps_2", drive.eps_2),
                ("theta_1", drive.theta_1),
                ("theta_2", drive.theta_2),
                ("probe_port", f64::from(drive.probe_port.number())),
                ("omega_p", drive.omega_p),
                ("eps_p", drive.eps_p),
                ("y", drive.y),
                ("phi", drive.phi),
            ]),
        }
    }
}

fn reduced_at(params: &PointParams) -> Result<ReducedParams> {
    match params {
        PointParams::Direct(p) => reduced_from_direct(p),
        PointParams::Pipeline(s, d, opts) => {
            let ss = solve_pump_steady_state(s, d, opts)?;
            reduce(s, d, &ss)
        }
    }
}

/// Evaluates row `index` of a validated spec.
pub fn evaluate_point(spec: &SweepSpec, index: usize) -> SweepRow {
    let coords = spec.coordinates(index);
    let outputs = spec.sorted_outputs();
    let width: usize = outputs.iter().map(|o| o.columns().len()).sum();

    let evaluated = reduced_at(&spec.params_at(&coords))
        .and_then(|rp| transmission_general(&rp).map(|tr| (rp, tr)));
    let (rp, tr) = match evaluated {
        Ok(ok) => ok,
        Err(err) => {
            return SweepRow {
                coords,
                values: alloc::vec![SENTINEL; width],
                flag: PointFlag::from_error(&err),
            }
        }
    };

    let mut values = Vec::with_capacity(width);
    for out in outputs {
        match out {
            Output::T21 => values.push(tr.t21_prob),
            Output::T12 => values.push(tr.t12_prob),
            Output::T21Complex => values.extend([tr.t21.re, tr.t21.im]),
            Output::T12Complex => values.extend([tr.t12.re, tr.t12.im]),
            Output::IsolationDb => values.push(tr.isolation_db),
            Output::Stable => values.push(if is_stable(&rp).stable { 1.0 } else { 0.0 }),
        }
    }
    SweepRow {
        coords,
        values,
        flag: PointFlag::Ok,
    }
}

/// Packages rows (already in index order) into a result table.
pub fn assemble(spec: &SweepSpec, rows: Vec<SweepRow>) -> SweepResult {
    SweepResult {
        axes: spec.axes.clone(),
        grids: spec.axes.iter().map(Axis::values).collect(),
        columns: spec.columns(),
        rows,
        metadata: spec.metadata(),
    }
}

/// Serial sweep. Singular or non-convergent points are flagged, not fatal.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows = (0..spec.point_count())
        .map(|i| evaluate_point(spec, i))
        .collect();
    Ok(assemble(spec, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3a,
    Fig3b,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig2c,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4 => "fig4",
        }
    }

    /// Parameters of the figure in units of `gamma_m`: `y = 20`,
    /// `gamma_1 = 1.1`, `gamma_2 = 1.5`, `G = J = 1`, over-coupled cavities.
    pub fn spec(self) -> SweepSpec {
        let base = DirectParams::special_point(20.0);
        let two_pi = 2.0 * PI;
        let (theta, phi, axis) = match self {
            Figure::Fig2a => (
                0.0,
                FRAC_PI_2,
                Axis::new(AxisParam::DeltaM, -5.0, 5.0, DEFAULT_POINTS),
            ),
            Figure::Fig2b => (
                FRAC_PI_2,
                0.0,
                Axis::new(AxisParam::DeltaM, -5.0, 5.0, DEFAULT_POINTS),
            ),
            Figure::Fig2c => (
                FRAC_PI_2,
                FRAC_PI_2,
                Axis::new(AxisParam::DeltaM, -5.0, 5.0, DEFAULT_POINTS),
            ),
            Figure::Fig3a => (
                base.theta,
                FRAC_PI_2,
                Axis::new(AxisParam::Theta, 0.0, two_pi, DEFAULT_POINTS),
            ),
            Figure::Fig3b => (
                FRAC_PI_2,
                base.phi,
                Axis::new(AxisParam::Phi, 0.0, two_pi, DEFAULT_POINTS),
            ),
            Figure::Fig4 => (
                FRAC_PI_2,
                FRAC_PI_2,
                Axis::new(AxisParam::Y, 0.0, 40.0, DEFAULT_POINTS),
            ),
        };
        SweepSpec {
            base: SweepBase::Direct(DirectParams { theta, phi, ..base }),
            axes: Vec::from([axis]),
            link_detunings: axis.param == AxisParam::DeltaM,
            outputs: Output::defaults(),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

pub fn figure_preset(name: &str) -> Result<SweepSpec> {
    Ok(name.parse::<Figure>()?.spec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Port;

    fn column<'a>(res: &'a SweepResult, name: &str) -> impl Iterator<Item = f64> + 'a {
        let k = res.columns.iter().position(|c| *c == name).unwrap();
        res.rows.iter().map(move |r| r.values[k])
    }

    #[test]
    fn grid_hits_landmarks_exactly() {
        let fig4 = Figure::Fig4.spec();
        assert_eq!(fig4.axes[0].value(200), 20.0);
        assert_eq!(fig4.axes[0].value(400), 40.0);
        let fig2 = Figure::Fig2c.spec();
        assert_eq!(fig2.axes[0].value(200), 0.0);
        assert_eq!(fig2.axes[0].value(0), -5.0);
    }

    #[test]
    fn presets_echo_captions() {
        let fig4 = figure_preset("fig4").unwrap();
        let SweepBase::Direct(p) = fig4.base else {
            panic!()
        };
        assert_eq!((p.theta, p.phi, p.g, p.j), (FRAC_PI_2, FRAC_PI_2, 1.0, 1.0));
        assert_eq!((p.gamma_1, p.gamma_2, p.gamma_m), (1.1, 1.5, 1.0));
        assert_eq!((p.delta_m, p.delta_pp_1, p.delta_pp_2), (0.0, 0.0, 0.0));
        assert_eq!(fig4.axes[0].param, AxisParam::Y);

        let SweepBase::Direct(p) = figure_preset("fig2a").unwrap().base else {
            panic!()
        };
        assert_eq!((p.theta, p.phi, p.y), (0.0, FRAC_PI_2, 20.0));
        let SweepBase::Direct(p) = figure_preset("fig2b").unwrap().base else {
            panic!()
        };
        assert_eq!((p.theta, p.phi), (FRAC_PI_2, 0.0));
        let fig3b = figure_preset("fig3b").unwrap();
        assert_eq!(fig3b.axes[0].param, AxisParam::Phi);
        assert!(matches!(
            figure_preset("fig5"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn fig4_landmarks() {
        let res = run_sweep(&Figure::Fig4.spec()).unwrap();
        assert_eq!(res.rows.len(), 401);
        let t21: Vec<f64> = column(&res, "T21").collect();
        let t12: Vec<f64> = column(&res, "T12").collect();
        assert!(t21[200] < 1e-20);
        let argmin = (0..t21.len())
            .min_by(|&a, &b| t21[a].total_cmp(&t21[b]))
            .unwrap();
        assert_eq!(argmin, 200);
        assert!(t12.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn fig2c_peaks_at_resonance() {
        let res = run_sweep(&Figure::Fig2c.spec()).unwrap();
        let t12: Vec<f64> = column(&res, "T12").collect();
        let t21: Vec<f64> = column(&res, "T21").collect();
        // the T12 maximum sits at Delta_m ~ 0.053, inside the central linewidth
        let argmax = (0..t12.len())
            .max_by(|&a, &b| t12[a].total_cmp(&t12[b]))
            .unwrap();
        assert!(res.rows[argmax].coords[0].abs() <= 0.1);
        assert!(t12[200] > 500.0 && t21[200] < 1e-20);
        let argmin = (0..t21.len())
            .min_by(|&a, &b| t21[a].total_cmp(&t21[b]))
            .unwrap();
        assert_eq!(argmin, 200);
    }

    #[test]
    fn fig3b_t12_is_flat() {
        let res = run_sweep(&Figure::Fig3b.spec()).unwrap();
        let t12: Vec<f64> = column(&res, "T12").collect();
        for v in &t12 {
            assert!((v - t12[0]).abs() <= 1e-12 * t12[0]);
        }
    }

    #[test]
    fn two_axis_surface_is_periodic() {
        let mut spec = Figure::Fig3a.spec();
        spec.axes = Vec::from([
            Axis::new(AxisParam::Theta, 0.0, 2.0 * PI, 9),
            Axis::new(AxisParam::Phi, 0.0, 2.0 * PI, 7),
        ]);
        spec.outputs = Vec::from([Output::T21Complex, Output::T12, Output::Stable]);
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.columns, ["T12", "t21_re", "t21_im", "stable"]);
        assert_eq!(res.rows.len(), 63);
        assert_eq!(res.rows[8].coords, [res.grids[0][1], res.grids[1][1]]);
        for i in 0..9 {
            let first = &res.rows[i * 7].values;
            let last = &res.rows[i * 7 + 6].values;
            for (a, b) in first.iter().zip(last) {
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
        for j in 0..7 {
            let (a, b) = (&res.rows[j].values, &res.rows[56 + j].values);
            for (x, z) in a.iter().zip(b) {
                assert!((x - z).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
        assert!(res.rows.iter().all(|r| r.values[3] == 1.0));
    }

    #[test]
    fn invalid_specs() {
        let mut spec = Figure::Fig4.spec();
        spec.axes[0].count = 1;
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidSpec(_))));
        spec.axes[0].count = 5;
        spec.axes[0].stop = 0.0;
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidSpec(_))));
        spec.axes = Vec::from([Axis::new(AxisParam::Gamma1, -1.0, 1.0, 5)]);
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidSpec(_))));
        spec.axes = Vec::from([Axis::new(AxisParam::Y, 0.0, 1.0, 5); 3]);
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidSpec(_))));
        spec.axes.truncate(1);
        spec.outputs.clear();
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidSpec(_))));
        assert!("Delta_m".parse::<AxisParam>().is_ok());
        assert!("delta".parse::<AxisParam>().is_err());
    }

    #[test]
    fn pipeline_sweep() {
        let system = SystemParams {
            omega_1: 20.0,
            omega_2: 20.0,
            omega_m: 20.0,
            gamma_1: 1.1,
            gamma_2: 1.5,
            gamma_m: 1.0,
            g_1: 0.002,
            g_2: 0.002,
            j: 1.0,
            eta_1: 1.0,
            eta_2: 1.0,
        };
        let drive = DriveConfig {
            omega_d: 0.0,
            eps_1: 400.0,
            eps_2: 400.0,
            theta_1: 0.0,
            theta_2: 1.0,
            probe_port: Port::Port1,
            omega_p: 20.0,
            eps_p: 1.0,
            y: 20.0,
            phi: FRAC_PI_2,
        };
        let spec = SweepSpec {
            base: SweepBase::Pipeline {
                system,
                drive,
                solver: SolverOptions::default(),
            },
            axes: Vec::from([Axis::new(AxisParam::DeltaM, -2.0, 2.0, 11)]),
            link_detunings: false,
            outputs: Output::defaults(),
        };
        let res = run_sweep(&spec).unwrap();
        assert!(res.rows.iter().all(|r| r.flag == PointFlag::Ok));
        assert_eq!(res.metadata.len(), 21);

        let mut bad = spec.clone();
        bad.axes[0].param = AxisParam::G;
        assert!(matches!(run_sweep(&bad), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn nonconvergent_points_are_flagged() {
        let mut spec = Figure::Fig4.spec();
        spec.axes[0].count = 3;
        let system = SystemParams {
            omega_1: 20.0,
            omega_2: 20.0,
            omega_m: 20.0,
            gamma_1: 1.1,
            gamma_2: 1.5,
            gamma_m: 1.0,
            g_1: 0.002,
            g_2: 0.002,
            j: 1.0,
            eta_1: 1.0,
            eta_2: 1.0,
        };
        let drive = DriveConfig {
            omega_d: 0.0,
            eps_1: 400.0,
            eps_2: 0.0,
            theta_1: 0.0,
            theta_2: 0.0,
            probe_port: Port::Port1,
            omega_p: 20.0,
            eps_p: 1.0,
            y: 1.0,
            phi: 0.0,
        };
        spec.base = SweepBase::Pipeline {
            system,
            drive,
            solver: SolverOptions {
                max_iterations: 1,
                ..SolverOptions::default()
            },
        };
        let res = run_sweep(&spec).unwrap();
        for row in &res.rows {
            assert_eq!(row.flag, PointFlag::NonConvergent);
            assert!(row.values.iter().all(|v| *v == SENTINEL));
        }
    }
}

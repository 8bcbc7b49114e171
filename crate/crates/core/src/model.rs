//! Physical parameters, the self-consistent pump steady state and its
//! reduction to the parameters of the linearized fluctuation equations.
//!
//! Conventions: `e^{-i w t}` time dependence, annihilation-operator
//! amplitudes, everything in the frame rotating at the pump frequency. All
//! rates and frequencies share one unit (by default the mechanical decay rate).

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Probed cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    Port1,
    Port2,
}

impl Port {
    pub fn other(self) -> Port {
        match self {
            Port::Port1 => Port::Port2,
            Port::Port2 => Port::Port1,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Port::Port1 => 1,
            Port::Port2 => 2,
        }
    }
}

pub(crate) fn check_rate(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidRate { name, value })
    }
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

pub(crate) fn check_nonneg(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}

fn check_fraction(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

/// Static constants of the two cavities and the mechanical resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_m: f64,
    /// Total cavity amplitude decay rates.
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_m: f64,
    /// Single-photon optomechanical couplings.
    pub g_1: f64,
    pub g_2: f64,
    /// Cavity-cavity hopping.
    pub j: f64,
    /// External-coupling fractions, `gamma_i^e = eta_i * gamma_i`.
    pub eta_1: f64,
    pub eta_2: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        check_finite("omega_1", self.omega_1)?;
        check_finite("omega_2", self.omega_2)?;
        check_finite("omega_m", self.omega_m)?;
        check_rate("gamma_1", self.gamma_1)?;
        check_rate("gamma_2", self.gamma_2)?;
        check_rate("gamma_m", self.gamma_m)?;
        check_finite("g_1", self.g_1)?;
        check_finite("g_2", self.g_2)?;
        check_finite("J", self.j)?;
        check_fraction("eta_1", self.eta_1)?;
        check_fraction("eta_2", self.eta_2)?;
        Ok(())
    }

    pub fn gamma_1e(&self) -> f64 {
        self.eta_1 * self.gamma_1
    }

    pub fn gamma_2e(&self) -> f64 {
        self.eta_2 * self.gamma_2
    }

    /// Exchanges every cavity 1 label with cavity 2.
    pub fn swapped(&self) -> SystemParams {
        SystemParams {
            omega_1: self.omega_2,
            omega_2: self.omega_1,
            gamma_1: self.gamma_2,
            gamma_2: self.gamma_1,
            g_1: self.g_2,
            g_2: self.g_1,
            eta_1: self.eta_2,
            eta_2: self.eta_1,
            ..*self
        }
    }
}

/// Pump, probe and mechanical drive.
///
/// The mechanical drive frequency is not stored: it is always
/// `omega_p - omega_d`, and its amplitude is `eps_p * y * e^{i phi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    /// Shared pump frequency.
    pub omega_d: f64,
    pub eps_1: f64,
    pub eps_2: f64,
    pub theta_1: f64,
    pub theta_2: f64,
    pub probe_port: Port,
    pub omega_p: f64,
    pub eps_p: f64,
    pub y: f64,
    pub phi: f64,
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        check_finite("omega_d", self.omega_d)?;
        check_nonneg("eps_1", self.eps_1)?;
        check_nonneg("eps_2", self.eps_2)?;
        check_finite("theta_1", self.theta_1)?;
        check_finite("theta_2", self.theta_2)?;
        check_finite("omega_p", self.omega_p)?;
        check_rate("eps_p", self.eps_p)?;
        check_nonneg("y", self.y)?;
        check_finite("phi", self.phi)?;
        Ok(())
    }

    /// `omega_b = omega_p - omega_d`.
    pub fn mechanical_drive_frequency(&self) -> f64 {
        self.omega_p - self.omega_d
    }

    pub fn mechanical_drive_amplitude(&self) -> C64 {
        C64::from_polar(self.eps_p * self.y, self.phi)
    }

    pub fn swapped(&self) -> DriveConfig {
        DriveConfig {
            eps_1: self.eps_2,
            eps_2: self.eps_1,
            theta_1: self.theta_2,
            theta_2: self.theta_1,
            probe_port: self.probe_port.other(),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative tolerance on the fixed-point residual of `<b> + <b>*`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Under-relaxation factor in `(0, 1]`.
    pub damping: f64,
    /// Restart from perturbed guesses and report every distinct branch.
    pub check_branches: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-12,
            max_iterations: 10_000,
            damping: 0.5,
            check_branches: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        check_rate("tolerance", self.tolerance)?;
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "damping",
                value: self.damping,
                reason: "must lie in (0, 1]",
            });
        }
        Ok(())
    }
}

/// Self-consistent classical working point set by the pumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub a1_avg: C64,
    pub a2_avg: C64,
    pub b_avg: C64,
    /// `Delta_i + g_i (<b> + <b>*)`.
    pub delta_1_prime: f64,
    pub delta_2_prime: f64,
    pub iterations: usize,
    /// Relative fixed-point residual at termination.
    pub residual: f64,
}

/// The pump steady-state equations viewed as a map of the single real
/// unknown `x = <b> + <b>*`.
struct PumpMap<'a> {
    sys: &'a SystemParams,
    drive: &'a DriveConfig,
}

impl PumpMap<'_> {
    fn detunings(&self, x: f64) -> (f64, f64) {
        (
            self.sys.omega_1 - self.drive.omega_d + self.sys.g_1 * x,
            self.sys.omega_2 - self.drive.omega_d + self.sys.g_2 * x,
        )
    }

    fn cavities(&self, delta_1: f64, delta_2: f64) -> Result<(C64, C64)> {
        let s = self.sys;
        let c1 = C64::new(s.gamma_1, delta_1);
        let c2 = C64::new(s.gamma_2, delta_2);
        let det = c1 * c2 + s.j * s.j;
        if det.norm() <= f64::EPSILON * (c1.norm() * c2.norm() + s.j * s.j) {
            return Err(Error::SingularCavityMatrix);
        }
        let p1 = C64::from_polar(self.drive.eps_1, self.drive.theta_1);
        let p2 = C64::from_polar(self.drive.eps_2, self.drive.theta_2);
        let a1 = (c2 * p1 - I * s.j * p2) / det;
        let a2 = (c1 * p2 - I * s.j * p1) / det;
        Ok((a1, a2))
    }

    fn mechanics(&self, a1: C64, a2: C64) -> C64 {
        let s = self.sys;
        let force = s.g_1 * a1.norm_sqr() + s.g_2 * a2.norm_sqr();
        -I * force / C64::new(s.gamma_m, s.omega_m)
    }

    fn apply(&self, x: f64) -> Result<f64> {
        let (d1, d2) = self.detunings(x);
        let (a1, a2) = self.cavities(d1, d2)?;
        Ok(2.0 * self.mechanics(a1, a2).re)
    }

    /// Damped fixed-point iteration from `x0`; returns `(x, iterations, residual)`.
    fn iterate(&self, x0: f64, opts: &SolverOptions) -> Result<(f64, usize, f64)> {
        let mut x = x0;
        let mut residual = f64::INFINITY;
        for it in 1..=opts.max_iterations {
            let fx = self.apply(x)?;
            if !fx.is_finite() {
                break;
            }
            let diff = (fx - x).abs();
            let scale = x.abs().max(fx.abs());
            residual = if scale == 0.0 { 0.0 } else { diff / scale };
            if diff <= opts.tolerance * scale {
                return Ok((x, it, residual));
            }
            x += opts.damping * (fx - x);
        }
        Err(Error::NonConvergence {
            iterations: opts.max_iterations,
            residual,
        })
    }

    fn assemble(&self, x: f64, iterations: usize, residual: f64) -> Result<SteadyState> {
        let (d1, d2) = self.detunings(x);
        let (a1, a2) = self.cavities(d1, d2)?;
        Ok(SteadyState {
            a1_avg: a1,
            a2_avg: a2,
            b_avg: self.mechanics(a1, a2),
            delta_1_prime: d1,
            delta_2_prime: d2,
            iterations,
            residual,
        })
    }
}

fn distinct(a: f64, b: f64) -> bool {
    (a - b).abs() > 1e-6 * a.abs().max(b.abs())
}

/// Solves the pump steady state self-consistently.
///
/// Iterates on `x = <b> + <b>*` starting from `<b> = 0`: shift the cavity
/// detunings, solve the 2x2 cavity system, update the mechanical amplitude,
/// and relax. With `check_branches`, the iteration is restarted at 90% and
/// 110% of the first estimate `F(0)`; distinct limits are reported as
/// [`Error::NonUniqueSteadyState`].
pub fn solve_pump_steady_state(
    sys: &SystemParams,
    drive: &DriveConfig,
    opts: &SolverOptions,
) -> Result<SteadyState> {
    sys.validate()?;
    drive.validate()?;
    opts.validate()?;
    let map = PumpMap { sys, drive };

    let (x, iterations, residual) = map.iterate(0.0, opts)?;
    let primary = map.assemble(x, iterations, residual)?;
    if !opts.check_branches {
        return Ok(primary);
    }

    let first = map.apply(0.0)?;
    if first == 0.0 {
        return Ok(primary);
    }
    let mut found = Vec::from([(x, primary)]);
    for start in [0.9 * first, 1.1 * first] {
        if let Ok((xs, its, res)) = map.iterate(start, opts) {
            if found.iter().all(|(known, _)| distinct(*known, xs)) {
                found.push((xs, map.assemble(xs, its, res)?));
            }
        }
    }
    if found.len() > 1 {
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        return Err(Error::NonUniqueSteadyState {
            branches: found.into_iter().map(|(_, ss)| ss).collect(),
        });
    }
    Ok(primary)
}

fn relative_gap(stored: C64, recomputed: C64) -> f64 {
    let scale = stored.norm().max(recomputed.norm());
    if scale == 0.0 {
        0.0
    } else {
        (stored - recomputed).norm() / scale
    }
}

/// Largest relative residual of the three steady-state equations (and of
/// the stored shifted detunings) when `ss` is substituted back.
pub fn steady_state_residual(sys: &SystemParams, drive: &DriveConfig, ss: &SteadyState) -> f64 {
    let map = PumpMap { sys, drive };
    let (d1, d2) = map.detunings(2.0 * ss.b_avg.re);
    let Ok((a1, a2)) = map.cavities(d1, d2) else {
        return f64::INFINITY;
    };
    let b = map.mechanics(ss.a1_avg, ss.a2_avg);
    [
        relative_gap(ss.a1_avg, a1),
        relative_gap(ss.a2_avg, a2),
        relative_gap(ss.b_avg, b),
        relative_gap(C64::from(ss.delta_1_prime), C64::from(d1)),
        relative_gap(C64::from(ss.delta_2_prime), C64::from(d2)),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Parameters of the linearized fluctuation equations in the frame rotating
/// at the probe frequency. Every transmission formula consumes this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    /// `Gamma_1 = gamma_1 + i Delta''_1`.
    pub big_gamma_1: C64,
    /// `Gamma_2 = gamma_2 + i Delta''_2`.
    pub big_gamma_2: C64,
    /// `Gamma_m = gamma_m + i Delta_m`.
    pub big_gamma_m: C64,
    /// Pump-enhanced couplings `G_i = g_i <a_i>`.
    pub coupling_1: C64,
    pub coupling_2: C64,
    pub j: f64,
    pub gamma_1e: f64,
    pub gamma_2e: f64,
    /// Mechanical-drive ratio `eps_b / eps_p = y e^{i phi}`.
    pub y: f64,
    pub phi: f64,
}

impl ReducedParams {
    pub fn gamma_1(&self) -> f64 {
        self.big_gamma_1.re
    }
    pub fn gamma_2(&self) -> f64 {
        self.big_gamma_2.re
    }
    pub fn gamma_m(&self) -> f64 {
        self.big_gamma_m.re
    }
    pub fn delta_pp_1(&self) -> f64 {
        self.big_gamma_1.im
    }
    pub fn delta_pp_2(&self) -> f64 {
        self.big_gamma_2.im
    }
    pub fn delta_m(&self) -> f64 {
        self.big_gamma_m.im
    }

    pub fn drive_ratio(&self) -> C64 {
        C64::from_polar(self.y, self.phi)
    }

    pub fn validate(&self) -> Result<()> {
        let gamma_1 = check_rate("gamma_1", self.gamma_1())?;
        let gamma_2 = check_rate("gamma_2", self.gamma_2())?;
        check_rate("gamma_m", self.gamma_m())?;
        check_finite("Delta_pp_1", self.delta_pp_1())?;
        check_finite("Delta_pp_2", self.delta_pp_2())?;
        check_finite("Delta_m", self.delta_m())?;
        check_finite("G_1", self.coupling_1.norm())?;
        check_finite("G_2", self.coupling_2.norm())?;
        check_finite("J", self.j)?;
        for (name, ext, total) in [
            ("gamma_1e", self.gamma_1e, gamma_1),
            ("gamma_2e", self.gamma_2e, gamma_2),
        ] {
            if !(ext >= 0.0 && ext <= total) {
                return Err(Error::InvalidParameter {
                    name,
                    value: ext,
                    reason: "external loss must lie in [0, gamma_i]",
                });
            }
        }
        check_nonneg("y", self.y)?;
        check_finite("phi", self.phi)?;
        Ok(())
    }

    /// Exchanges the labels of the two cavities.
    pub fn swapped(&self) -> ReducedParams {
        ReducedParams {
            big_gamma_1: self.big_gamma_2,
            big_gamma_2: self.big_gamma_1,
            coupling_1: self.coupling_2,
            coupling_2: self.coupling_1,
            gamma_1e: self.gamma_2e,
            gamma_2e: self.gamma_1e,
            ..*self
        }
    }
}

/// Maps a converged pump steady state to the linear-response parameters.
pub fn reduce(sys: &SystemParams, drive: &DriveConfig, ss: &SteadyState) -> Result<ReducedParams> {
    sys.validate()?;
    drive.validate()?;
    let beat = drive.mechanical_drive_frequency();
    let rp = ReducedParams {
        big_gamma_1: C64::new(sys.gamma_1, ss.delta_1_prime - beat),
        big_gamma_2: C64::new(sys.gamma_2, ss.delta_2_prime - beat),
        big_gamma_m: C64::new(sys.gamma_m, sys.omega_m - beat),
        coupling_1: ss.a1_avg * sys.g_1,
        coupling_2: ss.a2_avg * sys.g_2,
        j: sys.j,
        gamma_1e: sys.gamma_1e(),
        gamma_2e: sys.gamma_2e(),
        y: drive.y,
        phi: drive.phi,
    };
    rp.validate()?;
    Ok(rp)
}

/// Conditions under which the rotating-wave linearization is questionable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RwaWarning {
    /// A rotating-frame detuning is large compared with `omega_m`.
    LargeDetuning {
        name: &'static str,
        value: f64,
        threshold: f64,
    },
    /// The mechanical frequency does not resolve the cavity linewidths.
    UnresolvedSidebands { omega_m: f64, max_gamma: f64 },
}

impl core::fmt::Display for RwaWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RwaWarning::LargeDetuning {
                name,
                value,
                threshold,
            } => write!(
                f,
                "|{name}| = {} exceeds {threshold}; rotating-wave approximation may fail",
                value.abs()
            ),
            RwaWarning::UnresolvedSidebands { omega_m, max_gamma } => write!(
                f,
                "omega_m = {omega_m} is below 10 x max cavity decay rate {max_gamma}; rotating-wave approximation may fail"
            ),
        }
    }
}

/// Flags operating points outside the regime of the rotating-wave
/// linearization: detunings beyond `0.1 omega_m`, or `omega_m < 10 max(gamma_i)`.
pub fn rwa_warnings(sys: &SystemParams, drive: &DriveConfig, ss: &SteadyState) -> Vec<RwaWarning> {
    let beat = drive.mechanical_drive_frequency();
    let threshold = 0.1 * sys.omega_m.abs();
    let mut out = Vec::new();
    for (name, value) in [
        ("Delta_pp_1", ss.delta_1_prime - beat),
        ("Delta_pp_2", ss.delta_2_prime - beat),
        ("Delta_m", sys.omega_m - beat),
    ] {
        if value.abs() > threshold {
            out.push(RwaWarning::LargeDetuning {
                name,
                value,
                threshold,
            });
        }
    }
    let max_gamma = sys.gamma_1.max(sys.gamma_2);
    if sys.omega_m < 10.0 * max_gamma {
        out.push(RwaWarning::UnresolvedSidebands {
            omega_m: sys.omega_m,
            max_gamma,
        });
    }
    out
}

/// Figure-level parameterization `G_1 = G`, `G_2 = G e^{i theta}`, bypassing
/// the pump solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectParams {
    pub g: f64,
    pub theta: f64,
    pub j: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_m: f64,
    pub eta_1: f64,
    pub eta_2: f64,
    pub delta_m: f64,
    pub delta_pp_1: f64,
    pub delta_pp_2: f64,
    pub y: f64,
    pub phi: f64,
}

impl DirectParams {
    /// `G = J = gamma_m = 1`, `theta = phi = pi/2`, `gamma_1 = 1.1`,
    /// `gamma_2 = 1.5`, zero detunings, over-coupled cavities.
    pub fn special_point(y: f64) -> DirectParams {
        DirectParams {
            g: 1.0,
            theta: FRAC_PI_2,
            j: 1.0,
            gamma_1: 1.1,
            gamma_2: 1.5,
            gamma_m: 1.0,
            eta_1: 1.0,
            eta_2: 1.0,
            delta_m: 0.0,
            delta_pp_1: 0.0,
            delta_pp_2: 0.0,
            y,
            phi: FRAC_PI_2,
        }
    }
}

pub fn reduced_from_direct(p: &DirectParams) -> Result<ReducedParams> {
    check_nonneg("G", p.g)?;
    check_finite("theta", p.theta)?;
    check_finite("J", p.j)?;
    check_rate("gamma_1", p.gamma_1)?;
    check_rate("gamma_2", p.gamma_2)?;
    check_rate("gamma_m", p.gamma_m)?;
    check_fraction("eta_1", p.eta_1)?;
    check_fraction("eta_2", p.eta_2)?;
    check_finite("Delta_m", p.delta_m)?;
    check_finite("Delta_pp_1", p.delta_pp_1)?;
    check_finite("Delta_pp_2", p.delta_pp_2)?;
    check_nonneg("y", p.y)?;
    check_finite("phi", p.phi)?;
    Ok(ReducedParams {
        big_gamma_1: C64::new(p.gamma_1, p.delta_pp_1),
        big_gamma_2: C64::new(p.gamma_2, p.delta_pp_2),
        big_gamma_m: C64::new(p.gamma_m, p.delta_m),
        coupling_1: C64::new(p.g, 0.0),
        coupling_2: C64::from_polar(p.g, p.theta),
        j: p.j,
        gamma_1e: p.eta_1 * p.gamma_1,
        gamma_2e: p.eta_2 * p.gamma_2,
        y: p.y,
        phi: p.phi,
    })
}

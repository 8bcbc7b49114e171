//! Drift matrix of the linearized fluctuation equations, eigenvalue
//! stability and a fixed-step RK4 integrator used as a time-domain oracle.
//!
//! Within the rotating-wave approximation the annihilation sector decouples,
//! so the state is `(da1, da2, db)` and `dv/dt = M v + d`.

use num_traits::Zero;

use crate::linalg::{self, Mat3, Vec3};
use crate::model::{check_finite, Port, ReducedParams};
use crate::response::FluctuationState;
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Eigenvalues with `|Re l|` below this fraction of the largest bare decay
/// rate count as marginal.
pub const MARGINAL_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    pub matrix: Mat3,
}

impl DriftMatrix {
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        linalg::mat_vec(&self.matrix, v)
    }
}

/// Linear coefficients of the fluctuation equations:
///
/// ```text
/// [ -Gamma_1   -iJ       -iG_1    ]
/// [ -iJ        -Gamma_2  -iG_2    ]
/// [ -iG_1*     -iG_2*    -Gamma_m ]
/// ```
pub fn build_drift(rp: &ReducedParams) -> DriftMatrix {
    let ij = I * rp.j;
    DriftMatrix {
        matrix: [
            [-rp.big_gamma_1, -ij, -I * rp.coupling_1],
            [-ij, -rp.big_gamma_2, -I * rp.coupling_2],
            [
                -I * rp.coupling_1.conj(),
                -I * rp.coupling_2.conj(),
                -rp.big_gamma_m,
            ],
        ],
    }
}

/// Drive vector: the probe enters the probed cavity, the mechanical drive the resonator.
pub fn drive_vector(eps_p: f64, eps_b: C64, port: Port) -> Vec3 {
    let probe = C64::from(eps_p);
    match port {
        Port::Port1 => [probe, C64::zero(), eps_b],
        Port::Port2 => [C64::zero(), probe, eps_b],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// Sorted by ascending real part.
    pub eigenvalues: [C64; 3],
    /// `min(-Re l)`; positive for a stable system.
    pub margin: f64,
    pub stable: bool,
    pub marginal: bool,
}

pub fn is_stable(rp: &ReducedParams) -> StabilityReport {
    let mut eigenvalues = linalg::eigenvalues(&build_drift(rp).matrix);
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re));
    let margin = eigenvalues
        .iter()
        .map(|l| -l.re)
        .fold(f64::INFINITY, f64::min);
    let rate_scale = rp
        .gamma_1()
        .abs()
        .max(rp.gamma_2().abs())
        .max(rp.gamma_m().abs());
    let marginal = margin.abs() < MARGINAL_RTOL * rate_scale;
    StabilityReport {
        eigenvalues,
        margin,
        stable: margin > 0.0 && !marginal,
        marginal,
    }
}

/// Integrates `dv/dt = M v + d` from `v(0) = 0` to `t_end` with classical
/// RK4. The step is shrunk so that it divides `t_end` evenly.
///
/// For a linear system with constant forcing the RK4 map has exactly the
/// algebraic steady state as its fixed point, so the remaining error is the
/// transient, which decays like `exp(-margin t)`.
pub fn integrate_to_steady(
    rp: &ReducedParams,
    eps_p: f64,
    eps_b: C64,
    port: Port,
    t_end: f64,
    dt: f64,
) -> Result<FluctuationState> {
    let report = is_stable(rp);
    if !report.stable {
        return Err(Error::UnstableSystem {
            margin: report.margin,
        });
    }
    check_finite("t_end", t_end)?;
    if !(dt > 0.0 && dt.is_finite()) || t_end < 0.0 {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "time step must be positive and t_end non-negative",
        });
    }

    let drift = build_drift(rp);
    let d = drive_vector(eps_p, eps_b, port);
    let rhs = |v: &Vec3| {
        let mut out = drift.apply(v);
        for (o, f) in out.iter_mut().zip(d) {
            *o += f;
        }
        out
    };
    let axpy = |v: &Vec3, k: &Vec3, h: f64| -> Vec3 { core::array::from_fn(|i| v[i] + k[i] * h) };

    let steps = libm::ceil(t_end / dt) as usize;
    let h = if steps == 0 {
        0.0
    } else {
        t_end / steps as f64
    };
    let mut v = [C64::zero(); 3];
    for _ in 0..steps {
        let k1 = rhs(&v);
        let k2 = rhs(&axpy(&v, &k1, h / 2.0));
        let k3 = rhs(&axpy(&v, &k2, h / 2.0));
        let k4 = rhs(&axpy(&v, &k3, h));
        for i in 0..3 {
            v[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    Ok(FluctuationState {
        da1: v[0],
        da2: v[1],
        db: v[2],
    })
}

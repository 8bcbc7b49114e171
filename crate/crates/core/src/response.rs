//! Linear response of the probe: fluctuation amplitudes, input-output
//! relations and the directional transmission coefficients.
//!
//! `t21` maps the cavity-1 input to the cavity-2 output, `t12` the reverse.
//! The mechanical drive is tied to the probe through `eps_b / eps_p = y e^{i phi}`
//! for either probed port.
//!
//! Three routes compute the same coefficients and are cross-checked in tests:
//! a direct 3x3 solve followed by the input-output relation
//! ([`transmission_direct`]), the general closed form ([`transmission_general`])
//! and its rewriting for `|G_1| = |G_2|` ([`transmission_simplified`]).
//! [`transmission_special_point`] gives the probabilities at the
//! `G = J = gamma_m`, zero-detuning, `theta = phi = pi/2` operating point.

use num_traits::Zero;

use crate::dynamics::{build_drift, drive_vector};
use crate::linalg;
use crate::model::{check_nonneg, check_rate, Port, ReducedParams};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Isolation is clamped to this many dB when one direction vanishes.
pub const ISOLATION_CLAMP_DB: f64 = 300.0;

/// Denominators below this fraction of their term magnitudes are singular.
pub const DENOMINATOR_RTOL: f64 = 1e-14;

/// Steady-state fluctuation amplitudes `(<da1>, <da2>, <db>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationState {
    pub da1: C64,
    pub da2: C64,
    pub db: C64,
}

impl FluctuationState {
    pub fn as_array(&self) -> [C64; 3] {
        [self.da1, self.da2, self.db]
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.as_array().iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    pub fn distance(&self, other: &FluctuationState) -> f64 {
        libm::sqrt(
            self.as_array()
                .iter()
                .zip(other.as_array())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransmissionMethod {
    DirectSolve,
    ClosedForm,
    Simplified,
    SpecialPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionResult {
    pub t21: C64,
    pub t12: C64,
    /// `T21 = |t21|^2`.
    pub t21_prob: f64,
    /// `T12 = |t12|^2`.
    pub t12_prob: f64,
    /// `10 log10(T_forward / T_reverse)`, forward being the larger direction.
    pub isolation_db: f64,
    pub method: TransmissionMethod,
}

impl TransmissionResult {
    pub fn new(t21: C64, t12: C64, method: TransmissionMethod) -> Self {
        let t21_prob = t21.norm_sqr();
        let t12_prob = t12.norm_sqr();
        TransmissionResult {
            t21,
            t12,
            t21_prob,
            t12_prob,
            isolation_db: isolation_db(t21_prob, t12_prob),
            method,
        }
    }
}

pub fn isolation_db(t21_prob: f64, t12_prob: f64) -> f64 {
    let forward = t21_prob.max(t12_prob);
    let reverse = t21_prob.min(t12_prob);
    if forward == 0.0 {
        0.0
    } else if reverse == 0.0 {
        ISOLATION_CLAMP_DB
    } else {
        (10.0 * libm::log10(forward / reverse)).min(ISOLATION_CLAMP_DB)
    }
}

/// Solves the static fluctuation equations `M v + d = 0` with the probe on
/// `probe_port` and the mechanical drive `eps_b` on the resonator.
pub fn solve_fluctuations(
    rp: &ReducedParams,
    eps_p: f64,
    eps_b: C64,
    probe_port: Port,
) -> Result<FluctuationState> {
    let m = build_drift(rp).matrix;
    let d = drive_vector(eps_p, eps_b, probe_port);
    let rhs = [-d[0], -d[1], -d[2]];
    let v = linalg::solve(&m, &rhs).ok_or(Error::SingularSystem)?;
    Ok(FluctuationState {
        da1: v[0],
        da2: v[1],
        db: v[2],
    })
}

/// Input-output relation `a_out = sqrt(2 gamma^e) a - a_in` for both cavities.
pub fn output_fields(rp: &ReducedParams, fs: &FluctuationState, inputs: (C64, C64)) -> (C64, C64) {
    (
        fs.da1 * libm::sqrt(2.0 * rp.gamma_1e) - inputs.0,
        fs.da2 * libm::sqrt(2.0 * rp.gamma_2e) - inputs.1,
    )
}

/// Transmission from a unit input on `port`, through the direct 3x3 solve.
fn direct_coefficient(rp: &ReducedParams, port: Port) -> Result<C64> {
    let (gamma_in, inputs) = match port {
        Port::Port1 => (rp.gamma_1e, (C64::from(1.0), C64::zero())),
        Port::Port2 => (rp.gamma_2e, (C64::zero(), C64::from(1.0))),
    };
    let eps_p = libm::sqrt(2.0 * gamma_in);
    let eps_b = rp.drive_ratio() * eps_p;
    let fs = solve_fluctuations(rp, eps_p, eps_b, port)?;
    let (out1, out2) = output_fields(rp, &fs, inputs);
    Ok(match port {
        Port::Port1 => out2,
        Port::Port2 => out1,
    })
}

/// `t21`, `t12` from the fluctuation solve and the input-output relation.
pub fn transmission_direct(rp: &ReducedParams) -> Result<TransmissionResult> {
    rp.validate()?;
    let t21 = direct_coefficient(rp, Port::Port1)?;
    let t12 = direct_coefficient(rp, Port::Port2)?;
    Ok(TransmissionResult::new(
        t21,
        t12,
        TransmissionMethod::DirectSolve,
    ))
}

/// Closed form for the transmission from cavity `a` into cavity `b`,
/// without the `-2 sqrt(gamma_1^e gamma_2^e)` prefactor.
///
/// Written so that exchanging the `a`/`b` arguments reproduces the same
/// floating-point operations on the shared denominator.
fn closed_form_ratio(
    big_gamma_a: C64,
    big_gamma_b: C64,
    big_gamma_m: C64,
    coupling_a: C64,
    coupling_b: C64,
    j: f64,
    ratio: C64,
) -> Result<C64> {
    let hop = I * j * big_gamma_m;
    let hop_ab = hop + coupling_a.conj() * coupling_b;
    let hop_ba = hop + coupling_a * coupling_b.conj();
    let arm_a = big_gamma_a * big_gamma_m + coupling_a.norm_sqr();
    let arm_b = big_gamma_b * big_gamma_m + coupling_b.norm_sqr();

    let den = arm_a * arm_b - hop_ba * hop_ab;
    let scale = arm_a.norm() * arm_b.norm() + hop_ba.norm() * hop_ab.norm();
    if den.norm().is_nan() || den.norm() <= DENOMINATOR_RTOL * scale {
        return Err(Error::SingularSystem);
    }
    let num = hop_ab * (big_gamma_m - I * coupling_a * ratio) + I * coupling_b * ratio * arm_a;
    Ok(num / den)
}

/// General closed-form `t21`, `t12` for arbitrary complex `G_1`, `G_2`.
pub fn transmission_general(rp: &ReducedParams) -> Result<TransmissionResult> {
    rp.validate()?;
    let prefactor = -2.0 * libm::sqrt(rp.gamma_1e * rp.gamma_2e);
    let ratio = rp.drive_ratio();
    let t21 = closed_form_ratio(
        rp.big_gamma_1,
        rp.big_gamma_2,
        rp.big_gamma_m,
        rp.coupling_1,
        rp.coupling_2,
        rp.j,
        ratio,
    )?;
    let t12 = closed_form_ratio(
        rp.big_gamma_2,
        rp.big_gamma_1,
        rp.big_gamma_m,
        rp.coupling_2,
        rp.coupling_1,
        rp.j,
        ratio,
    )?;
    Ok(TransmissionResult::new(
        t21 * prefactor,
        t12 * prefactor,
        TransmissionMethod::ClosedForm,
    ))
}

fn phase(z: C64) -> f64 {
    if z.is_zero() {
        0.0
    } else {
        z.arg()
    }
}

/// Closed form specialised to `G_1 = G`, `G_2 = G e^{i theta}`.
///
/// A common phase `psi` on both couplings is absorbed into the drive phase
/// (`phi -> phi + psi`), which leaves the result identical to
/// [`transmission_general`].
pub fn transmission_simplified(rp: &ReducedParams) -> Result<TransmissionResult> {
    rp.validate()?;
    let (g1, g2) = (rp.coupling_1.norm(), rp.coupling_2.norm());
    if (g1 - g2).abs() > 1e-12 * g1.max(g2) {
        return Err(Error::PreconditionViolation("|G_1| must equal |G_2|"));
    }
    let g = g1;
    let psi = phase(rp.coupling_1);
    let theta = if rp.coupling_2.is_zero() {
        0.0
    } else {
        phase(rp.coupling_2) - psi
    };
    let phi = rp.phi + psi;
    let (gm, big_gamma_1, big_gamma_2) = (rp.big_gamma_m, rp.big_gamma_1, rp.big_gamma_2);
    let g_sq = g * g;

    let e_plus = C64::from_polar(1.0, theta);
    let e_minus = C64::from_polar(1.0, -theta);
    let drive = C64::from_polar(rp.y, phi);
    let drive_theta = C64::from_polar(rp.y, theta + phi);
    let hop = I * rp.j * gm;
    let arm_1 = big_gamma_1 * gm + g_sq;
    let arm_2 = big_gamma_2 * gm + g_sq;

    let den = arm_1 * arm_2 - (hop + e_minus * g_sq) * (hop + e_plus * g_sq);
    let scale =
        arm_1.norm() * arm_2.norm() + (hop + e_minus * g_sq).norm() * (hop + e_plus * g_sq).norm();
    if den.norm().is_nan() || den.norm() <= DENOMINATOR_RTOL * scale {
        return Err(Error::SingularSystem);
    }
    let prefactor = -2.0 * libm::sqrt(rp.gamma_1e * rp.gamma_2e);
    let t21 = ((hop + e_plus * g_sq) * (gm - I * g * drive) + I * g * arm_1 * drive_theta) / den;
    let t12 = ((hop + e_minus * g_sq) * (gm - I * g * drive_theta) + I * g * arm_2 * drive) / den;
    Ok(TransmissionResult::new(
        t21 * prefactor,
        t12 * prefactor,
        TransmissionMethod::Simplified,
    ))
}

/// `(T21, T12)` at `G = J = gamma_m`, `Delta_m = Delta'' = 0`,
/// `theta = phi = pi/2` with over-coupled cavities.
pub fn transmission_special_point(
    gamma_1: f64,
    gamma_2: f64,
    gamma_m: f64,
    y: f64,
) -> Result<(f64, f64)> {
    check_rate("gamma_1", gamma_1)?;
    check_rate("gamma_2", gamma_2)?;
    check_rate("gamma_m", gamma_m)?;
    check_nonneg("y", y)?;
    let amp = (2.0 * gamma_m * (y + 1.0) - y * (gamma_1 + gamma_m))
        / ((gamma_1 + gamma_m) * (gamma_2 + gamma_m));
    let t21 = 4.0 * gamma_1 * gamma_2 * amp * amp;
    let t12 = 4.0 * y * y * gamma_1 * gamma_2 / ((gamma_1 + gamma_m) * (gamma_1 + gamma_m));
    Ok((t21, t12))
}

/// Drive ratio `y_c = 2 gamma_m / (gamma_1 - gamma_m)` at which the special-point
/// `T21` vanishes. Negative when `gamma_1 < gamma_m` (not reachable with `y >= 0`).
pub fn critical_drive(gamma_1: f64, gamma_m: f64) -> Result<f64> {
    check_rate("gamma_1", gamma_1)?;
    check_rate("gamma_m", gamma_m)?;
    if (gamma_1 - gamma_m).abs() <= f64::EPSILON * gamma_m {
        return Err(Error::DegenerateRates);
    }
    Ok(2.0 * gamma_m / (gamma_1 - gamma_m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reduced_from_direct, DirectParams};
    use core::f64::consts::PI;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm())
    }

    #[test]
    fn undriven_fluctuations_vanish() {
        let rp = reduced_from_direct(&DirectParams::special_point(20.0)).unwrap();
        let fs = solve_fluctuations(&rp, 0.0, C64::zero(), Port::Port1).unwrap();
        assert_eq!(fs.norm(), 0.0);
    }

    #[test]
    fn output_fields_reflect_empty_cavity() {
        let rp = reduced_from_direct(&DirectParams::special_point(20.0)).unwrap();
        let zero = FluctuationState {
            da1: C64::zero(),
            da2: C64::zero(),
            db: C64::zero(),
        };
        let c = C64::new(0.3, -0.7);
        assert_eq!(
            output_fields(&rp, &zero, (c, C64::zero())),
            (-c, C64::zero())
        );

        let mut p = DirectParams::special_point(20.0);
        p.eta_2 = 0.0;
        let rp = reduced_from_direct(&p).unwrap();
        let fs = FluctuationState {
            da1: C64::new(1.0, 2.0),
            da2: C64::new(5.0, -1.0),
            db: C64::zero(),
        };
        assert_eq!(output_fields(&rp, &fs, (C64::zero(), c)).1, -c);
    }

    #[test]
    fn special_point_reference_values() {
        let (t21, t12) = transmission_special_point(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!((t21, t12), (1.0, 0.0));

        let (t21, t12) = transmission_special_point(1.1, 1.5, 1.0, 20.0).unwrap();
        assert!(t21 < 1e-20);
        assert!((t12 - 2640.0 / 4.41).abs() <= 1e-12 * t12);
    }

    #[test]
    fn critical_drive_values() {
        assert!((critical_drive(1.1, 1.0).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(critical_drive(3.0, 1.0).unwrap(), 1.0);
        let yc = critical_drive(1.01, 1.0).unwrap();
        assert!((yc - 200.0).abs() < 1e-9);
        assert!(transmission_special_point(1.01, 0.7, 1.0, yc).unwrap().0 < 1e-20);
        assert_eq!(critical_drive(1.0, 1.0), Err(Error::DegenerateRates));
    }

    #[test]
    fn reciprocal_without_symmetry_breaking() {
        let mut p = DirectParams::special_point(0.0);
        p.theta = 0.0;
        p.delta_m = 0.4;
        p.delta_pp_2 = -1.3;
        let rp = reduced_from_direct(&p).unwrap();
        let tr = transmission_general(&rp).unwrap();
        assert!((tr.t21 - tr.t12).norm() <= 1e-14);
    }

    #[test]
    fn routes_agree_at_special_point() {
        let rp = reduced_from_direct(&DirectParams::special_point(20.0)).unwrap();
        let general = transmission_general(&rp).unwrap();
        let simplified = transmission_simplified(&rp).unwrap();
        let direct = transmission_direct(&rp).unwrap();
        let want = 2640.0 / 4.41;
        for tr in [general, simplified, direct] {
            assert!((tr.t12_prob - want).abs() <= 1e-9 * want, "{tr:?}");
            assert!(tr.t21_prob <= 1e-20, "{tr:?}");
            assert_eq!(tr.isolation_db, ISOLATION_CLAMP_DB);
        }
    }

    #[test]
    fn fig2c_centre_gain_through_pipeline() {
        let rp = reduced_from_direct(&DirectParams::special_point(20.0)).unwrap();
        let fs = solve_fluctuations(&rp, 1.0, C64::new(0.0, 20.0), Port::Port1).unwrap();
        let a_in = 1.0 / libm::sqrt(2.0 * rp.gamma_1e);
        let (_, out2) = output_fields(&rp, &fs, (C64::from(a_in), C64::zero()));
        // forward gain from port 1 vanishes here; the reverse direction carries the gain
        assert!((out2 / a_in).norm_sqr() < 1e-20);
        let fs = solve_fluctuations(&rp, 1.0, C64::new(0.0, 20.0), Port::Port2).unwrap();
        let a_in = 1.0 / libm::sqrt(2.0 * rp.gamma_2e);
        let (out1, _) = output_fields(&rp, &fs, (C64::zero(), C64::from(a_in)));
        assert!(((out1 / a_in).norm_sqr() - 598.639_455_782_312_9).abs() < 1e-9);
    }

    #[test]
    fn fluctuation_residual_is_tiny() {
        let rp = reduced_from_direct(&DirectParams::special_point(20.0)).unwrap();
        let eps_b = C64::new(0.0, 20.0);
        let fs = solve_fluctuations(&rp, 1.0, eps_b, Port::Port1).unwrap();
        let m = build_drift(&rp);
        let mv = m.apply(&fs.as_array());
        let d = drive_vector(1.0, eps_b, Port::Port1);
        for k in 0..3 {
            assert!((mv[k] + d[k]).norm() < 1e-12 * 20.0);
        }
    }

    #[test]
    fn simplified_form_needs_equal_magnitudes() {
        let mut rp = reduced_from_direct(&DirectParams::special_point(20.0)).unwrap();
        rp.coupling_2 *= 1.01;
        assert!(matches!(
            transmission_simplified(&rp),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn simplified_absorbs_common_coupling_phase() {
        let mut rp = reduced_from_direct(&DirectParams::special_point(7.0)).unwrap();
        let rot = C64::from_polar(1.0, 0.83);
        rp.coupling_1 *= rot;
        rp.coupling_2 *= rot;
        rp.big_gamma_m.im = 0.4;
        let a = transmission_general(&rp).unwrap();
        let b = transmission_simplified(&rp).unwrap();
        assert!(rel(a.t21, b.t21) < 1e-12 && rel(a.t12, b.t12) < 1e-12);
    }

    #[test]
    fn optomechanics_off_leaves_cavity_hopping() {
        let mut p = DirectParams::special_point(20.0);
        p.g = 0.0;
        p.delta_pp_1 = 0.3;
        let rp = reduced_from_direct(&p).unwrap();
        let tr = transmission_simplified(&rp).unwrap();
        // t = -2 sqrt(g1 g2) iJ / (Gamma_1 Gamma_2 + J^2)
        let want = -2.0 * (1.1f64 * 1.5).sqrt() * I / (C64::new(1.1, 0.3) * 1.5 + 1.0);
        assert!(rel(tr.t21, want) < 1e-14);
        assert!(rel(tr.t12, want) < 1e-14);
    }

    #[test]
    fn t12_is_phi_independent_at_quarter_turn() {
        let mut p = DirectParams::special_point(20.0);
        let first = transmission_simplified(&reduced_from_direct(&p).unwrap())
            .unwrap()
            .t12_prob;
        for k in 0..16 {
            p.phi = 2.0 * PI * k as f64 / 16.0;
            let tr = transmission_simplified(&reduced_from_direct(&p).unwrap()).unwrap();
            assert!((tr.t12_prob - first).abs() <= 1e-12 * first);
        }
    }

    #[test]
    fn isolation_clamps() {
        assert_eq!(isolation_db(0.0, 0.0), 0.0);
        assert_eq!(isolation_db(0.0, 5.0), ISOLATION_CLAMP_DB);
        assert_eq!(isolation_db(10.0, 1.0), 10.0);
        assert_eq!(isolation_db(1.0, 100.0), 20.0);
        assert_eq!(isolation_db(1.0, 1e-40), ISOLATION_CLAMP_DB);
    }

    #[test]
    fn singular_denominator_is_reported() {
        // lossless cavities with Gamma_1 Gamma_2 = -J^2: a normal mode sits exactly on resonance
        let mut rp = reduced_from_direct(&DirectParams::special_point(0.0)).unwrap();
        rp.coupling_1 = C64::zero();
        rp.coupling_2 = C64::zero();
        rp.big_gamma_1 = I;
        rp.big_gamma_2 = I;
        let ratio = closed_form_ratio(
            I,
            I,
            rp.big_gamma_m,
            C64::zero(),
            C64::zero(),
            1.0,
            C64::zero(),
        );
        assert_eq!(ratio, Err(Error::SingularSystem));
        assert_eq!(
            solve_fluctuations(&rp, 1.0, C64::zero(), Port::Port1),
            Err(Error::SingularSystem)
        );
        // the public entry points refuse the lossless parameters outright
        assert!(matches!(
            transmission_general(&rp),
            Err(Error::InvalidRate {
                name: "gamma_1",
                ..
            })
        ));
    }
}

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use optomech_core::model::{DriveConfig, Port, ReducedParams, SystemParams};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Rates in [0.5, 5], phases uniform in [0, 2pi), y in [0, 50], detunings in [-5, 5].
pub fn random_reduced(rng: &mut impl Rng) -> ReducedParams {
    let rate = |rng: &mut dyn rand::RngCore| rng.gen_range(0.5..5.0);
    let gamma_1 = rate(rng);
    let gamma_2 = rate(rng);
    ReducedParams {
        big_gamma_1: C64::new(gamma_1, rng.gen_range(-5.0..5.0)),
        big_gamma_2: C64::new(gamma_2, rng.gen_range(-5.0..5.0)),
        big_gamma_m: C64::new(rate(rng), rng.gen_range(-5.0..5.0)),
        coupling_1: C64::from_polar(rate(rng), rng.gen_range(0.0..2.0 * PI)),
        coupling_2: C64::from_polar(rate(rng), rng.gen_range(0.0..2.0 * PI)),
        j: rate(rng),
        gamma_1e: gamma_1 * rng.gen_range(0.05..=1.0),
        gamma_2e: gamma_2 * rng.gen_range(0.05..=1.0),
        y: rng.gen_range(0.0..50.0),
        phi: rng.gen_range(0.0..2.0 * PI),
    }
}

/// Closed-form steady fluctuations for a probe on cavity 1, written out
/// term by term from the static linearized equations.
pub fn fluctuations_port1(rp: &ReducedParams, eps_p: f64, eps_b: C64) -> [C64; 3] {
    let (g1, g2) = (rp.coupling_1, rp.coupling_2);
    let (l1, l2, lm) = (rp.big_gamma_1, rp.big_gamma_2, rp.big_gamma_m);
    let j = rp.j;
    let den = (l1 * lm + g1.norm_sqr()) * (l2 * lm + g2.norm_sqr())
        - (I * j * lm + g1 * g2.conj()) * (I * j * lm + g1.conj() * g2);
    let da1 = (I * g2 * eps_b * (I * j * lm + g1 * g2.conj())
        + (l2 * lm + g2.norm_sqr()) * (eps_p * lm - I * g1 * eps_b))
        / den;
    let da2 = (-(I * j * lm + g1.conj() * g2) * (eps_p * lm - I * g1 * eps_b)
        - I * g2 * eps_b * (l1 * lm + g1.norm_sqr()))
        / den;
    let db = (j * lm * (eps_b * j - eps_p * g2.conj())
        + l2 * lm * (eps_b * l1 - I * eps_p * g1.conj()))
        / den;
    [da1, da2, db]
}

/// Pump steady state for the amplitudes at fixed shifted detunings.
pub fn cavity_amplitudes(sys: &SystemParams, drive: &DriveConfig, d1: f64, d2: f64) -> (C64, C64) {
    let c1 = C64::new(sys.gamma_1, d1);
    let c2 = C64::new(sys.gamma_2, d2);
    let p1 = C64::from_polar(drive.eps_1, drive.theta_1);
    let p2 = C64::from_polar(drive.eps_2, drive.theta_2);
    let den = c1 * c2 + sys.j * sys.j;
    (
        (c2 * p1 - I * sys.j * p2) / den,
        (c1 * p2 - I * sys.j * p1) / den,
    )
}

/// `x - 2 Re<b>(x)` for the scalar unknown `x = <b> + <b>*`.
pub fn pump_mismatch(sys: &SystemParams, drive: &DriveConfig, x: f64) -> f64 {
    let d1 = sys.omega_1 - drive.omega_d + sys.g_1 * x;
    let d2 = sys.omega_2 - drive.omega_d + sys.g_2 * x;
    let (a1, a2) = cavity_amplitudes(sys, drive, d1, d2);
    let p = sys.g_1 * a1.norm_sqr() + sys.g_2 * a2.norm_sqr();
    x + 2.0 * p * sys.omega_m / (sys.gamma_m * sys.gamma_m + sys.omega_m * sys.omega_m)
}

/// Bisection on `pump_mismatch`. For `g_i >= 0` the mismatch is non-negative
/// at `x = 0` and negative for large negative `x`, which gives the bracket.
pub fn pump_root(sys: &SystemParams, drive: &DriveConfig) -> f64 {
    let mut hi = 0.0;
    if pump_mismatch(sys, drive, hi) == 0.0 {
        return 0.0;
    }
    let mut lo = -1e-6;
    while pump_mismatch(sys, drive, lo) >= 0.0 {
        hi = lo;
        lo *= 2.0;
    }
    let f_lo = pump_mismatch(sys, drive, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if pump_mismatch(sys, drive, mid) * f_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn random_weak_pipeline(rng: &mut impl Rng) -> (SystemParams, DriveConfig) {
    let omega_m = rng.gen_range(10.0..40.0);
    let g_1 = rng.gen_range(1e-4..1e-2);
    let g_2 = rng.gen_range(1e-4..1e-2);
    let sys = SystemParams {
        omega_1: omega_m * rng.gen_range(0.8..1.2),
        omega_2: omega_m * rng.gen_range(0.8..1.2),
        omega_m,
        gamma_1: rng.gen_range(0.5..5.0),
        gamma_2: rng.gen_range(0.5..5.0),
        gamma_m: rng.gen_range(0.5..5.0),
        g_1,
        g_2,
        j: rng.gen_range(0.0..5.0),
        eta_1: rng.gen_range(0.5..=1.0),
        eta_2: rng.gen_range(0.5..=1.0),
    };
    // g_i eps_i^2 / omega_m <= 0.05 * omega_m^2 keeps the radiation-pressure shift small
    let eps_max = |g: f64| (0.05 * omega_m * omega_m * omega_m / g).sqrt();
    let drive = DriveConfig {
        omega_d: 0.0,
        eps_1: rng.gen_range(0.0..eps_max(g_1)),
        eps_2: rng.gen_range(0.0..eps_max(g_2)),
        theta_1: rng.gen_range(0.0..2.0 * PI),
        theta_2: rng.gen_range(0.0..2.0 * PI),
        probe_port: if rng.gen_bool(0.5) {
            Port::Port1
        } else {
            Port::Port2
        },
        omega_p: omega_m,
        eps_p: 1.0,
        y: rng.gen_range(0.0..50.0),
        phi: rng.gen_range(0.0..2.0 * PI),
    };
    (sys, drive)
}

//! Linear-response simulator for directional optical amplification in a
//! three-mode optomechanical system: two linearly coupled cavities sharing one
//! mechanical resonator, with red-detuned pumps on both cavities and a
//! mechanical drive frequency-matched to the probe/pump beat note.
//!
//! The crate is `no_std` (it needs `alloc`) and free of IO. It covers
//!
//! - [`model`]: physical parameters, the self-consistent pump steady state and
//!   its reduction to the linearized response parameters,
//! - [`response`]: fluctuation amplitudes, input-output relations and the
//!   transmission coefficients `t21`/`t12` by several independent routes,
//! - [`dynamics`]: the drift matrix, eigenvalue stability and an RK4
//!   time-domain oracle,
//! - [`sweep`]: parameter grids and the figure presets.
//!
//! All rates and frequencies are expressed in one angular-frequency unit;
//! by convention that unit is the mechanical decay rate `gamma_m = 1`.
//!
//! ```
//! use optomech_core::model::{reduced_from_direct, DirectParams};
//! use optomech_core::response::transmission_general;
//!
//! let rp = reduced_from_direct(&DirectParams::special_point(20.0)).unwrap();
//! let tr = transmission_general(&rp).unwrap();
//! assert!((tr.t12_prob - 2640.0 / 4.41).abs() < 1e-9 * 600.0);
//! assert!(tr.t21_prob < 1e-20);
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dynamics;
mod error;
pub mod linalg;
pub mod model;
pub mod response;
pub mod sweep;

pub use error::Error;

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

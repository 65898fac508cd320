//! Conservative multi-peakon solutions of the spatially periodic
//! Camassa–Holm equation
//!
//! ```text
//! u_t + (u²/2)_x + P_x = 0,    P = ½ e^{-|x|} * (u² + u_x²/2),
//! ```
//!
//! on the unit circle, together with an optimal-transport distance `J`
//! between solution profiles.
//!
//! * [`kernel`]: the periodic kernel `χ`, profile evaluation, energy and
//!   the convolution source terms.
//! * [`dynamics`]: the Hamiltonian peakon flow, continuation through
//!   peakon–antipeakon collisions in rescaled variables, characteristics.
//! * [`metric`]: transport plans and certified upper/lower bounds on `J`.
//! * [`approx`]: multipeakon approximation of smooth periodic data.
//! * [`harness`]: scenarios, experiment drivers and verification suites
//!   behind the `peakon` CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod metric;
pub mod par;
pub mod quadrature;

pub use error::{Error, Result};
pub use kernel::{PeakonState, ProfilePoint};

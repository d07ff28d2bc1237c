//! Numerical laboratory for the σ_k-Yamabe problem on Euclidean domains
//! with boundary.
//!
//! * [`symfn`]: elementary symmetric functions, Gårding cones, admissible
//!   `(f, Γ)` pairs and the deformation homotopy.
//! * [`schouten`]: conformal Schouten matrices over the flat metric and
//!   their spectra.
//! * [`radial`]: the autonomous ODE for radial solutions in `ξ`-coordinates
//!   and its integrator.
//! * [`shooting`]: annulus boundary value problems by shooting.
//! * [`mobius`] and [`boundary`]: Möbius maps, Kelvin transforms, moving
//!   spheres and conformally invariant boundary operators.
//! * [`verify`]: seeded invariant suites across all of the above.

// `!(x > 0.0)` is used on purpose: it rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod error;
pub mod linalg;
pub mod mobius;
pub mod ode;
pub mod radial;
pub mod schouten;
pub mod shooting;
pub mod symfn;
pub mod verify;

pub use error::{Error, Result};

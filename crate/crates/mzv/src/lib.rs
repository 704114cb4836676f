//! Multiple zeta values and their q-analogues, evaluated through connected sums.
//!
//! The crate has four layers:
//!
//! * [`index`]: dual-index combinatorics. Composition indices, admissibility,
//!   run decompositions, and the duality involution.
//! * [`scalar`]: exact rational and high-precision floating-point scalars under
//!   a common interface, plus the q-integer / factorial / connector kernels.
//! * [`eval`]: truncated series evaluation for q-zeta values, connected sums,
//!   generating functions, and Ohno sums, with tail estimates.
//! * [`transport`]: the two-move rewriting system on connected sums whose
//!   orbits prove duality, with machine-checkable proof traces, an exact
//!   telescoping check, and numeric trace verification.
//!
//! [`suite`] bundles the standard verification sweeps (duality, Ohno,
//! telescoping, sum formula) into reports shared by tests and the CLI.

pub mod error;
pub mod eval;
pub mod index;
pub mod scalar;
pub mod suite;
pub mod transport;

pub use error::{Error, Result};

//! Discrimination and estimation of unknown Hamiltonians on small dense
//! Hilbert spaces, and the time-energy bounds that follow from them.
//!
//! Everything here is pure computation over `alloc` containers; file
//! formats, the command-line runner and all IO live in the `hdisc` crate.
//!
//! Units: hbar = 1, so energies are inverse times.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod energy;
mod error;
pub mod estimation;
pub mod linalg;
pub mod metric;
pub mod protocol;
pub mod quad;
pub mod random;
pub mod scenarios;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use metric::{dist0, norm0, spread, HamiltonianSchedule};
pub use spectral::{EigenSystem, HermitianOperator, QuantumState, SpaceLayout};

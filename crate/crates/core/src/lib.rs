//! Dynamical decoupling of two qubits dephasing in a common bosonic bath.
//!
//! The crate computes the exact density-matrix evolution of two qubits
//! coupled through `(σz1 + σz2) Σ λk (bk† + bk)` while each qubit receives its
//! own train of instantaneous π pulses. The pieces are:
//!
//! * [`sequences`]: Uhrig pulse fractions and merged two-qubit timetables.
//! * [`filters`]: the decay filter `y` and phase filter `f = x + z + c` of a
//!   timetable, their parity identities and closed-form Taylor series.
//! * [`spectra`]: spectral densities and the bath integrals, evaluated by
//!   oscillation-aware adaptive Gauss–Kronrod quadrature.
//! * [`dynamics`]: the 4×4 elementwise evolution kernel and its action on a
//!   two-qubit state.
//! * [`entanglement`]: Wootters concurrence.
//! * [`oracle`]: brute-force unitary simulation of the qubits plus a truncated
//!   bath, used to validate the kernel.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]
// Matrix code indexes by row and column; `!(x >= a)` guards also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod entanglement;
mod error;
pub mod filters;
pub mod linalg;
mod math;
pub mod oracle;
pub mod sequences;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use dynamics::{DensityMatrix, EvolutionKernel, PhaseConvention};
pub use sequences::{PulseSchedule, Qubit};
pub use spectra::{QuadratureConfig, SpectralDensity, ThermalSpec};

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("pulses on both qubits at fraction {fraction} are closer than the guard band (separation {separation})")]
    CoincidentPulses { fraction: f64, separation: f64 },

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Convergence { estimate: f64, tolerance: f64 },

    #[error("divergent bath integral: {0}")]
    Divergence(&'static str),

    #[error("invalid density matrix: {reason} (violation {violation:e})")]
    InvalidState { reason: &'static str, violation: f64 },

    #[error("time {time} outside [0, {total}]")]
    OutOfRange { time: f64, total: f64 },

    #[error("bath Hilbert space of dimension {dimension} exceeds the limit {limit}")]
    DimensionLimit { dimension: usize, limit: usize },

    #[error("Fock cutoff leakage {leakage:e} exceeds tolerance {tolerance:e}")]
    CutoffLeakage { leakage: f64, tolerance: f64 },
}

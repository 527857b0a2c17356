//! Elementwise evolution kernels of the pure-dephasing channel and their
//! action on two-qubit states.
//!
//! Basis: `|0⟩=|↓↓⟩, |1⟩=|↓↑⟩, |2⟩=|↑↓⟩, |3⟩=|↑↑⟩`. Pure dephasing leaves
//! populations alone and multiplies each coherence `ρ_{SS'}` by a kernel
//! entry `K_{SS'}`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, SquareMatrix};
use crate::math::{abs, exp};
use crate::sequences::PulseSchedule;
use crate::spectra::{free_delta, free_gamma, pulsed_integrals, PulsedIntegrals, QuadratureConfig, SpectralDensity, ThermalSpec};

pub type Matrix4 = [[Complex64; 4]; 4];

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix4,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: Matrix4) -> Result<Self> {
        let rho = Self { entries };
        rho.check()?;
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
    pub fn from_pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if abs(norm - 1.0) > TRACE_TOLERANCE {
            return Err(Error::InvalidState { reason: "state vector is not normalized", violation: abs(norm - 1.0) });
        }
        let mut entries = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &Matrix4 {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&SquareMatrix::from_rows(&self.entries)).values
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.entries)
    }

    fn check(&self) -> Result<()> {
        if self.entries.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidState { reason: "non-finite entry", violation: f64::INFINITY });
        }
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidState { reason: "not Hermitian", violation: herm });
        }
        let trace_err = (self.trace() - ONE).norm();
        if trace_err > TRACE_TOLERANCE {
            return Err(Error::InvalidState { reason: "trace differs from 1", violation: trace_err });
        }
        let lowest = self.eigenvalues()[0];
        if lowest < EIGENVALUE_FLOOR {
            return Err(Error::InvalidState { reason: "negative eigenvalue", violation: lowest });
        }
        Ok(())
    }
}

fn hermiticity_error(m: &Matrix4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    worst
}

/// Sign applied to the pulsed phase exponents `Δ_n, Δ_m` on the `(0,1)`,
/// `(0,2)`, … entries.
///
/// `Physical` matches the brute-force bath simulation: the zero-pulse limit
/// of the phase filter, `f = sin θ − θ`, enters with a minus sign so that the
/// empty schedule reproduces the free phase `+Δ(t)`. `Literal` places
/// `e^{+iΔ_m}` on `(0,1)` exactly as the closed-form matrix is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    #[default]
    Physical,
    Literal,
}

impl PhaseConvention {
    fn sign(self) -> f64 {
        match self {
            PhaseConvention::Physical => -1.0,
            PhaseConvention::Literal => 1.0,
        }
    }
}

/// 4×4 multipliers applied entrywise to the initial density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionKernel {
    entries: Matrix4,
    time: f64,
    schedule_fingerprint: Option<u64>,
    convention: PhaseConvention,
}

impl EvolutionKernel {
    /// Identity channel at time `t`.
    pub fn identity(time: f64) -> Self {
        Self { entries: [[ONE; 4]; 4], time, schedule_fingerprint: None, convention: PhaseConvention::default() }
    }

    pub fn entries(&self) -> &Matrix4 {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn schedule_fingerprint(&self) -> Option<u64> {
        self.schedule_fingerprint
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    pub fn magnitudes(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = self.entries[i][j].norm();
            }
        }
        out
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.entries)
    }

    /// Smallest eigenvalue of the kernel viewed as a matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&SquareMatrix::from_rows(&self.entries)).values[0]
    }

    /// Kernel with free-evolution exponents (`Δ`, `Γ`), phase `+Δ` on
    /// `(0,1)`.
    pub fn from_free(delta: f64, gamma: f64, time: f64) -> Self {
        let a = Complex64::new(-gamma, delta).exp();
        let ac = a.conj();
        let corner = Complex64::new(exp(-4.0 * gamma), 0.0);
        let entries = [
            [ONE, a, a, corner],
            [ac, ONE, ONE, ac],
            [ac, ONE, ONE, ac],
            [corner, a, a, ONE],
        ];
        Self { entries, time, schedule_fingerprint: None, convention: PhaseConvention::default() }
    }

    /// Kernel from the pulsed exponents.
    ///
    /// `(0,3)` decays with `Γ_n + Γ_m + γ` and `(1,2)` with
    /// `Γ_n + Γ_m − γ`, i.e. with `|y_n ± y_m|²`; the latter vanishes for
    /// the empty schedule, leaving `|↓↑⟩, |↑↓⟩` decoherence-free.
    pub fn from_pulsed(integrals: &PulsedIntegrals, time: f64, convention: PhaseConvention) -> Self {
        let s = convention.sign();
        let (dn, gn) = (s * integrals.phase_first.value, integrals.decay_first.value);
        let (dm, gm) = (s * integrals.phase_second.value, integrals.decay_second.value);
        let cross = integrals.cross.value;
        let am = Complex64::new(-gm, dm).exp();
        let an = Complex64::new(-gn, dn).exp();
        let both = Complex64::new(exp(-(gn + gm + cross)), 0.0);
        let swap = Complex64::new(exp(-(gn + gm - cross)), 0.0);
        let entries = [
            [ONE, am, an, both],
            [am.conj(), ONE, swap, an.conj()],
            [an.conj(), swap, ONE, am.conj()],
            [both, an, am, ONE],
        ];
        Self { entries, time, schedule_fingerprint: None, convention }
    }
}

/// Free kernel at time `t`.
pub fn free_kernel(
    density: &SpectralDensity,
    thermal: &ThermalSpec,
    t: f64,
    q: &QuadratureConfig,
) -> Result<EvolutionKernel> {
    let delta = free_delta(density, t, q)?;
    let gamma = free_gamma(density, thermal, t, q)?;
    Ok(EvolutionKernel::from_free(delta.value, gamma.value, t))
}

/// Kernel of the pulse-controlled evolution over a full cycle of length `t`,
/// expressed in the frame restored by closing pulses.
pub fn controlled_kernel(
    schedule: &PulseSchedule,
    density: &SpectralDensity,
    thermal: &ThermalSpec,
    t: f64,
    q: &QuadratureConfig,
) -> Result<EvolutionKernel> {
    controlled_kernel_with(schedule, density, thermal, t, q, PhaseConvention::default())
}

pub fn controlled_kernel_with(
    schedule: &PulseSchedule,
    density: &SpectralDensity,
    thermal: &ThermalSpec,
    t: f64,
    q: &QuadratureConfig,
    convention: PhaseConvention,
) -> Result<EvolutionKernel> {
    reject_coincidence(schedule)?;
    let integrals = pulsed_integrals(schedule, density, thermal, t, q)?;
    let mut kernel = EvolutionKernel::from_pulsed(&integrals, t, convention);
    kernel.schedule_fingerprint = Some(schedule.fingerprint());
    Ok(kernel)
}

fn reject_coincidence(schedule: &PulseSchedule) -> Result<()> {
    if !schedule.has_coincident_pulses() {
        return Ok(());
    }
    let pulses = schedule.pulses();
    let fraction = pulses
        .windows(2)
        .find(|w| w[0].fraction == w[1].fraction)
        .map_or(f64::NAN, |w| w[0].fraction);
    Err(Error::CoincidentPulses { fraction, separation: 0.0 })
}

/// `ρ(t)_{SS'} = K_{SS'} ρ0_{SS'}`.
pub fn evolve(rho0: &DensityMatrix, kernel: &EvolutionKernel) -> Result<DensityMatrix> {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = kernel.entries[i][j] * rho0.entries[i][j];
        }
    }
    DensityMatrix::new(out)
}

/// States at each `τ` in `times` (sorted, within `[0, T]`).
///
/// At `τ` the pulses applied so far are rescaled onto a cycle of length `τ`
/// and the controlled kernel is evaluated there. A pulse exactly at `τ` is
/// already applied; in the frame restored by closing pulses it leaves the
/// state unchanged.
pub fn trajectory(
    rho0: &DensityMatrix,
    schedule: &PulseSchedule,
    density: &SpectralDensity,
    thermal: &ThermalSpec,
    times: &[f64],
    q: &QuadratureConfig,
) -> Result<Vec<DensityMatrix>> {
    let total = schedule.total_time();
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidArgument("trajectory times must be sorted"));
    }
    if let Some(&bad) = times.iter().find(|&&tau| !(tau >= 0.0 && tau <= total)) {
        return Err(Error::OutOfRange { time: bad, total });
    }
    times.iter().map(|&tau| state_at(rho0, schedule, density, thermal, tau, q)).collect()
}

/// Single trajectory point; see [`trajectory`].
pub fn state_at(
    rho0: &DensityMatrix,
    schedule: &PulseSchedule,
    density: &SpectralDensity,
    thermal: &ThermalSpec,
    tau: f64,
    q: &QuadratureConfig,
) -> Result<DensityMatrix> {
    let total = schedule.total_time();
    if !(tau >= 0.0 && tau <= total) {
        return Err(Error::OutOfRange { time: tau, total });
    }
    if tau == 0.0 {
        return Ok(*rho0);
    }
    let effective = schedule.truncated(tau)?;
    let kernel = controlled_kernel(&effective, density, thermal, tau, q)?;
    evolve(rho0, &kernel)
}

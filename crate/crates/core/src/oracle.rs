//! Brute-force reference: exact unitary evolution of the two qubits plus a
//! few truncated bath oscillators under
//! `H = Σk ωk bk†bk + (σz1 + σz2) Σk λk (bk† + bk)`
//! with instantaneous `σx` pulses.
//!
//! `H` is block diagonal in the qubit `σz` basis, and within a block every
//! mode evolves independently under a displaced-oscillator Hamiltonian
//! `ω b†b + s λ (b† + b)` with `s ∈ {−2, 0, 2}`. Each of those small
//! tridiagonal matrices is diagonalized once; segment propagators are then
//! `V e^{−iEτ} Vᵀ` applied mode by mode.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{controlled_kernel_with, evolve, DensityMatrix, Matrix4, PhaseConvention};
use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigen;
use crate::math::{abs, exp, sqrt};
use crate::sequences::{PulseSchedule, Qubit};
use crate::spectra::{Mode, QuadratureConfig, SpectralDensity, ThermalSpec};

/// Largest allowed total Hilbert dimension `4 Π cutoff`.
pub const MAX_DIMENSION: usize = 1 << 20;

/// Default bound on the population reaching the top Fock level.
pub const DEFAULT_LEAKAGE_TOLERANCE: f64 = 1e-8;

/// Thermal configurations lighter than this are skipped.
const THERMAL_WEIGHT_FLOOR: f64 = 1e-16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct BathSimConfig {
    pub modes: Vec<Mode>,
    /// Fock states kept per mode.
    pub fock_cutoff: usize,
    pub thermal: ThermalSpec,
    /// `None` disables the leakage error (convergence sweeps over small
    /// cutoffs).
    pub leakage_tolerance: Option<f64>,
}

impl BathSimConfig {
    pub fn new(modes: Vec<Mode>, fock_cutoff: usize, thermal: ThermalSpec) -> Result<Self> {
        let config = Self { modes, fock_cutoff, thermal, leakage_tolerance: Some(DEFAULT_LEAKAGE_TOLERANCE) };
        config.validate()?;
        Ok(config)
    }

    pub fn single_mode(omega: f64, coupling: f64, fock_cutoff: usize) -> Result<Self> {
        Self::new(vec![Mode { omega, coupling }], fock_cutoff, ThermalSpec::zero_temperature())
    }

    pub fn without_leakage_check(mut self) -> Self {
        self.leakage_tolerance = None;
        self
    }

    pub fn bath_dimension(&self) -> usize {
        self.modes.iter().fold(1usize, |acc, _| acc.saturating_mul(self.fock_cutoff))
    }

    pub fn validate(&self) -> Result<()> {
        if self.fock_cutoff < 2 {
            return Err(Error::InvalidArgument("Fock cutoff must be at least 2"));
        }
        SpectralDensity::discrete(self.modes.clone())?;
        let dimension = self.bath_dimension().saturating_mul(4);
        if dimension > MAX_DIMENSION {
            return Err(Error::DimensionLimit { dimension, limit: MAX_DIMENSION });
        }
        Ok(())
    }

    /// The discrete spectral density of the simulated modes.
    pub fn density(&self) -> SpectralDensity {
        SpectralDensity::Discrete(self.modes.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleWarning {
    /// `2λ/ω · √cutoff > 0.5`: coherent displacement may approach the
    /// cutoff.
    LargeDisplacement { mode: usize, ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub state: DensityMatrix,
    /// Bath-averaged overlaps `K_{ab}` carrying `|a⟩⟨b|` to itself.
    pub kernel: Matrix4,
    /// Largest thermally weighted population found in the top Fock level of
    /// any mode at a segment boundary.
    pub boundary_population: f64,
    /// Largest `|‖ψ‖² − 1|` over all propagated states.
    pub norm_drift: f64,
    pub warnings: Vec<OracleWarning>,
}

/// Qubit `σz1 + σz2` eigenvalue of basis state `a`.
fn collective_spin(a: usize) -> i32 {
    let up1 = (a >> 1) & 1;
    let up2 = a & 1;
    2 * (up1 + up2) as i32 - 2
}

struct ModeSpectrum {
    /// Eigen-decompositions for `s = −2, 0, 2`.
    energies: [Vec<f64>; 3],
    vectors: [Vec<f64>; 3],
}

impl ModeSpectrum {
    fn new(mode: &Mode, cutoff: usize) -> Self {
        let diag: Vec<f64> = (0..cutoff).map(|k| mode.omega * k as f64).collect();
        let mut energies: [Vec<f64>; 3] = Default::default();
        let mut vectors: [Vec<f64>; 3] = Default::default();
        for (slot, s) in [-2.0, 0.0, 2.0].iter().enumerate() {
            let off: Vec<f64> = (1..cutoff).map(|k| s * mode.coupling * sqrt(k as f64)).collect();
            let eig = tridiagonal_eigen(&diag, &off);
            energies[slot] = eig.values;
            vectors[slot] = eig.vectors;
        }
        Self { energies, vectors }
    }

    /// `V e^{−iEτ} Vᵀ` for branch `slot`, row-major.
    fn propagator(&self, slot: usize, tau: f64) -> Vec<Complex64> {
        let n = self.energies[slot].len();
        let v = &self.vectors[slot];
        let phases: Vec<Complex64> = self.energies[slot]
            .iter()
            .map(|&e| Complex64::new(0.0, -e * tau).exp())
            .collect();
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, phase) in phases.iter().enumerate() {
                    acc += *phase * (v[i * n + k] * v[j * n + k]);
                }
                out[i * n + j] = acc;
            }
        }
        out
    }
}

/// Apply a single-mode operator to `mode` of a tensor-product bath vector.
fn apply_mode(state: &mut [Complex64], op: &[Complex64], cutoff: usize, mode: usize, modes: usize, scratch: &mut Vec<Complex64>) {
    let inner = cutoff.pow((modes - 1 - mode) as u32);
    let outer = state.len() / (inner * cutoff);
    scratch.resize(cutoff, ZERO);
    for o in 0..outer {
        for i in 0..inner {
            let base = o * cutoff * inner + i;
            for k in 0..cutoff {
                scratch[k] = state[base + k * inner];
            }
            for r in 0..cutoff {
                let row = &op[r * cutoff..(r + 1) * cutoff];
                let mut acc = ZERO;
                for (x, y) in row.iter().zip(scratch.iter()) {
                    acc += *x * *y;
                }
                state[base + r * inner] = acc;
            }
        }
    }
}

/// Qubit label plus bath amplitudes for each of the four blocks.
type Blocks = [Vec<Complex64>; 4];

fn norm_sqr(blocks: &Blocks) -> f64 {
    blocks.iter().flatten().map(|z| z.norm_sqr()).sum()
}

fn top_level_population(blocks: &Blocks, cutoff: usize, modes: usize) -> f64 {
    let mut pop = 0.0;
    for block in blocks {
        for (index, z) in block.iter().enumerate() {
            let mut rest = index;
            let mut at_top = false;
            for _ in 0..modes {
                at_top |= rest % cutoff == cutoff - 1;
                rest /= cutoff;
            }
            if at_top {
                pop += z.norm_sqr();
            }
        }
    }
    pop
}

fn flip(blocks: &mut Blocks, qubit: Qubit) {
    let bit = qubit.basis_bit();
    for a in 0..4 {
        let b = a ^ bit;
        if a < b {
            blocks.swap(a, b);
        }
    }
}

/// Thermal weights of every bath Fock configuration, truncated space.
fn thermal_configurations(bath: &BathSimConfig) -> Vec<(usize, f64)> {
    let c = bath.fock_cutoff;
    let dim = bath.bath_dimension();
    if bath.thermal.is_zero_temperature() {
        return vec![(0, 1.0)];
    }
    let beta = bath.thermal.beta();
    let per_mode: Vec<Vec<f64>> = bath
        .modes
        .iter()
        .map(|m| {
            let w: Vec<f64> = (0..c).map(|k| exp(-beta * m.omega * k as f64)).collect();
            let z: f64 = w.iter().sum();
            w.into_iter().map(|x| x / z).collect()
        })
        .collect();
    let mut out = Vec::new();
    for index in 0..dim {
        let mut rest = index;
        let mut p = 1.0;
        for k in (0..bath.modes.len()).rev() {
            p *= per_mode[k][rest % c];
            rest /= c;
        }
        if p > THERMAL_WEIGHT_FLOOR {
            out.push((index, p));
        }
    }
    let total: f64 = out.iter().map(|(_, p)| p).sum();
    for entry in &mut out {
        entry.1 /= total;
    }
    out
}

/// Reduced two-qubit state after evolving `rho0 ⊗ ρ_bath` for time `t`
/// under the schedule's pulses (at `fraction · t`), closing with a `σx` on
/// every qubit that received an odd number of pulses.
pub fn simulate(schedule: &PulseSchedule, bath: &BathSimConfig, rho0: &DensityMatrix, t: f64) -> Result<Simulation> {
    bath.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument("simulation time must be positive"));
    }
    let c = bath.fock_cutoff;
    let modes = bath.modes.len();
    let dim = bath.bath_dimension();

    let warnings: Vec<OracleWarning> = bath
        .modes
        .iter()
        .enumerate()
        .filter_map(|(k, m)| {
            let ratio = 2.0 * abs(m.coupling) / m.omega * sqrt(c as f64);
            (ratio > 0.5).then_some(OracleWarning::LargeDisplacement { mode: k, ratio })
        })
        .collect();

    let spectra: Vec<ModeSpectrum> = bath.modes.iter().map(|m| ModeSpectrum::new(m, c)).collect();

    // Segment lengths and the pulse closing each (None for the last).
    let mut segments: Vec<(f64, Option<Qubit>)> = Vec::with_capacity(schedule.len() + 1);
    let mut previous = 0.0;
    for p in schedule.pulses() {
        let at = p.fraction * t;
        segments.push((at - previous, Some(p.target)));
        previous = at;
    }
    segments.push((t - previous, None));

    let propagators: Vec<Vec<[Vec<Complex64>; 3]>> = segments
        .iter()
        .map(|&(tau, _)| {
            spectra
                .iter()
                .map(|s| [s.propagator(0, tau), s.propagator(1, tau), s.propagator(2, tau)])
                .collect()
        })
        .collect();

    let configurations = thermal_configurations(bath);
    let mut overlaps = [[[[ZERO; 4]; 4]; 4]; 4];
    let mut boundary = [0.0f64; 4];
    let mut boundary_track: Vec<[f64; 4]> = vec![[0.0; 4]; segments.len()];
    let mut norm_drift: f64 = 0.0;
    let mut scratch = Vec::with_capacity(c);

    for &(config, weight) in &configurations {
        let mut finals: Vec<Blocks> = Vec::with_capacity(4);
        for a0 in 0..4 {
            let mut blocks: Blocks = Default::default();
            for (a, block) in blocks.iter_mut().enumerate() {
                *block = vec![ZERO; dim];
                if a == a0 {
                    block[config] = Complex64::new(1.0, 0.0);
                }
            }
            for (seg, (&(_, pulse), props)) in segments.iter().zip(&propagators).enumerate() {
                for (a, block) in blocks.iter_mut().enumerate() {
                    if block.iter().all(|z| *z == ZERO) {
                        continue;
                    }
                    let slot = ((collective_spin(a) + 2) / 2) as usize;
                    for (mode, p) in props.iter().enumerate() {
                        apply_mode(block, &p[slot], c, mode, modes, &mut scratch);
                    }
                }
                boundary_track[seg][a0] += weight * top_level_population(&blocks, c, modes);
                if let Some(q) = pulse {
                    flip(&mut blocks, q);
                }
            }
            if schedule.n() % 2 == 1 {
                flip(&mut blocks, Qubit::First);
            }
            if schedule.m() % 2 == 1 {
                flip(&mut blocks, Qubit::Second);
            }
            norm_drift = norm_drift.max(abs(norm_sqr(&blocks) - 1.0));
            finals.push(blocks);
        }
        for a0 in 0..4 {
            for b0 in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        let mut acc = ZERO;
                        for (x, y) in finals[a0][a].iter().zip(&finals[b0][b]) {
                            acc += *x * y.conj();
                        }
                        overlaps[a0][b0][a][b] += acc * weight;
                    }
                }
            }
        }
    }
    for track in &boundary_track {
        for a0 in 0..4 {
            boundary[a0] = boundary[a0].max(track[a0]);
        }
    }
    let boundary_population = boundary.iter().copied().fold(0.0, f64::max);
    if let Some(tol) = bath.leakage_tolerance {
        if boundary_population > tol {
            return Err(Error::CutoffLeakage { leakage: boundary_population, tolerance: tol });
        }
    }

    let mut state = [[ZERO; 4]; 4];
    let mut kernel = [[ZERO; 4]; 4];
    for a0 in 0..4 {
        for b0 in 0..4 {
            kernel[a0][b0] = overlaps[a0][b0][a0][b0];
            for a in 0..4 {
                for b in 0..4 {
                    state[a][b] += rho0.get(a0, b0) * overlaps[a0][b0][a][b];
                }
            }
        }
    }
    Ok(Simulation {
        state: DensityMatrix::new(state)?,
        kernel,
        boundary_population,
        norm_drift,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub convention: PhaseConvention,
    /// `max |K_oracle − K_analytic|` over all 16 entries.
    pub kernel_deviation: f64,
    /// `max |ρ_oracle − ρ_analytic|` over all 16 entries.
    pub state_deviation: f64,
    /// `||K_oracle| − |K_analytic||` per entry.
    pub modulus_deviation: [[f64; 4]; 4],
    /// `|arg(K_oracle / K_analytic)|` per entry.
    pub phase_deviation: [[f64; 4]; 4],
    pub boundary_population: f64,
    pub norm_drift: f64,
}

impl DeviationReport {
    pub fn max_modulus_deviation(&self) -> f64 {
        self.modulus_deviation.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn max_phase_deviation(&self) -> f64 {
        self.phase_deviation.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub fn compare(
    schedule: &PulseSchedule,
    bath: &BathSimConfig,
    rho0: &DensityMatrix,
    t: f64,
    q: &QuadratureConfig,
) -> Result<DeviationReport> {
    compare_with(schedule, bath, rho0, t, q, PhaseConvention::default())
}

/// Oracle against the analytic kernel built from the same discrete modes.
pub fn compare_with(
    schedule: &PulseSchedule,
    bath: &BathSimConfig,
    rho0: &DensityMatrix,
    t: f64,
    q: &QuadratureConfig,
    convention: PhaseConvention,
) -> Result<DeviationReport> {
    let sim = simulate(schedule, bath, rho0, t)?;
    let kernel = controlled_kernel_with(schedule, &bath.density(), &bath.thermal, t, q, convention)?;
    let analytic = evolve(rho0, &kernel)?;

    let mut kernel_deviation: f64 = 0.0;
    let mut state_deviation: f64 = 0.0;
    let mut modulus_deviation = [[0.0; 4]; 4];
    let mut phase_deviation = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let (o, a) = (sim.kernel[i][j], kernel.get(i, j));
            kernel_deviation = kernel_deviation.max((o - a).norm());
            state_deviation = state_deviation.max((sim.state.get(i, j) - analytic.get(i, j)).norm());
            modulus_deviation[i][j] = abs(o.norm() - a.norm());
            phase_deviation[i][j] = if o.norm() > 0.0 && a.norm() > 0.0 { abs((o / a).arg()) } else { 0.0 };
        }
    }
    Ok(DeviationReport {
        convention,
        kernel_deviation,
        state_deviation,
        modulus_deviation,
        phase_deviation,
        boundary_population: sim.boundary_population,
        norm_drift: sim.norm_drift,
    })
}

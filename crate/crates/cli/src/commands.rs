//! The six subcommands, each producing its full output as a string.

use paritydd_core::dynamics::{controlled_kernel, evolve};
use paritydd_core::entanglement::{concurrence, partially_entangled_state};
use paritydd_core::filters::{identity_report, taylor_f, taylor_y, Identity, ScheduleFilters};
use paritydd_core::oracle::{compare, simulate, OracleWarning};
use paritydd_core::sequences::udd_fractions;
use paritydd_core::{
    Complex64, DensityMatrix, EvolutionKernel, PhaseConvention, PulseSchedule, QuadratureConfig, Qubit,
    SpectralDensity, ThermalSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{OracleSpec, Resolved};
use crate::format::{csv_row, sci};
use crate::CliError;

/// Output text plus whether every asserted check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

fn qubit_label(q: Qubit) -> &'static str {
    match q {
        Qubit::First => "q1",
        Qubit::Second => "q2",
    }
}

pub fn sequence(r: &Resolved) -> Result<Output, CliError> {
    let mut out = csv_row(["time", "fraction", "qubit"].map(String::from));
    for p in r.schedule.pulses() {
        out += &csv_row([sci(p.fraction * r.total_time), sci(p.fraction), qubit_label(p.target).into()]);
    }
    out += &format!("# first_order_residual,{}\n", sci(r.schedule.first_order_residual()));
    Ok(Output::ok(out))
}

pub fn filters(r: &Resolved) -> Result<Output, CliError> {
    let filters = ScheduleFilters::new(&r.schedule);
    let rows: Vec<String> = r
        .theta_grid
        .points()
        .par_iter()
        .map(|&theta| {
            let p = filters.pair(theta);
            csv_row([
                sci(theta),
                sci(p.first.f),
                sci(p.second.f),
                sci(p.first.y.norm()),
                sci(p.second.y.norm()),
                sci(p.cross().im),
            ])
        })
        .collect();
    let header = csv_row(["theta", "f_n", "f_m", "abs_y_n", "abs_y_m", "im_yn_ym_conj"].map(String::from));
    Ok(Output::ok(header + &rows.concat()))
}

fn pairs(m: &[[Complex64; 4]; 4]) -> Vec<Vec<[f64; 2]>> {
    m.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

#[derive(Serialize)]
struct KernelJson {
    time: f64,
    n: usize,
    m: usize,
    fractions_first: Vec<f64>,
    fractions_second: Vec<f64>,
    convention: &'static str,
    schedule_fingerprint: Option<u64>,
    entries: Vec<Vec<[f64; 2]>>,
    magnitudes: [[f64; 4]; 4],
}

pub fn kernel(r: &Resolved) -> Result<Output, CliError> {
    let k = controlled_kernel(&r.schedule, &r.density, &r.thermal, r.total_time, &r.quadrature)?;
    let doc = KernelJson {
        time: r.total_time,
        n: r.schedule.n(),
        m: r.schedule.m(),
        fractions_first: r.schedule.fractions(Qubit::First),
        fractions_second: r.schedule.fractions(Qubit::Second),
        convention: match k.convention() {
            PhaseConvention::Physical => "physical",
            PhaseConvention::Literal => "literal",
        },
        schedule_fingerprint: k.schedule_fingerprint(),
        entries: pairs(k.entries()),
        magnitudes: k.magnitudes(),
    };
    Ok(Output::ok(to_json(&doc)))
}

/// Kernel of the pulses applied up to `tau`, rescaled onto `[0, tau]`.
fn kernel_at(
    schedule: &PulseSchedule,
    density: &SpectralDensity,
    thermal: &ThermalSpec,
    tau: f64,
    q: &QuadratureConfig,
) -> Result<EvolutionKernel, CliError> {
    if tau == 0.0 {
        return Ok(EvolutionKernel::identity(0.0));
    }
    let effective = schedule.truncated(tau)?;
    Ok(controlled_kernel(&effective, density, thermal, tau, q)?)
}

pub fn concurrence_table(r: &Resolved) -> Result<Output, CliError> {
    let times = r.time_grid.points();
    if times.iter().any(|&tau| !(tau >= 0.0 && tau <= r.total_time)) {
        return Err(CliError::Config("time grid must lie within [0, total_time]".into()));
    }
    let rho0 = partially_entangled_state();
    let rows: Vec<String> = times
        .par_iter()
        .map(|&tau| -> Result<String, CliError> {
            let k = kernel_at(&r.schedule, &r.density, &r.thermal, tau, &r.quadrature)?;
            let c = concurrence(&evolve(&rho0, &k)?)?;
            let mut cells = vec![sci(tau), sci(c.value())];
            if r.kernel_magnitudes {
                cells.extend(k.magnitudes().iter().flatten().map(|&x| sci(x)));
            }
            Ok(csv_row(cells))
        })
        .collect::<Result<_, _>>()?;
    let mut header = vec!["tau".to_string(), "concurrence".to_string()];
    if r.kernel_magnitudes {
        header.extend((0..16).map(|k| format!("abs_k{}{}", k / 4, k % 4)));
    }
    Ok(Output::ok(csv_row(header) + &rows.concat()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    /// `"<="`: passes when `residual <= tolerance`; `">"`: when it exceeds it.
    pub relation: &'static str,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: String, residual: f64, tolerance: f64) -> Self {
        Check { name, residual, relation: "<=", tolerance, passed: residual <= tolerance }
    }

    fn above(name: String, residual: f64, tolerance: f64) -> Self {
        Check { name, residual, relation: ">", tolerance, passed: residual > tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub perturbation: f64,
    pub checks: Vec<Check>,
}

/// UDD fractions moved by `ε δ(1 − δ)`, which keeps them ordered inside
/// `(0, 1)` but breaks the mirror symmetry.
pub fn perturbed_udd(order: usize, epsilon: f64) -> Result<Vec<f64>, CliError> {
    Ok(udd_fractions(order)?.into_iter().map(|d| d + epsilon * d * (1.0 - d)).collect())
}

fn udd_side(order: usize, epsilon: f64) -> Result<Vec<f64>, CliError> {
    if order == 0 {
        Ok(Vec::new())
    } else {
        perturbed_udd(order, epsilon)
    }
}

fn pair_schedule(n: usize, m: usize, epsilon: f64) -> Result<PulseSchedule, CliError> {
    Ok(PulseSchedule::merge_allowing_coincidence(&udd_side(n, epsilon)?, &udd_side(m, epsilon)?, 1.0)?)
}

pub const IDENTITY_MAX_ORDER: usize = 10;
pub const IDENTITY_THETA_POINTS: usize = 200;
pub const IDENTITY_THETA_MAX: f64 = 20.0;
pub const TAYLOR_TOLERANCE: f64 = 1e-12;
pub const NONZERO_THRESHOLD: f64 = 1e-6;
pub const ORACLE_TOLERANCE: f64 = 1e-6;

pub fn identity_checks(epsilon: f64) -> Result<Vec<Check>, CliError> {
    let thetas: Vec<f64> = (0..IDENTITY_THETA_POINTS)
        .map(|k| IDENTITY_THETA_MAX * k as f64 / (IDENTITY_THETA_POINTS - 1) as f64)
        .collect();
    let pairs: Vec<(usize, usize)> = (0..=IDENTITY_MAX_ORDER)
        .flat_map(|n| (0..=IDENTITY_MAX_ORDER).map(move |m| (n, m)))
        .collect();
    let nested: Vec<Vec<Check>> = pairs
        .par_iter()
        .map(|&(n, m)| -> Result<Vec<Check>, CliError> {
            let report = identity_report(&pair_schedule(n, m, epsilon)?, &thetas);
            Ok(Identity::ALL
                .iter()
                .filter(|id| id.asserted_for(n, m))
                .map(|&id| Check::at_most(format!("identity:{}:n={n},m={m}", id.name()), report.worst(id), report.tolerance))
                .collect())
        })
        .collect::<Result<_, _>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn taylor_checks(epsilon: f64) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for k in 1..=IDENTITY_MAX_ORDER {
        let s = PulseSchedule::merge(&[], &perturbed_udd(k, epsilon)?, 1.0)?;
        let terms = taylor_y(&s, Qubit::Second, k + 1)?;
        let worst = terms[..=k].iter().map(|t| t.normalized()).fold(0.0, f64::max);
        checks.push(Check::at_most(format!("taylor:y_vanishes:udd={k}"), worst, TAYLOR_TOLERANCE));
        checks.push(Check::above(format!("taylor:y_leading:udd={k}"), terms[k + 1].normalized(), NONZERO_THRESHOLD));
    }
    for n in 0..=IDENTITY_MAX_ORDER {
        for m in 0..=IDENTITY_MAX_ORDER {
            if (n + m) % 2 == 0 {
                continue;
            }
            let s = pair_schedule(n, m, epsilon)?;
            let through = n + m + 1;
            let mut worst: f64 = 0.0;
            for side in [Qubit::First, Qubit::Second] {
                let terms = taylor_f(&s, side, through)?;
                worst = terms.iter().map(|t| t.normalized()).fold(worst, f64::max);
            }
            checks.push(Check::at_most(format!("taylor:f_vanishes:n={n},m={m},through={through}"), worst, TAYLOR_TOLERANCE));
        }
    }
    let s = pair_schedule(2, 4, epsilon)?;
    let f = taylor_f(&s, Qubit::Second, 3)?;
    checks.push(Check::at_most("taylor:f_order1:n=2,m=4".into(), f[1].normalized(), TAYLOR_TOLERANCE));
    checks.push(Check::above("taylor:f_order3:n=2,m=4".into(), f[3].normalized(), NONZERO_THRESHOLD));
    Ok(checks)
}

fn paper_spectra() -> Vec<(&'static str, SpectralDensity)> {
    vec![
        ("ohmic1", SpectralDensity::OhmicHardCutoff { cutoff: 1.0 }),
        ("ohmic5", SpectralDensity::OhmicHardCutoff { cutoff: 5.0 }),
        ("lorentzian", SpectralDensity::SoftLorentzian),
    ]
}

pub fn kernel_checks(thermal: &ThermalSpec, q: &QuadratureConfig) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let zero = ThermalSpec::zero_temperature();
    for (label, density) in paper_spectra() {
        // Soft densities diverge at finite temperature; check those at β = ∞.
        let th = if density.value(0.0) > 0.0 { &zero } else { thermal };
        for (n, m) in [(0, 0), (1, 2), (2, 3), (2, 4), (6, 7), (6, 8)] {
            let s = if n + m == 0 { PulseSchedule::empty(1.0)? } else { PulseSchedule::udd_pair(n, m, 1.0)? };
            let k = controlled_kernel(&s, &density, th, 1.0, q)?;
            let tag = format!("{label}:n={n},m={m}");
            let diag = (0..4).map(|i| (k.get(i, i) - Complex64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
            let excess = k.magnitudes().iter().flatten().map(|&x| x - 1.0).fold(0.0, f64::max);
            checks.push(Check::at_most(format!("kernel:diagonal:{tag}"), diag, 0.0));
            checks.push(Check::at_most(format!("kernel:hermitian:{tag}"), k.hermiticity_error(), 1e-12));
            checks.push(Check::at_most(format!("kernel:bounded:{tag}"), excess, 1e-15));
            checks.push(Check::at_most(format!("kernel:psd:{tag}"), (-k.min_eigenvalue()).max(0.0), 1e-12));
        }
        for t in [0.5, 1.0, 2.0] {
            let free = paritydd_core::dynamics::free_kernel(&density, &zero, t, q)?;
            let pulsed = controlled_kernel(&PulseSchedule::empty(t)?, &density, &zero, t, q)?;
            let worst = (0..16).map(|k| (free.get(k / 4, k % 4) - pulsed.get(k / 4, k % 4)).norm()).fold(0.0, f64::max);
            checks.push(Check::at_most(format!("kernel:zero_pulse_reduction:{label}:t={t}"), worst, 1e-9));
        }
    }
    Ok(checks)
}

pub fn oracle_checks(spec: &OracleSpec, thermal: &ThermalSpec, q: &QuadratureConfig) -> Result<Vec<Check>, CliError> {
    let bath = spec.build(*thermal)?;
    let rho0 = partially_entangled_state();
    let schedules = [(0, 0), (1, 2), (2, 3), (2, 4)];
    schedules
        .par_iter()
        .map(|&(n, m)| -> Result<Check, CliError> {
            let s = if n + m == 0 { PulseSchedule::empty(1.0)? } else { PulseSchedule::udd_pair(n, m, 1.0)? };
            let r = compare(&s, &bath, &rho0, 1.0, q)?;
            Ok(Check::at_most(format!("oracle:kernel_deviation:n={n},m={m}"), r.kernel_deviation, ORACLE_TOLERANCE))
        })
        .collect()
}

pub fn verify(r: &Resolved) -> Result<Output, CliError> {
    let epsilon = r.perturb;
    let mut checks = identity_checks(epsilon)?;
    checks.extend(taylor_checks(epsilon)?);
    checks.extend(kernel_checks(&r.thermal, &r.quadrature)?);
    checks.extend(oracle_checks(&r.oracle.clone().unwrap_or_default(), &r.thermal, &r.quadrature)?);
    let report = VerifyReport { passed: checks.iter().all(|c| c.passed), perturbation: epsilon, checks };
    Ok(Output { passed: report.passed, text: to_json(&report) })
}

#[derive(Serialize)]
struct OracleJson {
    passed: bool,
    tolerance: f64,
    n: usize,
    m: usize,
    time: f64,
    fock_cutoff: usize,
    kernel_deviation: f64,
    state_deviation: f64,
    max_modulus_deviation: f64,
    max_phase_deviation: f64,
    boundary_population: f64,
    norm_drift: f64,
    warnings: Vec<String>,
    oracle_kernel: Vec<Vec<[f64; 2]>>,
}

pub fn oracle(r: &Resolved) -> Result<Output, CliError> {
    let spec = r.oracle.clone().unwrap_or_default();
    let bath = spec.build(r.thermal)?;
    let rho0: DensityMatrix = partially_entangled_state();
    let sim = simulate(&r.schedule, &bath, &rho0, r.total_time)?;
    let report = compare(&r.schedule, &bath, &rho0, r.total_time, &r.quadrature)?;
    let doc = OracleJson {
        passed: report.kernel_deviation <= ORACLE_TOLERANCE,
        tolerance: ORACLE_TOLERANCE,
        n: r.schedule.n(),
        m: r.schedule.m(),
        time: r.total_time,
        fock_cutoff: spec.fock_cutoff,
        kernel_deviation: report.kernel_deviation,
        state_deviation: report.state_deviation,
        max_modulus_deviation: report.max_modulus_deviation(),
        max_phase_deviation: report.max_phase_deviation(),
        boundary_population: report.boundary_population,
        norm_drift: report.norm_drift,
        warnings: sim
            .warnings
            .iter()
            .map(|w| match w {
                OracleWarning::LargeDisplacement { mode, ratio } => {
                    format!("mode {mode}: 2*lambda/omega*sqrt(cutoff) = {ratio:.3} exceeds 0.5")
                }
            })
            .collect(),
        oracle_kernel: pairs(&sim.kernel),
    };
    Ok(Output { passed: doc.passed, text: to_json(&doc) })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable report");
    s.push('\n');
    s
}

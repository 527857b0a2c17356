//! Spectral densities and the bath integrals that feed the evolution kernel.
//!
//! Every integral has the form `P ∫ J(ω)/ω² g(ωt) [coth(βω/2)] dω` for some
//! filter `g`. Discrete baths are summed mode by mode; continuous densities
//! go through [`quadrature`] on panels no wider than a fraction of the
//! filter's oscillation period `2π/t`.

mod quadrature;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filters::{horner, ScheduleFilters};
use crate::math::{abs, coth, sin, CompensatedSum, PI};
use crate::sequences::{PulseSchedule, Qubit};

use quadrature::Tolerance;

/// One bath oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub coupling: f64,
}

/// `J(ω)` given on a grid, linearly interpolated, zero outside
/// `[omega[0], min(omega[last], upper_cutoff)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    omega: Vec<f64>,
    values: Vec<f64>,
    upper_cutoff: f64,
}

impl TabulatedDensity {
    pub fn new(omega: Vec<f64>, values: Vec<f64>, upper_cutoff: f64) -> Result<Self> {
        if omega.len() < 2 || omega.len() != values.len() {
            return Err(Error::InvalidArgument(
                "tabulated density needs at least two (omega, J) rows",
            ));
        }
        if omega[0] < 0.0 || omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "tabulated omega must be non-negative and strictly increasing",
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("tabulated J must be finite and non-negative"));
        }
        if !(upper_cutoff > omega[0]) {
            return Err(Error::InvalidArgument("upper cutoff must exceed the first omega"));
        }
        Ok(Self { omega, values, upper_cutoff })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn upper_cutoff(&self) -> f64 {
        self.upper_cutoff
    }

    fn upper(&self) -> f64 {
        f64::min(*self.omega.last().unwrap(), self.upper_cutoff)
    }

    fn value(&self, w: f64) -> f64 {
        if w < self.omega[0] || w > self.upper() {
            return 0.0;
        }
        let k = self.omega.partition_point(|&x| x <= w);
        if k == 0 {
            return self.values[0];
        }
        if k >= self.omega.len() {
            return *self.values.last().unwrap();
        }
        let (x0, x1) = (self.omega[k - 1], self.omega[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        y0 + (y1 - y0) * (w - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity {
    /// `J(ω) = ω Θ(cutoff − ω)`.
    OhmicHardCutoff { cutoff: f64 },
    /// `J(ω) = 1 / (1 + ω²)`.
    SoftLorentzian,
    /// `J(ω) = Σk λk² δ(ω − ωk)`.
    Discrete(Vec<Mode>),
    Tabulated(TabulatedDensity),
}

impl SpectralDensity {
    pub fn ohmic(cutoff: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidArgument("ohmic cutoff must be positive and finite"));
        }
        Ok(SpectralDensity::OhmicHardCutoff { cutoff })
    }

    pub fn discrete(modes: Vec<Mode>) -> Result<Self> {
        for (k, mode) in modes.iter().enumerate() {
            if !(mode.omega.is_finite() && mode.omega > 0.0) {
                return Err(Error::InvalidArgument("mode frequencies must be positive"));
            }
            if !mode.coupling.is_finite() {
                return Err(Error::InvalidArgument("mode couplings must be finite"));
            }
            if modes[..k].iter().any(|other| other.omega == mode.omega) {
                return Err(Error::InvalidArgument("mode frequencies must be distinct"));
            }
        }
        Ok(SpectralDensity::Discrete(modes))
    }

    /// Continuous `J(ω)`; zero for a discrete bath.
    pub fn value(&self, w: f64) -> f64 {
        match self {
            SpectralDensity::OhmicHardCutoff { cutoff } => {
                if w >= 0.0 && w <= *cutoff {
                    w
                } else {
                    0.0
                }
            }
            SpectralDensity::SoftLorentzian => 1.0 / (1.0 + w * w),
            SpectralDensity::Discrete(_) => 0.0,
            SpectralDensity::Tabulated(table) => table.value(w),
        }
    }

    fn at_origin(&self) -> f64 {
        match self {
            SpectralDensity::Discrete(_) => 0.0,
            other => other.value(0.0),
        }
    }
}

/// Inverse temperature; `β = ∞` is zero temperature (`coth ≡ 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    beta: f64,
}

impl Default for ThermalSpec {
    fn default() -> Self {
        Self::zero_temperature()
    }
}

impl ThermalSpec {
    pub fn zero_temperature() -> Self {
        Self { beta: f64::INFINITY }
    }

    pub fn with_beta(beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidArgument("inverse temperature must be positive"));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta == f64::INFINITY
    }

    /// `coth(βω/2)`.
    pub fn factor(&self, omega: f64) -> f64 {
        if self.is_zero_temperature() {
            1.0
        } else {
            coth(0.5 * self.beta * omega)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
    /// Maximum initial panel width as a fraction of `2π/t`.
    pub panel_fraction: f64,
    /// Infinite-support densities are truncated at `multiplier / t + knee`.
    pub tail_multiplier: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-13,
            max_subdivisions: 50_000,
            panel_fraction: 0.25,
            tail_multiplier: 200.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.absolute_tolerance > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerances must be positive"));
        }
        if !(self.panel_fraction > 0.0) {
            return Err(Error::InvalidArgument("panel fraction must be positive"));
        }
        if !(self.tail_multiplier > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument("invalid truncation or subdivision budget"));
        }
        Ok(())
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            relative: self.relative_tolerance,
            absolute: self.absolute_tolerance,
            max_panels: self.max_subdivisions,
        }
    }
}

/// Integral value with its quadrature error estimate and, for truncated
/// infinite-support densities, a rigorous bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub tail_bound: f64,
}

impl Estimate {
    pub fn total_error(&self) -> f64 {
        self.error + self.tail_bound
    }
}

/// Below this `θ` filters are evaluated through their Taylor series.
const SERIES_THETA: f64 = 1e-4;
const SERIES_ORDER: usize = 12;

/// `N` filters integrated together against the same bath weight.
struct IntegrandSet<G: Fn(f64) -> [f64; N], const N: usize> {
    filters: G,
    /// Taylor coefficients of each filter about `θ = 0`.
    series: [Vec<f64>; N],
    series_theta: f64,
    /// Multiply by `coth(βω/2)`.
    thermal: [bool; N],
    prefactor: [f64; N],
    /// `|g(θ)| ≤ bound.0 + bound.1 θ`.
    bound: [(f64, f64); N],
}

impl<G: Fn(f64) -> [f64; N], const N: usize> IntegrandSet<G, N> {
    /// `g(θ) / θ²` for each filter.
    fn over_theta_squared(&self, theta: f64) -> [f64; N] {
        if theta < self.series_theta {
            let mut out = [0.0; N];
            for (o, coefficients) in out.iter_mut().zip(&self.series) {
                let mut acc = horner(&coefficients[2.min(coefficients.len())..], theta);
                if theta > 0.0 {
                    acc += coefficients.get(1).copied().unwrap_or(0.0) / theta
                        + coefficients.first().copied().unwrap_or(0.0) / (theta * theta);
                }
                *o = acc;
            }
            out
        } else {
            let mut out = (self.filters)(theta);
            let inv = 1.0 / (theta * theta);
            for o in &mut out {
                *o *= inv;
            }
            out
        }
    }

    fn check_origin(&self, density: &SpectralDensity, thermal: &ThermalSpec) -> Result<()> {
        if density.at_origin() <= 0.0 {
            return Ok(());
        }
        for c in 0..N {
            let s = &self.series[c];
            let lowest_allowed = if self.thermal[c] && !thermal.is_zero_temperature() { 3 } else { 2 };
            if s.iter().take(lowest_allowed).any(|&a| a != 0.0) {
                return Err(Error::Divergence(if lowest_allowed == 3 {
                    "J(0) > 0 at finite temperature: the integrand grows like 1/ω at ω → 0"
                } else {
                    "J(0) > 0 and the filter does not vanish fast enough at ω → 0"
                }));
            }
        }
        Ok(())
    }

    fn evaluate(
        &self,
        density: &SpectralDensity,
        thermal: &ThermalSpec,
        t: f64,
        q: &QuadratureConfig,
    ) -> Result<[Estimate; N]> {
        q.validate()?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument("time must be non-negative and finite"));
        }
        if t == 0.0 {
            return Ok([Estimate::default(); N]);
        }
        let t2 = t * t;

        if let SpectralDensity::Discrete(modes) = density {
            let mut sums = [CompensatedSum::new(); N];
            for mode in modes {
                let g = self.over_theta_squared(mode.omega * t);
                let coth = thermal.factor(mode.omega);
                let weight = mode.coupling * mode.coupling * t2;
                for c in 0..N {
                    let th = if self.thermal[c] { coth } else { 1.0 };
                    sums[c].add(self.prefactor[c] * weight * g[c] * th);
                }
            }
            let mut out = [Estimate::default(); N];
            for c in 0..N {
                out[c].value = sums[c].value();
            }
            return Ok(out);
        }

        self.check_origin(density, thermal)?;

        let (upper, soft_tail) = match density {
            SpectralDensity::OhmicHardCutoff { cutoff } => (*cutoff, false),
            SpectralDensity::SoftLorentzian => (q.tail_multiplier / t + 1.0, true),
            SpectralDensity::Tabulated(table) => (table.upper(), false),
            SpectralDensity::Discrete(_) => unreachable!(),
        };

        let width = q.panel_fraction * 2.0 * PI / t;
        let panels = libm::ceil(upper / width).max(1.0) as usize;
        let mut breakpoints: Vec<f64> = (0..=panels).map(|k| upper * k as f64 / panels as f64).collect();
        if let SpectralDensity::Tabulated(table) = density {
            breakpoints.extend(table.omega().iter().copied().filter(|&w| w > 0.0 && w < upper));
            breakpoints.sort_by(f64::total_cmp);
            breakpoints.dedup();
        }

        let integrand = |w: f64| -> [f64; N] {
            let j = density.value(w);
            if j == 0.0 {
                return [0.0; N];
            }
            let g = self.over_theta_squared(w * t);
            let coth = thermal.factor(w);
            let mut out = [0.0; N];
            for c in 0..N {
                let th = if self.thermal[c] { coth } else { 1.0 };
                out[c] = self.prefactor[c] * t2 * j * g[c] * th;
            }
            out
        };
        let raw = quadrature::integrate(&integrand, &breakpoints, q.tolerance())?;

        let mut out = [Estimate::default(); N];
        for c in 0..N {
            out[c].value = raw[c].0;
            out[c].error = raw[c].1;
            if soft_tail {
                // J(ω) ≤ 1/ω² beyond the truncation point.
                let th = if self.thermal[c] { thermal.factor(upper) } else { 1.0 };
                let (g0, g1) = self.bound[c];
                out[c].tail_bound = abs(self.prefactor[c])
                    * th
                    * (g0 / (3.0 * upper * upper * upper) + g1 * t / (2.0 * upper * upper));
            }
        }
        Ok(out)
    }
}

fn free_delta_series() -> Vec<f64> {
    // θ − sin θ = Σ_{k odd ≥ 3} (−1)^{(k+1)/2} θ^k / k!
    let mut s = alloc::vec![0.0; 22];
    let mut factorial = 1.0;
    for k in 1..22 {
        factorial *= k as f64;
        if k % 2 == 1 && k >= 3 {
            s[k] = if (k / 2) % 2 == 1 { 1.0 } else { -1.0 } / factorial;
        }
    }
    s
}

fn free_gamma_series() -> Vec<f64> {
    // 2 sin²(θ/2) = 1 − cos θ = Σ_{k even ≥ 2} (−1)^{k/2+1} θ^k / k!
    let mut s = alloc::vec![0.0; 22];
    let mut factorial = 1.0;
    for k in 1..22 {
        factorial *= k as f64;
        if k % 2 == 0 {
            s[k] = if (k / 2) % 2 == 1 { 1.0 } else { -1.0 } / factorial;
        }
    }
    s
}

/// Free collective phase `Δ(t) = 4 ∫ J(ω) (ωt − sin ωt)/ω² dω`.
pub fn free_delta(density: &SpectralDensity, t: f64, q: &QuadratureConfig) -> Result<Estimate> {
    let set = IntegrandSet {
        filters: |theta: f64| [theta - sin(theta)],
        series: [free_delta_series()],
        series_theta: 0.5,
        thermal: [false],
        prefactor: [4.0],
        bound: [(1.0, 1.0)],
    };
    let [e] = set.evaluate(density, &ThermalSpec::zero_temperature(), t, q)?;
    Ok(e)
}

/// Free decay exponent `Γ(t) = 4 ∫ J(ω) 2 sin²(ωt/2)/ω² coth(βω/2) dω`.
pub fn free_gamma(
    density: &SpectralDensity,
    thermal: &ThermalSpec,
    t: f64,
    q: &QuadratureConfig,
) -> Result<Estimate> {
    let set = IntegrandSet {
        filters: |theta: f64| {
            let s = sin(0.5 * theta);
            [2.0 * s * s]
        },
        series: [free_gamma_series()],
        series_theta: 0.5,
        thermal: [true],
        prefactor: [4.0],
        bound: [(2.0, 0.0)],
    };
    let [e] = set.evaluate(density, thermal, t, q)?;
    Ok(e)
}

/// Phase and decay exponents of a pulse-controlled pair.
///
/// `*_first` are the qubit-1 (`n`-pulse) quantities `Δ_n, Γ_n`; `*_second`
/// the qubit-2 quantities `Δ_m, Γ_m`; `cross` is `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PulsedIntegrals {
    pub phase_first: Estimate,
    pub decay_first: Estimate,
    pub phase_second: Estimate,
    pub decay_second: Estimate,
    pub cross: Estimate,
}

impl PulsedIntegrals {
    pub fn phase(&self, side: Qubit) -> Estimate {
        match side {
            Qubit::First => self.phase_first,
            Qubit::Second => self.phase_second,
        }
    }

    pub fn decay(&self, side: Qubit) -> Estimate {
        match side {
            Qubit::First => self.decay_first,
            Qubit::Second => self.decay_second,
        }
    }

    pub fn max_error(&self) -> f64 {
        [self.phase_first, self.decay_first, self.phase_second, self.decay_second, self.cross]
            .iter()
            .map(Estimate::total_error)
            .fold(0.0, f64::max)
    }
}

/// Zero the lowest orders of a series when they vanish to rounding, so the
/// small-θ path does not divide noise by `θ²`.
fn clean_low_orders(series: &mut [f64], scale: f64) {
    for a in series.iter_mut().take(3) {
        if abs(*a) <= 1e-12 * scale {
            *a = 0.0;
        }
    }
}

/// `Δ_side = 4 ∫ J/ω² f_side`, `Γ_side = 2 ∫ J/ω² |y_side|² coth`,
/// `γ = 4 ∫ J/ω² Re(y_n y_m*) coth`.
pub fn pulsed_integrals(
    schedule: &PulseSchedule,
    density: &SpectralDensity,
    thermal: &ThermalSpec,
    t: f64,
    q: &QuadratureConfig,
) -> Result<PulsedIntegrals> {
    let filters = ScheduleFilters::new(schedule);
    let (n, m) = (schedule.n() as f64, schedule.m() as f64);

    let mut f_first: Vec<f64> = filters
        .taylor_f(Qubit::First, SERIES_ORDER)?
        .iter()
        .map(|t| t.coefficient)
        .collect();
    let mut f_second: Vec<f64> = filters
        .taylor_f(Qubit::Second, SERIES_ORDER)?
        .iter()
        .map(|t| t.coefficient)
        .collect();
    let [mut yy_first, mut yy_second, mut cross] = filters.decay_series(SERIES_ORDER)?;
    let phase_scale = 1.0 + 2.0 * (n + m) + 4.0 * n * m + 2.0 * abs(filters.residual());
    clean_low_orders(&mut f_first, phase_scale);
    clean_low_orders(&mut f_second, phase_scale);
    clean_low_orders(&mut yy_first, (2.0 + 2.0 * n) * (2.0 + 2.0 * n));
    clean_low_orders(&mut yy_second, (2.0 + 2.0 * m) * (2.0 + 2.0 * m));
    clean_low_orders(&mut cross, (2.0 + 2.0 * n) * (2.0 + 2.0 * m));

    let phase_bound = (1.0 + 2.0 * (n + m) + 4.0 * n * m, 2.0 * abs(filters.residual()));
    let set = IntegrandSet {
        filters: |theta: f64| {
            let p = filters.pair(theta);
            [
                p.first.f,
                p.first.y.norm_sqr(),
                p.second.f,
                p.second.y.norm_sqr(),
                p.cross().re,
            ]
        },
        series: [f_first, yy_first, f_second, yy_second, cross],
        series_theta: SERIES_THETA,
        thermal: [false, true, false, true, true],
        prefactor: [4.0, 2.0, 4.0, 2.0, 4.0],
        bound: [
            phase_bound,
            ((2.0 + 2.0 * n) * (2.0 + 2.0 * n), 0.0),
            phase_bound,
            ((2.0 + 2.0 * m) * (2.0 + 2.0 * m), 0.0),
            ((2.0 + 2.0 * n) * (2.0 + 2.0 * m), 0.0),
        ],
    };
    let [phase_first, decay_first, phase_second, decay_second, cross] =
        set.evaluate(density, thermal, t, q)?;
    Ok(PulsedIntegrals { phase_first, decay_first, phase_second, decay_second, cross })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn single_mode() -> SpectralDensity {
        SpectralDensity::discrete(vec![Mode { omega: 1.0, coupling: 0.1 }]).unwrap()
    }

    #[test]
    fn zero_time_gives_zero() {
        let zero = ThermalSpec::zero_temperature();
        for j in [SpectralDensity::ohmic(1.0).unwrap(), SpectralDensity::SoftLorentzian, single_mode()] {
            assert_eq!(free_delta(&j, 0.0, &q()).unwrap().value, 0.0);
            assert_eq!(free_gamma(&j, &zero, 0.0, &q()).unwrap().value, 0.0);
        }
    }

    #[test]
    fn single_mode_free_delta_by_hand() {
        let v = free_delta(&single_mode(), 1.0, &q()).unwrap().value;
        let expected = 4.0 * 0.01 * (1.0 - 1f64.sin());
        assert!((v - expected).abs() < 1e-16);
        assert!((v - 0.006342).abs() < 1e-6);
    }

    #[test]
    fn finite_temperature_with_flat_origin_diverges() {
        let beta = ThermalSpec::with_beta(10.0).unwrap();
        let r = free_gamma(&SpectralDensity::SoftLorentzian, &beta, 1.0, &q());
        assert!(matches!(r, Err(Error::Divergence(_))));
    }

    #[test]
    fn pulses_tame_finite_temperature_origin() {
        let beta = ThermalSpec::with_beta(10.0).unwrap();
        let s = PulseSchedule::udd_pair(2, 3, 1.0).unwrap();
        let r = pulsed_integrals(&s, &SpectralDensity::SoftLorentzian, &beta, 1.0, &q());
        assert!(r.is_ok(), "{r:?}");
        let empty = PulseSchedule::empty(1.0).unwrap();
        let r = pulsed_integrals(&empty, &SpectralDensity::SoftLorentzian, &beta, 1.0, &q());
        assert!(matches!(r, Err(Error::Divergence(_))));
    }

    #[test]
    fn validation_errors() {
        assert!(SpectralDensity::ohmic(0.0).is_err());
        assert!(SpectralDensity::discrete(vec![Mode { omega: 0.0, coupling: 0.1 }]).is_err());
        assert!(SpectralDensity::discrete(vec![
            Mode { omega: 1.0, coupling: 0.1 },
            Mode { omega: 1.0, coupling: 0.2 }
        ])
        .is_err());
        assert!(ThermalSpec::with_beta(0.0).is_err());
        assert!(TabulatedDensity::new(vec![0.0, 1.0], vec![1.0], 2.0).is_err());
        assert!(TabulatedDensity::new(vec![1.0, 0.5], vec![1.0, 1.0], 2.0).is_err());
        let bad = QuadratureConfig { panel_fraction: 0.0, ..QuadratureConfig::default() };
        assert!(free_delta(&SpectralDensity::SoftLorentzian, 1.0, &bad).is_err());
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let t = TabulatedDensity::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0], 1.5).unwrap();
        let j = SpectralDensity::Tabulated(t);
        assert_eq!(j.value(0.5), 1.0);
        assert_eq!(j.value(1.25), 1.5);
        assert_eq!(j.value(1.75), 0.0);
    }
}

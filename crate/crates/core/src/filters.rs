//! Decay and phase filter functions of a two-qubit pulse timetable.
//!
//! For the side that owns `k` pulses at fractions `δj` while the other qubit
//! owns pulses at `δi`, at dimensionless frequency `θ = ωt`:
//!
//! ```text
//! x(θ) = (−1)^k sin θ + 2 Σj (−1)^{j+1} sin(θ δj)
//! y(θ) = 1 + (−1)^{k+1} e^{iθ} + 2 Σj (−1)^j e^{iθ δj}
//! z(θ) = 2 Σi (−1)^{i+k+1} sin θ(δi − 1) + 4 Σi Σ{j: δi<δj} (−1)^{i+j} sin θ(δi − δj)
//! c(θ) = −2θ [Σr (−1)^{r−1} δr + (−1)^{N}/2]
//! f(θ) = x + z + c
//! ```
//!
//! `y` filters decoherence and `f` filters the bath-induced collective phase.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{abs, compensated_sum, cos, sign, sin, CompensatedSum};
use crate::sequences::{PulseSchedule, Qubit};

/// Highest Taylor order [`taylor_y`] and [`taylor_f`] accept.
pub const MAX_TAYLOR_ORDER: usize = 30;

/// Default tolerance of the identity checks, relative to
/// `max(1, |y_n| |y_m|)`.
pub const DEFAULT_IDENTITY_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterComponents {
    pub theta: f64,
    pub x: f64,
    pub y: Complex64,
    pub z: f64,
    pub c: f64,
    /// `x + z + c`.
    pub f: f64,
}

/// Both sides evaluated at one `θ`. `first` carries the `n`-quantities
/// (qubit 1), `second` the `m`-quantities (qubit 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairComponents {
    pub first: FilterComponents,
    pub second: FilterComponents,
}

impl PairComponents {
    /// `y_n y_m*`.
    pub fn cross(&self) -> Complex64 {
        self.first.y * self.second.y.conj()
    }
}

/// Pre-split view of a schedule for repeated filter evaluation.
#[derive(Debug, Clone)]
pub struct ScheduleFilters {
    first: Vec<f64>,
    second: Vec<f64>,
    residual: f64,
}

impl ScheduleFilters {
    pub fn new(schedule: &PulseSchedule) -> Self {
        Self {
            first: schedule.fractions(Qubit::First),
            second: schedule.fractions(Qubit::Second),
            residual: schedule.first_order_residual(),
        }
    }

    fn own_other(&self, side: Qubit) -> (&[f64], &[f64]) {
        match side {
            Qubit::First => (&self.first, &self.second),
            Qubit::Second => (&self.second, &self.first),
        }
    }

    pub fn count(&self, side: Qubit) -> usize {
        self.own_other(side).0.len()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn side(&self, side: Qubit, theta: f64) -> FilterComponents {
        let (own, other) = self.own_other(side);
        let k = own.len();

        let mut x = CompensatedSum::new();
        let mut y_re = CompensatedSum::new();
        let mut y_im = CompensatedSum::new();
        x.add(sign(k) * sin(theta));
        y_re.add(1.0);
        y_re.add(sign(k + 1) * cos(theta));
        y_im.add(sign(k + 1) * sin(theta));
        for (j, &d) in own.iter().enumerate() {
            let j = j + 1;
            let (s, c) = (sin(theta * d), cos(theta * d));
            x.add(2.0 * sign(j + 1) * s);
            y_re.add(2.0 * sign(j) * c);
            y_im.add(2.0 * sign(j) * s);
        }

        let mut z = CompensatedSum::new();
        for (i, &di) in other.iter().enumerate() {
            let i = i + 1;
            z.add(2.0 * sign(i + k + 1) * sin(theta * (di - 1.0)));
            for (j, &dj) in own.iter().enumerate() {
                if di < dj {
                    z.add(4.0 * sign(i + j + 1) * sin(theta * (di - dj)));
                }
            }
        }

        let c = -2.0 * theta * self.residual;
        let (x, z) = (x.value(), z.value());
        FilterComponents {
            theta,
            x,
            y: Complex64::new(y_re.value(), y_im.value()),
            z,
            c,
            f: compensated_sum([x, z, c]),
        }
    }

    pub fn pair(&self, theta: f64) -> PairComponents {
        PairComponents {
            first: self.side(Qubit::First, theta),
            second: self.side(Qubit::Second, theta),
        }
    }

    /// Taylor coefficients of `y` about `θ = 0`, orders `0..=up_to`.
    pub fn taylor_y(&self, side: Qubit, up_to: usize) -> Result<Vec<TaylorTerm<Complex64>>> {
        check_order(up_to)?;
        let (own, _) = self.own_other(side);
        let k = own.len();
        let mut factorial = 1.0;
        let mut i_pow = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(up_to + 1);
        for order in 0..=up_to {
            if order > 0 {
                factorial *= order as f64;
                i_pow *= Complex64::i();
            }
            let lead = if order == 0 { 1.0 } else { 0.0 };
            let terms = core::iter::once(lead)
                .chain(core::iter::once(sign(k + 1)))
                .chain(own.iter().enumerate().map(|(j, &d)| 2.0 * sign(j + 1) * powi(d, order)));
            let (moment, scale) = sum_and_scale(terms);
            out.push(TaylorTerm {
                order,
                coefficient: i_pow * (moment / factorial),
                scale: scale / factorial,
            });
        }
        Ok(out)
    }

    /// Taylor coefficients of `f = x + z + c` about `θ = 0`, orders
    /// `0..=up_to`. Even orders vanish identically.
    pub fn taylor_f(&self, side: Qubit, up_to: usize) -> Result<Vec<TaylorTerm<f64>>> {
        check_order(up_to)?;
        let (own, other) = self.own_other(side);
        let k = own.len();
        let mut factorial = 1.0;
        let mut out = Vec::with_capacity(up_to + 1);
        for order in 0..=up_to {
            if order > 0 {
                factorial *= order as f64;
            }
            if order % 2 == 0 {
                out.push(TaylorTerm { order, coefficient: 0.0, scale: 0.0 });
                continue;
            }
            let mut terms: Vec<f64> = Vec::with_capacity(2 + own.len() + other.len() * (1 + own.len()));
            terms.push(sign(k));
            terms.extend(own.iter().enumerate().map(|(j, &d)| 2.0 * sign(j) * powi(d, order)));
            for (i, &di) in other.iter().enumerate() {
                let i = i + 1;
                terms.push(2.0 * sign(i + k + 1) * powi(di - 1.0, order));
                for (j, &dj) in own.iter().enumerate() {
                    if di < dj {
                        terms.push(4.0 * sign(i + j + 1) * powi(di - dj, order));
                    }
                }
            }
            if order == 1 {
                terms.push(-2.0 * self.residual);
            }
            let (moment, scale) = sum_and_scale(terms);
            let alternating = sign((order - 1) / 2);
            out.push(TaylorTerm {
                order,
                coefficient: alternating * moment / factorial,
                scale: scale / factorial,
            });
        }
        Ok(out)
    }

    /// Series coefficients (orders `0..=order`) of the three real integrand
    /// filters: `|y_n|²`, `|y_m|²` and `Re(y_n y_m*)`.
    pub(crate) fn decay_series(&self, order: usize) -> Result<[Vec<f64>; 3]> {
        let yn: Vec<Complex64> = coefficients(self.taylor_y(Qubit::First, order)?);
        let ym: Vec<Complex64> = coefficients(self.taylor_y(Qubit::Second, order)?);
        let product = |a: &[Complex64], b: &[Complex64]| -> Vec<f64> {
            (0..=order)
                .map(|k| compensated_sum((0..=k).map(|p| (a[p] * b[k - p].conj()).re)))
                .collect()
        };
        Ok([product(&yn, &yn), product(&ym, &ym), product(&yn, &ym)])
    }
}

fn coefficients<T: Copy>(terms: Vec<TaylorTerm<T>>) -> Vec<T> {
    terms.into_iter().map(|t| t.coefficient).collect()
}

fn check_order(up_to: usize) -> Result<()> {
    if up_to > MAX_TAYLOR_ORDER {
        Err(Error::InvalidArgument("Taylor order exceeds 30"))
    } else {
        Ok(())
    }
}

fn sum_and_scale<I: IntoIterator<Item = f64>>(terms: I) -> (f64, f64) {
    let mut sum = CompensatedSum::new();
    let mut scale = CompensatedSum::new();
    for t in terms {
        sum.add(t);
        scale.add(abs(t));
    }
    (sum.value(), scale.value())
}

fn powi(base: f64, exp: usize) -> f64 {
    let (mut acc, mut b, mut e) = (1.0, base, exp);
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// One Taylor coefficient with the sum of absolute values of the terms that
/// produced it (same `1/k!` weighting), for cancellation-aware comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorTerm<T> {
    pub order: usize,
    pub coefficient: T,
    pub scale: f64,
}

impl TaylorTerm<f64> {
    pub fn normalized(&self) -> f64 {
        normalize(abs(self.coefficient), self.scale)
    }
}

impl TaylorTerm<Complex64> {
    pub fn normalized(&self) -> f64 {
        normalize(self.coefficient.norm(), self.scale)
    }
}

fn normalize(magnitude: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        magnitude / scale
    } else {
        magnitude
    }
}

/// Filter components of one side of `schedule` at `θ`.
pub fn eval_side(schedule: &PulseSchedule, side: Qubit, theta: f64) -> FilterComponents {
    ScheduleFilters::new(schedule).side(side, theta)
}

pub fn taylor_y(schedule: &PulseSchedule, side: Qubit, up_to: usize) -> Result<Vec<TaylorTerm<Complex64>>> {
    ScheduleFilters::new(schedule).taylor_y(side, up_to)
}

pub fn taylor_f(schedule: &PulseSchedule, side: Qubit, up_to: usize) -> Result<Vec<TaylorTerm<f64>>> {
    ScheduleFilters::new(schedule).taylor_f(side, up_to)
}

/// Lowest order whose coefficient survives `tolerance` after normalization,
/// if any up to `up_to`.
pub fn leading_order_y(schedule: &PulseSchedule, side: Qubit, up_to: usize, tolerance: f64) -> Result<Option<usize>> {
    Ok(taylor_y(schedule, side, up_to)?
        .iter()
        .find(|t| t.normalized() > tolerance)
        .map(|t| t.order))
}

pub fn leading_order_f(schedule: &PulseSchedule, side: Qubit, up_to: usize, tolerance: f64) -> Result<Option<usize>> {
    Ok(taylor_f(schedule, side, up_to)?
        .iter()
        .find(|t| t.normalized() > tolerance)
        .map(|t| t.order))
}

/// The algebraic relations between the two sides' filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `x_m + z_m + x_n + z_n = 0`; UDD pairs with `n + m` odd.
    ParitySum,
    /// `x_m + z_m − x_n − z_n = Im(y_n y_m*)`; every schedule.
    ParityDifference,
    /// `f_m + f_n = 0`; UDD pairs with `n + m` odd.
    PhaseAntisymmetry,
    /// `f_m = Im(y_n y_m*)/2`; UDD pairs with `n + m` odd.
    PhaseBound,
    /// `x_n + z_n = x_m + z_m`; UDD pairs of equal parity.
    EqualParityPhase,
    /// `Im(y_n y_m*) = 0`; UDD pairs of equal parity.
    RealCrossProduct,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::ParitySum,
        Identity::ParityDifference,
        Identity::PhaseAntisymmetry,
        Identity::PhaseBound,
        Identity::EqualParityPhase,
        Identity::RealCrossProduct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::ParitySum => "parity_sum",
            Identity::ParityDifference => "parity_difference",
            Identity::PhaseAntisymmetry => "phase_antisymmetry",
            Identity::PhaseBound => "phase_bound",
            Identity::EqualParityPhase => "equal_parity_phase",
            Identity::RealCrossProduct => "real_cross_product",
        }
    }

    /// Whether the relation is claimed for a pair with these pulse counts.
    pub fn asserted_for(self, n: usize, m: usize) -> bool {
        let odd_sum = (n + m) % 2 == 1;
        match self {
            Identity::ParityDifference => true,
            Identity::ParitySum | Identity::PhaseAntisymmetry | Identity::PhaseBound => odd_sum,
            Identity::EqualParityPhase | Identity::RealCrossProduct => !odd_sum,
        }
    }

    fn residual(self, p: &PairComponents) -> f64 {
        let (n, m) = (&p.first, &p.second);
        let im = p.cross().im;
        match self {
            Identity::ParitySum => abs(compensated_sum([m.x, m.z, n.x, n.z])),
            Identity::ParityDifference => abs(compensated_sum([m.x, m.z, -n.x, -n.z, -im])),
            Identity::PhaseAntisymmetry => abs(m.f + n.f),
            Identity::PhaseBound => abs(m.f - 0.5 * im),
            Identity::EqualParityPhase => abs(compensated_sum([n.x, n.z, -m.x, -m.z])),
            Identity::RealCrossProduct => abs(im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub identity: Identity,
    pub theta: f64,
    pub residual: f64,
    /// `max(1, |y_n| |y_m|)` at this `θ`.
    pub scale: f64,
    pub asserted: bool,
}

impl IdentityResidual {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub n: usize,
    pub m: usize,
    pub tolerance: f64,
    pub residuals: Vec<IdentityResidual>,
}

impl IdentityReport {
    /// Largest scaled residual of `identity` over the θ grid.
    pub fn worst(&self, identity: Identity) -> f64 {
        self.residuals
            .iter()
            .filter(|r| r.identity == identity)
            .map(IdentityResidual::relative)
            .fold(0.0, f64::max)
    }

    pub fn max_asserted(&self) -> f64 {
        self.residuals
            .iter()
            .filter(|r| r.asserted)
            .map(IdentityResidual::relative)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_asserted() <= self.tolerance
    }
}

/// Residuals of every [`Identity`] at each `θ`, with those not claimed for
/// the schedule's parity class flagged as not asserted.
pub fn identity_report(schedule: &PulseSchedule, thetas: &[f64]) -> IdentityReport {
    let filters = ScheduleFilters::new(schedule);
    let (n, m) = (schedule.n(), schedule.m());
    let mut residuals = Vec::with_capacity(thetas.len() * Identity::ALL.len());
    for &theta in thetas {
        let p = filters.pair(theta);
        let scale = f64::max(1.0, p.first.y.norm() * p.second.y.norm());
        for identity in Identity::ALL {
            residuals.push(IdentityResidual {
                identity,
                theta,
                residual: identity.residual(&p),
                scale,
                asserted: identity.asserted_for(n, m),
            });
        }
    }
    IdentityReport { n, m, tolerance: DEFAULT_IDENTITY_TOLERANCE, residuals }
}

/// Evaluate a real power series `Σ a_k θ^k` by Horner's rule.
pub(crate) fn horner(coefficients: &[f64], theta: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &a| acc * theta + a)
}

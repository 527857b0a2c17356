//! Pulse timetables for two independently controlled qubits.
//!
//! Pulse positions are stored as fractions of the cycle; absolute times are
//! `fraction * total_time`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{compensated_sum, sign, sin, PI};

/// Default minimum separation between pulses on different qubits.
pub const DEFAULT_GUARD_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qubit {
    First,
    Second,
}

impl Qubit {
    pub fn other(self) -> Qubit {
        match self {
            Qubit::First => Qubit::Second,
            Qubit::Second => Qubit::First,
        }
    }

    /// Bit of the basis index `|0⟩=|↓↓⟩ … |3⟩=|↑↑⟩` that this qubit controls.
    pub fn basis_bit(self) -> usize {
        match self {
            Qubit::First => 2,
            Qubit::Second => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub fraction: f64,
    pub target: Qubit,
}

/// Merged, time-ordered π-pulse timetable of both qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    total_time: f64,
    pulses: Vec<Pulse>,
    first_count: usize,
    second_count: usize,
    coincident: bool,
}

/// Uhrig fractions `sin²(jπ / (2(order+1)))`, `j = 1..=order`.
pub fn udd_fractions(order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::InvalidArgument("UDD order must be at least 1"));
    }
    let denom = 2.0 * (order as f64 + 1.0);
    let lower = |j: usize| {
        let s = sin(j as f64 * PI / denom);
        s * s
    };
    // The upper half is built as 1 − δ_{n+1−j} so the timetable is exactly
    // mirror symmetric and the centre pulse (odd n) sits at exactly 1/2.
    Ok((1..=order)
        .map(|j| match (2 * j).cmp(&(order + 1)) {
            core::cmp::Ordering::Less => lower(j),
            core::cmp::Ordering::Equal => 0.5,
            core::cmp::Ordering::Greater => 1.0 - lower(order + 1 - j),
        })
        .collect())
}

fn validate_fractions(fractions: &[f64]) -> Result<()> {
    let mut previous = 0.0;
    for &f in fractions {
        if !f.is_finite() || f <= 0.0 || f >= 1.0 {
            return Err(Error::InvalidArgument(
                "pulse fractions must lie in the open interval (0, 1)",
            ));
        }
        if f <= previous {
            return Err(Error::InvalidArgument(
                "pulse fractions must be strictly increasing",
            ));
        }
        previous = f;
    }
    Ok(())
}

impl PulseSchedule {
    /// Schedule without pulses.
    pub fn empty(total_time: f64) -> Result<Self> {
        Self::merge(&[], &[], total_time)
    }

    /// Merge per-qubit fraction lists into one timetable, rejecting pulses on
    /// the two qubits that fall within [`DEFAULT_GUARD_BAND`] of each other.
    pub fn merge(first: &[f64], second: &[f64], total_time: f64) -> Result<Self> {
        Self::merge_with_guard(first, second, total_time, DEFAULT_GUARD_BAND)
    }

    pub fn merge_with_guard(
        first: &[f64],
        second: &[f64],
        total_time: f64,
        guard_band: f64,
    ) -> Result<Self> {
        if !(guard_band >= 0.0) {
            return Err(Error::InvalidArgument("guard band must be non-negative"));
        }
        let schedule = Self::build(first, second, total_time)?;
        for pair in schedule.pulses.windows(2) {
            let separation = pair[1].fraction - pair[0].fraction;
            if pair[0].target != pair[1].target && separation <= guard_band {
                return Err(Error::CoincidentPulses {
                    fraction: pair[0].fraction,
                    separation,
                });
            }
        }
        Ok(schedule)
    }

    /// Merge that tolerates simultaneous pulses on the two qubits.
    ///
    /// The filter functions stay well defined (coincident pairs contribute
    /// `sin 0 = 0` and commute in the alternating sums), so parity identities
    /// can be swept over every UDD pair. The dynamics module rejects such
    /// schedules.
    pub fn merge_allowing_coincidence(
        first: &[f64],
        second: &[f64],
        total_time: f64,
    ) -> Result<Self> {
        Self::build(first, second, total_time)
    }

    /// `UDD(n)` on the first qubit and `UDD(m)` on the second; an order of 0
    /// leaves that qubit free.
    pub fn udd_pair(n: usize, m: usize, total_time: f64) -> Result<Self> {
        let first = if n == 0 { Vec::new() } else { udd_fractions(n)? };
        let second = if m == 0 { Vec::new() } else { udd_fractions(m)? };
        Self::merge(&first, &second, total_time)
    }

    /// As [`udd_pair`](Self::udd_pair) but through
    /// [`merge_allowing_coincidence`](Self::merge_allowing_coincidence).
    pub fn udd_pair_allowing_coincidence(n: usize, m: usize, total_time: f64) -> Result<Self> {
        let first = if n == 0 { Vec::new() } else { udd_fractions(n)? };
        let second = if m == 0 { Vec::new() } else { udd_fractions(m)? };
        Self::merge_allowing_coincidence(&first, &second, total_time)
    }

    fn build(first: &[f64], second: &[f64], total_time: f64) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::InvalidArgument("total time must be positive and finite"));
        }
        validate_fractions(first)?;
        validate_fractions(second)?;

        let mut pulses = Vec::with_capacity(first.len() + second.len());
        let (mut i, mut j) = (0, 0);
        let mut coincident = false;
        while i < first.len() || j < second.len() {
            let take_first = match (first.get(i), second.get(j)) {
                (Some(a), Some(b)) => {
                    coincident |= a == b;
                    a <= b
                }
                (Some(_), None) => true,
                _ => false,
            };
            if take_first {
                pulses.push(Pulse { fraction: first[i], target: Qubit::First });
                i += 1;
            } else {
                pulses.push(Pulse { fraction: second[j], target: Qubit::Second });
                j += 1;
            }
        }
        Ok(Self {
            total_time,
            pulses,
            first_count: first.len(),
            second_count: second.len(),
            coincident,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Number of pulses on the first qubit (`n`).
    pub fn n(&self) -> usize {
        self.first_count
    }

    /// Number of pulses on the second qubit (`m`).
    pub fn m(&self) -> usize {
        self.second_count
    }

    pub fn count(&self, qubit: Qubit) -> usize {
        match qubit {
            Qubit::First => self.first_count,
            Qubit::Second => self.second_count,
        }
    }

    /// True when some pulse on one qubit shares its exact fraction with a
    /// pulse on the other.
    pub fn has_coincident_pulses(&self) -> bool {
        self.coincident
    }

    /// Fractions of the pulses applied to `qubit`, in time order.
    pub fn fractions(&self, qubit: Qubit) -> Vec<f64> {
        self.pulses
            .iter()
            .filter(|p| p.target == qubit)
            .map(|p| p.fraction)
            .collect()
    }

    /// Merged fractions in time order.
    pub fn merged_fractions(&self) -> Vec<f64> {
        self.pulses.iter().map(|p| p.fraction).collect()
    }

    /// Absolute pulse times with their targets.
    pub fn times(&self) -> impl Iterator<Item = (f64, Qubit)> + '_ {
        self.pulses.iter().map(move |p| (p.fraction * self.total_time, p.target))
    }

    /// `δ1 − δ2 + … + (−1)^{N−1} δN + (−1)^N / 2` over the merged order.
    ///
    /// Vanishing residual is the first-order condition for the collective
    /// `σz1σz2` phase.
    pub fn first_order_residual(&self) -> f64 {
        let n = self.pulses.len();
        compensated_sum(
            self.pulses
                .iter()
                .enumerate()
                .map(|(r, p)| sign(r) * p.fraction)
                .chain(core::iter::once(sign(n) * 0.5)),
        )
    }

    /// The pulses applied strictly before `tau`, rescaled onto a cycle of
    /// length `tau`.
    ///
    /// A pulse landing exactly at `tau` only flips the frame, which the
    /// closing frame-restoring pulse undoes, so it is dropped.
    pub fn truncated(&self, tau: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau <= self.total_time) {
            return Err(Error::OutOfRange { time: tau, total: self.total_time });
        }
        if tau == 0.0 {
            return Err(Error::InvalidArgument("cannot truncate a schedule to zero length"));
        }
        let scale = self.total_time / tau;
        let rescale = |q: Qubit| -> Vec<f64> {
            self.pulses
                .iter()
                .filter(|p| p.target == q && p.fraction * self.total_time < tau)
                .map(|p| p.fraction * scale)
                .filter(|&f| f < 1.0)
                .collect()
        };
        let first = rescale(Qubit::First);
        let second = rescale(Qubit::Second);
        let mut out = Self::build(&first, &second, tau)?;
        out.coincident |= self.coincident;
        Ok(out)
    }

    /// Stable 64-bit fingerprint of the timetable (FNV-1a over fraction bits
    /// and targets).
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        feed(&self.total_time.to_bits().to_le_bytes());
        for p in &self.pulses {
            feed(&p.fraction.to_bits().to_le_bytes());
            feed(&[p.target as u8]);
        }
        hash
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn udd_low_orders() {
        assert_eq!(udd_fractions(1).unwrap().len(), 1);
        assert!(close(udd_fractions(1).unwrap()[0], 0.5, 1e-16));
        let two = udd_fractions(2).unwrap();
        assert!(close(two[0], 0.25, 1e-16) && close(two[1], 0.75, 1e-15));
    }

    #[test]
    fn udd_four_matches_closed_form() {
        // sin²(kπ/10) evaluated independently through cos: sin²x = (1 − cos 2x)/2.
        let expected: Vec<f64> = (1..=4)
            .map(|k| (1.0 - (2.0 * k as f64 * core::f64::consts::PI / 10.0).cos()) / 2.0)
            .collect();
        let got = udd_fractions(4).unwrap();
        for (g, e) in got.iter().zip(&expected) {
            assert!(close(*g, *e, 1e-15), "{g} vs {e}");
        }
        assert!(close(got[0], 0.09549, 1e-5));
        assert!(close(got[3], 0.90451, 1e-5));
    }

    #[test]
    fn udd_order_zero_rejected() {
        assert!(matches!(udd_fractions(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn merge_interleaves_with_attribution() {
        let s = PulseSchedule::merge(&[0.5], &[0.25, 0.75], 1.0).unwrap();
        let got: Vec<(f64, Qubit)> = s.pulses().iter().map(|p| (p.fraction, p.target)).collect();
        assert_eq!(
            got,
            vec![(0.25, Qubit::Second), (0.5, Qubit::First), (0.75, Qubit::Second)]
        );
        assert_eq!((s.n(), s.m()), (1, 2));
    }

    #[test]
    fn merge_one_sided() {
        let s = PulseSchedule::merge(&[], &[0.5], 1.0).unwrap();
        assert_eq!((s.n(), s.m()), (0, 1));
    }

    #[test]
    fn merge_rejects_identical_lists() {
        let d = udd_fractions(2).unwrap();
        assert!(matches!(
            PulseSchedule::merge(&d, &d, 1.0),
            Err(Error::CoincidentPulses { .. })
        ));
    }

    #[test]
    fn merge_rejects_pulses_inside_guard_band() {
        let err = PulseSchedule::merge(&[0.5], &[0.5 + 1e-13], 1.0).unwrap_err();
        assert!(matches!(err, Error::CoincidentPulses { .. }));
        assert!(PulseSchedule::merge_with_guard(&[0.5], &[0.5 + 1e-13], 1.0, 0.0).is_ok());
    }

    #[test]
    fn merge_rejects_bad_lists() {
        assert!(PulseSchedule::merge(&[0.5, 0.4], &[], 1.0).is_err());
        assert!(PulseSchedule::merge(&[1.0], &[], 1.0).is_err());
        assert!(PulseSchedule::merge(&[0.0], &[], 1.0).is_err());
        assert!(PulseSchedule::merge(&[0.5], &[], 0.0).is_err());
        assert!(PulseSchedule::merge(&[f64::NAN], &[], 1.0).is_err());
    }

    #[test]
    fn permissive_merge_flags_coincidence() {
        let s = PulseSchedule::udd_pair_allowing_coincidence(1, 3, 1.0).unwrap();
        assert!(s.has_coincident_pulses());
        assert!(PulseSchedule::udd_pair(1, 3, 1.0).is_err());
    }

    #[test]
    fn residual_examples() {
        let s12 = PulseSchedule::udd_pair(1, 2, 1.0).unwrap();
        assert!(s12.first_order_residual().abs() < 1e-15);
        let s24 = PulseSchedule::udd_pair(2, 4, 1.0).unwrap();
        // 0.0955 − 0.25 + 0.3455 − 0.6545 + 0.75 − 0.9045 + 0.5, by hand.
        assert!(close(s24.first_order_residual(), -0.1180, 1e-4));
        let single = PulseSchedule::merge(&[0.5], &[], 1.0).unwrap();
        assert_eq!(single.first_order_residual(), 0.0);
        assert_eq!(PulseSchedule::empty(1.0).unwrap().first_order_residual(), 0.5);
    }

    #[test]
    fn truncation_rescales_applied_pulses() {
        let s = PulseSchedule::udd_pair(1, 2, 2.0).unwrap();
        // pulses at absolute 0.5 (q2), 1.0 (q1), 1.5 (q2)
        let t = s.truncated(1.0).unwrap();
        assert_eq!(t.total_time(), 1.0);
        assert!(close(t.fractions(Qubit::Second)[0], 0.5, 1e-15));
        assert!(t.fractions(Qubit::First).is_empty());
        let early = s.truncated(0.25).unwrap();
        assert!(early.is_empty());
        assert!(s.truncated(2.5).is_err());
        assert_eq!(s.truncated(2.0).unwrap().pulses(), s.pulses());
    }

    #[test]
    fn fingerprint_distinguishes_schedules() {
        let a = PulseSchedule::udd_pair(1, 2, 1.0).unwrap();
        let b = PulseSchedule::udd_pair(2, 1, 1.0).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }
}

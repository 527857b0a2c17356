use num_complex::Complex64;
use paritydd_core::filters::{eval_side, identity_report, leading_order_f, leading_order_y, taylor_f, taylor_y, Identity};
use paritydd_core::{PulseSchedule, Qubit};
use proptest::prelude::*;

fn sorted_fractions(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..0.999, 0..max_len).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    })
}

fn sgn(k: usize) -> f64 {
    if k % 2 == 0 { 1.0 } else { -1.0 }
}

fn grid(count: usize, max: f64) -> Vec<f64> {
    (0..count).map(|k| max * k as f64 / (count - 1) as f64).collect()
}

/// z for `own` rebuilt by walking the merged timetable once, carrying the
/// alternating phasor sum of the other side's pulses seen so far.
fn z_by_walk(s: &PulseSchedule, own: Qubit, theta: f64) -> f64 {
    let k = s.count(own);
    let mut seen = Complex64::new(0.0, 0.0);
    let mut other_index = 0usize;
    let mut own_index = 0usize;
    let mut z = 0.0;
    for p in s.pulses() {
        if p.target == own {
            own_index += 1;
            let rotated = seen * Complex64::new(0.0, -theta * p.fraction).exp();
            z += 4.0 * sgn(own_index) * rotated.im;
        } else {
            other_index += 1;
            seen += Complex64::new(0.0, theta * p.fraction).exp() * sgn(other_index);
            z += 2.0 * sgn(other_index + k + 1) * (theta * (p.fraction - 1.0)).sin();
        }
    }
    z
}

#[test]
fn odd_sum_identities_hold() {
    let thetas = grid(200, 20.0);
    for n in 0..=10 {
        for m in 0..=10 {
            if (n + m) % 2 == 0 {
                continue;
            }
            let s = PulseSchedule::udd_pair_allowing_coincidence(n, m, 1.0).unwrap();
            let r = identity_report(&s, &thetas);
            for id in [Identity::ParitySum, Identity::ParityDifference, Identity::PhaseAntisymmetry, Identity::PhaseBound] {
                assert!(r.worst(id) <= 1e-11, "({n},{m}) {}: {:e}", id.name(), r.worst(id));
            }
            assert!(r.passed());
        }
    }
}

#[test]
fn equal_parity_identities_hold() {
    let thetas = grid(200, 20.0);
    for n in 0..=10 {
        for m in 0..=10 {
            if (n + m) % 2 == 1 {
                continue;
            }
            let s = PulseSchedule::udd_pair_allowing_coincidence(n, m, 1.0).unwrap();
            let r = identity_report(&s, &thetas);
            assert!(r.worst(Identity::EqualParityPhase) <= 1e-11, "({n},{m})");
            assert!(r.worst(Identity::RealCrossProduct) <= 1e-11, "({n},{m})");
            assert!(r.passed());
        }
    }
}

#[test]
fn odd_sum_relation_fails_for_equal_parity() {
    let s = PulseSchedule::udd_pair(2, 4, 1.0).unwrap();
    let r = identity_report(&s, &grid(50, 20.0));
    assert!(r.worst(Identity::ParitySum) > 1e-3);
    assert!(r.residuals.iter().filter(|x| x.identity == Identity::ParitySum).all(|x| !x.asserted));
}

#[test]
fn zero_theta_has_zero_residuals() {
    let s = PulseSchedule::udd_pair(2, 3, 1.0).unwrap();
    let r = identity_report(&s, &[0.0]);
    assert!(r.residuals.iter().all(|x| x.residual == 0.0));
}

#[test]
fn udd_y_series_vanishes_through_order() {
    for k in 1..=10 {
        let s = PulseSchedule::merge(&[], &paritydd_core::sequences::udd_fractions(k).unwrap(), 1.0).unwrap();
        let terms = taylor_y(&s, Qubit::Second, k + 1).unwrap();
        for t in &terms[..=k] {
            assert!(t.normalized() <= 1e-12, "UDD({k}) order {}: {:e}", t.order, t.normalized());
        }
        assert!(terms[k + 1].normalized() > 1e-6, "UDD({k}) order {}", k + 1);
        assert_eq!(leading_order_y(&s, Qubit::Second, 20, 1e-12).unwrap(), Some(k + 1));
    }
}

#[test]
fn odd_sum_f_series_order() {
    for n in 1..=6 {
        for m in 1..=6 {
            if (n + m) % 2 == 0 {
                continue;
            }
            let s = PulseSchedule::udd_pair_allowing_coincidence(n, m, 1.0).unwrap();
            for side in [Qubit::First, Qubit::Second] {
                let terms = taylor_f(&s, side, n + m + 2).unwrap();
                for t in &terms[..=n + m + 1] {
                    assert!(t.normalized() <= 1e-12, "({n},{m}) order {}", t.order);
                }
            }
        }
    }
    let s = PulseSchedule::udd_pair(2, 3, 1.0).unwrap();
    assert_eq!(leading_order_f(&s, Qubit::Second, 20, 1e-12).unwrap(), Some(7));
}

#[test]
fn series_matches_direct_evaluation() {
    let s = PulseSchedule::udd_pair(3, 4, 1.0).unwrap();
    for side in [Qubit::First, Qubit::Second] {
        let y = taylor_y(&s, side, 30).unwrap();
        let f = taylor_f(&s, side, 30).unwrap();
        for &theta in &[0.05, 0.3, 1.0] {
            let direct = eval_side(&s, side, theta);
            let ys: Complex64 = y.iter().map(|t| t.coefficient * theta.powi(t.order as i32)).sum();
            let fs: f64 = f.iter().map(|t| t.coefficient * theta.powi(t.order as i32)).sum();
            assert!((ys - direct.y).norm() < 1e-13, "θ = {theta}");
            assert!((fs - direct.f).abs() < 1e-13, "θ = {theta}");
        }
    }
}

#[test]
fn one_two_phase_values_agree() {
    let s = PulseSchedule::udd_pair(1, 2, 1.0).unwrap();
    let (n, m) = (eval_side(&s, Qubit::First, 1.0), eval_side(&s, Qubit::Second, 1.0));
    let im = (n.y * m.y.conj()).im;
    assert!((m.f + n.f).abs() < 1e-15);
    assert!((m.f - im / 2.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn z_agrees_with_timetable_walk(a in sorted_fractions(9), b in sorted_fractions(9), theta in 0.0f64..25.0) {
        let s = PulseSchedule::merge(&a, &b, 1.0);
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        for side in [Qubit::First, Qubit::Second] {
            let z = eval_side(&s, side, theta).z;
            prop_assert!((z - z_by_walk(&s, side, theta)).abs() < 1e-11, "{z} vs walk");
        }
    }

    #[test]
    fn ordered_double_sums_partition_the_full_sum(a in sorted_fractions(9), b in sorted_fractions(9), theta in 0.0f64..25.0) {
        let s = PulseSchedule::merge(&a, &b, 1.0);
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        let (n, m) = (a.len(), b.len());
        // z_m − z_n isolates both ordered double sums; strip the single sums.
        let zm = eval_side(&s, Qubit::Second, theta).z;
        let zn = eval_side(&s, Qubit::First, theta).z;
        let single_m: f64 = a.iter().enumerate().map(|(i, d)| 2.0 * sgn(i + 1 + m + 1) * (theta * (d - 1.0)).sin()).sum();
        let single_n: f64 = b.iter().enumerate().map(|(j, d)| 2.0 * sgn(j + 1 + n + 1) * (theta * (d - 1.0)).sin()).sum();
        let mut full = 0.0;
        for (i, di) in a.iter().enumerate() {
            for (j, dj) in b.iter().enumerate() {
                full += sgn(i + j + 2) * (theta * (di - dj)).sin();
            }
        }
        prop_assert!(((zm - single_m) - (zn - single_n) - 4.0 * full).abs() < 1e-12);
    }

    #[test]
    fn parity_difference_holds_for_any_schedule(a in sorted_fractions(9), b in sorted_fractions(9), theta in 0.0f64..25.0) {
        let s = PulseSchedule::merge(&a, &b, 1.0);
        prop_assume!(s.is_ok());
        let r = identity_report(&s.unwrap(), &[theta]);
        prop_assert!(r.worst(Identity::ParityDifference) <= 1e-11);
    }

    #[test]
    fn y_vanishes_at_origin(a in sorted_fractions(9), b in sorted_fractions(9)) {
        let s = PulseSchedule::merge(&a, &b, 1.0);
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        for side in [Qubit::First, Qubit::Second] {
            let c = eval_side(&s, side, 0.0);
            prop_assert!(c.y.norm() < 1e-15 && c.f == 0.0);
        }
    }
}

use num_complex::Complex64;
use paritydd_core::entanglement::partially_entangled_state;
use paritydd_core::oracle::{compare, compare_with, simulate, BathSimConfig};
use paritydd_core::spectra::{free_gamma, pulsed_integrals, Mode};
use paritydd_core::{DensityMatrix, PhaseConvention, PulseSchedule, QuadratureConfig, SpectralDensity, ThermalSpec};
use proptest::prelude::*;

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn free_single_mode_decay() {
    let bath = BathSimConfig::single_mode(1.0, 0.1, 20).unwrap();
    let rho = partially_entangled_state();
    let sim = simulate(&PulseSchedule::empty(1.0).unwrap(), &bath, &rho, 1.0).unwrap();
    let j = SpectralDensity::discrete(vec![Mode { omega: 1.0, coupling: 0.1 }]).unwrap();
    let gamma = free_gamma(&j, &ThermalSpec::zero_temperature(), 1.0, &q()).unwrap().value;
    let ratio = sim.state.get(0, 1).norm() / rho.get(0, 1).norm();
    assert!((ratio - (-gamma).exp()).abs() <= 1e-8);
}

#[test]
fn populations_are_untouched() {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, p) in [0.4, 0.3, 0.2, 0.1].iter().enumerate() {
        m[i][i] = Complex64::new(*p, 0.0);
    }
    let rho = DensityMatrix::new(m).unwrap();
    let bath = BathSimConfig::single_mode(1.0, 0.15, 24).unwrap();
    let s = PulseSchedule::udd_pair(2, 3, 1.0).unwrap();
    let sim = simulate(&s, &bath, &rho, 1.0).unwrap();
    for i in 0..4 {
        assert!((sim.state.get(i, i) - rho.get(i, i)).norm() <= 1e-12);
    }
    assert!(sim.norm_drift <= 1e-12);
}

#[test]
fn decoupled_bath_gives_zero_deviation() {
    let bath = BathSimConfig::single_mode(1.0, 0.0, 8).unwrap();
    let r = compare(&PulseSchedule::udd_pair(1, 2, 1.0).unwrap(), &bath, &partially_entangled_state(), 1.0, &q()).unwrap();
    assert_eq!(r.kernel_deviation, 0.0);
    assert_eq!(r.state_deviation, 0.0);
}

#[test]
fn truncation_convergence() {
    let s = PulseSchedule::udd_pair(1, 2, 1.0).unwrap();
    let rho = partially_entangled_state();
    let dev: Vec<f64> = [10, 20]
        .iter()
        .map(|&c| {
            let bath = BathSimConfig::single_mode(1.0, 0.1, c).unwrap().without_leakage_check();
            compare(&s, &bath, &rho, 1.0, &q()).unwrap().kernel_deviation
        })
        .collect();
    assert!(dev[1] <= 1e-6);
    assert!(dev[1] <= dev[0] || dev[1] <= 1e-13);
}

#[test]
fn thermal_bath_agrees() {
    let bath = BathSimConfig::new(
        vec![Mode { omega: 1.0, coupling: 0.05 }, Mode { omega: 1.7, coupling: 0.04 }],
        20,
        ThermalSpec::with_beta(3.0).unwrap(),
    )
    .unwrap();
    let s = PulseSchedule::udd_pair(2, 3, 2.0).unwrap();
    let r = compare(&s, &bath, &partially_entangled_state(), 2.0, &q()).unwrap();
    assert!(r.kernel_deviation <= 1e-7, "{r:?}");
}

#[test]
fn only_the_default_convention_matches_phases() {
    let rho = partially_entangled_state();
    let mut distinguished = 0;
    for (w, l) in [(1.0, 0.1), (0.7, 0.05), (1.5, 0.2)] {
        for (n, m) in [(0, 0), (1, 2), (2, 3), (2, 4), (3, 4)] {
            let s = if n + m == 0 { PulseSchedule::empty(1.0) } else { PulseSchedule::udd_pair(n, m, 1.0) }.unwrap();
            let bath = BathSimConfig::single_mode(w, l, 32).unwrap();
            let good = compare_with(&s, &bath, &rho, 1.0, &q(), PhaseConvention::Physical).unwrap();
            let bad = compare_with(&s, &bath, &rho, 1.0, &q(), PhaseConvention::Literal).unwrap();
            assert!(good.phase_deviation[0][1] <= 1e-6);
            // Δ_m sits on (0,1); the wrong sign misses by 2|Δ_m|.
            let delta_m = pulsed_integrals(&s, &bath.density(), &bath.thermal, 1.0, &q()).unwrap().phase_second.value;
            let miss = bad.phase_deviation[0][1];
            assert!((miss - 2.0 * delta_m.abs()).abs() <= 1e-9, "({n},{m}) w={w}: {miss:e} vs {delta_m:e}");
            if (n, m) == (0, 0) {
                assert!(miss > 1e-4);
                distinguished += 1;
            }
        }
    }
    assert_eq!(distinguished, 3);
    assert_eq!(PhaseConvention::default(), PhaseConvention::Physical);
}

fn schedule() -> impl Strategy<Value = PulseSchedule> {
    let side = || {
        prop::collection::vec(0.01f64..0.99, 0..5).prop_map(|mut v| {
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
    };
    (side(), side(), 0.3f64..2.5).prop_filter_map("distinct pulses", |(a, b, t)| PulseSchedule::merge(&a, &b, t).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_is_exact(s in schedule(), w in 0.5f64..2.0, ratio in -0.1f64..0.1) {
        let bath = BathSimConfig::single_mode(w, ratio * w, 32).unwrap();
        let t = s.total_time();
        let sim = simulate(&s, &bath, &partially_entangled_state(), t).unwrap();
        prop_assert!(sim.boundary_population <= 1e-10);
        prop_assert!(sim.norm_drift <= 1e-12);
        let r = compare(&s, &bath, &partially_entangled_state(), t, &q()).unwrap();
        prop_assert!(r.kernel_deviation <= 1e-7, "{:e}", r.kernel_deviation);
    }
}

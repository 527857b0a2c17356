use num_complex::Complex64;
use paritydd_core::dynamics::{controlled_kernel, evolve};
use paritydd_core::entanglement::{concurrence, partially_entangled_state};
use paritydd_core::{DensityMatrix, PulseSchedule, QuadratureConfig, SpectralDensity, ThermalSpec};
use proptest::prelude::*;

fn amplitudes() -> impl Strategy<Value = [Complex64; 4]> {
    prop::collection::vec(-1.0f64..1.0, 8).prop_filter_map("nonzero", |v| {
        let a: Vec<Complex64> = v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| [a[0] / norm, a[1] / norm, a[2] / norm, a[3] / norm])
    })
}

fn mixture(states: &[[Complex64; 4]], weights: &[f64]) -> DensityMatrix {
    let total: f64 = weights.iter().sum();
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (psi, w) in states.iter().zip(weights) {
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += psi[i] * psi[j].conj() * (w / total);
            }
        }
    }
    for i in 0..4 {
        m[i][i].im = 0.0;
        for j in i + 1..4 {
            m[j][i] = m[i][j].conj();
        }
    }
    DensityMatrix::new(m).unwrap()
}

#[test]
fn reference_state_concurrence() {
    assert!((concurrence(&partially_entangled_state()).unwrap().value() - 0.5).abs() < 1e-12);
}

#[test]
fn evolved_concurrence_is_bounded() {
    let rho = partially_entangled_state();
    let q = QuadratureConfig::default();
    for (n, m) in [(1, 2), (2, 3), (6, 7), (6, 8)] {
        let s = PulseSchedule::udd_pair(n, m, 1.0).unwrap();
        for j in [SpectralDensity::ohmic(1.0).unwrap(), SpectralDensity::ohmic(5.0).unwrap(), SpectralDensity::SoftLorentzian] {
            let k = controlled_kernel(&s, &j, &ThermalSpec::zero_temperature(), 1.0, &q).unwrap();
            let c = concurrence(&evolve(&rho, &k).unwrap()).unwrap().value();
            assert!((0.0..=1.0 + 1e-9).contains(&c));
        }
    }
}

proptest! {
    #[test]
    fn pure_states_match_closed_form(psi in amplitudes()) {
        let rho = DensityMatrix::from_pure(psi).unwrap();
        let expected = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm();
        prop_assert!((concurrence(&rho).unwrap().value() - expected).abs() <= 1e-12);
    }

    #[test]
    fn local_phases_leave_concurrence_unchanged(
        states in prop::collection::vec(amplitudes(), 1..4),
        weights in prop::collection::vec(0.05f64..1.0, 4),
        phi in 0.0f64..6.3,
        psi in 0.0f64..6.3,
    ) {
        let rho = mixture(&states, &weights[..states.len()]);
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, psi),
            Complex64::from_polar(1.0, phi),
            Complex64::from_polar(1.0, phi + psi),
        ];
        let mut m = *rho.entries();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] *= phases[i] * phases[j].conj();
            }
        }
        let rotated = DensityMatrix::new(m).unwrap();
        let (a, b) = (concurrence(&rho).unwrap().value(), concurrence(&rotated).unwrap().value());
        prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        prop_assert!(a <= 1.0 + 1e-9);
    }
}

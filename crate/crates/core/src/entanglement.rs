//! Wootters concurrence.

use num_complex::Complex64;

use crate::dynamics::{DensityMatrix, EIGENVALUE_FLOOR};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, SquareMatrix};
use crate::math::sqrt;

/// Relative eigenvalue level below which values are rounding noise.
const ROUNDING_FLOOR: f64 = 16.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Concurrence(f64);

impl Concurrence {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `σy ⊗ σy` in the `|↓↓⟩, |↓↑⟩, |↑↓⟩, |↑↑⟩` basis.
fn spin_flip(rho: &SquareMatrix) -> SquareMatrix {
    // (σy⊗σy)_{ij} = s_i δ_{i, 3−i} with s = (−1, 1, 1, −1); conjugating
    // ρ* by it gives ρ̃_{ij} = s_i s_j conj(ρ_{3−i, 3−j}).
    let s = [-1.0, 1.0, 1.0, -1.0];
    let mut out = SquareMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = rho[(3 - i, 3 - j)].conj() * (s[i] * s[j]);
        }
    }
    out
}

/// `C = max(0, √μ1 − √μ2 − √μ3 − √μ4)` with `μ` the descending eigenvalues
/// of `ρ ρ̃`, obtained from the Hermitian form `√ρ ρ̃ √ρ`.
pub fn concurrence(rho: &DensityMatrix) -> Result<Concurrence> {
    let m = SquareMatrix::from_rows(rho.entries());
    let eig = hermitian_eigen(&m);
    if eig.values[0] < EIGENVALUE_FLOOR {
        return Err(Error::InvalidState { reason: "negative eigenvalue", violation: eig.values[0] });
    }
    let floor = ROUNDING_FLOOR * eig.values[3];
    let root = eig.map(|x| if x <= floor { 0.0 } else { sqrt(x) });
    let r = root.mul(&spin_flip(&m)).mul(&root);
    let mut mu = hermitian_eigen(&r).values;
    mu.reverse();
    let floor = ROUNDING_FLOOR * mu[0];
    let mut roots = [0.0; 4];
    for (k, &x) in mu.iter().enumerate() {
        if x < EIGENVALUE_FLOOR {
            return Err(Error::InvalidState { reason: "negative eigenvalue of ρ ρ̃", violation: x });
        }
        // Square roots turn rounding noise ε into √ε, so eigenvalues at the
        // rounding floor are treated as exact zeros.
        roots[k] = if x <= floor { 0.0 } else { sqrt(x) };
    }
    Ok(Concurrence(f64::max(0.0, roots[0] - roots[1] - roots[2] - roots[3])))
}

/// `(√2/4)(|0⟩ + √3|1⟩ + √3|2⟩ + |3⟩)`, a partially entangled pure state
/// with concurrence 1/2.
pub fn partially_entangled_state() -> DensityMatrix {
    let a = sqrt(2.0) / 4.0;
    let b = a * sqrt(3.0);
    let amps = [a, b, b, a].map(|x| Complex64::new(x, 0.0));
    DensityMatrix::from_pure(amps).expect("reference state is normalized")
}

//! Vector-valued adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! All components share one panel tree. Panels are bisected in order of
//! their worst component error relative to that component's tolerance, and
//! the final reduction sums panels in left-to-right order with a pairwise
//! tree, so results do not depend on the bisection history beyond the final
//! panel set.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math::{abs, pairwise_sum};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_212_825,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], …`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    /// Kronrod estimate of `∫|f|` over the panel.
    magnitude: [f64; N],
}

fn kronrod<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> Panel<N> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let mut abs_sum = [0.0; N];

    let mid = f(center);
    for c in 0..N {
        kron[c] = WGK[10] * mid[c];
        abs_sum[c] = abs(kron[c]);
    }
    for (k, (&x, &w)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let lo = f(center - half * x);
        let hi = f(center + half * x);
        for c in 0..N {
            kron[c] += w * (lo[c] + hi[c]);
            abs_sum[c] += w * (abs(lo[c]) + abs(hi[c]));
            if k % 2 == 1 {
                gauss[c] += WG[k / 2] * (lo[c] + hi[c]);
            }
        }
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    let mut magnitude = [0.0; N];
    for c in 0..N {
        value[c] = kron[c] * half;
        magnitude[c] = abs_sum[c] * abs(half);
        let floor = 50.0 * f64::EPSILON * abs_sum[c] * abs(half);
        error[c] = f64::max(abs((kron[c] - gauss[c]) * half), floor);
    }
    Panel { a, b, value, error, magnitude }
}

/// Heap entry ordered by panel priority.
struct Ranked {
    priority: f64,
    index: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.index.cmp(&self.index))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    pub max_panels: usize,
}

/// Integrate `f` over `[a, b]`, starting from the given breakpoints (which
/// must be sorted and include both ends). Returns `(value, error)` per
/// component.
pub(crate) fn integrate<const N: usize, F: Fn(f64) -> [f64; N]>(
    f: &F,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<[(f64, f64); N]> {
    let mut panels: Vec<Panel<N>> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok([(0.0, 0.0); N]);
    }

    let totals = |panels: &[Panel<N>]| -> ([f64; N], [f64; N], [f64; N]) {
        let mut v = [0.0; N];
        let mut e = [0.0; N];
        let mut m = [0.0; N];
        for c in 0..N {
            v[c] = panels.iter().map(|p| p.value[c]).sum();
            e[c] = panels.iter().map(|p| p.error[c]).sum();
            m[c] = panels.iter().map(|p| p.magnitude[c]).sum();
        }
        (v, e, m)
    };
    // Relative targets are taken against ∫|f| so that components whose
    // integral cancels to zero remain attainable.
    let (_, _, initial) = totals(&panels);
    let mut target = [0.0; N];
    for c in 0..N {
        target[c] = f64::max(tol.absolute, tol.relative * initial[c]);
    }
    let priority = |p: &Panel<N>| -> f64 {
        (0..N).map(|c| p.error[c] / target[c]).fold(0.0, f64::max)
    };

    let mut heap: BinaryHeap<Ranked> = panels
        .iter()
        .enumerate()
        .map(|(index, p)| Ranked { priority: priority(p), index })
        .collect();
    let (_, mut error, mut magnitude) = totals(&panels);

    let converged = |error: &[f64; N], magnitude: &[f64; N]| {
        (0..N).all(|c| error[c] <= f64::max(tol.absolute, tol.relative * magnitude[c]))
    };

    while !converged(&error, &magnitude) && panels.len() < tol.max_panels {
        let Some(worst) = heap.pop() else { break };
        let p = panels[worst.index];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // Cannot split further; leave the panel out of the heap.
            continue;
        }
        let left = kronrod(f, p.a, mid);
        let right = kronrod(f, mid, p.b);
        for c in 0..N {
            error[c] += left.error[c] + right.error[c] - p.error[c];
            magnitude[c] += left.magnitude[c] + right.magnitude[c] - p.magnitude[c];
        }
        panels[worst.index] = left;
        heap.push(Ranked { priority: priority(&left), index: worst.index });
        panels.push(right);
        heap.push(Ranked { priority: priority(&right), index: panels.len() - 1 });
    }

    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut out = [(0.0, 0.0); N];
    let mut scratch: Vec<f64> = Vec::with_capacity(panels.len());
    for c in 0..N {
        scratch.clear();
        scratch.extend(panels.iter().map(|p| p.value[c]));
        let v = pairwise_sum(&scratch);
        scratch.clear();
        scratch.extend(panels.iter().map(|p| p.error[c]));
        let e = pairwise_sum(&scratch);
        scratch.clear();
        scratch.extend(panels.iter().map(|p| p.magnitude[c]));
        let allowed = f64::max(tol.absolute, tol.relative * pairwise_sum(&scratch));
        if !(e <= allowed) {
            return Err(Error::Convergence { estimate: e, tolerance: allowed });
        }
        out[c] = (v, e);
    }
    Ok(out)
}

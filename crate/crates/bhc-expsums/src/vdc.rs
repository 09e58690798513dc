use bhc_core::cis2pi;
use num_complex::Complex64;
use serde::Serialize;

/// Absolute constant in `|Σ e(F(n))| ≤ C_VDC / α`.
pub const C_VDC: f64 = 3.0;
/// Derivative samples per unit length used to audit the hypotheses.
pub const VDC_SAMPLES_PER_UNIT: usize = 8;
const DIFF_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VdcReport {
    pub sum_abs: f64,
    pub bound: f64,
    /// Smallest sampled distance from `F'` to the nearest integer.
    pub min_dist: f64,
    /// Sampled `F'` was monotone.
    pub monotone: bool,
    /// Sampled `‖F'‖ ≥ α`.
    pub separated: bool,
}

impl VdcReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.monotone && self.separated
    }

    pub fn holds(&self) -> bool {
        self.sum_abs <= self.bound
    }
}

/// Distance to the nearest integer.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Sums `e(F(n))` over the integers of `range` (inclusive) and audits the
/// hypotheses on sampled central differences of `F` over the hull of `range`.
pub fn vdc_check<F: Fn(f64) -> f64>(phase: F, range: (i64, i64), alpha: f64) -> VdcReport {
    let (lo, hi) = range;
    let sum: Complex64 = (lo..=hi).map(|n| cis2pi(phase(n as f64))).sum();
    let span = (hi - lo).max(0) as usize;
    let m = span * VDC_SAMPLES_PER_UNIT + 1;
    let derivs: Vec<f64> = (0..m)
        .map(|i| {
            let x = lo as f64 + i as f64 / VDC_SAMPLES_PER_UNIT as f64;
            (phase(x + DIFF_STEP) - phase(x - DIFF_STEP)) / (2.0 * DIFF_STEP)
        })
        .collect();
    let slack = 1e-7;
    let increasing = derivs.windows(2).all(|w| w[1] >= w[0] - slack);
    let decreasing = derivs.windows(2).all(|w| w[1] <= w[0] + slack);
    let min_dist = derivs.iter().map(|&d| dist_to_int(d)).fold(f64::INFINITY, f64::min);
    VdcReport {
        sum_abs: sum.norm(),
        bound: C_VDC / alpha,
        min_dist,
        monotone: increasing || decreasing,
        separated: min_dist >= alpha * (1.0 - 1e-9),
    }
}

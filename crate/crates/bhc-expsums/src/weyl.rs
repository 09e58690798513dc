use bhc_core::{cis2pi, Budget};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::fewnomial::signed_pow;
use crate::{ExpSumError, LambdaTilde, Result};

/// Relative tolerance for deciding that λ̃ is affine.
pub const AFFINE_TOL: f64 = 1e-12;

pub(crate) fn half_n(am: u32) -> Result<i64> {
    if am == 0 || am % 2 == 1 || am > 60 {
        return Err(ExpSumError::AmParity(am));
    }
    Ok(1i64 << (am / 2))
}

/// Index windows of the Weyl sum at scale `N = 2^{am/2}`.
///
/// The original variables `u, v, u₁, v₁` each run over `[N, 2N-1]`; with
/// `p = u+v`, `q = u+v₁`, `r = u₁+v` the outer indices lie in `[2N, 4N-2]`
/// and `v` runs over [`WeylWindows::v_window`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeylWindows {
    pub n: i64,
}

impl WeylWindows {
    pub fn new(am: u32) -> Result<Self> {
        Ok(Self { n: half_n(am)? })
    }

    /// Inclusive range of `p`, `q`, `r` and of `q + r - p`.
    pub fn outer(&self) -> (i64, i64) {
        (2 * self.n, 4 * self.n - 2)
    }

    /// `v ∈ [max(N, p-2N+1, r-2N+1, N+p-q), min(2N-1, p-N, r-N, 2N-1+p-q)]`;
    /// `None` when empty.
    pub fn v_window(&self, p: i64, q: i64, r: i64) -> Option<(i64, i64)> {
        let n = self.n;
        let lo = n.max(p - 2 * n + 1).max(r - 2 * n + 1).max(n + p - q);
        let hi = (2 * n - 1).min(p - n).min(r - n).min(2 * n - 1 + p - q);
        (lo <= hi).then_some((lo, hi))
    }

    /// Band that λ̃ must occupy: `[N/4, 4N]`.
    pub fn lambda_band(&self) -> (f64, f64) {
        (self.n as f64 / 4.0, 4.0 * self.n as f64)
    }
}

/// The phase `P_{p,q,r}(v)` for one `(p, q, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylPhase {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub am: u32,
    pub a: f64,
    /// `(λ̃(p), λ̃(q), λ̃(r), λ̃(q+r-p))`.
    pub lams: [f64; 4],
}

impl WeylPhase {
    pub fn new(p: i64, q: i64, r: i64, lam: &LambdaTilde, am: u32, a: f64) -> Result<Self> {
        let w = WeylWindows::new(am)?;
        let s = q + r - p;
        for idx in [p, q, r, s] {
            if lam.get(idx).is_none() {
                return Err(ExpSumError::Samples(format!("λ̃({idx}) is not sampled")));
            }
        }
        let lams = [lam.at(p), lam.at(q), lam.at(r), lam.at(s)];
        let band = w.lambda_band();
        if lams.iter().any(|&l| !(l >= band.0 && l <= band.1)) {
            return Err(ExpSumError::Samples(format!("λ̃ outside [{}, {}]", band.0, band.1)));
        }
        Ok(Self { p, q, r, am, a, lams })
    }

    /// `P(v) = F(2v/N)` with shifts `(-p, q-2p, -r, q-p-r)/N` and
    /// coefficients `(λ̃(p), -λ̃(q), -λ̃(r), λ̃(q+r-p))`.
    pub fn shifts_and_coeffs(&self) -> [(f64, f64); 4] {
        let n = (1i64 << (self.am / 2)) as f64;
        let (p, q, r) = (self.p as f64, self.q as f64, self.r as f64);
        [
            (self.lams[0], -p / n),
            (-self.lams[1], (q - 2.0 * p) / n),
            (-self.lams[2], -r / n),
            (self.lams[3], (q - p - r) / n),
        ]
    }

    pub fn eval(&self, v: i64) -> f64 {
        let n = (1i64 << (self.am / 2)) as f64;
        phase_value(self.p, self.q, self.r, v, &self.lams, n, self.a - 1.0)
    }
}

#[inline]
fn phase_value(p: i64, q: i64, r: i64, v: i64, lams: &[f64; 4], n: f64, e: f64) -> f64 {
    let t1 = (2 * v - p) as f64 / n;
    let t2 = (2 * v + q - 2 * p) as f64 / n;
    let t3 = (2 * v - r) as f64 / n;
    let t4 = (2 * v + q - p - r) as f64 / n;
    lams[0] * signed_pow(t1, e) - lams[1] * signed_pow(t2, e) - lams[2] * signed_pow(t3, e) + lams[3] * signed_pow(t4, e)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylReport {
    pub am: u32,
    pub a: f64,
    pub s: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    /// Number of summands; equals `N⁴`.
    pub terms: u64,
    /// `N⁴ = 2^{2am}`.
    pub trivial: f64,
}

impl WeylReport {
    pub fn normalized(&self) -> f64 {
        self.abs / self.trivial
    }
}

/// Evaluates `𝒥(s) = Σ_{p,q,r} Σ_v e(N s P_{p,q,r}(v))` term by term.
pub fn weyl_sum(s: f64, lam: &LambdaTilde, am: u32, a: f64, budget: &Budget) -> Result<WeylReport> {
    let w = WeylWindows::new(am)?;
    let n = w.n;
    let n4 = (n as u64).pow(4);
    budget.check(n4)?;
    let (lo, hi) = w.outer();
    lam.require(lo, hi)?;
    lam.require_band(lo, hi, w.lambda_band())?;
    let nf = n as f64;
    let sigma = nf * s;
    let e = a - 1.0;
    let width = hi - lo + 1;
    let (sum, count) = (0..width * width)
        .into_par_iter()
        .map(|idx| {
            let p = lo + idx / width;
            let q = lo + idx % width;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut cnt = 0u64;
            for r in lo..=hi {
                let Some((v0, v1)) = w.v_window(p, q, r) else { continue };
                let lams = [lam.at(p), lam.at(q), lam.at(r), lam.at(q + r - p)];
                for v in v0..=v1 {
                    acc += cis2pi(sigma * phase_value(p, q, r, v, &lams, nf, e));
                }
                cnt += (v1 - v0 + 1) as u64;
            }
            (acc, cnt)
        })
        .reduce(|| (Complex64::new(0.0, 0.0), 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(WeylReport { am, a, s, re: sum.re, im: sum.im, abs: sum.norm(), terms: count, trivial: n4 as f64 })
}

/// `s = σ/N` for `σ = N^{-2ν}·N^{2ν j/(count-1)}`, `j = 0..count`: a
/// geometric ladder across `N^{-1-2ν} ≤ s ≤ N^{-1}`.
pub fn s_ladder(am: u32, nu: f64, count: usize) -> Result<Vec<f64>> {
    let n = half_n(am)? as f64;
    let lo = n.powf(-2.0 * nu);
    Ok((0..count)
        .map(|j| {
            let t = if count <= 1 { 1.0 } else { j as f64 / (count - 1) as f64 };
            lo * n.powf(2.0 * nu * t) / n
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylSweep {
    pub am: u32,
    pub a: f64,
    pub reports: Vec<WeylReport>,
    /// `max_s |𝒥(s)| / N⁴`.
    pub max_normalized: f64,
    pub resonant: bool,
}

/// Evaluates `𝒥` on every `s` and records the largest normalized value.
pub fn weyl_sweep(ss: &[f64], lam: &LambdaTilde, am: u32, a: f64, budget: &Budget) -> Result<WeylSweep> {
    let reports = ss.iter().map(|&s| weyl_sum(s, lam, am, a, budget)).collect::<Result<Vec<_>>>()?;
    let max_normalized = reports.iter().map(WeylReport::normalized).fold(0.0, f64::max);
    let w = WeylWindows::new(am)?;
    let (lo, hi) = w.outer();
    Ok(WeylSweep { am, a, reports, max_normalized, resonant: is_resonant(lam, lo, hi, a) })
}

/// For `a = 3` and affine λ̃ on `[lo, hi]` the quadratic part of every
/// `P_{p,q,r}` cancels: no decay can be expected.
pub fn is_resonant(lam: &LambdaTilde, lo: i64, hi: i64, a: f64) -> bool {
    if a != 3.0 || !lam.covers(lo, hi) {
        return false;
    }
    let sub = LambdaTilde::new(lo, lam.values[(lo - lam.start) as usize..=(hi - lam.start) as usize].to_vec());
    sub.is_affine(AFFINE_TOL)
}

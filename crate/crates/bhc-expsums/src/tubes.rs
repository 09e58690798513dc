use serde::Serialize;

use crate::weyl::half_n;
use crate::{LambdaTilde, Result};

/// Default `ε` of the tube greedy.
pub const DEFAULT_EPS: f64 = 3.0 / 38.0;
/// Default constant `c` in `λ̃ = c·λ·2^{-am/2}`.
pub const DEFAULT_C: f64 = 1.0;
/// `log₂` of the shrink factor of the non-concentration neighbourhood.
pub const NX_SHRINK_LOG2: f64 = 10.0;

/// The cube `I_Q × J_Q` with `I_Q = J_Q = [N/2, 2N]`, `N = 2^{am/2}`, and
/// the tube parameters derived from `ε` with `m = am/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeGeometry {
    pub am: u32,
    pub eps: f64,
    pub x0: i64,
    pub x1: i64,
}

impl TubeGeometry {
    pub fn new(am: u32, eps: f64) -> Result<Self> {
        let n = half_n(am)?;
        Ok(Self { am, eps, x0: n / 2, x1: 2 * n })
    }

    /// `εm` with `m = am/3`.
    pub fn eps_m(&self) -> f64 {
        self.eps * self.am as f64 / 3.0
    }

    /// `|I_Q|`.
    pub fn len(&self) -> f64 {
        (self.x1 - self.x0) as f64
    }

    /// `#(I_Q ∩ ℤ)`.
    pub fn count(&self) -> usize {
        (self.x1 - self.x0 + 1) as usize
    }

    /// `2^{2εm}`: slope bound, step bound, and inverse density threshold.
    pub fn heavy_scale(&self) -> f64 {
        2f64.powf(2.0 * self.eps_m())
    }

    /// Largest admissible `|c(ω) - c(α)|`.
    pub fn max_rise(&self) -> i64 {
        (self.heavy_scale() * self.len()).floor() as i64
    }

    /// `2^{εm-10}`.
    pub fn nx_radius(&self) -> f64 {
        2f64.powf(self.eps_m() - NX_SHRINK_LOG2)
    }

    /// `2^{-εm}`.
    pub fn nx_threshold(&self) -> f64 {
        2f64.powf(-self.eps_m())
    }
}

/// Parallelogram over `I_Q` whose vertical edges are `[a, a+1]` at the left
/// end and `[b, b+1]` at the right end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tube {
    pub a: i64,
    pub b: i64,
}

impl Tube {
    /// Central line `ℓ_τ(p)`.
    pub fn center(&self, geom: &TubeGeometry, p: i64) -> f64 {
        let t = (p - geom.x0) as f64 / geom.len();
        self.a as f64 + 0.5 + (self.b - self.a) as f64 * t
    }

    pub fn slope(&self, geom: &TubeGeometry) -> f64 {
        (self.b - self.a) as f64 / geom.len()
    }

    /// `-1/2 ≤ λ̃(p) - ℓ_τ(p) < 1/2`.
    pub fn contains(&self, geom: &TubeGeometry, p: i64, value: f64) -> bool {
        in_tube(value - self.center(geom, p))
    }
}

fn in_tube(d: f64) -> bool {
    (-0.5..0.5).contains(&d)
}

/// For every tube counts the points satisfying `member(λ̃(p) - ℓ_τ(p))`, and
/// returns the tube with the largest count, ties broken by smallest `(a, b)`.
/// `half_width` bounds the offsets accepted by `member`.
fn sweep<M: Fn(f64) -> bool>(geom: &TubeGeometry, pts: &[(i64, f64)], half_width: f64, member: M) -> Option<(Tube, usize)> {
    if pts.is_empty() {
        return None;
    }
    let k_max = geom.max_rise();
    let width = (2 * k_max + 1) as usize;
    let (vmin, vmax) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    let reach = k_max + half_width.ceil() as i64 + 2;
    let a_lo = vmin.floor() as i64 - reach;
    let a_hi = vmax.floor() as i64 + reach;
    let len = geom.len();
    let mut diff = vec![0i64; width + 1];
    let mut best: Option<(Tube, usize)> = None;
    for a in a_lo..=a_hi {
        diff.iter_mut().for_each(|d| *d = 0);
        let g = |v: f64, k: i64, t: f64| v - a as f64 - 0.5 - k as f64 * t;
        for &(p, v) in pts {
            let t = (p - geom.x0) as f64 / len;
            let (mut lo, mut hi);
            if t == 0.0 {
                if !member(g(v, 0, 0.0)) {
                    continue;
                }
                lo = -k_max;
                hi = k_max;
            } else {
                // g is decreasing in k; start from the real solution and
                // settle the endpoints on the predicate itself.
                let c = v - a as f64 - 0.5;
                lo = ((c - half_width) / t).floor() as i64;
                hi = ((c + half_width) / t).ceil() as i64;
                lo = lo.max(-k_max - 1);
                hi = hi.min(k_max + 1);
                while lo <= hi && !member(g(v, lo, t)) {
                    lo += 1;
                }
                while hi >= lo && !member(g(v, hi, t)) {
                    hi -= 1;
                }
                lo = lo.max(-k_max);
                hi = hi.min(k_max);
                if lo > hi {
                    continue;
                }
            }
            diff[(lo + k_max) as usize] += 1;
            diff[(hi + k_max) as usize + 1] -= 1;
        }
        let mut run = 0i64;
        for (i, d) in diff.iter().take(width).enumerate() {
            run += d;
            let c = run as usize;
            if c > 0 && best.is_none_or(|(_, bc)| c > bc) {
                let k = i as i64 - k_max;
                best = Some((Tube { a, b: a + k }, c));
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeDecomposition {
    pub geometry: TubeGeometry,
    /// Points captured by heavy tubes.
    pub l_set: Vec<i64>,
    /// Remaining points.
    pub n_set: Vec<i64>,
    pub heavy: Vec<Tube>,
    /// Densities of the heavy tubes at selection time.
    pub densities: Vec<f64>,
}

impl TubeDecomposition {
    pub fn steps(&self) -> usize {
        self.heavy.len()
    }
}

/// Greedy split of `I_Q ∩ ℤ` into points near a few heavy tubes and the rest:
/// repeatedly select the tube of largest density on the remaining points,
/// provided it is at least `2^{-2εm}`, and move its points over.
///
/// Only tubes that can meet the graph of λ̃ are enumerated; all of them sit
/// inside `I_Q × 2^{2εm+2}J_Q`.
pub fn tube_decompose(lam: &LambdaTilde, am: u32, eps: f64) -> Result<TubeDecomposition> {
    let geom = TubeGeometry::new(am, eps)?;
    lam.require(geom.x0, geom.x1)?;
    lam.require_band(geom.x0, geom.x1, (geom.x0 as f64, geom.x1 as f64))?;
    let mut remaining: Vec<(i64, f64)> = (geom.x0..=geom.x1).map(|p| (p, lam.at(p))).collect();
    let total = geom.count() as f64;
    let threshold = total / geom.heavy_scale();
    let mut l_set = Vec::new();
    let mut heavy = Vec::new();
    let mut densities = Vec::new();
    while let Some((tube, count)) = sweep(&geom, &remaining, 0.5, in_tube) {
        if (count as f64) < threshold {
            break;
        }
        let (inside, outside): (Vec<_>, Vec<_>) = remaining.into_iter().partition(|&(p, v)| tube.contains(&geom, p, v));
        debug_assert_eq!(inside.len(), count);
        l_set.extend(inside.iter().map(|&(p, _)| p));
        remaining = outside;
        heavy.push(tube);
        densities.push(count as f64 / total);
    }
    l_set.sort_unstable();
    let n_set = remaining.iter().map(|&(p, _)| p).collect();
    Ok(TubeDecomposition { geometry: geom, l_set, n_set, heavy, densities })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NxReport {
    /// Largest `#{p ∈ 𝓝 : |λ̃(p) - ℓ_τ(p)| ≤ 2^{εm-10}} / #(I_Q ∩ ℤ)` over all tubes.
    pub max_ratio: f64,
    pub threshold: f64,
    pub worst: Option<Tube>,
}

impl NxReport {
    pub fn holds(&self) -> bool {
        self.max_ratio <= self.threshold
    }
}

/// Exhaustive sweep of the non-concentration property of the remainder set.
pub fn nx_check(lam: &LambdaTilde, dec: &TubeDecomposition) -> NxReport {
    let geom = dec.geometry;
    let pts: Vec<(i64, f64)> = dec.n_set.iter().map(|&p| (p, lam.at(p))).collect();
    let rho = geom.nx_radius();
    let best = sweep(&geom, &pts, rho, |d| d.abs() <= rho);
    let (max_ratio, worst) = match best {
        Some((t, c)) => (c as f64 / geom.count() as f64, Some(t)),
        None => (0.0, None),
    };
    NxReport { max_ratio, threshold: geom.nx_threshold(), worst }
}

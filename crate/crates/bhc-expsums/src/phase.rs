use serde::Serialize;

use crate::fewnomial::LEVEL_SET_SAMPLES;
use crate::weyl::half_n;
use crate::{ExpSumError, Fewnomial, LambdaTilde, Result, WeylPhase};

/// Number of intervals of length `L_η` that cover the derivative level set.
pub const COVER_COUNT: f64 = 10.0;
/// A cubic-case denominator this small relative to its terms counts as zero.
pub const CANCEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseCase {
    Cubic,
    Quartic,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseBound {
    pub case: PhaseCase,
    /// `L_η`; `+∞` when the case denominator vanishes.
    pub length: f64,
    pub infinite: bool,
}

impl PhaseBound {
    /// Total length of the covering, `10·L_η`.
    pub fn cover(&self) -> f64 {
        COVER_COUNT * self.length
    }
}

fn ratio_or_inf(num: f64, den: f64) -> (f64, bool) {
    if den == 0.0 {
        (f64::INFINITY, true)
    } else {
        (num / den, false)
    }
}

/// Interval length `L_η` covering `{x ∈ [1,2] : |d/dx F₄^{a-1}| < η}`:
///
/// * `a = 3`: `η N / |(r-q)λ̃(p) + (p-r)λ̃(q) + (q-p)λ̃(r)|`
/// * `a = 4`: `(η N / (|p-r||p-q|))^{1/2}`
/// * otherwise: `20^a (η N² / (Π_{j=1}^{4}|a-j| · |p-r||q-p||r-q|))^{1/3}`
///
/// with `N = 2^{am/2}`.
pub fn phase_levelset_bound(p: i64, q: i64, r: i64, lam: &LambdaTilde, eta: f64, a: f64, am: u32) -> Result<PhaseBound> {
    if a == 1.0 || a == 2.0 || a <= 0.0 {
        return Err(ExpSumError::Exponent(a));
    }
    let n = half_n(am)? as f64;
    let (pf, qf, rf) = (p as f64, q as f64, r as f64);
    let (case, (length, infinite)) = if a == 3.0 {
        for idx in [p, q, r] {
            if lam.get(idx).is_none() {
                return Err(ExpSumError::Samples(format!("λ̃({idx}) is not sampled")));
            }
        }
        let terms = [(rf - qf) * lam.at(p), (pf - rf) * lam.at(q), (qf - pf) * lam.at(r)];
        let den: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let den = if den.abs() <= CANCEL_TOL * scale { 0.0 } else { den };
        (PhaseCase::Cubic, ratio_or_inf(eta * n, den.abs()))
    } else if a == 4.0 {
        let (v, inf) = ratio_or_inf(eta * n, ((pf - rf) * (pf - qf)).abs());
        (PhaseCase::Quartic, (v.sqrt(), inf))
    } else {
        let den = (1..=4).map(|j| (a - j as f64).abs()).product::<f64>() * ((pf - rf) * (qf - pf) * (rf - qf)).abs();
        let (v, inf) = ratio_or_inf(eta * n * n, den);
        (PhaseCase::General, (20f64.powf(a) * v.cbrt(), inf))
    };
    Ok(PhaseBound { case, length, infinite })
}

/// `F₄^{a-1}` on `[1, 2]` for the phase of `(p, q, r)`; equal shifts are
/// merged and `None` means the phase vanishes identically.
pub fn phase_fewnomial(p: i64, q: i64, r: i64, lam: &LambdaTilde, a: f64, am: u32) -> Result<Option<Fewnomial>> {
    let ph = WeylPhase::new(p, q, r, lam, am, a)?;
    Fewnomial::merged(a - 1.0, &ph.shifts_and_coeffs(), (1.0, 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseLevelSet {
    pub measure: f64,
    pub bound: PhaseBound,
    /// `sup_{[1,2]} |F'|`.
    pub derivative_sup: f64,
}

/// Measures `|{x ∈ [1,2] : |d/dx F₄^{a-1}(x)| < η}|` on a midpoint grid and
/// pairs it with [`phase_levelset_bound`].
pub fn phase_levelset_measure(
    p: i64,
    q: i64,
    r: i64,
    lam: &LambdaTilde,
    eta: f64,
    a: f64,
    am: u32,
) -> Result<PhaseLevelSet> {
    let bound = phase_levelset_bound(p, q, r, lam, eta, a, am)?;
    let deriv = phase_fewnomial(p, q, r, lam, a, am)?.and_then(|f| f.derivative());
    let n = LEVEL_SET_SAMPLES;
    let h = 1.0 / n as f64;
    let (hits, sup) = match &deriv {
        None => (n, 0.0),
        Some(g) => (0..n).fold((0usize, 0.0f64), |(c, m), i| {
            let v = g.eval(1.0 + (i as f64 + 0.5) * h).abs();
            (c + usize::from(v < eta), m.max(v))
        }),
    };
    Ok(PhaseLevelSet { measure: hits as f64 * h, bound, derivative_sup: sup })
}

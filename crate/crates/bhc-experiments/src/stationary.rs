use bhc_core::{Budget, Complex64};
use bhc_operators::{multiplier_exact, multiplier_stationary, OperatorParams, FRESNEL_PHASE};
use serde::Serialize;
use std::time::Instant;

use crate::{DecayReport, ExperimentError, Result};

/// Stationary points `s = 2^{-k} t₀` sampled inside the support of `ρ`.
pub const STATIONARY_POINTS: [f64; 7] = [0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8];
/// Normalized stopping times `λ' = λ/2^{a(m-k)}`.
pub const LAMBDA_PRIMES: [f64; 3] = [1.0, 1.5, 2.0];
/// Stationary points placed outside the support of `ρ`.
pub const NONSTATIONARY_POINTS: [f64; 4] = [0.2, 0.3, 3.0, 4.0];
/// Decay envelope per unit `am` drawn as the bound column.
pub const TARGET_SLOPE: f64 = -0.2;

/// How the absolute factor `κ` in front of the main term is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KappaMode {
    /// `κ = e^{iπ/4}` from the Fresnel integral.
    Analytic,
    /// Least squares over the samples at the smallest `am`, then frozen.
    #[default]
    Fitted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryReport {
    pub decay: DecayReport,
    pub mode: KappaMode,
    /// `κ` actually used.
    pub kappa: (f64, f64),
    /// Least-squares `κ` at the smallest `am`, reported in both modes.
    pub kappa_fitted: (f64, f64),
}

/// `(ζ, λ)` with the stationary point of `λt^a - ζt` at `t = 2^k s`.
pub fn stationary_sample(params: &OperatorParams, s: f64, lambda_prime: f64) -> (f64, f64) {
    let a = params.a;
    let zeta = a * lambda_prime * s.powf(a - 1.0) * params.zeta_scale();
    (zeta, lambda_prime * params.lambda_scale())
}

/// `(𝔐, 𝔪/κ)` on every sample at scale `am`; `𝔪` is the leading
/// stationary-phase term.
fn samples(a: f64, k: i32, am: u32, budget: &Budget) -> Result<Vec<(Complex64, Complex64)>> {
    let params = OperatorParams::new(a, am as f64 / a, k);
    let kappa = if a > 1.0 { FRESNEL_PHASE } else { FRESNEL_PHASE.conj() };
    let mut out = Vec::new();
    for &s in &STATIONARY_POINTS {
        for &lp in &LAMBDA_PRIMES {
            let (zeta, lam) = stationary_sample(&params, s, lp);
            let exact = multiplier_exact(&params, zeta, lam, budget)?;
            let main = multiplier_stationary(&params, zeta, lam)? / kappa;
            out.push((exact, main));
        }
    }
    Ok(out)
}

/// Per scale, `sup |𝔐_{m,k} - κ𝔪_{m,k}|·2^{am/2}` over the stationary samples.
pub fn stationary_phase_sweep(a: f64, k: i32, am_values: &[u32], mode: KappaMode, budget: &Budget) -> Result<StationaryReport> {
    if a == 1.0 || !(a > 0.0) {
        return Err(ExperimentError::domain(format!("a = {a} is excluded")));
    }
    let Some(&am0) = am_values.first() else {
        return Err(ExperimentError::domain("empty am ladder"));
    };
    let start = Instant::now();
    let first = samples(a, k, am0, budget)?;
    let num: Complex64 = first.iter().map(|(e, m)| m.conj() * e).sum();
    let den: f64 = first.iter().map(|(_, m)| m.norm_sqr()).sum();
    let fitted = num / den;
    let kappa = match mode {
        KappaMode::Analytic => {
            if a > 1.0 {
                FRESNEL_PHASE
            } else {
                FRESNEL_PHASE.conj()
            }
        }
        KappaMode::Fitted => fitted,
    };
    let mut values = Vec::new();
    for &am in am_values {
        let pts = if am == am0 { first.clone() } else { samples(a, k, am, budget)? };
        let sup = pts.iter().map(|(e, m)| (e - kappa * m).norm()).fold(0.0, f64::max);
        values.push(sup * 2f64.powf(am as f64 / 2.0));
    }
    let bounds = am_values.iter().map(|&am| values[0] * 2f64.powf(TARGET_SLOPE * (am - am0) as f64)).collect();
    let decay = DecayReport::new("multiplier", a, am_values.to_vec(), values, bounds, 0)?.with_runtime(start.elapsed().as_secs_f64());
    Ok(StationaryReport { decay, mode, kappa: (kappa.re, kappa.im), kappa_fitted: (fitted.re, fitted.im) })
}

/// `sup |𝔐_{m,k}|·2^{am}` over samples whose formal stationary point lies
/// outside the support of `ρ`, together with negative frequencies.
pub fn nonstationary_sup(a: f64, k: i32, am: u32, budget: &Budget) -> Result<f64> {
    let params = OperatorParams::new(a, am as f64 / a, k);
    let mut sup: f64 = 0.0;
    for &s in &NONSTATIONARY_POINTS {
        for &lp in &LAMBDA_PRIMES {
            let (zeta, lam) = stationary_sample(&params, s, lp);
            for z in [zeta, -zeta] {
                sup = sup.max(multiplier_exact(&params, z, lam, budget)?.norm());
            }
        }
    }
    Ok(sup * 2f64.powi(am as i32))
}

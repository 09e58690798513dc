use bhc_core::{cis2pi, oscillatory_integral, BumpFamily, Budget, Complex64, GridFunction, OscDomain};

use crate::{OpError, OperatorParams, PowerBranch, Result};

/// `e^{iπ/4}`, the Fresnel factor of a nondegenerate stationary point with
/// positive second derivative.
pub const FRESNEL_PHASE: Complex64 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);

/// `c_a = a^{-a/(a-1)} - a^{-1/(a-1)}`, the phase value at the critical
/// point of `λ t^a - ζ t` per unit `ζ^{a'} λ^{-1/(a-1)}`.
pub fn c_a(a: f64) -> f64 {
    a.powf(-a / (a - 1.0)) - a.powf(-1.0 / (a - 1.0))
}

/// `𝔐_{m,k}(ζ; λ) = ∫ e(λ t^a - ζ t) ρ(2^{-k} t) dt/t`.
pub fn multiplier_exact(params: &OperatorParams, zeta: f64, lambda_val: f64, budget: &Budget) -> Result<Complex64> {
    if lambda_val == 0.0 {
        return Err(OpError::params("lambda_val must be nonzero"));
    }
    let (a, k) = (params.a, params.k);
    let rho = BumpFamily::rho();
    let (lo, hi) = (2f64.powi(k - 1), 2f64.powi(k + 1));
    let dbound = a * lambda_val.abs() * lo.powf(a - 1.0).max(hi.powf(a - 1.0)) + zeta.abs();
    let dom = OscDomain::new(lo, hi, dbound).with_min_samples(2048);
    let mut total = Complex64::new(0.0, 0.0);
    for sign in [1.0f64, -1.0] {
        total += oscillatory_integral(
            |s| {
                let t = sign * s;
                Complex64::new(rho.eval(t * 2f64.powi(-k)) / t, 0.0)
            },
            |s| {
                let t = sign * s;
                lambda_val * params.branch.pow(t, a) - zeta * t
            },
            &dom,
            budget,
        )?;
    }
    Ok(total)
}

/// Tensorized main term
/// `𝔪_{m,k}(ζ; λ) = 2^{-am/2} e(c_a ζ^{a'} λ^{-1/(a-1)}) ρ̃(λ/2^{a(m-k)}) ψ(ζ/2^{am-k})`.
pub fn multiplier_main(params: &OperatorParams, zeta: f64, lambda_val: f64) -> Result<Complex64> {
    if lambda_val == 0.0 || zeta == 0.0 {
        return Err(OpError::params("zeta and lambda_val must be nonzero"));
    }
    let a = params.a;
    let cut = BumpFamily::rho_tilde(a).eval(lambda_val / params.lambda_scale())
        * BumpFamily::psi().eval(zeta / params.zeta_scale());
    if cut == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let phase = c_a(a) * zeta.powf(params.a_prime()) * lambda_val.powf(-1.0 / (a - 1.0));
    Ok(cis2pi(phase) * (cut * 2f64.powf(-params.am() / 2.0)))
}

/// Amplitude `Θ(ζ', λ')` of the leading stationary-phase term in normalized
/// variables `ζ' = ζ/2^{am-k}`, `λ' = λ/2^{a(m-k)}` (absolute-value branch):
/// `Θ = ±ρ(s) / (s·|a(a-1)λ' s^{a-2}|^{1/2})` with `s = (|ζ'|/(aλ'))^{1/(a-1)}`
/// and the sign of `ζ'`.
pub fn stationary_amplitude(a: f64, zeta_n: f64, lambda_n: f64) -> f64 {
    if zeta_n == 0.0 || lambda_n <= 0.0 {
        return 0.0;
    }
    let s = (zeta_n.abs() / (a * lambda_n)).powf(1.0 / (a - 1.0));
    let curv = (a * (a - 1.0) * lambda_n * s.powf(a - 2.0)).abs();
    (BumpFamily::rho().eval(s) / (s * curv.sqrt())).copysign(zeta_n)
}

/// Leading stationary-phase approximation of `𝔐_{m,k}` without cutoffs:
/// `κ·2^{-am/2} e(c_a |ζ|^{a'} λ^{-1/(a-1)}) Θ(ζ/2^{am-k}, λ/2^{a(m-k)})`,
/// `κ = e^{±iπ/4}` by the sign of `a(a-1)`.
pub fn multiplier_stationary(params: &OperatorParams, zeta: f64, lambda_val: f64) -> Result<Complex64> {
    if !(lambda_val > 0.0) || zeta == 0.0 || params.branch != PowerBranch::Abs {
        return Err(OpError::params("stationary term needs λ > 0, ζ ≠ 0 and the |t|^a branch"));
    }
    let a = params.a;
    let theta = stationary_amplitude(a, zeta / params.zeta_scale(), lambda_val / params.lambda_scale());
    let kappa = if a > 1.0 { FRESNEL_PHASE } else { FRESNEL_PHASE.conj() };
    let phase = c_a(a) * zeta.abs().powf(params.a_prime()) * lambda_val.powf(-1.0 / (a - 1.0));
    Ok(kappa * cis2pi(phase) * (theta * 2f64.powf(-params.am() / 2.0)))
}

/// Applies the bilinear symbol `𝔪_{m,k}(ξ - η; λ(x))` to `(f̂, ĝ)` by a
/// double sum over the nonzero bins of the discrete spectra.
pub fn t_mk_model(f: &GridFunction, g: &GridFunction, params: &OperatorParams, budget: &Budget) -> Result<GridFunction> {
    f.check_same_grid(g)?;
    let lam = params.lambda_on(f)?;
    let (fs, gs) = (f.spectrum(), g.spectrum());
    let support = |s: &bhc_core::Spectrum| -> Vec<(f64, Complex64)> {
        let peak = s.bins().iter().map(|z| z.norm()).fold(0.0, f64::max);
        (0..s.len())
            .filter(|&i| s.bins()[i].norm() > 1e-14 * peak)
            .map(|i| (s.freq(i), s.bins()[i]))
            .collect()
    };
    let (fsup, gsup) = (support(&fs), support(&gs));
    budget.check((fsup.len() * gsup.len() * f.len()) as u64)?;
    let d2 = f.length() * f.length();
    let mut out = Vec::with_capacity(f.len());
    for i in 0..f.len() {
        let x = f.x(i);
        let l = lam.samples()[i].re;
        let mut acc = Complex64::new(0.0, 0.0);
        if l != 0.0 {
            for &(xi, fv) in &fsup {
                for &(eta, gv) in &gsup {
                    let zeta = xi - eta;
                    if zeta == 0.0 {
                        continue;
                    }
                    let sym = multiplier_main(params, zeta, l)?;
                    if sym.re != 0.0 || sym.im != 0.0 {
                        acc += fv * gv * cis2pi((xi + eta) * x) * sym;
                    }
                }
            }
        }
        out.push(acc / d2);
    }
    Ok(f.with_samples(out)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c3_closed_form() {
        let expect = -2.0 * 3f64.powf(-1.5);
        assert!((c_a(3.0) - expect).abs() < 1e-15);
        assert!((c_a(3.0) + 0.384900).abs() < 1e-6);
    }

    #[test]
    fn main_term_vanishes_off_psi_support() {
        let p = OperatorParams::new(3.0, 2.0, 0);
        let l = p.lambda_scale();
        assert_eq!(multiplier_main(&p, 0.3 * p.zeta_scale(), l).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(multiplier_main(&p, -2.0 * p.zeta_scale(), l).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn main_term_modulus_bound() {
        let p = OperatorParams::new(3.0, 2.0, 1);
        for i in 1..50 {
            let z = i as f64 * 0.1 * p.zeta_scale();
            let v = multiplier_main(&p, z, 1.3 * p.lambda_scale()).unwrap();
            assert!(v.norm() <= 2f64.powf(-p.am() / 2.0) + 1e-15);
        }
    }

    #[test]
    fn mirrored_integral_symmetry() {
        // t -> -t with even ρ and the |t|^a branch: 𝔐(-ζ; λ) = -𝔐(ζ; λ),
        // and conjugation flips both arguments
        let p = OperatorParams::new(3.0, 1.0, 0);
        let b = Budget::default();
        let (z, l) = (7.3, 11.0);
        let m = multiplier_exact(&p, z, l, &b).unwrap();
        assert!((multiplier_exact(&p, -z, l, &b).unwrap() + m).norm() < 1e-12);
        assert!((multiplier_exact(&p, -z, -l, &b).unwrap() - m.conj()).norm() < 1e-12);
    }

    #[test]
    fn quadratic_phase_approaches_fresnel_term() {
        // a = 2: the stationary term is the Fresnel evaluation of the
        // quadratic phase around t0 = ζ/(2λ); the gap shrinks like 1/λ.
        let b = Budget::default();
        let mut prev = f64::INFINITY;
        for m in [3.0, 4.0, 5.0] {
            let p = OperatorParams::new(2.0, m, 0);
            let l = 1.2 * p.lambda_scale();
            let z = 2.0 * l * 1.1;
            let exact = multiplier_exact(&p, z, l, &b).unwrap();
            let main = multiplier_stationary(&p, z, l).unwrap();
            let rel = (exact - main).norm() / main.norm();
            assert!(rel < prev);
            prev = rel;
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn non_stationary_regime_is_small() {
        // a = 2, m = 4: ζ far below the stationary band
        let p = OperatorParams::new(2.0, 4.0, 0);
        let b = Budget::default();
        let l = p.lambda_scale();
        for &z in &[0.0, 3.0, 17.0] {
            let v = multiplier_exact(&p, z, l, &b).unwrap();
            assert!(v.norm() <= 10.0 * 2f64.powf(-p.am()), "{z}: {}", v.norm());
        }
    }
}

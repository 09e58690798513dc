use bhc_core::{
    cis2pi, oscillatory_integral, BumpFamily, Budget, Complex64, GridFunction, OscDomain,
};
use rayon::prelude::*;

use crate::maximal::theta_cutoff;
use crate::{OpError, OperatorParams, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
fn at(f: &[Complex64], i: isize) -> Complex64 {
    if i < 0 || i as usize >= f.len() {
        ZERO
    } else {
        f[i as usize]
    }
}

/// Grid offsets `j ≥ 1` with `eps ≤ j h ≤ R`.
pub(crate) fn offsets(h: f64, eps: f64, r: f64, n: usize) -> std::ops::RangeInclusive<usize> {
    let lo = ((eps / h).ceil() as usize).max(1);
    let hi = if r.is_finite() { (r / h).floor() as usize } else { n };
    lo..=hi.min(n)
}

/// `max_{λ ∈ lambda_grid} |∫_{eps ≤ |t| ≤ R} f(x-t) g(x+t) e(λ t^a) dt/t|`
/// on every grid point, with the principal value taken by pairing `±t`.
pub fn bc_a(
    f: &GridFunction,
    g: &GridFunction,
    params: &OperatorParams,
    lambda_grid: &[f64],
) -> Result<GridFunction> {
    f.check_same_grid(g)?;
    params.validate()?;
    if lambda_grid.is_empty() {
        return Err(OpError::params("lambda_grid is empty"));
    }
    let h = f.step();
    let eps = params.eps_trunc.max(h);
    let js: Vec<usize> = offsets(h, eps, params.r_trunc, f.len()).collect();
    // kernel tables per λ: (e(λ t^a), e(λ (-t)^a)) / t
    let kernels: Vec<Vec<(Complex64, Complex64)>> = lambda_grid
        .iter()
        .map(|&lam| {
            js.iter()
                .map(|&j| {
                    let t = j as f64 * h;
                    let plus = cis2pi(lam * params.branch.pow(t, params.a)) / t;
                    let minus = -cis2pi(lam * params.branch.pow(-t, params.a)) / t;
                    (plus, minus)
                })
                .collect()
        })
        .collect();
    let (fs, gs) = (f.samples(), g.samples());
    let out: Vec<Complex64> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let i = i as isize;
            let mut best = 0.0f64;
            for ker in &kernels {
                let mut acc = ZERO;
                for (&j, &(kp, km)) in js.iter().zip(ker) {
                    let j = j as isize;
                    acc += at(fs, i - j) * at(gs, i + j) * kp + at(fs, i + j) * at(gs, i - j) * km;
                }
                best = best.max((acc * h).norm());
            }
            Complex64::new(best, 0.0)
        })
        .collect();
    Ok(f.with_samples(out)?)
}

/// `χ(λ, t) = Σ_{j+k ≤ 0} ρ̃(2^{-aj} λ) ρ(2^{-k} t)`, summed in closed form:
/// the `k`-sum is `θ(2^j t)` and only two `j` carry mass.
pub fn chi_low(a: f64, lambda: f64, t: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let rt = BumpFamily::rho_tilde(a);
    let j0 = (lambda.abs().log2() / a).floor() as i32;
    (j0 - 1..=j0 + 1)
        .map(|j| {
            let w = rt.eval(lambda * 2f64.powf(-a * j as f64));
            if w == 0.0 {
                0.0
            } else {
                w * theta_cutoff(t * 2f64.powi(j))
            }
        })
        .sum()
}

/// Low-oscillation component
/// `T₀(f,g)(x) = ∫ f(x-t) g(x+t) e(λ(x) t^a) χ(λ(x), t) dt/t` as a grid sum.
pub fn t0(f: &GridFunction, g: &GridFunction, params: &OperatorParams) -> Result<GridFunction> {
    f.check_same_grid(g)?;
    params.validate()?;
    let lam = params.lambda_on(f)?;
    let h = f.step();
    let eps = params.eps_trunc.max(h);
    let (fs, gs) = (f.samples(), g.samples());
    let out: Vec<Complex64> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let l = lam.samples()[i].re;
            if l == 0.0 {
                return ZERO;
            }
            // χ(λ, ·) vanishes beyond 2^{2 - j0}
            let reach = 2f64.powf(2.0 - (l.abs().log2() / params.a).floor()).min(params.r_trunc);
            let ii = i as isize;
            let mut acc = ZERO;
            for j in offsets(h, eps, reach, f.len()) {
                let t = j as f64 * h;
                let c = chi_low(params.a, l, t);
                if c == 0.0 {
                    continue;
                }
                let kp = cis2pi(l * params.branch.pow(t, params.a)) * c / t;
                let km = -cis2pi(l * params.branch.pow(-t, params.a)) * chi_low(params.a, l, -t) / t;
                let jj = j as isize;
                acc += at(fs, ii - jj) * at(gs, ii + jj) * kp + at(fs, ii + jj) * at(gs, ii - jj) * km;
            }
            acc * h
        })
        .collect();
    Ok(f.with_samples(out)?)
}

/// Scale piece
/// `T_{m,k}(f,g)(x) = ρ̃(2^{-a(m-k)} λ(x)) ∫ f(x-t) g(x+t) e(λ(x) t^a) ρ(2^{-k} t) dt/t`
/// by oscillatory quadrature on both halves of the annulus; `f` and `g` are
/// interpolated off the grid.
pub fn t_mk(f: &GridFunction, g: &GridFunction, params: &OperatorParams, budget: &Budget) -> Result<GridFunction> {
    f.check_same_grid(g)?;
    params.validate()?;
    let lam = params.lambda_on(f)?;
    let a = params.a;
    let k = params.k;
    let rt = BumpFamily::rho_tilde(a);
    let rho = BumpFamily::rho();
    let scale = params.lambda_scale();
    let (lo, hi) = (2f64.powi(k - 1), 2f64.powi(k + 1));
    let min_samples = ((4.0 * (hi - lo) / f.step()).ceil() as usize).max(256);
    let out: Result<Vec<Complex64>> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let x = f.x(i);
            let l = lam.samples()[i].re;
            let cut = rt.eval(l / scale);
            if cut == 0.0 {
                return Ok(ZERO);
            }
            let dbound = a * l.abs() * lo.powf(a - 1.0).max(hi.powf(a - 1.0));
            let mut total = ZERO;
            for sign in [1.0f64, -1.0] {
                let dom = OscDomain::new(lo, hi, dbound).with_min_samples(min_samples);
                let v = oscillatory_integral(
                    |s| {
                        let t = sign * s;
                        f.interp(x - t) * g.interp(x + t) * (rho.eval(t * 2f64.powi(-k)) / t)
                    },
                    |s| l * params.branch.pow(sign * s, a),
                    &dom,
                    budget,
                )?;
                total += v;
            }
            Ok(total * cut)
        })
        .collect();
    Ok(f.with_samples(out?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise_constant_lambda;

    fn grid(fun: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_real_fn(-4.0, 4.0, 256, fun).unwrap()
    }

    #[test]
    fn zero_input_gives_zero() {
        let f = grid(|x| (-x * x).exp());
        let z = grid(|_| 0.0);
        let p = OperatorParams::new(3.0, 1.0, 0).with_truncation(0.0, 2.0);
        let out = bc_a(&f, &z, &p, &[0.0, 5.0]).unwrap();
        assert!(out.sup_norm() == 0.0);
    }

    #[test]
    fn lambda_zero_is_truncated_bht() {
        let f = grid(|x| (-x * x).exp());
        let g = grid(|x| (-(x - 0.3).powi(2)).exp());
        let p = OperatorParams::new(3.0, 1.0, 0).with_truncation(0.0, 1.5);
        let out = bc_a(&f, &g, &p, &[0.0]).unwrap();
        let h = f.step();
        let i = 128usize;
        let mut acc = 0.0;
        for j in 1..=((1.5 / h) as usize) {
            let t = j as f64 * h;
            let x = f.x(i);
            acc += ((-(x - t).powi(2)).exp() * (-(x + t - 0.3).powi(2)).exp()
                - (-(x + t).powi(2)).exp() * (-(x - t - 0.3).powi(2)).exp())
                / t;
        }
        assert!((out.samples()[i].re - (acc * h).abs()).abs() < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let f = grid(|x| x);
        let g = GridFunction::from_real_fn(-4.0, 4.0, 128, |x| x).unwrap();
        let p = OperatorParams::new(3.0, 1.0, 0);
        assert!(bc_a(&f, &g, &p, &[1.0]).unwrap_err().to_string().starts_with("grid-mismatch"));
    }

    #[test]
    fn chi_low_localizes_phase() {
        // χ(λ,t) ≠ 0 forces |λ t^a| ≤ 2^{2a}
        for &l in &[0.3, 2.0, 50.0, 1e4] {
            for i in 1..200 {
                let t = i as f64 * 0.05;
                if chi_low(3.0, l, t) != 0.0 {
                    assert!(l * t.powi(3) <= 64.0 + 1e-9);
                }
            }
        }
        // and equals one when the phase is tiny
        assert!((chi_low(3.0, 1.0, 1e-3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn t_mk_vanishes_outside_lambda_band() {
        let f = grid(|x| (-x * x).exp());
        let p = OperatorParams::new(1.5, 2.0, 0)
            .with_lambda(piecewise_constant_lambda(-4.0, 4.0, 256, 1.0, &[1e6]).unwrap());
        let out = t_mk(&f, &f, &p, &Budget::default()).unwrap();
        assert_eq!(out.sup_norm(), 0.0);
    }
}

use bhc_core::{Complex64, GridFunction, SmoothStep};
use rayon::prelude::*;

use crate::ops::offsets;
use crate::{OpError, Result};

/// `θ(t) = Σ_{k ≤ 0} ρ(2^{-k} t) = 1 - S(log₂|t| - 1)`: one on `|t| ≤ 1`,
/// zero on `|t| ≥ 2`.
pub fn theta_cutoff(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    1.0 - SmoothStep::global().eval(t.abs().log2() - 1.0)
}

/// Bilinear maximal function
/// `sup_{r ∈ r_grid} (2r)^{-1} ∫_{-r}^{r} |f(x-t)| |g(x+t)| dt`
/// with radii snapped to grid multiples and trapezoid weights.
pub fn bilinear_max(f: &GridFunction, g: &GridFunction, r_grid: &[f64]) -> Result<GridFunction> {
    f.check_same_grid(g)?;
    if r_grid.is_empty() {
        return Err(OpError::Core(bhc_core::CoreError::EmptyGrid("r_grid")));
    }
    let h = f.step();
    let n = f.len() as isize;
    let mut radii: Vec<usize> = r_grid.iter().map(|&r| ((r / h).round() as usize).max(1)).collect();
    radii.sort_unstable();
    radii.dedup();
    let fa: Vec<f64> = f.samples().iter().map(|z| z.norm()).collect();
    let ga: Vec<f64> = g.samples().iter().map(|z| z.norm()).collect();
    let val = |v: &[f64], i: isize| if i < 0 || i >= n { 0.0 } else { v[i as usize] };
    let out: Vec<Complex64> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let i = i as isize;
            let centre = val(&fa, i) * val(&ga, i);
            let mut run = centre;
            let mut next = 1usize;
            let mut best = 0.0f64;
            for &jr in &radii {
                while next <= jr {
                    let j = next as isize;
                    run += val(&fa, i - j) * val(&ga, i + j) + val(&fa, i + j) * val(&ga, i - j);
                    next += 1;
                }
                let j = jr as isize;
                let ends = val(&fa, i - j) * val(&ga, i + j) + val(&fa, i + j) * val(&ga, i - j);
                let avg = (run - 0.5 * ends) / (2.0 * jr as f64);
                best = best.max(avg);
            }
            Complex64::new(best, 0.0)
        })
        .collect();
    Ok(f.with_samples(out)?)
}

/// Maximal smoothly truncated bilinear Hilbert transform
/// `sup_{r ∈ r_grid} |∫ f(x-t) g(x+t) θ(t/r) dt/t|`.
pub fn maximal_truncated_bht(f: &GridFunction, g: &GridFunction, r_grid: &[f64]) -> Result<GridFunction> {
    f.check_same_grid(g)?;
    if r_grid.is_empty() {
        return Err(OpError::Core(bhc_core::CoreError::EmptyGrid("r_grid")));
    }
    let h = f.step();
    let n = f.len() as isize;
    let (fs, gs) = (f.samples(), g.samples());
    let zero = Complex64::new(0.0, 0.0);
    let at = |v: &[Complex64], i: isize| if i < 0 || i >= n { zero } else { v[i as usize] };
    let out: Vec<Complex64> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let i = i as isize;
            let mut best = 0.0f64;
            for &r in r_grid {
                let mut acc = zero;
                for j in offsets(h, h, 2.0 * r, f.len()) {
                    let t = j as f64 * h;
                    let w = theta_cutoff(t / r) / t;
                    let jj = j as isize;
                    acc += (at(fs, i - jj) * at(gs, i + jj) - at(fs, i + jj) * at(gs, i - jj)) * w;
                }
                best = best.max((acc * h).norm());
            }
            Complex64::new(best, 0.0)
        })
        .collect();
    Ok(f.with_samples(out)?)
}

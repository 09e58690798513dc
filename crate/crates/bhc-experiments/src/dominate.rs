use bhc_core::{Budget, Complex64, GridFunction};
use bhc_operators::{bilinear_max, piecewise_constant_lambda, t_mk, OperatorParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

use crate::{ExperimentError, Result};

/// Grid of the domination sweep.
pub const DOMINATE_GRID: (f64, f64, usize) = (-8.0, 8.0, 512);
/// Points where the maximal function is below this fraction of its peak
/// are skipped.
pub const MAX_FLOOR: f64 = 1e-6;
/// Band of `λ/2^{a(m-k)}` for the random stopping times.
pub const DOMINATE_LAMBDA_BAND: (f64, f64) = (0.75, 1.5);
/// Highest frequency of the random inputs.
pub const DOMINATE_BANDWIDTH: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationRow {
    pub m: u32,
    pub k: i32,
    pub pair: usize,
    /// `max_x |T_{m,k}(f,g)(x)| / M(f,g)(x)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub a: f64,
    pub rows: Vec<DominationRow>,
    /// Largest ratio over all rows: the one uniform constant.
    pub constant: f64,
    pub runtime_s: f64,
}

/// Dyadic radii `2^i`, `i ∈ [-4, 4]`, for the bilinear maximal function.
pub fn dyadic_radii() -> Vec<f64> {
    (-4..=4).map(|i| 2f64.powi(i)).collect()
}

fn random_input(rng: &mut impl Rng) -> Result<GridFunction> {
    let (l, r, n) = DOMINATE_GRID;
    let proto = GridFunction::zeros(l, r, n)?;
    let mut spec = proto.spectrum();
    for i in 0..spec.len() {
        let xi = spec.freq(i);
        spec.bins_mut()[i] = if xi.abs() <= DOMINATE_BANDWIDTH {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    Ok(spec.to_grid()?)
}

/// `max_x |T_{m,k}(f,g)(x)| / M(f,g)(x)` over `m ∈ ms`, `k ∈ ks` and
/// `pairs` random `(f, g, λ)`, seeded.
pub fn domination_sweep(a: f64, ms: &[u32], ks: &[i32], pairs: usize, seed: u64, budget: &Budget) -> Result<DominationReport> {
    if !(a > 0.0) || a == 1.0 {
        return Err(ExperimentError::domain(format!("a = {a} is excluded")));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l, r, n) = DOMINATE_GRID;
    let radii = dyadic_radii();
    let mut rows = Vec::new();
    for pair in 0..pairs {
        let f = random_input(&mut rng)?;
        let g = random_input(&mut rng)?;
        let max = bilinear_max(&f, &g, &radii)?;
        let floor = MAX_FLOOR * max.sup_norm();
        let unit: Vec<f64> = (0..64).map(|_| rng.random::<f64>()).collect();
        for &m in ms {
            for &k in ks {
                let params = OperatorParams::new(a, m as f64, k);
                let scale = params.lambda_scale();
                let (b0, b1) = (DOMINATE_LAMBDA_BAND.0.ln(), DOMINATE_LAMBDA_BAND.1.ln());
                let values: Vec<f64> = unit.iter().map(|u| scale * (b0 + (b1 - b0) * u).exp()).collect();
                let lam = piecewise_constant_lambda(l, r, n, 0.25, &values)?;
                let t = t_mk(&f, &g, &params.with_lambda(lam), budget)?;
                let ratio = t
                    .samples()
                    .iter()
                    .zip(max.samples())
                    .filter(|(_, mx)| mx.re > floor)
                    .map(|(z, mx)| z.norm() / mx.re)
                    .fold(0.0, f64::max);
                rows.push(DominationRow { m, k, pair, ratio });
            }
        }
    }
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(DominationReport { a, rows, constant, runtime_s: start.elapsed().as_secs_f64() })
}

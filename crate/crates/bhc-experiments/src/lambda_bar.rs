use bhc_core::{cis2pi, Budget, Complex64, GridFunction};
use bhc_wavepackets::cbar_a;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use crate::{DecayReport, ExperimentError, Result};

/// Simpson nodes per period of the fastest `t`-oscillation.
pub const PTS_PER_CYCLE: f64 = 12.0;
/// `x` is sampled with step at most `2^{-am}/X_NODES_PER_CELL`.
pub const X_NODES_PER_CELL: f64 = 8.0;
/// Desk-scale band of the random stopping times, in units of `2^{am}`.
pub const DESK_LAMBDA_BAND: (f64, f64) = (0.5, 2.0);
/// Half-width of the grids built by [`lambda_bar_grid`].
pub const GRID_HALF_WIDTH: f64 = 8.0;

pub(crate) fn big_n(am: u32) -> Result<i64> {
    if am == 0 || am % 2 == 1 || am > 40 {
        return Err(ExperimentError::domain(format!("am = {am} must be even, positive and at most 40")));
    }
    Ok(1i64 << (am / 2))
}

/// Cells `I^q = [q/N, (q+1)/N)` indexed by `q ∈ [N, 2N-1]`; both `p` and `n`
/// run over this window.
pub fn cell_window(am: u32) -> Result<(i64, i64)> {
    let n = big_n(am)?;
    Ok((n, 2 * n - 1))
}

/// Zero grid on `[-8, 8]` whose step divides `1/N` an even number of times
/// and resolves the phase of Λ̄ for stopping times up to `lambda_hi`.
pub fn lambda_bar_grid(am: u32, a: f64, lambda_hi: f64) -> Result<GridFunction> {
    let n = big_n(am)? as f64;
    let gamma = cbar_a(a) * 2f64.powf(a - 1.0) * lambda_hi + 4.0 * n * n;
    let per_cell = ((PTS_PER_CYCLE * gamma / n).ceil() as usize).max(2).next_power_of_two();
    let len = (2.0 * GRID_HALF_WIDTH * n) as usize * per_cell;
    Ok(GridFunction::zeros(-GRID_HALF_WIDTH, GRID_HALF_WIDTH, len)?)
}

fn lattice_index(grid: &GridFunction, x: f64) -> Result<usize> {
    let pos = (x - grid.left()) / grid.step();
    let r = pos.round();
    if (pos - r).abs() > 1e-6 || r < 0.0 || r >= grid.len() as f64 {
        return Err(ExperimentError::domain(format!("x = {x} is not a grid point")));
    }
    Ok(r as usize)
}

/// `Λ̄^a_m(f,g)` restricted to the pairs `(p, n)` accepted by `keep`.
///
/// `x` runs over `[1, 2)` with a midpoint-type rule on the grid lattice and
/// each inner integral over `I^n` uses composite Simpson on the grid, so
/// `x ± t` are always grid points.
pub fn lambda_bar_masked<K>(f: &GridFunction, g: &GridFunction, lambda: &GridFunction, am: u32, a: f64, budget: &Budget, keep: K) -> Result<f64>
where
    K: Fn(i64, i64) -> bool + Sync,
{
    f.check_same_grid(g)?;
    f.check_same_grid(lambda)?;
    let big_n = big_n(am)?;
    let nf = big_n as f64;
    let h = f.step();
    let per_cell = (1.0 / (nf * h)).round();
    if (per_cell - 1.0 / (nf * h)).abs() > 1e-6 || per_cell < 2.0 || per_cell as usize % 2 == 1 {
        return Err(ExperimentError::domain("the grid step must divide 1/N an even number of times"));
    }
    let per_cell = per_cell as usize;
    let i_one = lattice_index(f, 1.0)?;
    let reach = 2 * big_n as usize * per_cell;
    if i_one < reach || i_one + 2 * reach >= f.len() {
        return Err(ExperimentError::domain("the grid does not contain x ± t for x ∈ [1,2), t ∈ [1,2)"));
    }
    let stride = ((1.0 / (X_NODES_PER_CELL * nf * nf * h)).floor() as usize).max(1);
    let nodes: Vec<usize> = (0..big_n as usize * per_cell).step_by(stride).map(|j| i_one + j + stride / 2).collect();
    budget.check((nodes.len() * big_n as usize * (per_cell + 1)) as u64)?;
    let cbar = cbar_a(a);
    let (fs, gs, ls) = (f.samples(), g.samples(), lambda.samples());
    let total: f64 = nodes
        .par_iter()
        .map(|&i| {
            let p = big_n + ((i - i_one) / per_cell) as i64;
            let lam = ls[i].re;
            let mut inner = 0.0;
            for n in big_n..2 * big_n {
                if !keep(p, n) {
                    continue;
                }
                let gamma = cbar * (n as f64 / nf).powf(a - 1.0) * lam;
                let k0 = n as usize * per_cell;
                let step = cis2pi(gamma * h);
                let mut z = cis2pi(gamma * k0 as f64 * h);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..=per_cell {
                    let k = k0 + j;
                    let w = if j == 0 || j == per_cell { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
                    acc += fs[i - k] * gs[i + k] * z * w;
                    z *= step;
                }
                inner += acc.norm() * h / 3.0;
            }
            inner * inner
        })
        .sum();
    Ok((total * stride as f64 * h).sqrt())
}

/// `Λ̄^a_m(f,g)` over the windows of [`cell_window`]; see [`lambda_bar_masked`].
pub fn lambda_bar(f: &GridFunction, g: &GridFunction, lambda: &GridFunction, am: u32, a: f64, budget: &Budget) -> Result<f64> {
    lambda_bar_masked(f, g, lambda, am, a, budget, |_, _| true)
}

/// Cells of a uniform/clustered split together with the mass threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSplit {
    pub clustered: Vec<i64>,
    pub uniform: Vec<i64>,
    /// `2^{(μ-1)am/2}‖f‖²`.
    pub threshold: f64,
}

impl CellSplit {
    pub fn is_clustered(&self, q: i64) -> bool {
        self.clustered.binary_search(&q).is_ok()
    }
}

/// Splits the cells `q ∈ cells` by `∫_{3I^q} |f|² ≥ 2^{(μ-1)am/2}‖f‖²`,
/// with `3I^q = [(q-1)/N, (q+2)/N)` and grid sums for the integrals.
pub fn split_uniform_clustered(f: &GridFunction, mu: f64, am: u32, cells: (i64, i64)) -> Result<CellSplit> {
    let nf = big_n(am)? as f64;
    let h = f.step();
    let mass: Vec<f64> = f.samples().iter().map(|z| z.norm_sqr() * h).collect();
    let mut prefix = vec![0.0; mass.len() + 1];
    for (i, m) in mass.iter().enumerate() {
        prefix[i + 1] = prefix[i] + m;
    }
    let total = prefix[mass.len()];
    let threshold = 2f64.powf((mu - 1.0) * am as f64 / 2.0) * total;
    let idx = |x: f64| (((x - f.left()) / h).ceil().max(0.0) as usize).min(mass.len());
    let (mut clustered, mut uniform) = (Vec::new(), Vec::new());
    for q in cells.0..=cells.1 {
        let local = prefix[idx((q + 2) as f64 / nf)] - prefix[idx((q - 1) as f64 / nf)];
        if local >= threshold {
            clustered.push(q);
        } else {
            uniform.push(q);
        }
    }
    Ok(CellSplit { clustered, uniform, threshold })
}

/// Cells met by `x - t` and `x + t` for `x, t` in the Λ̄ windows.
pub fn input_cells(am: u32) -> Result<((i64, i64), (i64, i64))> {
    let n = big_n(am)?;
    Ok(((-n, n), (2 * n, 4 * n)))
}

/// The clustered sub-form: pairs with `p - n ∈ C_μ(f)` or `p + n ∈ C_μ(g)`.
pub fn lambda_bar_clustered(f: &GridFunction, g: &GridFunction, lambda: &GridFunction, am: u32, a: f64, mu: f64, budget: &Budget) -> Result<f64> {
    let (fc, gc) = input_cells(am)?;
    let sf = split_uniform_clustered(f, mu, am, fc)?;
    let sg = split_uniform_clustered(g, mu, am, gc)?;
    lambda_bar_masked(f, g, lambda, am, a, budget, |p, n| sf.is_clustered(p - n) || sg.is_clustered(p + n))
}

/// Unit-norm random function with spectrum on `2^{am}·band`, spread over the
/// whole grid so that no cell carries a large share of its mass.
pub fn random_band_function(grid: &GridFunction, am: u32, band: (f64, f64), rng: &mut impl Rng) -> Result<GridFunction> {
    let s = 2f64.powi(am as i32);
    let (lo, hi) = (band.0 * s, band.1 * s);
    let mut spec = grid.spectrum();
    for i in 0..spec.len() {
        let xi = spec.freq(i);
        spec.bins_mut()[i] = if xi >= lo && xi < hi {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let f = spec.to_grid()?;
    let norm = f.norm_l2();
    if norm == 0.0 {
        return Err(ExperimentError::domain("frequency band contains no grid bin"));
    }
    Ok(f.scale(Complex64::new(1.0 / norm, 0.0)))
}

/// Stopping time constant on the dyadic cells of length `2^{-am}`, with
/// log-uniform values in `2^{am}·band`.
pub fn random_stopping_time(grid: &GridFunction, am: u32, band: (f64, f64), rng: &mut impl Rng) -> Result<GridFunction> {
    if !(band.0 > 0.0 && band.0 <= band.1) {
        return Err(ExperimentError::domain(format!("invalid band {band:?}")));
    }
    let s = 2f64.powi(am as i32);
    let cells = (grid.length() * s).ceil() as usize;
    let (l0, l1) = (band.0.log2(), band.1.log2());
    let values: Vec<f64> = (0..cells).map(|_| s * 2f64.powf(l0 + (l1 - l0) * rng.random::<f64>())).collect();
    let out = (0..grid.len())
        .map(|i| {
            let c = (((grid.x(i) - grid.left()) * s).floor() as usize).min(cells - 1);
            Complex64::new(values[c], 0.0)
        })
        .collect();
    Ok(grid.with_samples(out)?)
}

/// Frequency bands, in units of `2^{am}`, of the random `f` and `g`.
pub const F_BAND: (f64, f64) = (2.0, 3.0);
pub const G_BAND: (f64, f64) = (0.0, 1.0);

/// Inputs of one decay sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySweep {
    pub a: f64,
    pub am_values: Vec<u32>,
    /// Independent `(f, g, λ)` draws averaged per scale.
    pub trials: usize,
    pub seed: u64,
    pub lambda_band: (f64, f64),
}

impl DecaySweep {
    pub fn new(a: f64, am_values: Vec<u32>, seed: u64) -> Self {
        Self { a, am_values, trials: 1, seed, lambda_band: DESK_LAMBDA_BAND }
    }
}

/// One `(f, g, λ)` draw at scale `am`, seeded from `(seed, am, trial)`.
pub fn decay_instance(sweep: &DecaySweep, am: u32, trial: usize) -> Result<(GridFunction, GridFunction, GridFunction)> {
    let grid = lambda_bar_grid(am, sweep.a, sweep.lambda_band.1 * 2f64.powi(am as i32))?;
    let mut rng = ChaCha8Rng::seed_from_u64(sweep.seed);
    rng.set_stream(((am as u64) << 32) | trial as u64);
    let f = random_band_function(&grid, am, F_BAND, &mut rng)?;
    let g = random_band_function(&grid, am, G_BAND, &mut rng)?;
    let lam = random_stopping_time(&grid, am, sweep.lambda_band, &mut rng)?;
    Ok((f, g, lam))
}

/// Mean of `Λ̄/(‖f‖‖g‖)` per scale. The bound column holds the
/// Cauchy–Schwarz ceiling `|⋃ I^p|^{1/2} = 1`.
pub fn decay_sweep(sweep: &DecaySweep, budget: &Budget) -> Result<DecayReport> {
    let start = Instant::now();
    let mut values = Vec::new();
    for &am in &sweep.am_values {
        let mut acc = 0.0;
        for t in 0..sweep.trials.max(1) {
            let (f, g, lam) = decay_instance(sweep, am, t)?;
            acc += lambda_bar(&f, &g, &lam, am, sweep.a, budget)? / (f.norm_l2() * g.norm_l2());
        }
        values.push(acc / sweep.trials.max(1) as f64);
    }
    let bounds = vec![1.0; values.len()];
    Ok(DecayReport::new("decay", sweep.a, sweep.am_values.clone(), values, bounds, sweep.seed)?.with_runtime(start.elapsed().as_secs_f64()))
}

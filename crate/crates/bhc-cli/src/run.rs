use anyhow::{ensure, Result};
use bhc_core::{Budget, Complex64, GridFunction, BUDGET_ENV};
use bhc_experiments::{
    build_counterexample, decay_sweep, domination_sweep, fmt17, full_ratio, i_term_check, stationary_phase_sweep,
    DecaySweep, KappaMode, TARGET_SLOPE,
};
use bhc_expsums::{
    level_set_measure, phase_levelset_measure, s_ladder, weyl_sum, weyl_sweep, Fewnomial, LambdaTilde, LEVEL_SET_SAMPLES,
};
use bhc_tiles::{check_size_energy, random_collection};
use bhc_wavepackets::{gabor_coeffs, gabor_reconstruct, DualFrame, PacketFrame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::config::{Experiment, ExperimentConfig};

/// Budget used when [`BUDGET_ENV`] is unset.
pub const CLI_DEFAULT_BUDGET: u64 = 1 << 40;
/// Largest relative L² reconstruction error accepted by `gabor`.
pub const GABOR_TOL: f64 = 1e-6;
/// Smallest `ratio(am)/ratio(am_min)` accepted by `counterexample`.
pub const NON_DECAY_FRACTION: f64 = 0.5;

pub fn budget_from_env() -> Result<Budget> {
    Ok(match std::env::var_os(BUDGET_ENV) {
        Some(_) => Budget::from_env()?,
        None => Budget::new(CLI_DEFAULT_BUDGET),
    })
}

/// CSV table plus the summary of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub csv: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, Value>,
}

/// Summary JSON written next to the CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub config_hash: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, Value>,
}

impl Outcome {
    fn new(csv: String, pass: bool) -> Self {
        Self { csv, pass, metrics: BTreeMap::new() }
    }

    fn metric(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.metrics.insert(key.to_string(), v.into());
        self
    }

    pub fn summary(&self, cfg: &ExperimentConfig) -> Summary {
        Summary {
            experiment: cfg.experiment.name().to_string(),
            config_hash: cfg.config_hash(),
            pass: self.pass,
            metrics: self.metrics.clone(),
        }
    }
}

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &ExperimentConfig, budget: &Budget) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Gabor => gabor(cfg),
        Experiment::Multiplier => multiplier(cfg, budget),
        Experiment::Decay => decay(cfg, budget),
        Experiment::Weyl => weyl(cfg, budget),
        Experiment::Levelset => levelset(cfg),
        Experiment::Tiles => tiles(cfg),
        Experiment::Counterexample => counterexample(cfg, budget),
        Experiment::Dominate => dominate(cfg, budget),
    }
}

fn gabor(cfg: &ExperimentConfig) -> Result<Outcome> {
    let proto = GridFunction::zeros(-8.0, 8.0, cfg.grid_size)?;
    let (frame, ur, nr) = (PacketFrame::new(2, 2, 1), (0, 7), (-32, 31));
    let dual = DualFrame::new(&proto, frame, ur, nr)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("trial,rel_error\n");
    let mut worst = 0.0f64;
    for trial in 0..cfg.trials {
        let mut spec = proto.spectrum();
        for i in 0..spec.len() {
            spec.bins_mut()[i] = if dual.frame_symbol(spec.freq(i)) >= 1e-6 {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            } else {
                Complex64::default()
            };
        }
        let f = spec.to_grid()?;
        let rec = gabor_reconstruct(&gabor_coeffs(&f, frame, ur, nr)?, &dual)?;
        let err = rec.sub(&f)?.norm_l2() / f.norm_l2();
        worst = worst.max(err);
        writeln!(csv, "{trial},{}", fmt17(err))?;
    }
    Ok(Outcome::new(csv, worst < GABOR_TOL).metric("max_rel_error", worst))
}

fn multiplier(cfg: &ExperimentConfig, budget: &Budget) -> Result<Outcome> {
    let r = stationary_phase_sweep(cfg.a, cfg.k[0], &cfg.am, KappaMode::Fitted, budget)?;
    let d = &r.decay;
    let pass = d.strictly_decreasing() && d.slope <= TARGET_SLOPE;
    Ok(Outcome::new(d.to_csv(), pass)
        .metric("slope", d.slope)
        .metric("kappa_re", r.kappa.0)
        .metric("kappa_im", r.kappa.1)
        .metric("values", d.values.clone()))
}

fn decay(cfg: &ExperimentConfig, budget: &Budget) -> Result<Outcome> {
    let sweep = DecaySweep {
        a: cfg.a,
        am_values: cfg.am.clone(),
        trials: cfg.trials,
        seed: cfg.seed,
        lambda_band: (cfg.windows.lambda_band[0], cfg.windows.lambda_band[1]),
    };
    let r = decay_sweep(&sweep, budget)?;
    let pass = r.non_increasing() && r.slope < 0.0 && r.within_bounds();
    Ok(Outcome::new(r.to_csv(), pass).metric("slope", r.slope).metric("values", r.values.clone()))
}

fn weyl(cfg: &ExperimentConfig, budget: &Budget) -> Result<Outcome> {
    let mut csv = String::from("am,s,value,normalized\n");
    let mut maxes = Vec::new();
    let mut exact_at_zero = true;
    let mut random_resonant = false;
    for &am in &cfg.am {
        let n = 1i64 << (am / 2);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(am as u64);
        let lam = LambdaTilde::random_piecewise(&mut rng, 2 * n, (2 * n - 1) as usize, 8, n as f64, 2.0 * n as f64);
        let zero = weyl_sum(0.0, &lam, am, cfg.a, budget)?;
        exact_at_zero &= zero.abs == zero.trivial && zero.trivial == 4f64.powi(am as i32);
        let sw = weyl_sweep(&s_ladder(am, 0.25, 9)?, &lam, am, cfg.a, budget)?;
        for r in &sw.reports {
            writeln!(csv, "{am},{},{},{}", fmt17(r.s), fmt17(r.abs), fmt17(r.normalized()))?;
        }
        random_resonant |= sw.resonant;
        maxes.push(sw.max_normalized);
    }
    // constant λ̃ with a = 3 is the resonant witness
    let am0 = cfg.am[0];
    let n = 1i64 << (am0 / 2);
    let witness = LambdaTilde::constant(2 * n, (2 * n - 1) as usize, 1.5 * n as f64);
    let wsw = weyl_sweep(&s_ladder(am0, 0.25, 9)?, &witness, am0, 3.0, budget)?;
    let decreasing = maxes.windows(2).all(|w| w[1] < w[0]);
    let pass = exact_at_zero && decreasing && !random_resonant && wsw.resonant;
    Ok(Outcome::new(csv, pass)
        .metric("max_normalized", maxes)
        .metric("exact_at_zero", exact_at_zero)
        .metric("witness_resonant", wsw.resonant)
        .metric("witness_max_normalized", wsw.max_normalized))
}

fn random_fewnomial(rng: &mut ChaCha8Rng, n: usize, d: f64) -> Result<Fewnomial> {
    let mut terms: Vec<(f64, f64)> = Vec::new();
    while terms.len() < n {
        let al: f64 = rng.random_range(-0.5..0.5);
        if terms.iter().all(|t| (t.1 - al).abs() > 0.05) {
            let c: f64 = rng.random_range(0.1..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            terms.push((c, al));
        }
    }
    Ok(Fewnomial::new(d, terms, (1.0, 2.0))?)
}

fn random_pqr(rng: &mut ChaCha8Rng, n: i64) -> (i64, i64, i64) {
    loop {
        let p = rng.random_range(2 * n..=4 * n - 2);
        let q = rng.random_range(2 * n..=4 * n - 2);
        let r = rng.random_range(2 * n..=4 * n - 2);
        if p != q && q != r && p != r && (2 * n..=4 * n - 2).contains(&(q + r - p)) {
            return (p, q, r);
        }
    }
}

fn levelset(cfg: &ExperimentConfig) -> Result<Outcome> {
    let slack = cfg.slack.factor;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("kind,index,measure,bound\n");
    let mut worst = 0.0f64;
    for i in 0..cfg.trials {
        let d = [1.5, 2.0, 3.0][i % 3];
        let f = random_fewnomial(&mut rng, 1 + i % 6, d)?;
        let sup = (0..1000).map(|j| f.eval(1.0 + j as f64 / 999.0).abs()).fold(0.0, f64::max);
        let eta = sup * 10f64.powf(-rng.random_range(0.5..4.0));
        let r = level_set_measure(&f, eta, (1.0, 2.0), LEVEL_SET_SAMPLES)?;
        worst = worst.max(r.measure / r.bound);
        writeln!(csv, "fewnomial,{i},{},{}", fmt17(r.measure), fmt17(r.bound))?;
    }
    let am = cfg.am[0];
    let n = 1i64 << (am / 2);
    let (mut checked, mut tries) = (0, 0);
    while checked < cfg.trials.div_ceil(2) {
        tries += 1;
        ensure!(tries < 100 * cfg.trials, "too few admissible phase instances");
        let a = [3.0, 4.0, 5.0, 6.0][checked % 4];
        let lam = LambdaTilde::random_piecewise(&mut rng, 2 * n, (2 * n - 1) as usize, 5, n as f64, 2.0 * n as f64);
        let (p, q, r) = random_pqr(&mut rng, n);
        let probe = phase_levelset_measure(p, q, r, &lam, 1.0, a, am)?;
        if probe.bound.infinite || probe.derivative_sup == 0.0 {
            continue;
        }
        let eta = probe.derivative_sup * 10f64.powf(-rng.random_range(0.5..3.0));
        let m = phase_levelset_measure(p, q, r, &lam, eta, a, am)?;
        worst = worst.max(m.measure / m.bound.cover());
        writeln!(csv, "phase,{checked},{},{}", fmt17(m.measure), fmt17(m.bound.cover()))?;
        checked += 1;
    }
    Ok(Outcome::new(csv, worst <= slack).metric("worst_ratio", worst))
}

fn tiles(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("index,tiles,lhs,rhs,ratio\n");
    let mut worst = 0.0f64;
    for i in 0..cfg.trials {
        let c = random_collection(&mut rng, 20, cfg.am[0]);
        let r = check_size_energy(&c, [1.0 / 3.0; 3])?;
        worst = worst.max(r.ratio);
        writeln!(csv, "{i},{},{},{},{}", c.len(), fmt17(r.lhs), fmt17(r.rhs), fmt17(r.ratio))?;
    }
    Ok(Outcome::new(csv, worst <= cfg.slack.factor).metric("worst_ratio", worst))
}

fn counterexample(cfg: &ExperimentConfig, budget: &Budget) -> Result<Outcome> {
    let mut csv = String::from("am,ratio,full_ratio,i_term_fraction\n");
    let mut rows = Vec::new();
    let mut i_term = true;
    for &am in &cfg.am {
        let inst = build_counterexample(am, cfg.windows.stride, cfg.a, budget)?;
        let full = full_ratio(&inst, budget)?;
        let it = i_term_check(&inst)?;
        i_term &= it.holds();
        writeln!(csv, "{am},{},{},{}", fmt17(inst.ratio), fmt17(full), fmt17(it.min_fraction))?;
        rows.push((inst.ratio, full));
    }
    let (r0, f0) = rows[0];
    let rel = rows.iter().map(|r| (r.0 / r0).min(r.1 / f0)).fold(f64::INFINITY, f64::min);
    let pass = r0 > 0.0 && f0 > 0.0 && rel >= NON_DECAY_FRACTION && i_term;
    Ok(Outcome::new(csv, pass)
        .metric("ratio", r0)
        .metric("ratios", rows.iter().map(|r| r.0).collect::<Vec<_>>())
        .metric("full_ratios", rows.iter().map(|r| r.1).collect::<Vec<_>>())
        .metric("min_relative_ratio", rel)
        .metric("i_term_holds", i_term))
}

fn dominate(cfg: &ExperimentConfig, budget: &Budget) -> Result<Outcome> {
    let r = domination_sweep(cfg.a, &cfg.m, &cfg.k, cfg.trials, cfg.seed, budget)?;
    let mut csv = String::from("m,k,pair,ratio\n");
    for row in &r.rows {
        writeln!(csv, "{},{},{},{}", row.m, row.k, row.pair, fmt17(row.ratio))?;
    }
    Ok(Outcome::new(csv, r.constant < cfg.slack.factor).metric("constant", r.constant))
}

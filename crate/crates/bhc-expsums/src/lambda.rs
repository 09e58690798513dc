use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{ExpSumError, Result};

/// Real samples `λ̃(p)` indexed by consecutive integers `p = start, start+1, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaTilde {
    pub start: i64,
    pub values: Vec<f64>,
}

impl LambdaTilde {
    pub fn new(start: i64, values: Vec<f64>) -> Self {
        Self { start, values }
    }

    pub fn constant(start: i64, len: usize, value: f64) -> Self {
        Self::new(start, vec![value; len])
    }

    /// `λ̃(p) = c0 + slope·(p - start)`.
    pub fn affine(start: i64, len: usize, c0: f64, slope: f64) -> Self {
        Self::new(start, (0..len).map(|i| c0 + slope * i as f64).collect())
    }

    /// Piecewise constant with `pieces` runs of (nearly) equal length, each
    /// value uniform in `[lo, hi)`.
    pub fn random_piecewise<R: Rng + ?Sized>(rng: &mut R, start: i64, len: usize, pieces: usize, lo: f64, hi: f64) -> Self {
        let pieces = pieces.clamp(1, len.max(1));
        let levels: Vec<f64> = (0..pieces).map(|_| rng.random_range(lo..hi)).collect();
        let values = (0..len).map(|i| levels[i * pieces / len.max(1)]).collect();
        Self::new(start, values)
    }

    /// Independent uniform samples in `[lo, hi)`.
    pub fn random_iid<R: Rng + ?Sized>(rng: &mut R, start: i64, len: usize, lo: f64, hi: f64) -> Self {
        Self::new(start, (0..len).map(|_| rng.random_range(lo..hi)).collect())
    }

    /// `λ̃ = c·λ·2^{-am/2}` from samples of the linearizing function.
    pub fn from_lambda(start: i64, lambda: &[f64], c: f64, am: u32) -> Self {
        let s = c * 2f64.powf(-(am as f64) / 2.0);
        Self::new(start, lambda.iter().map(|l| l * s).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last covered index.
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn get(&self, p: i64) -> Option<f64> {
        if p < self.start {
            return None;
        }
        self.values.get((p - self.start) as usize).copied()
    }

    /// Value at `p`, which the caller has already range-checked.
    pub(crate) fn at(&self, p: i64) -> f64 {
        self.values[(p - self.start) as usize]
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo >= self.start && hi <= self.end()
    }

    pub(crate) fn require(&self, lo: i64, hi: i64) -> Result<()> {
        if !self.covers(lo, hi) {
            return Err(ExpSumError::Samples(format!(
                "samples cover [{}, {}], need [{lo}, {hi}]",
                self.start,
                self.end()
            )));
        }
        Ok(())
    }

    pub(crate) fn require_band(&self, lo: i64, hi: i64, band: (f64, f64)) -> Result<()> {
        for p in lo..=hi {
            let v = self.at(p);
            if !(v >= band.0 && v <= band.1) {
                return Err(ExpSumError::Samples(format!(
                    "λ̃({p}) = {v} lies outside [{}, {}]",
                    band.0, band.1
                )));
            }
        }
        Ok(())
    }

    /// True when every second difference vanishes to relative precision `tol`.
    pub fn is_affine(&self, tol: f64) -> bool {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        self.values.windows(3).all(|w| (w[0] - 2.0 * w[1] + w[2]).abs() <= tol * scale)
    }
}

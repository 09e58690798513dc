use serde::Serialize;

use crate::{ExperimentError, Result};

/// Formats `x` with 17 significant digits, enough to round-trip an `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(ExperimentError::domain("a slope needs at least two paired points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    if !slope.is_finite() {
        return Err(ExperimentError::domain("slope is not finite"));
    }
    Ok(slope)
}

/// Per-scale measurements of one experiment together with the inputs
/// needed to reproduce them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub experiment: String,
    pub a: f64,
    pub am_values: Vec<u32>,
    pub values: Vec<f64>,
    pub log2_values: Vec<f64>,
    pub bounds: Vec<f64>,
    /// Fitted `d log₂(value) / d(am)`.
    pub slope: f64,
    pub runtime_s: f64,
    pub seed: u64,
    pub config_hash: String,
}

impl DecayReport {
    /// Fails unless every value is positive and finite, so that the slope is
    /// finite.
    pub fn new(experiment: &str, a: f64, am_values: Vec<u32>, values: Vec<f64>, bounds: Vec<f64>, seed: u64) -> Result<Self> {
        if am_values.len() != values.len() || bounds.len() != values.len() {
            return Err(ExperimentError::domain("am values, values and bounds differ in length"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(ExperimentError::domain(format!("value {v} has no finite logarithm")));
        }
        let log2_values: Vec<f64> = values.iter().map(|v| v.log2()).collect();
        let xs: Vec<f64> = am_values.iter().map(|&am| am as f64).collect();
        let slope = fit_slope(&xs, &log2_values)?;
        Ok(Self {
            experiment: experiment.to_string(),
            a,
            am_values,
            values,
            log2_values,
            bounds,
            slope,
            runtime_s: 0.0,
            seed,
            config_hash: String::new(),
        })
    }

    pub fn with_runtime(mut self, seconds: f64) -> Self {
        self.runtime_s = seconds;
        self
    }

    pub fn with_config_hash(mut self, hash: impl Into<String>) -> Self {
        self.config_hash = hash.into();
        self
    }

    pub fn non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] < w[0])
    }

    pub fn within_bounds(&self) -> bool {
        self.values.iter().zip(&self.bounds).all(|(v, b)| v <= b)
    }

    /// CSV with the frozen header `m,value,log2_value,bound`, where `m = am/a`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,value,log2_value,bound\n");
        for i in 0..self.values.len() {
            let m = self.am_values[i] as f64 / self.a;
            out += &format!(
                "{},{},{},{}\n",
                fmt17(m),
                fmt17(self.values[i]),
                fmt17(self.log2_values[i]),
                fmt17(self.bounds[i])
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power() {
        let r = DecayReport::new("t", 4.0, vec![4, 6, 8], vec![1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0], vec![1.0; 3], 0).unwrap();
        assert!((r.slope + 1.0).abs() < 1e-12);
        assert!(r.strictly_decreasing());
        assert!(r.to_csv().starts_with("m,value,log2_value,bound\n1.0000000000000000e0,"));
    }

    #[test]
    fn zero_value_rejected() {
        assert!(DecayReport::new("t", 4.0, vec![4, 6], vec![1.0, 0.0], vec![1.0; 2], 0).is_err());
    }

    #[test]
    fn fmt17_round_trips() {
        let x = 0.1 + 0.2;
        assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }
}

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Gabor,
    Multiplier,
    Decay,
    Weyl,
    Levelset,
    Tiles,
    Counterexample,
    Dominate,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Gabor,
        Experiment::Multiplier,
        Experiment::Decay,
        Experiment::Weyl,
        Experiment::Levelset,
        Experiment::Tiles,
        Experiment::Counterexample,
        Experiment::Dominate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Gabor => "gabor",
            Experiment::Multiplier => "multiplier",
            Experiment::Decay => "decay",
            Experiment::Weyl => "weyl",
            Experiment::Levelset => "levelset",
            Experiment::Tiles => "tiles",
            Experiment::Counterexample => "counterexample",
            Experiment::Dominate => "dominate",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .with_context(|| format!("unknown experiment `{s}` (expected one of gabor, multiplier, decay, weyl, levelset, tiles, counterexample, dominate)"))
    }
}

/// Acceptance slack applied to constant-sensitive comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slack {
    pub factor: f64,
}

/// Window constants of the experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    /// Stride of the counterexample progression.
    pub stride: i64,
    /// Band of `λ/2^{am}` for random stopping times.
    pub lambda_band: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub a: f64,
    /// Ladder of `am` values.
    pub am: Vec<u32>,
    /// Scale indices `m` and `k` of the domination sweep; `k[0]` is the
    /// multiplier's `k`.
    pub m: Vec<u32>,
    pub k: Vec<i32>,
    pub grid_size: usize,
    /// At most `2^63 - 1` so that TOML can carry it.
    pub seed: u64,
    /// Random instances (signals, collections, pairs) per experiment.
    pub trials: usize,
    pub slack: Slack,
    pub windows: WindowConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Embedded defaults of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let (a, am, trials, slack) = match experiment {
            Experiment::Gabor => (3.0, vec![4], 20, 1.0),
            Experiment::Multiplier => (3.0, vec![4, 6, 8, 10], 1, 1.0),
            Experiment::Decay => (4.0, vec![4, 6, 8], 3, 1.0),
            Experiment::Weyl => (4.0, vec![4, 8, 12], 1, 1.0),
            Experiment::Levelset => (4.0, vec![8], 200, 10.0),
            Experiment::Tiles => (3.0, vec![4], 100, 10.0),
            Experiment::Counterexample => (3.0, vec![4, 6, 8], 1, 1.0),
            Experiment::Dominate => (1.5, vec![4], 10, 50.0),
        };
        Self {
            experiment,
            a,
            am,
            m: vec![1, 2, 3, 4],
            k: if experiment == Experiment::Dominate { vec![-2, -1, 0, 1, 2] } else { vec![0] },
            grid_size: 4096,
            seed: 1,
            trials,
            slack: Slack { factor: slack },
            windows: WindowConfig { stride: 2, lambda_band: [0.5, 2.0] },
            output: OutputConfig { dir: PathBuf::from("out") },
        }
    }

    /// Reads a TOML or JSON file. Keys it omits take the defaults of the
    /// experiment it names, or of `fallback`.
    pub fn load(path: &Path, fallback: Option<Experiment>) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, is_json(path, &text), fallback).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str, json: bool, fallback: Option<Experiment>) -> Result<Self> {
        let overlay: Value = if json { serde_json::from_str(text)? } else { toml::from_str(text)? };
        let Value::Object(map) = &overlay else { bail!("the configuration must be a table") };
        let experiment = match (map.get("experiment"), fallback) {
            (Some(Value::String(s)), _) => s.parse()?,
            (Some(other), _) => bail!("`experiment` must be a string, found {other}"),
            (None, Some(e)) => e,
            (None, None) => bail!("no experiment named in the configuration or on the command line"),
        };
        let mut merged = serde_json::to_value(Self::defaults(experiment))?;
        merge(&mut merged, overlay);
        let cfg: Self = serde_json::from_value(merged)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || self.a <= 0.0 || self.a == 1.0 {
            bail!("a = {} must be positive and different from 1", self.a);
        }
        if self.am.is_empty() {
            bail!("the am ladder is empty");
        }
        if let Some(bad) = self.am.iter().find(|&&am| am == 0 || am % 2 == 1 || am > 40) {
            bail!("am = {bad} must be even and in [2, 40]");
        }
        if self.m.is_empty() || self.k.is_empty() {
            bail!("the m and k ladders must be non-empty");
        }
        if !self.grid_size.is_power_of_two() || self.grid_size < 64 {
            bail!("grid_size = {} must be a power of two of at least 64", self.grid_size);
        }
        if self.seed > i64::MAX as u64 {
            bail!("seed {} exceeds 2^63 - 1, the largest TOML integer", self.seed);
        }
        if self.trials == 0 {
            bail!("trials must be positive");
        }
        if !(self.slack.factor > 0.0) {
            bail!("slack factor {} must be positive", self.slack.factor);
        }
        if self.windows.stride < 1 {
            bail!("stride {} must be at least 1", self.windows.stride);
        }
        let [lo, hi] = self.windows.lambda_band;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            bail!("lambda_band [{lo}, {hi}] must satisfy 0 < lo < hi");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// SHA-256 of the canonical JSON encoding (struct field order), in hex.
    /// The output directory does not enter the hash.
    pub fn config_hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        let canonical = serde_json::to_vec(&c).expect("configuration serializes");
        format!("{:x}", Sha256::digest(canonical))
    }
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{')
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (key, v) in o {
                match b.get_mut(&key) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(key, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        for e in Experiment::ALL {
            let cfg = ExperimentConfig::defaults(e);
            let back = ExperimentConfig::parse(&cfg.to_toml().unwrap(), false, None).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.config_hash(), cfg.config_hash());
        }
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = ExperimentConfig::parse("experiment = \"decay\"\nseed = 9\n[slack]\nfactor = 2.0\n", false, None).unwrap();
        let mut want = ExperimentConfig::defaults(Experiment::Decay);
        want.seed = 9;
        want.slack.factor = 2.0;
        assert_eq!(cfg, want);
    }

    #[test]
    fn json_accepted() {
        let cfg = ExperimentConfig::parse(r#"{"experiment": "weyl", "am": [4, 8]}"#, true, None).unwrap();
        assert_eq!(cfg.am, vec![4, 8]);
    }

    #[test]
    fn unknown_key_and_experiment_rejected() {
        assert!(ExperimentConfig::parse("experiment = \"decay\"\nsed = 3\n", false, None).is_err());
        assert!(ExperimentConfig::parse("experiment = \"fourier\"\n", false, None).is_err());
        assert!(ExperimentConfig::parse("seed = 3\n", false, None).is_err());
        assert!(ExperimentConfig::parse("experiment = \"decay\"\nam = [5]\n", false, None).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::defaults(Experiment::Gabor);
        let mut b = a.clone();
        b.seed += 1;
        assert_ne!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 64);
        let mut c = a.clone();
        c.output.dir = PathBuf::from("elsewhere");
        assert_eq!(a.config_hash(), c.config_hash());
    }
}

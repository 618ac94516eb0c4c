//! Experiment configuration files (TOML).
//!
//! ```toml
//! version = 1
//! epochs = 400
//! seeds = [1, 2, 3, 4, 5]
//!
//! [dataset]
//! kind = "iris"
//!
//! [split]
//! kind = "k-fold"
//! folds = 2
//!
//! [[network.hidden]]
//! n_neurons = 10
//! tau = 0.6
//!
//! [network.output]
//! k = 1
//! tau = 0.9
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::encoders::{GrfEncoderConfig, MorseTask, MorseTiming, RandomPatternTaskConfig};
use crate::error::{Error, Result};
use crate::layer::{self, LayerParams};
use crate::network::{NetworkConfig, OutputLayerConfig};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub epochs: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub split: SplitSpec,
    pub network: NetworkSpec,
    #[serde(default)]
    pub log: LogSpec,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DatasetSpec {
    RandomPattern(RandomPatternTaskConfig),
    Morse {
        /// One of the bundled vocabularies; ignored if `vocabulary` is set.
        preset: Option<MorseTask>,
        vocabulary: Option<Vec<String>>,
        #[serde(default)]
        timing: MorseTiming,
        item_gap: Option<f64>,
        #[serde(default = "one")]
        repetitions: usize,
    },
    /// A numeric table with a class column, population coded per example.
    /// Without `path` the bundled IRIS data is used.
    Iris {
        path: Option<PathBuf>,
        #[serde(default)]
        grf: GrfEncoderConfig,
    },
    SpikeCsv {
        events: PathBuf,
        labels: PathBuf,
        n_channels: usize,
        n_classes: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SplitSpec {
    /// Train and evaluate on the whole dataset.
    #[default]
    None,
    /// Stratified holdout with the given test fraction.
    Holdout { test_fraction: f64 },
    /// Stratified k-fold cross-validation.
    KFold { folds: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    #[serde(default)]
    pub hidden: Vec<HiddenSpec>,
    pub output: OutputLayerSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiddenSpec {
    pub n_neurons: usize,
    /// Input time-surface decay constant of this layer.
    pub tau: f64,
    pub phi: Option<f64>,
    pub eta: Option<f64>,
    pub eta_thresh: Option<f64>,
    pub theta_open: Option<f64>,
    pub theta_init: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputLayerSpec {
    /// Neurons per class.
    #[serde(default = "one")]
    pub k: usize,
    pub tau: f64,
    pub eta: Option<f64>,
    pub eta_thresh: Option<f64>,
    pub theta_open: Option<f64>,
    pub theta_init: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventLog {
    None,
    #[default]
    Last,
    All,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSpec {
    /// Which training epochs go into `events.csv`.
    #[serde(default)]
    pub event_log: EventLog,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config; relative dataset paths resolve against the file's
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        cfg.check_files()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.dataset {
            DatasetSpec::Iris { path: Some(p), .. } => fix(p),
            DatasetSpec::SpikeCsv { events, labels, .. } => {
                fix(events);
                fix(labels);
            }
            _ => {}
        }
    }

    fn check_files(&self) -> Result<()> {
        let paths: Vec<&PathBuf> = match &self.dataset {
            DatasetSpec::Iris { path: Some(p), .. } => vec![p],
            DatasetSpec::SpikeCsv { events, labels, .. } => vec![events, labels],
            _ => vec![],
        };
        for p in paths {
            if !p.is_file() {
                return Err(Error::Config(format!("dataset file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        match self.split {
            SplitSpec::Holdout { test_fraction } if !(test_fraction > 0.0 && test_fraction < 1.0) => {
                return Err(Error::Config("holdout test_fraction must lie in (0, 1)".into()));
            }
            SplitSpec::KFold { folds } if folds < 2 => {
                return Err(Error::Config("k-fold needs at least 2 folds".into()));
            }
            _ => {}
        }
        if let DatasetSpec::Morse {
            preset: None,
            vocabulary: None,
            ..
        } = self.dataset
        {
            return Err(Error::Config("morse dataset needs a preset or a vocabulary".into()));
        }
        // Dimension and rate checks need the dataset's channel count; probe
        // with a placeholder.
        self.network_config(1, 1, 0).map(|_| ())
    }

    /// Builds the network for a dataset with `n_inputs` channels and
    /// `n_classes` classes. Trace constants are chained from the next layer.
    pub fn network_config(&self, n_inputs: usize, n_classes: usize, seed: u64) -> Result<NetworkConfig> {
        let spec = &self.network;
        let out = &spec.output;
        let mut hidden = Vec::with_capacity(spec.hidden.len());
        let mut n_prev = n_inputs;
        for (i, h) in spec.hidden.iter().enumerate() {
            let tau_trace = spec.hidden.get(i + 1).map_or(out.tau, |n| n.tau);
            let mut p = LayerParams::new(h.n_neurons, n_prev, h.tau, tau_trace);
            let rates = [h.eta, h.eta_thresh, h.theta_open, h.theta_init, h.c];
            apply_rates(
                rates,
                [
                    &mut p.eta,
                    &mut p.eta_thresh,
                    &mut p.theta_open,
                    &mut p.theta_init,
                    &mut p.c,
                ],
            );
            p.phi = h.phi.unwrap_or(layer::DEFAULT_PHI);
            hidden.push(p);
            n_prev = h.n_neurons;
        }
        let mut o = OutputLayerConfig::new(n_classes, out.k, out.tau);
        let rates = [out.eta, out.eta_thresh, out.theta_open, out.theta_init, out.c];
        apply_rates(
            rates,
            [
                &mut o.eta,
                &mut o.eta_thresh,
                &mut o.theta_open,
                &mut o.theta_init,
                &mut o.c,
            ],
        );
        let cfg = NetworkConfig {
            n_inputs,
            hidden,
            output: o,
            seed,
        };
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }
}

fn apply_rates(values: [Option<f64>; 5], dst: [&mut f64; 5]) {
    for (v, d) in values.into_iter().zip(dst) {
        if let Some(v) = v {
            *d = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const IRIS: &str = r#"
version = 1
epochs = 400
seeds = [1, 2]

[dataset]
kind = "iris"

[split]
kind = "k-fold"
folds = 2

[[network.hidden]]
n_neurons = 10
tau = 0.6
eta = 0.05

[network.output]
tau = 0.9
"#;

    #[test]
    fn parses_and_chains_taus() {
        let cfg = ExperimentConfig::from_toml(IRIS).unwrap();
        assert_eq!(cfg.split, SplitSpec::KFold { folds: 2 });
        let net = cfg.network_config(20, 3, 9).unwrap();
        assert_eq!(net.hidden[0].tau_trace, 0.9);
        assert_eq!(net.hidden[0].eta, 0.05);
        assert_eq!(net.hidden[0].n_inputs, 20);
        assert_eq!(net.output.n_neurons(), 3);
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let typo = IRIS.replace("eta = 0.05", "etta = 0.05");
        assert!(matches!(ExperimentConfig::from_toml(&typo), Err(Error::Config(_))));
        let top = format!("{IRIS}\nbogus = 1\n");
        assert!(ExperimentConfig::from_toml(&top).is_err());
    }

    #[test]
    fn random_pattern_section() {
        let text = r#"
version = 1
epochs = 10
[dataset]
kind = "random-pattern"
stream_length = 50
[[network.hidden]]
n_neurons = 12
tau = 4.0
[network.output]
tau = 20.0
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        match &cfg.dataset {
            DatasetSpec::RandomPattern(t) => {
                assert_eq!(t.stream_length, 50);
                assert_eq!(t.n_channels, 8);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(ExperimentConfig::from_toml(&text.replace("stream_length", "stream_len")).is_err());
    }

    #[test]
    fn version_and_split_checked() {
        assert!(ExperimentConfig::from_toml(&IRIS.replace("version = 1", "version = 2")).is_err());
        assert!(ExperimentConfig::from_toml(&IRIS.replace("folds = 2", "folds = 1")).is_err());
        assert!(ExperimentConfig::from_toml(&IRIS.replace("tau = 0.6", "tau = -0.6")).is_err());
    }

    #[test]
    fn missing_files_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        let text = IRIS.replace("kind = \"iris\"", "kind = \"iris\"\npath = \"nope.csv\"");
        std::fs::write(&p, text).unwrap();
        assert!(matches!(ExperimentConfig::load(&p), Err(Error::Config(m)) if m.contains("nope.csv")));
    }
}

//! Training, evaluation and cross-validation runs.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{EventLog, ExperimentConfig, SplitSpec};
use super::dataset::{prepare, Dataset, EncoderState, Prepared};
use super::metrics::{CrossValidationReport, FoldResult, MetricsReport, Summary};
use super::parallel::{run_jobs, Execution};
use crate::error::{Error, Result};
use crate::network::{parse_versioned, EpochStats, Network, NetworkState, TrainRecord, CHECKPOINT_VERSION};

/// Everything needed to resume or evaluate a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub version: u32,
    pub seed: u64,
    pub fold: Option<usize>,
    pub epochs_completed: usize,
    pub train_accuracy: Vec<f64>,
    pub encoder: Option<EncoderState>,
    pub network: NetworkState,
}

impl Checkpoint {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ckpt: Self = parse_versioned(s)?;
        if ckpt.network.version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointVersion {
                found: ckpt.network.version,
                expected: CHECKPOINT_VERSION,
            });
        }
        Ok(ckpt)
    }

    /// Writes via a temporary file and rename, so an interrupted write never
    /// leaves a truncated checkpoint behind.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, self.to_json()?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub struct TrainOutcome {
    pub network: Network,
    pub checkpoint: Checkpoint,
    pub metrics: MetricsReport,
    pub log: Vec<TrainRecord>,
}

/// Example order for one epoch: fixed for streams, shuffled from
/// `(seed, epoch)` for segmented datasets.
pub fn epoch_order(data: &Dataset, seed: u64, epoch: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..data.segments.len()).collect();
    if data.segmented {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (epoch as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        order.shuffle(&mut rng);
    }
    order
}

/// Frozen pass over `data`.
pub fn evaluate(net: &mut Network, data: &Dataset, log: Option<&mut Vec<TrainRecord>>) -> Result<EpochStats> {
    net.run_epoch(&data.segments, data.segmented, false, log)
}

/// Trains for `epochs` total epochs, continuing from `resume` if given.
/// `on_epoch` sees the checkpoint after every completed epoch.
pub fn train(
    cfg: &ExperimentConfig,
    prepared: &Prepared,
    seed: u64,
    epochs: usize,
    resume: Option<Checkpoint>,
    mut on_epoch: impl FnMut(&Checkpoint) -> Result<()>,
) -> Result<TrainOutcome> {
    let data = &prepared.train;
    let net_cfg = cfg.network_config(data.n_inputs, data.n_classes, seed)?;
    let (mut net, mut train_accuracy, start) = match resume {
        Some(ckpt) => {
            if ckpt.network.config != net_cfg || ckpt.seed != seed || ckpt.fold != prepared.fold {
                return Err(Error::Config(
                    "checkpoint does not match this config, seed and split".into(),
                ));
            }
            let done = ckpt.epochs_completed;
            (Network::from_state(ckpt.network)?, ckpt.train_accuracy, done)
        }
        None => (Network::new(net_cfg)?, Vec::new(), 0),
    };

    let mut log = Vec::new();
    let mut last_stats = None;
    for epoch in start..epochs {
        let record = match cfg.log.event_log {
            EventLog::None => false,
            EventLog::Last => epoch + 1 == epochs,
            EventLog::All => true,
        };
        let order = epoch_order(data, seed, epoch);
        let stats = net.run_epoch(
            order.iter().map(|&i| &data.segments[i]),
            data.segmented,
            true,
            record.then_some(&mut log),
        )?;
        train_accuracy.push(stats.accuracy());
        let ckpt = Checkpoint {
            version: CHECKPOINT_VERSION,
            seed,
            fold: prepared.fold,
            epochs_completed: epoch + 1,
            train_accuracy: train_accuracy.clone(),
            encoder: prepared.encoder.clone(),
            network: net.snapshot(),
        };
        on_epoch(&ckpt)?;
        last_stats = Some(stats);
    }

    let test = match &prepared.test {
        Some(t) => Some(Summary::from(&evaluate(&mut net.clone(), t, None)?)),
        None => None,
    };
    let checkpoint = Checkpoint {
        version: CHECKPOINT_VERSION,
        seed,
        fold: prepared.fold,
        epochs_completed: epochs.max(start),
        train_accuracy: train_accuracy.clone(),
        encoder: prepared.encoder.clone(),
        network: net.snapshot(),
    };
    let metrics = MetricsReport {
        seed,
        fold: prepared.fold,
        train_accuracy,
        final_train: last_stats.as_ref().map(Summary::from),
        test,
    };
    Ok(TrainOutcome {
        network: net,
        checkpoint,
        metrics,
        log,
    })
}

/// Trains every (seed, fold) pair of the config's split independently and
/// aggregates test accuracy. A holdout split counts as a single fold.
pub fn cross_validate(cfg: &ExperimentConfig, epochs: usize, exec: Execution) -> Result<CrossValidationReport> {
    let folds = match cfg.split {
        SplitSpec::KFold { folds } => folds,
        SplitSpec::Holdout { .. } => 1,
        SplitSpec::None => return Err(Error::Config("cross-validation needs a holdout or k-fold split".into())),
    };
    let mut jobs = Vec::new();
    for &seed in &cfg.seeds {
        for p in prepare(&cfg.dataset, cfg.split, seed)? {
            jobs.push((seed, p));
        }
    }
    let quiet = {
        let mut c = cfg.clone();
        c.log.event_log = EventLog::None;
        c
    };
    let results = run_jobs(exec, jobs, |(seed, p)| -> Result<FoldResult> {
        let out = train(&quiet, &p, seed, epochs, None, |_| Ok(()))?;
        Ok(FoldResult {
            seed,
            fold: p.fold,
            test_accuracy: out.metrics.test.as_ref().map_or(0.0, |s| s.accuracy),
            final_train_accuracy: out.metrics.train_accuracy.last().copied().unwrap_or(0.0),
        })
    });
    Ok(CrossValidationReport::aggregate(
        folds,
        results.into_iter().collect::<Result<Vec<_>>>()?,
    ))
}

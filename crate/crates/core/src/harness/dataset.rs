//! Turning a dataset spec into train/test segment lists.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{DatasetSpec, SplitSpec};
use crate::encoders::{
    build_morse_task, build_random_pattern_task, load_events, load_labels, GrfEncoder, GrfEncoderConfig,
    MorseTaskConfig, TabularDataset,
};
use crate::error::{Error, Result};
use crate::network::Segment;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub segments: Vec<Segment>,
    /// Independent examples: state is reset between segments and their order
    /// is shuffled each epoch.
    pub segmented: bool,
    pub n_inputs: usize,
    pub n_classes: usize,
}

impl Dataset {
    pub fn n_labels(&self) -> usize {
        self.segments.iter().map(|s| s.labels.len()).sum()
    }

    pub fn n_events(&self) -> usize {
        self.segments.iter().map(|s| s.events.len()).sum()
    }
}

/// Receptive-field encoder fitted on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderState {
    pub grf: GrfEncoderConfig,
    pub ranges: Vec<(f64, f64)>,
}

impl EncoderState {
    pub fn encoder(&self) -> Result<GrfEncoder> {
        GrfEncoder::new(self.grf.clone(), self.ranges.clone())
    }

    pub fn encode_table(&self, table: &TabularDataset) -> Result<Dataset> {
        let enc = self.encoder()?;
        let segments = table
            .features
            .iter()
            .zip(&table.labels)
            .map(|(x, &y)| enc.encode_labeled(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            segments,
            segmented: true,
            n_inputs: enc.n_channels(),
            n_classes: table.n_classes(),
        })
    }
}

/// One train/test split of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub fold: Option<usize>,
    pub train: Dataset,
    pub test: Option<Dataset>,
    pub encoder: Option<EncoderState>,
}

enum Source {
    Stream(Dataset),
    Table(TabularDataset, GrfEncoderConfig),
}

fn load_source(spec: &DatasetSpec) -> Result<Source> {
    let stream = |events, labels, n_inputs, n_classes| {
        Source::Stream(Dataset {
            segments: vec![Segment::new(events, labels)],
            segmented: false,
            n_inputs,
            n_classes,
        })
    };
    Ok(match spec {
        DatasetSpec::RandomPattern(task) => {
            let t = build_random_pattern_task(task)?;
            stream(t.events, t.labels, task.n_channels, task.targets.len())
        }
        DatasetSpec::Morse {
            preset,
            vocabulary,
            timing,
            item_gap,
            repetitions,
        } => {
            let vocab = match (vocabulary, preset) {
                (Some(v), _) => v.clone(),
                (None, Some(p)) => p.vocabulary(),
                (None, None) => return Err(Error::Config("morse dataset needs a preset or a vocabulary".into())),
            };
            let mut cfg = MorseTaskConfig::new(vocab);
            cfg.timing = timing.clone();
            cfg.repetitions = *repetitions;
            if let Some(g) = item_gap {
                cfg.item_gap = *g;
            }
            let n_classes = cfg.vocabulary.len();
            let (events, labels) = build_morse_task(&cfg)?;
            stream(events, labels, 2, n_classes)
        }
        DatasetSpec::Iris { path, grf } => {
            let table = match path {
                Some(p) => TabularDataset::load(p)?,
                None => TabularDataset::iris(),
            };
            Source::Table(table, grf.clone())
        }
        DatasetSpec::SpikeCsv {
            events,
            labels,
            n_channels,
            n_classes,
        } => stream(
            load_events(events, Some(*n_channels))?,
            load_labels(labels, Some(*n_classes))?,
            *n_channels,
            *n_classes,
        ),
    })
}

/// Stratified fold assignment: each class is shuffled with `seed` and dealt
/// round-robin, continuing the deal across classes so fold sizes stay within
/// one of each other.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); folds];
    let mut deal = 0;
    for c in 0..n_classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            out[deal % folds].push(i);
            deal += 1;
        }
    }
    out.iter_mut().for_each(|f| f.sort_unstable());
    out
}

/// Stratified holdout: `round(n_c * test_fraction)` samples of each class go
/// to the test side. Returns `(train, test)`.
pub fn stratified_holdout(labels: &[usize], test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for c in 0..n_classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        idx.shuffle(&mut rng);
        let n_test = (idx.len() as f64 * test_fraction).round() as usize;
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn encode_split(
    table: &TabularDataset,
    grf: &GrfEncoderConfig,
    train: &[usize],
    test: Option<&[usize]>,
) -> Result<Prepared> {
    let train_tab = table.subset(train);
    let enc = GrfEncoder::fit(grf.clone(), &train_tab.features)?;
    let state = EncoderState {
        grf: grf.clone(),
        ranges: enc.ranges().to_vec(),
    };
    Ok(Prepared {
        fold: None,
        train: state.encode_table(&train_tab)?,
        test: test.map(|t| state.encode_table(&table.subset(t))).transpose()?,
        encoder: Some(state),
    })
}

/// Materializes every split `split` asks for (one per fold for k-fold).
pub fn prepare(spec: &DatasetSpec, split: SplitSpec, seed: u64) -> Result<Vec<Prepared>> {
    match (load_source(spec)?, split) {
        (Source::Stream(ds), SplitSpec::None) => Ok(vec![Prepared {
            fold: None,
            train: ds,
            test: None,
            encoder: None,
        }]),
        (Source::Stream(_), _) => Err(Error::Config(
            "stream datasets cannot be split; use split kind \"none\"".into(),
        )),
        (Source::Table(table, grf), SplitSpec::None) => {
            let all: Vec<usize> = (0..table.len()).collect();
            Ok(vec![encode_split(&table, &grf, &all, None)?])
        }
        (Source::Table(table, grf), SplitSpec::Holdout { test_fraction }) => {
            let (train, test) = stratified_holdout(&table.labels, test_fraction, seed);
            Ok(vec![encode_split(&table, &grf, &train, Some(&test))?])
        }
        (Source::Table(table, grf), SplitSpec::KFold { folds }) => {
            let parts = stratified_folds(&table.labels, folds, seed);
            (0..folds)
                .map(|k| {
                    let train: Vec<usize> = parts
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .flat_map(|(_, p)| p.iter().copied())
                        .collect();
                    let mut train = train;
                    train.sort_unstable();
                    let mut p = encode_split(&table, &grf, &train, Some(&parts[k]))?;
                    p.fold = Some(k);
                    Ok(p)
                })
                .collect()
        }
    }
}

/// Loads a bare table for evaluation with a stored encoder.
pub fn load_table(spec: &DatasetSpec) -> Result<Option<TabularDataset>> {
    match load_source(spec)? {
        Source::Table(t, _) => Ok(Some(t)),
        Source::Stream(_) => Ok(None),
    }
}

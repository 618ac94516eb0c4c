use serde::{Deserialize, Serialize};

use crate::network::EpochStats;

/// Label-coincident scoring of one pass over a dataset.
///
/// At every label event the output either spiked in the label's class group
/// (hit), spiked in another group (wrong) or stayed silent (miss). Output
/// spikes at unlabeled events are counted separately as false positives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub accuracy: f64,
    pub n_events: usize,
    pub n_labels: usize,
    pub hits: usize,
    pub misses: usize,
    pub wrong: usize,
    pub per_class_accuracy: Vec<f64>,
    pub false_positives: usize,
    pub false_positive_rate: f64,
    /// Mean spikes per input event, per layer (output last). At most 1.
    pub spikes_per_event: Vec<f64>,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl From<&EpochStats> for Summary {
    fn from(s: &EpochStats) -> Self {
        Self {
            accuracy: s.accuracy(),
            n_events: s.n_events,
            n_labels: s.n_labels,
            hits: s.hits,
            misses: s.misses,
            wrong: s.wrong,
            per_class_accuracy: s
                .per_class_hits
                .iter()
                .zip(&s.per_class_labels)
                .map(|(&h, &n)| ratio(h, n))
                .collect(),
            false_positives: s.false_positives,
            false_positive_rate: ratio(s.false_positives, s.unlabeled_events()),
            spikes_per_event: s.spikes_per_layer.iter().map(|&n| ratio(n, s.n_events)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub seed: u64,
    pub fold: Option<usize>,
    /// Training accuracy of every epoch, measured while learning.
    pub train_accuracy: Vec<f64>,
    /// Last training epoch.
    pub final_train: Option<Summary>,
    /// Frozen evaluation on the held-out split, if there is one.
    pub test: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub seed: u64,
    pub fold: Option<usize>,
    pub test_accuracy: f64,
    pub final_train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationReport {
    pub folds: usize,
    pub runs: Vec<FoldResult>,
    /// Mean and sample standard deviation of test accuracy over all runs.
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    /// Mean test accuracy over the folds of each seed, in seed order.
    pub per_seed: Vec<(u64, f64)>,
    pub median_seed_accuracy: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

impl CrossValidationReport {
    pub fn aggregate(folds: usize, runs: Vec<FoldResult>) -> Self {
        let acc: Vec<f64> = runs.iter().map(|r| r.test_accuracy).collect();
        let mut seeds: Vec<u64> = Vec::new();
        for r in &runs {
            if !seeds.contains(&r.seed) {
                seeds.push(r.seed);
            }
        }
        let per_seed: Vec<(u64, f64)> = seeds
            .iter()
            .map(|&s| {
                let xs: Vec<f64> = runs.iter().filter(|r| r.seed == s).map(|r| r.test_accuracy).collect();
                (s, mean(&xs))
            })
            .collect();
        let seed_acc: Vec<f64> = per_seed.iter().map(|p| p.1).collect();
        Self {
            folds,
            mean_accuracy: mean(&acc),
            std_accuracy: std_dev(&acc),
            median_seed_accuracy: median(&seed_acc),
            per_seed,
            runs,
        }
    }
}

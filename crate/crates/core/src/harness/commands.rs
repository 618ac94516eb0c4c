//! The operations behind the command-line tool, with their file outputs.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::config::{DatasetSpec, ExperimentConfig};
use super::dataset::{prepare, Dataset};
use super::metrics::{CrossValidationReport, MetricsReport, Summary};
use super::parallel::Execution;
use super::run::{cross_validate, evaluate, train, Checkpoint};
use crate::encoders::spike_csv::format_time;
use crate::encoders::{
    build_morse_task, build_random_pattern_task, load_events, load_labels, quantize_time, save_events, save_labels,
    GrfEncoder, GrfEncoderConfig, MorseTask, MorseTaskConfig, RandomPatternTaskConfig, TabularDataset,
};
use crate::error::{Error, Result};
use crate::event::{Event, LabeledEvent};
use crate::network::{Network, Segment, TrainRecord};

pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const EVENTS_FILE: &str = "events.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const SPIKES_FILE: &str = "spikes.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const EVENT_LOG_HEADER: &str = "time,layer,winner,local,global,label,prediction";

/// Writes `value` as pretty JSON with a trailing newline, atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_string_pretty(value)? + "\n")?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// One row per event and layer; absent values are empty fields.
pub fn write_event_log(path: &Path, rows: &[TrainRecord]) -> Result<()> {
    let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{EVENT_LOG_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            format_time(r.time),
            r.layer,
            opt(r.winner),
            r.local as u8,
            r.global as u8,
            opt(r.label),
            opt(r.prediction)
        )?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerateTask {
    RandomPattern,
    MorseNames,
    MorseDigits,
    MorseSonnet,
    IrisEncode,
}

impl GenerateTask {
    pub const ALL: [GenerateTask; 5] = [
        GenerateTask::RandomPattern,
        GenerateTask::MorseNames,
        GenerateTask::MorseDigits,
        GenerateTask::MorseSonnet,
        GenerateTask::IrisEncode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenerateTask::RandomPattern => "random-pattern",
            GenerateTask::MorseNames => "morse-names",
            GenerateTask::MorseDigits => "morse-digits",
            GenerateTask::MorseSonnet => "morse-sonnet",
            GenerateTask::IrisEncode => "iris-encode",
        }
    }
}

impl fmt::Display for GenerateTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenerateTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|t| t.name()).collect();
            Error::Config(format!("unknown task {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerateSummary {
    pub task: String,
    pub n_events: usize,
    pub n_labels: usize,
    pub n_channels: usize,
    pub n_classes: usize,
}

/// Writes `spikes.csv` and `labels.csv` for `task` into `out`. Task settings
/// come from `cfg` when its dataset matches the task; `seed` drives the random
/// pattern generator.
pub fn generate(task: GenerateTask, cfg: Option<&ExperimentConfig>, seed: u64, out: &Path) -> Result<GenerateSummary> {
    let dataset = cfg.map(|c| &c.dataset);
    let (events, labels, n_channels, n_classes) = match task {
        GenerateTask::RandomPattern => {
            let mut rp = match dataset {
                Some(DatasetSpec::RandomPattern(rp)) => rp.clone(),
                _ => RandomPatternTaskConfig::default(),
            };
            rp.seed = seed;
            let t = build_random_pattern_task(&rp)?;
            (t.events, t.labels, rp.n_channels, rp.targets.len())
        }
        GenerateTask::MorseNames | GenerateTask::MorseDigits | GenerateTask::MorseSonnet => {
            let preset = match task {
                GenerateTask::MorseNames => MorseTask::Names,
                GenerateTask::MorseDigits => MorseTask::Digits,
                _ => MorseTask::Sonnet,
            };
            let mut mc = MorseTaskConfig::preset(preset);
            if let Some(DatasetSpec::Morse {
                timing,
                item_gap,
                repetitions,
                ..
            }) = dataset
            {
                mc.timing = timing.clone();
                mc.repetitions = *repetitions;
                if let Some(g) = item_gap {
                    mc.item_gap = *g;
                }
            }
            let n_classes = mc.vocabulary.len();
            let (ev, lb) = build_morse_task(&mc)?;
            (ev, lb, 2, n_classes)
        }
        GenerateTask::IrisEncode => {
            let (table, grf) = match dataset {
                Some(DatasetSpec::Iris { path: Some(p), grf }) => (TabularDataset::load(p)?, grf.clone()),
                Some(DatasetSpec::Iris { path: None, grf }) => (TabularDataset::iris(), grf.clone()),
                _ => (TabularDataset::iris(), GrfEncoderConfig::default()),
            };
            let (ev, lb, n_channels) = encode_table_stream(&table, grf)?;
            (ev, lb, n_channels, table.n_classes())
        }
    };
    std::fs::create_dir_all(out)?;
    save_events(out.join(SPIKES_FILE), &events)?;
    save_labels(out.join(LABELS_FILE), &labels)?;
    Ok(GenerateSummary {
        task: task.name().into(),
        n_events: events.len(),
        n_labels: labels.len(),
        n_channels,
        n_classes,
    })
}

/// Encodes every row of `table` (ranges fitted on the whole table) and lays
/// the examples end to end, one encoding window of silence apart.
fn encode_table_stream(
    table: &TabularDataset,
    grf: GrfEncoderConfig,
) -> Result<(Vec<Event>, Vec<LabeledEvent>, usize)> {
    let enc = GrfEncoder::fit(grf, &table.features)?;
    let stride = 2.0 * enc.config().window;
    let mut events = Vec::new();
    let mut labels = Vec::new();
    for (i, (x, &y)) in table.features.iter().zip(&table.labels).enumerate() {
        let seg = enc.encode_labeled(x, y)?;
        let offset = i as f64 * stride;
        events.extend(
            seg.events
                .iter()
                .map(|e| Event::new(e.channel, quantize_time(e.time + offset))),
        );
        labels.extend(
            seg.labels
                .iter()
                .map(|l| LabeledEvent::new(l.class_id, quantize_time(l.time + offset))),
        );
    }
    Ok((events, labels, enc.n_channels()))
}

/// Trains the first split of `cfg` with `seed`, writing `checkpoint.json`
/// after every epoch and `metrics.json` and `events.csv` at the end. With
/// `resume`, an existing checkpoint in `out` is continued.
pub fn train_command(
    cfg: &ExperimentConfig,
    seed: u64,
    epochs: usize,
    out: &Path,
    resume: bool,
) -> Result<MetricsReport> {
    std::fs::create_dir_all(out)?;
    let prepared = prepare(&cfg.dataset, cfg.split, seed)?
        .into_iter()
        .next()
        .expect("at least one split");
    let ckpt_path = out.join(CHECKPOINT_FILE);
    let start = if resume && ckpt_path.is_file() {
        Some(Checkpoint::load(&ckpt_path)?)
    } else {
        None
    };
    if let Some(c) = &start {
        if c.epochs_completed > epochs {
            return Err(Error::Config(format!(
                "checkpoint already has {} epochs, more than the {epochs} requested",
                c.epochs_completed
            )));
        }
    }
    let outcome = train(cfg, &prepared, seed, epochs, start, |c| c.save(&ckpt_path))?;
    outcome.checkpoint.save(&ckpt_path)?;
    write_event_log(&out.join(EVENTS_FILE), &outcome.log)?;
    write_json(&out.join(METRICS_FILE), &outcome.metrics)?;
    Ok(outcome.metrics)
}

/// Where evaluation data comes from.
#[derive(Debug, Clone)]
pub enum EvalData {
    /// The held-out side of the checkpoint's split (the training side if the
    /// split has no test set).
    Config(ExperimentConfig),
    /// A directory with `spikes.csv` and `labels.csv`, or a numeric table
    /// encoded with the checkpoint's stored encoder.
    Path(PathBuf),
}

fn load_eval_data(ckpt: &Checkpoint, data: &EvalData) -> Result<Dataset> {
    let n_inputs = ckpt.network.config.n_inputs;
    let n_classes = ckpt.network.config.output.n_classes;
    match data {
        EvalData::Config(cfg) => {
            let fold = ckpt.fold.unwrap_or(0);
            let p = prepare(&cfg.dataset, cfg.split, ckpt.seed)?
                .into_iter()
                .nth(fold)
                .ok_or_else(|| Error::Config(format!("config has no fold {fold}")))?;
            Ok(p.test.unwrap_or(p.train))
        }
        EvalData::Path(path) if path.is_dir() => Ok(Dataset {
            segments: vec![Segment::new(
                load_events(path.join(SPIKES_FILE), Some(n_inputs))?,
                load_labels(path.join(LABELS_FILE), Some(n_classes))?,
            )],
            segmented: false,
            n_inputs,
            n_classes,
        }),
        EvalData::Path(path) if path.is_file() => {
            let enc = ckpt
                .encoder
                .as_ref()
                .ok_or_else(|| Error::Config("checkpoint has no stored encoder for tabular data".into()))?;
            enc.encode_table(&TabularDataset::load(path)?)
        }
        EvalData::Path(path) => Err(Error::Config(format!(
            "evaluation data {} does not exist",
            path.display()
        ))),
    }
}

/// Frozen evaluation of a checkpoint. Writes `metrics.json` and an
/// `events.csv` of the evaluation pass into `out`.
pub fn eval_command(checkpoint: &Path, data: &EvalData, out: &Path) -> Result<MetricsReport> {
    let ckpt = Checkpoint::load(checkpoint)?;
    let dataset = load_eval_data(&ckpt, data)?;
    if dataset.n_inputs != ckpt.network.config.n_inputs {
        return Err(Error::Config(format!(
            "data has {} channels, checkpoint expects {}",
            dataset.n_inputs, ckpt.network.config.n_inputs
        )));
    }
    let mut net = Network::from_state(ckpt.network.clone())?;
    let mut log = Vec::new();
    let stats = evaluate(&mut net, &dataset, Some(&mut log))?;
    let report = MetricsReport {
        seed: ckpt.seed,
        fold: ckpt.fold,
        train_accuracy: ckpt.train_accuracy.clone(),
        final_train: None,
        test: Some(Summary::from(&stats)),
    };
    std::fs::create_dir_all(out)?;
    write_event_log(&out.join(EVENTS_FILE), &log)?;
    write_json(&out.join(METRICS_FILE), &report)?;
    Ok(report)
}

/// Cross-validates over every configured seed and writes `metrics.json`.
pub fn cross_validate_command(
    cfg: &ExperimentConfig,
    epochs: usize,
    out: &Path,
    exec: Execution,
) -> Result<CrossValidationReport> {
    let report = cross_validate(cfg, epochs, exec)?;
    std::fs::create_dir_all(out)?;
    write_json(&out.join(METRICS_FILE), &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_parse() {
        for t in GenerateTask::ALL {
            assert_eq!(t.name().parse::<GenerateTask>().unwrap(), t);
        }
        assert!("morse".parse::<GenerateTask>().is_err());
    }

    #[test]
    fn event_log_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        let rows = vec![
            TrainRecord {
                time: 1.5,
                layer: 0,
                winner: Some(3),
                local: true,
                global: false,
                label: None,
                prediction: None,
            },
            TrainRecord {
                time: 2.0,
                layer: 1,
                winner: None,
                local: false,
                global: true,
                label: Some(1),
                prediction: Some(0),
            },
        ];
        write_event_log(&p, &rows).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, format!("{EVENT_LOG_HEADER}\n1.5,0,3,1,0,,\n2.0,1,,0,1,1,0\n"));
    }

    #[test]
    fn generated_iris_stream_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let s = generate(GenerateTask::IrisEncode, None, 0, dir.path()).unwrap();
        assert_eq!((s.n_events, s.n_labels, s.n_channels, s.n_classes), (3000, 150, 20, 3));
        let ev = load_events(dir.path().join(SPIKES_FILE), Some(20)).unwrap();
        assert_eq!(ev.len(), 3000);
    }
}

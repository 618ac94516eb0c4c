use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use odesa::harness::{self, EvalData, Execution, ExperimentConfig, GenerateTask};

#[derive(Parser)]
#[command(
    name = "odesa",
    version,
    about = "Train and evaluate event-driven supervised spiking networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a spike dataset (spikes.csv, labels.csv) for a built-in task.
    Generate {
        /// random-pattern, morse-names, morse-digits, morse-sonnet or iris-encode.
        task: String,
        #[command(flatten)]
        common: Common,
    },
    /// Train on the config's dataset (first split).
    Train {
        #[command(flatten)]
        common: Common,
        /// Continue from checkpoint.json in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Evaluate a checkpoint with learning frozen.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Checkpoint file; defaults to checkpoint.json in --out.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Stratified cross-validation over every configured seed.
    CrossValidate {
        #[command(flatten)]
        common: Common,
        /// Run folds one at a time.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's first seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config's epoch count.
    #[arg(long)]
    epochs: Option<usize>,
    /// Evaluation data: a directory with spikes.csv and labels.csv, or a
    /// numeric table.
    #[arg(long)]
    data: Option<PathBuf>,
}

impl Common {
    fn load_config(&self) -> Result<Option<ExperimentConfig>> {
        self.config
            .as_ref()
            .map(|p| ExperimentConfig::load(p).with_context(|| format!("loading config {}", p.display())))
            .transpose()
    }

    fn require_config(&self) -> Result<ExperimentConfig> {
        match self.load_config()? {
            Some(cfg) => Ok(cfg),
            None => bail!("--config is required"),
        }
    }

    fn seed(&self, cfg: Option<&ExperimentConfig>) -> u64 {
        self.seed.or_else(|| cfg.map(|c| c.seeds[0])).unwrap_or(0)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { task, common } => {
            let task: GenerateTask = task.parse()?;
            let cfg = common.load_config()?;
            let seed = common.seed(cfg.as_ref());
            let s = harness::generate(task, cfg.as_ref(), seed, &common.out)?;
            println!(
                "{}: {} events, {} labels written to {}",
                s.task,
                s.n_events,
                s.n_labels,
                common.out.display()
            );
        }
        Command::Train { common, resume } => {
            let cfg = common.require_config()?;
            let seed = common.seed(Some(&cfg));
            let epochs = common.epochs.unwrap_or(cfg.epochs);
            let m = harness::train_command(&cfg, seed, epochs, &common.out, resume)?;
            if let Some(acc) = m.train_accuracy.last() {
                println!("train accuracy {acc:.4}");
            }
            if let Some(t) = &m.test {
                println!("test accuracy {:.4}", t.accuracy);
            }
        }
        Command::Eval { common, checkpoint } => {
            let ckpt = checkpoint.unwrap_or_else(|| common.out.join(harness::commands::CHECKPOINT_FILE));
            if !ckpt.is_file() {
                bail!("checkpoint {} not found", ckpt.display());
            }
            let data = match (&common.data, common.load_config()?) {
                (Some(p), _) => EvalData::Path(p.clone()),
                (None, Some(cfg)) => EvalData::Config(cfg),
                (None, None) => bail!("eval needs --data or --config"),
            };
            let m = harness::eval_command(&ckpt, &data, &common.out)?;
            if let Some(t) = &m.test {
                println!("accuracy {:.4} ({} of {} labels)", t.accuracy, t.hits, t.n_labels);
            }
        }
        Command::CrossValidate { common, sequential } => {
            let mut cfg = common.require_config()?;
            if let Some(s) = common.seed {
                cfg.seeds = vec![s];
            }
            let epochs = common.epochs.unwrap_or(cfg.epochs);
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let r = harness::cross_validate_command(&cfg, epochs, &common.out, exec)?;
            println!(
                "{} runs: mean accuracy {:.4} (sd {:.4}), median over seeds {:.4}",
                r.runs.len(),
                r.mean_accuracy,
                r.std_accuracy,
                r.median_seed_accuracy
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

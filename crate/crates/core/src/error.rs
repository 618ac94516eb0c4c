use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("out-of-order event on channel {channel}: t={time} precedes last spike at t={last}")]
    OutOfOrderEvent { channel: usize, time: f64, last: f64 },

    #[error("out-of-order read at t={time}: surface already holds a spike at t={latest}")]
    OutOfOrderRead { time: f64, latest: f64 },

    #[error("time surface is all zero; no context can be formed")]
    NoContext,

    #[error("channel {channel} out of range for {n_channels} channels")]
    ChannelOutOfRange { channel: usize, n_channels: usize },

    #[error("label (class {class_id}) at t={time} has no coinciding input event")]
    OrphanLabel { class_id: usize, time: f64 },

    #[error("class {class_id} out of range for {n_classes} classes")]
    ClassOutOfRange { class_id: usize, n_classes: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("feature {feature} has a degenerate range [{min}, {max}]")]
    DegenerateRange { feature: usize, min: f64, max: f64 },

    #[error("cannot encode {0:?} in International Morse")]
    Unencodable(char),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("{path}:{line}: time {time} precedes previous row at {prev}")]
    UnsortedFile {
        path: PathBuf,
        line: u64,
        time: f64,
        prev: f64,
    },

    #[error("{path}:{line}: channel {channel} out of range for {n_channels} channels")]
    FileChannelOutOfRange {
        path: PathBuf,
        line: u64,
        channel: usize,
        n_channels: usize,
    },

    #[error("checkpoint version {found} is not supported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

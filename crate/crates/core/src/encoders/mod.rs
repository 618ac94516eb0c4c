//! Dataset construction: spike encoders, task generators and file formats.

pub mod grf;
pub mod morse;
pub mod random_pattern;
pub mod spike_csv;
pub mod tabular;

pub use grf::{GrfEncoder, GrfEncoderConfig};
pub use morse::{build_morse_task, morse_encode, MorseTask, MorseTaskConfig, MorseTiming};
pub use random_pattern::{build_random_pattern_task, RandomPatternTask, RandomPatternTaskConfig};
pub use spike_csv::{load_events, load_labels, save_events, save_labels};
pub use tabular::TabularDataset;

/// Rounds a time to the nanounit grid the spike CSV format stores exactly.
pub fn quantize_time(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}

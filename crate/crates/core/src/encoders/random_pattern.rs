//! Random spatio-temporal pattern association task.
//!
//! A few fixed random symbols (each a handful of spikes spread over the input
//! channels inside a fixed window) are concatenated into a random stream with
//! no gaps. Every occurrence of a target symbol sequence gets a class label on
//! the last spike of its final symbol.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::quantize_time;
use crate::error::{Error, Result};
use crate::event::{Event, LabeledEvent};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomPatternTaskConfig {
    pub n_channels: usize,
    pub n_symbols: usize,
    pub min_spikes: usize,
    pub max_spikes: usize,
    /// Duration of one symbol.
    pub symbol_window: f64,
    /// Target sequences over the alphabet `A, B, C, ...`; class `i` is
    /// `targets[i]`.
    pub targets: Vec<String>,
    /// Number of symbols in the stream.
    pub stream_length: usize,
    pub seed: u64,
}

impl Default for RandomPatternTaskConfig {
    fn default() -> Self {
        Self {
            n_channels: 8,
            n_symbols: 3,
            min_spikes: 6,
            max_spikes: 8,
            symbol_window: 10.0,
            targets: ["BBA", "ACB", "CAC", "CCC"].map(String::from).to_vec(),
            stream_length: 300,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomPatternTask {
    /// Per-symbol spikes as `(channel, offset)` within the symbol window.
    pub symbols: Vec<Vec<Event>>,
    /// The symbol stream, as symbol indices.
    pub sequence: Vec<usize>,
    pub events: Vec<Event>,
    pub labels: Vec<LabeledEvent>,
}

fn parse_target(t: &str, n_symbols: usize) -> Result<Vec<usize>> {
    if t.is_empty() {
        return Err(Error::InvalidParam("empty target sequence".into()));
    }
    t.chars()
        .map(|c| {
            let idx = (c as u32).wrapping_sub('A' as u32) as usize;
            if c.is_ascii_uppercase() && idx < n_symbols {
                Ok(idx)
            } else {
                Err(Error::InvalidParam(format!(
                    "target {t:?} uses symbol {c:?} outside the alphabet"
                )))
            }
        })
        .collect()
}

/// Generates the symbols and stream from `cfg.seed`. If several targets end at
/// the same symbol, the first one listed labels it.
pub fn build_random_pattern_task(cfg: &RandomPatternTaskConfig) -> Result<RandomPatternTask> {
    if cfg.n_channels == 0 || cfg.n_symbols == 0 || cfg.n_symbols > 26 {
        return Err(Error::InvalidParam(
            "need 1..=26 symbols over at least one channel".into(),
        ));
    }
    if cfg.min_spikes == 0 || cfg.min_spikes > cfg.max_spikes {
        return Err(Error::InvalidParam(
            "spike count range must be non-empty and positive".into(),
        ));
    }
    if !(cfg.symbol_window > 0.0) {
        return Err(Error::InvalidParam("symbol_window must be positive".into()));
    }
    let targets = cfg
        .targets
        .iter()
        .map(|t| parse_target(t, cfg.n_symbols))
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // Offsets sit on a 1e-3 grid inside [0, window); duplicates are redrawn.
    let grid = (cfg.symbol_window * 1000.0).floor().max(1.0) as u64;
    let symbols: Vec<Vec<Event>> = (0..cfg.n_symbols)
        .map(|_| {
            let count = rng.gen_range(cfg.min_spikes..=cfg.max_spikes);
            let mut spikes: Vec<Event> = Vec::with_capacity(count);
            while spikes.len() < count {
                let e = Event::new(rng.gen_range(0..cfg.n_channels), rng.gen_range(0..grid) as f64 / 1000.0);
                if !spikes.contains(&e) {
                    spikes.push(e);
                }
            }
            spikes.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.channel.cmp(&b.channel)));
            spikes
        })
        .collect();

    let alphabet: Vec<usize> = (0..cfg.n_symbols).collect();
    let sequence: Vec<usize> = (0..cfg.stream_length)
        .map(|_| *alphabet.choose(&mut rng).unwrap())
        .collect();

    let mut events = Vec::new();
    let mut labels = Vec::new();
    for (pos, &sym) in sequence.iter().enumerate() {
        let base = pos as f64 * cfg.symbol_window;
        events.extend(
            symbols[sym]
                .iter()
                .map(|s| Event::new(s.channel, quantize_time(base + s.time))),
        );
        let ends_here = targets
            .iter()
            .position(|t| pos + 1 >= t.len() && sequence[pos + 1 - t.len()..=pos] == t[..]);
        if let Some(class_id) = ends_here {
            labels.push(LabeledEvent::new(class_id, events.last().unwrap().time));
        }
    }
    Ok(RandomPatternTask {
        symbols,
        sequence,
        events,
        labels,
    })
}

//! International Morse code as two-channel spike streams.
//!
//! Channel 0 carries dots and channel 1 dashes; every element is a single
//! spike at its onset. Onsets inside a letter are `intra` units apart, letters
//! `letter_gap` units, words `word_gap` units.

use serde::{Deserialize, Serialize};

use super::quantize_time;
use crate::error::{Error, Result};
use crate::event::{Event, LabeledEvent};

pub const DOT: usize = 0;
pub const DASH: usize = 1;

pub const NAMES: [&str; 5] = ["ANDRE", "GREG", "SAEED", "YESH", "YING"];
pub const DIGIT_SEQUENCES: [&str; 2] = ["00100", "00010"];
pub const SONNET_LINES: [&str; 4] = [
    "shall I compare thee to a summers day",
    "thou art more lovely and more temperate",
    "rough winds do shake the darling buds of may",
    "and summer\u{2019}s lease hath all too short a date",
];

/// Dot/dash pattern of an alphanumeric character.
pub fn code(c: char) -> Option<&'static str> {
    Some(match c.to_ascii_uppercase() {
        'A' => ".-",
        'B' => "-...",
        'C' => "-.-.",
        'D' => "-..",
        'E' => ".",
        'F' => "..-.",
        'G' => "--.",
        'H' => "....",
        'I' => "..",
        'J' => ".---",
        'K' => "-.-",
        'L' => ".-..",
        'M' => "--",
        'N' => "-.",
        'O' => "---",
        'P' => ".--.",
        'Q' => "--.-",
        'R' => ".-.",
        'S' => "...",
        'T' => "-",
        'U' => "..-",
        'V' => "...-",
        'W' => ".--",
        'X' => "-..-",
        'Y' => "-.--",
        'Z' => "--..",
        '0' => "-----",
        '1' => ".----",
        '2' => "..---",
        '3' => "...--",
        '4' => "....-",
        '5' => ".....",
        '6' => "-....",
        '7' => "--...",
        '8' => "---..",
        '9' => "----.",
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MorseTiming {
    pub unit: f64,
    pub intra: f64,
    pub letter_gap: f64,
    pub word_gap: f64,
}

impl Default for MorseTiming {
    fn default() -> Self {
        Self {
            unit: 1.0,
            intra: 1.0,
            letter_gap: 3.0,
            word_gap: 7.0,
        }
    }
}

impl MorseTiming {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("unit", self.unit),
            ("intra", self.intra),
            ("letter_gap", self.letter_gap),
            ("word_gap", self.word_gap),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!("morse {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Encodes `text` starting at `start`. Letters are case-insensitive; runs of
/// spaces count as one word break.
pub fn morse_encode_at(text: &str, timing: &MorseTiming, start: f64) -> Result<Vec<Event>> {
    timing.validate()?;
    let mut events = Vec::new();
    let mut t = start;
    let mut gap: Option<f64> = None;
    for c in text.chars() {
        if c == ' ' {
            if !events.is_empty() {
                gap = Some(timing.word_gap);
            }
            continue;
        }
        let pattern = code(c).ok_or(Error::Unencodable(c))?;
        for (k, el) in pattern.chars().enumerate() {
            if let Some(g) = gap.take() {
                t += g * timing.unit;
            } else if k > 0 {
                t += timing.intra * timing.unit;
            }
            let channel = if el == '.' { DOT } else { DASH };
            events.push(Event::new(channel, quantize_time(t)));
        }
        gap = Some(timing.letter_gap);
    }
    Ok(events)
}

pub fn morse_encode(text: &str, timing: &MorseTiming) -> Result<Vec<Event>> {
    morse_encode_at(text, timing, 0.0)
}

/// Keeps letters, digits and spaces; drops punctuation such as apostrophes.
pub fn normalize_text(text: &str) -> String {
    let kept: String = text
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == ' ')
        .collect();
    kept.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_ascii_uppercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorseTask {
    Names,
    Digits,
    Sonnet,
}

impl MorseTask {
    pub fn vocabulary(self) -> Vec<String> {
        let v: &[&str] = match self {
            MorseTask::Names => &NAMES,
            MorseTask::Digits => &DIGIT_SEQUENCES,
            MorseTask::Sonnet => &SONNET_LINES,
        };
        v.iter().map(|s| normalize_text(s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseTaskConfig {
    #[serde(default)]
    pub timing: MorseTiming,
    /// Class `i` is `vocabulary[i]`.
    pub vocabulary: Vec<String>,
    /// Gap between consecutive vocabulary items, in units.
    #[serde(default = "default_item_gap")]
    pub item_gap: f64,
    /// Times the vocabulary is presented, in order.
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
}

fn default_item_gap() -> f64 {
    MorseTiming::default().word_gap
}

fn default_repetitions() -> usize {
    1
}

impl MorseTaskConfig {
    pub fn new(vocabulary: Vec<String>) -> Self {
        Self {
            timing: MorseTiming::default(),
            vocabulary,
            item_gap: default_item_gap(),
            repetitions: 1,
        }
    }

    pub fn preset(task: MorseTask) -> Self {
        Self::new(task.vocabulary())
    }
}

/// Streams the vocabulary items back to back and labels the last spike of
/// each item with its index.
pub fn build_morse_task(cfg: &MorseTaskConfig) -> Result<(Vec<Event>, Vec<LabeledEvent>)> {
    if cfg.vocabulary.is_empty() {
        return Err(Error::InvalidParam("morse vocabulary is empty".into()));
    }
    if !(cfg.item_gap > 0.0) {
        return Err(Error::InvalidParam("item_gap must be positive".into()));
    }
    let mut events = Vec::new();
    let mut labels = Vec::new();
    let mut t = 0.0;
    for _ in 0..cfg.repetitions {
        for (class_id, item) in cfg.vocabulary.iter().enumerate() {
            let ev = morse_encode_at(item, &cfg.timing, t)?;
            let last = ev
                .last()
                .ok_or_else(|| Error::InvalidParam(format!("vocabulary item {item:?} is empty")))?;
            labels.push(LabeledEvent::new(class_id, last.time));
            t = last.time + cfg.item_gap * cfg.timing.unit;
            events.extend(ev);
        }
    }
    Ok((events, labels))
}

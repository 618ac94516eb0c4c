//! Spike stream CSV files.
//!
//! Events are stored as `channel,time` and labels as `class,time`, one row per
//! spike after a single header line, sorted by time. Times are written with up
//! to nine fractional digits and LF line endings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::event::{Event, LabeledEvent};

pub const EVENTS_HEADER: &str = "channel,time";
pub const LABELS_HEADER: &str = "class,time";

/// Formats a time with at most nine fractional digits, trimming trailing
/// zeros but keeping one digit after the point.
pub fn format_time(t: f64) -> String {
    let mut s = format!("{t:.9}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.push('0');
    }
    s
}

fn write_rows(path: &Path, header: &str, rows: impl Iterator<Item = (usize, f64)>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for (id, t) in rows {
        writeln!(w, "{id},{}", format_time(t))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_events(path: impl AsRef<Path>, events: &[Event]) -> Result<()> {
    write_rows(path.as_ref(), EVENTS_HEADER, events.iter().map(|e| (e.channel, e.time)))
}

pub fn save_labels(path: impl AsRef<Path>, labels: &[LabeledEvent]) -> Result<()> {
    write_rows(
        path.as_ref(),
        LABELS_HEADER,
        labels.iter().map(|l| (l.class_id, l.time)),
    )
}

/// Reads `(id, time)` rows, checking the header, sort order and `id < bound`.
fn read_rows(path: &Path, header: &str, bound: Option<usize>) -> Result<Vec<(usize, f64)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let parse_err = |line: u64, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let found = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if found != header {
        return Err(parse_err(1, format!("expected header {header:?}, found {found:?}")));
    }
    let mut rows = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let id: usize = record[0]
            .trim()
            .parse()
            .map_err(|e| parse_err(line, format!("bad id {:?}: {e}", &record[0])))?;
        let time: f64 = record[1]
            .trim()
            .parse()
            .map_err(|e| parse_err(line, format!("bad time {:?}: {e}", &record[1])))?;
        if !(time >= 0.0 && time.is_finite()) {
            return Err(parse_err(
                line,
                format!("time must be finite and non-negative, got {time}"),
            ));
        }
        if time < prev {
            return Err(Error::UnsortedFile {
                path: path.to_path_buf(),
                line,
                time,
                prev,
            });
        }
        if let Some(n) = bound {
            if id >= n {
                return Err(Error::FileChannelOutOfRange {
                    path: path.to_path_buf(),
                    line,
                    channel: id,
                    n_channels: n,
                });
            }
        }
        prev = time;
        rows.push((id, time));
    }
    Ok(rows)
}

/// Loads an event file; `n_channels` bounds the channel column when given.
pub fn load_events(path: impl AsRef<Path>, n_channels: Option<usize>) -> Result<Vec<Event>> {
    Ok(read_rows(path.as_ref(), EVENTS_HEADER, n_channels)?
        .into_iter()
        .map(|(c, t)| Event::new(c, t))
        .collect())
}

pub fn load_labels(path: impl AsRef<Path>, n_classes: Option<usize>) -> Result<Vec<LabeledEvent>> {
    Ok(read_rows(path.as_ref(), LABELS_HEADER, n_classes)?
        .into_iter()
        .map(|(c, t)| LabeledEvent::new(c, t))
        .collect())
}

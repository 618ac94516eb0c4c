//! Gaussian receptive-field population coding of real-valued features.
//!
//! Each feature is covered by `m` overlapping Gaussian fields. Field `i`
//! (1-based) is centred at `min + (2i - 3)/2 * (max - min)/(m - 2)` with width
//! `(max - min) / (beta * (m - 2))`. A field with activation `g` emits a single
//! spike at `window * (1 - g)`, so the best-matching field fires first.

use serde::{Deserialize, Serialize};

use super::quantize_time;
use crate::error::{Error, Result};
use crate::event::{Event, LabeledEvent};
use crate::network::Segment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrfEncoderConfig {
    /// Fields per feature.
    pub m: usize,
    pub beta: f64,
    /// Encoding window; every spike falls in `[0, window]`.
    pub window: f64,
    /// Fields with activation below this emit no spike. Off by default.
    pub cutoff: Option<f64>,
}

impl Default for GrfEncoderConfig {
    fn default() -> Self {
        Self {
            m: 5,
            beta: 1.5,
            window: 1.0,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrfEncoder {
    cfg: GrfEncoderConfig,
    ranges: Vec<(f64, f64)>,
}

impl GrfEncoder {
    pub fn new(cfg: GrfEncoderConfig, ranges: Vec<(f64, f64)>) -> Result<Self> {
        if cfg.m < 3 {
            return Err(Error::InvalidParam(format!(
                "need at least 3 fields per feature, got {}",
                cfg.m
            )));
        }
        if !(cfg.window > 0.0) || !(cfg.beta > 0.0) {
            return Err(Error::InvalidParam("window and beta must be positive".into()));
        }
        for (feature, &(min, max)) in ranges.iter().enumerate() {
            if !(min.is_finite() && max.is_finite() && max > min) {
                return Err(Error::DegenerateRange { feature, min, max });
            }
        }
        Ok(Self { cfg, ranges })
    }

    /// Learns per-feature ranges from `samples` (normally the training split).
    pub fn fit(cfg: GrfEncoderConfig, samples: &[Vec<f64>]) -> Result<Self> {
        let n = samples.first().map_or(0, Vec::len);
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
        for s in samples {
            if s.len() != n {
                return Err(Error::InvalidParam("samples have differing feature counts".into()));
            }
            for (r, &x) in ranges.iter_mut().zip(s) {
                r.0 = r.0.min(x);
                r.1 = r.1.max(x);
            }
        }
        Self::new(cfg, ranges)
    }

    pub fn config(&self) -> &GrfEncoderConfig {
        &self.cfg
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    pub fn n_channels(&self) -> usize {
        self.ranges.len() * self.cfg.m
    }

    /// Centre and width of field `i` (0-based) for `feature`.
    pub fn field(&self, feature: usize, i: usize) -> (f64, f64) {
        let (min, max) = self.ranges[feature];
        let step = (max - min) / (self.cfg.m - 2) as f64;
        let centre = min + (2.0 * (i + 1) as f64 - 3.0) / 2.0 * step;
        (centre, step / self.cfg.beta)
    }

    pub fn activation(&self, feature: usize, i: usize, x: f64) -> f64 {
        let (mu, sigma) = self.field(feature, i);
        (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp()
    }

    /// Encodes one sample into spikes sorted by time, then channel.
    pub fn encode(&self, sample: &[f64]) -> Result<Vec<Event>> {
        if sample.len() != self.ranges.len() {
            return Err(Error::InvalidParam(format!(
                "sample has {} features, encoder expects {}",
                sample.len(),
                self.ranges.len()
            )));
        }
        let m = self.cfg.m;
        let mut events = Vec::with_capacity(self.n_channels());
        for (feature, &x) in sample.iter().enumerate() {
            for i in 0..m {
                let g = self.activation(feature, i, x);
                if self.cfg.cutoff.is_some_and(|c| g < c) {
                    continue;
                }
                let raw = self.cfg.window * (1.0 - g);
                let mut t = quantize_time(raw);
                // Rounding may step past an off-grid window edge; round down instead.
                if t > self.cfg.window {
                    t = (raw * 1e9).floor() / 1e9;
                }
                events.push(Event::new(feature * m + i, t));
            }
        }
        events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.channel.cmp(&b.channel)));
        Ok(events)
    }

    /// Encodes a sample as one example with its class label on the last spike.
    pub fn encode_labeled(&self, sample: &[f64], class_id: usize) -> Result<Segment> {
        let events = self.encode(sample)?;
        let labels = events
            .last()
            .map(|e| LabeledEvent::new(class_id, e.time))
            .into_iter()
            .collect();
        Ok(Segment::new(events, labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc() -> GrfEncoder {
        GrfEncoder::new(GrfEncoderConfig::default(), vec![(0.0, 3.0)]).unwrap()
    }

    #[test]
    fn field_layout() {
        // m = 5 over [0, 3]: step 1, centres -0.5, 0.5, 1.5, 2.5, 3.5.
        let e = enc();
        let centres: Vec<f64> = (0..5).map(|i| e.field(0, i).0).collect();
        assert_eq!(centres, vec![-0.5, 0.5, 1.5, 2.5, 3.5]);
        assert!((e.field(0, 0).1 - 1.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn centre_value_fires_at_zero() {
        let e = enc();
        let ev = e.encode(&[1.5]).unwrap();
        assert_eq!(ev[0], Event::new(2, 0.0));
        assert_eq!(ev.len(), 5);
    }

    #[test]
    fn half_activation_fires_mid_window() {
        let e = enc();
        let (mu, sigma) = e.field(0, 2);
        let x = mu + sigma * (2.0 * 2f64.ln()).sqrt();
        assert!((e.activation(0, 2, x) - 0.5).abs() < 1e-12);
        let t = e
            .encode(&[x])
            .unwrap()
            .into_iter()
            .find(|ev| ev.channel == 2)
            .unwrap()
            .time;
        assert!((t - 0.5).abs() < 1e-9);
    }

    #[test]
    fn symmetric_inputs_give_equal_times() {
        let e = enc();
        let at = |x: f64| {
            e.encode(&[x])
                .unwrap()
                .into_iter()
                .find(|ev| ev.channel == 2)
                .unwrap()
                .time
        };
        assert_eq!(at(1.5 - 0.37), at(1.5 + 0.37));
    }

    #[test]
    fn degenerate_range_rejected() {
        let err = GrfEncoder::fit(GrfEncoderConfig::default(), &[vec![1.0, 2.0], vec![1.0, 3.0]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateRange { feature: 0, .. }));
        let cfg = GrfEncoderConfig {
            m: 2,
            ..Default::default()
        };
        assert!(GrfEncoder::new(cfg, vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn cutoff_drops_weak_fields() {
        let cfg = GrfEncoderConfig {
            cutoff: Some(0.1),
            ..Default::default()
        };
        let e = GrfEncoder::new(cfg, vec![(0.0, 3.0)]).unwrap();
        assert!(e.encode(&[1.5]).unwrap().len() < 5);
    }

    #[test]
    fn label_on_last_spike() {
        let seg = enc().encode_labeled(&[0.2], 2).unwrap();
        assert_eq!(seg.labels, vec![LabeledEvent::new(2, seg.events.last().unwrap().time)]);
    }
}

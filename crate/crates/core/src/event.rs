//! Spike events, exponential time surfaces and neuron activity traces.
//!
//! Everything here is lazily decayed: state is only touched when a spike
//! arrives, and reads evaluate the exponential kernel at the requested time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spike on `channel` at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub channel: usize,
    pub time: f64,
}

impl Event {
    pub fn new(channel: usize, time: f64) -> Self {
        Self { channel, time }
    }
}

/// A supervisory spike carrying a class label. Its time must coincide with an
/// input event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledEvent {
    pub class_id: usize,
    pub time: f64,
}

impl LabeledEvent {
    pub fn new(class_id: usize, time: f64) -> Self {
        Self { class_id, time }
    }
}

/// Per-channel exponentially decaying potential.
///
/// Stored as `(P[i], TS[i])` pairs; the value at time `t` is
/// `P[i] * exp(-(t - TS[i]) / tau)`.
#[derive(Debug, Clone)]
pub struct TimeSurface {
    potential: Vec<f64>,
    last_spike: Vec<f64>,
    tau: f64,
    increment: f64,
    latest: f64,
}

impl TimeSurface {
    pub fn new(n_channels: usize, tau: f64, increment: f64) -> Self {
        assert!(tau > 0.0, "tau must be positive");
        Self {
            potential: vec![0.0; n_channels],
            last_spike: vec![0.0; n_channels],
            tau,
            increment,
            latest: 0.0,
        }
    }

    pub fn n_channels(&self) -> usize {
        self.potential.len()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potential
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.last_spike
    }

    /// Time of the most recent spike on any channel.
    pub fn latest(&self) -> f64 {
        self.latest
    }

    /// Decays the spiking channel to `e.time` and adds the increment.
    pub fn update(&mut self, e: Event) -> Result<()> {
        let n_channels = self.n_channels();
        if e.channel >= n_channels {
            return Err(Error::ChannelOutOfRange {
                channel: e.channel,
                n_channels,
            });
        }
        let last = self.last_spike[e.channel];
        if e.time < last {
            return Err(Error::OutOfOrderEvent {
                channel: e.channel,
                time: e.time,
                last,
            });
        }
        let p = &mut self.potential[e.channel];
        *p = *p * (-(e.time - last) / self.tau).exp() + self.increment;
        self.last_spike[e.channel] = e.time;
        if e.time > self.latest {
            self.latest = e.time;
        }
        Ok(())
    }

    fn check_read(&self, t: f64) -> Result<()> {
        if t < self.latest {
            return Err(Error::OutOfOrderRead {
                time: t,
                latest: self.latest,
            });
        }
        Ok(())
    }

    /// Writes the decayed surface at `t` into `out`.
    pub fn read_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.check_read(t)?;
        debug_assert_eq!(out.len(), self.n_channels());
        for ((o, &p), &ts) in out.iter_mut().zip(&self.potential).zip(&self.last_spike) {
            *o = p * (-(t - ts) / self.tau).exp();
        }
        Ok(())
    }

    pub fn read(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_channels()];
        self.read_into(t, &mut out)?;
        Ok(out)
    }

    /// L2-normalized surface at `t`. Fails with [`Error::NoContext`] when the
    /// surface is identically zero.
    pub fn context_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.read_into(t, out)?;
        normalize_l2(out).ok_or(Error::NoContext)
    }

    pub fn context(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_channels()];
        self.context_into(t, &mut out)?;
        Ok(out)
    }

    pub fn reset(&mut self) {
        self.potential.fill(0.0);
        self.last_spike.fill(0.0);
        self.latest = 0.0;
    }
}

/// Scales `v` to unit L2 norm in place. Returns `None` (leaving `v` untouched)
/// if the norm is zero or not finite.
pub fn normalize_l2(v: &mut [f64]) -> Option<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        v.iter_mut().for_each(|x| *x /= norm);
        Some(())
    } else {
        None
    }
}

/// Last-spike memory of a layer's neurons, decayed with the next layer's
/// time constant.
#[derive(Debug, Clone)]
pub struct TraceSet {
    last_spike: Vec<f64>,
    tau: f64,
    latest: f64,
}

impl TraceSet {
    pub fn new(n_neurons: usize, tau: f64) -> Self {
        assert!(tau > 0.0, "trace tau must be positive");
        Self {
            last_spike: vec![f64::NEG_INFINITY; n_neurons],
            tau,
            latest: f64::NEG_INFINITY,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn last_spike_times(&self) -> &[f64] {
        &self.last_spike
    }

    pub fn record(&mut self, neuron: usize, t: f64) {
        self.last_spike[neuron] = t;
        if t > self.latest {
            self.latest = t;
        }
    }

    /// Trace of a single neuron at `t`; 0 for a neuron that never spiked.
    pub fn value(&self, neuron: usize, t: f64) -> f64 {
        (-(t - self.last_spike[neuron]) / self.tau).exp()
    }

    pub fn read(&self, t: f64) -> Result<Vec<f64>> {
        if t < self.latest {
            return Err(Error::OutOfOrderRead {
                time: t,
                latest: self.latest,
            });
        }
        Ok((0..self.last_spike.len()).map(|n| self.value(n, t)).collect())
    }

    pub fn reset(&mut self) {
        self.last_spike.fill(f64::NEG_INFINITY);
        self.latest = f64::NEG_INFINITY;
    }
}

//! Hard winner-take-all layer with adaptive selection thresholds.
//!
//! A layer owns the time surface of its inputs, a unit-norm weight row and a
//! selection threshold per neuron, the eligibility captured at each neuron's
//! last winning spike, and the activity traces the next layer's local
//! attention signal is gated on.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{normalize_l2, Event, TimeSurface, TraceSet};

pub const DEFAULT_ETA: f64 = 0.01;
pub const DEFAULT_ETA_THRESH: f64 = 0.01;
pub const DEFAULT_THETA_OPEN: f64 = 0.001;
pub const DEFAULT_THETA_INIT: f64 = 0.001;
pub const DEFAULT_PHI: f64 = 0.1;
pub const DEFAULT_FEAST_DELTA: f64 = 0.001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerParams {
    pub n_neurons: usize,
    pub n_inputs: usize,
    /// Decay constant of the layer's input time surface.
    pub tau_input: f64,
    /// Decay constant of the layer's activity trace (the next layer's `tau_input`).
    pub tau_trace: f64,
    pub eta: f64,
    pub eta_thresh: f64,
    pub theta_open: f64,
    /// Trace recency threshold for local attention.
    pub phi: f64,
    pub theta_init: f64,
    /// Potential increment per input spike.
    pub c: f64,
    pub feast_delta: f64,
}

impl LayerParams {
    pub fn new(n_neurons: usize, n_inputs: usize, tau_input: f64, tau_trace: f64) -> Self {
        Self {
            n_neurons,
            n_inputs,
            tau_input,
            tau_trace,
            eta: DEFAULT_ETA,
            eta_thresh: DEFAULT_ETA_THRESH,
            theta_open: DEFAULT_THETA_OPEN,
            phi: DEFAULT_PHI,
            theta_init: DEFAULT_THETA_INIT,
            c: 1.0,
            feast_delta: DEFAULT_FEAST_DELTA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParam(msg.to_string()));
        if self.n_neurons == 0 || self.n_inputs == 0 {
            return bad("layer dimensions must be positive");
        }
        let positive = [
            ("tau_input", self.tau_input),
            ("tau_trace", self.tau_trace),
            ("theta_open", self.theta_open),
            ("c", self.c),
            ("feast_delta", self.feast_delta),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("eta", self.eta), ("eta_thresh", self.eta_thresh)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParam(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(Error::InvalidParam(format!("phi must lie in (0, 1), got {}", self.phi)));
        }
        if !self.theta_init.is_finite() {
            return bad("theta_init must be finite");
        }
        Ok(())
    }
}

/// Which thresholds a punishment lowers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PunishTarget {
    All,
    /// Neurons `start..end`, e.g. one class group of the output layer.
    Range(usize, usize),
    Neuron(usize),
}

#[derive(Debug, Clone)]
pub struct Layer {
    params: LayerParams,
    weights: Vec<f64>,
    thresholds: Vec<f64>,
    // Eligibility: the context and membrane value captured at each neuron's
    // last winning spike. ΔW = context - W and ΔΘ = v - Θ are evaluated against
    // the current W and Θ whenever a reward consumes them.
    elig_context: Vec<f64>,
    elig_membrane: Vec<f64>,
    eligible: Vec<bool>,
    traces: TraceSet,
    surface: TimeSurface,
    scratch: Vec<f64>,
}

impl Layer {
    /// Random unit-norm weights (entries drawn uniform in `[0, 1)`), all
    /// thresholds at `theta_init`.
    pub fn new<R: Rng + ?Sized>(params: LayerParams, rng: &mut R) -> Result<Self> {
        params.validate()?;
        let (n, m) = (params.n_neurons, params.n_inputs);
        let mut weights = vec![0.0; n * m];
        for row in weights.chunks_mut(m) {
            loop {
                row.iter_mut().for_each(|w| *w = rng.gen::<f64>());
                if normalize_l2(row).is_some() {
                    break;
                }
            }
        }
        let thresholds = vec![params.theta_init; n];
        Self::from_parts(params, weights, thresholds)
    }

    /// Rebuilds a layer from stored parameters. Every weight row must already
    /// have unit L2 norm.
    pub fn from_parts(params: LayerParams, weights: Vec<f64>, thresholds: Vec<f64>) -> Result<Self> {
        params.validate()?;
        let (n, m) = (params.n_neurons, params.n_inputs);
        if weights.len() != n * m || thresholds.len() != n {
            return Err(Error::InvalidParam(format!(
                "expected {n}x{m} weights and {n} thresholds, got {} and {}",
                weights.len(),
                thresholds.len()
            )));
        }
        for (i, row) in weights.chunks(m).enumerate() {
            let norm = row.iter().map(|w| w * w).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParam(format!(
                    "weight row {i} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(Self {
            traces: TraceSet::new(n, params.tau_trace),
            surface: TimeSurface::new(m, params.tau_input, params.c),
            elig_context: vec![0.0; n * m],
            elig_membrane: vec![0.0; n],
            eligible: vec![false; n],
            scratch: vec![0.0; m],
            weights,
            thresholds,
            params,
        })
    }

    pub fn params(&self) -> &LayerParams {
        &self.params
    }

    pub fn n_neurons(&self) -> usize {
        self.params.n_neurons
    }

    pub fn n_inputs(&self) -> usize {
        self.params.n_inputs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_row(&self, neuron: usize) -> &[f64] {
        let m = self.params.n_inputs;
        &self.weights[neuron * m..(neuron + 1) * m]
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn thresholds_mut(&mut self) -> &mut [f64] {
        &mut self.thresholds
    }

    pub fn traces(&self) -> &TraceSet {
        &self.traces
    }

    pub fn surface(&self) -> &TimeSurface {
        &self.surface
    }

    /// Current ΔW for `neuron`: zero if it has not won since the last reset.
    pub fn eligibility_dw(&self, neuron: usize) -> Vec<f64> {
        let m = self.params.n_inputs;
        if !self.eligible[neuron] {
            return vec![0.0; m];
        }
        let ctx = &self.elig_context[neuron * m..(neuron + 1) * m];
        ctx.iter().zip(self.weight_row(neuron)).map(|(c, w)| c - w).collect()
    }

    /// Current ΔΘ for `neuron`.
    pub fn eligibility_dtheta(&self, neuron: usize) -> f64 {
        if self.eligible[neuron] {
            self.elig_membrane[neuron] - self.thresholds[neuron]
        } else {
            0.0
        }
    }

    /// Context captured at `neuron`'s last winning spike, if any.
    pub fn eligibility_context(&self, neuron: usize) -> Option<&[f64]> {
        let m = self.params.n_inputs;
        self.eligible[neuron].then(|| &self.elig_context[neuron * m..(neuron + 1) * m])
    }

    /// Membrane values `W · C` for the context in `scratch`, and the
    /// threshold-gated winner (lowest index on ties).
    fn select_winner(&self) -> Option<(usize, f64)> {
        let m = self.params.n_inputs;
        let mut best: Option<(usize, f64)> = None;
        for (n, row) in self.weights.chunks_exact(m).enumerate() {
            let v: f64 = row.iter().zip(&self.scratch).map(|(w, c)| w * c).sum();
            if v >= self.thresholds[n] && best.is_none_or(|(_, bv)| v > bv) {
                best = Some((n, v));
            }
        }
        best
    }

    fn load_context(&mut self, e: Event) -> Result<bool> {
        self.surface.update(e)?;
        match self.surface.context_into(e.time, &mut self.scratch) {
            Ok(()) => Ok(true),
            Err(Error::NoContext) => Ok(false),
            Err(err) => Err(err),
        }
    }

    /// Learning forward pass: updates the input surface, picks the winner and
    /// captures its eligibility. At most one output spike per input spike.
    pub fn forward(&mut self, e: Event) -> Result<Option<Event>> {
        if !self.load_context(e)? {
            return Ok(None);
        }
        let Some((winner, v)) = self.select_winner() else {
            return Ok(None);
        };
        let m = self.params.n_inputs;
        self.elig_context[winner * m..(winner + 1) * m].copy_from_slice(&self.scratch);
        self.elig_membrane[winner] = v;
        self.eligible[winner] = true;
        self.traces.record(winner, e.time);
        Ok(Some(Event::new(winner, e.time)))
    }

    /// Forward pass without any learning state: only the input surface moves.
    pub fn forward_frozen(&mut self, e: Event) -> Result<Option<Event>> {
        if !self.load_context(e)? {
            return Ok(None);
        }
        Ok(self.select_winner().map(|(winner, _)| Event::new(winner, e.time)))
    }

    /// Moves `neuron`'s weights toward its eligibility context (then
    /// renormalizes) and its threshold toward the captured membrane value.
    /// A neuron without eligibility is left untouched.
    pub fn reward(&mut self, neuron: usize) {
        if !self.eligible[neuron] {
            return;
        }
        let m = self.params.n_inputs;
        let eta = self.params.eta;
        let ctx = &self.elig_context[neuron * m..(neuron + 1) * m];
        let row = &mut self.weights[neuron * m..(neuron + 1) * m];
        for (w, c) in row.iter_mut().zip(ctx) {
            *w += eta * (c - *w);
        }
        // The context is a unit vector and eta <= 1, so the row never vanishes.
        normalize_l2(row).expect("weight row collapsed to zero");
        let theta = &mut self.thresholds[neuron];
        *theta += self.params.eta_thresh * (self.elig_membrane[neuron] - *theta);
    }

    pub fn punish(&mut self, target: PunishTarget) {
        let d = self.params.theta_open;
        match target {
            PunishTarget::All => self.thresholds.iter_mut().for_each(|t| *t -= d),
            PunishTarget::Range(a, b) => self.thresholds[a..b].iter_mut().for_each(|t| *t -= d),
            PunishTarget::Neuron(n) => self.thresholds[n] -= d,
        }
    }

    /// Local attention from the next layer spiking at `t`: neurons whose trace
    /// is at least `phi` are rewarded, the rest are punished individually.
    pub fn record_local_attention(&mut self, t: f64) {
        for n in 0..self.params.n_neurons {
            if self.traces.value(n, t) >= self.params.phi {
                self.reward(n);
            } else {
                self.punish(PunishTarget::Neuron(n));
            }
        }
    }

    /// Unsupervised step: the winner's weights are mixed toward the context and
    /// its threshold raised by `feast_delta`; with no winner every threshold is
    /// lowered by `feast_delta`.
    pub fn feast_step(&mut self, e: Event) -> Result<Option<Event>> {
        if !self.load_context(e)? {
            return Ok(None);
        }
        match self.select_winner() {
            Some((winner, _)) => {
                let m = self.params.n_inputs;
                let eta = self.params.eta;
                let row = &mut self.weights[winner * m..(winner + 1) * m];
                for (w, c) in row.iter_mut().zip(&self.scratch) {
                    *w += eta * (c - *w);
                }
                normalize_l2(row).expect("weight row collapsed to zero");
                self.thresholds[winner] += self.params.feast_delta;
                self.traces.record(winner, e.time);
                Ok(Some(Event::new(winner, e.time)))
            }
            None => {
                let d = self.params.feast_delta;
                self.thresholds.iter_mut().for_each(|t| *t -= d);
                Ok(None)
            }
        }
    }

    /// Clears the input surface, traces and eligibility. Weights and
    /// thresholds are kept.
    pub fn reset_state(&mut self) {
        self.surface.reset();
        self.traces.reset();
        self.eligible.fill(false);
    }
}

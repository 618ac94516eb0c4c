//! Multi-layer network and its online training loop.
//!
//! Each input spike is cascaded through the hidden layers and into the
//! grouped output layer. A layer that spikes sends a local attention signal to
//! the layer below it. A label spike raises a global attention signal that
//! rewards every active hidden layer up to the first silent one (which is
//! punished), and supervises the output layer directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{Event, LabeledEvent};
use crate::layer::{Layer, LayerParams, PunishTarget};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputLayerConfig {
    pub n_classes: usize,
    /// Neurons per class group.
    pub k: usize,
    pub tau_input: f64,
    pub eta: f64,
    pub eta_thresh: f64,
    pub theta_open: f64,
    pub theta_init: f64,
    pub c: f64,
}

impl OutputLayerConfig {
    pub fn new(n_classes: usize, k: usize, tau_input: f64) -> Self {
        let d = LayerParams::new(1, 1, 1.0, 1.0);
        Self {
            n_classes,
            k,
            tau_input,
            eta: d.eta,
            eta_thresh: d.eta_thresh,
            theta_open: d.theta_open,
            theta_init: d.theta_init,
            c: d.c,
        }
    }

    pub fn n_neurons(&self) -> usize {
        self.k * self.n_classes
    }

    /// Class group of an output neuron.
    pub fn group_of(&self, neuron: usize) -> usize {
        neuron / self.k
    }

    fn layer_params(&self, n_inputs: usize) -> LayerParams {
        LayerParams {
            eta: self.eta,
            eta_thresh: self.eta_thresh,
            theta_open: self.theta_open,
            theta_init: self.theta_init,
            c: self.c,
            // The output trace is never read: output rewards happen only at the
            // exact label time.
            ..LayerParams::new(self.n_neurons(), n_inputs, self.tau_input, self.tau_input)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Number of input channels.
    pub n_inputs: usize,
    pub hidden: Vec<LayerParams>,
    pub output: OutputLayerConfig,
    pub seed: u64,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_inputs == 0 {
            return Err(Error::InvalidParam("network needs at least one input channel".into()));
        }
        if self.output.n_classes == 0 || self.output.k == 0 {
            return Err(Error::InvalidParam(
                "output layer needs n_classes >= 1 and k >= 1".into(),
            ));
        }
        let mut n_prev = self.n_inputs;
        for (l, p) in self.hidden.iter().enumerate() {
            p.validate()?;
            if p.n_inputs != n_prev {
                return Err(Error::InvalidParam(format!(
                    "hidden layer {l} expects {} inputs but the layer below has {n_prev}",
                    p.n_inputs
                )));
            }
            let next_tau = self.hidden.get(l + 1).map_or(self.output.tau_input, |q| q.tau_input);
            if p.tau_trace != next_tau {
                return Err(Error::InvalidParam(format!(
                    "hidden layer {l} trace tau {} must equal the next layer's input tau {next_tau}",
                    p.tau_trace
                )));
            }
            n_prev = p.n_neurons;
        }
        self.output.layer_params(n_prev).validate()
    }

    fn output_inputs(&self) -> usize {
        self.hidden.last().map_or(self.n_inputs, |p| p.n_neurons)
    }
}

/// What one layer did for one input event.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LayerActivity {
    pub winner: Option<usize>,
    /// The layer received a local attention signal from the layer above.
    pub local: bool,
    /// The layer was rewarded or punished by a global attention signal (or, for
    /// the output layer, by direct supervision).
    pub global: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepOutcome {
    pub time: f64,
    /// Hidden layers first, output layer last.
    pub layers: Vec<LayerActivity>,
    pub label: Option<usize>,
    pub prediction: Option<usize>,
}

impl StepOutcome {
    pub fn output(&self) -> &LayerActivity {
        self.layers.last().expect("network always has an output layer")
    }
}

/// One row of the per-event, per-layer training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub time: f64,
    pub layer: usize,
    pub winner: Option<usize>,
    pub local: bool,
    pub global: bool,
    pub label: Option<usize>,
    pub prediction: Option<usize>,
}

/// A stream of input events with its label events. For example-segmented
/// datasets each example is one segment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Segment {
    pub events: Vec<Event>,
    pub labels: Vec<LabeledEvent>,
}

impl Segment {
    pub fn new(events: Vec<Event>, labels: Vec<LabeledEvent>) -> Self {
        Self { events, labels }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub n_events: usize,
    pub n_labels: usize,
    pub hits: usize,
    /// Label events where the output layer stayed silent.
    pub misses: usize,
    /// Label events where the output winner belonged to another class group.
    pub wrong: usize,
    pub per_class_labels: Vec<usize>,
    pub per_class_hits: Vec<usize>,
    /// Spike count per layer, output last.
    pub spikes_per_layer: Vec<usize>,
    /// Output spikes at events that carry no label.
    pub false_positives: usize,
}

impl EpochStats {
    fn new(n_layers: usize, n_classes: usize) -> Self {
        Self {
            per_class_labels: vec![0; n_classes],
            per_class_hits: vec![0; n_classes],
            spikes_per_layer: vec![0; n_layers],
            ..Default::default()
        }
    }

    /// Label-coincident accuracy; 0 when there were no labels.
    pub fn accuracy(&self) -> f64 {
        if self.n_labels == 0 {
            0.0
        } else {
            self.hits as f64 / self.n_labels as f64
        }
    }

    pub fn unlabeled_events(&self) -> usize {
        self.n_events - self.n_labels
    }

    fn absorb(&mut self, out: &StepOutcome) {
        self.n_events += 1;
        for (count, act) in self.spikes_per_layer.iter_mut().zip(&out.layers) {
            *count += act.winner.is_some() as usize;
        }
        match out.label {
            Some(class) => {
                self.n_labels += 1;
                self.per_class_labels[class] += 1;
                match out.prediction {
                    Some(p) if p == class => {
                        self.hits += 1;
                        self.per_class_hits[class] += 1;
                    }
                    Some(_) => self.wrong += 1,
                    None => self.misses += 1,
                }
            }
            None => self.false_positives += out.prediction.is_some() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSnapshot {
    pub weights: Vec<f64>,
    pub thresholds: Vec<f64>,
}

/// Versioned parameter state of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkState {
    pub version: u32,
    pub config: NetworkConfig,
    /// Hidden layers first, output layer last.
    pub layers: Vec<LayerSnapshot>,
}

#[derive(Debug, Clone)]
pub struct Network {
    config: NetworkConfig,
    hidden: Vec<Layer>,
    output: Layer,
    last_time: f64,
    step: StepOutcome,
}

impl Network {
    /// Builds a network with random weights drawn from `config.seed`.
    pub fn new(config: NetworkConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let hidden = config
            .hidden
            .iter()
            .map(|p| Layer::new(p.clone(), &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let output = Layer::new(config.output.layer_params(config.output_inputs()), &mut rng)?;
        Ok(Self::assemble(config, hidden, output))
    }

    fn assemble(config: NetworkConfig, hidden: Vec<Layer>, output: Layer) -> Self {
        let step = StepOutcome {
            layers: vec![LayerActivity::default(); hidden.len() + 1],
            ..Default::default()
        };
        Self {
            config,
            hidden,
            output,
            last_time: f64::NEG_INFINITY,
            step,
        }
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn hidden(&self) -> &[Layer] {
        &self.hidden
    }

    pub fn hidden_mut(&mut self) -> &mut [Layer] {
        &mut self.hidden
    }

    pub fn output(&self) -> &Layer {
        &self.output
    }

    pub fn output_mut(&mut self) -> &mut Layer {
        &mut self.output
    }

    /// Number of layers including the output layer.
    pub fn n_layers(&self) -> usize {
        self.hidden.len() + 1
    }

    /// Clears all surfaces, traces and eligibility, and restarts the clock.
    pub fn reset_state(&mut self) {
        self.hidden.iter_mut().for_each(Layer::reset_state);
        self.output.reset_state();
        self.last_time = f64::NEG_INFINITY;
    }

    fn begin_step(&mut self, e: Event, label: Option<LabeledEvent>) -> Result<()> {
        if e.time < self.last_time {
            return Err(Error::OutOfOrderEvent {
                channel: e.channel,
                time: e.time,
                last: self.last_time,
            });
        }
        if e.channel >= self.config.n_inputs {
            return Err(Error::ChannelOutOfRange {
                channel: e.channel,
                n_channels: self.config.n_inputs,
            });
        }
        if let Some(l) = label {
            if l.time != e.time {
                return Err(Error::OrphanLabel {
                    class_id: l.class_id,
                    time: l.time,
                });
            }
            if l.class_id >= self.config.output.n_classes {
                return Err(Error::ClassOutOfRange {
                    class_id: l.class_id,
                    n_classes: self.config.output.n_classes,
                });
            }
        }
        self.last_time = e.time;
        self.step.time = e.time;
        self.step.label = label.map(|l| l.class_id);
        self.step.prediction = None;
        self.step.layers.fill(LayerActivity::default());
        Ok(())
    }

    /// One online training step for input spike `e`, optionally carrying the
    /// label spike that coincides with it.
    pub fn train_step(&mut self, e: Event, label: Option<LabeledEvent>) -> Result<&StepOutcome> {
        self.begin_step(e, label)?;
        let t = e.time;
        let n_hidden = self.hidden.len();

        // Cascade through the hidden layers; a silent layer ends it.
        let mut input = Some(e);
        for h in 0..n_hidden {
            let Some(x) = input else { break };
            let s = self.hidden[h].forward(x)?;
            self.step.layers[h].winner = s.map(|s| s.channel);
            if h > 0 && s.is_some() {
                self.hidden[h - 1].record_local_attention(t);
                self.step.layers[h - 1].local = true;
            }
            input = s;
        }

        let reached_output = input.is_some();
        let mut out_winner = None;
        if let Some(x) = input {
            out_winner = self.output.forward(x)?.map(|s| s.channel);
            if out_winner.is_some() && n_hidden > 0 {
                self.hidden[n_hidden - 1].record_local_attention(t);
                self.step.layers[n_hidden - 1].local = true;
            }
        }
        self.step.layers[n_hidden].winner = out_winner;
        self.step.prediction = out_winner.map(|n| self.config.output.group_of(n));

        if let Some(l) = label {
            self.record_global_attention();
            let k = self.config.output.k;
            let group = PunishTarget::Range(l.class_id * k, (l.class_id + 1) * k);
            match out_winner {
                Some(n) if self.config.output.group_of(n) == l.class_id => self.output.reward(n),
                Some(_) => self.output.punish(group),
                None if reached_output => self.output.punish(group),
                None => {}
            }
            self.step.layers[n_hidden].global = reached_output;
        }
        Ok(&self.step)
    }

    /// Rewards the winner of each active hidden layer, bottom-up, and punishes
    /// every neuron of the first silent layer, where the scan stops.
    fn record_global_attention(&mut self) {
        for (layer, act) in self.hidden.iter_mut().zip(self.step.layers.iter_mut()) {
            act.global = true;
            match act.winner {
                Some(n) => layer.reward(n),
                None => {
                    layer.punish(PunishTarget::All);
                    break;
                }
            }
        }
    }

    /// Frozen forward cascade. Returns the predicted class and time if the
    /// output layer spikes.
    pub fn infer(&mut self, e: Event) -> Result<Option<(usize, f64)>> {
        self.begin_step(e, None)?;
        let n_hidden = self.hidden.len();
        let mut input = Some(e);
        for h in 0..n_hidden {
            let Some(x) = input else { break };
            input = self.hidden[h].forward_frozen(x)?;
            self.step.layers[h].winner = input.map(|s| s.channel);
        }
        let out = match input {
            Some(x) => self.output.forward_frozen(x)?,
            None => None,
        };
        self.step.layers[n_hidden].winner = out.map(|s| s.channel);
        self.step.prediction = out.map(|s| self.config.output.group_of(s.channel));
        Ok(self.step.prediction.map(|c| (c, e.time)))
    }

    /// Runs one pass over `segments`, learning if `learn` is set. State is
    /// reset before the first segment, and between segments when
    /// `reset_between` is set. Per-event log rows are appended to `log` when
    /// given.
    pub fn run_epoch<'a, I>(
        &mut self,
        segments: I,
        reset_between: bool,
        learn: bool,
        mut log: Option<&mut Vec<TrainRecord>>,
    ) -> Result<EpochStats>
    where
        I: IntoIterator<Item = &'a Segment>,
    {
        let mut stats = EpochStats::new(self.n_layers(), self.config.output.n_classes);
        self.reset_state();
        for (i, seg) in segments.into_iter().enumerate() {
            if reset_between && i > 0 {
                self.reset_state();
            }
            let mut labels = seg.labels.iter().peekable();
            for (j, &e) in seg.events.iter().enumerate() {
                if let Some(l) = labels.peek() {
                    if l.time < e.time {
                        return Err(Error::OrphanLabel {
                            class_id: l.class_id,
                            time: l.time,
                        });
                    }
                }
                // A label goes with the last input event at its time.
                let last_at_time = seg.events.get(j + 1).is_none_or(|n| n.time != e.time);
                let label = if last_at_time {
                    labels.next_if(|l| l.time == e.time).copied()
                } else {
                    None
                };
                if learn {
                    self.train_step(e, label)?;
                } else {
                    self.infer(e)?;
                    if let Some(l) = label {
                        if l.class_id >= self.config.output.n_classes {
                            return Err(Error::ClassOutOfRange {
                                class_id: l.class_id,
                                n_classes: self.config.output.n_classes,
                            });
                        }
                        self.step.label = Some(l.class_id);
                    }
                }
                stats.absorb(&self.step);
                if let Some(rows) = log.as_deref_mut() {
                    self.append_records(rows);
                }
            }
            if let Some(l) = labels.next() {
                return Err(Error::OrphanLabel {
                    class_id: l.class_id,
                    time: l.time,
                });
            }
        }
        Ok(stats)
    }

    fn append_records(&self, rows: &mut Vec<TrainRecord>) {
        rows.extend(self.step.layers.iter().enumerate().map(|(layer, act)| TrainRecord {
            time: self.step.time,
            layer,
            winner: act.winner,
            local: act.local,
            global: act.global,
            label: self.step.label,
            prediction: self.step.prediction,
        }));
    }

    pub fn snapshot(&self) -> NetworkState {
        let layers = self
            .hidden
            .iter()
            .chain(std::iter::once(&self.output))
            .map(|l| LayerSnapshot {
                weights: l.weights().to_vec(),
                thresholds: l.thresholds().to_vec(),
            })
            .collect();
        NetworkState {
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            layers,
        }
    }

    pub fn from_state(state: NetworkState) -> Result<Self> {
        if state.version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointVersion {
                found: state.version,
                expected: CHECKPOINT_VERSION,
            });
        }
        let config = state.config;
        config.validate()?;
        if state.layers.len() != config.hidden.len() + 1 {
            return Err(Error::InvalidParam(format!(
                "checkpoint has {} layers, config describes {}",
                state.layers.len(),
                config.hidden.len() + 1
            )));
        }
        let mut snaps = state.layers.into_iter();
        let hidden = config
            .hidden
            .iter()
            .zip(snaps.by_ref())
            .map(|(p, s)| Layer::from_parts(p.clone(), s.weights, s.thresholds))
            .collect::<Result<Vec<_>>>()?;
        let out = snaps.next().expect("length checked above");
        let output = Layer::from_parts(
            config.output.layer_params(config.output_inputs()),
            out.weights,
            out.thresholds,
        )?;
        Ok(Self::assemble(config, hidden, output))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.snapshot())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_state(parse_versioned(s)?)
    }
}

/// Parses a versioned JSON document, reporting a version mismatch before any
/// schema error.
pub(crate) fn parse_versioned<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(s)?;
    let found = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if found != CHECKPOINT_VERSION {
        return Err(Error::CheckpointVersion {
            found,
            expected: CHECKPOINT_VERSION,
        });
    }
    Ok(serde_json::from_value(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(hidden: &[(usize, f64)], n_inputs: usize, out: OutputLayerConfig) -> Network {
        let mut layers = Vec::new();
        let mut n_prev = n_inputs;
        for (i, &(n, tau)) in hidden.iter().enumerate() {
            let next = hidden.get(i + 1).map_or(out.tau_input, |h| h.1);
            layers.push(LayerParams::new(n, n_prev, tau, next));
            n_prev = n;
        }
        Network::new(NetworkConfig {
            n_inputs,
            hidden: layers,
            output: out,
            seed: 7,
        })
        .unwrap()
    }

    #[test]
    fn config_rejects_broken_chains() {
        let out = OutputLayerConfig::new(2, 1, 3.0);
        let good = NetworkConfig {
            n_inputs: 2,
            hidden: vec![LayerParams::new(4, 2, 1.0, 3.0)],
            output: out.clone(),
            seed: 0,
        };
        good.validate().unwrap();
        let mut bad = good.clone();
        bad.hidden[0].tau_trace = 2.0;
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.hidden[0].n_inputs = 3;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn correct_output_spike_rewards_only_winner() {
        let mut n = net(&[], 2, OutputLayerConfig::new(2, 1, 1.0));
        // Make neuron 1 (class 1) the only one that can spike.
        n.output_mut().thresholds_mut().copy_from_slice(&[5.0, -1.0]);
        let before = n.output().thresholds().to_vec();
        let out = n
            .train_step(Event::new(0, 0.0), Some(LabeledEvent::new(1, 0.0)))
            .unwrap();
        assert_eq!(out.prediction, Some(1));
        let after = n.output().thresholds();
        assert_eq!(after[0], before[0]);
        assert!(after[1] > before[1]);
    }

    #[test]
    fn wrong_output_spike_punishes_correct_group() {
        let mut n = net(&[], 2, OutputLayerConfig::new(2, 2, 1.0));
        n.output_mut().thresholds_mut().copy_from_slice(&[5.0, 5.0, -1.0, 5.0]);
        let w_before = n.output().weights().to_vec();
        n.train_step(Event::new(0, 0.0), Some(LabeledEvent::new(0, 0.0)))
            .unwrap();
        let th = n.output().thresholds();
        let d = n.config().output.theta_open;
        assert_eq!(th, &[5.0 - d, 5.0 - d, -1.0, 5.0]);
        assert_eq!(n.output().weights(), &w_before[..]);
    }

    #[test]
    fn silent_first_hidden_layer_is_punished_alone() {
        let mut n = net(&[(3, 1.0), (3, 2.0)], 2, OutputLayerConfig::new(2, 1, 4.0));
        n.hidden_mut()[0].thresholds_mut().fill(5.0);
        let h2 = n.hidden()[1].thresholds().to_vec();
        let out_th = n.output().thresholds().to_vec();
        let out = n
            .train_step(Event::new(0, 0.0), Some(LabeledEvent::new(0, 0.0)))
            .unwrap()
            .clone();
        assert!(out.layers.iter().all(|a| a.winner.is_none()));
        let d = n.config().hidden[0].theta_open;
        assert!(n.hidden()[0].thresholds().iter().all(|&t| t == 5.0 - d));
        assert_eq!(n.hidden()[1].thresholds(), &h2[..]);
        assert_eq!(n.output().thresholds(), &out_th[..]);
        assert!(out.layers[0].global && !out.layers[1].global && !out.layers[2].global);
    }

    #[test]
    fn global_attention_rewards_active_and_stops_at_silent() {
        let mut n = net(&[(2, 1.0), (2, 2.0), (2, 3.0)], 2, OutputLayerConfig::new(2, 1, 4.0));
        n.hidden_mut()[0].thresholds_mut().fill(-1.0);
        n.hidden_mut()[1].thresholds_mut().fill(5.0);
        let h3 = n.hidden()[2].thresholds().to_vec();
        n.train_step(Event::new(0, 0.0), Some(LabeledEvent::new(0, 0.0)))
            .unwrap();
        let th1 = n.hidden()[0].thresholds();
        // Exactly one layer-1 neuron was rewarded (its threshold rose).
        assert_eq!(th1.iter().filter(|&&t| t > -1.0).count(), 1);
        let d = n.config().hidden[1].theta_open;
        assert!(n.hidden()[1].thresholds().iter().all(|&t| t == 5.0 - d));
        assert_eq!(n.hidden()[2].thresholds(), &h3[..]);
    }

    #[test]
    fn no_label_leaves_output_untouched() {
        let mut n = net(&[(4, 1.0)], 3, OutputLayerConfig::new(2, 1, 2.0));
        n.hidden_mut()[0].thresholds_mut().fill(-1.0);
        n.output_mut().thresholds_mut().fill(-1.0);
        let snap = n.output().thresholds().to_vec();
        let w = n.output().weights().to_vec();
        for k in 0..20 {
            let out = n.train_step(Event::new(k % 3, k as f64 * 0.1), None).unwrap();
            assert!(out.prediction.is_some());
        }
        assert_eq!(n.output().thresholds(), &snap[..]);
        assert_eq!(n.output().weights(), &w[..]);
    }

    #[test]
    fn label_must_coincide() {
        let mut n = net(&[], 2, OutputLayerConfig::new(2, 1, 1.0));
        let err = n
            .train_step(Event::new(0, 1.0), Some(LabeledEvent::new(0, 1.5)))
            .unwrap_err();
        assert!(matches!(err, Error::OrphanLabel { .. }));
        n.train_step(Event::new(0, 2.0), None).unwrap();
        assert!(matches!(
            n.train_step(Event::new(1, 1.0), None),
            Err(Error::OutOfOrderEvent { .. })
        ));
    }

    #[test]
    fn infer_is_deterministic_and_respects_thresholds() {
        let mut n = net(&[(4, 1.0)], 3, OutputLayerConfig::new(2, 1, 2.0));
        assert!(n.clone().infer(Event::new(0, 0.0)).unwrap().is_some());
        let mut a = n.clone();
        let mut b = n.clone();
        assert_eq!(
            a.infer(Event::new(2, 0.5)).unwrap(),
            b.infer(Event::new(2, 0.5)).unwrap()
        );
        n.output_mut().thresholds_mut().fill(1.5);
        for k in 0..10 {
            assert_eq!(n.infer(Event::new(k % 3, k as f64)).unwrap(), None);
        }
    }

    #[test]
    fn run_epoch_counts() {
        let mut n = net(&[(4, 1.0)], 2, OutputLayerConfig::new(2, 1, 2.0));
        let empty = n.run_epoch(std::iter::empty(), false, true, None).unwrap();
        assert_eq!(empty.n_events, 0);
        assert_eq!(empty.accuracy(), 0.0);

        let seg = Segment::new(
            vec![
                Event::new(0, 0.0),
                Event::new(1, 1.0),
                Event::new(0, 1.0),
                Event::new(1, 2.0),
            ],
            vec![LabeledEvent::new(1, 1.0), LabeledEvent::new(0, 2.0)],
        );
        let mut log = Vec::new();
        let stats = n.run_epoch([&seg], false, true, Some(&mut log)).unwrap();
        assert_eq!(stats.n_events, 4);
        assert_eq!(stats.n_labels, 2);
        assert_eq!(stats.hits + stats.misses + stats.wrong, 2);
        assert_eq!(log.len(), 8);
        // The label at t=1 attaches to the second event at that time.
        assert_eq!(log[3].label, None);
        assert_eq!(log[5].label, Some(1));

        let orphan = Segment::new(vec![Event::new(0, 0.0)], vec![LabeledEvent::new(0, 0.5)]);
        assert!(matches!(
            n.run_epoch([&orphan], false, true, None),
            Err(Error::OrphanLabel { .. })
        ));
    }

    #[test]
    fn state_round_trips_through_json() {
        let n = net(&[(5, 0.6)], 20, OutputLayerConfig::new(3, 1, 0.9));
        let json = n.to_json().unwrap();
        let m = Network::from_json(&json).unwrap();
        assert_eq!(n.snapshot(), m.snapshot());

        let bumped = json.replacen("\"version\": 1", "\"version\": 99", 1);
        assert!(matches!(
            Network::from_json(&bumped),
            Err(Error::CheckpointVersion { found: 99, .. })
        ));
    }
}

//! Online, event-driven supervised learning for multi-layer spiking networks.
//!
//! Layers are hard winner-take-all groups of dot-product neurons with adaptive
//! selection thresholds. Hidden layers learn from binary local attention
//! signals sent by the layer above and from a global attention signal raised
//! at every label spike; the output layer learns from the label spikes
//! directly.

pub mod encoders;
pub mod error;
pub mod event;
pub mod harness;
pub mod layer;
pub mod network;

pub use error::{Error, Result};
pub use event::{Event, LabeledEvent, TimeSurface, TraceSet};
pub use layer::{Layer, LayerParams, PunishTarget};
pub use network::{
    EpochStats, LayerActivity, Network, NetworkConfig, NetworkState, OutputLayerConfig, Segment, StepOutcome,
    TrainRecord,
};

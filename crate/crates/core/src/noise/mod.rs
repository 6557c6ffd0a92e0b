//! Synthetic ground truth for faulty detectors.

mod config;
mod effects;
mod model;

pub use config::{FlipRates, NoiseConfig, ReadoutConfig, NOISE_SCHEMA};
pub use effects::{dilation_channel, dilation_readout, real_effects_dilation, real_effects_pm};
pub use model::{ancilla_relaxation, confusion_readout, NoiseModel, Readout, ReadoutPair};

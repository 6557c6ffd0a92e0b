//! Simulated shot acquisition for the randomised-basis protocol, its
//! circuit-batched form, noisy pipelines, and ancilla-dilation measurements.

mod dilation;
mod engine;
mod pm;
mod record;
mod rng;

pub use dilation::{dilation_bit_distribution, dilation_version, dilation_qubit_distribution, pair_bits, sample_counts_dilation, sample_dilation};
pub use engine::sample_counts;
pub use pm::{
    make_batch, pm_outcome_distribution, pm_qubit_distribution, povm_version, run_batch, sample_counts_pm, sample_shots,
    sample_shots_noisy, CircuitBatch,
};
pub use record::ShotRecord;
pub use rng::{derive_seed, stream_rng, Stream};

#[cfg(test)]
mod tests;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams derived from one root seed. Each purpose
/// (basis choice, measurement, relabelling, ...) and each circuit index gets
/// its own ChaCha stream, so reordering work never shifts another stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Basis = 1,
    Measure = 2,
    Relabel = 3,
    Tomography = 4,
    Experiment = 5,
}

pub fn stream_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) ^ index);
    rng
}

/// Child seed for a sub-task (repetition, qubit, iteration ...).
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Reproducible random streams.
//!
//! Every random consumer takes a `(seed, stream)` pair. ChaCha streams with
//! distinct stream ids are independent, so parallel tasks draw the same
//! numbers no matter how they are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for a child task, e.g. one grid point of a sweep.
pub fn derive_seed(seed: u64, task: u64) -> u64 {
    use rand::RngCore;
    stream(seed, task ^ 0x5eed_0000_0000_0000).next_u64()
}

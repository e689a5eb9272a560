//! The single seedable generator used by every stochastic routine.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`, for replicates and
/// parallel workers. Streams do not overlap.
pub fn substream(seed: u64, index: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

//! Random streams.
//!
//! Every random quantity in the crate is drawn from a [`Stream`]: a ChaCha8
//! generator keyed by a 64-bit master seed. Independent streams for parallel
//! work are obtained by the splitting rule `(seed, index) -> stream index`,
//! i.e. ChaCha's 64-bit stream selector is set to the replicate index. The
//! draws of replicate `i` therefore never depend on how many workers run or
//! in which order replicates complete.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Stream 0 of the master seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for replicate `index` under the master `seed`.
pub fn replicate_stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

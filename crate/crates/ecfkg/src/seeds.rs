//! Seeded RNG streams.
//!
//! Every random choice in the crate flows from a single root seed fanned out
//! into named sub-streams, so the train/test split, parameter initialization,
//! epoch shuffling, negative sampling, and significance testing are each
//! reproducible on their own and do not perturb one another when, say, the
//! number of epochs changes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_SPLIT: u64 = 1;
pub const STREAM_INIT: u64 = 2;
pub const STREAM_SHUFFLE: u64 = 3;
pub const STREAM_NEGATIVE: u64 = 4;
pub const STREAM_SIGNIFICANCE: u64 = 5;
pub const STREAM_SYNTHETIC: u64 = 6;

/// A ChaCha generator on one of the named sub-streams of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

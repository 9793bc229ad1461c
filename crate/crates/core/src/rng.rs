//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator seeded from
//! a `u64` and pinned to a numbered stream. One master seed therefore fans out
//! into independent, reproducible streams without any global state:
//!
//! * the fixed network weights use [`STREAM_FIXED_WEIGHTS`] of the master seed;
//! * training run `i` uses `run_seed(master, i)`, with the class measurement on
//!   [`STREAM_WHEEL`] and the label draw on [`STREAM_LABEL`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_FIXED_WEIGHTS: u64 = 0;
pub const STREAM_WHEEL: u64 = 1;
pub const STREAM_LABEL: u64 = 2;
pub const STREAM_CLASSICAL_WALK: u64 = 3;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `index`-th run derived from a master seed.
pub fn run_seed(master: u64, index: u64) -> u64 {
    mix(master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

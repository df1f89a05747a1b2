//! Counter-based random streams.
//!
//! Every random quantity in the crate is addressed by `(seed, stream, word
//! position)` on a ChaCha8 keystream, so any draw can be reproduced without
//! replaying the draws before it. Streams partition the uses:
//! point clouds, oracle samples and per-episode coins never share words.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for point-cloud coordinates.
pub const STREAM_CLOUD: u64 = 0;
/// Stream for boundary-angle samples of the envelope oracle.
pub const STREAM_ORACLE: u64 = 1;
/// Stream for game coins. Episodes get distinct seeds via [`derive_seed`].
pub const STREAM_GAME: u64 = 2;
/// Stream for randomized experiment data (random datum pairs, query points).
pub const STREAM_AUX: u64 = 3;

/// A ChaCha8 generator positioned at the start of `stream` for `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Positions `rng` so that the next `next_u64` returns the `index`-th 64-bit word.
pub fn seek_u64(rng: &mut ChaCha8Rng, index: u64) {
    rng.set_word_pos(2 * u128::from(index));
}

/// Maps 64 random bits to a double in `[0, 1)` using the top 53 bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Next uniform double in `[0, 1)`.
#[inline]
pub fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    unit_f64(rng.next_u64())
}

/// SplitMix64 finalizer, used to derive child seeds.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for item `index` of a family keyed by `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

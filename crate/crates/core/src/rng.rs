//! Seeded random streams.
//!
//! Every random draw in the crate comes from [`SimRng`], ChaCha with 8 rounds
//! as published in `rand_chacha`. A master seed is expanded with
//! `seed_from_u64`; independent substreams are selected with ChaCha's 64-bit
//! stream id, so trial `t` of lane `l` always sees the same sequence no matter
//! which thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for a plain seed.
pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Substream `(trial, lane)` of `master_seed`.
///
/// The stream id packs the lane into the top 16 bits and the trial index into
/// the low 48 bits.
pub fn substream(master_seed: u64, trial: u64, lane: u16) -> SimRng {
    debug_assert!(trial < (1 << 48));
    let mut rng = seeded(master_seed);
    rng.set_stream(((lane as u64) << 48) | (trial & ((1 << 48) - 1)));
    rng
}

/// Mix a master seed with a list of tags (SplitMix64 finalizer per step), for
/// seeding independent cells of an experiment grid.
pub fn derive_seed(master_seed: u64, tags: &[u64]) -> u64 {
    let mut h = master_seed;
    for &t in tags {
        h = splitmix64(h ^ splitmix64(t));
    }
    h
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

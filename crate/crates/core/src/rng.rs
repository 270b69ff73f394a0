//! Replica random streams.
//!
//! Replica `r` of a run with master seed `s` draws from ChaCha8 keyed by
//! four SplitMix64 outputs seeded with `s`, on stream `r`. Streams never
//! overlap, so replicas are independent and each one is reproducible on
//! its own, whatever order they are scheduled in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// One SplitMix64 step: advances `state` and returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key_from_seed(master_seed: u64) -> [u8; 32] {
    let mut state = master_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Generator for replica `replica` under `master_seed`.
pub fn replica_rng(master_seed: u64, replica: u64) -> SimRng {
    let mut rng = ChaCha8Rng::from_seed(key_from_seed(master_seed));
    rng.set_stream(replica);
    rng
}

/// Derives an independent master seed for a named sub-task (one experiment
/// cell, one graph instance) so that cells do not share streams.
pub fn derive_seed(master_seed: u64, tag: u64) -> u64 {
    let mut state = master_seed ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03);
    splitmix64(&mut state)
}

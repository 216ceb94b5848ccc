//! Seed derivation for independent, schedule-free random substreams.
//!
//! Every randomized routine in this crate draws from a ChaCha stream whose
//! seed is derived from a master seed plus a fixed tag path (stream id,
//! replicate, row, ...). Work items therefore own disjoint streams and the
//! same seeds reproduce the same numbers no matter how work is scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const STREAM_BOOT_ROW: u64 = 0xB001;
pub(crate) const STREAM_SIM_DATA: u64 = 0xDA7A;
pub(crate) const STREAM_SIM_BOOT: u64 = 0x5EED;

/// SplitMix64 finalizer; full avalanche on 64 bits.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a tag path.
///
/// Different tag paths give (for all practical purposes) independent seeds;
/// the same path always gives the same seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = mix64(master ^ 0x9E37_79B9_7F4A_7C15);
    for &tag in tags {
        state = mix64(state ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1));
    }
    state
}

/// ChaCha stream for a given tag path under a master seed.
pub fn substream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tags))
}

//! Stream derivation for reproducible randomness.
//!
//! Every random draw in a run comes from a ChaCha8 stream keyed by the run
//! seed plus a domain tag and indices, so results do not depend on the order
//! in which generations are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const TRACE_DOMAIN: u64 = 0x7472_6163_6500_0001;
pub(crate) const DATA_DOMAIN: u64 = 0x6461_7461_0000_0002;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(parent: u64, index: u64) -> u64 {
    mix(parent ^ mix(index))
}

pub fn rng_for(parent: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(parent, index))
}

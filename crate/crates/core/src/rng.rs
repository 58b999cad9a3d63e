//! Seed derivation. Every random stream in the simulator is a ChaCha8
//! generator keyed by a base seed plus a stream id, so results are
//! reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream ids separating independent randomness sources of one episode.
pub mod stream {
    pub const GRAPH: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const POLICY: u64 = 3;
    pub const PERMUTATION: u64 = 4;
    pub const LABELS: u64 = 5;
}

pub fn seeded(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-node policy generator; node `i` always gets the same stream for a
/// given policy seed.
pub fn node_rng(policy_seed: u64, node: usize) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(policy_seed);
    rng.set_stream((stream::POLICY << 32) | node as u64);
    rng
}

/// SplitMix64 finalizer, used to derive sub-seeds.
pub fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

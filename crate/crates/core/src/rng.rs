//! Seeded pseudo-random number generation.
//!
//! Every stochastic step in the pipeline draws from [`Prng`], which is
//! xoshiro256++ seeded through SplitMix64. Both algorithms are fully
//! specified, so a given seed yields the same stream on every platform.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Prng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

/// Derives a child seed from a parent seed and a string key (FNV-1a over the
/// key, finalized with the SplitMix64 mixer).
pub fn derive_seed(seed: u64, key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix(seed ^ splitmix(h))
}

pub fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

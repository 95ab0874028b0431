//! Named random streams.
//!
//! All randomness flows from one user seed. Each consumer derives its own
//! stream as `hash(seed, label, index...)`, so results do not depend on the
//! order in which independent consumers run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derives a 64-bit seed for the stream named `label` with extra indices.
pub fn derive(seed: u64, label: &str, indices: &[u64]) -> u64 {
    let mut h = mix64(seed ^ mix64(label_hash(label)));
    for &i in indices {
        h = mix64(h.wrapping_add(GOLDEN) ^ mix64(i.wrapping_add(GOLDEN)));
    }
    h
}

/// Sequential generator for the named stream.
pub fn rng(seed: u64, label: &str, indices: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, label, indices))
}

/// Counter-based uniform draw in `[0, 1)`.
///
/// The value depends only on the key, never on evaluation order, which is what
/// lets per-color sampling run in any order (or in parallel) and still produce
/// the same result.
pub fn unit(key: u64, a: u64, b: u64) -> f64 {
    let h = mix64(key ^ mix64(a.wrapping_mul(GOLDEN) ^ mix64(b.wrapping_add(0x632B_E59B_D9B4_E019))));
    // top 53 bits
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

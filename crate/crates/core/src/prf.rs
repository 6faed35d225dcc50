//! Counter-based pseudorandom function.
//!
//! Every random decision in the crate (hierarchy offsets, block coins,
//! configuration symbols) is a pure function of a seed and a tuple of
//! integer coordinates, so any window of an infinite random object can be
//! evaluated without materializing the rest of it.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash `seed` together with an ordered key tuple.
#[inline]
pub fn prf(seed: u64, key: &[i64]) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    for (i, &k) in key.iter().enumerate() {
        h = mix64(h ^ (k as u64).wrapping_add(GOLDEN.wrapping_mul(i as u64 + 1)));
    }
    mix64(h ^ key.len() as u64)
}

/// A uniform draw in `[0, 1)` keyed like [`prf`].
#[inline]
pub fn prf_unit(seed: u64, key: &[i64]) -> f64 {
    (prf(seed, key) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Child seed for an independent substream.
#[inline]
pub fn split(seed: u64, stream: u64) -> u64 {
    prf(seed, &[stream as i64, 0x5eed])
}

//! Stateless live/dead coins for coupled live-edge sampling.
//!
//! The coin for `(seed, sample, edge)` depends on nothing else, so a sample
//! rebuilt from scratch on an augmented graph sees exactly the coins that the
//! incremental path saw, and the order in which workers visit samples is
//! irrelevant.

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-sample key; hoisted out of edge loops.
#[inline]
pub fn sample_key(seed: u64, sample: u32) -> u64 {
    splitmix64(seed ^ splitmix64(u64::from(sample) ^ 0x6a09_e667_f3bc_c908))
}

/// Uniform draw in `[0, 1)` for the edge between original ids `a < b`.
#[inline]
pub fn edge_coin(sample_key: u64, a: u64, b: u64) -> f64 {
    let h = splitmix64(sample_key ^ splitmix64(a.wrapping_mul(0xff51_afd7_ed55_8ccd) ^ b));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
pub fn coin(seed: u64, sample: u32, a: u64, b: u64) -> f64 {
    edge_coin(sample_key(seed, sample), a, b)
}

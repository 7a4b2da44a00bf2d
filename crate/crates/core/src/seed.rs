//! Seed derivation for reproducible, refactoring-stable random streams.
//!
//! A derived seed is a chain of SplitMix64 finalizers:
//!
//! ```text
//! h ← mix(master)
//! h ← mix(h ⊕ fnv1a64(tag))
//! h ← mix(h ⊕ w)            for each coordinate word w
//! ```
//!
//! so every (master, tag, coordinates) triple owns an independent stream and
//! adding or removing other draws never shifts it.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

pub fn derive_seed(master: u64, tag: &str, coords: &[u64]) -> u64 {
    let mut h = mix64(mix64(master) ^ fnv1a64(tag.as_bytes()));
    for &w in coords {
        h = mix64(h ^ w);
    }
    h
}

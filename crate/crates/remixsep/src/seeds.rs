//! Deterministic seed derivation. Every random decision in the crate flows
//! from one root seed through labelled derivations, so runs are reproducible
//! and subsystems cannot steal entropy from each other.

/// Derive a child seed from `root` with a label and numeric context.
/// FNV-1a over the label and context, finished with a splitmix64 mix.
pub fn derive(root: u64, label: &str, nums: &[u64]) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = FNV_OFFSET;
    for &b in root.to_le_bytes().iter() {
        h = (h ^ b as u64).wrapping_mul(FNV_PRIME);
    }
    for &b in label.as_bytes() {
        h = (h ^ b as u64).wrapping_mul(FNV_PRIME);
    }
    for &n in nums {
        for &b in n.to_le_bytes().iter() {
            h = (h ^ b as u64).wrapping_mul(FNV_PRIME);
        }
    }
    splitmix64(h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a hash of a byte string, used for config fingerprints.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

//! Counter-based seed streams: every (run, purpose) pair gets its own seed,
//! so adding work never shifts the randomness of existing work.

/// Stream tags.
pub const SPLIT: u64 = 1;
pub const COSTS: u64 = 2;
pub const FOLDS: u64 = 3;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, run: u64, tag: u64) -> u64 {
    splitmix(splitmix(splitmix(master) ^ run) ^ tag.rotate_left(32))
}

//! Seed derivation.
//!
//! Every random stream is derived from one root seed so that any stage can
//! be re-run on its own. A child seed is `splitmix64(root ^ splitmix64(stage
//! * GOLDEN + index))`; stage constants are listed in [`Stage`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Pipeline stages that consume randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    Generate = 1,
    Sample = 2,
    Split = 3,
    Train = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `index`-th use of `stage` under `root`.
pub fn derive(root: u64, stage: Stage, index: u64) -> u64 {
    splitmix64(root ^ splitmix64((stage as u64).wrapping_mul(GOLDEN).wrapping_add(index)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Seeded counter-based random streams.
//!
//! Every random draw comes from a ChaCha8 stream selected by a master seed, a
//! [`Purpose`] tag and an index, so replicate `r` of a computation sees the
//! same numbers whatever thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a random stream is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    Latents = 1,
    Edges = 2,
    Rewire = 3,
    Subsample = 4,
    Replicate = 5,
    Lattice = 6,
    Attachment = 7,
}

/// Independent stream for `(seed, purpose, index)`.
pub fn substream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 56) ^ (index & ((1 << 56) - 1)));
    rng
}

/// Derives a child seed, used when one seeded routine drives another.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

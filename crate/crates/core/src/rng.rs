//! Counter-based stream derivation.
//!
//! Every random decision in a run is drawn from a ChaCha stream keyed by the
//! master seed plus a tuple of tags (chromosome, month, sample index, ...),
//! so results never depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const TAG_SAMPLES: u64 = 0x5341_4d50;
pub(crate) const TAG_SPIN: u64 = 0x5350_494e;
pub(crate) const TAG_GA: u64 = 0x4741_4741;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `tags` into `master`, order-sensitively.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Key for a chromosome, stable across runs and platforms.
pub fn bits_key(bits: &[bool]) -> u64 {
    let mut acc = splitmix64(bits.len() as u64);
    for chunk in bits.chunks(64) {
        let word = chunk
            .iter()
            .enumerate()
            .fold(0u64, |w, (i, &b)| w | (u64::from(b) << i));
        acc = splitmix64(acc ^ word);
    }
    acc
}

/// Independent stream: the key selects the ChaCha seed, `stream` the
/// ChaCha stream id within it.
pub fn stream(master: u64, tags: &[u64], stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, tags));
    rng.set_stream(stream);
    rng
}

//! Seeded randomness.
//!
//! Every stochastic step draws from [`Rng`], ChaCha with 8 rounds, whose
//! output stream is fixed across platforms. Independent streams for a
//! method and run are derived with [`derive_seed`].

use rand::SeedableRng;
use sha2::{Digest, Sha256};

pub type Rng = rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Derives a child seed from `(master, label, index)`.
///
/// The child is the first eight bytes, little endian, of
/// `SHA-256("{master}:{label}:{index}")`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let digest = Sha256::digest(format!("{master}:{label}:{index}").as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

//! Named random sub-streams.
//!
//! Every stream is a ChaCha20 generator keyed by
//! `SHA-256(seed as u64 LE || label bytes || 0x00 || index as u64 LE ...)`.
//! ChaCha is counter-based, so a stream's output depends only on its key and
//! never on how many other streams were drawn before it. Monte-Carlo workers
//! can therefore derive `(seed, "noise", [trial, snr_idx])` independently and
//! merge their counts in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha20Rng;

/// Derives the generator for `(seed, label, indices)`.
pub fn substream(seed: u64, label: &str, indices: &[u64]) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    for i in indices {
        hasher.update(i.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha20Rng::from_seed(key)
}

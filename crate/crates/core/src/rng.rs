//! Random streams and reproducible seed derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The random stream used by every run and oracle in this crate.
pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

/// Derives a child seed from a parent seed and a label.
///
/// The label namespaces the child so that, for instance, the hidden target of
/// a run and the algorithm's own stream never coincide.
pub fn derive_seed(parent: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"lambda-ga/derive");
    hasher.update(parent.to_le_bytes());
    hasher.update(label.as_bytes());
    first_u64(&hasher.finalize())
}

/// Seed of replicate `replicate` of `algorithm` at size `n`.
///
/// Depends only on its four inputs, so adding replicates or sizes never
/// changes the seeds of existing runs.
pub fn run_seed(base_seed: u64, algorithm: &str, n: usize, replicate: usize) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"lambda-ga/run");
    hasher.update(base_seed.to_le_bytes());
    hasher.update((algorithm.len() as u64).to_le_bytes());
    hasher.update(algorithm.as_bytes());
    hasher.update((n as u64).to_le_bytes());
    hasher.update((replicate as u64).to_le_bytes());
    first_u64(&hasher.finalize())
}

fn first_u64(digest: &[u8]) -> u64 {
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

//! Deterministic stream derivation for parallel Monte Carlo.
//!
//! A `SeedTree` node owns a 256-bit state. Children are derived by hashing
//! (state, purpose, index), so any (master seed, path) pair names the same
//! stream no matter which thread asks for it or in which order. Sibling
//! streams are independent for all practical purposes because they differ
//! by a full SHA-256 application.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Random stream handed to simulation kernels.
pub type Stream = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedTree {
    state: [u8; 32],
}

// Domain tags keep child derivation and stream extraction from colliding.
const TAG_CHILD: u8 = 0x00;
const TAG_STREAM: u8 = 0x01;

impl SeedTree {
    pub fn new(master_seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"seed-tree-root");
        h.update(master_seed.to_le_bytes());
        Self { state: h.finalize().into() }
    }

    /// Derive the child at (purpose, index). Same arguments, same child.
    pub fn child(&self, purpose: &str, index: u64) -> Self {
        let mut h = Sha256::new();
        h.update(self.state);
        h.update([TAG_CHILD]);
        h.update((purpose.len() as u64).to_le_bytes());
        h.update(purpose.as_bytes());
        h.update(index.to_le_bytes());
        Self { state: h.finalize().into() }
    }

    /// Random stream for this node. Repeatable; does not advance the tree.
    pub fn stream(&self) -> Stream {
        let mut h = Sha256::new();
        h.update(self.state);
        h.update([TAG_STREAM]);
        let seed: [u8; 32] = h.finalize().into();
        ChaCha8Rng::from_seed(seed)
    }
}

//! Named, hash-derived random streams.
//!
//! A stream is 32 bytes of seed material. Children are derived as
//! `SHA-256(parent ‖ len(label) as u64 LE ‖ label)`, so a stream depends only on
//! its path from the master seed (e.g. `master / "rep" / 3 / "noise"`) and never
//! on scheduling. Each stream seeds a `ChaCha12Rng`.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    material: [u8; 32],
}

impl SeedStream {
    pub fn from_master(master_seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"rfm-master");
        h.update(master_seed.to_le_bytes());
        Self {
            material: h.finalize().into(),
        }
    }

    pub fn child(&self, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(self.material);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        Self {
            material: h.finalize().into(),
        }
    }

    pub fn child_index(&self, index: u64) -> Self {
        self.child(&index.to_string())
    }

    /// Stream of repetition `rep` under a master seed.
    pub fn for_rep(master_seed: u64, rep: usize) -> Self {
        Self::from_master(master_seed).child("rep").child_index(rep as u64)
    }

    pub fn rng(&self) -> ChaCha12Rng {
        ChaCha12Rng::from_seed(self.material)
    }

    /// First eight bytes of the seed material, little endian.
    pub fn as_u64(&self) -> u64 {
        let mut b = [0u8; 8];
        b.copy_from_slice(&self.material[..8]);
        u64::from_le_bytes(b)
    }
}

/// Substream labels used per repetition.
pub mod streams {
    pub const DESIGN: &str = "design";
    pub const NOISE: &str = "noise";
    pub const SPLIT: &str = "split";
    pub const COEFFS: &str = "coeffs";
    pub const TRAIN: &str = "train";
}

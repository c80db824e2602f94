//! Deterministic, splittable random streams.
//!
//! A [`Streams`] node is a 256-bit ChaCha key derived by hashing the master
//! seed together with a path of tags. Children are derived by extending the
//! path, and indexed work items (trials, repetitions) use the ChaCha stream
//! id, so every consumer sees the same numbers regardless of thread count or
//! evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Streams {
    key: [u8; 32],
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self::hash(b"qpurify/root", &seed.to_le_bytes())
    }

    fn hash(parent: &[u8], tag: &[u8]) -> Self {
        let mut hasher = Sha256::new();
        hasher.update((parent.len() as u64).to_le_bytes());
        hasher.update(parent);
        hasher.update(tag);
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        Self { key }
    }

    pub fn child(&self, tag: &str) -> Self {
        Self::hash(&self.key, tag.as_bytes())
    }

    pub fn child_index(&self, index: u64) -> Self {
        Self::hash(&self.key, &index.to_le_bytes())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key)
    }

    /// Independent generator for work item `index`.
    pub fn item(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

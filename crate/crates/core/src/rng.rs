//! Seed discipline: one master seed fans out into independent named streams.
//!
//! Each stream is a ChaCha8 generator keyed by the master seed and a stream id
//! derived from a label and an index, so adding a consumer never shifts the
//! numbers another consumer sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        SeedTree { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn stream(&self, label: &str, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(stream_id(label, index));
        rng
    }

    /// A derived seed tree, for handing a whole sub-experiment its own master.
    pub fn child(&self, label: &str, index: u64) -> SeedTree {
        use rand::Rng;
        SeedTree::new(self.stream(label, index).random())
    }
}

fn stream_id(label: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(label.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

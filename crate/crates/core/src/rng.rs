//! Deterministic random streams.
//!
//! Every Monte Carlo draw in the crate comes from an [`RngStream`] keyed by a
//! master seed and a label (typically a trial or sweep-point index), so results
//! never depend on how work is split across threads.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream { master_seed, stream_id }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream for a sub-task, keyed by label.
    pub fn child(&self, label: impl AsRef<[u8]>) -> RngStream {
        let mut bytes = self.stream_id.to_le_bytes().to_vec();
        bytes.extend_from_slice(label.as_ref());
        derive_stream(self.master_seed, bytes)
    }
}

/// Maps `(master_seed, label)` to a stream. The label is hashed with SHA-256
/// together with the seed, so distinct labels land on distinct ChaCha streams.
pub fn derive_stream(master_seed: u64, label: impl AsRef<[u8]>) -> RngStream {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(label.as_ref());
    let digest = hasher.finalize();
    let mut id = [0u8; 8];
    id.copy_from_slice(&digest[..8]);
    RngStream::new(master_seed, u64::from_le_bytes(id))
}

/// One CN(0, p) sample: `(a + jb)·sqrt(p/2)` with `a, b` standard normal.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R, power: f64) -> Complex64 {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex64::new(a, b) * (power / 2.0).sqrt()
}

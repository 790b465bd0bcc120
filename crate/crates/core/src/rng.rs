//! Seedable, splittable random streams.
//!
//! Every randomized operation in the crate takes a stream explicitly.  A stream
//! can be derived from a `(seed, label)` pair or `(seed, index)` pair so that
//! concurrent workers can each own an independent child.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha20Rng,
}

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Stream number `index` under `seed`; distinct indices never overlap.
    pub fn indexed(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(index.wrapping_add(1));
        Self { inner }
    }

    /// Stream named by a label under `seed`.
    pub fn named(seed: u64, label: &str) -> Self {
        Self::indexed(seed, fnv1a(label))
    }

    /// Child stream seeded from this one; advances `self`.
    pub fn split(&mut self) -> Self {
        let mut seed = [0u8; 32];
        self.inner.fill_bytes(&mut seed);
        Self {
            inner: ChaCha20Rng::from_seed(seed),
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

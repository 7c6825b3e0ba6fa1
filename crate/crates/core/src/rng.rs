//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator keyed from a 64-bit seed. Child
//! streams are derived by mixing the parent seed with a label through
//! SplitMix64, so each component of an optimizer draws from its own stream
//! and changing how many numbers one component consumes never shifts the
//! draws of another. ChaCha output is specified bit-for-bit, which makes
//! runs identical across platforms.

use rand::{Error as RandError, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One step of SplitMix64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives an independent stream. The result depends only on this
    /// stream's seed and `label`, never on how many values were drawn.
    pub fn child(&self, label: u64) -> RngStream {
        RngStream::new(splitmix64(
            self.seed ^ splitmix64(label.wrapping_add(0x5851_F42D_4C95_7F2D)),
        ))
    }

    /// Convenience for labelling children with short names.
    pub fn child_named(&self, label: &str) -> RngStream {
        let mut h: u64 = 0xCBF2_9CE4_8422_2325;
        for b in label.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01B3);
        }
        self.child(h)
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

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.inner.try_fill_bytes(dest)
    }
}

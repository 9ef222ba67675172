//! Seeded random streams.
//!
//! Every run starts from one `u64`. Sub-seeds come from splitmix64 applied to
//! `(seed, label)`, and each block of work draws from its own ChaCha8 stream,
//! so the draws seen by block `b` never depend on which worker ran it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type BlockRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for the component named by `label`.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ label.wrapping_mul(0xd134_2543_de82_ef95))
}

/// The generator for block `block` of a run seeded with `seed`.
pub fn stream(seed: u64, block: u64) -> BlockRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

pub trait RngExt: Rng {
    /// Uniform on `[lo, hi)`.
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.random::<f64>()
    }

    fn normal(&mut self) -> f64 {
        self.sample(StandardNormal)
    }

    /// Fisher–Yates: every permutation of `xs` equally likely.
    fn shuffle_in_place<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.random_range(0..=i);
            xs.swap(i, j);
        }
    }
}

impl<R: Rng + ?Sized> RngExt for R {}

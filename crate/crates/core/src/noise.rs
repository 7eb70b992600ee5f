//! Counter-addressed Gaussian noise.
//!
//! Every normal is a pure function of `(seed, step, node, index)`, so a run is
//! reproducible regardless of how many steps are rejected and refined, and two
//! coupled runs see bitwise identical increments.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use std::f64::consts::TAU;

/// Bridge nodes live below `2^41`; steps use the remaining stream bits.
const NODE_BITS: u32 = 41;

/// Deterministic source of standard normals addressed by step and bridge node.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    base: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Fills `out` with the normals of `(step, node)`; entry `i` depends only
    /// on `(seed, step, node, i)`.
    pub fn normals(&self, step: u64, node: u64, out: &mut [f64]) {
        debug_assert!(node < 1 << NODE_BITS);
        let mut rng = self.base.clone();
        rng.set_stream((step << NODE_BITS) | node);
        rng.set_word_pos(0);
        for z in out.iter_mut() {
            *z = box_muller(rng.next_u64(), rng.next_u64());
        }
    }
}

fn box_muller(x: u64, y: u64) -> f64 {
    let scale = 1.0 / (1u64 << 53) as f64;
    let u1 = ((x >> 11) + 1) as f64 * scale;
    let u2 = (y >> 11) as f64 * scale;
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

//! xoshiro256++ seeded through splitmix64, with Box–Muller normals.

use std::f64::consts::PI;

use crate::numerics::Matrix;

/// Purpose tags mixed into the run seed so independent streams never overlap.
pub mod purpose {
    pub const CRITIC_INIT: u64 = 0x4352_4954_0000_0000;
    pub const GENERATOR_INIT: u64 = 0x4745_4E00_0000_0000;
    pub const TRAIN: u64 = 0x5452_4E00_0000_0000;
    pub const EMD: u64 = 0x454D_4400_0000_0000;
    pub const VERIFY: u64 = 0x5652_4659_0000_0000;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic pseudo-random stream. Exclusively owned by one consumer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngState {
    seed: u64,
    s: [u64; 4],
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        RngState { seed, s }
    }

    /// Sub-stream for `(seed ⊕ tag, index)`; `index` distinguishes e.g. training
    /// iterations within one purpose.
    pub fn derive(seed: u64, tag: u64, index: u64) -> Self {
        RngState::new(seed ^ tag ^ index.wrapping_mul(GOLDEN))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n` (unbiased, rejection on the top range).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// `n` i.i.d. standard normal draws. Both Box–Muller outputs are used; for
    /// odd `n` the final spare is discarded.
    pub fn standard_normal(&mut self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        while out.len() < n {
            // 1 - U lies in (0, 1], keeping ln finite.
            let u1 = 1.0 - self.uniform();
            let u2 = self.uniform();
            let r = (-2.0 * u1.ln()).sqrt();
            let theta = 2.0 * PI * u2;
            out.push(r * theta.cos());
            out.push(r * theta.sin());
        }
        out.truncate(n);
        out
    }

    pub fn normal_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let data = self.standard_normal(rows * cols);
        Matrix::from_vec(rows, cols, data).expect("Box-Muller output is finite")
    }

    /// Raw generator state, for checkpointing.
    pub fn state(&self) -> [u64; 4] {
        self.s
    }

    pub fn from_state(seed: u64, s: [u64; 4]) -> Self {
        RngState { seed, s }
    }
}

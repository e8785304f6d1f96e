//! Counter-based random stream.
//!
//! Each stream is a SplitMix64 sequence: the state advances by the odd
//! constant `GAMMA` per draw and the output is the SplitMix64 finalizer of
//! the state. Stream `s` of seed `k` starts at counter `s · 2³²` relative to
//! `mix(k)`, so streams occupy disjoint counter ranges (up to 2³² draws
//! each) and, because the finalizer is a bijection, never emit the same
//! 64-bit word. Uniforms use the top 53 bits offset by half an ulp, so they
//! lie strictly inside (0, 1). Normals come from the Box-Muller transform,
//! both outputs used in order (cos branch first).

use serde::{Deserialize, Serialize};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_STRIDE: u64 = 1 << 32;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    counter: u64,
    #[serde(skip)]
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self {
            seed,
            stream_id,
            counter: 0,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 64-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        let position = self
            .stream_id
            .wrapping_mul(STREAM_STRIDE)
            .wrapping_add(self.counter)
            .wrapping_add(1);
        self.counter += 1;
        mix64(mix64(self.seed).wrapping_add(position.wrapping_mul(GAMMA)))
    }

    /// Uniform draw in the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` (`n > 0`), by rejection to avoid modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// `count` standard normal draws from `rng`.
pub fn standard_normals(rng: &mut RngStream, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.normal()).collect()
}

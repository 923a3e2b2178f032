//! Counter-based random streams.
//!
//! Every random quantity is addressed by `(seed, stream, index)`: the value
//! attached to edge `i` never depends on how many other edges were drawn or
//! in which order, so environments are reproducible across thread counts.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Stream tags for the environment operators.
pub mod streams {
    pub const BASE_FIELD: u64 = 0;
    pub const RESAMPLE_COIN: u64 = 1;
    pub const RESAMPLE_FIELD: u64 = 2;
    pub const BOOTSTRAP: u64 = 3;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a coordinate path such as
/// `(experiment kind, grid point, replicate)`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix(master), |acc, &c| splitmix(acc ^ splitmix(c.wrapping_add(GOLDEN))))
}

/// Sequential reader over one `(seed, stream)` pair starting at `index`.
pub struct CounterStream {
    rng: ChaCha8Rng,
}

impl CounterStream {
    pub fn new(seed: u64, stream: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        // One u64 consumes two 32-bit words; each index owns two u64 draws.
        rng.set_word_pos(u128::from(index) * 4);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1).
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Box-Muller from two fresh uniforms, so one Gaussian per index.
    pub fn next_gaussian(&mut self) -> f64 {
        let u = self.next_open01();
        let v = self.next_open01();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }
}

pub fn uniform_at(seed: u64, stream: u64, index: u64) -> f64 {
    CounterStream::new(seed, stream, index).next_open01()
}

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Φ.
pub fn standard_normal_cdf(x: f64) -> f64 {
    standard_normal().cdf(x)
}

/// 1 - Φ, accurate in the upper tail.
pub fn standard_normal_sf(x: f64) -> f64 {
    standard_normal().sf(x)
}

/// Φ⁻¹, polished by Newton steps against the CDF.
pub fn standard_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let normal = standard_normal();
    let mut x = normal.inverse_cdf(p);
    for _ in 0..2 {
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if density < 1e-300 {
            break;
        }
        let step = (normal.cdf(x) - p) / density;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

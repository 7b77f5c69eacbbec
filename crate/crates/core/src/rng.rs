//! Seeded random streams.
//!
//! Every randomized candidate (a sample, a restart, an instance) draws from
//! its own ChaCha stream keyed by `(master seed, candidate index)`. Results
//! therefore do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use num_complex::Complex64;

pub type Rng = ChaCha8Rng;

/// Independent stream number `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Two-level index, used for (dimension, sample) pairs.
pub fn substream2(seed: u64, outer: u64, inner: u64) -> Rng {
    substream(seed, (outer << 32) | (inner & 0xffff_ffff))
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_normal(rng: &mut Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn real_normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

//! Primitive samplers.
//!
//! Every catalog sampler is built from these routines so that a fixed seed
//! reproduces samples bit-exactly across runs and across parallel/serial
//! execution. The generator is ChaCha8 (counter-based, 64-bit seedable);
//! draws consume a deterministic number of uniforms except for the gamma
//! rejection sampler, whose accept/reject loop is itself a deterministic
//! function of the stream.

use rand::Rng as _;
use rand::SeedableRng;

/// The crate-wide random number generator.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Construct the generator for a given 64-bit seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Uniform draw on [0, 1).
#[inline]
pub fn uniform01(rng: &mut Rng) -> f64 {
    rng.random::<f64>()
}

/// Uniform draw on (0, 1], safe as a logarithm argument.
#[inline]
pub fn uniform01_open_left(rng: &mut Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Standard normal via Box-Muller. Consumes exactly two uniforms; the sine
/// companion is discarded to keep the draw count per variate fixed.
#[inline]
pub fn standard_normal(rng: &mut Rng) -> f64 {
    let u1 = uniform01_open_left(rng);
    let u2 = uniform01(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Standard Cauchy via the inverse CDF.
#[inline]
pub fn standard_cauchy(rng: &mut Rng) -> f64 {
    (std::f64::consts::PI * (uniform01(rng) - 0.5)).tan()
}

/// Unit-rate exponential via the inverse CDF.
#[inline]
pub fn standard_exponential(rng: &mut Rng) -> f64 {
    -uniform01_open_left(rng).ln()
}

/// Gamma(shape, 1) by the Marsaglia-Tsang squeeze method, with the usual
/// power-of-uniform boost for shape < 1.
pub fn standard_gamma(rng: &mut Rng, shape: f64) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let u = uniform01_open_left(rng);
        return standard_gamma(rng, shape + 1.0) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = standard_normal(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = uniform01_open_left(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Beta(a, b) as a ratio of gammas.
pub fn standard_beta(rng: &mut Rng, a: f64, b: f64) -> f64 {
    let x = standard_gamma(rng, a);
    let y = standard_gamma(rng, b);
    x / (x + y)
}

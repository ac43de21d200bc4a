//! Seeded white Gaussian noise stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::NoiseSpec;

/// `n` i.i.d. draws from N(mean, std^2); identical (spec, n) gives an
/// identical vector. A zero std yields a constant vector.
pub fn gaussian_noise(n: usize, spec: &NoiseSpec) -> Vec<f64> {
    assert!(n >= 1, "noise length must be at least 1");
    if spec.std == 0.0 {
        return vec![spec.mean; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(spec.mean, spec.std).expect("finite noise parameters");
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

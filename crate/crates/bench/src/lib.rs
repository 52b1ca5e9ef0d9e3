//! Fixtures shared by the benchmarks.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use srl_core::rng::stream;
use srl_core::{Dataset, Family};

/// Uniform features with a sparse main-plus-interaction signal and unit noise.
pub fn interaction_dataset(n: usize, p: usize, seed: u64) -> Dataset {
    let mut rng = stream(seed, &[0]);
    let x = Array2::from_shape_fn((n, p), |_| rng.random::<f64>());
    let y = Array1::from_shape_fn(n, |i| {
        let r = x.row(i);
        3.0 * r[0] - 2.0 * r[1] + 4.0 * r[0] * r[2] + rng.sample::<f64, _>(StandardNormal)
    });
    Dataset::with_default_names(y, x, Family::Gaussian).expect("valid fixture")
}

use rand::Rng;
use rand_distr::StandardNormal;

use super::Tensor;
use crate::rng::Prng;

/// Uniform Glorot initialization for a `[fan_in x fan_out]` matrix. Extra
/// leading dimensions (e.g. conv kernels) are passed through `shape`.
pub fn glorot_uniform(shape: &[usize], fan_in: usize, fan_out: usize, rng: &mut Prng) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let n: usize = shape.iter().product();
    let data = (0..n).map(|_| rng.random_range(-limit..limit)).collect();
    Tensor::from_vec(shape, data).expect("shape product matches")
}

/// A random `n x n` orthogonal matrix (Gram-Schmidt on Gaussian rows).
pub fn orthogonal(n: usize, rng: &mut Prng) -> Vec<f64> {
    let mut m: Vec<f64> = (0..n * n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    for i in 0..n {
        for j in 0..i {
            let dot: f64 = (0..n).map(|k| m[i * n + k] * m[j * n + k]).sum();
            for k in 0..n {
                m[i * n + k] -= dot * m[j * n + k];
            }
        }
        let norm = (0..n).map(|k| m[i * n + k].powi(2)).sum::<f64>().sqrt();
        for k in 0..n {
            m[i * n + k] /= norm;
        }
    }
    m
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

/// Unit over which paired scores are compared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    #[default]
    Move,
    Fold,
}

/// Two-sided paired sign-flip permutation test on the mean of `a - b`.
/// Returns `(count + 1) / (iterations + 1)` where `count` is the number of
/// random sign assignments whose absolute mean difference reaches the
/// observed one.
pub fn permutation_test(a: &[f64], b: &[f64], iterations: usize, seed: u64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Validation(format!("paired scores of lengths {} and {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let observed = d.iter().sum::<f64>().abs();
    // sums are compared instead of means; a small slack absorbs rounding
    let threshold = observed - 1e-9;
    let mut rng = seeded(seed);
    let mut count = 0usize;
    for _ in 0..iterations {
        let s: f64 = d.iter().map(|v| if rng.random::<bool>() { *v } else { -*v }).sum();
        if s.abs() >= threshold {
            count += 1;
        }
    }
    Ok((count + 1) as f64 / (iterations + 1) as f64)
}

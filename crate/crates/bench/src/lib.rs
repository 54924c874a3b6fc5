//! Shared inputs for the criterion benchmarks.

use argmine_core::corpus::{generate_synthetic, Corpus, SynthConfig};
use argmine_core::rng::seeded;
use argmine_core::tensor::Tensor;
use rand::Rng;

/// A small seeded corpus: `n` transcripts of about 20 moves.
pub fn corpus(n: usize) -> Corpus {
    generate_synthetic(&SynthConfig {
        n_transcripts: n,
        seed: 42,
        ..SynthConfig::default()
    })
    .expect("valid synthetic config")
}

/// `[rows x cols]` tensor of uniform values in [-1, 1).
pub fn random_tensor(rows: usize, cols: usize, seed: u64) -> Tensor {
    let mut rng = seeded(seed);
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    Tensor::from_vec(&[rows, cols], data).expect("shape matches data")
}

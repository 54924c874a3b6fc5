use serde::{Deserialize, Serialize};

use super::Parameter;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam with bias correction. Moment buffers are created on the first step
/// and matched to parameters by position.
#[derive(Clone, Debug)]
pub struct Adam {
    pub config: AdamConfig,
    t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(config: AdamConfig) -> Self {
        Adam {
            config,
            t: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [&mut Parameter]) {
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.v = self.m.clone();
        }
        debug_assert_eq!(self.m.len(), params.len());
        self.t += 1;
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        let c1 = 1.0 - beta1.powi(self.t as i32);
        let c2 = 1.0 - beta2.powi(self.t as i32);
        for ((p, m), v) in params.iter_mut().zip(&mut self.m).zip(&mut self.v) {
            let grad = p.grad.data().to_vec();
            for (((w, g), mi), vi) in p.value.data_mut().iter_mut().zip(&grad).zip(m.iter_mut()).zip(v.iter_mut()) {
                if *g == 0.0 && *mi == 0.0 && *vi == 0.0 {
                    continue;
                }
                *mi = beta1 * *mi + (1.0 - beta1) * g;
                *vi = beta2 * *vi + (1.0 - beta2) * g * g;
                *w -= lr * (*mi / c1) / ((*vi / c2).sqrt() + eps);
            }
        }
    }
}

/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_global_norm(params: &mut [&mut Parameter], max_norm: f64) -> f64 {
    let norm = params.iter().map(|p| p.grad.sq_norm()).sum::<f64>().sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        for p in params.iter_mut() {
            for g in p.grad.data_mut() {
                *g *= s;
            }
        }
    }
    norm
}

//! Finite-difference checks of every layer's backward pass.

use argmine_core::error::Result;
use argmine_core::rng::{seeded, Prng};
use argmine_core::tensor::{gradient_check, softmax_ce, Conv1dPool, Dense, Lstm, Objective, Parameter, Tensor};
use rand::Rng;

const STEP: f64 = 1e-5;
const SEEDS: std::ops::Range<u64> = 0..10;

fn random(shape: &[usize], rng: &mut Prng) -> Tensor {
    let n = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

/// `sum(r * y)` for a fixed random `r`, so every output coordinate matters.
fn probe(y: &Tensor, r: &Tensor) -> (f64, Tensor) {
    let loss = y.data().iter().zip(r.data()).map(|(a, b)| a * b).sum();
    (loss, r.clone())
}

struct DenseObj {
    layer: Dense,
    x: Parameter,
    r: Tensor,
}

impl Objective for DenseObj {
    fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut p = self.layer.params_mut();
        p.push(&mut self.x);
        p
    }
    fn loss(&mut self) -> Result<f64> {
        Ok(probe(&self.layer.forward(&self.x.value)?, &self.r).0)
    }
    fn loss_and_grad(&mut self) -> Result<f64> {
        for p in self.params_mut() {
            p.zero_grad();
        }
        let y = self.layer.forward(&self.x.value)?;
        let (loss, dy) = probe(&y, &self.r);
        self.x.grad = self.layer.backward(&self.x.value, &dy);
        Ok(loss)
    }
}

#[test]
fn dense_layer_gradients() {
    for seed in SEEDS {
        let mut rng = seeded(seed);
        let (b, i, o) = (rng.random_range(1..6), rng.random_range(2..12), rng.random_range(2..9));
        let mut obj = DenseObj {
            layer: Dense::new("d", i, o, &mut rng),
            x: Parameter::new("x", random(&[b, i], &mut rng)),
            r: random(&[b, o], &mut rng),
        };
        obj.layer.b.value = random(&[o], &mut rng);
        let rep = gradient_check(&mut obj, STEP, 50, seed).unwrap();
        assert!(rep.max_rel_error() < 1e-6, "seed {seed}: {:?}", rep.per_param);
    }
}

struct ConvObj {
    layer: Conv1dPool,
    x: Parameter,
    r: Tensor,
}

impl Objective for ConvObj {
    fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut p = self.layer.params_mut();
        p.push(&mut self.x);
        p
    }
    fn loss(&mut self) -> Result<f64> {
        Ok(probe(&self.layer.forward(&self.x.value)?.0, &self.r).0)
    }
    fn loss_and_grad(&mut self) -> Result<f64> {
        for p in self.params_mut() {
            p.zero_grad();
        }
        let (y, cache) = self.layer.forward(&self.x.value)?;
        let (loss, dy) = probe(&y, &self.r);
        self.x.grad = self.layer.backward(&cache, &dy, true).unwrap();
        Ok(loss)
    }
}

#[test]
fn conv_maxpool_gradients() {
    for seed in SEEDS {
        let mut rng = seeded(100 + seed);
        let mut obj = ConvObj {
            layer: Conv1dPool::new("c", 8, 4, 5, &mut rng),
            x: Parameter::new("x", random(&[11, 8], &mut rng)),
            r: random(&[6, 4], &mut rng),
        };
        obj.layer.bias.value = random(&[4], &mut rng);
        let rep = gradient_check(&mut obj, STEP, 50, seed).unwrap();
        assert!(rep.max_rel_error() < 1e-6, "seed {seed}: {:?}", rep.per_param);
        assert!(rep.kinks * 50 <= rep.checked(), "seed {seed}: {} kinks", rep.kinks);
    }
}

struct LstmObj {
    layer: Lstm,
    x: Parameter,
    r: Vec<f64>,
}

impl Objective for LstmObj {
    fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut p = self.layer.params_mut();
        p.push(&mut self.x);
        p
    }
    fn loss(&mut self) -> Result<f64> {
        let (h, _) = self.layer.forward(&self.x.value)?;
        Ok(h.iter().zip(&self.r).map(|(a, b)| a * b).sum())
    }
    fn loss_and_grad(&mut self) -> Result<f64> {
        for p in self.params_mut() {
            p.zero_grad();
        }
        let (h, cache) = self.layer.forward(&self.x.value)?;
        self.x.grad = self.layer.backward(&cache, &self.r, true).unwrap();
        Ok(h.iter().zip(&self.r).map(|(a, b)| a * b).sum())
    }
}

#[test]
fn lstm_bptt_gradients_length_seven() {
    for seed in SEEDS {
        let mut rng = seeded(200 + seed);
        let hidden = 75;
        let mut obj = LstmObj {
            layer: Lstm::new("l", 6, hidden, &mut rng),
            x: Parameter::new("x", random(&[7, 6], &mut rng)),
            r: (0..hidden).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        let rep = gradient_check(&mut obj, STEP, 50, seed).unwrap();
        assert!(rep.max_rel_error() < 1e-5, "seed {seed}: {:?}", rep.per_param);
        assert_eq!(rep.kinks, 0);
    }
}

struct CeObj {
    logits: Parameter,
    targets: Vec<usize>,
}

impl Objective for CeObj {
    fn params_mut(&mut self) -> Vec<&mut Parameter> {
        vec![&mut self.logits]
    }
    fn loss(&mut self) -> Result<f64> {
        Ok(softmax_ce(&self.logits.value, &self.targets, None).loss)
    }
    fn loss_and_grad(&mut self) -> Result<f64> {
        let out = softmax_ce(&self.logits.value, &self.targets, None);
        self.logits.grad = out.grad;
        Ok(out.loss)
    }
}

#[test]
fn softmax_ce_gradients() {
    for seed in SEEDS {
        let mut rng = seeded(300 + seed);
        let (b, k) = (rng.random_range(1..8), rng.random_range(2..6));
        let mut logits = random(&[b, k], &mut rng);
        for v in logits.data_mut() {
            *v *= 3.0;
        }
        let mut obj = CeObj {
            logits: Parameter::new("logits", logits),
            targets: (0..b).map(|_| rng.random_range(0..k)).collect(),
        };
        let rep = gradient_check(&mut obj, STEP, 50, seed).unwrap();
        assert!(rep.max_rel_error() < 1e-7, "seed {seed}: {:?}", rep.per_param);
    }
}

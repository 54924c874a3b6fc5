use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Example, Heads, Majority, Model, ModelSpec};
use crate::error::{Error, Result};
use crate::rng::{seeded, Prng};
use crate::tensor::{clip_global_norm, Adam, AdamConfig, Tensor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub adam: AdamConfig,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub clip_norm: Option<f64>,
    /// Per-class weights on the argument loss, in class-index order.
    pub class_weights: Option<Vec<f64>>,
}

impl TrainConfig {
    pub fn from_spec(spec: &ModelSpec) -> Self {
        let hp = &spec.hyperparams;
        TrainConfig {
            adam: AdamConfig {
                lr: spec.learning_rate(),
                ..AdamConfig::default()
            },
            batch_size: hp.batch,
            max_epochs: hp.max_epochs,
            patience: hp.patience,
            clip_norm: spec.clip_norm(),
            class_weights: None,
        }
    }
}

/// Per-epoch losses. `best_epoch` is 1-based; its weights are the ones kept.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
}

/// Stratified validation carve-out. Moves are grouped by id so duplicated
/// (oversampled) copies of a move all land on the same side; within each
/// argument class a `fraction` of the distinct moves goes to validation.
pub fn split_validation(examples: Vec<Example>, fraction: f64, rng: &mut Prng) -> (Vec<Example>, Vec<Example>) {
    let mut by_class: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    let mut seen = std::collections::HashSet::new();
    for ex in &examples {
        if seen.insert(ex.id.as_str()) {
            by_class.entry(ex.arg.index()).or_default().push(&ex.id);
        }
    }
    let mut held = std::collections::HashSet::new();
    for ids in by_class.values_mut() {
        ids.shuffle(rng);
        let k = (fraction * ids.len() as f64).round() as usize;
        // keep at least one move of every class for training
        let k = k.min(ids.len().saturating_sub(1));
        held.extend(ids[..k].iter().map(|s| s.to_string()));
    }
    examples.into_iter().partition(|e| !held.contains(&e.id))
}

fn loss_grad(model: &mut Model, batch: &[&Example], cfg: &TrainConfig, rng: &mut Prng) -> Result<f64> {
    let w = cfg.class_weights.as_deref();
    let parts = match model {
        Model::LogReg(m) => m.loss_grad(batch, Heads::ALL, w)?,
        Model::Neural(m) => m.loss_grad(batch, Heads::ALL, w, Some(rng))?,
        Model::Majority(_) => unreachable!("majority is fitted, not trained"),
    };
    Ok(parts.total())
}

fn eval_loss(model: &Model, batch: &[&Example]) -> Result<f64> {
    match model {
        Model::LogReg(m) => m.eval_loss(batch),
        Model::Neural(m) => m.eval_loss(batch),
        Model::Majority(_) => unreachable!("majority is fitted, not trained"),
    }
}

fn mean_eval_loss(model: &Model, set: &[Example], chunk: usize) -> Result<f64> {
    let mut total = 0.0;
    for c in set.chunks(chunk.max(1)) {
        let refs: Vec<&Example> = c.iter().collect();
        total += eval_loss(model, &refs)? * c.len() as f64;
    }
    Ok(total / set.len() as f64)
}

/// Mini-batch Adam with early stopping on validation loss (training loss
/// when `val` is empty). The best epoch's weights are restored at the end.
pub fn train(model: &mut Model, train: &[Example], val: &[Example], cfg: &TrainConfig, seed: u64) -> Result<History> {
    if train.is_empty() {
        return Err(Error::Validation("empty training set".into()));
    }
    match model {
        Model::Majority(m) => {
            *m = Some(Majority::fit(train)?);
            return Ok(History::default());
        }
        Model::LogReg(m) => m.prepare(train),
        Model::Neural(m) => m.prepare(train),
    }
    let mut rng = seeded(seed);
    let mut opt = Adam::new(cfg.adam);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = History::default();
    let mut best = f64::INFINITY;
    let mut best_weights: Vec<Tensor> = model.params().iter().map(|p| p.value.clone()).collect();
    let mut stale = 0;
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for idx in order.chunks(cfg.batch_size) {
            let batch: Vec<&Example> = idx.iter().map(|&i| &train[i]).collect();
            for p in model.params_mut() {
                p.zero_grad();
            }
            let loss = loss_grad(model, &batch, cfg, &mut rng)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            epoch_loss += loss * batch.len() as f64;
            let mut params = model.params_mut();
            if let Some(c) = cfg.clip_norm {
                clip_global_norm(&mut params, c);
            }
            opt.step(&mut params);
        }
        let train_loss = epoch_loss / train.len() as f64;
        let monitored = if val.is_empty() {
            train_loss
        } else {
            mean_eval_loss(model, val, 256)?
        };
        if !monitored.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        history.train_loss.push(train_loss);
        history.val_loss.push(monitored);
        history.epochs_run = epoch;
        if monitored < best {
            best = monitored;
            history.best_epoch = epoch;
            best_weights = model.params().iter().map(|p| p.value.clone()).collect();
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    for (p, w) in model.params_mut().into_iter().zip(best_weights) {
        p.value = w;
    }
    Ok(history)
}

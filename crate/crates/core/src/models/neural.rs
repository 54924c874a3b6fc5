use super::{dropout_mask, Example, Family, Heads, InputDims, LossParts, ModelSpec, Prediction, NUM_ARG, NUM_SPEC};
use crate::error::{Error, Result};
use crate::features::Standardizer;
use crate::rng::{seeded, Prng};
use crate::tensor::{softmax_ce, softmax_rows, Conv1dPool, ConvCache, Dense, Lstm, LstmCache, Parameter, Tensor};

#[derive(Clone, Debug)]
pub enum Encoder {
    /// Stacked conv/pool layers, global max over time, one ReLU FC layer.
    Cnn { convs: Vec<Conv1dPool>, fc: Dense },
    /// Final hidden state of a single LSTM.
    Lstm(Lstm),
}

enum EncCache {
    Cnn {
        convs: Vec<ConvCache>,
        last_rows: usize,
        gmax: Tensor,
        gmax_arg: Vec<usize>,
        fc_pre: Vec<f64>,
    },
    Lstm(LstmCache),
}

struct Forward {
    enc: EncCache,
    mask: Option<Vec<f64>>,
    sparse: Vec<(usize, f64)>,
}

/// CNN or LSTM over an encoded sequence. The shared representation is the
/// network output, extended in hybrid models by the standardized dense
/// features and a linear projection of the sparse ones. One softmax head
/// predicts the argument component; multitask models add a specificity head
/// on the same representation.
#[derive(Clone, Debug)]
pub struct NeuralModel {
    pub spec: ModelSpec,
    pub dims: InputDims,
    pub standardizer: Option<Standardizer>,
    pub encoder: Encoder,
    pub sparse_proj: Option<Dense>,
    pub arg_head: Dense,
    pub spec_head: Option<Dense>,
}

impl NeuralModel {
    pub fn new(spec: ModelSpec, dims: InputDims, seed: u64) -> Self {
        let hp = &spec.hyperparams;
        let mut rng = seeded(seed);
        let width = spec.seq_width();
        let encoder = match spec.family {
            Family::Lstm => Encoder::Lstm(Lstm::new("lstm", width, hp.hidden, &mut rng)),
            _ => {
                let mut convs = Vec::new();
                let mut c = width;
                for (i, w) in spec.kernel_widths().into_iter().enumerate() {
                    convs.push(Conv1dPool::new(&format!("conv{i}"), c, hp.filters, w, &mut rng));
                    c = hp.filters;
                }
                let fc = Dense::new("fc", hp.filters, hp.fc_width, &mut rng);
                Encoder::Cnn { convs, fc }
            }
        };
        let sparse_proj = (dims.sparse > 0).then(|| Dense::new("sparse_proj", dims.sparse, hp.sparse_proj, &mut rng));
        let mut model = NeuralModel {
            spec,
            dims,
            standardizer: None,
            encoder,
            sparse_proj,
            arg_head: Dense::new("arg_head", 1, 1, &mut seeded(0)),
            spec_head: None,
        };
        let r = model.rep_dim();
        model.arg_head = Dense::new("arg_head", r, NUM_ARG, &mut rng);
        if model.spec.multitask {
            model.spec_head = Some(Dense::new("spec_head", r, NUM_SPEC, &mut rng));
        }
        model
    }

    pub fn net_dim(&self) -> usize {
        match &self.encoder {
            Encoder::Cnn { fc, .. } => fc.output_dim(),
            Encoder::Lstm(l) => l.hidden(),
        }
    }

    fn proj_dim(&self) -> usize {
        self.sparse_proj.as_ref().map_or(0, Dense::output_dim)
    }

    /// Width of the shared representation fed to the heads.
    pub fn rep_dim(&self) -> usize {
        self.net_dim() + self.dims.dense + self.proj_dim()
    }

    pub fn prepare(&mut self, train: &[Example]) {
        if self.dims.dense > 0 {
            self.standardizer = Some(Standardizer::fit(
                train.iter().map(|e| e.features.dense.as_slice()),
                self.dims.dense,
            ));
        }
    }

    fn forward_rep(&self, ex: &Example, dropout: Option<&mut Prng>) -> Result<(Vec<f64>, Forward)> {
        let seq = ex
            .seq
            .as_ref()
            .ok_or_else(|| Error::shape("neural model", format!("move {} has no encoded sequence", ex.id)))?;
        let (mut rep, enc) = match &self.encoder {
            Encoder::Cnn { convs, fc } => {
                let mut x = seq.rows.clone();
                let mut caches = Vec::with_capacity(convs.len());
                for conv in convs {
                    let (y, cache) = conv.forward(&x)?;
                    caches.push(cache);
                    x = y;
                }
                let f = x.cols();
                let mut gmax = vec![f64::NEG_INFINITY; f];
                let mut gmax_arg = vec![0; f];
                for t in 0..x.rows() {
                    for (j, v) in x.row(t).iter().enumerate() {
                        if *v > gmax[j] {
                            gmax[j] = *v;
                            gmax_arg[j] = t;
                        }
                    }
                }
                let gmax = Tensor::from_vec(&[1, f], gmax)?;
                let fc_pre = fc.forward(&gmax)?.into_data();
                let rep = fc_pre.iter().map(|v| v.max(0.0)).collect();
                (
                    rep,
                    EncCache::Cnn {
                        convs: caches,
                        last_rows: x.rows(),
                        gmax,
                        gmax_arg,
                        fc_pre,
                    },
                )
            }
            Encoder::Lstm(lstm) => {
                let (h, cache) = lstm.forward(&seq.rows)?;
                (h, EncCache::Lstm(cache))
            }
        };
        let p = self.spec.hyperparams.dropout;
        let mask = match dropout {
            Some(rng) if p > 0.0 => {
                let m = dropout_mask(rep.len(), p, rng);
                for (r, k) in rep.iter_mut().zip(&m) {
                    *r *= k;
                }
                Some(m)
            }
            _ => None,
        };
        let f = &ex.features;
        if f.dense.len() != self.dims.dense {
            return Err(Error::shape(
                "neural model",
                format!("{} dense features, model built for {}", f.dense.len(), self.dims.dense),
            ));
        }
        if self.dims.dense > 0 {
            match &self.standardizer {
                Some(s) => rep.extend(s.apply(&f.dense)),
                None => rep.extend_from_slice(&f.dense),
            }
        }
        let sparse = match &self.sparse_proj {
            Some(proj) => {
                if f.sparse.iter().any(|(i, _)| *i >= self.dims.sparse) {
                    return Err(Error::shape("neural model", format!("sparse index beyond {}", self.dims.sparse)));
                }
                rep.extend(proj.forward_sparse(&f.sparse));
                f.sparse.clone()
            }
            None => Vec::new(),
        };
        Ok((rep, Forward { enc, mask, sparse }))
    }

    fn backward_rep(&mut self, fwd: &Forward, drep: &[f64]) {
        let nd = self.net_dim();
        if let Some(proj) = self.sparse_proj.as_mut() {
            proj.backward_sparse(&fwd.sparse, &drep[nd + self.dims.dense..]);
        }
        let mut dnet = drep[..nd].to_vec();
        if let Some(m) = &fwd.mask {
            for (d, k) in dnet.iter_mut().zip(m) {
                *d *= k;
            }
        }
        match (&mut self.encoder, &fwd.enc) {
            (
                Encoder::Cnn { convs, fc },
                EncCache::Cnn {
                    convs: caches,
                    last_rows,
                    gmax,
                    gmax_arg,
                    fc_pre,
                },
            ) => {
                for (d, pre) in dnet.iter_mut().zip(fc_pre) {
                    if *pre <= 0.0 {
                        *d = 0.0;
                    }
                }
                let dfc = Tensor::from_vec(&[1, nd], dnet).expect("fc width");
                let dg = fc.backward(gmax, &dfc);
                let f = gmax.cols();
                let mut d = Tensor::zeros(&[*last_rows, f]);
                for (j, &t) in gmax_arg.iter().enumerate() {
                    d.data_mut()[t * f + j] = dg.data()[j];
                }
                for i in (0..convs.len()).rev() {
                    match convs[i].backward(&caches[i], &d, i > 0) {
                        Some(dx) => d = dx,
                        None => break,
                    }
                }
            }
            (Encoder::Lstm(lstm), EncCache::Lstm(cache)) => {
                lstm.backward(cache, &dnet, false);
            }
            _ => unreachable!("cache built by the same encoder"),
        }
    }

    /// Forward and backward over a batch, accumulating gradients of the mean
    /// losses of the selected heads. Dropout is active when `rng` is given.
    pub fn loss_grad(
        &mut self,
        batch: &[&Example],
        heads: Heads,
        weights: Option<&[f64]>,
        mut rng: Option<&mut Prng>,
    ) -> Result<LossParts> {
        let mut fwds = Vec::with_capacity(batch.len());
        let mut reps = Vec::with_capacity(batch.len());
        for ex in batch {
            let (rep, fwd) = self.forward_rep(ex, rng.as_deref_mut())?;
            reps.push(rep);
            fwds.push(fwd);
        }
        let r = Tensor::from_rows(&reps, self.rep_dim())?;
        let mut drep = Tensor::zeros(r.shape());
        let mut parts = LossParts::default();
        if heads.arg {
            let targets: Vec<usize> = batch.iter().map(|e| e.arg.index()).collect();
            let ce = softmax_ce(&self.arg_head.forward(&r)?, &targets, weights);
            parts.arg = ce.loss;
            add(&mut drep, &self.arg_head.backward(&r, &ce.grad));
        }
        if heads.spec {
            if let Some(head) = self.spec_head.as_mut() {
                let targets: Vec<usize> = batch.iter().map(|e| e.spec.rank()).collect();
                let ce = softmax_ce(&head.forward(&r)?, &targets, None);
                parts.spec = ce.loss;
                add(&mut drep, &head.backward(&r, &ce.grad));
            }
        }
        for (i, fwd) in fwds.iter().enumerate() {
            self.backward_rep(fwd, drep.row(i));
        }
        Ok(parts)
    }

    /// Mean validation loss (summed over heads) without dropout.
    pub fn eval_loss(&self, batch: &[&Example]) -> Result<f64> {
        let reps = batch
            .iter()
            .map(|e| self.forward_rep(e, None).map(|r| r.0))
            .collect::<Result<Vec<_>>>()?;
        let r = Tensor::from_rows(&reps, self.rep_dim())?;
        let targets: Vec<usize> = batch.iter().map(|e| e.arg.index()).collect();
        let mut loss = softmax_ce(&self.arg_head.forward(&r)?, &targets, None).loss;
        if let Some(head) = &self.spec_head {
            let targets: Vec<usize> = batch.iter().map(|e| e.spec.rank()).collect();
            loss += softmax_ce(&head.forward(&r)?, &targets, None).loss;
        }
        Ok(loss)
    }

    pub fn logits(&self, ex: &Example) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        let (rep, _) = self.forward_rep(ex, None)?;
        let r = Tensor::from_vec(&[1, rep.len()], rep)?;
        let arg = self.arg_head.forward(&r)?.into_data();
        let spec = match &self.spec_head {
            Some(h) => Some(h.forward(&r)?.into_data()),
            None => None,
        };
        Ok((arg, spec))
    }

    pub fn predict(&self, ex: &Example) -> Result<Prediction> {
        let (arg, spec) = self.logits(ex)?;
        let probs = |l: Vec<f64>| {
            let p = softmax_rows(&Tensor::from_vec(&[1, 3], l).expect("three logits"));
            [p.at(0, 0), p.at(0, 1), p.at(0, 2)]
        };
        Ok(Prediction {
            arg_probs: probs(arg),
            spec_probs: spec.map(probs),
        })
    }

    /// Parameters in a fixed order: encoder, sparse projection, heads.
    pub fn params(&self) -> Vec<&Parameter> {
        let mut p = Vec::new();
        match &self.encoder {
            Encoder::Cnn { convs, fc } => {
                for c in convs {
                    p.extend(c.params());
                }
                p.extend(fc.params());
            }
            Encoder::Lstm(l) => p.extend(l.params()),
        }
        if let Some(s) = &self.sparse_proj {
            p.extend(s.params());
        }
        p.extend(self.arg_head.params());
        if let Some(h) = &self.spec_head {
            p.extend(h.params());
        }
        p
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut p = Vec::new();
        match &mut self.encoder {
            Encoder::Cnn { convs, fc } => {
                for c in convs {
                    p.extend(c.params_mut());
                }
                p.extend(fc.params_mut());
            }
            Encoder::Lstm(l) => p.extend(l.params_mut()),
        }
        if let Some(s) = &mut self.sparse_proj {
            p.extend(s.params_mut());
        }
        p.extend(self.arg_head.params_mut());
        if let Some(h) = &mut self.spec_head {
            p.extend(h.params_mut());
        }
        p
    }

    /// Parameters of the shared part (everything except the heads).
    pub fn shared_param_names(&self) -> Vec<String> {
        let heads = 2 + if self.spec_head.is_some() { 2 } else { 0 };
        let all = self.params();
        all[..all.len() - heads].iter().map(|p| p.name.clone()).collect()
    }
}

fn add(acc: &mut Tensor, x: &Tensor) {
    for (a, b) in acc.data_mut().iter_mut().zip(x.data()) {
        *a += b;
    }
}

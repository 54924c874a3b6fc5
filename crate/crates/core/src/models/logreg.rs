use super::{Example, Heads, InputDims, LossParts, ModelSpec, Prediction, NUM_ARG};
use crate::error::{Error, Result};
use crate::features::Standardizer;
use crate::rng::seeded;
use crate::tensor::{softmax_ce, softmax_rows, Dense, Parameter, Tensor};

/// Multinomial logistic regression over standardized dense features and raw
/// sparse features. Minimizes `sum CE + l2 * |W|^2 / 2`, scaled by `1 / N`.
#[derive(Clone, Debug)]
pub struct LogReg {
    pub spec: ModelSpec,
    pub dims: InputDims,
    pub standardizer: Option<Standardizer>,
    /// Number of training examples, the `N` of the scaled objective.
    pub train_size: usize,
    pub linear: Dense,
}

impl LogReg {
    pub fn new(spec: ModelSpec, dims: InputDims) -> Self {
        let d = dims.dense + dims.sparse;
        // zero start: the objective is convex, so the seed is irrelevant
        let mut linear = Dense::new("logreg", d, NUM_ARG, &mut seeded(0));
        linear.w.value = Tensor::zeros(&[d, NUM_ARG]);
        LogReg {
            spec,
            dims,
            standardizer: None,
            train_size: 0,
            linear,
        }
    }

    pub fn prepare(&mut self, train: &[Example]) {
        self.train_size = train.len();
        if self.dims.dense > 0 {
            self.standardizer = Some(Standardizer::fit(
                train.iter().map(|e| e.features.dense.as_slice()),
                self.dims.dense,
            ));
        }
    }

    /// The example as one sparse row over `[dense | sparse]`.
    pub(crate) fn input(&self, ex: &Example) -> Result<Vec<(usize, f64)>> {
        let f = &ex.features;
        if f.dense.len() != self.dims.dense {
            return Err(Error::shape(
                "logreg",
                format!("{} dense features, model built for {}", f.dense.len(), self.dims.dense),
            ));
        }
        if f.sparse.iter().any(|(i, _)| *i >= self.dims.sparse) {
            return Err(Error::shape("logreg", format!("sparse index beyond {}", self.dims.sparse)));
        }
        let dense = match &self.standardizer {
            Some(s) => s.apply(&f.dense),
            None => f.dense.clone(),
        };
        let mut row: Vec<(usize, f64)> = dense.into_iter().enumerate().filter(|(_, v)| *v != 0.0).collect();
        row.extend(f.sparse.iter().map(|(i, v)| (i + self.dims.dense, *v)));
        Ok(row)
    }

    fn logits(&self, batch: &[&Example]) -> Result<(Tensor, Vec<Vec<(usize, f64)>>)> {
        let inputs = batch.iter().map(|e| self.input(e)).collect::<Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> = inputs.iter().map(|x| self.linear.forward_sparse(x)).collect();
        Ok((Tensor::from_rows(&rows, NUM_ARG)?, inputs))
    }

    fn l2_scale(&self) -> f64 {
        self.spec.hyperparams.l2 / self.train_size.max(1) as f64
    }

    pub fn loss_grad(&mut self, batch: &[&Example], heads: Heads, weights: Option<&[f64]>) -> Result<LossParts> {
        let (logits, inputs) = self.logits(batch)?;
        let targets: Vec<usize> = batch.iter().map(|e| e.arg.index()).collect();
        let ce = softmax_ce(&logits, &targets, weights);
        let lam = self.l2_scale();
        let mut parts = LossParts {
            reg: 0.5 * lam * self.linear.w.value.sq_norm(),
            ..LossParts::default()
        };
        if heads.arg {
            parts.arg = ce.loss;
            for (x, r) in inputs.iter().zip(0..) {
                self.linear.backward_sparse(x, ce.grad.row(r));
            }
        }
        let w = self.linear.w.value.data().to_vec();
        for (g, v) in self.linear.w.grad.data_mut().iter_mut().zip(w) {
            *g += lam * v;
        }
        Ok(parts)
    }

    pub fn eval_loss(&self, batch: &[&Example]) -> Result<f64> {
        let (logits, _) = self.logits(batch)?;
        let targets: Vec<usize> = batch.iter().map(|e| e.arg.index()).collect();
        Ok(softmax_ce(&logits, &targets, None).loss)
    }

    pub fn predict(&self, ex: &Example) -> Result<Prediction> {
        let (logits, _) = self.logits(&[ex])?;
        let p = softmax_rows(&logits);
        Ok(Prediction {
            arg_probs: [p.at(0, 0), p.at(0, 1), p.at(0, 2)],
            spec_probs: None,
        })
    }

    pub fn params(&self) -> Vec<&Parameter> {
        self.linear.params()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        self.linear.params_mut()
    }
}

use super::{glorot_uniform, mat_vec_acc, outer_acc, vec_mat_acc, Parameter, Tensor};
use crate::error::{Error, Result};
use crate::rng::Prng;

/// 1-D convolution over time with same padding, ReLU, then non-overlapping
/// max pooling of width 2. An odd trailing position is pooled alone, so a
/// length-`T` input yields `ceil(T / 2)` rows.
///
/// Kernels are stored as `[width x channels x filters]` so each tap is a
/// `channels x filters` matrix applied to one input row.
#[derive(Clone, Debug, PartialEq)]
pub struct Conv1dPool {
    pub kernels: Parameter,
    pub bias: Parameter,
    width: usize,
    channels: usize,
    filters: usize,
}

#[derive(Clone, Debug)]
pub struct ConvCache {
    input: Tensor,
    pre: Tensor,
    argmax: Vec<usize>,
}

impl Conv1dPool {
    pub fn new(name: &str, channels: usize, filters: usize, width: usize, rng: &mut Prng) -> Self {
        let kernels = glorot_uniform(&[width, channels, filters], width * channels, width * filters, rng);
        Conv1dPool {
            kernels: Parameter::new(format!("{name}.kernels"), kernels),
            bias: Parameter::new(format!("{name}.bias"), Tensor::zeros(&[filters])),
            width,
            channels,
            filters,
        }
    }

    pub fn from_parts(name: &str, kernels: Tensor, bias: Tensor) -> Result<Self> {
        let s = kernels.shape().to_vec();
        if s.len() != 3 || bias.shape() != [s[2]] {
            return Err(Error::shape("Conv1dPool::from_parts", format!("kernels {s:?}, bias {:?}", bias.shape())));
        }
        Ok(Conv1dPool {
            kernels: Parameter::new(format!("{name}.kernels"), kernels),
            bias: Parameter::new(format!("{name}.bias"), bias),
            width: s[0],
            channels: s[1],
            filters: s[2],
        })
    }

    pub fn filters(&self) -> usize {
        self.filters
    }

    pub fn pooled_len(t: usize) -> usize {
        t.div_ceil(2)
    }

    fn left_pad(&self) -> usize {
        (self.width - 1) / 2
    }

    /// `[T x C] -> [ceil(T/2) x K]`.
    pub fn forward(&self, x: &Tensor) -> Result<(Tensor, ConvCache)> {
        if x.shape().len() != 2 || x.cols() != self.channels || x.rows() == 0 {
            return Err(Error::shape(
                "conv1d_maxpool",
                format!("input {:?} for {} channels", x.shape(), self.channels),
            ));
        }
        let t_len = x.rows();
        let (c, k) = (self.channels, self.filters);
        let left = self.left_pad();
        let kern = self.kernels.value.data();
        let mut pre = Tensor::zeros(&[t_len, k]);
        for t in 0..t_len {
            let out = pre.row_mut(t);
            out.copy_from_slice(self.bias.value.data());
            for w in 0..self.width {
                let src = t + w;
                if src < left || src - left >= t_len {
                    continue;
                }
                vec_mat_acc(x.row(src - left), &kern[w * c * k..(w + 1) * c * k], out);
            }
        }
        let p_len = Self::pooled_len(t_len);
        let mut out = Tensor::zeros(&[p_len, k]);
        let mut argmax = vec![0; p_len * k];
        for p in 0..p_len {
            let a = 2 * p;
            for j in 0..k {
                let va = pre.at(a, j).max(0.0);
                let (best, idx) = if a + 1 < t_len {
                    let vb = pre.at(a + 1, j).max(0.0);
                    if vb > va { (vb, a + 1) } else { (va, a) }
                } else {
                    (va, a)
                };
                out.data_mut()[p * k + j] = best;
                argmax[p * k + j] = idx;
            }
        }
        Ok((
            out,
            ConvCache {
                input: x.clone(),
                pre,
                argmax,
            },
        ))
    }

    /// Routes `dout` through the pooling argmax and the ReLU mask, accumulates
    /// kernel and bias gradients, and returns the input gradient when asked.
    pub fn backward(&mut self, cache: &ConvCache, dout: &Tensor, input_grad: bool) -> Option<Tensor> {
        let t_len = cache.input.rows();
        let (c, k) = (self.channels, self.filters);
        let left = self.left_pad();
        let mut dpre = Tensor::zeros(&[t_len, k]);
        for (i, &t) in cache.argmax.iter().enumerate() {
            let j = i % k;
            if cache.pre.at(t, j) > 0.0 {
                dpre.data_mut()[t * k + j] += dout.data()[i];
            }
        }
        let mut dx = input_grad.then(|| Tensor::zeros(cache.input.shape()));
        let kern = self.kernels.value.data().to_vec();
        let gk = self.kernels.grad.data_mut();
        for t in 0..t_len {
            let d = dpre.row(t);
            if d.iter().all(|v| *v == 0.0) {
                continue;
            }
            for w in 0..self.width {
                let src = t + w;
                if src < left || src - left >= t_len {
                    continue;
                }
                let range = w * c * k..(w + 1) * c * k;
                outer_acc(cache.input.row(src - left), d, &mut gk[range.clone()]);
                if let Some(dx) = dx.as_mut() {
                    mat_vec_acc(&kern[range], d, dx.row_mut(src - left));
                }
            }
            for (g, v) in self.bias.grad.data_mut().iter_mut().zip(d) {
                *g += v;
            }
        }
        dx
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        vec![&mut self.kernels, &mut self.bias]
    }

    pub fn params(&self) -> Vec<&Parameter> {
        vec![&self.kernels, &self.bias]
    }
}

//! Dense `f64` tensors and hand-written layers with explicit backward passes.
//!
//! There is no general autodiff graph: each layer's `forward` returns the
//! cache its `backward` needs, and gradients accumulate into the layer's
//! [`Parameter`]s until [`Parameter::zero_grad`].

mod adam;
mod checkpoint;
mod conv;
mod dense;
mod gradcheck;
mod init;
mod loss;
mod lstm;

pub use adam::{clip_global_norm, Adam, AdamConfig};
pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use conv::{Conv1dPool, ConvCache};
pub use dense::Dense;
pub use gradcheck::{gradient_check, rel_error, GradCheckReport, Objective, REL_ERROR_FLOOR};
pub use init::{glorot_uniform, orthogonal};
pub use loss::{softmax_ce, softmax_rows, SoftmaxCe};
pub use lstm::{Lstm, LstmCache};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::shape(
                "Tensor::from_vec",
                format!("shape {shape:?} needs {n} values, got {}", data.len()),
            ));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// Stacks equal-length rows into a `[rows x cols]` matrix.
    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::shape("Tensor::from_rows", format!("row of {} values, expected {cols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Tensor {
            shape: vec![rows.len(), cols],
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Rows of a 2-D tensor.
    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    /// Columns of a 2-D tensor.
    pub fn cols(&self) -> usize {
        self.shape[1]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols();
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols() + j]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Returns an error naming `op` when any value is NaN or infinite.
    pub fn check_finite(&self, op: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::shape(op, "non-finite value"))
        }
    }

    /// Keeps the first `n` rows.
    pub fn truncate_rows(&self, n: usize) -> Tensor {
        let c = self.cols();
        let n = n.min(self.rows());
        Tensor {
            shape: vec![n, c],
            data: self.data[..n * c].to_vec(),
        }
    }

    pub fn sq_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// A trainable tensor with its accumulated gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub value: Tensor,
    pub grad: Tensor,
}

impl Parameter {
    pub fn new(name: impl Into<String>, value: Tensor) -> Self {
        let grad = Tensor::zeros(value.shape());
        Parameter {
            name: name.into(),
            value,
            grad,
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad.data.fill(0.0);
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }
}

/// `out[j] += sum_i x[i] * w[i][j]` for a row-major `[x.len() x out.len()]` matrix.
#[inline]
pub(crate) fn vec_mat_acc(x: &[f64], w: &[f64], out: &mut [f64]) {
    let cols = out.len();
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let row = &w[i * cols..(i + 1) * cols];
        for (o, &wij) in out.iter_mut().zip(row) {
            *o += xi * wij;
        }
    }
}

/// `gw[i][j] += x[i] * dy[j]`.
#[inline]
pub(crate) fn outer_acc(x: &[f64], dy: &[f64], gw: &mut [f64]) {
    let cols = dy.len();
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let row = &mut gw[i * cols..(i + 1) * cols];
        for (g, &d) in row.iter_mut().zip(dy) {
            *g += xi * d;
        }
    }
}

/// `dx[i] += sum_j w[i][j] * dy[j]`.
#[inline]
pub(crate) fn mat_vec_acc(w: &[f64], dy: &[f64], dx: &mut [f64]) {
    let cols = dy.len();
    for (i, d) in dx.iter_mut().enumerate() {
        let row = &w[i * cols..(i + 1) * cols];
        *d += row.iter().zip(dy).map(|(a, b)| a * b).sum::<f64>();
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checked() {
        assert!(Tensor::from_vec(&[2, 3], vec![0.0; 5]).is_err());
        let t = Tensor::from_vec(&[2, 3], (0..6).map(f64::from).collect()).unwrap();
        assert_eq!(t.row(1), &[3.0, 4.0, 5.0]);
        assert_eq!(t.at(0, 2), 2.0);
        assert_eq!(t.truncate_rows(1).data(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn finiteness() {
        let t = Tensor::from_vec(&[2], vec![1.0, f64::NAN]).unwrap();
        assert!(!t.is_finite());
        assert!(t.check_finite("test").is_err());
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0).is_finite());
        assert!(sigmoid(800.0) == 1.0);
    }
}

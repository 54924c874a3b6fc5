use super::{glorot_uniform, mat_vec_acc, outer_acc, vec_mat_acc, Parameter, Tensor};
use crate::error::{Error, Result};
use crate::rng::Prng;

/// Fully connected layer `y = x W + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub w: Parameter,
    pub b: Parameter,
}

impl Dense {
    pub fn new(name: &str, input: usize, output: usize, rng: &mut Prng) -> Self {
        Dense {
            w: Parameter::new(format!("{name}.w"), glorot_uniform(&[input, output], input, output, rng)),
            b: Parameter::new(format!("{name}.b"), Tensor::zeros(&[output])),
        }
    }

    pub fn from_parts(name: &str, w: Tensor, b: Tensor) -> Result<Self> {
        if w.shape().len() != 2 || b.shape() != [w.cols()] {
            return Err(Error::shape("Dense::from_parts", format!("w {:?}, b {:?}", w.shape(), b.shape())));
        }
        Ok(Dense {
            w: Parameter::new(format!("{name}.w"), w),
            b: Parameter::new(format!("{name}.b"), b),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.w.value.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.w.value.cols()
    }

    /// `[B x I] -> [B x O]`.
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        if x.shape().len() != 2 || x.cols() != self.input_dim() {
            return Err(Error::shape(
                "dense",
                format!("input {:?} against weights {:?}", x.shape(), self.w.value.shape()),
            ));
        }
        let o = self.output_dim();
        let mut y = Tensor::zeros(&[x.rows(), o]);
        for r in 0..x.rows() {
            let out = y.row_mut(r);
            out.copy_from_slice(self.b.value.data());
            vec_mat_acc(x.row(r), self.w.value.data(), out);
        }
        Ok(y)
    }

    /// Accumulates `dW = x^T dy`, `db = sum_rows dy` and returns `dx = dy W^T`.
    pub fn backward(&mut self, x: &Tensor, dy: &Tensor) -> Tensor {
        let mut dx = Tensor::zeros(x.shape());
        for r in 0..x.rows() {
            let d = dy.row(r);
            outer_acc(x.row(r), d, self.w.grad.data_mut());
            for (g, v) in self.b.grad.data_mut().iter_mut().zip(d) {
                *g += v;
            }
            mat_vec_acc(self.w.value.data(), d, dx.row_mut(r));
        }
        dx
    }

    /// Forward for a single sparse input row given as `(index, value)` pairs.
    pub fn forward_sparse(&self, x: &[(usize, f64)]) -> Vec<f64> {
        let o = self.output_dim();
        let mut out = self.b.value.data().to_vec();
        let w = self.w.value.data();
        for &(i, v) in x {
            for (y, wij) in out.iter_mut().zip(&w[i * o..(i + 1) * o]) {
                *y += v * wij;
            }
        }
        out
    }

    /// Backward for [`Dense::forward_sparse`]; the input gradient is not needed.
    pub fn backward_sparse(&mut self, x: &[(usize, f64)], dy: &[f64]) {
        let o = self.output_dim();
        let gw = self.w.grad.data_mut();
        for &(i, v) in x {
            for (g, d) in gw[i * o..(i + 1) * o].iter_mut().zip(dy) {
                *g += v * d;
            }
        }
        for (g, d) in self.b.grad.data_mut().iter_mut().zip(dy) {
            *g += d;
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        vec![&mut self.w, &mut self.b]
    }

    pub fn params(&self) -> Vec<&Parameter> {
        vec![&self.w, &self.b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn identity_weights_pass_input_through() {
        let n = 4;
        let mut eye = Tensor::zeros(&[n, n]);
        for i in 0..n {
            eye.data_mut()[i * n + i] = 1.0;
        }
        let d = Dense::from_parts("id", eye, Tensor::zeros(&[n])).unwrap();
        let x = Tensor::from_vec(&[2, n], (0..8).map(|v| v as f64 * 0.5).collect()).unwrap();
        assert_eq!(d.forward(&x).unwrap(), x);
    }

    #[test]
    fn zero_input_gives_bias() {
        let mut rng = seeded(1);
        let mut d = Dense::new("d", 3, 2, &mut rng);
        d.b.value = Tensor::from_vec(&[2], vec![0.25, -1.5]).unwrap();
        let y = d.forward(&Tensor::zeros(&[3, 3])).unwrap();
        for r in 0..3 {
            assert_eq!(y.row(r), &[0.25, -1.5]);
        }
    }

    #[test]
    fn shape_mismatch_is_error() {
        let d = Dense::new("d", 3, 2, &mut seeded(1));
        assert!(d.forward(&Tensor::zeros(&[2, 4])).is_err());
    }

    #[test]
    fn sparse_matches_dense() {
        let mut rng = seeded(5);
        let d = Dense::new("d", 6, 3, &mut rng);
        let sparse = vec![(1, 0.5), (4, -2.0)];
        let mut dense = vec![0.0; 6];
        for (i, v) in &sparse {
            dense[*i] = *v;
        }
        let y = d.forward(&Tensor::from_vec(&[1, 6], dense).unwrap()).unwrap();
        let ys = d.forward_sparse(&sparse);
        for (a, b) in y.data().iter().zip(&ys) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

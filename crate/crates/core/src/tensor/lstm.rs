use super::{glorot_uniform, mat_vec_acc, orthogonal, outer_acc, sigmoid, vec_mat_acc, Parameter, Tensor};
use crate::error::{Error, Result};
use crate::rng::Prng;

/// Single-layer LSTM. Gate blocks in the `4H` axis are ordered input,
/// forget, cell candidate, output.
#[derive(Clone, Debug, PartialEq)]
pub struct Lstm {
    pub w: Parameter,
    pub u: Parameter,
    pub b: Parameter,
    input: usize,
    hidden: usize,
}

/// Per-step activations kept for backpropagation through time.
#[derive(Clone, Debug)]
pub struct LstmCache {
    xs: Tensor,
    /// `h_t` for t = 0..=T, row 0 being the zero initial state.
    hs: Vec<Vec<f64>>,
    cs: Vec<Vec<f64>>,
    /// Post-activation gates `[i f g o]` per step.
    gates: Vec<Vec<f64>>,
    tanh_c: Vec<Vec<f64>>,
}

impl Lstm {
    pub fn new(name: &str, input: usize, hidden: usize, rng: &mut Prng) -> Self {
        let h4 = 4 * hidden;
        let w = glorot_uniform(&[input, h4], input, h4, rng);
        // one orthogonal block per gate
        let blocks: Vec<Vec<f64>> = (0..4).map(|_| orthogonal(hidden, rng)).collect();
        let mut u = Tensor::zeros(&[hidden, h4]);
        for r in 0..hidden {
            for (g, blk) in blocks.iter().enumerate() {
                u.row_mut(r)[g * hidden..(g + 1) * hidden].copy_from_slice(&blk[r * hidden..(r + 1) * hidden]);
            }
        }
        let mut b = Tensor::zeros(&[h4]);
        b.data_mut()[hidden..2 * hidden].fill(1.0);
        Self::assemble(name, w, u, b)
    }

    /// All-zero parameters.
    pub fn zeros(name: &str, input: usize, hidden: usize) -> Self {
        let h4 = 4 * hidden;
        Self::assemble(name, Tensor::zeros(&[input, h4]), Tensor::zeros(&[hidden, h4]), Tensor::zeros(&[h4]))
    }

    fn assemble(name: &str, w: Tensor, u: Tensor, b: Tensor) -> Self {
        let (input, hidden) = (w.rows(), u.rows());
        Lstm {
            w: Parameter::new(format!("{name}.w"), w),
            u: Parameter::new(format!("{name}.u"), u),
            b: Parameter::new(format!("{name}.b"), b),
            input,
            hidden,
        }
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    /// One step from `(h, c)`; returns the new state and gate activations.
    pub fn step(&self, x: &[f64], h: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let hd = self.hidden;
        let mut z = self.b.value.data().to_vec();
        vec_mat_acc(x, self.w.value.data(), &mut z);
        vec_mat_acc(h, self.u.value.data(), &mut z);
        for (j, v) in z.iter_mut().enumerate() {
            *v = if j / hd == 2 { v.tanh() } else { sigmoid(*v) };
        }
        let mut c_new = vec![0.0; hd];
        let mut h_new = vec![0.0; hd];
        for j in 0..hd {
            let (i, f, g, o) = (z[j], z[hd + j], z[2 * hd + j], z[3 * hd + j]);
            c_new[j] = f * c[j] + i * g;
            h_new[j] = o * c_new[j].tanh();
        }
        (h_new, c_new, z)
    }

    /// Runs the whole `[T x I]` sequence from a zero state and returns the
    /// final hidden state.
    pub fn forward(&self, xs: &Tensor) -> Result<(Vec<f64>, LstmCache)> {
        if xs.shape().len() != 2 || xs.cols() != self.input || xs.rows() == 0 {
            return Err(Error::shape("lstm", format!("input {:?} for input size {}", xs.shape(), self.input)));
        }
        let hd = self.hidden;
        let t_len = xs.rows();
        let mut hs = Vec::with_capacity(t_len + 1);
        let mut cs = Vec::with_capacity(t_len + 1);
        let mut gates = Vec::with_capacity(t_len);
        let mut tanh_c = Vec::with_capacity(t_len);
        hs.push(vec![0.0; hd]);
        cs.push(vec![0.0; hd]);
        for t in 0..t_len {
            let (h, c, z) = self.step(xs.row(t), &hs[t], &cs[t]);
            tanh_c.push(c.iter().map(|v| v.tanh()).collect());
            hs.push(h);
            cs.push(c);
            gates.push(z);
        }
        let last = hs[t_len].clone();
        Ok((
            last,
            LstmCache {
                xs: xs.clone(),
                hs,
                cs,
                gates,
                tanh_c,
            },
        ))
    }

    /// Backpropagation through time from a gradient on the final hidden
    /// state. Accumulates parameter gradients; returns `dxs` when asked.
    pub fn backward(&mut self, cache: &LstmCache, dh_last: &[f64], input_grad: bool) -> Option<Tensor> {
        let hd = self.hidden;
        let t_len = cache.gates.len();
        let mut dxs = input_grad.then(|| Tensor::zeros(cache.xs.shape()));
        let mut dh = dh_last.to_vec();
        let mut dc = vec![0.0; hd];
        let mut dz = vec![0.0; 4 * hd];
        let w = self.w.value.data().to_vec();
        let u = self.u.value.data().to_vec();
        for t in (0..t_len).rev() {
            let z = &cache.gates[t];
            let tc = &cache.tanh_c[t];
            let c_prev = &cache.cs[t];
            for j in 0..hd {
                let (i, f, g, o) = (z[j], z[hd + j], z[2 * hd + j], z[3 * hd + j]);
                let d_o = dh[j] * tc[j];
                dc[j] += dh[j] * o * (1.0 - tc[j] * tc[j]);
                dz[j] = dc[j] * g * i * (1.0 - i);
                dz[hd + j] = dc[j] * c_prev[j] * f * (1.0 - f);
                dz[2 * hd + j] = dc[j] * i * (1.0 - g * g);
                dz[3 * hd + j] = d_o * o * (1.0 - o);
                dc[j] *= f;
            }
            outer_acc(cache.xs.row(t), &dz, self.w.grad.data_mut());
            outer_acc(&cache.hs[t], &dz, self.u.grad.data_mut());
            for (g, d) in self.b.grad.data_mut().iter_mut().zip(&dz) {
                *g += d;
            }
            dh.fill(0.0);
            mat_vec_acc(&u, &dz, &mut dh);
            if let Some(dxs) = dxs.as_mut() {
                mat_vec_acc(&w, &dz, dxs.row_mut(t));
            }
        }
        dxs
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        vec![&mut self.w, &mut self.u, &mut self.b]
    }

    pub fn params(&self) -> Vec<&Parameter> {
        vec![&self.w, &self.u, &self.b]
    }
}

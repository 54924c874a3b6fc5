use super::Tensor;

/// Result of [`softmax_ce`]: mean loss, row probabilities and the gradient
/// with respect to the logits.
#[derive(Clone, Debug)]
pub struct SoftmaxCe {
    pub loss: f64,
    pub probs: Tensor,
    pub grad: Tensor,
}

/// Row-wise stabilized softmax.
pub fn softmax_rows(logits: &Tensor) -> Tensor {
    let mut p = logits.clone();
    for r in 0..p.rows() {
        let row = p.row_mut(r);
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        for v in row.iter_mut() {
            *v = (*v - m).exp();
            s += *v;
        }
        for v in row.iter_mut() {
            *v /= s;
        }
    }
    p
}

/// Categorical cross-entropy averaged over the batch. With `weights`, each
/// example's term and gradient are scaled by the weight of its target class.
pub fn softmax_ce(logits: &Tensor, targets: &[usize], weights: Option<&[f64]>) -> SoftmaxCe {
    let probs = softmax_rows(logits);
    let b = logits.rows();
    let mut grad = probs.clone();
    let mut loss = 0.0;
    for (r, &y) in targets.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[y]);
        // log p_y via log-sum-exp keeps the loss finite for saturated rows
        let row = logits.row(r);
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += w * (lse - row[y]);
        let g = grad.row_mut(r);
        g[y] -= 1.0;
        for v in g.iter_mut() {
            *v *= w / b as f64;
        }
    }
    SoftmaxCe {
        loss: loss / b as f64,
        probs,
        grad,
    }
}

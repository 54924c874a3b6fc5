use rand::Rng;

use super::Parameter;
use crate::error::Result;
use crate::rng::seeded;

/// A scalar function of some parameters whose analytic gradient can be
/// computed. Used by [`gradient_check`].
pub trait Objective {
    fn params_mut(&mut self) -> Vec<&mut Parameter>;
    /// Forward pass only.
    fn loss(&mut self) -> Result<f64>;
    /// Zeroes gradients, then runs forward and backward.
    fn loss_and_grad(&mut self) -> Result<f64>;
}

#[derive(Clone, Debug)]
pub struct GradCheckReport {
    /// `(parameter name, max relative error, coordinates checked)`.
    pub per_param: Vec<(String, f64, usize)>,
    /// Coordinates left out because the difference stencil straddled a
    /// kink (ReLU at zero, a max-pool switch).
    pub kinks: usize,
}

impl GradCheckReport {
    pub fn max_rel_error(&self) -> f64 {
        self.per_param.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn checked(&self) -> usize {
        self.per_param.iter().map(|p| p.2).sum()
    }
}

/// True when the forward and backward one-sided slopes disagree by more
/// than smooth curvature over one step can explain.
fn straddles_kink(up: f64, mid: f64, down: f64, step: f64) -> bool {
    let fwd = (up - mid) / step;
    let bwd = (mid - down) / step;
    (fwd - bwd).abs() > 1e-4_f64.max(1e-2 * fwd.abs().max(bwd.abs()))
}

/// Smallest denominator in the relative error. Central differences with a
/// 1e-5 step carry about 1e-11 of rounding noise on O(1) losses, so
/// coordinates whose gradient is below this floor are judged on absolute
/// agreement instead.
pub const REL_ERROR_FLOOR: f64 = 1e-5;

pub fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(REL_ERROR_FLOOR)
}

/// Compares analytic gradients with central differences of width `2 step`
/// on up to `coords` randomly chosen coordinates per parameter (all of them
/// when the parameter is smaller). Coordinates at a kink are counted in
/// [`GradCheckReport::kinks`] instead of being scored.
pub fn gradient_check<O: Objective>(obj: &mut O, step: f64, coords: usize, seed: u64) -> Result<GradCheckReport> {
    let mid = obj.loss_and_grad()?;
    let analytic: Vec<(String, Vec<f64>)> = obj
        .params_mut()
        .into_iter()
        .map(|p| (p.name.clone(), p.grad.data().to_vec()))
        .collect();
    let mut rng = seeded(seed);
    let mut per_param = Vec::new();
    let mut kinks = 0;
    for (pi, (name, grad)) in analytic.iter().enumerate() {
        let n = grad.len();
        let picks: Vec<usize> = if n <= coords {
            (0..n).collect()
        } else {
            (0..coords).map(|_| rng.random_range(0..n)).collect()
        };
        let mut worst: f64 = 0.0;
        let mut scored = 0;
        for &j in &picks {
            let orig = obj.params_mut()[pi].value.data()[j];
            obj.params_mut()[pi].value.data_mut()[j] = orig + step;
            let up = obj.loss()?;
            obj.params_mut()[pi].value.data_mut()[j] = orig - step;
            let down = obj.loss()?;
            obj.params_mut()[pi].value.data_mut()[j] = orig;
            if straddles_kink(up, mid, down, step) {
                kinks += 1;
                continue;
            }
            let numeric = (up - down) / (2.0 * step);
            worst = worst.max(rel_error(grad[j], numeric));
            scored += 1;
        }
        per_param.push((name.clone(), worst, scored));
    }
    Ok(GradCheckReport { per_param, kinks })
}

//! Agreement and classification metrics, fold aggregation and significance
//! testing.

mod permutation;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use permutation::{permutation_test, Pairing};
pub use table::{render_table, significance_marker, TableRow, TABLE_COLUMNS};

use crate::corpus::{ArgComponent, Specificity};
use crate::error::{Error, Result};

/// Square count matrix, rows gold and columns predicted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    k: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(k: usize) -> Self {
        ConfusionMatrix {
            k,
            counts: vec![0; k * k],
        }
    }

    pub fn from_counts(k: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != k * k {
            return Err(Error::Validation(format!("{} counts for a {k}x{k} matrix", counts.len())));
        }
        Ok(ConfusionMatrix { k, counts })
    }

    pub fn from_pairs(k: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut cm = Self::new(k);
        for (g, p) in pairs {
            cm.add(g, p);
        }
        cm
    }

    pub fn add(&mut self, gold: usize, pred: usize) {
        self.counts[gold * self.k + pred] += 1;
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn at(&self, gold: usize, pred: usize) -> u64 {
        self.counts[gold * self.k + pred]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        (0..self.k).map(|j| self.at(i, j)).sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        (0..self.k).map(|i| self.at(i, j)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.k).map(<[u64]>::to_vec).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    None,
    Quadratic,
}

/// Integer disagreement weight; the quadratic weight `((i-j)/(K-1))^2` is
/// scaled by `(K-1)^2`, which cancels in the kappa ratio.
fn disagreement_weight(i: usize, j: usize, w: Weighting) -> i128 {
    let d = i.abs_diff(j) as i128;
    match w {
        Weighting::None => i128::from(d != 0),
        Weighting::Quadratic => d * d,
    }
}

/// Kappa with a flag set when the expected disagreement is zero (a single
/// class in both gold and predictions), in which case the value is 0.
///
/// Computed as `(E - N * O) / E` with `O = sum w_ij n_ij` and
/// `E = sum w_ij row_i col_j` in exact integer arithmetic, so the only
/// rounding is the final division.
pub fn cohen_kappa_flagged(cm: &ConfusionMatrix, weighting: Weighting) -> Result<(f64, bool)> {
    let n = cm.total();
    if n == 0 {
        return Err(Error::Validation("kappa of an empty confusion matrix".into()));
    }
    let k = cm.k();
    let rows: Vec<i128> = (0..k).map(|i| i128::from(cm.row_sum(i))).collect();
    let cols: Vec<i128> = (0..k).map(|j| i128::from(cm.col_sum(j))).collect();
    let (mut obs, mut exp) = (0i128, 0i128);
    for i in 0..k {
        for j in 0..k {
            let w = disagreement_weight(i, j, weighting);
            obs += w * i128::from(cm.at(i, j));
            exp += w * rows[i] * cols[j];
        }
    }
    if exp == 0 {
        return Ok((0.0, true));
    }
    Ok(((exp - i128::from(n) * obs) as f64 / exp as f64, false))
}

pub fn cohen_kappa(cm: &ConfusionMatrix, weighting: Weighting) -> Result<f64> {
    cohen_kappa_flagged(cm, weighting).map(|r| r.0)
}

/// Per-class and macro-averaged precision, recall and F. A zero denominator
/// yields 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f: Vec<f64>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 { 0.0 } else { a / b }
}

pub fn prf(cm: &ConfusionMatrix) -> Result<Prf> {
    if cm.total() == 0 {
        return Err(Error::Validation("precision/recall of an empty confusion matrix".into()));
    }
    let k = cm.k();
    let mut p = Vec::with_capacity(k);
    let mut r = Vec::with_capacity(k);
    let mut f = Vec::with_capacity(k);
    for c in 0..k {
        let tp = cm.at(c, c) as f64;
        let pc = ratio(tp, cm.col_sum(c) as f64);
        let rc = ratio(tp, cm.row_sum(c) as f64);
        p.push(pc);
        r.push(rc);
        f.push(ratio(2.0 * pc * rc, pc + rc));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / k as f64;
    Ok(Prf {
        macro_precision: mean(&p),
        macro_recall: mean(&r),
        macro_f: mean(&f),
        precision: p,
        recall: r,
        f,
    })
}

/// Scores of one evaluation (a fold, or the fold mean).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub kappa: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f: f64,
    /// F per argument class, keyed by class name.
    pub per_class_f: BTreeMap<String, f64>,
    pub support: BTreeMap<String, u64>,
    /// Number of evaluations whose kappa was degenerate (0 or 1 for a fold).
    pub degenerate_kappa: usize,
    /// Quadratic-weighted kappa of the specificity head, when present.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec_kappa_quadratic: Option<f64>,
}

impl EvaluationReport {
    pub fn f_of(&self, c: ArgComponent) -> f64 {
        self.per_class_f[c.as_str()]
    }
}

/// Confusion matrix over argument classes in `ArgComponent` index order.
pub fn arg_confusion(gold: &[ArgComponent], pred: &[ArgComponent]) -> ConfusionMatrix {
    ConfusionMatrix::from_pairs(3, gold.iter().zip(pred).map(|(g, p)| (g.index(), p.index())))
}

pub fn evaluate(gold: &[ArgComponent], pred: &[ArgComponent]) -> Result<EvaluationReport> {
    if gold.len() != pred.len() {
        return Err(Error::Validation(format!("{} gold labels vs {} predictions", gold.len(), pred.len())));
    }
    let cm = arg_confusion(gold, pred);
    let (kappa, degenerate) = cohen_kappa_flagged(&cm, Weighting::None)?;
    let s = prf(&cm)?;
    let mut per_class_f = BTreeMap::new();
    let mut support = BTreeMap::new();
    for c in ArgComponent::ALL {
        per_class_f.insert(c.as_str().to_string(), s.f[c.index()]);
        support.insert(c.as_str().to_string(), cm.row_sum(c.index()));
    }
    Ok(EvaluationReport {
        kappa,
        macro_precision: s.macro_precision,
        macro_recall: s.macro_recall,
        macro_f: s.macro_f,
        per_class_f,
        support,
        degenerate_kappa: usize::from(degenerate),
        spec_kappa_quadratic: None,
    })
}

pub fn spec_kappa(gold: &[Specificity], pred: &[Specificity]) -> Result<f64> {
    let cm = ConfusionMatrix::from_pairs(3, gold.iter().zip(pred).map(|(g, p)| (g.rank(), p.rank())));
    cohen_kappa(&cm, Weighting::Quadratic)
}

/// Unweighted mean of each metric over folds; supports are summed and
/// degenerate-kappa flags counted.
pub fn mean_report(folds: &[EvaluationReport]) -> Result<EvaluationReport> {
    if folds.is_empty() {
        return Err(Error::Validation("no folds to aggregate".into()));
    }
    let n = folds.len() as f64;
    let mean = |f: &dyn Fn(&EvaluationReport) -> f64| folds.iter().map(f).sum::<f64>() / n;
    let mut per_class_f = BTreeMap::new();
    let mut support = BTreeMap::new();
    for c in ArgComponent::ALL {
        let key = c.as_str();
        per_class_f.insert(key.to_string(), mean(&|r| r.per_class_f[key]));
        support.insert(key.to_string(), folds.iter().map(|r| r.support[key]).sum());
    }
    let spec = folds
        .iter()
        .map(|r| r.spec_kappa_quadratic)
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.iter().sum::<f64>() / n);
    Ok(EvaluationReport {
        kappa: mean(&|r| r.kappa),
        macro_precision: mean(&|r| r.macro_precision),
        macro_recall: mean(&|r| r.macro_recall),
        macro_f: mean(&|r| r.macro_f),
        per_class_f,
        support,
        degenerate_kappa: folds.iter().map(|r| r.degenerate_kappa).sum(),
        spec_kappa_quadratic: spec,
    })
}

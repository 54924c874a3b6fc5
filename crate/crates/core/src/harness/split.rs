use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::rng::Prng;

/// One cross-validation fold as transcript indices into the corpus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Leave-one-transcript-out: fold `i` tests on transcript `i`.
pub fn split_loo(corpus: &Corpus) -> Result<Vec<Fold>> {
    let n = corpus.transcripts().len();
    if n < 2 {
        return Err(Error::Validation(format!("cross validation needs at least 2 transcripts, got {n}")));
    }
    Ok((0..n)
        .map(|t| Fold {
            train: (0..n).filter(|&i| i != t).collect(),
            test: vec![t],
        })
        .collect())
}

/// `k` folds by transcript, transcript `i` going to fold `i mod k`.
pub fn split_kfold(corpus: &Corpus, k: usize) -> Result<Vec<Fold>> {
    let n = corpus.transcripts().len();
    if k < 2 || k > n {
        return Err(Error::Validation(format!("k-fold needs 2 <= k <= {n} transcripts, got k = {k}")));
    }
    Ok((0..k)
        .map(|f| Fold {
            train: (0..n).filter(|i| i % k != f).collect(),
            test: (0..n).filter(|i| i % k == f).collect(),
        })
        .collect())
}

/// Random oversampling to the majority count. The originals come first in
/// their input order, followed by duplicates for each minority class (in
/// class order) drawn uniformly with replacement from that class.
pub fn oversample<T: Clone>(items: &[T], label: impl Fn(&T) -> usize, classes: &[&str], rng: &mut Prng) -> Result<Vec<T>> {
    let k = classes.len();
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, it) in items.iter().enumerate() {
        by_class[label(it)].push(i);
    }
    if let Some(c) = by_class.iter().position(Vec::is_empty) {
        return Err(Error::MissingClass(classes[c].to_string()));
    }
    let target = by_class.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = items.to_vec();
    for members in &by_class {
        for _ in members.len()..target {
            out.push(items[members[rng.random_range(0..members.len())]].clone());
        }
    }
    Ok(out)
}

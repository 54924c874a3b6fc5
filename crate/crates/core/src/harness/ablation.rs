use serde::{Deserialize, Serialize};

use super::{run_experiment_with, CvReport, Experiment};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::FeatureGroup;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    /// The unmodified experiment.
    pub reference: CvReport,
    /// One run per removed group, in the order requested.
    pub removed: Vec<(FeatureGroup, CvReport)>,
}

impl AblationReport {
    /// Fold-mean kappa change caused by removing `group`.
    pub fn kappa_delta(&self, group: FeatureGroup) -> Option<f64> {
        self.removed
            .iter()
            .find(|(g, _)| *g == group)
            .map(|(_, r)| r.aggregate.kappa - self.reference.aggregate.kappa)
    }
}

/// Reruns `exp` once per group in `groups` with that group removed. An empty
/// `groups` means every group of the experiment's feature sets.
pub fn run_ablation(
    corpus: &Corpus,
    exp: &Experiment,
    groups: &[FeatureGroup],
    threads: Option<usize>,
) -> Result<AblationReport> {
    if !exp.model.uses_features() {
        return Err(Error::Config("ablation needs an experiment with handcrafted feature sets".into()));
    }
    let groups: Vec<FeatureGroup> = if groups.is_empty() {
        FeatureGroup::ALL
            .into_iter()
            .filter(|g| exp.model.feature_sets.contains(&g.set()))
            .collect()
    } else {
        groups.to_vec()
    };
    for g in &groups {
        if !exp.model.feature_sets.contains(&g.set()) {
            return Err(Error::Config(format!(
                "feature group {} is not part of the experiment's feature sets",
                g.as_str()
            )));
        }
    }
    let reference = run_experiment_with(corpus, exp, threads)?;
    let mut removed = Vec::with_capacity(groups.len());
    for g in groups {
        let mut e = exp.clone();
        if !e.features.exclude.contains(&g) {
            e.features.exclude.push(g);
        }
        removed.push((g, run_experiment_with(corpus, &e, threads)?));
    }
    Ok(AblationReport { reference, removed })
}

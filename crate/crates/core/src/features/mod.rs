//! Handcrafted feature extraction.
//!
//! Dense features come from a fixed catalog ([`wlda`] and
//! [`dialogue::extract_semantic_density`]); sparse blocks (tf-idf and POS
//! n-gram counts) are indexed through vocabularies fitted on a training
//! fold. A [`FeatureSchema`] freezes both and remembers which transcripts it
//! was fitted on.

mod catalog;
pub mod dialogue;
pub mod wlda;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::{Lexicons, TokenizedMove};

pub use dialogue::{
    extract_pos_ngrams, extract_semantic_density, fit_pos_ngrams, fit_tfidf, transform_tfidf, NgramVocab,
    TfidfConfig, TfidfModel,
};
pub use catalog::{feature_catalog, render_feature_catalog, CatalogEntry};
pub use wlda::extract_wlda;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    Wlda,
    Dialogue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    WldaLexical,
    WldaParse,
    WldaStructural,
    WldaContext,
    DlgSemanticDensity,
    DlgLexical,
    DlgSyntax,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 7] = [
        FeatureGroup::WldaLexical,
        FeatureGroup::WldaParse,
        FeatureGroup::WldaStructural,
        FeatureGroup::WldaContext,
        FeatureGroup::DlgSemanticDensity,
        FeatureGroup::DlgLexical,
        FeatureGroup::DlgSyntax,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::WldaLexical => "wlda_lexical",
            FeatureGroup::WldaParse => "wlda_parse",
            FeatureGroup::WldaStructural => "wlda_structural",
            FeatureGroup::WldaContext => "wlda_context",
            FeatureGroup::DlgSemanticDensity => "dlg_semantic_density",
            FeatureGroup::DlgLexical => "dlg_lexical",
            FeatureGroup::DlgSyntax => "dlg_syntax",
        }
    }

    pub fn set(self) -> FeatureSet {
        match self {
            FeatureGroup::WldaLexical
            | FeatureGroup::WldaParse
            | FeatureGroup::WldaStructural
            | FeatureGroup::WldaContext => FeatureSet::Wlda,
            _ => FeatureSet::Dialogue,
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature group {s:?}")))
    }
}

/// A move together with the neighbours and position used by context and
/// structural features.
#[derive(Clone, Copy, Debug)]
pub struct MoveView<'a> {
    pub transcript_id: &'a str,
    pub tok: &'a TokenizedMove,
    pub prev: Option<&'a TokenizedMove>,
    pub next: Option<&'a TokenizedMove>,
    pub position: usize,
    pub transcript_len: usize,
}

/// Feature values aligned with a [`FeatureSchema`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureVector {
    pub dense: Vec<f64>,
    /// Strictly increasing indices into the schema's sparse space.
    pub sparse: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub sets: Vec<FeatureSet>,
    pub exclude: Vec<FeatureGroup>,
    pub min_df: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            sets: vec![FeatureSet::Wlda, FeatureSet::Dialogue],
            exclude: Vec::new(),
            min_df: 2,
        }
    }
}

impl FeatureConfig {
    pub fn with_sets(sets: &[FeatureSet]) -> Self {
        FeatureConfig {
            sets: sets.to_vec(),
            ..FeatureConfig::default()
        }
    }

    pub fn includes(&self, group: FeatureGroup) -> bool {
        self.sets.contains(&group.set()) && !self.exclude.contains(&group)
    }
}

/// Frozen feature layout for one training fold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub config: FeatureConfig,
    pub dense_names: Vec<String>,
    pub dense_groups: Vec<FeatureGroup>,
    pub tfidf: Option<TfidfModel>,
    pub pos_ngrams: Option<NgramVocab>,
    /// Sorted transcript ids whose moves were used for fitting.
    pub fitted_on: Vec<String>,
}

impl FeatureSchema {
    /// Fits sparse vocabularies on `train`. Dense names follow catalog order.
    pub fn fit(train: &[MoveView<'_>], config: &FeatureConfig) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Validation("cannot fit a feature schema on an empty training set".into()));
        }
        let mut dense_names = Vec::new();
        let mut dense_groups = Vec::new();
        if config.sets.contains(&FeatureSet::Wlda) {
            for (name, group) in wlda::CATALOG {
                if config.includes(*group) {
                    dense_names.push(name.to_string());
                    dense_groups.push(*group);
                }
            }
        }
        let dialogue = config.sets.contains(&FeatureSet::Dialogue);
        if dialogue && config.includes(FeatureGroup::DlgSemanticDensity) {
            for name in dialogue::SEMANTIC_DENSITY_NAMES {
                dense_names.push(name.to_string());
                dense_groups.push(FeatureGroup::DlgSemanticDensity);
            }
        }
        let docs: Vec<&TokenizedMove> = train.iter().map(|v| v.tok).collect();
        // idf is needed by the mean-idf density feature even without the lexical block
        let tfidf = dialogue
            .then(|| {
                fit_tfidf(
                    &docs,
                    &TfidfConfig {
                        min_df: config.min_df,
                        ngram_max: 2,
                    },
                )
            })
            .transpose()?;
        let pos_ngrams = (dialogue && config.includes(FeatureGroup::DlgSyntax))
            .then(|| fit_pos_ngrams(&docs, config.min_df))
            .transpose()?;
        let fitted_on: BTreeSet<String> = train.iter().map(|v| v.transcript_id.to_string()).collect();
        Ok(FeatureSchema {
            config: config.clone(),
            dense_names,
            dense_groups,
            tfidf,
            pos_ngrams,
            fitted_on: fitted_on.into_iter().collect(),
        })
    }

    pub fn dense_dim(&self) -> usize {
        self.dense_names.len()
    }

    fn tfidf_dim(&self) -> usize {
        match &self.tfidf {
            Some(m) if self.config.includes(FeatureGroup::DlgLexical) => m.len(),
            _ => 0,
        }
    }

    pub fn sparse_dim(&self) -> usize {
        self.tfidf_dim() + self.pos_ngrams.as_ref().map_or(0, NgramVocab::len)
    }

    pub fn dim(&self) -> usize {
        self.dense_dim() + self.sparse_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn group_of(&self, dense_index: usize) -> FeatureGroup {
        self.dense_groups[dense_index]
    }

    pub fn transform(&self, view: &MoveView<'_>, lex: &Lexicons) -> FeatureVector {
        let mut named: Vec<(&'static str, f64)> = Vec::new();
        if self.config.sets.contains(&FeatureSet::Wlda) {
            named.extend(extract_wlda(view, lex));
        }
        if self.config.includes(FeatureGroup::DlgSemanticDensity) {
            named.extend(extract_semantic_density(view.tok, lex, self.tfidf.as_ref()));
        }
        let dense: Vec<f64> = self
            .dense_names
            .iter()
            .map(|n| {
                named
                    .iter()
                    .find(|(k, _)| k == n)
                    .map(|(_, v)| *v)
                    .expect("catalog covers every schema name")
            })
            .collect();
        let mut sparse = Vec::new();
        if self.tfidf_dim() > 0 {
            sparse.extend(transform_tfidf(self.tfidf.as_ref().unwrap(), view.tok));
        }
        if let Some(vocab) = &self.pos_ngrams {
            let offset = self.tfidf_dim();
            sparse.extend(
                extract_pos_ngrams(view.tok, vocab)
                    .into_iter()
                    .map(|(i, v)| (i + offset, v)),
            );
        }
        FeatureVector { dense, sparse }
    }

    /// True when none of `test_transcript`'s moves contributed to fitting.
    pub fn is_clean_for(&self, test_transcript: &str) -> bool {
        self.fitted_on.binary_search_by(|t| t.as_str().cmp(test_transcript)).is_err()
    }
}

/// Builds the feature views for every move of a transcript.
pub fn transcript_views<'a>(transcript_id: &'a str, toks: &'a [TokenizedMove]) -> Vec<MoveView<'a>> {
    let n = toks.len();
    (0..n)
        .map(|i| MoveView {
            transcript_id,
            tok: &toks[i],
            prev: i.checked_sub(1).map(|p| &toks[p]),
            next: toks.get(i + 1),
            position: i,
            transcript_len: n,
        })
        .collect()
}

/// Zero-mean unit-variance scaling fitted on training vectors. Constant
/// columns keep a scale of 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>, dim: usize) -> Self {
        let mut n = 0usize;
        let mut sum = vec![0.0; dim];
        let mut sq = vec![0.0; dim];
        for r in rows {
            n += 1;
            for (j, v) in r.iter().enumerate() {
                sum[j] += v;
                sq[j] += v * v;
            }
        }
        let nf = n.max(1) as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / nf).collect();
        let scale = sq
            .iter()
            .zip(&mean)
            .map(|(s, m)| {
                let var = (s / nf - m * m).max(0.0);
                if var > 1e-12 { var.sqrt() } else { 1.0 }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

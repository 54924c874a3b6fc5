//! Online-dialogue features: semantic density with specificity surface
//! statistics, tf-idf over word uni/bigrams, and POS n-gram counts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::{Lexicons, TokenizedMove};

pub const SEMANTIC_DENSITY_NAMES: &[&str] = &[
    "dlg_pronouns",
    "dlg_word_len_mean",
    "dlg_word_len_max",
    "dlg_word_len_sd",
    "dlg_len_1_3",
    "dlg_len_4_6",
    "dlg_len_7_9",
    "dlg_len_10_plus",
    "dlg_spec_tokens",
    "dlg_spec_stopword_frac",
    "dlg_spec_digit_tokens",
    "dlg_spec_polar_words",
    "dlg_spec_capitalized",
    "dlg_spec_mean_idf",
];

/// Pronoun count, word-length statistics and buckets, and the specificity
/// surface block. Word tokens are tokens with an alphanumeric character.
/// `idf` supplies the training-fold idf for the mean-idf feature; without
/// it that feature is 0.
pub fn extract_semantic_density(
    m: &TokenizedMove,
    lex: &Lexicons,
    idf: Option<&TfidfModel>,
) -> Vec<(&'static str, f64)> {
    let words: Vec<&str> = m.word_tokens().collect();
    let lens: Vec<f64> = words.iter().map(|w| w.chars().count() as f64).collect();
    let n = words.len() as f64;
    let (mean, sd) = crate::corpus::stats::mean_sd(&lens);
    let max = lens.iter().copied().fold(0.0, f64::max);
    let bucket = |lo: f64, hi: f64| lens.iter().filter(|&&l| l >= lo && l <= hi).count() as f64;
    let stop = words.iter().filter(|w| lex.stopwords.contains(w)).count() as f64;
    let mean_idf = match idf {
        Some(model) if !words.is_empty() => words.iter().map(|w| model.idf_or_unseen(w)).sum::<f64>() / n,
        _ => 0.0,
    };
    let values = [
        words.iter().filter(|w| lex.pronouns.contains(w)).count() as f64,
        mean,
        max,
        sd,
        bucket(1.0, 3.0),
        bucket(4.0, 6.0),
        bucket(7.0, 9.0),
        bucket(10.0, f64::INFINITY),
        n,
        if words.is_empty() { 0.0 } else { stop / n },
        words.iter().filter(|w| w.chars().any(|c| c.is_ascii_digit())).count() as f64,
        words.iter().filter(|w| lex.polar_words.contains(w)).count() as f64,
        m.capitalized as f64,
        mean_idf,
    ];
    SEMANTIC_DENSITY_NAMES.iter().copied().zip(values).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TfidfConfig {
    pub min_df: usize,
    pub ngram_max: usize,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        TfidfConfig { min_df: 2, ngram_max: 2 }
    }
}

pub const TFIDF_FORMAT: &str = "argmine-tfidf v1";

/// Frozen tf-idf vocabulary. Terms are ordered lexicographically and
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    pub format: String,
    pub config: TfidfConfig,
    pub n_docs: usize,
    pub terms: Vec<String>,
    pub idf: Vec<f64>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

fn word_ngrams(words: &[&str], max_n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for w in words.windows(n) {
            out.push(w.join(" "));
        }
    }
    out
}

impl TfidfModel {
    fn build_index(&mut self) {
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn idf_of(&self, term: &str) -> Option<f64> {
        self.index_of(term).map(|i| self.idf[i])
    }

    /// idf of a vocabulary term, or the idf of a term with zero document
    /// frequency.
    pub fn idf_or_unseen(&self, term: &str) -> f64 {
        self.idf_of(term)
            .unwrap_or_else(|| ((1.0 + self.n_docs as f64) / 1.0).ln() + 1.0)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut m: TfidfModel = serde_json::from_slice(&fs::read(path)?)?;
        if m.format != TFIDF_FORMAT {
            return Err(Error::Format(format!("expected {TFIDF_FORMAT:?}, found {:?}", m.format)));
        }
        if m.terms.len() != m.idf.len() {
            return Err(Error::Format("terms and idf tables differ in length".into()));
        }
        m.build_index();
        Ok(m)
    }
}

pub fn fit_tfidf(docs: &[&TokenizedMove], config: &TfidfConfig) -> Result<TfidfModel> {
    if docs.is_empty() {
        return Err(Error::Validation("cannot fit tf-idf on an empty training set".into()));
    }
    if config.min_df == 0 {
        return Err(Error::Config("min_df must be at least 1".into()));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for d in docs {
        let words: Vec<&str> = d.word_tokens().collect();
        let terms: BTreeSet<String> = word_ngrams(&words, config.ngram_max).into_iter().collect();
        for t in terms {
            *df.entry(t).or_default() += 1;
        }
    }
    let n = docs.len() as f64;
    let (terms, idf): (Vec<String>, Vec<f64>) = df
        .into_iter()
        .filter(|(_, c)| *c >= config.min_df)
        .map(|(t, c)| {
            let idf = ((1.0 + n) / (1.0 + c as f64)).ln() + 1.0;
            (t, idf)
        })
        .unzip();
    let mut model = TfidfModel {
        format: TFIDF_FORMAT.to_string(),
        config: *config,
        n_docs: docs.len(),
        terms,
        idf,
        index: HashMap::new(),
    };
    model.build_index();
    Ok(model)
}

/// L2-normalized `tf * idf` over vocabulary terms; out-of-vocabulary terms
/// are ignored, so a move with no known terms maps to an empty block.
pub fn transform_tfidf(model: &TfidfModel, m: &TokenizedMove) -> Vec<(usize, f64)> {
    let words: Vec<&str> = m.word_tokens().collect();
    let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
    for t in word_ngrams(&words, model.config.ngram_max) {
        if let Some(i) = model.index_of(&t) {
            *tf.entry(i).or_default() += 1.0;
        }
    }
    let mut out: Vec<(usize, f64)> = tf.into_iter().map(|(i, c)| (i, c * model.idf[i])).collect();
    let norm = out.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, v) in &mut out {
            *v /= norm;
        }
    }
    out
}

/// Vocabulary of POS 1-, 2- and 3-grams (tags joined by a space).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NgramVocab {
    pub terms: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl NgramVocab {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_terms(mut terms: Vec<String>) -> Self {
        terms.sort();
        terms.dedup();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        NgramVocab { terms, index }
    }
}

fn pos_ngrams(m: &TokenizedMove) -> Vec<String> {
    let mut out = Vec::new();
    for s in 0..m.sentences.len() {
        let tags = m.sentence_tags(s);
        for n in 1..=3 {
            for w in tags.windows(n) {
                out.push(w.join(" "));
            }
        }
    }
    out
}

pub fn fit_pos_ngrams(docs: &[&TokenizedMove], min_df: usize) -> Result<NgramVocab> {
    if docs.is_empty() {
        return Err(Error::Validation("cannot fit POS n-grams on an empty training set".into()));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for d in docs {
        let grams: BTreeSet<String> = pos_ngrams(d).into_iter().collect();
        for g in grams {
            *df.entry(g).or_default() += 1;
        }
    }
    Ok(NgramVocab::from_terms(
        df.into_iter().filter(|(_, c)| *c >= min_df.max(1)).map(|(t, _)| t).collect(),
    ))
}

/// Counts of in-vocabulary POS n-grams; n-grams never cross sentences.
pub fn extract_pos_ngrams(m: &TokenizedMove, vocab: &NgramVocab) -> Vec<(usize, f64)> {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for g in pos_ngrams(m) {
        if let Some(&i) = vocab.index.get(&g) {
            *counts.entry(i).or_default() += 1.0;
        }
    }
    counts.into_iter().collect()
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ArgComponent, Corpus, Specificity};
use crate::textproc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub transcripts: usize,
    pub moves: usize,
    pub arg_counts: BTreeMap<ArgComponent, usize>,
    pub spec_counts: BTreeMap<Specificity, usize>,
    pub moves_per_transcript_mean: f64,
    pub moves_per_transcript_sd: f64,
    pub words_per_move_mean: f64,
    pub words_per_move_sd: f64,
}

/// Label counts plus mean and population standard deviation of transcript
/// length (in moves) and move length (in word tokens).
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut arg_counts: BTreeMap<_, _> = ArgComponent::ALL.iter().map(|&a| (a, 0)).collect();
    let mut spec_counts: BTreeMap<_, _> = Specificity::ALL.iter().map(|&s| (s, 0)).collect();
    let mut words = Vec::with_capacity(corpus.num_moves());
    for m in corpus.moves() {
        *arg_counts.get_mut(&m.arg_label).unwrap() += 1;
        *spec_counts.get_mut(&m.spec_label).unwrap() += 1;
        let n = textproc::tokenize(&m.text)
            .iter()
            .filter(|t| textproc::is_word(t))
            .count();
        words.push(n as f64);
    }
    let lengths: Vec<f64> = corpus.transcripts().iter().map(|t| t.moves.len() as f64).collect();
    let (mpt_mean, mpt_sd) = mean_sd(&lengths);
    let (wpm_mean, wpm_sd) = mean_sd(&words);
    CorpusStats {
        transcripts: corpus.transcripts().len(),
        moves: corpus.num_moves(),
        arg_counts,
        spec_counts,
        moves_per_transcript_mean: mpt_mean,
        moves_per_transcript_sd: mpt_sd,
        words_per_move_mean: wpm_mean,
        words_per_move_sd: wpm_sd,
    }
}

pub(crate) fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl CorpusStats {
    /// Plain-text table used by `argmine validate`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("transcripts            {}\n", self.transcripts));
        s.push_str(&format!("moves                  {}\n", self.moves));
        for (a, n) in &self.arg_counts {
            s.push_str(&format!("arg {:<19}{}\n", a.as_str(), n));
        }
        for (sp, n) in &self.spec_counts {
            s.push_str(&format!("spec {:<18}{}\n", sp.as_str(), n));
        }
        s.push_str(&format!(
            "moves/transcript       {:.3} (sd {:.3})\n",
            self.moves_per_transcript_mean, self.moves_per_transcript_sd
        ));
        s.push_str(&format!(
            "words/move             {:.3} (sd {:.3})\n",
            self.words_per_move_mean, self.words_per_move_sd
        ));
        s
    }
}

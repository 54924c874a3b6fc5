//! Seeded synthetic transcripts with a tunable amount of label signal.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{transcript_from_parts, ArgComponent, Corpus, Specificity};
use crate::error::{Error, Result};
use crate::rng::{seeded, Prng};

/// Claim, evidence, warrant counts of the reference classroom dataset.
pub const TABLE2_ARG_COUNTS: [usize; 3] = [1034, 655, 358];

/// P(specificity | argument label), rows indexed by `ArgComponent::index`.
/// Claims lean low, evidence medium, warrants medium/high; the row
/// marginals reproduce the reference 710/996/341 specificity totals when
/// combined with `TABLE2_ARG_COUNTS`.
pub const DEFAULT_SPEC_GIVEN_ARG: [[f64; 3]; 3] = [
    [520.0 / 1034.0, 434.0 / 1034.0, 80.0 / 1034.0],
    [140.0 / 655.0, 380.0 / 655.0, 135.0 / 655.0],
    [50.0 / 358.0, 182.0 / 358.0, 126.0 / 358.0],
];

/// Where the label signal lives in generated text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalStyle {
    /// Class-conditional keywords mixed into shared filler words.
    #[default]
    Lexical,
    /// Fixed-length moves of unique consonant strings whose character
    /// lengths depend on the argument label. Only the word-length buckets
    /// carry signal.
    WordLength,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_transcripts: usize,
    pub moves_per_transcript_mean: f64,
    pub class_signal_strength: f64,
    pub seed: u64,
    pub words_per_move_mean: f64,
    /// Relative argument label frequencies (claim, evidence, warrant).
    pub arg_weights: [f64; 3],
    /// When set, the corpus contains exactly these label counts and the
    /// transcript count is honoured by splitting moves evenly.
    pub exact_arg_counts: Option<[usize; 3]>,
    pub spec_given_arg: [[f64; 3]; 3],
    pub style: SignalStyle,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_transcripts: 10,
            moves_per_transcript_mean: 20.0,
            class_signal_strength: 1.0,
            seed: 0,
            words_per_move_mean: 10.0,
            arg_weights: TABLE2_ARG_COUNTS.map(|c| c as f64),
            exact_arg_counts: None,
            spec_given_arg: DEFAULT_SPEC_GIVEN_ARG,
            style: SignalStyle::Lexical,
        }
    }
}

impl SynthConfig {
    pub fn balanced(mut self) -> Self {
        self.arg_weights = [1.0; 3];
        self
    }

    /// 73 transcripts with the reference label counts.
    pub fn table2(seed: u64) -> Self {
        SynthConfig {
            n_transcripts: 73,
            moves_per_transcript_mean: 2047.0 / 73.0,
            seed,
            exact_arg_counts: Some(TABLE2_ARG_COUNTS),
            ..SynthConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_transcripts < 2 {
            return Err(Error::Config("n_transcripts must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.class_signal_strength) {
            return Err(Error::Config("class_signal_strength must lie in [0, 1]".into()));
        }
        if !(self.moves_per_transcript_mean >= 1.0) {
            return Err(Error::Config("moves_per_transcript_mean must be >= 1".into()));
        }
        if !(self.words_per_move_mean >= 1.0) {
            return Err(Error::Config("words_per_move_mean must be >= 1".into()));
        }
        if self.arg_weights.iter().any(|w| !(*w >= 0.0)) || self.arg_weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config("arg_weights must be non-negative with a positive sum".into()));
        }
        for row in &self.spec_given_arg {
            if row.iter().any(|w| !(*w >= 0.0)) || row.iter().sum::<f64>() <= 0.0 {
                return Err(Error::Config("spec_given_arg rows must be non-negative with a positive sum".into()));
            }
        }
        if let Some(counts) = self.exact_arg_counts {
            if counts.iter().sum::<usize>() < self.n_transcripts {
                return Err(Error::Config("exact_arg_counts must provide at least one move per transcript".into()));
            }
        }
        Ok(())
    }
}

const CLAIM_WORDS: &[&str] = &[
    "think", "believe", "opinion", "probably", "guess", "maybe", "feel", "agree", "seems", "personally",
];
const EVIDENCE_WORDS: &[&str] = &[
    "page", "chapter", "says", "scene", "quote", "book", "wrote", "line", "paragraph", "text",
];
const WARRANT_WORDS: &[&str] = &[
    "because", "means", "therefore", "shows", "reason", "proves", "since", "explains", "so", "why",
];
const LOW_WORDS: &[&str] = &["stuff", "things", "something", "whatever", "kind"];
const MED_WORDS: &[&str] = &["character", "story", "movie", "ending", "part"];
const HIGH_WORDS: &[&str] = &["Fezzik", "Buttercup", "Inigo", "Westley", "Humperdinck"];
const FILLER: &[&str] = &[
    "the", "a", "he", "she", "it", "was", "is", "and", "to", "of", "in", "they", "went", "back", "then",
    "like", "really", "just", "what", "people", "other", "time", "way", "life", "friends", "home",
    "always", "never", "around", "first", "again", "little", "wanted", "made", "know", "got", "did",
    "were", "with", "for", "on", "at", "out", "up", "all", "when", "lost", "turn", "end", "himself",
];
const CONSONANTS: &[u8] = b"bcdfghjkmnpqrtvwxz";

fn arg_words(a: ArgComponent) -> &'static [&'static str] {
    match a {
        ArgComponent::Claim => CLAIM_WORDS,
        ArgComponent::Evidence => EVIDENCE_WORDS,
        ArgComponent::Warrant => WARRANT_WORDS,
    }
}

fn spec_words(s: Specificity) -> &'static [&'static str] {
    match s {
        Specificity::Low => LOW_WORDS,
        Specificity::Med => MED_WORDS,
        Specificity::High => HIGH_WORDS,
    }
}

fn sample_weighted(rng: &mut Prng, weights: &[f64; 3]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if r < *w {
            return i;
        }
        r -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

fn range_around(rng: &mut Prng, mean: f64, floor: usize) -> usize {
    let lo = ((mean * 0.5).ceil() as usize).max(floor);
    let hi = ((mean * 1.5).floor() as usize).max(lo);
    rng.random_range(lo..=hi)
}

fn lexical_text(rng: &mut Prng, cfg: &SynthConfig, arg: ArgComponent, spec: Specificity) -> String {
    let s = cfg.class_signal_strength;
    let n = range_around(rng, cfg.words_per_move_mean, 3);
    let mut words: Vec<&str> = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.random::<f64>();
        let pool = if r < 0.5 * s {
            arg_words(arg)
        } else if r < 0.7 * s {
            spec_words(spec)
        } else {
            FILLER
        };
        words.push(pool[rng.random_range(0..pool.len())]);
    }
    // one or two sentences
    let split = if n >= 8 && rng.random::<bool>() { Some(n / 2) } else { None };
    let mut text = String::new();
    let mut capitalize = true;
    for (i, w) in words.iter().enumerate() {
        if Some(i) == split {
            text.push_str(". ");
            capitalize = true;
        } else if i > 0 {
            text.push(' ');
        }
        if capitalize {
            let mut cs = w.chars();
            if let Some(f) = cs.next() {
                text.extend(f.to_uppercase());
                text.push_str(cs.as_str());
            }
            capitalize = false;
        } else {
            text.push_str(w);
        }
    }
    text.push('.');
    text
}

fn word_length_text(rng: &mut Prng, cfg: &SynthConfig, arg: ArgComponent) -> String {
    let n = cfg.words_per_move_mean.round().max(1.0) as usize;
    let mut words = Vec::with_capacity(n);
    for _ in 0..n {
        let len = if rng.random::<f64>() < cfg.class_signal_strength {
            match arg {
                ArgComponent::Claim => rng.random_range(5..=6),
                ArgComponent::Evidence => rng.random_range(7..=9),
                ArgComponent::Warrant => rng.random_range(10..=12),
            }
        } else {
            rng.random_range(5..=12)
        };
        let w: String = (0..len)
            .map(|_| CONSONANTS[rng.random_range(0..CONSONANTS.len())] as char)
            .collect();
        words.push(w);
    }
    words.join(" ")
}

/// Generates a corpus that is a pure function of `cfg`.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Corpus> {
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);

    let sizes: Vec<usize> = match cfg.exact_arg_counts {
        Some(counts) => {
            let total: usize = counts.iter().sum();
            let base = total / cfg.n_transcripts;
            let extra = total % cfg.n_transcripts;
            (0..cfg.n_transcripts).map(|i| base + usize::from(i < extra)).collect()
        }
        None => (0..cfg.n_transcripts)
            .map(|_| range_around(&mut rng, cfg.moves_per_transcript_mean, 1))
            .collect(),
    };
    let total: usize = sizes.iter().sum();
    let labels: Vec<ArgComponent> = match cfg.exact_arg_counts {
        Some(counts) => {
            let mut l: Vec<ArgComponent> = ArgComponent::ALL
                .iter()
                .zip(counts)
                .flat_map(|(&a, c)| std::iter::repeat_n(a, c))
                .collect();
            l.shuffle(&mut rng);
            l
        }
        None => (0..total)
            .map(|_| ArgComponent::ALL[sample_weighted(&mut rng, &cfg.arg_weights)])
            .collect(),
    };

    let mut labels = labels.into_iter();
    let width = cfg.n_transcripts.to_string().len().max(2);
    let mut transcripts = Vec::with_capacity(cfg.n_transcripts);
    for (t, &size) in sizes.iter().enumerate() {
        let id = format!("t{:0width$}", t, width = width);
        let n_speakers = rng.random_range(2..=5);
        let mut parts = Vec::with_capacity(size);
        for _ in 0..size {
            let arg = labels.next().expect("label count matches move count");
            let spec = Specificity::ALL[sample_weighted(&mut rng, &cfg.spec_given_arg[arg.index()])];
            let text = match cfg.style {
                SignalStyle::Lexical => lexical_text(&mut rng, cfg, arg, spec),
                SignalStyle::WordLength => word_length_text(&mut rng, cfg, arg),
            };
            let speaker = format!("S{}", rng.random_range(1..=n_speakers));
            parts.push((speaker, text, arg, spec));
        }
        transcripts.push(transcript_from_parts(&id, parts));
    }
    Corpus::new(transcripts)
}

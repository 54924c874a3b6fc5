//! The model zoo: majority baseline, multinomial logistic regression, and
//! CNN/LSTM networks over characters or words, optionally concatenated with
//! handcrafted features and optionally with a second specificity head.

mod encode;
mod logreg;
mod neural;
mod train;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use encode::{encode_char, encode_char_seq, encode_word, encode_word_seq, Embeddings, EncodedSeq, WORD_DIM};
pub use logreg::LogReg;
pub use neural::{Encoder, NeuralModel};
pub use train::{split_validation, train, History, TrainConfig};

use crate::corpus::{ArgComponent, Specificity};
use crate::error::{Error, Result};
use crate::features::{FeatureSet, FeatureVector, Standardizer};
use crate::rng::Prng;
use crate::tensor::{read_checkpoint, write_checkpoint, Parameter, Tensor};
use crate::textproc::ALPHABET_SIZE;

pub const NUM_ARG: usize = 3;
pub const NUM_SPEC: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Majority,
    LogReg,
    Cnn,
    Lstm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Char,
    Word,
    None,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Majority => "majority",
            Family::LogReg => "logreg",
            Family::Cnn => "cnn",
            Family::Lstm => "lstm",
        }
    }
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Char => "char",
            Modality::Word => "word",
            Modality::None => "none",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" => Ok(Family::Majority),
            "logreg" => Ok(Family::LogReg),
            "cnn" => Ok(Family::Cnn),
            "lstm" => Ok(Family::Lstm),
            _ => Err(Error::Config(format!("unknown model family {s:?}"))),
        }
    }
}

impl FromStr for Modality {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "char" => Ok(Modality::Char),
            "word" => Ok(Modality::Word),
            "none" => Ok(Modality::None),
            _ => Err(Error::Config(format!("unknown modality {s:?}"))),
        }
    }
}

/// Architecture and optimization settings. Fields left `None` take a
/// family- or modality-dependent default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub hidden: usize,
    pub char_dim: usize,
    pub word_dim: usize,
    pub conv_layers: usize,
    pub filters: usize,
    pub kernel_widths: Option<Vec<usize>>,
    pub fc_width: usize,
    pub dropout: f64,
    pub max_len_char: usize,
    pub max_len_word: usize,
    pub lr: Option<f64>,
    pub batch: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// L2 strength for logistic regression.
    pub l2: f64,
    /// Global gradient-norm clip; LSTMs default to 5, other models to none.
    pub clip_norm: Option<f64>,
    /// Width of the learned projection of sparse handcrafted features.
    pub sparse_proj: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            hidden: 75,
            char_dim: ALPHABET_SIZE,
            word_dim: WORD_DIM,
            conv_layers: 3,
            filters: 64,
            kernel_widths: None,
            fc_width: 128,
            dropout: 0.5,
            max_len_char: 500,
            max_len_word: 100,
            lr: None,
            batch: 32,
            max_epochs: 50,
            patience: 5,
            l2: 1.0,
            clip_norm: None,
            sparse_proj: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: Family,
    #[serde(default = "default_modality")]
    pub modality: Modality,
    #[serde(default)]
    pub feature_sets: Vec<FeatureSet>,
    #[serde(default)]
    pub multitask: bool,
    #[serde(default)]
    pub hyperparams: Hyperparams,
}

fn default_modality() -> Modality {
    Modality::None
}

impl ModelSpec {
    pub fn new(family: Family, modality: Modality, feature_sets: &[FeatureSet], multitask: bool) -> Self {
        ModelSpec {
            family,
            modality,
            feature_sets: feature_sets.to_vec(),
            multitask,
            hyperparams: Hyperparams::default(),
        }
    }

    pub fn majority() -> Self {
        Self::new(Family::Majority, Modality::None, &[], false)
    }

    pub fn logreg(sets: &[FeatureSet]) -> Self {
        Self::new(Family::LogReg, Modality::None, sets, false)
    }

    pub fn validate(&self) -> Result<()> {
        let hp = &self.hyperparams;
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        match self.family {
            Family::Majority if self.modality != Modality::None || !self.feature_sets.is_empty() => {
                return fail("majority baseline takes no modality and no feature sets")
            }
            Family::LogReg if self.modality != Modality::None => return fail("logreg takes modality none"),
            Family::LogReg if self.feature_sets.is_empty() => return fail("logreg needs at least one feature set"),
            Family::Cnn | Family::Lstm if self.modality == Modality::None => {
                return fail("cnn and lstm need modality char or word")
            }
            _ => {}
        }
        if self.multitask && !matches!(self.family, Family::Cnn | Family::Lstm) {
            return fail("multitask requires a cnn or lstm model");
        }
        if hp.char_dim != ALPHABET_SIZE {
            return fail("hyperparams.char_dim must equal the alphabet size (37)");
        }
        if !(0.0..1.0).contains(&hp.dropout) {
            return fail("hyperparams.dropout must be in [0, 1)");
        }
        if hp.batch == 0 || hp.max_epochs == 0 {
            return fail("hyperparams.batch and hyperparams.max_epochs must be positive");
        }
        if hp.hidden == 0 || hp.filters == 0 || hp.fc_width == 0 || hp.word_dim == 0 || hp.sparse_proj == 0 {
            return fail("layer widths must be positive");
        }
        if hp.max_len_char == 0 || hp.max_len_word == 0 {
            return fail("sequence caps must be positive");
        }
        if hp.l2 < 0.0 || hp.lr.is_some_and(|lr| lr <= 0.0) {
            return fail("hyperparams.l2 must be >= 0 and hyperparams.lr > 0");
        }
        if let Some(w) = &hp.kernel_widths {
            if w.len() != hp.conv_layers || w.iter().any(|k| *k == 0) {
                return fail("hyperparams.kernel_widths needs one positive width per conv layer");
            }
        }
        Ok(())
    }

    pub fn kernel_widths(&self) -> Vec<usize> {
        let hp = &self.hyperparams;
        hp.kernel_widths.clone().unwrap_or_else(|| {
            let w = if self.modality == Modality::Char { 5 } else { 3 };
            vec![w; hp.conv_layers]
        })
    }

    pub fn learning_rate(&self) -> f64 {
        self.hyperparams.lr.unwrap_or(match self.family {
            Family::LogReg => 1e-2,
            _ => 1e-3,
        })
    }

    pub fn clip_norm(&self) -> Option<f64> {
        self.hyperparams
            .clip_norm
            .or((self.family == Family::Lstm).then_some(5.0))
    }

    pub fn seq_width(&self) -> usize {
        match self.modality {
            Modality::Char => self.hyperparams.char_dim,
            Modality::Word => self.hyperparams.word_dim,
            Modality::None => 0,
        }
    }

    pub fn max_len(&self) -> usize {
        match self.modality {
            Modality::Char => self.hyperparams.max_len_char,
            _ => self.hyperparams.max_len_word,
        }
    }

    pub fn uses_features(&self) -> bool {
        !self.feature_sets.is_empty()
    }

    /// Short row label such as `cnn-word+features multitask`.
    pub fn label(&self) -> String {
        let mut s = self.family.as_str().to_string();
        if self.modality != Modality::None {
            s.push('-');
            s.push_str(self.modality.as_str());
        }
        if !self.feature_sets.is_empty() {
            let sets: Vec<&str> = self
                .feature_sets
                .iter()
                .map(|f| match f {
                    FeatureSet::Wlda => "wlda",
                    FeatureSet::Dialogue => "dialogue",
                })
                .collect();
            s.push_str(&format!(" [{}]", sets.join("+")));
        }
        if self.multitask {
            s.push_str(" multitask");
        }
        s
    }
}

/// One move as seen by a model: encoded sequence, raw handcrafted features
/// and gold labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    /// Move id `transcript#index`.
    pub id: String,
    pub seq: Option<EncodedSeq>,
    pub features: FeatureVector,
    pub arg: ArgComponent,
    pub spec: Specificity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub arg_probs: [f64; NUM_ARG],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_probs: Option<[f64; NUM_SPEC]>,
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    best
}

impl Prediction {
    pub fn arg(&self) -> ArgComponent {
        ArgComponent::from_index(argmax(&self.arg_probs)).expect("three classes")
    }

    pub fn spec(&self) -> Option<Specificity> {
        self.spec_probs.map(|p| Specificity::from_rank(argmax(&p)).expect("three classes"))
    }
}

/// Loss components of one batch.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossParts {
    pub arg: f64,
    pub spec: f64,
    pub reg: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.arg + self.spec + self.reg
    }
}

/// Which output heads contribute to the loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Heads {
    pub arg: bool,
    pub spec: bool,
}

impl Heads {
    pub const ALL: Heads = Heads { arg: true, spec: true };
    pub const ARG: Heads = Heads { arg: true, spec: false };
    pub const SPEC: Heads = Heads { arg: false, spec: true };
}

/// Class frequencies of the training fold; always predicts the most frequent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Majority {
    pub probs: [f64; NUM_ARG],
}

impl Majority {
    pub fn fit(train: &[Example]) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Validation("majority baseline needs training moves".into()));
        }
        let mut counts = [0.0; NUM_ARG];
        for ex in train {
            counts[ex.arg.index()] += 1.0;
        }
        let n = train.len() as f64;
        Ok(Majority {
            probs: counts.map(|c| c / n),
        })
    }

    /// Frequencies as probabilities; the majority class (first on ties) wins
    /// the argmax.
    pub fn predict(&self) -> Prediction {
        Prediction {
            arg_probs: self.probs,
            spec_probs: None,
        }
    }
}

/// Input sizes a model is built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDims {
    pub dense: usize,
    pub sparse: usize,
}

#[derive(Clone, Debug)]
pub enum Model {
    Majority(Option<Majority>),
    LogReg(LogReg),
    Neural(NeuralModel),
}

/// Constructs an untrained model. `dims` gives the handcrafted feature
/// widths of the fitted schema (ignored by models without features).
pub fn build_model(spec: &ModelSpec, dims: InputDims, seed: u64) -> Result<Model> {
    spec.validate()?;
    let dims = if spec.uses_features() { dims } else { InputDims { dense: 0, sparse: 0 } };
    Ok(match spec.family {
        Family::Majority => Model::Majority(None),
        Family::LogReg => {
            if dims.dense + dims.sparse == 0 {
                return Err(Error::Config("logreg over an empty feature schema".into()));
            }
            Model::LogReg(LogReg::new(spec.clone(), dims))
        }
        Family::Cnn | Family::Lstm => Model::Neural(NeuralModel::new(spec.clone(), dims, seed)),
    })
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    spec: ModelSpec,
    dims: InputDims,
    standardizer: Option<Standardizer>,
    majority: Option<Majority>,
    train_size: usize,
}

impl Model {
    pub fn spec(&self) -> ModelSpec {
        match self {
            Model::Majority(_) => ModelSpec::majority(),
            Model::LogReg(m) => m.spec.clone(),
            Model::Neural(m) => m.spec.clone(),
        }
    }

    pub fn params(&self) -> Vec<&Parameter> {
        match self {
            Model::Majority(_) => Vec::new(),
            Model::LogReg(m) => m.params(),
            Model::Neural(m) => m.params(),
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        match self {
            Model::Majority(_) => Vec::new(),
            Model::LogReg(m) => m.params_mut(),
            Model::Neural(m) => m.params_mut(),
        }
    }

    pub fn num_params(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    pub fn predict(&self, ex: &Example) -> Result<Prediction> {
        match self {
            Model::Majority(Some(m)) => Ok(m.predict()),
            Model::Majority(None) => Err(Error::Validation("majority baseline used before training".into())),
            Model::LogReg(m) => m.predict(ex),
            Model::Neural(m) => m.predict(ex),
        }
    }

    pub fn predict_batch(&self, batch: &[Example]) -> Result<Vec<Prediction>> {
        batch.iter().map(|e| self.predict(e)).collect()
    }

    /// Writes a binary checkpoint (see `docs/FORMATS.md`).
    pub fn save<W: Write>(&self, w: W) -> Result<()> {
        let (dims, standardizer, majority, train_size) = match self {
            Model::Majority(m) => (InputDims { dense: 0, sparse: 0 }, None, m.clone(), 0),
            Model::LogReg(m) => (m.dims, m.standardizer.clone(), None, m.train_size),
            Model::Neural(m) => (m.dims, m.standardizer.clone(), None, 0),
        };
        let header = CheckpointHeader {
            spec: self.spec(),
            dims,
            standardizer,
            majority,
            train_size,
        };
        let json = serde_json::to_string(&header)?;
        let params = self.params();
        let named: Vec<(&str, &Tensor)> = params.iter().map(|p| (p.name.as_str(), &p.value)).collect();
        write_checkpoint(w, &json, &named)
    }

    pub fn load<R: Read>(r: R) -> Result<Model> {
        let (json, tensors) = read_checkpoint(r)?;
        let header: CheckpointHeader = serde_json::from_str(&json)?;
        let mut model = build_model(&header.spec, header.dims, 0)?;
        match &mut model {
            Model::Majority(m) => *m = header.majority,
            Model::LogReg(m) => {
                m.standardizer = header.standardizer;
                m.train_size = header.train_size;
            }
            Model::Neural(m) => m.standardizer = header.standardizer,
        }
        let mut params = model.params_mut();
        if params.len() != tensors.len() {
            return Err(Error::Format(format!(
                "checkpoint has {} tensors, model expects {}",
                tensors.len(),
                params.len()
            )));
        }
        for (p, (name, t)) in params.iter_mut().zip(tensors) {
            if p.name != name || p.value.shape() != t.shape() {
                return Err(Error::Format(format!("checkpoint tensor {name} does not match parameter {}", p.name)));
            }
            p.value = t;
        }
        Ok(model)
    }
}

/// Inverted dropout mask: zero with probability `p`, else `1 / (1 - p)`.
pub(crate) fn dropout_mask(n: usize, p: f64, rng: &mut Prng) -> Vec<f64> {
    use rand::Rng;
    let keep = 1.0 / (1.0 - p);
    (0..n).map(|_| if rng.random::<f64>() < p { 0.0 } else { keep }).collect()
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

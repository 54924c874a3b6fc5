//! Argument component classification for transcribed classroom discussions.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod harness;
pub mod models;
pub mod rng;
pub mod tensor;
pub mod textproc;

pub use error::{Error, Result};
pub use corpus::{ArgComponent, ArgumentMove, Corpus, Specificity, Transcript};
pub use eval::EvaluationReport;
pub use features::{FeatureGroup, FeatureSet};
pub use harness::{CvReport, Experiment, MatrixReport};
pub use models::{Family, Hyperparams, Modality, ModelSpec};

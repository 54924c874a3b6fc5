//! Cross-validation experiments: per-fold feature fitting, oversampling,
//! training and scoring, plus ablation and the full results matrix.

mod ablation;
mod matrix;
mod split;

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ablation::{run_ablation, AblationReport};
pub use matrix::{run_matrix, table3_rows, MatrixOptions, MatrixReport, MatrixRow, REFERENCE_ROW};
pub use split::{oversample, split_kfold, split_loo, Fold};

use crate::corpus::{ArgComponent, Corpus, Specificity};
use crate::error::{Error, Result};
use crate::eval::{evaluate, mean_report, spec_kappa, EvaluationReport};
use crate::features::{transcript_views, FeatureConfig, FeatureGroup, FeatureSchema, FeatureVector, Standardizer};
use crate::models::{
    build_model, encode_char_seq, encode_word_seq, split_validation, train, Embeddings, EncodedSeq, Example, Family,
    History, InputDims, Modality, Model, ModelSpec, TrainConfig,
};
use crate::rng::{derive_seed, seeded};
use crate::textproc::{analyze, default_tagger, Lexicons, TokenizedMove};

/// Env var capping the number of fold workers.
pub const THREADS_ENV: &str = "ARGMINE_THREADS";

/// Seed of the stand-in word vectors used when no embedding file is given.
/// Fixed so the table behaves like a pre-trained one across experiments.
pub const HASHED_EMBEDDING_SEED: u64 = 0x9e37_79b9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureOptions {
    pub exclude: Vec<FeatureGroup>,
    pub min_df: usize,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            exclude: Vec::new(),
            min_df: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationOptions {
    pub fraction: f64,
    /// Carve the validation moves out before oversampling instead of after.
    pub before_oversampling: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            fraction: 0.1,
            before_oversampling: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase", deny_unknown_fields)]
pub enum CvScheme {
    #[default]
    Loo,
    KFold {
        k: usize,
    },
}

fn yes() -> bool {
    true
}

/// A complete experiment configuration, as read from a JSON config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub model: ModelSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub oversample: bool,
    /// Weight the argument loss by inverse class frequency instead of
    /// oversampling.
    #[serde(default)]
    pub class_weights: bool,
    #[serde(default)]
    pub features: FeatureOptions,
    #[serde(default)]
    pub validation: ValidationOptions,
    #[serde(default)]
    pub cv: CvScheme,
    /// GloVe-format text file for word models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<PathBuf>,
}

impl Experiment {
    pub fn new(model: ModelSpec, seed: u64) -> Self {
        Experiment {
            model,
            seed,
            oversample: true,
            class_weights: false,
            features: FeatureOptions::default(),
            validation: ValidationOptions::default(),
            cv: CvScheme::Loo,
            embeddings: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.oversample && self.class_weights {
            return Err(Error::Config("oversample and class_weights are mutually exclusive".into()));
        }
        if !(0.0..0.5).contains(&self.validation.fraction) {
            return Err(Error::Config("validation.fraction must be in [0, 0.5)".into()));
        }
        if self.features.min_df == 0 {
            return Err(Error::Config("features.min_df must be at least 1".into()));
        }
        Ok(())
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            sets: self.model.feature_sets.clone(),
            exclude: self.features.exclude.clone(),
            min_df: self.features.min_df,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let exp: Experiment = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        exp.validate()?;
        Ok(exp)
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub move_id: String,
    pub fold: usize,
    pub gold: ArgComponent,
    pub predicted: ArgComponent,
    pub arg_probs: [f64; 3],
    pub spec_gold: Specificity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_predicted: Option<Specificity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_probs: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub test_transcripts: Vec<String>,
    pub report: EvaluationReport,
    pub train_moves: usize,
    /// Size of the training portion fed to the optimizer (after
    /// oversampling and validation carve-out).
    pub effective_train_moves: usize,
    pub validation_moves: usize,
    pub test_moves: usize,
    pub history: History,
    pub truncated_sequences: usize,
    pub leakage_violations: usize,
}

/// Deterministic run statistics (no wall-clock values).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub folds: usize,
    pub moves: usize,
    pub total_epochs: usize,
    pub truncated_sequences: usize,
    pub leakage_violations: usize,
    pub degenerate_kappa_folds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub experiment: Experiment,
    pub folds: Vec<FoldReport>,
    /// Mean over folds.
    pub aggregate: EvaluationReport,
    /// All predictions scored together.
    pub pooled: EvaluationReport,
    pub predictions: Vec<PredictionRecord>,
    pub runtime: RuntimeStats,
}

impl CvReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Per-move correctness in prediction order.
    pub fn correctness(&self) -> Vec<f64> {
        self.predictions
            .iter()
            .map(|p| f64::from(u8::from(p.gold == p.predicted)))
            .collect()
    }

    /// Accuracy of each fold, in fold order.
    pub fn fold_accuracy(&self) -> Vec<f64> {
        let mut acc = vec![(0.0, 0.0); self.folds.len()];
        for p in &self.predictions {
            acc[p.fold].0 += f64::from(u8::from(p.gold == p.predicted));
            acc[p.fold].1 += 1.0;
        }
        acc.into_iter().map(|(c, n)| if n > 0.0 { c / n } else { 0.0 }).collect()
    }
}

/// Text analysis shared by all folds; nothing here is fitted to labels.
struct Prepared<'c> {
    corpus: &'c Corpus,
    exp: &'c Experiment,
    lex: Lexicons,
    toks: Vec<Vec<TokenizedMove>>,
    chars: Option<Vec<Vec<EncodedSeq>>>,
    embeddings: Option<Arc<Embeddings>>,
}

impl<'c> Prepared<'c> {
    fn new(corpus: &'c Corpus, exp: &'c Experiment) -> Result<Self> {
        let lex = Lexicons::default();
        let tagger = default_tagger();
        let toks = corpus
            .transcripts()
            .iter()
            .map(|t| t.moves.iter().map(|m| analyze(&m.text, tagger, &lex)).collect())
            .collect();
        let spec = &exp.model;
        let chars = (spec.modality == Modality::Char).then(|| {
            corpus
                .transcripts()
                .iter()
                .map(|t| {
                    t.moves
                        .iter()
                        .map(|m| encode_char_seq(&m.text, spec.hyperparams.max_len_char))
                        .collect()
                })
                .collect()
        });
        let embeddings = match (&exp.embeddings, spec.modality) {
            (Some(path), Modality::Word) => Some(Arc::new(Embeddings::load(path, spec.hyperparams.word_dim)?)),
            _ => None,
        };
        Ok(Prepared {
            corpus,
            exp,
            lex,
            toks,
            chars,
            embeddings,
        })
    }

    fn fold_embeddings(&self, train: &[usize]) -> Option<Arc<Embeddings>> {
        if self.exp.model.modality != Modality::Word {
            return None;
        }
        if let Some(e) = &self.embeddings {
            return Some(e.clone());
        }
        let vocab = train
            .iter()
            .flat_map(|&t| self.toks[t].iter().flat_map(|m| m.tokens.iter().map(String::as_str)));
        let dim = self.exp.model.hyperparams.word_dim;
        Some(Arc::new(Embeddings::hashed(vocab, dim, HASHED_EMBEDDING_SEED)))
    }

    fn examples(
        &self,
        transcripts: &[usize],
        schema: Option<&FeatureSchema>,
        emb: Option<&Embeddings>,
        truncated: &mut usize,
    ) -> Vec<Example> {
        let spec = &self.exp.model;
        let mut out = Vec::new();
        for &t in transcripts {
            let tr = &self.corpus.transcripts()[t];
            let views = transcript_views(&tr.id, &self.toks[t]);
            for (i, m) in tr.moves.iter().enumerate() {
                let features = schema.map_or_else(FeatureVector::default, |s| s.transform(&views[i], &self.lex));
                let seq = match spec.modality {
                    Modality::Char => self.chars.as_ref().map(|c| c[t][i].clone()),
                    Modality::Word => emb.map(|e| encode_word_seq(&self.toks[t][i].tokens, e, spec.hyperparams.max_len_word)),
                    Modality::None => None,
                };
                if seq.as_ref().is_some_and(|s| s.truncated) {
                    *truncated += 1;
                }
                out.push(Example {
                    id: m.id(),
                    seq,
                    features,
                    arg: m.arg_label,
                    spec: m.spec_label,
                });
            }
        }
        out
    }
}

struct FoldOutcome {
    report: FoldReport,
    predictions: Vec<(usize, usize, PredictionRecord)>,
}

fn class_weights(examples: &[Example]) -> Vec<f64> {
    let mut counts = [0.0; 3];
    for e in examples {
        counts[e.arg.index()] += 1.0;
    }
    let n = examples.len() as f64;
    counts.iter().map(|c| if *c > 0.0 { n / (3.0 * c) } else { 0.0 }).collect()
}

const ARG_NAMES: [&str; 3] = ["claim", "evidence", "warrant"];

fn run_fold(prep: &Prepared<'_>, index: usize, fold: &Fold) -> Result<FoldOutcome> {
    let exp = prep.exp;
    let spec = &exp.model;
    let corpus = prep.corpus;
    let test_ids: Vec<String> = fold.test.iter().map(|&t| corpus.transcripts()[t].id.clone()).collect();
    let fold_seed = derive_seed(exp.seed, &format!("fold:{}", test_ids.join(",")));
    let mut rng = seeded(fold_seed);

    let schema = if spec.uses_features() {
        let train_views: Vec<_> = fold
            .train
            .iter()
            .flat_map(|&t| transcript_views(&corpus.transcripts()[t].id, &prep.toks[t]))
            .collect();
        Some(FeatureSchema::fit(&train_views, &exp.feature_config())?)
    } else {
        None
    };
    let emb = prep.fold_embeddings(&fold.train);
    let mut truncated = 0;
    let train_set = prep.examples(&fold.train, schema.as_ref(), emb.as_deref(), &mut truncated);
    let test_set = prep.examples(&fold.test, schema.as_ref(), emb.as_deref(), &mut truncated);
    let train_moves = train_set.len();

    let (fit_set, val_set) = if spec.family == Family::Majority {
        (train_set, Vec::new())
    } else if exp.validation.before_oversampling {
        let (fit, val) = split_validation(train_set, exp.validation.fraction, &mut rng);
        let fit = if exp.oversample { oversample(&fit, |e| e.arg.index(), &ARG_NAMES, &mut rng)? } else { fit };
        (fit, val)
    } else {
        let all = if exp.oversample {
            oversample(&train_set, |e| e.arg.index(), &ARG_NAMES, &mut rng)?
        } else {
            train_set
        };
        split_validation(all, exp.validation.fraction, &mut rng)
    };

    let dims = schema.as_ref().map_or(InputDims { dense: 0, sparse: 0 }, |s| InputDims {
        dense: s.dense_dim(),
        sparse: s.sparse_dim(),
    });
    let mut model = build_model(spec, dims, derive_seed(fold_seed, "init"))?;
    let mut cfg = TrainConfig::from_spec(spec);
    if exp.class_weights {
        cfg.class_weights = Some(class_weights(&fit_set));
    }
    let history = train(&mut model, &fit_set, &val_set, &cfg, derive_seed(fold_seed, "train"))?;

    let leakage = audit_leakage(&test_ids, schema.as_ref(), &fit_set, &val_set, &model);
    log::debug!(
        "fold {index} ({}): {} epochs, best {}, leakage {leakage}",
        test_ids.join(","),
        history.epochs_run,
        history.best_epoch
    );

    let mut gold = Vec::with_capacity(test_set.len());
    let mut pred = Vec::with_capacity(test_set.len());
    let mut spec_gold = Vec::new();
    let mut spec_pred = Vec::new();
    let mut predictions = Vec::with_capacity(test_set.len());
    let mut k = 0;
    for &t in &fold.test {
        for mi in 0..corpus.transcripts()[t].moves.len() {
            let ex = &test_set[k];
            k += 1;
            let p = model.predict(ex)?;
            gold.push(ex.arg);
            pred.push(p.arg());
            if let Some(s) = p.spec() {
                spec_gold.push(ex.spec);
                spec_pred.push(s);
            }
            predictions.push((
                t,
                mi,
                PredictionRecord {
                    move_id: ex.id.clone(),
                    fold: index,
                    gold: ex.arg,
                    predicted: p.arg(),
                    arg_probs: p.arg_probs,
                    spec_gold: ex.spec,
                    spec_predicted: p.spec(),
                    spec_probs: p.spec_probs,
                },
            ));
        }
    }
    let mut report = evaluate(&gold, &pred)?;
    if spec.multitask {
        report.spec_kappa_quadratic = Some(spec_kappa(&spec_gold, &spec_pred)?);
    }
    Ok(FoldOutcome {
        report: FoldReport {
            fold: index,
            test_transcripts: test_ids,
            report,
            train_moves,
            effective_train_moves: fit_set.len(),
            validation_moves: val_set.len(),
            test_moves: test_set.len(),
            history,
            truncated_sequences: truncated,
            leakage_violations: leakage,
        },
        predictions,
    })
}

/// Counts ways in which the test fold could have influenced training: the
/// feature schema, the training or validation examples, and the model's
/// standardization statistics.
fn audit_leakage(
    test_ids: &[String],
    schema: Option<&FeatureSchema>,
    fit: &[Example],
    val: &[Example],
    model: &Model,
) -> usize {
    let mut violations = 0;
    if let Some(s) = schema {
        violations += test_ids.iter().filter(|t| !s.is_clean_for(t)).count();
    }
    let tests: HashSet<&str> = test_ids.iter().map(String::as_str).collect();
    let in_test = |e: &Example| tests.contains(e.id.rsplit_once('#').map_or("", |p| p.0));
    violations += fit.iter().chain(val).filter(|e| in_test(e)).count();
    let fitted = match model {
        Model::LogReg(m) => m.standardizer.as_ref().map(|s| (s, m.dims.dense)),
        Model::Neural(m) => m.standardizer.as_ref().map(|s| (s, m.dims.dense)),
        Model::Majority(_) => None,
    };
    if let Some((s, dim)) = fitted {
        let expected = Standardizer::fit(fit.iter().map(|e| e.features.dense.as_slice()), dim);
        if *s != expected {
            violations += 1;
        }
    }
    violations
}

/// Runs cross validation with the worker count from [`THREADS_ENV`].
pub fn run_experiment(corpus: &Corpus, exp: &Experiment) -> Result<CvReport> {
    run_experiment_with(corpus, exp, threads_from_env())
}

/// Runs cross validation on at most `threads` workers (rayon's default when
/// `None`). Results do not depend on the worker count.
pub fn run_experiment_with(corpus: &Corpus, exp: &Experiment, threads: Option<usize>) -> Result<CvReport> {
    exp.validate()?;
    let folds = match exp.cv {
        CvScheme::Loo => split_loo(corpus)?,
        CvScheme::KFold { k } => split_kfold(corpus, k)?,
    };
    let prep = Prepared::new(corpus, exp)?;
    let work = || -> Vec<Result<FoldOutcome>> {
        folds
            .par_iter()
            .enumerate()
            .map(|(i, f)| run_fold(&prep, i, f))
            .collect()
    };
    let outcomes = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut fold_reports = Vec::with_capacity(folds.len());
    let mut predictions = Vec::new();
    for (i, out) in outcomes.into_iter().enumerate() {
        let out = out.map_err(|e| Error::Fold {
            fold: folds[i]
                .test
                .iter()
                .map(|&t| corpus.transcripts()[t].id.clone())
                .collect::<Vec<_>>()
                .join(","),
            source: Box::new(e),
        })?;
        fold_reports.push(out.report);
        predictions.extend(out.predictions);
    }
    predictions.sort_by_key(|(t, m, _)| (*t, *m));
    let predictions: Vec<PredictionRecord> = predictions.into_iter().map(|p| p.2).collect();
    let per_fold: Vec<EvaluationReport> = fold_reports.iter().map(|f| f.report.clone()).collect();
    let aggregate = mean_report(&per_fold)?;
    let gold: Vec<ArgComponent> = predictions.iter().map(|p| p.gold).collect();
    let pred: Vec<ArgComponent> = predictions.iter().map(|p| p.predicted).collect();
    let mut pooled = evaluate(&gold, &pred)?;
    if exp.model.multitask {
        let sg: Vec<Specificity> = predictions.iter().map(|p| p.spec_gold).collect();
        let sp: Vec<Specificity> = predictions.iter().filter_map(|p| p.spec_predicted).collect();
        pooled.spec_kappa_quadratic = Some(spec_kappa(&sg, &sp)?);
    }
    let runtime = RuntimeStats {
        folds: fold_reports.len(),
        moves: predictions.len(),
        total_epochs: fold_reports.iter().map(|f| f.history.epochs_run).sum(),
        truncated_sequences: fold_reports.iter().map(|f| f.truncated_sequences).sum(),
        leakage_violations: fold_reports.iter().map(|f| f.leakage_violations).sum(),
        degenerate_kappa_folds: aggregate.degenerate_kappa,
    };
    Ok(CvReport {
        experiment: exp.clone(),
        folds: fold_reports,
        aggregate,
        pooled,
        predictions,
        runtime,
    })
}

/// Markdown summary of one report: the aggregate row and per-fold rows.
pub fn render_report(report: &CvReport) -> String {
    use crate::eval::{render_table, TableRow};
    let mut s = format!("# {}\n\n", report.experiment.model.label());
    s.push_str("## Fold mean\n\n");
    s.push_str(&render_table(&[TableRow {
        label: report.experiment.model.label(),
        report: Some(&report.aggregate),
        annotation: String::new(),
    }]));
    s.push_str("\n## Pooled\n\n");
    s.push_str(&render_table(&[TableRow {
        label: "all folds".into(),
        report: Some(&report.pooled),
        annotation: String::new(),
    }]));
    s.push_str("\n## Folds\n\n");
    let rows: Vec<TableRow<'_>> = report
        .folds
        .iter()
        .map(|f| TableRow {
            label: f.test_transcripts.join(","),
            report: Some(&f.report),
            annotation: String::new(),
        })
        .collect();
    s.push_str(&render_table(&rows));
    s.push_str(&format!(
        "\nmoves: {}, folds: {}, epochs: {}, truncated sequences: {}, leakage violations: {}, degenerate kappa folds: {}\n",
        report.runtime.moves,
        report.runtime.folds,
        report.runtime.total_epochs,
        report.runtime.truncated_sequences,
        report.runtime.leakage_violations,
        report.runtime.degenerate_kappa_folds
    ));
    s
}

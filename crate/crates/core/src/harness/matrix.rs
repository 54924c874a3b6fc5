use serde::{Deserialize, Serialize};

use super::{run_experiment_with, CvReport, Experiment};
use crate::corpus::Corpus;
use crate::eval::{permutation_test, render_table, significance_marker, Pairing, TableRow};
use crate::features::FeatureSet;
use crate::models::{Family, Hyperparams, Modality, ModelSpec};

/// Row (1-based) every other row is tested against: logistic regression on
/// the essay feature set.
pub const REFERENCE_ROW: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixOptions {
    pub seed: u64,
    /// Applied to every row's model.
    pub hyperparams: Hyperparams,
    pub permutation_iterations: usize,
    pub pairing: Pairing,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        MatrixOptions {
            seed: 0,
            hyperparams: Hyperparams::default(),
            permutation_iterations: 10_000,
            pairing: Pairing::Move,
        }
    }
}

/// The twenty configurations of the results table, in table order.
pub fn table3_rows(opts: &MatrixOptions) -> Vec<(String, Experiment)> {
    let both = [FeatureSet::Wlda, FeatureSet::Dialogue];
    let mut rows = Vec::new();
    let mut push = |label: String, spec: ModelSpec, class_weights: bool| {
        let mut spec = spec;
        spec.hyperparams = opts.hyperparams.clone();
        let mut e = Experiment::new(spec, opts.seed);
        if class_weights {
            e.oversample = false;
            e.class_weights = true;
        }
        rows.push((label, e));
    };
    push("Majority baseline".into(), ModelSpec::majority(), false);
    push(
        "Logistic regression (wLDA features, class weights)".into(),
        ModelSpec::logreg(&[FeatureSet::Wlda]),
        true,
    );
    push("Logistic regression (wLDA features)".into(), ModelSpec::logreg(&[FeatureSet::Wlda]), false);
    push(
        "Logistic regression (wLDA + online dialogue)".into(),
        ModelSpec::logreg(&both),
        false,
    );
    for multitask in [false, true] {
        for modality in [Modality::Char, Modality::Word] {
            for family in [Family::Lstm, Family::Cnn] {
                for sets in [&[][..], &both[..]] {
                    let mut label = String::new();
                    if multitask {
                        label.push_str("Multi-task ");
                    }
                    label.push_str(match modality {
                        Modality::Char => "char ",
                        _ => "word ",
                    });
                    label.push_str(match family {
                        Family::Lstm => "LSTM",
                        _ => "CNN",
                    });
                    if !sets.is_empty() {
                        label.push_str(" + wLDA + online dialogue");
                    }
                    push(label, ModelSpec::new(family, modality, sets, multitask), false);
                }
            }
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub row: usize,
    pub label: String,
    pub experiment: Experiment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CvReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Permutation-test p-value against the reference row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub options: MatrixOptions,
    pub reference_row: usize,
    pub rows: Vec<MatrixRow>,
}

impl MatrixReport {
    pub fn to_markdown(&self) -> String {
        let rows: Vec<TableRow<'_>> = self
            .rows
            .iter()
            .map(|r| TableRow {
                label: r.label.clone(),
                report: r.report.as_ref().map(|c| &c.aggregate),
                annotation: r.p_value.map_or(String::new(), |p| significance_marker(p).to_string()),
            })
            .collect();
        let mut s = render_table(&rows);
        s.push_str(&format!(
            "\nFold-mean scores. `*`, `**`, `***`: p < 0.1, 0.05, 0.01 in a paired sign-flip permutation test \
             ({} iterations, {} pairing) against row {}. F_e, F_w, F_c are per-class F for evidence, warrant, claim.\n",
            self.options.permutation_iterations,
            match self.options.pairing {
                Pairing::Move => "move-level",
                Pairing::Fold => "fold-level",
            },
            self.reference_row
        ));
        let ps: Vec<String> = self
            .rows
            .iter()
            .filter_map(|r| r.p_value.map(|p| format!("row {}: p = {p:.4}", r.row)))
            .collect();
        if !ps.is_empty() {
            s.push_str(&format!("\nPermutation p-values: {}.\n", ps.join("; ")));
        }
        for r in &self.rows {
            if let Some(e) = &r.error {
                s.push_str(&format!("\nRow {} failed: {e}\n", r.row));
            }
        }
        s
    }

    /// Number of rows whose table cells are populated.
    pub fn completed(&self) -> usize {
        self.rows.iter().filter(|r| r.report.is_some()).count()
    }
}

fn paired_scores(r: &CvReport, pairing: Pairing) -> Vec<f64> {
    match pairing {
        Pairing::Move => r.correctness(),
        Pairing::Fold => r.fold_accuracy(),
    }
}

/// Runs every row; a failing row is recorded and the rest continue.
/// `progress` is called after each row.
pub fn run_matrix(
    corpus: &Corpus,
    opts: &MatrixOptions,
    threads: Option<usize>,
    mut progress: impl FnMut(usize, &str, bool),
) -> MatrixReport {
    let mut rows = Vec::new();
    for (i, (label, exp)) in table3_rows(opts).into_iter().enumerate() {
        let result = run_experiment_with(corpus, &exp, threads);
        if let Err(e) = &result {
            log::warn!("row {} ({label}) failed: {e}", i + 1);
        }
        progress(i + 1, &label, result.is_ok());
        let (report, error) = match result {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        rows.push(MatrixRow {
            row: i + 1,
            label,
            experiment: exp,
            report,
            error,
            p_value: None,
        });
    }
    let reference = rows[REFERENCE_ROW - 1]
        .report
        .as_ref()
        .map(|r| paired_scores(r, opts.pairing));
    if let Some(base) = reference {
        for r in rows.iter_mut() {
            if r.row == REFERENCE_ROW {
                continue;
            }
            if let Some(rep) = &r.report {
                let seed = opts.seed.wrapping_add(r.row as u64);
                r.p_value = permutation_test(&paired_scores(rep, opts.pairing), &base, opts.permutation_iterations, seed).ok();
            }
        }
    }
    MatrixReport {
        options: opts.clone(),
        reference_row: REFERENCE_ROW,
        rows,
    }
}

use std::fmt::Write;

use super::EvaluationReport;
use crate::corpus::ArgComponent;

pub const TABLE_COLUMNS: [&str; 7] = ["Kappa", "Precision", "Recall", "F-score", "F_e", "F_w", "F_c"];

/// One row of a results table. `report` is `None` for a failed run.
#[derive(Clone, Debug)]
pub struct TableRow<'a> {
    pub label: String,
    pub report: Option<&'a EvaluationReport>,
    /// Appended to the kappa cell, e.g. significance markers.
    pub annotation: String,
}

/// `***` for p < 0.01, `**` for p < 0.05, `*` for p < 0.1, otherwise empty.
pub fn significance_marker(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Markdown table with one numbered row per entry.
pub fn render_table(rows: &[TableRow<'_>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "| # | Model | {} |", TABLE_COLUMNS.join(" | "));
    let _ = writeln!(s, "|---|---|{}", "---:|".repeat(TABLE_COLUMNS.len()));
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = match row.report {
            Some(r) => vec![
                format!("{:.3}{}", r.kappa, row.annotation),
                format!("{:.3}", r.macro_precision),
                format!("{:.3}", r.macro_recall),
                format!("{:.3}", r.macro_f),
                format!("{:.3}", r.f_of(ArgComponent::Evidence)),
                format!("{:.3}", r.f_of(ArgComponent::Warrant)),
                format!("{:.3}", r.f_of(ArgComponent::Claim)),
            ],
            None => vec!["failed".to_string(); TABLE_COLUMNS.len()],
        };
        let _ = writeln!(s, "| {} | {} | {} |", i + 1, row.label, cells.join(" | "));
    }
    s
}

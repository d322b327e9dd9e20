//! CSV renderings of analysis results. Scores use two decimals everywhere so
//! every surface that prints a table prints identical bytes.

use std::fmt::Write;

use crate::analytics::{MethodComparison, WinLossSummary};
use crate::scheduler::CoverageMatrix;

pub const COMPARISON_HEADER: &str = "item_id,elo_score,elo_rank,cj_score,cj_rank";

/// Two-decimal fixed formatting used for every displayed score.
pub fn format_score(score: f64) -> String {
    format!("{score:.2}")
}

/// One optional-column row of the comparison table; absent methods leave blank cells.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub item_id: u32,
    pub elo: Option<(f64, usize)>,
    pub cj: Option<(f64, usize)>,
}

impl From<&MethodComparison> for Vec<TableRow> {
    fn from(cmp: &MethodComparison) -> Self {
        cmp.rows
            .iter()
            .map(|r| TableRow {
                item_id: r.item_id.0,
                elo: Some((r.elo_score, r.elo_rank)),
                cj: Some((r.cj_score, r.cj_rank)),
            })
            .collect()
    }
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    let cell = |v: Option<(f64, usize)>| match v {
        Some((s, r)) => (format_score(s), r.to_string()),
        None => (String::new(), String::new()),
    };
    for row in rows {
        let (es, er) = cell(row.elo);
        let (cs, cr) = cell(row.cj);
        writeln!(out, "{},{es},{er},{cs},{cr}", row.item_id).expect("writing to a String");
    }
    out
}

pub fn comparison_csv(cmp: &MethodComparison) -> String {
    table_csv(&Vec::<TableRow>::from(cmp))
}

fn grid_csv<T>(rows: impl IntoIterator<Item = Vec<T>>, fmt: impl Fn(&T) -> String) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(&fmt).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Dense grid of dealt-pair counts.
pub fn coverage_csv(coverage: &CoverageMatrix) -> String {
    grid_csv(coverage.rows(), u32::to_string)
}

/// Dense grid of win counts, row beats column.
pub fn wins_csv(summary: &WinLossSummary) -> String {
    grid_csv(summary.wins.rows().map(<[u32]>::to_vec), u32::to_string)
}

/// Dense grid of win shares; cells for pairs that never met are left empty.
pub fn percentages_csv(summary: &WinLossSummary) -> String {
    grid_csv(summary.percentages.iter().cloned(), |p| {
        p.map(|v| format!("{v:.4}")).unwrap_or_default()
    })
}

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ids::ItemIndex;
use crate::rating::WinMatrix;
use crate::store::JudgementRecord;

/// Win counts, encounter counts and win shares for every ordered pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinLossSummary {
    pub wins: WinMatrix,
    /// Symmetric: times `i` and `j` were compared.
    pub encounters: Vec<Vec<u32>>,
    /// Share of the `(i, j)` encounters won by `i`; `None` when they never met.
    pub percentages: Vec<Vec<Option<f64>>>,
}

pub fn win_summary(index: &ItemIndex, log: &[JudgementRecord]) -> Result<WinLossSummary> {
    let wins = WinMatrix::from_records(index, log)?;
    let n = wins.len();
    let encounters: Vec<Vec<u32>> = (0..n)
        .map(|i| (0..n).map(|j| wins.encounters(i, j)).collect())
        .collect();
    let percentages = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match encounters[i][j] {
                    0 => None,
                    e => Some(f64::from(wins.get(i, j)) / f64::from(e)),
                })
                .collect()
        })
        .collect();
    Ok(WinLossSummary {
        wins,
        encounters,
        percentages,
    })
}

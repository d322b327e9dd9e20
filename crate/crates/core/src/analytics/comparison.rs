use serde::{Deserialize, Serialize};

use crate::analytics::correlation::{kendall_tau, pearson_correlation, PValueMethod};
use crate::error::{Error, Result};
use crate::ids::{ItemId, ItemIndex};
use crate::rating::{
    bt_fit, cj_display_scores, elo_replay, rank_order, ranks_from_order, BtPreferences,
    RatingConfig, WinMatrix,
};
use crate::store::JudgementRecord;

/// Agreement statistics between the Elo and Bradley–Terry scorings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    /// `None` when either score vector is constant.
    pub pearson_r: Option<f64>,
    pub kendall_tau: f64,
    pub kendall_p_value: f64,
    pub p_value_method: PValueMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub item_id: ItemId,
    pub elo_score: f64,
    /// 1-based.
    pub elo_rank: usize,
    pub cj_score: f64,
    pub cj_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    /// Sorted by Elo rank.
    pub rows: Vec<ComparisonRow>,
    pub correlation: CorrelationReport,
    /// True when the BT fit needed smoothing.
    pub regularized: bool,
    pub bt: BtPreferences,
}

impl MethodComparison {
    /// `(item, elo, cj)` triples in item order, for scatter plots.
    pub fn scatter(&self) -> Vec<(ItemId, f64, f64)> {
        let mut pts: Vec<_> = self
            .rows
            .iter()
            .map(|r| (r.item_id, r.elo_score, r.cj_score))
            .collect();
        pts.sort_by_key(|p| p.0);
        pts
    }
}

/// Rewrites positional ids in a non-identifiability error into real item ids.
pub(crate) fn relabel(err: Error, index: &ItemIndex) -> Error {
    match err {
        Error::NonIdentifiable { components } => Error::NonIdentifiable {
            components: components
                .into_iter()
                .map(|c| c.into_iter().map(|p| index.id(p.0 as usize)).collect())
                .collect(),
        },
        other => other,
    }
}

/// Fits Bradley–Terry preferences to a log, reporting problems with real item ids.
pub fn fit_log(index: &ItemIndex, log: &[JudgementRecord], config: &RatingConfig) -> Result<BtPreferences> {
    let wins = WinMatrix::from_records(index, log)?;
    bt_fit(&wins, &config.bt).map_err(|e| relabel(e, index))
}

/// Scores one log both ways and measures how well the two rankings agree.
pub fn method_comparison(
    index: &ItemIndex,
    log: &[JudgementRecord],
    config: &RatingConfig,
) -> Result<MethodComparison> {
    if log.is_empty() {
        return Err(Error::InvalidArgument("cannot compare methods on an empty log".into()));
    }
    let elo = elo_replay(index, log, &config.elo)?;
    let bt = fit_log(index, log, config)?;
    let cj = cj_display_scores(&bt);

    let elo_order = rank_order(&elo.ratings);
    let cj_order = rank_order(&cj);
    let elo_ranks = ranks_from_order(&elo_order);
    let cj_ranks = ranks_from_order(&cj_order);

    let rows = elo_order
        .iter()
        .map(|&i| ComparisonRow {
            item_id: index.id(i),
            elo_score: elo.ratings[i],
            elo_rank: elo_ranks[i],
            cj_score: cj[i],
            cj_rank: cj_ranks[i],
        })
        .collect();

    let pearson_r = match pearson_correlation(&elo.ratings, &cj) {
        Ok(r) => Some(r),
        Err(Error::UndefinedCorrelation(_)) => None,
        Err(e) => return Err(e),
    };
    let kendall = kendall_tau(&elo_order, &cj_order)?;

    Ok(MethodComparison {
        rows,
        correlation: CorrelationReport {
            pearson_r,
            kendall_tau: kendall.tau,
            kendall_p_value: kendall.p_value,
            p_value_method: kendall.method,
        },
        regularized: bt.regularized,
        bt,
    })
}

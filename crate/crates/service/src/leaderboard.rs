//! Leaderboard and coverage bodies, rebuilt from the log on demand.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use cjrank_core::analytics::{
    export, method_comparison, win_summary, MethodComparison, PValueMethod,
};
use cjrank_core::scheduler::accumulate_coverage;
use cjrank_core::store::{Experiment, ExperimentManifest, JudgementRecord};
use cjrank_core::{ItemId, Result};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A score rendered as a JSON number with exactly two decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed2(pub f64);

impl Serialize for Fixed2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawValue::from_string(export::format_score(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LeaderboardRow {
    pub item_id: ItemId,
    pub content: String,
    pub elo_score: Fixed2,
    pub elo_rank: usize,
    /// Null until there is at least one judgement.
    pub cj_score: Option<Fixed2>,
    pub cj_rank: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationBody {
    pub pearson_r: Option<f64>,
    pub kendall_tau: f64,
    pub kendall_p_value: f64,
    pub p_value_method: PValueMethod,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeaderboardBody {
    pub experiment_id: String,
    pub empty: bool,
    pub judgements: usize,
    pub last_seq: u64,
    pub rows: Vec<LeaderboardRow>,
    pub correlation: Option<CorrelationBody>,
    pub regularized: bool,
    /// `(item_id, elo_score, cj_score)` in item order, for scatter plots.
    pub scatter: Vec<(ItemId, Fixed2, Fixed2)>,
}

/// Computed leaderboard: the JSON body, its CSV twin, and the raw comparison.
#[derive(Debug, Clone)]
pub struct Leaderboard {
    pub body: LeaderboardBody,
    pub csv: String,
    pub comparison: Option<MethodComparison>,
}

pub fn build_leaderboard(manifest: &ExperimentManifest, log: &[JudgementRecord]) -> Result<Leaderboard> {
    let index = manifest.index()?;
    let content = |id: ItemId| {
        manifest
            .items
            .iter()
            .find(|i| i.item_id == id)
            .map(|i| i.content.clone())
            .unwrap_or_default()
    };
    let last_seq = log.last().map_or(0, |r| r.seq);

    if log.is_empty() {
        let initial = manifest.config.elo.initial_rating;
        let rows = manifest
            .items
            .iter()
            .enumerate()
            .map(|(k, item)| LeaderboardRow {
                item_id: item.item_id,
                content: item.content.clone(),
                elo_score: Fixed2(initial),
                elo_rank: k + 1,
                cj_score: None,
                cj_rank: None,
            })
            .collect();
        return Ok(Leaderboard {
            body: LeaderboardBody {
                experiment_id: manifest.experiment_id.clone(),
                empty: true,
                judgements: 0,
                last_seq,
                rows,
                correlation: None,
                regularized: false,
                scatter: Vec::new(),
            },
            csv: export::COMPARISON_HEADER.to_string() + "\n",
            comparison: None,
        });
    }

    let cmp = method_comparison(&index, log, &manifest.config)?;
    let rows = cmp
        .rows
        .iter()
        .map(|r| LeaderboardRow {
            item_id: r.item_id,
            content: content(r.item_id),
            elo_score: Fixed2(r.elo_score),
            elo_rank: r.elo_rank,
            cj_score: Some(Fixed2(r.cj_score)),
            cj_rank: Some(r.cj_rank),
        })
        .collect();
    let c = cmp.correlation;
    Ok(Leaderboard {
        body: LeaderboardBody {
            experiment_id: manifest.experiment_id.clone(),
            empty: false,
            judgements: log.len(),
            last_seq,
            rows,
            correlation: Some(CorrelationBody {
                pearson_r: c.pearson_r,
                kendall_tau: c.kendall_tau,
                kendall_p_value: c.kendall_p_value,
                p_value_method: c.p_value_method,
            }),
            regularized: cmp.regularized,
            scatter: cmp
                .scatter()
                .into_iter()
                .map(|(id, e, j)| (id, Fixed2(e), Fixed2(j)))
                .collect(),
        },
        csv: export::comparison_csv(&cmp),
        comparison: Some(cmp),
    })
}

/// Leaderboards keyed by experiment, valid while the log's last sequence number is unchanged.
#[derive(Debug, Default)]
pub struct LeaderboardCache {
    entries: Mutex<HashMap<String, (u64, Arc<Leaderboard>)>>,
}

impl LeaderboardCache {
    pub fn get_or_build(&self, experiment: &Experiment) -> Result<Arc<Leaderboard>> {
        let log = experiment.log();
        let last_seq = log.last().map_or(0, |r| r.seq);
        let id = experiment.id().to_string();
        if let Some((seq, board)) = self.lock().get(&id) {
            if *seq == last_seq {
                return Ok(board.clone());
            }
        }
        let board = Arc::new(build_leaderboard(experiment.manifest(), &log)?);
        self.lock().insert(id, (last_seq, board.clone()));
        Ok(board)
    }

    pub fn invalidate(&self, experiment_id: &str) {
        self.lock().remove(experiment_id);
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<String, (u64, Arc<Leaderboard>)>> {
        self.entries.lock().unwrap_or_else(|e| e.into_inner())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageBody {
    pub experiment_id: String,
    pub item_ids: Vec<ItemId>,
    /// Times each unordered pair was dealt.
    pub coverage: Vec<Vec<u32>>,
    /// Row beat column.
    pub wins: Vec<Vec<u32>>,
    pub encounters: Vec<Vec<u32>>,
    /// Share of encounters won by the row item; null where the pair never met.
    pub percentages: Vec<Vec<Option<f64>>>,
}

pub fn build_coverage(experiment: &Experiment) -> Result<CoverageBody> {
    let index = experiment.index();
    let coverage = accumulate_coverage(index, &experiment.dealt_pairs())?;
    let summary = win_summary(index, &experiment.log())?;
    Ok(CoverageBody {
        experiment_id: experiment.id().to_string(),
        item_ids: index.ids().to_vec(),
        coverage: coverage.rows(),
        wins: summary.wins.rows().map(<[u32]>::to_vec).collect(),
        encounters: summary.encounters,
        percentages: summary.percentages,
    })
}

//! Synthetic judges: sample judgement logs from a latent preference model so
//! the two scorers can be compared without human participants.

use std::fs;
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::ItemId;
use crate::rating::{
    thurstone_probability, Outcome, RatingConfig, ThurstonePairParams, ThurstonePreference,
};
use crate::scheduler::deal_session;
use crate::store::{
    write_jsonl, write_log, write_manifest, ExperimentManifest, Item, JudgementRecord, SeedPolicy,
    SessionRecord, LOG_FILE, MANIFEST_FILE, SESSIONS_FILE,
};
use crate::corpus;

/// Ground truth the synthetic judges answer from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LatentModel {
    Thurstone {
        preferences: Vec<ThurstonePreference>,
        pair: ThurstonePairParams,
    },
    BradleyTerry {
        strengths: Vec<f64>,
    },
}

impl LatentModel {
    pub fn bradley_terry(strengths: Vec<f64>) -> Result<Self> {
        if let Some(bad) = strengths.iter().position(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "strength at index {bad} must be positive, got {}",
                strengths[bad]
            )));
        }
        Ok(LatentModel::BradleyTerry { strengths })
    }

    /// Unit-variance, uncorrelated Thurstone model with the given means.
    pub fn thurstone(means: &[f64]) -> Result<Self> {
        let preferences = means
            .iter()
            .map(|&m| ThurstonePreference::new(m, 1.0))
            .collect::<Result<_>>()?;
        Ok(LatentModel::Thurstone {
            preferences,
            pair: ThurstonePairParams::default(),
        })
    }

    /// Bradley–Terry strengths taken from the sample corpus's reference scores.
    pub fn reference() -> Self {
        LatentModel::BradleyTerry {
            strengths: corpus::reference_strengths(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            LatentModel::Thurstone { preferences, .. } => preferences.len(),
            LatentModel::BradleyTerry { strengths } => strengths.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Probability that item `i` is preferred to item `j`.
    pub fn win_probability(&self, i: usize, j: usize) -> Result<f64> {
        if i == j {
            return Err(Error::InvalidArgument(format!("item {i} compared with itself")));
        }
        if i >= self.len() || j >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "item index out of range for {} items",
                self.len()
            )));
        }
        match self {
            LatentModel::Thurstone { preferences, pair } => {
                thurstone_probability(&preferences[i], &preferences[j], pair)
            }
            LatentModel::BradleyTerry { strengths } => {
                Ok(strengths[i] / (strengths[i] + strengths[j]))
            }
        }
    }

    /// Latent order of items, best first.
    pub fn latent_order(&self) -> Vec<usize> {
        let key: Vec<f64> = match self {
            LatentModel::Thurstone { preferences, .. } => {
                preferences.iter().map(|p| p.mean).collect()
            }
            LatentModel::BradleyTerry { strengths } => strengths.clone(),
        };
        crate::rating::rank_order(&key)
    }
}

/// Decides one comparison: `i` wins when `draw` (uniform in `[0, 1)`) falls below `P(i > j)`.
pub fn sample_outcome(model: &LatentModel, i: usize, j: usize, draw: f64) -> Result<Outcome> {
    let p = model.win_probability(i, j)?;
    Ok(Outcome {
        winner_is_first: draw < p,
    })
}

/// A complete synthetic experiment, laid out like a stored one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedExperiment {
    pub manifest: ExperimentManifest,
    pub sessions: Vec<SessionRecord>,
    pub log: Vec<JudgementRecord>,
}

impl SimulatedExperiment {
    /// Writes the experiment in store layout, so the directory can be scored
    /// directly or dropped into a data root.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_manifest(&dir.join(MANIFEST_FILE), &self.manifest)?;
        write_jsonl(&dir.join(SESSIONS_FILE), &self.sessions)?;
        write_log(&dir.join(LOG_FILE), &self.log)
    }
}

fn epoch() -> DateTime<Utc> {
    DateTime::from_timestamp(1_577_836_800, 0).expect("valid timestamp")
}

/// Runs `n_sessions` judges over items `1..=n_items`: each is dealt a session
/// and answers every pair from the model. Fully determined by `seed`.
pub fn simulate_experiment(
    model: &LatentModel,
    n_items: usize,
    n_sessions: usize,
    seed: u64,
    config: RatingConfig,
) -> Result<SimulatedExperiment> {
    if n_items < 2 {
        return Err(Error::InvalidExperiment(format!(
            "simulation needs at least 2 items, got {n_items}"
        )));
    }
    if n_sessions == 0 {
        return Err(Error::InvalidExperiment("simulation needs at least 1 session".into()));
    }
    if model.len() != n_items {
        return Err(Error::InvalidParameter(format!(
            "model describes {} items but {n_items} were requested",
            model.len()
        )));
    }
    config.validate()?;

    let experiment_id = format!("sim{seed}");
    let items: Vec<Item> = (1..=n_items as u32)
        .map(|id| Item {
            item_id: ItemId(id),
            content: corpus::SAMPLE
                .iter()
                .find(|s| s.0 == id && n_items == corpus::SAMPLE.len())
                .map_or_else(|| format!("synthetic item {id}"), |s| s.2.to_string()),
        })
        .collect();
    let ids: Vec<ItemId> = items.iter().map(|i| i.item_id).collect();
    let seed_policy = SeedPolicy { base_seed: seed };
    let mut judge_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05EE_D0F7_A57E);

    let mut sessions = Vec::with_capacity(n_sessions);
    let mut log = Vec::with_capacity(n_sessions * (n_items / 2));
    for ordinal in 0..n_sessions as u64 {
        let session_id = format!("{experiment_id}-s{ordinal}");
        let judge = format!("judge-{ordinal}");
        let session_seed = seed_policy.session_seed(ordinal);
        let plan = deal_session(session_id.clone(), &ids, session_seed)?;
        for &(left, right) in &plan.pairs {
            let i = (left.0 - 1) as usize;
            let j = (right.0 - 1) as usize;
            let outcome = sample_outcome(model, i, j, judge_rng.random::<f64>())?;
            let seq = log.len() as u64 + 1;
            log.push(JudgementRecord {
                seq,
                session: session_id.clone(),
                judge: judge.clone(),
                left,
                right,
                winner: if outcome.winner_is_first { left } else { right },
                feedback: None,
                ts: epoch() + Duration::seconds(seq as i64),
            });
        }
        sessions.push(SessionRecord {
            session: session_id,
            judge,
            ordinal,
            seed: session_seed,
            pairs: plan.pairs,
            opened: epoch(),
        });
    }

    Ok(SimulatedExperiment {
        manifest: ExperimentManifest {
            experiment_id,
            items,
            created: epoch(),
            seed_policy,
            config,
        },
        sessions,
        log,
    })
}

//! Append-only persistence for experiments.
//!
//! Each experiment lives in its own directory under the data root:
//!
//! ```text
//! <root>/<experiment_id>/manifest.json     items + rating config
//! <root>/<experiment_id>/sessions.jsonl    one dealt session per line
//! <root>/<experiment_id>/judgements.jsonl  one judgement per line
//! ```
//!
//! All writes to one experiment go through a single mutex, which is where
//! sequence numbers are assigned. A record is synced to disk before the
//! append returns.

mod files;
mod records;

pub use files::{
    load_log, read_items_csv, read_manifest, write_jsonl, write_log, write_manifest, LOG_FILE, MANIFEST_FILE,
    SESSIONS_FILE,
};
pub use records::{ExperimentManifest, Item, JudgementRecord, SeedPolicy, SessionRecord};

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use chrono::Utc;

use crate::error::{Error, Result};
use crate::ids::{ItemId, ItemIndex};
use crate::rating::RatingConfig;
use crate::scheduler::{deal_session, Pair, SessionPlan};

/// A dealt session and which of its pairs have been judged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionState {
    pub plan: SessionPlan,
    pub judge: String,
    pub judged: Vec<bool>,
}

impl SessionState {
    fn new(plan: SessionPlan, judge: String) -> Self {
        let judged = vec![false; plan.len()];
        Self {
            plan,
            judge,
            judged,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.judged.iter().all(|&j| j)
    }

    pub fn judged_count(&self) -> usize {
        self.judged.iter().filter(|&&j| j).count()
    }

    /// The first unjudged pair, with its index.
    pub fn next_pair(&self) -> Option<(usize, Pair)> {
        self.judged
            .iter()
            .position(|&j| !j)
            .map(|i| (i, self.plan.pairs[i]))
    }

    fn mark(&mut self, pair_index: usize) {
        self.judged[pair_index] = true;
        self.plan.cursor = self.next_pair().map_or(self.plan.len(), |(i, _)| i);
    }
}

struct ExperimentState {
    log: Vec<JudgementRecord>,
    sessions: BTreeMap<String, SessionState>,
    next_ordinal: u64,
    log_file: File,
    sessions_file: File,
}

/// Handle on one experiment; cheap to share across threads.
pub struct Experiment {
    dir: PathBuf,
    manifest: ExperimentManifest,
    index: ItemIndex,
    state: Mutex<ExperimentState>,
}

impl std::fmt::Debug for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Experiment")
            .field("dir", &self.dir)
            .field("experiment_id", &self.manifest.experiment_id)
            .finish_non_exhaustive()
    }
}

impl Experiment {
    /// Opens an experiment directory, replaying its sessions and log.
    pub fn load(dir: PathBuf) -> Result<Self> {
        let manifest = read_manifest(&dir.join(MANIFEST_FILE))?;
        let index = manifest.index()?;
        let log_path = dir.join(LOG_FILE);
        let sessions_path = dir.join(SESSIONS_FILE);
        let log = load_log(&log_path)?;
        let session_records: Vec<SessionRecord> = files::load_jsonl(&sessions_path)?;

        let mut sessions = BTreeMap::new();
        for rec in &session_records {
            let plan = SessionPlan {
                session_id: rec.session.clone(),
                pairs: rec.pairs.clone(),
                cursor: 0,
            };
            sessions.insert(rec.session.clone(), SessionState::new(plan, rec.judge.clone()));
        }
        for (pos, rec) in log.iter().enumerate() {
            rec.resolve(&index, pos)?;
            let state = sessions.get_mut(&rec.session).ok_or_else(|| Error::Load {
                path: log_path.clone(),
                line: pos + 1,
                reason: format!("unknown session `{}`", rec.session),
            })?;
            let pair_index = state.plan.find_pair(rec.left, rec.right).ok_or_else(|| Error::Load {
                path: log_path.clone(),
                line: pos + 1,
                reason: format!("pair {} vs {} was not dealt in `{}`", rec.left, rec.right, rec.session),
            })?;
            state.mark(pair_index);
        }

        let next_ordinal = session_records.iter().map(|r| r.ordinal + 1).max().unwrap_or(0);
        Ok(Self {
            state: Mutex::new(ExperimentState {
                log,
                sessions,
                next_ordinal,
                log_file: files::open_append(&log_path)?,
                sessions_file: files::open_append(&sessions_path)?,
            }),
            dir,
            manifest,
            index,
        })
    }

    fn lock(&self) -> MutexGuard<'_, ExperimentState> {
        // a panic mid-append leaves at worst an unsynced tail, which load rejects
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn id(&self) -> &str {
        &self.manifest.experiment_id
    }

    pub fn manifest(&self) -> &ExperimentManifest {
        &self.manifest
    }

    pub fn index(&self) -> &ItemIndex {
        &self.index
    }

    pub fn config(&self) -> &RatingConfig {
        &self.manifest.config
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn log_path(&self) -> PathBuf {
        self.dir.join(LOG_FILE)
    }

    /// Deals and persists a new session for `judge`.
    pub fn open_session(&self, judge: &str) -> Result<SessionState> {
        let mut state = self.lock();
        let ordinal = state.next_ordinal;
        let seed = self.manifest.seed_policy.session_seed(ordinal);
        let session_id = format!("{}-s{ordinal}", self.manifest.experiment_id);
        let plan = deal_session(session_id.clone(), self.index.ids(), seed)?;
        let record = SessionRecord {
            session: session_id.clone(),
            judge: judge.to_string(),
            ordinal,
            seed,
            pairs: plan.pairs.clone(),
            opened: Utc::now(),
        };
        let line = files::jsonl_line(&record)?;
        files::append_line(&mut state.sessions_file, &self.dir.join(SESSIONS_FILE), &line)?;
        state.next_ordinal += 1;
        let session = SessionState::new(plan, judge.to_string());
        state.sessions.insert(session_id, session.clone());
        Ok(session)
    }

    pub fn session(&self, session_id: &str) -> Result<SessionState> {
        self.lock()
            .sessions
            .get(session_id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(session_id.to_string()))
    }

    pub fn session_ids(&self) -> Vec<String> {
        self.lock().sessions.keys().cloned().collect()
    }

    /// Records a judgement on a dealt, unjudged pair and returns it with its
    /// assigned sequence number. The record is on disk when this returns.
    pub fn append_judgement(
        &self,
        session_id: &str,
        left: ItemId,
        right: ItemId,
        winner: ItemId,
        feedback: Option<String>,
    ) -> Result<JudgementRecord> {
        let mut state = self.lock();
        let session = state
            .sessions
            .get(session_id)
            .ok_or_else(|| Error::UnknownSession(session_id.to_string()))?;
        let pair_index = session.plan.find_pair(left, right).ok_or_else(|| Error::PairNotDealt {
            session: session_id.to_string(),
            left,
            right,
        })?;
        self.append_locked(&mut state, session_id, pair_index, winner, feedback)
    }

    /// Same as [`append_judgement`](Self::append_judgement) but addresses the pair by its index in the plan.
    pub fn judge_pair(
        &self,
        session_id: &str,
        pair_index: usize,
        winner: ItemId,
        feedback: Option<String>,
    ) -> Result<JudgementRecord> {
        let mut state = self.lock();
        let session = state
            .sessions
            .get(session_id)
            .ok_or_else(|| Error::UnknownSession(session_id.to_string()))?;
        if pair_index >= session.plan.len() {
            return Err(Error::InvalidArgument(format!(
                "pair index {pair_index} out of range for a session of {} pairs",
                session.plan.len()
            )));
        }
        self.append_locked(&mut state, session_id, pair_index, winner, feedback)
    }

    fn append_locked(
        &self,
        state: &mut ExperimentState,
        session_id: &str,
        pair_index: usize,
        winner: ItemId,
        feedback: Option<String>,
    ) -> Result<JudgementRecord> {
        let session = &state.sessions[session_id];
        let (left, right) = session.plan.pairs[pair_index];
        if session.judged[pair_index] {
            return Err(Error::DuplicateJudgement {
                session: session_id.to_string(),
                left,
                right,
            });
        }
        if winner != left && winner != right {
            return Err(Error::WinnerNotInPair {
                winner,
                left,
                right,
            });
        }
        let record = JudgementRecord {
            seq: state.log.last().map_or(1, |r| r.seq + 1),
            session: session_id.to_string(),
            judge: session.judge.clone(),
            left,
            right,
            winner,
            feedback,
            ts: Utc::now(),
        };
        let line = files::jsonl_line(&record)?;
        files::append_line(&mut state.log_file, &self.log_path(), &line)?;
        state.log.push(record.clone());
        state
            .sessions
            .get_mut(session_id)
            .expect("session checked above")
            .mark(pair_index);
        Ok(record)
    }

    /// Snapshot of the log in sequence order.
    pub fn log(&self) -> Vec<JudgementRecord> {
        self.lock().log.clone()
    }

    /// Sequence number of the latest judgement, 0 when none.
    pub fn last_seq(&self) -> u64 {
        self.lock().log.last().map_or(0, |r| r.seq)
    }

    /// Every pair dealt so far, across sessions in dealing order.
    pub fn dealt_pairs(&self) -> Vec<Pair> {
        let state = self.lock();
        let mut sessions: Vec<&SessionState> = state.sessions.values().collect();
        sessions.sort_by_key(|s| session_ordinal(&s.plan.session_id));
        sessions
            .into_iter()
            .flat_map(|s| s.plan.pairs.iter().copied())
            .collect()
    }
}

fn session_ordinal(session_id: &str) -> u64 {
    session_id
        .rsplit_once("-s")
        .and_then(|(_, n)| n.parse().ok())
        .unwrap_or(u64::MAX)
}

/// Request to create an experiment.
#[derive(Debug, Clone, Default)]
pub struct NewExperiment {
    pub items: Vec<Item>,
    pub config: RatingConfig,
    /// Chosen id; a random one is generated when absent.
    pub experiment_id: Option<String>,
    /// Base seed for session dealing; random when absent.
    pub seed: Option<u64>,
}

/// Root of all experiments on disk.
#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    experiments: RwLock<HashMap<String, Arc<Experiment>>>,
}

impl Store {
    /// Opens (creating if needed) a data directory and loads every experiment in it.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        let mut experiments = HashMap::new();
        for entry in fs::read_dir(&root).map_err(|e| Error::io(&root, e))? {
            let entry = entry.map_err(|e| Error::io(&root, e))?;
            let dir = entry.path();
            if dir.join(MANIFEST_FILE).is_file() {
                let exp = Experiment::load(dir)?;
                experiments.insert(exp.id().to_string(), Arc::new(exp));
            }
        }
        Ok(Self {
            root,
            experiments: RwLock::new(experiments),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn create_experiment(&self, request: NewExperiment) -> Result<Arc<Experiment>> {
        let experiment_id = request
            .experiment_id
            .unwrap_or_else(|| uuid::Uuid::new_v4().simple().to_string());
        if experiment_id.is_empty()
            || !experiment_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(Error::InvalidExperiment(format!(
                "experiment id `{experiment_id}` must be non-empty ASCII alphanumerics or `_`"
            )));
        }
        let manifest = ExperimentManifest {
            experiment_id: experiment_id.clone(),
            items: request.items,
            created: Utc::now(),
            seed_policy: SeedPolicy {
                base_seed: request.seed.unwrap_or_else(rand::random),
            },
            config: request.config,
        };
        manifest.validate()?;

        let mut experiments = self.experiments.write().unwrap_or_else(|e| e.into_inner());
        if experiments.contains_key(&experiment_id) {
            return Err(Error::InvalidExperiment(format!(
                "experiment `{experiment_id}` already exists"
            )));
        }
        let dir = self.root.join(&experiment_id);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        write_manifest(&dir.join(MANIFEST_FILE), &manifest)?;
        File::create(dir.join(LOG_FILE)).map_err(|e| Error::io(dir.join(LOG_FILE), e))?;
        let exp = Arc::new(Experiment::load(dir)?);
        experiments.insert(experiment_id, exp.clone());
        Ok(exp)
    }

    pub fn experiment(&self, experiment_id: &str) -> Result<Arc<Experiment>> {
        self.experiments
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(experiment_id)
            .cloned()
            .ok_or_else(|| Error::UnknownExperiment(experiment_id.to_string()))
    }

    /// Session ids carry their experiment id as a prefix (`<experiment>-s<n>`).
    pub fn experiment_for_session(&self, session_id: &str) -> Result<Arc<Experiment>> {
        let unknown = || Error::UnknownSession(session_id.to_string());
        let (experiment_id, _) = session_id.rsplit_once("-s").ok_or_else(unknown)?;
        let exp = self.experiment(experiment_id).map_err(|_| unknown())?;
        exp.session(session_id)?;
        Ok(exp)
    }
}

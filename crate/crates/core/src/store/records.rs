use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ItemId, ItemIndex};
use crate::rating::RatingConfig;
use crate::scheduler::Pair;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub item_id: ItemId,
    pub content: String,
}

/// One pairwise judgement as stored in the log, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgementRecord {
    pub seq: u64,
    pub session: String,
    pub judge: String,
    pub left: ItemId,
    pub right: ItemId,
    pub winner: ItemId,
    pub feedback: Option<String>,
    pub ts: DateTime<Utc>,
}

impl JudgementRecord {
    pub fn loser(&self) -> ItemId {
        if self.winner == self.left {
            self.right
        } else {
            self.left
        }
    }

    /// Structural checks that need no item list.
    pub fn check_shape(&self) -> std::result::Result<(), String> {
        if self.left == self.right {
            return Err(format!("item {} paired with itself", self.left));
        }
        if self.winner != self.left && self.winner != self.right {
            return Err(format!(
                "winner {} is not one of {}, {}",
                self.winner, self.left, self.right
            ));
        }
        Ok(())
    }

    /// Positions of (winner, loser) in `index`; `position` is used for error reporting.
    pub fn resolve(&self, index: &ItemIndex, position: usize) -> Result<(usize, usize)> {
        let malformed = |reason: String| Error::MalformedLog { position, reason };
        self.check_shape().map_err(malformed)?;
        let lookup = |id: ItemId| {
            index
                .position(id)
                .ok_or_else(|| malformed(format!("unknown item {id}")))
        };
        Ok((lookup(self.winner)?, lookup(self.loser())?))
    }

    #[cfg(test)]
    pub(crate) fn for_test(seq: u64, left: ItemId, right: ItemId, winner: ItemId) -> Self {
        Self {
            seq,
            session: "test".into(),
            judge: "test".into(),
            left,
            right,
            winner,
            feedback: None,
            ts: DateTime::from_timestamp(1_600_000_000 + seq as i64, 0).unwrap(),
        }
    }
}

/// How session seeds are derived; session `k` of an experiment always gets the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPolicy {
    pub base_seed: u64,
}

impl SeedPolicy {
    pub fn session_seed(&self, ordinal: u64) -> u64 {
        // splitmix64 finaliser over base + ordinal * golden ratio
        let mut z = self
            .base_seed
            .wrapping_add(ordinal.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Experiment manifest, stored as a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub experiment_id: String,
    pub items: Vec<Item>,
    pub created: DateTime<Utc>,
    pub seed_policy: SeedPolicy,
    pub config: RatingConfig,
}

impl ExperimentManifest {
    pub fn validate(&self) -> Result<ItemIndex> {
        if self.items.len() < 2 {
            return Err(Error::InvalidExperiment(format!(
                "an experiment needs at least 2 items, got {}",
                self.items.len()
            )));
        }
        if let Some(item) = self.items.iter().find(|i| i.content.trim().is_empty()) {
            return Err(Error::InvalidExperiment(format!(
                "item_id {} has empty content",
                item.item_id
            )));
        }
        self.config.validate()?;
        ItemIndex::new(self.items.iter().map(|i| i.item_id))
    }

    pub fn index(&self) -> Result<ItemIndex> {
        ItemIndex::new(self.items.iter().map(|i| i.item_id))
    }
}

/// A session as persisted in the session journal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub session: String,
    pub judge: String,
    pub ordinal: u64,
    pub seed: u64,
    pub pairs: Vec<Pair>,
    pub opened: DateTime<Utc>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialises_exact_field_names() {
        let rec = JudgementRecord::for_test(1, ItemId(3), ItemId(5), ItemId(5));
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            json,
            r#"{"seq":1,"session":"test","judge":"test","left":3,"right":5,"winner":5,"feedback":null,"ts":"2020-09-13T12:26:41Z"}"#
        );
    }

    #[test]
    fn unknown_fields_rejected() {
        let line = r#"{"seq":1,"session":"s","judge":"j","left":1,"right":2,"winner":1,"feedback":null,"ts":"2020-09-13T12:26:41Z","extra":1}"#;
        assert!(serde_json::from_str::<JudgementRecord>(line).is_err());
    }

    #[test]
    fn resolve_checks_membership() {
        let index = ItemIndex::dense(3);
        let ok = JudgementRecord::for_test(1, ItemId(0), ItemId(2), ItemId(2));
        assert_eq!(ok.resolve(&index, 0).unwrap(), (2, 0));
        let bad_winner = JudgementRecord::for_test(1, ItemId(0), ItemId(2), ItemId(1));
        assert!(bad_winner.resolve(&index, 0).is_err());
        let same = JudgementRecord::for_test(1, ItemId(1), ItemId(1), ItemId(1));
        assert!(same.resolve(&index, 0).is_err());
    }

    #[test]
    fn session_seeds_differ() {
        let p = SeedPolicy { base_seed: 7 };
        assert_ne!(p.session_seed(0), p.session_seed(1));
        assert_eq!(p.session_seed(3), p.session_seed(3));
    }
}

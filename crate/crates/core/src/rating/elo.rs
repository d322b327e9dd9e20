//! Elo ratings over items, updated one judgement at a time.
//!
//! The expected score of `i` against `j` is `1 / (1 + B^(-(r_i - r_j)/scale))`
//! and a judgement moves `K · (outcome - expected)` points from loser to
//! winner, so the rating total never changes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::ItemIndex;
use crate::store::JudgementRecord;

/// Base of the exponential in the expected-score curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EloBase {
    /// `e`, giving `1 / (1 + exp(-d/scale))`.
    #[default]
    NaturalExponent,
    /// `10`, the chess convention.
    BaseTen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EloConfig {
    pub k_factor: f64,
    pub scale: f64,
    pub base: EloBase,
    pub initial_rating: f64,
}

impl Default for EloConfig {
    fn default() -> Self {
        Self {
            k_factor: 32.0,
            scale: 400.0,
            base: EloBase::NaturalExponent,
            initial_rating: 1000.0,
        }
    }
}

impl EloConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_factor > 0.0 && self.k_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "k_factor must be positive, got {}",
                self.k_factor
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        if !self.initial_rating.is_finite() {
            return Err(Error::InvalidParameter("initial_rating must be finite".into()));
        }
        Ok(())
    }
}

/// Result of one comparison, seen from the first item of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub winner_is_first: bool,
}

impl Outcome {
    pub const FIRST_WINS: Outcome = Outcome {
        winner_is_first: true,
    };
    pub const SECOND_WINS: Outcome = Outcome {
        winner_is_first: false,
    };

    /// `1.0` when the first item won, else `0.0`.
    pub fn score(self) -> f64 {
        if self.winner_is_first {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EloRatings {
    pub ratings: Vec<f64>,
    pub config: EloConfig,
}

impl EloRatings {
    /// Every item at `config.initial_rating`.
    pub fn new(n: usize, config: EloConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            ratings: vec![config.initial_rating; n],
            config,
        })
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::InvalidArgument(format!("item {i} compared with itself")));
        }
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::InvalidArgument(format!(
                "item index out of range for {n} items"
            )));
        }
        Ok(())
    }

    /// Expected score of `i` against `j`.
    pub fn expected_score(&self, i: usize, j: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        Ok(self.expected_unchecked(i, j))
    }

    fn expected_unchecked(&self, i: usize, j: usize) -> f64 {
        let x = (self.ratings[i] - self.ratings[j]) / self.config.scale;
        let g = match self.config.base {
            EloBase::NaturalExponent => (-x).exp(),
            EloBase::BaseTen => 10f64.powf(-x),
        };
        1.0 / (1.0 + g)
    }

    /// Applies one judgement between `i` and `j`. Returns the points `i` gained
    /// (negative if it lost); `j` changes by exactly the opposite amount.
    pub fn update(&mut self, i: usize, j: usize, outcome: Outcome) -> Result<f64> {
        self.check_pair(i, j)?;
        let delta = self.config.k_factor * (outcome.score() - self.expected_unchecked(i, j));
        self.ratings[i] += delta;
        self.ratings[j] -= delta;
        Ok(delta)
    }

    pub fn total(&self) -> f64 {
        self.ratings.iter().sum()
    }
}

/// Replays a judgement log from fresh ratings, in ascending sequence order.
///
/// Elo is order-dependent, so the log's sequence numbers define the result;
/// records are sorted by `seq` before folding and duplicate sequence numbers
/// are rejected.
pub fn elo_replay(
    index: &ItemIndex,
    log: &[JudgementRecord],
    config: &EloConfig,
) -> Result<EloRatings> {
    let mut ratings = EloRatings::new(index.len(), *config)?;
    let mut ordered: Vec<(usize, &JudgementRecord)> = log.iter().enumerate().collect();
    ordered.sort_by_key(|(_, r)| r.seq);
    for pair in ordered.windows(2) {
        if pair[0].1.seq == pair[1].1.seq {
            return Err(Error::MalformedLog {
                position: pair[1].0,
                reason: format!("duplicate sequence number {}", pair[1].1.seq),
            });
        }
    }
    for (pos, rec) in ordered {
        let (winner, loser) = rec.resolve(index, pos)?;
        ratings.update(winner, loser, Outcome::FIRST_WINS)?;
    }
    Ok(ratings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::ItemId;
    use proptest::prelude::*;

    fn fresh(n: usize) -> EloRatings {
        EloRatings::new(n, EloConfig::default()).unwrap()
    }

    #[test]
    fn expected_score_cases() {
        let mut r = fresh(2);
        assert_eq!(r.expected_score(0, 1).unwrap(), 0.5);
        r.ratings = vec![1400.0, 1000.0];
        let natural = r.expected_score(0, 1).unwrap();
        assert!((natural - 1.0 / (1.0 + (-1f64).exp())).abs() < 1e-15);
        assert!((natural - 0.731_059).abs() < 1e-6);
        r.config.base = EloBase::BaseTen;
        let classic = r.expected_score(0, 1).unwrap();
        assert!((classic - 10.0 / 11.0).abs() < 1e-15);
        assert!(r.expected_score(1, 1).is_err());
    }

    #[test]
    fn equal_ratings_exchange_half_k() {
        let mut r = fresh(2);
        let delta = r.update(0, 1, Outcome::FIRST_WINS).unwrap();
        assert_eq!(delta, 16.0);
        assert_eq!(r.ratings, vec![1016.0, 984.0]);
    }

    #[test]
    fn upset_win_natural_exponent() {
        let mut r = fresh(2);
        r.ratings = vec![800.0, 1200.0];
        r.update(0, 1, Outcome::FIRST_WINS).unwrap();
        let expected_gain = 32.0 * (1.0 - 1.0 / (1.0 + 1f64.exp()));
        assert!((r.ratings[0] - (800.0 + expected_gain)).abs() < 1e-12);
        assert!((r.ratings[0] - 823.394).abs() < 1e-3);
        assert!((r.ratings[1] - 1176.606).abs() < 1e-3);
    }

    #[test]
    fn loss_moves_points_the_other_way() {
        let mut r = fresh(3);
        r.update(0, 2, Outcome::SECOND_WINS).unwrap();
        assert_eq!(r.ratings, vec![984.0, 1000.0, 1016.0]);
    }

    #[test]
    fn invalid_config_rejected() {
        for cfg in [
            EloConfig { k_factor: 0.0, ..EloConfig::default() },
            EloConfig { scale: -1.0, ..EloConfig::default() },
            EloConfig { initial_rating: f64::NAN, ..EloConfig::default() },
        ] {
            assert!(EloRatings::new(2, cfg).is_err());
        }
    }

    fn record(seq: u64, left: u32, right: u32, winner: u32) -> JudgementRecord {
        JudgementRecord::for_test(seq, ItemId(left), ItemId(right), ItemId(winner))
    }

    #[test]
    fn replay_empty_and_single() {
        let index = ItemIndex::dense(10);
        let r = elo_replay(&index, &[], &EloConfig::default()).unwrap();
        assert!(r.ratings.iter().all(|&x| x == 1000.0));
        assert_eq!(r.total(), 10_000.0);

        let r = elo_replay(&index, &[record(1, 3, 7, 3)], &EloConfig::default()).unwrap();
        assert_eq!(r.ratings[3], 1016.0);
        assert_eq!(r.ratings[7], 984.0);
        assert_eq!(r.ratings.iter().filter(|&&x| x == 1000.0).count(), 8);
    }

    #[test]
    fn replay_uses_sequence_order() {
        let index = ItemIndex::dense(3);
        let log = vec![record(2, 0, 1, 1), record(1, 0, 1, 0), record(3, 1, 2, 2)];
        let mut sorted = log.clone();
        sorted.sort_by_key(|r| r.seq);
        let a = elo_replay(&index, &log, &EloConfig::default()).unwrap();
        let b = elo_replay(&index, &sorted, &EloConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn replay_is_order_sensitive() {
        let index = ItemIndex::dense(3);
        let forward = vec![record(1, 0, 1, 0), record(2, 1, 2, 1), record(3, 0, 2, 2)];
        let mut reordered = forward.clone();
        reordered[0].seq = 3;
        reordered[2].seq = 1;
        let a = elo_replay(&index, &forward, &EloConfig::default()).unwrap();
        let b = elo_replay(&index, &reordered, &EloConfig::default()).unwrap();
        assert_ne!(a.ratings, b.ratings);
    }

    #[test]
    fn replay_rejects_bad_records() {
        let index = ItemIndex::dense(3);
        let err = elo_replay(&index, &[record(1, 0, 1, 0), record(2, 0, 9, 0)], &EloConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::MalformedLog { position: 1, .. }));
        let err = elo_replay(&index, &[record(1, 0, 1, 0), record(1, 1, 2, 1)], &EloConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::MalformedLog { .. }));
    }

    proptest! {
        #[test]
        fn antisymmetric(a in -3000.0f64..3000.0, b in -3000.0f64..3000.0, ten in any::<bool>()) {
            let mut r = fresh(2);
            r.ratings = vec![a, b];
            if ten { r.config.base = EloBase::BaseTen; }
            let s = r.expected_score(0, 1).unwrap() + r.expected_score(1, 0).unwrap();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }

        #[test]
        fn zero_sum(updates in proptest::collection::vec((0usize..6, 0usize..6, any::<bool>()), 0..300)) {
            let mut r = fresh(6);
            for (i, j, first) in updates {
                if i == j { continue; }
                r.update(i, j, Outcome { winner_is_first: first }).unwrap();
            }
            prop_assert!((r.total() - 6000.0).abs() < 1e-6);
        }
    }
}

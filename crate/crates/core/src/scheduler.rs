//! Deals judging sessions: a random set of disjoint pairs so no item is seen
//! twice within one session.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ItemId, ItemIndex};

/// A dealt pair, in display order (left, right).
pub type Pair = (ItemId, ItemId);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub session_id: String,
    pub pairs: Vec<Pair>,
    /// Index of the first unjudged pair; equals `pairs.len()` once complete.
    pub cursor: usize,
}

impl SessionPlan {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Position of the dealt pair containing exactly these two items, in either order.
    pub fn find_pair(&self, a: ItemId, b: ItemId) -> Option<usize> {
        self.pairs
            .iter()
            .position(|&(l, r)| (l == a && r == b) || (l == b && r == a))
    }

    /// Items left out of this session (at most one).
    pub fn unpaired<'a>(&'a self, items: &'a [ItemId]) -> impl Iterator<Item = ItemId> + 'a {
        items
            .iter()
            .copied()
            .filter(move |id| !self.pairs.iter().any(|&(l, r)| l == *id || r == *id))
    }
}

/// Deals a uniformly random perfect matching of `items`, one item sitting out when
/// the count is odd. Pair order and left/right placement are random too; all of it
/// comes from one seeded shuffle, so the same `(items, seed)` always gives the same plan.
pub fn deal_session(session_id: impl Into<String>, items: &[ItemId], seed: u64) -> Result<SessionPlan> {
    if items.len() < 2 {
        return Err(Error::InvalidExperiment(format!(
            "a session needs at least 2 items, got {}",
            items.len()
        )));
    }
    let mut shuffled = items.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pairs = shuffled.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Ok(SessionPlan {
        session_id: session_id.into(),
        pairs,
        cursor: 0,
    })
}

/// How often each unordered pair has been dealt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageMatrix {
    n: usize,
    appearances: Vec<u32>,
}

impl CoverageMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            appearances: vec![0; n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.appearances[i * self.n + j]
    }

    pub fn add(&mut self, i: usize, j: usize) {
        assert!(i != j, "a pair needs two distinct items");
        self.appearances[i * self.n + j] += 1;
        self.appearances[j * self.n + i] += 1;
    }

    /// Number of dealt pairs, each unordered pair counted once per appearance.
    pub fn total(&self) -> u64 {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| u64::from(self.get(i, j)))
            .sum()
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.appearances
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[u32]>::to_vec)
            .collect()
    }
}

/// Counts dealt pairs by unordered item pair.
pub fn accumulate_coverage<'a>(
    index: &ItemIndex,
    pairs: impl IntoIterator<Item = &'a Pair>,
) -> Result<CoverageMatrix> {
    let mut m = CoverageMatrix::new(index.len());
    for (pos, &(l, r)) in pairs.into_iter().enumerate() {
        let lookup = |id: ItemId| {
            index.position(id).ok_or_else(|| Error::MalformedLog {
                position: pos,
                reason: format!("unknown item {id}"),
            })
        };
        let (i, j) = (lookup(l)?, lookup(r)?);
        if i == j {
            return Err(Error::MalformedLog {
                position: pos,
                reason: format!("item {l} paired with itself"),
            });
        }
        m.add(i, j);
    }
    Ok(m)
}

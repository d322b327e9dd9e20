use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of an item under comparison, unique within one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for ItemId {
    fn from(v: u32) -> Self {
        ItemId(v)
    }
}

/// Maps item ids onto dense positions `0..n` in experiment order.
///
/// Every matrix and rating vector in the crate is indexed by these positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemIndex {
    ids: Vec<ItemId>,
    positions: HashMap<ItemId, usize>,
}

impl ItemIndex {
    /// Fails on a repeated id, naming it.
    pub fn new(ids: impl IntoIterator<Item = ItemId>) -> Result<Self> {
        let ids: Vec<ItemId> = ids.into_iter().collect();
        let mut positions = HashMap::with_capacity(ids.len());
        for (pos, &id) in ids.iter().enumerate() {
            if positions.insert(id, pos).is_some() {
                return Err(Error::InvalidExperiment(format!("duplicate item_id {id}")));
            }
        }
        Ok(Self { ids, positions })
    }

    /// Ids `0..n`, handy for index-addressed callers.
    pub fn dense(n: usize) -> Self {
        Self::new((0..n as u32).map(ItemId)).expect("dense ids are unique")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ItemId] {
        &self.ids
    }

    pub fn id(&self, position: usize) -> ItemId {
        self.ids[position]
    }

    pub fn position(&self, id: ItemId) -> Option<usize> {
        self.positions.get(&id).copied()
    }
}

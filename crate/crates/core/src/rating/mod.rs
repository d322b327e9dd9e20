//! The scoring models: Thurstone probabilities, Bradley–Terry MM fitting and Elo.
//!
//! Everything here is a pure function of its inputs.

mod bradley_terry;
mod elo;
mod rank;
mod thurstone;
mod win_matrix;

pub use bradley_terry::{
    bt_fit, bt_log_likelihood, bt_mm_step, bt_win_probability, cj_display_scores, BtConfig,
    BtPreferences,
};
pub use elo::{elo_replay, EloBase, EloConfig, EloRatings, Outcome};
pub use rank::{rank_order, ranks_from_order};
pub use thurstone::{thurstone_probability, ThurstonePairParams, ThurstonePreference};
pub use win_matrix::WinMatrix;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Configuration for both scorers, persisted with each experiment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RatingConfig {
    pub elo: EloConfig,
    pub bt: BtConfig,
}

impl RatingConfig {
    pub fn validate(&self) -> Result<()> {
        self.elo.validate()?;
        self.bt.validate()
    }
}

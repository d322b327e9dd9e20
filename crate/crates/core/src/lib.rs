//! Comparative-judgement ranking: collect "which of these two is better"
//! judgements and score items with both Bradley–Terry maximum likelihood and
//! Elo.
//!
//! - [`rating`]: the scoring models (Thurstone, Bradley–Terry MM, Elo).
//! - [`scheduler`]: deals sessions of disjoint pairs.
//! - [`analytics`]: win tables, correlations, the Elo-versus-BT comparison.
//! - [`store`]: append-only JSON Lines persistence.
//! - [`simulator`]: synthetic judges drawn from a latent model.

pub mod analytics;
pub mod corpus;
mod error;
mod ids;
pub mod rating;
pub mod scheduler;
pub mod simulator;
pub mod store;

pub use error::{Error, ErrorKind, Result};
pub use ids::{ItemId, ItemIndex};

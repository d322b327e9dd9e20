use std::path::PathBuf;

use cjrank_core::rating::{EloBase, RatingConfig};
use cjrank_core::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cjrank", version, about = "Rank items from pairwise judgements with Elo and Bradley-Terry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the judging service until interrupted.
    Serve(ServeArgs),
    /// Simulate judges answering from a latent model and write the experiment.
    Simulate(SimulateArgs),
    /// Score a judgement log and write the comparison table as CSV.
    Score(ScoreArgs),
    /// Export pair-coverage and win grids as CSV.
    Coverage(CoverageArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Bradley-Terry strengths.
    Bt,
    /// Thurstone normal preferences, unit variance, uncorrelated.
    Thurstone,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 10)]
    pub items: usize,
    #[arg(long, default_value_t = 40)]
    pub sessions: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModelKind::Bt)]
    pub model: ModelKind,
    /// Directory to write manifest.json, sessions.jsonl and judgements.jsonl into.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub rating: RatingOverrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Both,
    Elo,
    Bt,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Experiment directory holding manifest.json and judgements.jsonl.
    #[arg(long, conflicts_with_all = ["manifest", "log"])]
    pub experiment: Option<PathBuf>,
    #[arg(long, requires = "log")]
    pub manifest: Option<PathBuf>,
    #[arg(long, requires = "manifest")]
    pub log: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub rating: RatingOverrides,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub experiment: PathBuf,
    /// Output directory; defaults to the experiment directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Natural,
    Ten,
}

/// Command-line overrides applied on top of an experiment's stored configuration.
#[derive(Debug, Default, Clone, Args)]
pub struct RatingOverrides {
    /// Elo K-factor.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Exponent base of the Elo expected score.
    #[arg(long, value_enum)]
    pub base: Option<BaseArg>,
    /// Elo rating scale.
    #[arg(long, allow_negative_numbers = true)]
    pub scale: Option<f64>,
    /// Elo starting rating.
    #[arg(long, allow_negative_numbers = true)]
    pub initial: Option<f64>,
    /// Bradley-Terry convergence tolerance.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    /// Pseudo-count added to every pair when the win graph is not strongly connected.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "no_smoothing")]
    pub epsilon: Option<f64>,
    /// Fail on a disconnected win graph instead of smoothing.
    #[arg(long)]
    pub no_smoothing: bool,
}

impl RatingOverrides {
    pub fn apply(&self, mut config: RatingConfig) -> Result<RatingConfig> {
        if let Some(k) = self.k {
            config.elo.k_factor = k;
        }
        if let Some(base) = self.base {
            config.elo.base = match base {
                BaseArg::Natural => EloBase::NaturalExponent,
                BaseArg::Ten => EloBase::BaseTen,
            };
        }
        if let Some(scale) = self.scale {
            config.elo.scale = scale;
        }
        if let Some(initial) = self.initial {
            config.elo.initial_rating = initial;
        }
        if let Some(tol) = self.tolerance {
            config.bt.tolerance = tol;
        }
        match self.epsilon {
            Some(eps) if eps < 0.0 || !eps.is_finite() => {
                return Err(Error::InvalidParameter(format!(
                    "epsilon must be non-negative, got {eps}"
                )))
            }
            // a zero pseudo-count cannot repair anything
            Some(eps) => config.bt.smoothing = (eps > 0.0).then_some(eps),
            None if self.no_smoothing => config.bt.smoothing = None,
            None => {}
        }
        config.validate()?;
        Ok(config)
    }
}

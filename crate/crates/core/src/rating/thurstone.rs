//! Thurstone's paired-comparison model: each item elicits a Normally
//! distributed preference, and the preferred item is the one whose sampled
//! preference is larger.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Location and spread of one item's preference distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThurstonePreference {
    pub mean: f64,
    pub std_dev: f64,
}

impl ThurstonePreference {
    pub fn new(mean: f64, std_dev: f64) -> Result<Self> {
        if !(std_dev > 0.0 && std_dev.is_finite()) || !mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "preference needs finite mean and positive std_dev, got mean={mean}, std_dev={std_dev}"
            )));
        }
        Ok(Self { mean, std_dev })
    }
}

/// Correlation between the two preference variables of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThurstonePairParams {
    pub correlation: f64,
}

impl Default for ThurstonePairParams {
    fn default() -> Self {
        Self { correlation: 0.0 }
    }
}

impl ThurstonePairParams {
    pub fn new(correlation: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&correlation) {
            return Err(Error::InvalidParameter(format!(
                "correlation must lie in [-1, 1], got {correlation}"
            )));
        }
        Ok(Self { correlation })
    }

    /// Standard deviation of the preference difference `X - Y`.
    pub fn difference_std_dev(&self, x: &ThurstonePreference, y: &ThurstonePreference) -> f64 {
        let var = x.std_dev * x.std_dev + y.std_dev * y.std_dev
            - 2.0 * self.correlation * x.std_dev * y.std_dev;
        // perfectly correlated equal spreads can round to a tiny negative
        var.max(0.0).sqrt()
    }
}

/// Probability that `x` is preferred over `y`: `Φ((μx − μy) / σxy)`.
pub fn thurstone_probability(
    x: &ThurstonePreference,
    y: &ThurstonePreference,
    pair: &ThurstonePairParams,
) -> Result<f64> {
    let sd = pair.difference_std_dev(x, y);
    if !(sd > 0.0) {
        return Err(Error::InvalidParameter(
            "preference difference has zero spread (perfectly correlated equal spreads)".into(),
        ));
    }
    let z = (x.mean - y.mean) / sd;
    Ok(Normal::standard().cdf(z))
}

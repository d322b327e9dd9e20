//! Bradley–Terry maximum-likelihood scoring via the minorise–maximise (MM)
//! iteration.
//!
//! Preferences `μ` are positive and normalised to sum to one; the model
//! predicts `P(i beats j) = μ_i / (μ_i + μ_j)`. Each MM step is
//!
//! ```text
//! μ_i ← W_i / Σ_{j≠i} (ω_ij + ω_ji) / (μ_i + μ_j)
//! ```
//!
//! where `W_i` is item `i`'s total wins, followed by renormalisation. Every
//! step is guaranteed not to decrease the log-likelihood, and the iteration
//! converges to the unique maximiser whenever the win graph is strongly
//! connected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::ItemId;
use crate::rating::WinMatrix;

/// Fitted (or intermediate) Bradley–Terry preference vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BtPreferences {
    pub mu: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub final_delta: f64,
    /// Set when the fit ran on a smoothed matrix because the raw win graph was not strongly connected.
    pub regularized: bool,
}

impl BtPreferences {
    /// The uniform starting point `μ_i = 1/n`.
    pub fn uniform(n: usize) -> Self {
        Self::unfitted(vec![1.0 / n as f64; n])
    }

    /// Wraps positive strengths, normalising them to sum to one.
    pub fn from_strengths(strengths: &[f64]) -> Result<Self> {
        if let Some(bad) = strengths.iter().position(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "strength at index {bad} must be positive and finite, got {}",
                strengths[bad]
            )));
        }
        let total: f64 = strengths.iter().sum();
        Ok(Self::unfitted(strengths.iter().map(|s| s / total).collect()))
    }

    fn unfitted(mu: Vec<f64>) -> Self {
        Self {
            mu,
            converged: false,
            iterations: 0,
            final_delta: f64::INFINITY,
            regularized: false,
        }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

/// Stopping rule and identifiability handling for [`bt_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BtConfig {
    /// Stop once the max-norm change of `μ` between steps falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Pseudo-count added to every off-diagonal cell when the win graph is not
    /// strongly connected. `None` makes such inputs an error.
    pub smoothing: Option<f64>,
}

impl Default for BtConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
            smoothing: Some(0.01),
        }
    }
}

impl BtConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if let Some(eps) = self.smoothing {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "smoothing epsilon must be non-negative, got {eps}"
                )));
            }
        }
        Ok(())
    }
}

/// Dense real-valued win weights; raw counts or counts plus a pseudo-count.
struct Weights {
    n: usize,
    w: Vec<f64>,
}

impl Weights {
    fn from_matrix(m: &WinMatrix, pseudo_count: f64) -> Self {
        let n = m.len();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w[i * n + j] = f64::from(m.get(i, j)) + pseudo_count;
                }
            }
        }
        Self { n, w }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }
}

fn check_dims(mu: &BtPreferences, w: &WinMatrix) -> Result<()> {
    if mu.len() != w.len() {
        return Err(Error::InvalidArgument(format!(
            "preference vector has {} entries but win matrix is {}x{}",
            mu.len(),
            w.len(),
            w.len()
        )));
    }
    if let Some(bad) = mu.mu.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "preference at index {bad} must be positive, got {}",
            mu.mu[bad]
        )));
    }
    Ok(())
}

/// `P(i beats j) = μ_i / (μ_i + μ_j)`.
pub fn bt_win_probability(mu: &BtPreferences, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidArgument(format!("item {i} compared with itself")));
    }
    let (Some(&a), Some(&b)) = (mu.mu.get(i), mu.mu.get(j)) else {
        return Err(Error::InvalidArgument(format!(
            "item index out of range for {} items",
            mu.len()
        )));
    };
    Ok(a / (a + b))
}

/// Log-likelihood `Σ_i Σ_j ω_ij (ln μ_i − ln(μ_i + μ_j))`.
pub fn bt_log_likelihood(mu: &BtPreferences, w: &WinMatrix) -> Result<f64> {
    check_dims(mu, w)?;
    Ok(log_likelihood(&mu.mu, &Weights::from_matrix(w, 0.0)))
}

fn log_likelihood(mu: &[f64], w: &Weights) -> f64 {
    let mut ll = 0.0;
    for i in 0..w.n {
        for j in 0..w.n {
            let c = w.get(i, j);
            if c != 0.0 {
                ll += c * (mu[i].ln() - (mu[i] + mu[j]).ln());
            }
        }
    }
    ll
}

/// One MM update followed by renormalisation to unit sum.
pub fn bt_mm_step(mu: &BtPreferences, w: &WinMatrix) -> Result<BtPreferences> {
    check_dims(mu, w)?;
    let next = mm_step(&mu.mu, &Weights::from_matrix(w, 0.0))?;
    let final_delta = max_abs_diff(&mu.mu, &next);
    Ok(BtPreferences {
        mu: next,
        converged: false,
        iterations: mu.iterations + 1,
        final_delta,
        regularized: mu.regularized,
    })
}

fn mm_step(mu: &[f64], w: &Weights) -> Result<Vec<f64>> {
    let n = w.n;
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let mut wins = 0.0;
        let mut denom = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            wins += w.get(i, j);
            let games = w.get(i, j) + w.get(j, i);
            if games != 0.0 {
                denom += games / (mu[i] + mu[j]);
            }
        }
        if denom == 0.0 {
            return Err(Error::DegenerateInput {
                index: i,
                reason: "has no comparisons",
            });
        }
        if wins == 0.0 {
            return Err(Error::DegenerateInput {
                index: i,
                reason: "never won, so its preference collapses to zero",
            });
        }
        next.push(wins / denom);
    }
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|m| *m /= total);
    Ok(next)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Fits Bradley–Terry preferences by iterating MM steps from the uniform vector.
///
/// Items are identified by position. A non-strongly-connected win graph is
/// smoothed when the config allows it and rejected otherwise, with the
/// offending components reported as positional [`ItemId`]s.
pub fn bt_fit(w: &WinMatrix, config: &BtConfig) -> Result<BtPreferences> {
    config.validate()?;
    let n = w.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "fitting needs at least 2 items, got {n}"
        )));
    }

    let components = w.strongly_connected_components();
    let (weights, regularized) = if components.len() == 1 {
        (Weights::from_matrix(w, 0.0), false)
    } else {
        match config.smoothing {
            Some(eps) if eps > 0.0 => (Weights::from_matrix(w, eps), true),
            _ => {
                return Err(Error::NonIdentifiable {
                    components: components
                        .into_iter()
                        .map(|c| c.into_iter().map(|p| ItemId(p as u32)).collect())
                        .collect(),
                })
            }
        }
    };

    let mut mu = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut delta = f64::INFINITY;
    let mut converged = false;
    while iterations < config.max_iterations {
        let next = mm_step(&mu, &weights)?;
        delta = max_abs_diff(&mu, &next);
        mu = next;
        iterations += 1;
        if delta < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(BtPreferences {
        mu,
        converged,
        iterations,
        final_delta: delta,
        regularized,
    })
}

/// Presentation scale: `100 · μ_i`, so scores sum to 100.
pub fn cj_display_scores(mu: &BtPreferences) -> Vec<f64> {
    mu.mu.iter().map(|m| 100.0 * m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two(a: u32, b: u32) -> WinMatrix {
        WinMatrix::from_rows(&[vec![0, a], vec![b, 0]]).unwrap()
    }

    fn mu(v: &[f64]) -> BtPreferences {
        BtPreferences::from_strengths(v).unwrap()
    }

    #[test]
    fn win_probability_cases() {
        assert_eq!(bt_win_probability(&mu(&[0.5, 0.5]), 0, 1).unwrap(), 0.5);
        assert_eq!(bt_win_probability(&mu(&[0.75, 0.25]), 0, 1).unwrap(), 0.75);
        let m = mu(&[0.2, 0.3, 0.5]);
        let s = bt_win_probability(&m, 2, 1).unwrap() + bt_win_probability(&m, 1, 2).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(bt_win_probability(&m, 1, 1).is_err());
    }

    #[test]
    fn log_likelihood_cases() {
        assert_eq!(bt_log_likelihood(&mu(&[0.3, 0.7]), &WinMatrix::new(2)).unwrap(), 0.0);
        let ll = bt_log_likelihood(&mu(&[0.5, 0.5]), &two(1, 0)).unwrap();
        assert!((ll - (-std::f64::consts::LN_2)).abs() < 1e-12);
        let w = two(3, 1);
        let at_mle = bt_log_likelihood(&mu(&[0.75, 0.25]), &w).unwrap();
        let at_uniform = bt_log_likelihood(&mu(&[0.5, 0.5]), &w).unwrap();
        assert!(at_mle > at_uniform);
    }

    #[test]
    fn log_likelihood_dimension_mismatch() {
        assert!(bt_log_likelihood(&mu(&[0.5, 0.5]), &WinMatrix::new(3)).is_err());
    }

    #[test]
    fn mm_step_symmetric_fixed_point() {
        let out = bt_mm_step(&BtPreferences::uniform(2), &two(1, 1)).unwrap();
        assert!((out.mu[0] - 0.5).abs() < 1e-15);
        assert!((out.mu[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mm_step_reaches_two_item_mle() {
        let w = two(3, 1);
        let mut m = BtPreferences::uniform(2);
        for _ in 0..50 {
            m = bt_mm_step(&m, &w).unwrap();
        }
        assert!((m.mu[0] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn mm_step_rejects_isolated_item() {
        let w = WinMatrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]]).unwrap();
        let err = bt_mm_step(&BtPreferences::uniform(3), &w).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput { index: 2, .. }));
    }

    #[test]
    fn fit_two_item_cases() {
        let cfg = BtConfig::default();
        let sym = bt_fit(&two(1, 1), &cfg).unwrap();
        assert!((sym.mu[0] - 0.5).abs() < 1e-9);
        assert!(sym.converged);
        let fit = bt_fit(&two(3, 1), &cfg).unwrap();
        assert!((fit.mu[0] - 0.75).abs() < 1e-6);
        assert!((fit.mu[1] - 0.25).abs() < 1e-6);
        assert!(!fit.regularized);
    }

    #[test]
    fn fit_needs_two_items() {
        assert!(bt_fit(&WinMatrix::new(1), &BtConfig::default()).is_err());
    }

    #[test]
    fn fit_disconnected_without_smoothing_names_components() {
        let cfg = BtConfig {
            smoothing: None,
            ..BtConfig::default()
        };
        let err = bt_fit(&two(2, 0), &cfg).unwrap_err();
        match err {
            Error::NonIdentifiable { components } => {
                assert_eq!(components, vec![vec![ItemId(0)], vec![ItemId(1)]]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fit_disconnected_with_smoothing_is_flagged() {
        let fit = bt_fit(&two(2, 0), &BtConfig::default()).unwrap();
        assert!(fit.regularized);
        assert!(fit.mu[0] > fit.mu[1]);
        // smoothed two-item MLE is the smoothed win ratio
        assert!((fit.mu[0] - 2.01 / 2.02).abs() < 1e-8);
    }

    #[test]
    fn reports_non_convergence() {
        let w = WinMatrix::from_rows(&[vec![0, 5, 1], vec![1, 0, 4], vec![2, 1, 0]]).unwrap();
        let cfg = BtConfig {
            max_iterations: 2,
            ..BtConfig::default()
        };
        let fit = bt_fit(&w, &cfg).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 2);
        assert!(fit.final_delta > 0.0);
    }

    #[test]
    fn display_scores_scale_by_hundred() {
        assert_eq!(cj_display_scores(&mu(&[0.5, 0.5])), vec![50.0, 50.0]);
        assert_eq!(cj_display_scores(&mu(&[0.75, 0.25])), vec![75.0, 25.0]);
    }

    fn connected_matrix() -> impl Strategy<Value = WinMatrix> {
        (2usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(0u32..6, n * n).prop_map(move |cells| {
                let mut rows: Vec<Vec<u32>> = cells.chunks(n).map(<[u32]>::to_vec).collect();
                for i in 0..n {
                    rows[i][i] = 0;
                    // a directed cycle guarantees strong connectivity
                    let next = (i + 1) % n;
                    rows[i][next] = rows[i][next].max(1);
                }
                WinMatrix::from_rows(&rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn fit_is_normalised_and_positive(w in connected_matrix()) {
            let fit = bt_fit(&w, &BtConfig::default()).unwrap();
            let sum: f64 = fit.mu.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(fit.mu.iter().all(|&m| m > 0.0));
            let shown: f64 = cj_display_scores(&fit).iter().sum();
            prop_assert!((shown - 100.0).abs() < 1e-6);
        }

        #[test]
        fn fit_is_label_equivariant(w in connected_matrix(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let n = w.len();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let base = bt_fit(&w, &BtConfig::default()).unwrap();
            let moved = bt_fit(&w.permuted(&perm), &BtConfig::default()).unwrap();
            for i in 0..n {
                prop_assert!((base.mu[i] - moved.mu[perm[i]]).abs() < 1e-9);
            }
        }
    }
}

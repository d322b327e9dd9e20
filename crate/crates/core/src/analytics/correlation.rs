use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest `n` for which Kendall p-values are computed exactly.
pub const EXACT_KENDALL_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMethod {
    Exact,
    NormalApproximation,
}

/// Kendall tau-a between two strict orders with a two-sided p-value under independence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KendallTest {
    pub tau: f64,
    pub p_value: f64,
    pub method: PValueMethod,
    pub concordant: u64,
    pub discordant: u64,
}

/// Product-moment correlation of two equal-length series.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("correlation needs at least 2 points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("a series is constant"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Kendall's tau between two orderings of the same labels.
///
/// Each order lists labels best-first. The p-value is exact (from the full
/// distribution of inversion counts) for `n ≤ 12` and uses the normal
/// approximation above that.
pub fn kendall_tau(order_a: &[usize], order_b: &[usize]) -> Result<KendallTest> {
    let n = order_a.len();
    if n != order_b.len() {
        return Err(Error::InvalidArgument(format!(
            "orders have different lengths: {n} vs {}",
            order_b.len()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("Kendall's tau needs at least 2 items".into()));
    }
    let mut pos_b = HashMap::with_capacity(n);
    for (p, &label) in order_b.iter().enumerate() {
        if pos_b.insert(label, p).is_some() {
            return Err(Error::InvalidArgument(format!("label {label} repeated in order")));
        }
    }
    let mut seen = HashMap::with_capacity(n);
    let mut sequence = Vec::with_capacity(n);
    for &label in order_a {
        if seen.insert(label, ()).is_some() {
            return Err(Error::InvalidArgument(format!("label {label} repeated in order")));
        }
        let p = pos_b.get(&label).ok_or_else(|| {
            Error::InvalidArgument(format!("label {label} missing from the second order"))
        })?;
        sequence.push(*p);
    }

    let pairs = (n * (n - 1) / 2) as u64;
    let discordant = count_inversions(&sequence);
    let concordant = pairs - discordant;
    let tau = (concordant as f64 - discordant as f64) / pairs as f64;

    let (p_value, method) = if n <= EXACT_KENDALL_MAX_N {
        (exact_two_sided_p(n, discordant), PValueMethod::Exact)
    } else {
        (normal_two_sided_p(n, concordant as i64 - discordant as i64), PValueMethod::NormalApproximation)
    };

    Ok(KendallTest {
        tau,
        p_value,
        method,
        concordant,
        discordant,
    })
}

fn count_inversions(seq: &[usize]) -> u64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    inv
}

/// Number of permutations of `n` elements with each inversion count (Mahonian numbers).
pub(crate) fn inversion_distribution(n: usize) -> Vec<u64> {
    let mut dist = vec![1u64];
    for k in 2..=n {
        // inserting the k-th element adds 0..k-1 inversions
        let mut next = vec![0u64; dist.len() + k - 1];
        for (inv, &count) in dist.iter().enumerate() {
            for extra in 0..k {
                next[inv + extra] += count;
            }
        }
        dist = next;
    }
    dist
}

fn exact_two_sided_p(n: usize, discordant: u64) -> f64 {
    let dist = inversion_distribution(n);
    let pairs = (n * (n - 1) / 2) as i64;
    let observed = (pairs - 2 * discordant as i64).abs();
    let total: u64 = dist.iter().sum();
    let extreme: u64 = dist
        .iter()
        .enumerate()
        .filter(|(d, _)| (pairs - 2 * *d as i64).abs() >= observed)
        .map(|(_, &c)| c)
        .sum();
    extreme as f64 / total as f64
}

fn normal_two_sided_p(n: usize, score: i64) -> f64 {
    let n = n as f64;
    let var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
    let z = score as f64 / var.sqrt();
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

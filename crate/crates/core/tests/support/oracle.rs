//! Independent brute-force maximiser of the Bradley–Terry log-likelihood over
//! the probability simplex. Shares no code with the MM implementation.

/// `Σ_i Σ_j w[i][j] (ln μ_i − ln(μ_i + μ_j))`, evaluated directly.
pub fn log_likelihood(mu: &[f64], w: &[Vec<u32>]) -> f64 {
    let mut ll = 0.0;
    for (i, row) in w.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                ll += f64::from(c) * (mu[i].ln() - (mu[i] + mu[j]).ln());
            }
        }
    }
    ll
}

fn complete(free: &[f64]) -> Option<Vec<f64>> {
    let rest = 1.0 - free.iter().sum::<f64>();
    if rest <= 0.0 || free.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let mut mu = free.to_vec();
    mu.push(rest);
    Some(mu)
}

fn visit_grid(dims: usize, step: f64, centre: Option<&[f64]>, radius: i64, f: &mut dyn FnMut(&[f64])) {
    let mut point = vec![0.0; dims];
    fn rec(
        k: usize,
        point: &mut Vec<f64>,
        step: f64,
        centre: Option<&[f64]>,
        radius: i64,
        f: &mut dyn FnMut(&[f64]),
    ) {
        if k == point.len() {
            f(point);
            return;
        }
        match centre {
            None => {
                let used: f64 = point[..k].iter().sum();
                let mut m = 1;
                while (m as f64) * step + used < 1.0 {
                    point[k] = m as f64 * step;
                    rec(k + 1, point, step, centre, radius, f);
                    m += 1;
                }
            }
            Some(c) => {
                for d in -radius..=radius {
                    point[k] = c[k] + d as f64 * step;
                    rec(k + 1, point, step, centre, radius, f);
                }
            }
        }
    }
    rec(0, &mut point, step, centre, radius, f);
}

/// Coarse simplex grid, then repeated local grids with a shrinking step down
/// to below 1e-5. Returns the best normalised preference vector found.
pub fn grid_search_mle(w: &[Vec<u32>]) -> Vec<f64> {
    let n = w.len();
    let dims = n - 1;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let consider = |free: &[f64], best: &mut Option<(f64, Vec<f64>)>| {
        if let Some(mu) = complete(free) {
            let ll = log_likelihood(&mu, w);
            if best.as_ref().is_none_or(|(b, _)| ll > *b) {
                *best = Some((ll, mu));
            }
        }
    };
    let coarse = if n <= 3 { 1e-3 } else { 0.02 };
    visit_grid(dims, coarse, None, 0, &mut |p| consider(p, &mut best));
    let mut step = coarse;
    while step > 1e-5 {
        step /= 4.0;
        let centre = best.as_ref().unwrap().1[..dims].to_vec();
        visit_grid(dims, step, Some(&centre), 6, &mut |p| consider(p, &mut best));
    }
    best.unwrap().1
}

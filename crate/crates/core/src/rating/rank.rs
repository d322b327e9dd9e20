/// Indices sorted by score, highest first; equal scores keep ascending index order.
pub fn rank_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // stable sort keeps ties in index order
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// 1-based rank of each item given a [`rank_order`] permutation.
pub fn ranks_from_order(order: &[usize]) -> Vec<usize> {
    let mut ranks = vec![0; order.len()];
    for (place, &item) in order.iter().enumerate() {
        ranks[item] = place + 1;
    }
    ranks
}

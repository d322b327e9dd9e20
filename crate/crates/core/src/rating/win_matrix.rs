use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::ItemIndex;
use crate::store::JudgementRecord;

/// Directed win counts: entry `(i, j)` is how many times item `i` beat item `j`.
///
/// The diagonal is always zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinMatrix {
    n: usize,
    counts: Vec<u32>,
}

impl WinMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            counts: vec![0; n * n],
        }
    }

    /// Builds from dense rows; rejects ragged input and nonzero diagonals.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row[i] != 0 {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry ({i}, {i}) must be zero"
                )));
            }
            m.counts[i * n..(i + 1) * n].copy_from_slice(row);
        }
        Ok(m)
    }

    /// Tallies a judgement log. Records are checked for valid, distinct items and a winner in the pair.
    pub fn from_records(index: &ItemIndex, log: &[JudgementRecord]) -> Result<Self> {
        let mut m = Self::new(index.len());
        for (pos, rec) in log.iter().enumerate() {
            let (winner, loser) = rec.resolve(index, pos)?;
            m.record_win(winner, loser);
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, winner: usize, loser: usize) -> u32 {
        self.counts[winner * self.n + loser]
    }

    /// Panics if `winner == loser` or either is out of range.
    pub fn record_win(&mut self, winner: usize, loser: usize) {
        assert!(winner != loser, "an item cannot beat itself");
        assert!(winner < self.n && loser < self.n, "item index out of range");
        self.counts[winner * self.n + loser] += 1;
    }

    /// Total wins of item `i` (the row sum).
    pub fn wins(&self, i: usize) -> u32 {
        self.row(i).iter().sum()
    }

    /// Comparisons between `i` and `j` in either direction.
    pub fn encounters(&self, i: usize, j: usize) -> u32 {
        self.get(i, j) + self.get(j, i)
    }

    /// All comparisons item `i` took part in.
    pub fn comparisons(&self, i: usize) -> u32 {
        (0..self.n).map(|j| self.encounters(i, j)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.counts.chunks(self.n.max(1)).take(self.n)
    }

    /// Relabels items: the result's item `perm[i]` is this matrix's item `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = Self::new(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.counts[perm[i] * self.n + perm[j]] = self.get(i, j);
            }
        }
        out
    }

    /// Strongly connected components of the directed graph with an edge `i -> j`
    /// whenever `i` has beaten `j`. Components are sorted by smallest member and
    /// each component's members are ascending.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let forward = |v: usize| (0..n).filter(move |&w| self.get(v, w) > 0);
        let backward = |v: usize| (0..n).filter(move |&w| self.get(w, v) > 0);

        // Kosaraju: finishing order on the forward graph, then sweep the reverse graph.
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for start in 0..n {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            let mut stack = vec![(start, forward(start).collect::<Vec<_>>().into_iter())];
            while let Some((v, next)) = stack.last_mut() {
                match next.next() {
                    Some(w) if !visited[w] => {
                        visited[w] = true;
                        stack.push((w, forward(w).collect::<Vec<_>>().into_iter()));
                    }
                    Some(_) => {}
                    None => {
                        order.push(*v);
                        stack.pop();
                    }
                }
            }
        }

        let mut component = vec![usize::MAX; n];
        let mut components: Vec<Vec<usize>> = Vec::new();
        for &root in order.iter().rev() {
            if component[root] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![root];
            component[root] = id;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for w in backward(v) {
                    if component[w] == usize::MAX {
                        component[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components.sort_by_key(|c| c[0]);
        components
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n > 0 && self.strongly_connected_components().len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_sums_are_wins() {
        let m = WinMatrix::from_rows(&[vec![0, 3, 1], vec![1, 0, 0], vec![2, 5, 0]]).unwrap();
        assert_eq!(m.wins(0), 4);
        assert_eq!(m.wins(2), 7);
        assert_eq!(m.encounters(0, 1), 4);
        assert_eq!(m.comparisons(1), 4 + 5);
        assert_eq!(m.total(), 12);
    }

    #[test]
    fn nonzero_diagonal_rejected() {
        assert!(WinMatrix::from_rows(&[vec![1, 0], vec![0, 0]]).is_err());
        assert!(WinMatrix::from_rows(&[vec![0, 0], vec![0]]).is_err());
    }

    #[test]
    fn cycle_is_one_component() {
        let m = WinMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        assert!(m.is_strongly_connected());
    }

    #[test]
    fn chain_splits_into_singletons() {
        let m = WinMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]).unwrap();
        assert_eq!(m.strongly_connected_components(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn two_cliques() {
        let mut m = WinMatrix::new(4);
        m.record_win(0, 1);
        m.record_win(1, 0);
        m.record_win(2, 3);
        m.record_win(3, 2);
        m.record_win(0, 2);
        assert_eq!(m.strongly_connected_components(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn permuted_moves_entries() {
        let m = WinMatrix::from_rows(&[vec![0, 3], vec![1, 0]]).unwrap();
        let p = m.permuted(&[1, 0]);
        assert_eq!(p.get(1, 0), 3);
        assert_eq!(p.get(0, 1), 1);
    }
}

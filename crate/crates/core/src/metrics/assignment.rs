//! Exact maximum-weight bipartite matching on dense rectangular matrices.
//!
//! Shortest-augmenting-path Hungarian method with row/column potentials,
//! O(r^2 c) for an r x c matrix with r <= c. Rows or columns may stay
//! unmatched: entries are floored at zero before solving and pairs with
//! non-positive weight are dropped from the result, which yields the optimum
//! over partial matchings.

#[derive(Debug, Clone, PartialEq)]
pub struct MatchWeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatchWeightMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatchWeightMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        MatchWeightMatrix { rows, cols, data }
    }

    /// Panics if rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged weight matrix");
        MatchWeightMatrix { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        MatchWeightMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// (row, col) pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total: f64,
}

impl Assignment {
    pub fn col_of(&self, row: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == row).map(|p| p.1)
    }
}

pub fn solve_assignment(weights: &MatchWeightMatrix) -> Assignment {
    let (r, c) = (weights.rows(), weights.cols());
    if r == 0 || c == 0 {
        return Assignment { pairs: Vec::new(), total: 0.0 };
    }
    let transposed = r > c;
    let m = if transposed { weights.transpose() } else { weights.clone() };
    let (n, k) = (m.rows(), m.cols());
    let cost = |i: usize, j: usize| -m.get(i, j).max(0.0);

    // 1-based arrays; index 0 is the virtual root.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=k)
        .filter(|&j| owner[j] != 0)
        .map(|j| (owner[j] - 1, j - 1))
        .filter(|&(i, j)| m.get(i, j) > 0.0)
        .map(|(i, j)| if transposed { (j, i) } else { (i, j) })
        .collect();
    pairs.sort_unstable();
    let total = pairs.iter().map(|&(i, j)| weights.get(i, j)).sum();
    Assignment { pairs, total }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let w = MatchWeightMatrix::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]);
        let a = solve_assignment(&w);
        assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
        assert!((a.total - 1.7).abs() < 1e-12);
    }

    #[test]
    fn identity_like_matrices() {
        for (r, c) in [(3, 3), (2, 5), (5, 2)] {
            let w = MatchWeightMatrix::from_fn(r, c, |i, j| if i == j { 1.0 } else { 0.0 });
            let a = solve_assignment(&w);
            assert_eq!(a.total, r.min(c) as f64);
            assert!(a.pairs.iter().all(|&(i, j)| i == j));
        }
    }

    #[test]
    fn single_row_takes_argmax() {
        let w = MatchWeightMatrix::from_rows(&[vec![0.2, 0.7, 0.4]]);
        let a = solve_assignment(&w);
        assert_eq!(a.pairs, vec![(0, 1)]);
        assert_eq!(a.total, 0.7);
        let a = solve_assignment(&w.transpose());
        assert_eq!(a.pairs, vec![(1, 0)]);
    }

    #[test]
    fn negative_entries_stay_unmatched() {
        let w = MatchWeightMatrix::from_rows(&[vec![-1.0, -2.0], vec![-3.0, 0.5]]);
        let a = solve_assignment(&w);
        assert_eq!(a.pairs, vec![(1, 1)]);
        assert_eq!(a.total, 0.5);
    }

    #[test]
    fn empty_matrix() {
        let a = solve_assignment(&MatchWeightMatrix::zeros(0, 4));
        assert!(a.pairs.is_empty());
        assert_eq!(a.total, 0.0);
    }

    #[test]
    fn greedy_is_not_optimal_here() {
        // Greedy picks 0.9 first and ends with 0.9 + 0.0; the optimum is 0.8 + 0.8.
        let w = MatchWeightMatrix::from_rows(&[vec![0.9, 0.8], vec![0.8, 0.0]]);
        let a = solve_assignment(&w);
        assert!((a.total - 1.6).abs() < 1e-12);
        assert_eq!(a.col_of(0), Some(1));
    }
}

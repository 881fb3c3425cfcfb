//! Exact solver for the uniform-marginal transportation problem
//!
//! ```text
//! maximize   sum_ij plan[i][j] * s[i][j]
//! subject to sum_j plan[i][j] = 1/r,  sum_i plan[i][j] = 1/c,  plan >= 0
//! ```
//!
//! Scaling the masses by r*c gives integer supplies (c per row) and demands
//! (r per column), so the problem is an integral min-cost flow. It is solved
//! by successive shortest paths with Bellman-Ford on the residual graph,
//! which reaches an optimal vertex of the transport polytope.

use super::assignment::MatchWeightMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// Mass moved between row i and column j, row-major, summing to 1.
    pub plan: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub value: f64,
}

impl TransportPlan {
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.plan[i * self.cols + j]
    }
}

struct Edge {
    to: usize,
    cap: i64,
    cost: f64,
}

struct FlowGraph {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(nodes: usize) -> Self {
        FlowGraph { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.adj[from].push(id);
        self.edges.push(Edge { to: from, cap: 0, cost: -cost });
        self.adj[to].push(id + 1);
        id
    }

    /// Returns predecessor edges of a cheapest source-sink path, if any.
    fn shortest_path(&self, source: usize, sink: usize) -> Option<Vec<usize>> {
        const EPS: f64 = 1e-12;
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        dist[source] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if !dist[u].is_finite() {
                    continue;
                }
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if edge.cap > 0 && dist[u] + edge.cost < dist[edge.to] - EPS {
                        dist[edge.to] = dist[u] + edge.cost;
                        pred[edge.to] = e;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if !dist[sink].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut v = sink;
        while v != source {
            let e = pred[v];
            path.push(e);
            v = self.edges[e ^ 1].to;
        }
        Some(path)
    }
}

/// Maximizes expected similarity over transport plans with uniform
/// marginals. Returns `None` for an empty side.
pub fn solve_uniform_transport(sim: &MatchWeightMatrix) -> Option<TransportPlan> {
    let (r, c) = (sim.rows(), sim.cols());
    if r == 0 || c == 0 {
        return None;
    }
    let source = 0;
    let sink = r + c + 1;
    let mut g = FlowGraph::new(r + c + 2);
    for i in 0..r {
        g.add_edge(source, 1 + i, c as i64, 0.0);
    }
    for j in 0..c {
        g.add_edge(1 + r + j, sink, r as i64, 0.0);
    }
    let mut cell_edges = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            cell_edges.push(g.add_edge(1 + i, 1 + r + j, (r * c) as i64, -sim.get(i, j)));
        }
    }

    let mut remaining = (r * c) as i64;
    while remaining > 0 {
        let path = g
            .shortest_path(source, sink)
            .expect("balanced transport network always has an augmenting path");
        let push = path.iter().map(|&e| g.edges[e].cap).min().unwrap().min(remaining);
        for &e in &path {
            g.edges[e].cap -= push;
            g.edges[e ^ 1].cap += push;
        }
        remaining -= push;
    }

    let total = (r * c) as f64;
    let plan: Vec<f64> = cell_edges.iter().map(|&e| g.edges[e ^ 1].cap as f64 / total).collect();
    let value = cell_edges
        .iter()
        .enumerate()
        .map(|(idx, &e)| g.edges[e ^ 1].cap as f64 * sim.get(idx / c, idx % c))
        .sum::<f64>()
        / total;
    Some(TransportPlan { plan, rows: r, cols: c, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_marginals(p: &TransportPlan) {
        for i in 0..p.rows {
            let s: f64 = (0..p.cols).map(|j| p.mass(i, j)).sum();
            assert!((s - 1.0 / p.rows as f64).abs() < 1e-12);
        }
        for j in 0..p.cols {
            let s: f64 = (0..p.rows).map(|i| p.mass(i, j)).sum();
            assert!((s - 1.0 / p.cols as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_similarity_uses_the_diagonal() {
        let s = MatchWeightMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.2 });
        let p = solve_uniform_transport(&s).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
        check_marginals(&p);
    }

    #[test]
    fn single_column_is_row_mean() {
        let s = MatchWeightMatrix::from_rows(&[vec![0.3], vec![0.9], vec![0.6]]);
        let p = solve_uniform_transport(&s).unwrap();
        assert!((p.value - 0.6).abs() < 1e-12);
    }

    #[test]
    fn rectangular_split_mass() {
        // One row, two columns: the row must spread half its mass to each.
        let s = MatchWeightMatrix::from_rows(&[vec![1.0, 0.0]]);
        let p = solve_uniform_transport(&s).unwrap();
        assert!((p.value - 0.5).abs() < 1e-12);
        // Two rows, three columns.
        let s = MatchWeightMatrix::from_rows(&[vec![1.0, 0.5, 0.0], vec![0.0, 0.5, 1.0]]);
        let p = solve_uniform_transport(&s).unwrap();
        check_marginals(&p);
        // Row 0 sends 1/3 to col 0 and 1/6 to col 1; symmetric for row 1.
        assert!((p.value - (2.0 / 3.0 + 2.0 * 0.5 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn empty_side() {
        assert!(solve_uniform_transport(&MatchWeightMatrix::zeros(0, 2)).is_none());
    }
}

//! Weighted graphs with vertex measures and a nonnegative potential.
//!
//! The Laplacian acting on vertex functions is the measure-normalized
//! combinatorial operator
//!
//! ```text
//! (L u)(x) = (1 / mu(x)) * sum_y w(x, y) * (u(y) - u(x))
//! ```
//!
//! which is self-adjoint for the inner product `<u, v> = sum_x mu(x) u(x) v(x)`
//! and annihilates constants.

use std::collections::VecDeque;

use crate::error::ModelError;

/// Symmetric weighted graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    measure: Vec<f64>,
    sigma: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph from an undirected edge list. Each `(x, y, w)` is
    /// inserted in both directions; parallel edges are merged by summing.
    pub fn new(
        measure: Vec<f64>,
        sigma: Vec<f64>,
        edges: &[(usize, usize, f64)],
    ) -> Result<Self, ModelError> {
        let n = measure.len();
        if sigma.len() != n {
            return Err(ModelError::InvalidSpec(format!(
                "sigma has {} entries for {} vertices",
                sigma.len(),
                n
            )));
        }
        if let Some((x, m)) = measure.iter().enumerate().find(|(_, m)| !(**m > 0.0)) {
            return Err(ModelError::InvalidSpec(format!("vertex {x} has measure {m}")));
        }
        if let Some((x, s)) = sigma.iter().enumerate().find(|(_, s)| !(**s >= 0.0)) {
            return Err(ModelError::InvalidSpec(format!("vertex {x} has potential {s}")));
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(x, y, w) in edges {
            if x >= n || y >= n || x == y {
                return Err(ModelError::InvalidSpec(format!("bad edge ({x}, {y})")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(ModelError::InvalidSpec(format!("edge ({x}, {y}) has weight {w}")));
            }
            adj[x].push((y, w));
            adj[y].push((x, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for row in &mut adj {
            row.sort_by_key(|&(y, _)| y);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(y, w) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == y => last.1 += w,
                    _ => merged.push((y, w)),
                }
            }
            for (y, w) in merged {
                targets.push(y);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        Ok(Self { measure, sigma, offsets, targets, weights })
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Neighbors of `x` with edge weights, sorted by vertex index.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.offsets[x], self.offsets[x + 1]);
        self.targets[lo..hi].iter().copied().zip(self.weights[lo..hi].iter().copied())
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// Weighted degree `sum_y w(x, y)`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.neighbors(x).map(|(_, w)| w).sum()
    }

    /// Each undirected edge once, as `(x, y, w)` with `x < y`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |x| {
            self.neighbors(x).filter(move |&(y, _)| y > x).map(move |(y, w)| (x, y, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// `(L u)(x)` at a single vertex.
    pub fn laplacian_at(&self, u: &[f64], x: usize) -> f64 {
        let flux: f64 = self.neighbors(x).map(|(y, w)| w * (u[y] - u[x])).sum();
        flux / self.measure[x]
    }

    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|x| self.laplacian_at(u, x)).collect()
    }

    /// `(L u - sigma u)(x)`.
    pub fn schrodinger_at(&self, u: &[f64], x: usize) -> f64 {
        self.laplacian_at(u, x) - self.sigma[x] * u[x]
    }

    /// Measure-weighted inner product.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.measure.iter().zip(u).zip(v).map(|((m, a), b)| m * a * b).sum()
    }

    /// Dirichlet energy `sum_edges w (u(x) - u(y))^2`.
    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        self.edges().map(|(x, y, w)| w * (u[x] - u[y]).powi(2)).sum()
    }

    /// Connected components of the subgraph induced by `keep`, each sorted.
    pub fn components(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if !keep[start] || seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(x) = queue.pop_front() {
                comp.push(x);
                for (y, _) in self.neighbors(x) {
                    if keep[y] && !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components(&vec![true; self.len()]).len() == 1
    }

    /// Copy with every vertex measure multiplied by `factor`; edge weights
    /// are unchanged.
    pub fn with_scaled_measure(&self, factor: f64) -> Self {
        let mut g = self.clone();
        g.measure.iter_mut().for_each(|m| *m *= factor);
        g
    }

    /// Copy with every edge weight multiplied by `factor`.
    pub fn with_scaled_weights(&self, factor: f64) -> Self {
        let mut g = self.clone();
        g.weights.iter_mut().for_each(|w| *w *= factor);
        g
    }

    /// Copy with a replaced potential.
    pub fn with_sigma(&self, sigma: Vec<f64>) -> Result<Self, ModelError> {
        if sigma.len() != self.len() || sigma.iter().any(|s| !(*s >= 0.0)) {
            return Err(ModelError::InvalidSpec("potential must be nonnegative per vertex".into()));
        }
        let mut g = self.clone();
        g.sigma = sigma;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        WeightedGraph::new(vec![1.0; n], vec![0.0; n], &edges).unwrap()
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let g = path(6);
        assert!(g.laplacian(&[3.0; 6]).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn parallel_edges_merge() {
        let g = WeightedGraph::new(vec![1.0; 2], vec![0.0; 2], &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weighted_degree(0), 3.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(WeightedGraph::new(vec![0.0], vec![0.0], &[]).is_err());
        assert!(WeightedGraph::new(vec![1.0], vec![-1.0], &[]).is_err());
        assert!(WeightedGraph::new(vec![1.0; 2], vec![0.0; 2], &[(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(vec![1.0; 2], vec![0.0; 2], &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn components_after_removal() {
        let g = path(5);
        let keep = [true, true, false, true, true];
        assert_eq!(g.components(&keep), vec![vec![0, 1], vec![3, 4]]);
    }

    #[test]
    fn energy_matches_green_identity() {
        let g = path(4);
        let u = [0.0, 1.0, 3.0, 2.0];
        let lu = g.laplacian(&u);
        assert!((g.inner(&lu, &u) + g.dirichlet_energy(&u)).abs() < 1e-12);
    }
}

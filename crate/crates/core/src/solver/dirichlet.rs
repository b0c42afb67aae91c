use crate::error::SolverError;
use crate::graph::WeightedGraph;
use crate::linalg::{conjugate_gradient, dense_solve, CgOptions, CsrMatrix};
use crate::model::DiscreteManifold;

/// Role of a vertex in a Dirichlet problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    /// Unknown; `(L v)(x) = sigma(x) v(x)` is imposed here.
    Interior,
    /// Prescribed boundary value.
    Fixed(f64),
    /// Outside the domain. Must not touch an interior vertex.
    Excluded,
}

/// The discrete operator `L - sigma` with Dirichlet rows eliminated.
///
/// Multiplying the interior equations by `-mu(x)` gives the symmetric system
///
/// ```text
/// (sum_y w(x,y) + mu(x) sigma(x)) v(x) - sum_{y interior} w(x,y) v(y)
///     = sum_{y fixed} w(x,y) g(y)
/// ```
///
/// whose matrix is an M-matrix, positive definite whenever every interior
/// component touches the boundary or carries potential.
#[derive(Debug, Clone)]
pub struct SchrodingerSystem {
    nodes: Vec<Node>,
    interior: Vec<usize>,
    matrix: CsrMatrix,
    rhs: Vec<f64>,
}

/// Full-length vertex function produced by a solve; excluded vertices hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSolution {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

impl SchrodingerSystem {
    pub fn assemble(graph: &WeightedGraph, nodes: &[Node]) -> Result<Self, SolverError> {
        if nodes.len() != graph.len() {
            return Err(SolverError::InvalidInput(format!(
                "{} node roles for {} vertices",
                nodes.len(),
                graph.len()
            )));
        }
        if !nodes.iter().any(|n| matches!(n, Node::Fixed(_))) {
            return Err(SolverError::NoBoundary);
        }
        let mut index = vec![usize::MAX; graph.len()];
        let interior: Vec<usize> = (0..graph.len()).filter(|&x| nodes[x] == Node::Interior).collect();
        for (k, &x) in interior.iter().enumerate() {
            index[x] = k;
        }
        let mu = graph.measure();
        let sigma = graph.sigma();
        let mut rows = Vec::with_capacity(interior.len());
        let mut rhs = vec![0.0; interior.len()];
        for (k, &x) in interior.iter().enumerate() {
            let mut row = Vec::with_capacity(graph.degree(x) + 1);
            let mut diag = mu[x] * sigma[x];
            for (y, w) in graph.neighbors(x) {
                diag += w;
                match nodes[y] {
                    Node::Interior => row.push((index[y], -w)),
                    Node::Fixed(g) => rhs[k] += w * g,
                    Node::Excluded => return Err(SolverError::OpenBoundary(x)),
                }
            }
            row.push((k, diag));
            rows.push(row);
        }
        Ok(Self { nodes: nodes.to_vec(), interior, matrix: CsrMatrix::from_rows(rows), rhs })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Vertex ids of the unknowns, in system order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    fn scatter(&self, x: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Fixed(g) => *g,
                _ => 0.0,
            })
            .collect();
        for (k, &v) in self.interior.iter().enumerate() {
            out[v] = x[k];
        }
        out
    }

    /// Conjugate-gradient solve. `guess` is a full-length vertex function.
    pub fn solve(&self, opts: CgOptions, guess: Option<&[f64]>) -> Result<DirichletSolution, SolverError> {
        let x0: Option<Vec<f64>> = guess.map(|g| self.interior.iter().map(|&x| g[x]).collect());
        let out = conjugate_gradient(&self.matrix, &self.rhs, x0.as_deref(), opts);
        if !out.converged {
            return Err(SolverError::SingularSystem {
                iterations: out.iterations,
                residual: out.relative_residual,
            });
        }
        Ok(DirichletSolution {
            values: self.scatter(&out.x),
            iterations: out.iterations,
            relative_residual: out.relative_residual,
        })
    }

    /// Dense LU solve of the same system.
    pub fn solve_dense(&self) -> Result<Vec<f64>, SolverError> {
        dense_solve(&self.matrix, &self.rhs)
            .map(|x| self.scatter(&x))
            .ok_or(SolverError::SingularSystem { iterations: 0, residual: f64::NAN })
    }
}

/// Checks that every interior value lies strictly in `(lo, hi)`.
pub fn check_strict_bounds(nodes: &[Node], values: &[f64], lo: f64, hi: f64) -> Result<(), SolverError> {
    for (x, n) in nodes.iter().enumerate() {
        if *n == Node::Interior && !(values[x] > lo && values[x] < hi) {
            return Err(SolverError::MaximumPrinciple { vertex: x, value: values[x] });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol_lin: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol_lin: 1e-10, max_iter: 50_000 }
    }
}

impl SolveOptions {
    pub(crate) fn cg(&self) -> CgOptions {
        CgOptions { rel_tol: self.tol_lin, max_iter: self.max_iter }
    }
}

/// Boundary roles for the exhaustion problem on `D(R)`: value 1 on the
/// layer of `end` at radius `R`, value 0 on the other ends' layers at `R`,
/// interior below, excluded above.
pub fn dirichlet_nodes(man: &DiscreteManifold, end: usize, radius: f64) -> Result<Vec<Node>, SolverError> {
    man.require_ends(2)?;
    if end >= man.end_count() {
        return Err(SolverError::InvalidInput(format!("end index {end} out of range")));
    }
    if radius <= man.inner_radius() || radius <= man.spec().r_core {
        return Err(SolverError::DomainTooSmall { radius, r0: man.inner_radius() });
    }
    let j = man.layer_index(radius).ok_or(SolverError::NotALayer(radius))?;
    Ok((0..man.len())
        .map(|x| match man.level(x).cmp(&j) {
            std::cmp::Ordering::Less => Node::Interior,
            std::cmp::Ordering::Equal => Node::Fixed(if man.in_end(x, end) { 1.0 } else { 0.0 }),
            std::cmp::Ordering::Greater => Node::Excluded,
        })
        .collect())
}

/// Solves `L v = sigma v` in `D(R)` with `v = 1` on `dE_i(R)` and `v = 0` on
/// `dF_i(R)`. The strict bounds `0 < v < 1` in the interior are asserted.
pub fn dirichlet_solve(
    man: &DiscreteManifold,
    end: usize,
    radius: f64,
    opts: SolveOptions,
) -> Result<DirichletSolution, SolverError> {
    let nodes = dirichlet_nodes(man, end, radius)?;
    let system = SchrodingerSystem::assemble(man.graph(), &nodes)?;
    let sol = system.solve(opts.cg(), None)?;
    check_strict_bounds(&nodes, &sol.values, 0.0, 1.0)?;
    Ok(sol)
}

/// Rescaled solution `u_R = C_R v_R` with `max_{D(r0)} u_R = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub values: Vec<f64>,
    pub scale: f64,
    /// First vertex attaining the maximum on `D(r0)`.
    pub argmax: usize,
}

pub fn normalize(v: &[f64], man: &DiscreteManifold, r0: f64) -> Result<Normalized, SolverError> {
    if r0 <= man.spec().r_core {
        return Err(SolverError::InvalidInput(format!(
            "normalization radius {r0} must exceed r_core so that D(r0) holds the core"
        )));
    }
    let mut best: Option<(usize, f64)> = None;
    for x in 0..man.len() {
        if man.in_sublevel(x, r0) && best.is_none_or(|(_, b)| v[x] > b) {
            best = Some((x, v[x]));
        }
    }
    let (argmax, peak) = best.ok_or_else(|| SolverError::InvalidInput("D(r0) is empty".into()))?;
    if !(peak > 0.0) {
        return Err(SolverError::NonPositiveInput { vertex: argmax, value: peak });
    }
    let scale = 1.0 / peak;
    Ok(Normalized { values: v.iter().map(|x| x * scale).collect(), scale, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_manifold, EndSpec, ModelSpec, SigmaLaw};

    fn unit_path(n: usize, sigma: Vec<f64>) -> WeightedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        WeightedGraph::new(vec![1.0; n], sigma, &edges).unwrap()
    }

    #[test]
    fn harmonic_path_interpolates_linearly() {
        let g = unit_path(5, vec![0.0; 5]);
        let nodes = [Node::Fixed(0.0), Node::Interior, Node::Interior, Node::Interior, Node::Fixed(1.0)];
        let sys = SchrodingerSystem::assemble(&g, &nodes).unwrap();
        let sol = sys.solve(CgOptions::default(), None).unwrap();
        for (got, want) in sol.values.iter().zip([0.0, 0.25, 0.5, 0.75, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn centre_potential_matches_hand_solved_system() {
        // interior rows: 2a - b = 0; -a + 3b - c = 0; -b + 2c = 1
        // => a = 1/8, b = 1/4, c = 5/8 (eliminate by hand)
        let g = unit_path(5, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        let nodes = [Node::Fixed(0.0), Node::Interior, Node::Interior, Node::Interior, Node::Fixed(1.0)];
        let sys = SchrodingerSystem::assemble(&g, &nodes).unwrap();
        let sol = sys.solve(CgOptions::default(), None).unwrap();
        let want = [0.0, 0.125, 0.25, 0.625, 1.0];
        for (got, want) in sol.values.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let dense = sys.solve_dense().unwrap();
        for (a, b) in dense.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn open_boundary_and_missing_boundary_rejected() {
        let g = unit_path(3, vec![0.0; 3]);
        assert_eq!(
            SchrodingerSystem::assemble(&g, &[Node::Fixed(0.0), Node::Interior, Node::Excluded]).unwrap_err(),
            SolverError::OpenBoundary(1)
        );
        assert_eq!(
            SchrodingerSystem::assemble(&g, &[Node::Interior; 3]).unwrap_err(),
            SolverError::NoBoundary
        );
    }

    #[test]
    fn isolated_harmonic_component_is_singular() {
        // vertices 2-3 form an interior island without potential or boundary
        let g = WeightedGraph::new(vec![1.0; 4], vec![0.0; 4], &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let nodes = [Node::Fixed(1.0), Node::Interior, Node::Interior, Node::Interior];
        let sys = SchrodingerSystem::assemble(&g, &nodes).unwrap();
        assert!(sys.solve_dense().is_err() || sys.solve(CgOptions::default(), None).is_err());
    }

    fn path_model() -> DiscreteManifold {
        build_manifold(&ModelSpec {
            n_dim: 2,
            ends: vec![EndSpec::new(1.0, 0.0, 1); 2],
            core_size: 1,
            r_core: 1.0,
            inner_radius: 2.0,
            r_max: 10.0,
            h: 1.0,
            sigma_law: SigmaLaw::Bump { c: 1.0, r_lo: 0.0, r_hi: 1.0 },
        })
        .unwrap()
    }

    #[test]
    fn manifold_solve_is_strictly_inside() {
        let man = path_model();
        let sol = dirichlet_solve(&man, 0, 6.0, SolveOptions::default()).unwrap();
        let j = man.layer_index(6.0).unwrap();
        for x in 0..man.len() {
            if man.level(x) < j {
                assert!(sol.values[x] > 0.0 && sol.values[x] < 1.0);
            }
        }
        assert_eq!(sol.values[man.layer(0, j)[0]], 1.0);
        assert_eq!(sol.values[man.layer(1, j)[0]], 0.0);
    }

    #[test]
    fn domain_checks() {
        let man = path_model();
        assert!(matches!(
            dirichlet_solve(&man, 0, 2.0, SolveOptions::default()),
            Err(SolverError::DomainTooSmall { .. })
        ));
        assert_eq!(
            dirichlet_solve(&man, 0, 5.5, SolveOptions::default()).unwrap_err(),
            SolverError::NotALayer(5.5)
        );
    }

    #[test]
    fn normalization_scales_to_unit_max() {
        let man = path_model();
        let v: Vec<f64> = (0..man.len()).map(|x| 0.25 * (1.0 + (x % 3) as f64) / 3.0).collect();
        let n = normalize(&v, &man, 4.0).unwrap();
        let peak = (0..man.len())
            .filter(|&x| man.in_sublevel(x, 4.0))
            .map(|x| n.values[x])
            .fold(f64::MIN, f64::max);
        assert!((peak - 1.0).abs() < 1e-15);
        let flat = vec![0.25; man.len()];
        let n = normalize(&flat, &man, 4.0).unwrap();
        assert_eq!(n.scale, 4.0);
        assert_eq!(n.argmax, 0);
    }
}

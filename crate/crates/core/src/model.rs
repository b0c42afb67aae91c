//! Model manifolds: a complete core graph with radial end tubes.
//!
//! Each end `i` is a stack of layers at radii `r_j = r_core + j*h`, every
//! layer holding `N_i` cross-section vertices. Measures and weights follow
//! the finite-volume radial stencil
//!
//! ```text
//! mu(x)   = A_i(r_j) * h / N_i             (x in layer j)
//! w(x, y) = A_i(r_j + h/2) / (h * N_i)     (x in layer j, y in layer j+1)
//! ```
//!
//! with `A_i(r) = omega_i * r^p_i`, so a radial function sees the operator
//! `u'' + (A'/A) u'` to second order.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::graph::WeightedGraph;

/// Potential as a function of the exhaustion radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaLaw {
    Zero,
    /// `sigma = upsilon / rho^2`.
    QuadraticDecay { upsilon: f64 },
    /// `sigma = c` for `r_lo <= rho <= r_hi`, zero elsewhere.
    Bump { c: f64, r_lo: f64, r_hi: f64 },
}

impl SigmaLaw {
    pub fn eval(&self, rho: f64) -> f64 {
        match *self {
            SigmaLaw::Zero => 0.0,
            SigmaLaw::QuadraticDecay { upsilon } => upsilon / (rho * rho),
            SigmaLaw::Bump { c, r_lo, r_hi } => {
                let tol = 1e-12 * r_hi.abs().max(1.0);
                if rho >= r_lo - tol && rho <= r_hi + tol {
                    c
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        match *self {
            SigmaLaw::Zero => Ok(()),
            SigmaLaw::QuadraticDecay { upsilon } if upsilon >= 0.0 && upsilon.is_finite() => Ok(()),
            SigmaLaw::Bump { c, r_lo, r_hi } if c >= 0.0 && c.is_finite() && r_lo <= r_hi => Ok(()),
            other => Err(ModelError::InvalidSpec(format!("bad sigma law {other:?}"))),
        }
    }
}

/// One radial end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndSpec {
    /// Area scale `omega_i`.
    pub profile_coefficient: f64,
    /// Area exponent `p_i`; defaults to `n_dim - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_exponent: Option<f64>,
    /// Vertices per layer; 1 gives a radial chain.
    #[serde(default = "default_one")]
    pub cross_section_size: usize,
    /// Potential override on this end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaLaw>,
}

impl EndSpec {
    pub fn new(omega: f64, exponent: f64, cross_section: usize) -> Self {
        Self {
            profile_coefficient: omega,
            profile_exponent: Some(exponent),
            cross_section_size: cross_section,
            sigma: None,
        }
    }

    pub fn with_sigma(mut self, law: SigmaLaw) -> Self {
        self.sigma = Some(law);
        self
    }
}

fn default_one() -> usize {
    1
}

fn default_r_core() -> f64 {
    1.0
}

/// Declarative description of a model manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n_dim: u32,
    pub ends: Vec<EndSpec>,
    #[serde(default = "default_one")]
    pub core_size: usize,
    #[serde(default = "default_r_core")]
    pub r_core: f64,
    /// Inner cutoff `R0`.
    #[serde(rename = "R0")]
    pub inner_radius: f64,
    pub r_max: f64,
    pub h: f64,
    pub sigma_law: SigmaLaw,
}

impl ModelSpec {
    /// `ends` identical ends `A(r) = omega r^p` with the given potential.
    pub fn symmetric(
        n_dim: u32,
        k: usize,
        end: EndSpec,
        h: f64,
        r_max: f64,
        sigma_law: SigmaLaw,
    ) -> Self {
        Self {
            n_dim,
            ends: vec![end; k],
            core_size: 1,
            r_core: 1.0,
            inner_radius: 2.0,
            r_max,
            h,
            sigma_law,
        }
    }

    pub fn exponent(&self, end: usize) -> f64 {
        self.ends[end]
            .profile_exponent
            .unwrap_or(f64::from(self.n_dim) - 1.0)
    }

    /// `A_i(r) = omega_i r^{p_i}`.
    pub fn area(&self, end: usize, r: f64) -> f64 {
        self.ends[end].profile_coefficient * r.powf(self.exponent(end))
    }

    pub fn sigma_on_end(&self, end: usize, rho: f64) -> f64 {
        self.ends[end].sigma.unwrap_or(self.sigma_law).eval(rho)
    }

    /// Largest profile exponent, the `m` implied by the ends.
    pub fn implied_m(&self) -> f64 {
        (0..self.ends.len()).map(|i| self.exponent(i)).fold(0.0, f64::max)
    }

    /// Number of radial steps `(r_max - r_core) / h`.
    pub fn steps(&self) -> usize {
        ((self.r_max - self.r_core) / self.h).round() as usize
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidSpec(m));
        if self.n_dim < 2 {
            return bad(format!("n_dim = {} < 2", self.n_dim));
        }
        if self.ends.is_empty() {
            return bad("at least one end is required".into());
        }
        if self.core_size == 0 {
            return bad("core_size must be at least 1".into());
        }
        if !(self.h > 0.0) || !(self.inner_radius > 0.0) || !(self.r_core > 0.0) {
            return bad("h, R0 and r_core must be positive".into());
        }
        if !(self.r_max > 4.0 * self.inner_radius) {
            return bad(format!("r_max = {} must exceed 4*R0 = {}", self.r_max, 4.0 * self.inner_radius));
        }
        let span = (self.r_max - self.r_core) / self.h;
        if (span - span.round()).abs() > 1e-9 * span.max(1.0) {
            return bad(format!("(r_max - r_core)/h = {span} is not an integer"));
        }
        if span.round() < 8.0 || self.r_max / self.h < 8.0 {
            return bad(format!("need at least 8 layers per end, got {span}"));
        }
        for (i, end) in self.ends.iter().enumerate() {
            if !(end.profile_coefficient > 0.0) {
                return bad(format!("end {i}: profile_coefficient must be positive"));
            }
            if !(self.exponent(i) >= 0.0) {
                return bad(format!("end {i}: profile_exponent must be nonnegative"));
            }
            if end.cross_section_size == 0 {
                return bad(format!("end {i}: cross_section_size must be at least 1"));
            }
            if let Some(law) = &end.sigma {
                law.validate()?;
            }
        }
        self.sigma_law.validate()
    }
}

/// Where a vertex lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexLabel {
    Core,
    End { end: usize, layer: usize },
}

impl VertexLabel {
    pub fn end(&self) -> Option<usize> {
        match self {
            VertexLabel::Core => None,
            VertexLabel::End { end, .. } => Some(*end),
        }
    }
}

impl std::fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexLabel::Core => write!(f, "core"),
            VertexLabel::End { end, layer } => write!(f, "end{end}:{layer}"),
        }
    }
}

/// Immutable discretized model manifold.
#[derive(Debug, Clone)]
pub struct DiscreteManifold {
    spec: ModelSpec,
    graph: WeightedGraph,
    rho: Vec<f64>,
    level: Vec<usize>,
    labels: Vec<VertexLabel>,
    core: Vec<usize>,
    layers: Vec<Vec<Vec<usize>>>,
    radii: Vec<f64>,
}

/// Builds the layered graph described by `spec`.
///
/// Vertex indices are assigned in spec order: core vertices first, then
/// each end layer by layer.
pub fn build_manifold(spec: &ModelSpec) -> Result<DiscreteManifold, ModelError> {
    spec.validate()?;
    let steps = spec.steps();
    let h = spec.h;
    let radii: Vec<f64> = (0..=steps).map(|j| spec.r_core + j as f64 * h).collect();

    let mut measure = Vec::new();
    let mut sigma = Vec::new();
    let mut rho = Vec::new();
    let mut level = Vec::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();

    let core: Vec<usize> = (0..spec.core_size).collect();
    for _ in &core {
        measure.push(1.0);
        sigma.push(spec.sigma_law.eval(spec.r_core));
        rho.push(spec.r_core);
        level.push(0);
        labels.push(VertexLabel::Core);
    }
    for (a, &x) in core.iter().enumerate() {
        for &y in &core[a + 1..] {
            edges.push((x, y, 1.0));
        }
    }

    let mut layers = Vec::with_capacity(spec.ends.len());
    for (i, end) in spec.ends.iter().enumerate() {
        let n = end.cross_section_size;
        let nf = n as f64;
        let mut end_layers: Vec<Vec<usize>> = Vec::with_capacity(radii.len());
        for (j, &r) in radii.iter().enumerate() {
            let mu = spec.area(i, r) * h / nf;
            let ids: Vec<usize> = (0..n).map(|k| measure.len() + k).collect();
            for _ in 0..n {
                measure.push(mu);
                sigma.push(spec.sigma_on_end(i, r));
                rho.push(r);
                level.push(j);
                labels.push(VertexLabel::End { end: i, layer: j });
            }
            if n == 2 {
                edges.push((ids[0], ids[1], mu / (h * h)));
            } else if n > 2 {
                for k in 0..n {
                    edges.push((ids[k], ids[(k + 1) % n], mu / (h * h)));
                }
            }
            match end_layers.last() {
                None => {
                    let w = spec.area(i, r) / (h * nf * spec.core_size as f64);
                    for &c in &core {
                        for &x in &ids {
                            edges.push((c, x, w));
                        }
                    }
                }
                Some(prev) => {
                    let w = spec.area(i, r - 0.5 * h) / (h * nf);
                    for (&x, &y) in prev.iter().zip(&ids) {
                        edges.push((x, y, w));
                    }
                }
            }
            end_layers.push(ids);
        }
        layers.push(end_layers);
    }

    if sigma.iter().all(|&s| s == 0.0) {
        return Err(ModelError::ZeroPotential);
    }
    let graph = WeightedGraph::new(measure, sigma, &edges)?;
    Ok(DiscreteManifold { spec: spec.clone(), graph, rho, level, labels, core, layers, radii })
}

impl DiscreteManifold {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn measure(&self) -> &[f64] {
        self.graph.measure()
    }

    pub fn sigma(&self) -> &[f64] {
        self.graph.sigma()
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn h(&self) -> f64 {
        self.spec.h
    }

    pub fn inner_radius(&self) -> f64 {
        self.spec.inner_radius
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    pub fn end_count(&self) -> usize {
        self.layers.len()
    }

    pub fn core(&self) -> &[usize] {
        &self.core
    }

    /// Shared layer radii `r_j`, ascending.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Vertices of end `i` at layer `j`.
    pub fn layer(&self, end: usize, j: usize) -> &[usize] {
        &self.layers[end][j]
    }

    pub fn layer_count(&self) -> usize {
        self.radii.len()
    }

    /// Radius index of a vertex (core vertices sit at index 0).
    pub fn level(&self, x: usize) -> usize {
        self.level[x]
    }

    /// Index of the layer at radius `r`, if `r` is a layer radius.
    pub fn layer_index(&self, r: f64) -> Option<usize> {
        let j = ((r - self.spec.r_core) / self.spec.h).round();
        if j < 0.0 || j as usize >= self.radii.len() {
            return None;
        }
        let j = j as usize;
        ((self.radii[j] - r).abs() <= 1e-9 * self.spec.h).then_some(j)
    }

    /// Layer radius closest to `r`.
    pub fn nearest_layer(&self, r: f64) -> usize {
        let j = ((r - self.spec.r_core) / self.spec.h).round().max(0.0) as usize;
        j.min(self.radii.len() - 1)
    }

    /// Level set `Sigma(r_j)`: all end layers at index `j`, plus the core when `j == 0`.
    pub fn level_set(&self, j: usize) -> Vec<usize> {
        let mut out = if j == 0 { self.core.clone() } else { Vec::new() };
        for end in &self.layers {
            out.extend_from_slice(&end[j]);
        }
        out
    }

    /// `x` lies in the open sublevel set `D(r) = {rho < r}`.
    pub fn in_sublevel(&self, x: usize, r: f64) -> bool {
        self.rho[x] < r - 1e-9 * self.spec.h
    }

    pub fn sublevel(&self, r: f64) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.in_sublevel(x, r)).collect()
    }

    /// `mu(D(r))`.
    pub fn volume_below(&self, r: f64) -> f64 {
        let mu = self.measure();
        (0..self.len()).filter(|&x| self.in_sublevel(x, r)).map(|x| mu[x]).sum()
    }

    pub fn total_measure(&self) -> f64 {
        self.measure().iter().sum()
    }

    pub fn in_end(&self, x: usize, end: usize) -> bool {
        self.labels[x].end() == Some(end)
    }

    pub fn end_vertices(&self, end: usize) -> Vec<usize> {
        self.layers[end].iter().flatten().copied().collect()
    }

    /// Connected components left after deleting the core.
    pub fn components_without_core(&self) -> Vec<Vec<usize>> {
        let keep: Vec<bool> = self.labels.iter().map(|l| *l != VertexLabel::Core).collect();
        self.graph.components(&keep)
    }

    /// Vertex permutation exchanging ends `a` and `b`, or `None` when the two
    /// ends are not built from identical specs.
    pub fn mirror_map(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if self.spec.ends[a] != self.spec.ends[b] {
            return None;
        }
        let mut map: Vec<usize> = (0..self.len()).collect();
        for (la, lb) in self.layers[a].iter().zip(&self.layers[b]) {
            for (&x, &y) in la.iter().zip(lb) {
                map[x] = y;
                map[y] = x;
            }
        }
        Some(map)
    }

    /// Same manifold with every vertex measure scaled by `lambda` and every
    /// edge weight scaled by `lambda` as well, so the Laplacian is unchanged.
    pub fn with_scaled_measure(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.graph = self.graph.with_scaled_measure(lambda).with_scaled_weights(lambda);
        out
    }

    /// Same geometry with a different potential law on every vertex.
    pub fn with_sigma_values(&self, sigma: Vec<f64>) -> Result<Self, ModelError> {
        if sigma.iter().all(|&s| s == 0.0) {
            return Err(ModelError::ZeroPotential);
        }
        let mut out = self.clone();
        out.graph = self.graph.with_sigma(sigma)?;
        Ok(out)
    }

    pub(crate) fn require_ends(&self, needed: usize) -> Result<(), ModelError> {
        if self.end_count() < needed {
            return Err(ModelError::TooFewEnds { needed, found: self.end_count() });
        }
        Ok(())
    }
}

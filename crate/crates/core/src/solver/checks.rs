use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::end_function::EndFunction;
use crate::error::SolverError;
use crate::linalg::singular_values;
use crate::model::DiscreteManifold;

/// Per-end outcome of the separation checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndSeparation {
    pub end_index: usize,
    /// `min u_i` off `E_i`, truncation layer excluded.
    pub min_off_end: f64,
    /// `max u_i` off `E_i`.
    pub max_off_end: f64,
    pub bounded_off_end: bool,
    pub positive: bool,
    pub sup: f64,
    pub sup_on_end: bool,
    pub sup_exceeds_one: bool,
    /// Smallest increment of `r -> max_{dE_i(r)} u_i`; must be positive.
    pub end_increment_margin: f64,
    pub end_strictly_increasing: bool,
    /// Largest increment of `r -> max_{dF_i(r)} u_i`; must be nonpositive.
    pub other_increment_margin: f64,
    pub other_nonincreasing: bool,
    pub passed: bool,
}

/// Discrete analog of `u_i <= C_j (S_j - u_j)` on `E_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCheck {
    pub i: usize,
    pub j: usize,
    pub c_j: f64,
    pub s_j: f64,
    /// `max_{E_j} (u_i - C_j (S_j - u_j))`; nonpositive when the claim holds.
    pub max_excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub tol: f64,
    pub ends: Vec<EndSeparation>,
    pub comparisons: Vec<ComparisonCheck>,
    /// `||u_1 - u_2 o mirror||_inf` on two-end models with identical ends.
    pub mirror_error: Option<f64>,
    pub passed: bool,
}

/// Running maximum of `u` over each layer of the given ends.
pub fn layer_maxima(man: &DiscreteManifold, u: &[f64], ends: &[usize]) -> Vec<f64> {
    (0..man.layer_count())
        .map(|j| {
            ends.iter()
                .flat_map(|&e| man.layer(e, j).iter())
                .map(|&x| u[x])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

fn separation_for(man: &DiscreteManifold, ef: &EndFunction, tol: f64) -> EndSeparation {
    let i = ef.end_index;
    let u = &ef.values;
    let top = man.layer_index(ef.last_radius()).unwrap_or(man.layer_count() - 1);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in 0..man.len() {
        if man.in_end(x, i) || man.level(x) >= top {
            continue;
        }
        lo = lo.min(u[x]);
        hi = hi.max(u[x]);
    }
    let (sup_x, sup) = u
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (x, v)| if v > acc.1 { (x, v) } else { acc });

    let own = layer_maxima(man, u, &[i]);
    let own = &own[..=top];
    let end_margin = own.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let others: Vec<usize> = (0..man.end_count()).filter(|&e| e != i).collect();
    let theirs = layer_maxima(man, u, &others);
    let theirs = &theirs[..=top];
    let other_margin = theirs.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);

    let mut s = EndSeparation {
        end_index: i,
        min_off_end: lo,
        max_off_end: hi,
        bounded_off_end: hi <= 1.0 + tol,
        positive: lo > 0.0,
        sup,
        sup_on_end: man.in_end(sup_x, i),
        sup_exceeds_one: sup > 1.0,
        end_increment_margin: end_margin,
        end_strictly_increasing: end_margin > 0.0,
        other_increment_margin: other_margin,
        other_nonincreasing: other_margin <= tol,
        passed: false,
    };
    s.passed = s.bounded_off_end
        && s.positive
        && s.sup_on_end
        && s.sup_exceeds_one
        && s.end_strictly_increasing
        && s.other_nonincreasing;
    s
}

fn comparison(man: &DiscreteManifold, ui: &EndFunction, uj: &EndFunction, tol: f64) -> ComparisonCheck {
    let j = uj.end_index;
    let s_j = uj.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gap_min = (0..man.len())
        .filter(|&x| man.in_sublevel(x, uj.r0))
        .map(|x| s_j - uj.values[x])
        .fold(f64::INFINITY, f64::min);
    let c_j = 1.0 / gap_min;
    let max_excess = man
        .end_vertices(j)
        .into_iter()
        .map(|x| ui.values[x] - c_j * (s_j - uj.values[x]))
        .fold(f64::NEG_INFINITY, f64::max);
    ComparisonCheck { i: ui.end_index, j, c_j, s_j, max_excess, holds: max_excess <= tol }
}

/// Checks boundedness off the own end, monotone level-set maxima, the
/// supremum above one, the pairwise comparison bound, and mirror symmetry.
pub fn verify_separation(end_fns: &[EndFunction], man: &DiscreteManifold, tol: f64) -> SeparationReport {
    let ends: Vec<EndSeparation> = end_fns.iter().map(|ef| separation_for(man, ef, tol)).collect();
    let mut comparisons = Vec::new();
    for a in end_fns {
        for b in end_fns {
            if a.end_index != b.end_index {
                comparisons.push(comparison(man, a, b, tol));
            }
        }
    }
    let mirror_error = match end_fns {
        [a, b] => man.mirror_map(a.end_index, b.end_index).map(|map| {
            (0..man.len()).map(|x| (a.values[x] - b.values[map[x]]).abs()).fold(0.0, f64::max)
        }),
        _ => None,
    };
    let passed = ends.iter().all(|e| e.passed) && comparisons.iter().all(|c| c.holds);
    SeparationReport { tol, ends, comparisons, mirror_error, passed }
}

/// Gram matrix of the end functions over `D(domain_radius)` and its rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub domain_radius: f64,
    pub matrix: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub rank_tol: f64,
    pub rank: usize,
}

pub fn gram_rank(
    end_fns: &[EndFunction],
    man: &DiscreteManifold,
    domain_radius: f64,
    rank_tol: f64,
) -> GramReport {
    let domain = man.sublevel(domain_radius);
    let mu = man.measure();
    let k = end_fns.len();
    let g = DMatrix::from_fn(k, k, |a, b| {
        domain.iter().map(|&x| mu[x] * end_fns[a].values[x] * end_fns[b].values[x]).sum()
    });
    let sv = singular_values(&g);
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = if top > 0.0 { sv.iter().filter(|&&s| s > rank_tol * top).count() } else { 0 };
    GramReport {
        domain_radius,
        matrix: (0..k).map(|a| (0..k).map(|b| g[(a, b)]).collect()).collect(),
        singular_values: sv,
        rank_tol,
        rank,
    }
}

/// `max |ln u(x) - ln u(y)| / h` over edges with both ends in `D(r)`.
pub fn harnack_check(man: &DiscreteManifold, u: &[f64], r: f64) -> Result<f64, SolverError> {
    for x in 0..man.len() {
        if man.in_sublevel(x, r) && !(u[x] > 0.0) {
            return Err(SolverError::NonPositiveInput { vertex: x, value: u[x] });
        }
    }
    let h = man.h();
    Ok(man
        .graph()
        .edges()
        .filter(|&(x, y, _)| man.in_sublevel(x, r) && man.in_sublevel(y, r))
        .map(|(x, y, _)| (u[x].ln() - u[y].ln()).abs() / h)
        .fold(0.0, f64::max))
}

/// Harnack values of `u_R` along the exhaustion ladder at a fixed radius.
pub fn harnack_ladder(man: &DiscreteManifold, ef: &EndFunction, r: f64) -> Result<Vec<f64>, SolverError> {
    ef.ladder.iter().map(|rung| harnack_check(man, &rung.values, r)).collect()
}

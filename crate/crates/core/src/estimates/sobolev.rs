use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EstimateError;
use crate::model::DiscreteManifold;

pub const JACOBI_SWEEPS: usize = 5;
pub const TENT_SCALES: [f64; 3] = [0.25, 0.5, 1.0];

/// Named trial function for the Sobolev quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub radius: f64,
    pub mu_exponent: f64,
    pub names: Vec<String>,
    pub ratios: Vec<f64>,
    /// Largest ratio, a lower bound for the best constant `A`.
    pub best: f64,
    pub best_trial: String,
}

/// `(avg phi^{2 mu})^{1/mu} / (R^2 avg(|grad phi|^2 + sigma phi^2))` over `D(R)`.
pub fn sobolev_ratio(man: &DiscreteManifold, radius: f64, mu_exponent: f64, phi: &[f64]) -> Result<f64, EstimateError> {
    if phi.len() != man.len() {
        return Err(EstimateError::InvalidParameter("trial length does not match the manifold".into()));
    }
    for x in 0..man.len() {
        if !man.in_sublevel(x, radius) && phi[x] != 0.0 {
            return Err(EstimateError::InvalidParameter(format!(
                "trial function is nonzero at vertex {x} outside D({radius})"
            )));
        }
    }
    let g = man.graph();
    let mu = g.measure();
    let volume = man.volume_below(radius);
    let lp: f64 = (0..man.len()).map(|x| mu[x] * phi[x].abs().powf(2.0 * mu_exponent)).sum();
    let lhs = (lp / volume).powf(1.0 / mu_exponent);
    let potential: f64 = (0..man.len()).map(|x| mu[x] * g.sigma()[x] * phi[x] * phi[x]).sum();
    let rhs = radius * radius * (g.dirichlet_energy(phi) + potential) / volume;
    if !(rhs > 0.0) {
        return Err(EstimateError::InvalidParameter("trial function has zero energy".into()));
    }
    Ok(lhs / rhs)
}

pub fn sobolev_measure(
    man: &DiscreteManifold,
    radius: f64,
    mu_exponent: f64,
    trials: &[Trial],
) -> Result<SobolevReport, EstimateError> {
    if trials.is_empty() {
        return Err(EstimateError::EmptyTrialSet);
    }
    if !(mu_exponent > 1.0) {
        return Err(EstimateError::InvalidParameter(format!("mu = {mu_exponent} must exceed 1")));
    }
    let ratios = trials
        .iter()
        .map(|t| sobolev_ratio(man, radius, mu_exponent, &t.values))
        .collect::<Result<Vec<_>, _>>()?;
    let (k, best) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, r)| if r > acc.1 { (k, r) } else { acc });
    Ok(SobolevReport {
        radius,
        mu_exponent,
        names: trials.iter().map(|t| t.name.clone()).collect(),
        ratios,
        best,
        best_trial: trials[k].name.clone(),
    })
}

/// `(1 - rho / (s R))_+` restricted to `D(R)`.
pub fn tent(man: &DiscreteManifold, radius: f64, scale: f64) -> Vec<f64> {
    (0..man.len())
        .map(|x| if man.in_sublevel(x, radius) { (1.0 - man.rho()[x] / (scale * radius)).max(0.0) } else { 0.0 })
        .collect()
}

/// Weighted-average smoothing `phi(x) <- sum w phi(y) / sum w` inside `D(R)`.
pub fn jacobi_smooth(man: &DiscreteManifold, radius: f64, phi: &[f64], sweeps: usize) -> Vec<f64> {
    let g = man.graph();
    let mut cur = phi.to_vec();
    for _ in 0..sweeps {
        cur = (0..man.len())
            .map(|x| {
                if !man.in_sublevel(x, radius) {
                    return 0.0;
                }
                g.neighbors(x).map(|(y, w)| w * cur[y]).sum::<f64>() / g.weighted_degree(x)
            })
            .collect();
    }
    cur
}

/// Tents at three scales plus `random` seeded nonnegative noise fields smoothed
/// by five Jacobi sweeps.
pub fn default_trials(man: &DiscreteManifold, radius: f64, random: usize, seed: u64) -> Vec<Trial> {
    let mut out: Vec<Trial> = TENT_SCALES
        .iter()
        .map(|&s| Trial { name: format!("tent_{s}"), values: tent(man, radius, s) })
        .filter(|t| t.values.iter().any(|v| *v > 0.0))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random {
        let noise: Vec<f64> = (0..man.len())
            .map(|x| if man.in_sublevel(x, radius) { rng.gen::<f64>() } else { 0.0 })
            .collect();
        out.push(Trial { name: format!("random_{k}"), values: jacobi_smooth(man, radius, &noise, JACOBI_SWEEPS) });
    }
    out
}

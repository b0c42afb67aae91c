use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dirichlet::{dirichlet_solve, normalize, SolveOptions};
use crate::error::SolverError;
use crate::model::DiscreteManifold;
use crate::profile::format_float;

/// One exhaustion radius of the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub radius: f64,
    /// `C_R = (max_{D(r0)} v_R)^{-1}`.
    pub scale: f64,
    pub iterations: usize,
    pub relative_residual: f64,
    /// Normalized `u_R` on every vertex; zero beyond `R`.
    #[serde(skip)]
    pub values: Vec<f64>,
}

/// Positive solution attached to one end, taken from the largest rung.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndFunction {
    pub end_index: usize,
    pub r0: f64,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub ladder: Vec<Rung>,
    /// `sup_{D(r0)} |u_{R_last} - u_{R_prev}|`.
    pub convergence_gap: f64,
    pub tol_limit: f64,
    pub converged: bool,
}

impl EndFunction {
    pub fn last_radius(&self) -> f64 {
        self.ladder.last().expect("ladder is never empty").radius
    }

    /// `(R, C_R)` per rung.
    pub fn normalization_history(&self) -> Vec<(f64, f64)> {
        self.ladder.iter().map(|r| (r.radius, r.scale)).collect()
    }

    pub fn require_converged(&self) -> Result<(), SolverError> {
        if self.converged {
            Ok(())
        } else {
            Err(SolverError::NotConverged { gap: self.convergence_gap, tol: self.tol_limit })
        }
    }

    /// `vertex_id,rho,end_label,value` rows with a header.
    pub fn write_csv<W: Write>(&self, man: &DiscreteManifold, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["vertex_id", "rho", "end_label", "value"])?;
        for x in 0..man.len() {
            w.write_record([
                x.to_string(),
                format_float(man.rho()[x]),
                man.labels()[x].to_string(),
                format_float(self.values[x]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Layer radii for the exhaustion `R in {r_max/4, r_max/2, r_max}`, snapped to
/// the nearest layer and required to lie strictly above `max(R0, r0)`.
pub fn exhaustion_ladder(man: &DiscreteManifold, r0: f64) -> Result<Vec<f64>, SolverError> {
    let r_max = man.r_max();
    let floor = man.inner_radius().max(r0);
    let mut rungs: Vec<f64> = Vec::new();
    for frac in [0.25, 0.5, 1.0] {
        let r = man.radii()[man.nearest_layer(frac * r_max)];
        if r > floor + 1e-9 * man.h() && rungs.last().is_none_or(|&last| r > last) {
            rungs.push(r);
        }
    }
    if rungs.len() < 3 {
        return Err(SolverError::InvalidInput(format!(
            "exhaustion ladder needs three layer radii above max(R0, r0) = {floor}; r_max = {r_max} is too small"
        )));
    }
    Ok(rungs)
}

/// Runs the exhaustion ladder for one end and keeps the last rung.
pub fn construct_end_function(
    man: &DiscreteManifold,
    end: usize,
    r0: f64,
    tol_limit: f64,
    opts: SolveOptions,
) -> Result<EndFunction, SolverError> {
    man.require_ends(2)?;
    let radii = exhaustion_ladder(man, r0)?;
    let ladder: Vec<Rung> = radii
        .par_iter()
        .map(|&radius| {
            let sol = dirichlet_solve(man, end, radius, opts)?;
            let n = normalize(&sol.values, man, r0)?;
            Ok(Rung {
                radius,
                scale: n.scale,
                iterations: sol.iterations,
                relative_residual: sol.relative_residual,
                values: n.values,
            })
        })
        .collect::<Result<_, SolverError>>()?;
    let last = &ladder[ladder.len() - 1];
    let prev = &ladder[ladder.len() - 2];
    let convergence_gap = (0..man.len())
        .filter(|&x| man.in_sublevel(x, r0))
        .map(|x| (last.values[x] - prev.values[x]).abs())
        .fold(0.0, f64::max);
    Ok(EndFunction {
        end_index: end,
        r0,
        values: last.values.clone(),
        convergence_gap,
        tol_limit,
        converged: convergence_gap <= tol_limit,
        ladder,
    })
}

/// Gaps `sup_{D(r0)} |u_{R_k+1} - u_{R_k}|` between consecutive rungs.
pub fn ladder_gaps(man: &DiscreteManifold, ef: &EndFunction) -> Vec<f64> {
    ef.ladder
        .windows(2)
        .map(|w| {
            (0..man.len())
                .filter(|&x| man.in_sublevel(x, ef.r0))
                .map(|x| (w[1].values[x] - w[0].values[x]).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

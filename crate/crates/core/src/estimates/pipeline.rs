use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::alpha::{alpha_report, AlphaReport};
use super::exponents::{dimension_bound, DimensionBound};
use super::growth::{effective_upsilon, growth_fit, GrowthParams, GrowthReport, DEFAULT_FIT_TOL};
use super::moser::{moser_ladder, moser_radii, MoserLadder, MoserOptions};
use super::radial::{chi_diagnostics, ChiParams, ChiReport};
use crate::error::EstimateError;
use crate::limsup::DEFAULT_TAIL_FRACTION;
use crate::model::DiscreteManifold;
use crate::solver::{
    construct_end_function, gram_rank, verify_separation, EndFunction, GramReport, SeparationReport, SolveOptions,
    DEFAULT_RANK_TOL, DEFAULT_TOL_LIMIT,
};

/// Diagnostics to run after the end functions are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stages {
    pub growth: bool,
    pub moser: bool,
    pub alpha: bool,
    pub chi: bool,
    pub dimension: bool,
}

impl Default for Stages {
    fn default() -> Self {
        Self { growth: true, moser: true, alpha: true, chi: true, dimension: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Normalization radius; defaults to `4 R0`.
    pub r0: Option<f64>,
    pub tol_lin: f64,
    pub max_iter: usize,
    pub tol_limit: f64,
    pub rank_tol: f64,
    pub fit_tol: f64,
    pub tail_fraction: f64,
    pub q: f64,
    pub nu: f64,
    /// Defaults to `max(max_i p_i, 1/4)`.
    pub m: Option<f64>,
    /// Defaults to the largest `sigma rho^2` beyond `R0`.
    pub upsilon: Option<f64>,
    pub theta: f64,
    pub thetas: Vec<f64>,
    /// Growth degree for the dimension bound; defaults to the largest fitted exponent.
    pub degree: Option<f64>,
    pub separation_tol: f64,
    pub stages: Stages,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            r0: None,
            tol_lin: 1e-10,
            max_iter: 50_000,
            tol_limit: DEFAULT_TOL_LIMIT,
            rank_tol: DEFAULT_RANK_TOL,
            fit_tol: DEFAULT_FIT_TOL,
            tail_fraction: DEFAULT_TAIL_FRACTION,
            q: 1.2,
            nu: 1.5,
            m: None,
            upsilon: None,
            theta: 1.0,
            thetas: super::moser::DEFAULT_THETAS.to_vec(),
            degree: None,
            separation_tol: 1e-6,
            stages: Stages::default(),
        }
    }
}

impl PipelineConfig {
    pub fn resolved_r0(&self, man: &DiscreteManifold) -> f64 {
        self.r0.unwrap_or(4.0 * man.inner_radius())
    }

    pub fn resolved_m(&self, man: &DiscreteManifold) -> f64 {
        self.m.unwrap_or_else(|| man.spec().implied_m().max(0.25))
    }

    pub fn resolved_upsilon(&self, man: &DiscreteManifold) -> f64 {
        self.upsilon.unwrap_or_else(|| effective_upsilon(man))
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { tol_lin: self.tol_lin, max_iter: self.max_iter }
    }

    pub fn moser_options(&self) -> MoserOptions {
        MoserOptions { thetas: self.thetas.clone(), ..MoserOptions::new(self.nu) }
    }

    pub fn validate(&self) -> Result<(), EstimateError> {
        let positive = [
            ("tol_lin", self.tol_lin),
            ("tol_limit", self.tol_limit),
            ("rank_tol", self.rank_tol),
            ("fit_tol", self.fit_tol),
            ("separation_tol", self.separation_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(EstimateError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction < 1.0) {
            return Err(EstimateError::InvalidParameter(format!("tail_fraction = {}", self.tail_fraction)));
        }
        if !(self.q >= 1.0 && self.nu > 1.0 && self.theta > 0.0 && self.theta <= 1.0) {
            return Err(EstimateError::InvalidParameter("need q >= 1, nu > 1, 0 < theta <= 1".into()));
        }
        Ok(())
    }
}

/// Headline report: the end functions, their independence, and every
/// requested diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndCountReport {
    pub ends: usize,
    pub r0: f64,
    pub m: f64,
    pub upsilon: f64,
    pub end_functions: Vec<EndFunction>,
    pub converged: bool,
    pub separation: SeparationReport,
    pub gram: GramReport,
    pub rank_ok: bool,
    pub growth: Option<Vec<GrowthReport>>,
    pub alpha: Option<AlphaReport>,
    pub moser: Option<Vec<MoserLadder>>,
    pub moser_localized: Option<Vec<MoserLadder>>,
    pub chi: Option<Vec<ChiReport>>,
    pub dimension: Option<DimensionBound>,
    /// `k <= dim_bound`, when the bound was computed.
    pub count_ok: Option<bool>,
    /// Every check passed, convergence of the ladders included.
    pub passed: bool,
}

/// Builds all end functions on `man` and runs the configured diagnostics.
pub fn end_count_pipeline(man: &DiscreteManifold, config: &PipelineConfig) -> Result<EndCountReport, EstimateError> {
    config.validate()?;
    man.require_ends(2)?;
    let k = man.end_count();
    let r0 = config.resolved_r0(man);
    let m = config.resolved_m(man);
    let upsilon = config.resolved_upsilon(man);
    let opts = config.solve_options();

    let end_functions = (0..k)
        .into_par_iter()
        .map(|e| construct_end_function(man, e, r0, config.tol_limit, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let converged = end_functions.iter().all(|ef| ef.converged);
    let separation = verify_separation(&end_functions, man, config.separation_tol);
    let gram = gram_rank(&end_functions, man, man.r_max(), config.rank_tol);
    let rank_ok = gram.rank == k;

    let alpha = config
        .stages
        .alpha
        .then(|| alpha_report(man, config.q, config.tail_fraction))
        .transpose()?;
    let alpha_level = alpha
        .as_ref()
        .map(|a| a.alpha_level)
        .map_or_else(|| super::compute_alpha_level(man, config.q, config.tail_fraction), Ok)?;

    let chi = config
        .stages
        .chi
        .then(|| {
            end_functions
                .par_iter()
                .map(|ef| {
                    let params = ChiParams {
                        r0,
                        m,
                        q: config.q,
                        nu: config.nu,
                        theta: config.theta,
                        alpha: alpha_level.value,
                    };
                    chi_diagnostics(man, &ef.values, params)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;

    let growth = config
        .stages
        .growth
        .then(|| {
            end_functions
                .iter()
                .enumerate()
                .map(|(i, ef)| {
                    let c = chi.as_ref().map(|c| &c[i]);
                    let params = GrowthParams {
                        m,
                        upsilon: Some(upsilon),
                        c0: c.and_then(|c| c.c0),
                        q: config.q,
                        nu: config.nu,
                        fit_tol: config.fit_tol,
                        lambda0: c.map(|c| c.lambda0),
                    };
                    growth_fit(man, &ef.values, config.tail_fraction, &params)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;

    let moser_opts = config.moser_options();
    let radii = moser_radii(man);
    let (moser, moser_localized) = if config.stages.moser {
        let global = end_functions
            .par_iter()
            .map(|ef| moser_ladder(man, &ef.values, &radii, None, &moser_opts))
            .collect::<Result<Vec<_>, _>>()?;
        let local = end_functions
            .par_iter()
            .map(|ef| moser_ladder(man, &ef.values, &radii, Some(ef.end_index), &moser_opts))
            .collect::<Result<Vec<_>, _>>()?;
        (Some(global), Some(local))
    } else {
        (None, None)
    };

    let dimension = config
        .stages
        .dimension
        .then(|| {
            let a0 = moser
                .as_ref()
                .map(|ls| {
                    ls.iter()
                        .filter_map(|l| l.reports.last())
                        .map(|r| r.a0)
                        .fold(0.0, f64::max)
                })
                .filter(|a| *a > 0.0)
                .unwrap_or(1.0);
            let degree = config.degree.unwrap_or_else(|| {
                growth
                    .as_ref()
                    .map(|g| g.iter().map(|r| r.fitted_exponent).fold(0.0, f64::max))
                    .unwrap_or(0.0)
            });
            let mu = config.nu / (config.nu - 1.0);
            dimension_bound(m, degree.max(0.0), a0, mu)
        })
        .transpose()?;
    let count_ok = dimension.map(|d| (k as f64) <= d.dim_bound);

    let passed = converged
        && separation.passed
        && rank_ok
        && count_ok != Some(false)
        && growth.as_ref().is_none_or(|g| g.iter().all(|r| r.pass))
        && alpha.as_ref().is_none_or(|a| a.holder_monotone)
        && moser
            .as_ref()
            .is_none_or(|ls| ls.iter().all(|l| l.stable && l.reports.iter().all(|r| r.theta_exponent_ok)))
        && chi.as_ref().is_none_or(|cs| cs.iter().all(|c| c.chi_nondecreasing && c.c0.is_some()));

    Ok(EndCountReport {
        ends: k,
        r0,
        m,
        upsilon,
        end_functions,
        converged,
        separation,
        gram,
        rank_ok,
        growth,
        alpha,
        moser,
        moser_localized,
        chi,
        dimension,
        count_ok,
        passed,
    })
}

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use endslab::estimates::{PipelineConfig, Stages};
use endslab::model::ModelSpec;
use endslab::solitons::{SolitonExample, DEFAULT_QUAD_TOL, DEFAULT_R_QUAD_MAX};

use crate::error::CliError;

/// Soliton selected by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonChoice {
    pub name: String,
    pub n: u32,
    /// Curvature constant of the conical toy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default)]
    pub f_shift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_quad_max: Option<f64>,
}

impl SolitonChoice {
    pub fn example(&self) -> Result<SolitonExample, CliError> {
        let base = match (self.name.as_str(), self.c) {
            ("conical" | "conical_toy", Some(c)) => SolitonExample::conical_toy(self.n, c),
            (name, _) => SolitonExample::by_name(name, self.n),
        }?;
        let ex = base
            .with_f_shift(self.f_shift)
            .with_r_quad_max(self.r_quad_max.unwrap_or(DEFAULT_R_QUAD_MAX));
        ex.validate()?;
        Ok(ex)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelChoice {
    Manifold(ModelSpec),
    Soliton(SolitonChoice),
}

/// Named diagnostic groups a run may request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ends,
    Growth,
    Chi,
    Moser,
    Alpha,
    Sobolev,
    Lemma,
    Dimension,
    Soliton,
}

impl Stage {
    pub const MANIFOLD: [Stage; 8] = [
        Stage::Ends,
        Stage::Growth,
        Stage::Chi,
        Stage::Moser,
        Stage::Alpha,
        Stage::Sobolev,
        Stage::Lemma,
        Stage::Dimension,
    ];
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("stage serializes");
        write!(f, "{}", s.as_str().expect("stage is a string"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tol_lin: f64,
    pub tol_limit: f64,
    pub rank_tol: f64,
    pub fit_tol: f64,
    pub quad_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            tol_lin: p.tol_lin,
            tol_limit: p.tol_limit,
            rank_tol: p.rank_tol,
            fit_tol: p.fit_tol,
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }
}

/// Optional overrides of the estimate parameters; unset fields keep the
/// library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Seeded random trial functions for the Sobolev quotient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sobolev_random_trials: Option<usize>,
}

pub const DEFAULT_SOBOLEV_TRIALS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub model: ModelChoice,
    /// Requested stages; empty means every stage that applies to the model.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pipeline: Vec<Stage>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub estimates: EstimateOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Parses JSON; syntax and schema errors carry line and column.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            // serde appends the position, which the error already carries
            message: e.to_string().rsplit_once(" at line ").map_or(e.to_string(), |(m, _)| m.to_string()),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Reads a file, or falls back to a shipped example of the same name.
    pub fn load(arg: &str) -> Result<Self, CliError> {
        let path = Path::new(arg);
        if path.exists() {
            return Self::from_path(path);
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
        if let Some(text) = crate::shipped::config_text(stem) {
            return Self::from_json(text, &format!("shipped:{stem}"));
        }
        Self::from_path(path)
    }

    pub fn is_soliton(&self) -> bool {
        matches!(self.model, ModelChoice::Soliton(_))
    }

    /// Requested stages with defaults filled in, sorted and deduplicated.
    pub fn stages(&self) -> Vec<Stage> {
        let mut out = if !self.pipeline.is_empty() {
            self.pipeline.clone()
        } else if self.is_soliton() {
            vec![Stage::Soliton]
        } else {
            Stage::MANIFOLD.to_vec()
        };
        if !self.is_soliton() && !out.contains(&Stage::Ends) {
            out.push(Stage::Ends);
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [
            ("tol_lin", t.tol_lin),
            ("tol_limit", t.tol_limit),
            ("rank_tol", t.rank_tol),
            ("fit_tol", t.fit_tol),
            ("quad_tol", t.quad_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        let stages = self.stages();
        match &self.model {
            ModelChoice::Soliton(choice) => {
                if let Some(s) = stages.iter().find(|s| **s != Stage::Soliton) {
                    return Err(CliError::Config(format!("stage `{s}` does not apply to a soliton model")));
                }
                choice.example()?;
            }
            ModelChoice::Manifold(spec) => {
                if stages.contains(&Stage::Soliton) {
                    return Err(CliError::Config("stage `soliton` needs a soliton model".into()));
                }
                spec.validate()?;
                self.pipeline_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        let d = PipelineConfig::default();
        let e = &self.estimates;
        let t = &self.tolerances;
        let stages = self.stages();
        PipelineConfig {
            r0: e.r0,
            tol_lin: t.tol_lin,
            max_iter: e.max_iter.unwrap_or(d.max_iter),
            tol_limit: t.tol_limit,
            rank_tol: t.rank_tol,
            fit_tol: t.fit_tol,
            tail_fraction: e.tail_fraction.unwrap_or(d.tail_fraction),
            q: e.q.unwrap_or(d.q),
            nu: e.nu.unwrap_or(d.nu),
            m: e.m,
            upsilon: e.upsilon,
            theta: e.theta.unwrap_or(d.theta),
            thetas: e.thetas.clone().unwrap_or(d.thetas),
            degree: e.degree,
            separation_tol: e.separation_tol.unwrap_or(d.separation_tol),
            stages: Stages {
                growth: stages.contains(&Stage::Growth),
                moser: stages.contains(&Stage::Moser),
                alpha: stages.contains(&Stage::Alpha),
                chi: stages.contains(&Stage::Chi),
                dimension: stages.contains(&Stage::Dimension),
            },
        }
    }

    pub fn sobolev_trials(&self) -> usize {
        self.estimates.sobolev_random_trials.unwrap_or(DEFAULT_SOBOLEV_TRIALS)
    }
}

use serde::{Deserialize, Serialize};

use endslab::estimates::{
    default_trials, end_count_pipeline, level_maxima, moser_radii, sobolev_measure, EndCountReport, SobolevReport,
};
use endslab::geometry::{check_area_volume_lemma, verify_rho_conditions, volume_area_profiles, LemmaAreaReport, RhoReport};
use endslab::model::{build_manifold, DiscreteManifold, ModelSpec};
use endslab::profile::ProfileSeries;
use endslab::solitons::{soliton_report, SolitonExample, SolitonKind, SolitonReport};

use crate::config::{ModelChoice, RunConfig, SolitonChoice, Stage};
use crate::error::CliError;

/// One named pass/fail contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSection {
    pub vertices: usize,
    pub layers: usize,
    pub ends: usize,
    pub pipeline: EndCountReport,
    pub rho: RhoReport,
    pub lemma: Option<LemmaAreaReport>,
    pub sobolev: Option<SobolevReport>,
}

/// Deterministic run report; wall-clock data lives in the metadata file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub kind: String,
    pub stages: Vec<Stage>,
    /// Echo of the effective config with the output directory removed.
    pub config: RunConfig,
    pub manifold: Option<ManifoldSection>,
    pub soliton: Option<SolitonReport>,
    pub checks: Vec<Check>,
    pub advisories: Vec<String>,
    pub passed: bool,
}

/// Report plus the CSV series to write under `series/`.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub series: Vec<(String, String)>,
}

pub fn execute(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let mut echo = config.clone();
    echo.output_dir = None;
    match &config.model {
        ModelChoice::Manifold(spec) => run_manifold(config, echo, spec),
        ModelChoice::Soliton(choice) => run_soliton(config, echo, choice),
    }
}

fn fmt_list(xs: impl IntoIterator<Item = f64>) -> String {
    xs.into_iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn series(name: String, radii: Vec<f64>, values: Vec<f64>) -> Result<(String, String), CliError> {
    let p = ProfileSeries::new(name.clone(), radii, values)?;
    Ok((format!("{name}.csv"), p.to_csv_string()))
}

fn run_manifold(config: &RunConfig, echo: RunConfig, spec: &ModelSpec) -> Result<RunOutput, CliError> {
    let man = build_manifold(spec)?;
    let stages = config.stages();
    let pc = config.pipeline_config();
    let pipeline = end_count_pipeline(&man, &pc)?;
    let k = pipeline.ends;

    let rho = verify_rho_conditions(&man);
    let lemma = stages.contains(&Stage::Lemma).then(|| check_area_volume_lemma(&man, pipeline.m));
    let sobolev = if stages.contains(&Stage::Sobolev) {
        let radius = *moser_radii(&man).last().expect("two radii");
        let trials = default_trials(&man, radius, config.sobolev_trials(), config.seed);
        Some(sobolev_measure(&man, radius, pc.nu / (pc.nu - 1.0), &trials)?)
    } else {
        None
    };

    let mut checks = Vec::new();
    let mut advisories = Vec::new();
    let worst_gap = pipeline.end_functions.iter().map(|e| e.convergence_gap).fold(0.0, f64::max);
    checks.push(Check::new(
        "ladder_converged",
        pipeline.converged,
        format!("largest gap {worst_gap:.3e}, tol_limit {:.1e}", pc.tol_limit),
    ));
    if !pipeline.converged {
        advisories.push(format!(
            "the exhaustion ladder did not settle (gap {worst_gap:.3e} > tol_limit {:.1e}); increase r_max or relax tol_limit",
            pc.tol_limit
        ));
    }
    checks.push(Check::new(
        "end_separation",
        pipeline.separation.passed,
        match pipeline.separation.mirror_error {
            Some(e) => format!("mirror error {e:.2e}"),
            None => "bounds, sup and monotone level maxima per end".into(),
        },
    ));
    checks.push(Check::new(
        "gram_rank",
        pipeline.rank_ok,
        format!("rank {} of {k}; singular values {}", pipeline.gram.rank, fmt_list(pipeline.gram.singular_values.iter().copied())),
    ));
    if let Some(g) = &pipeline.growth {
        checks.push(Check::new(
            "growth_bound",
            g.iter().all(|r| r.pass),
            format!(
                "fitted exponents [{}]; bound {}",
                fmt_list(g.iter().map(|r| r.fitted_exponent)),
                g.first().and_then(|r| r.bound_a).map_or("none".into(), |b| format!("{b:.4}"))
            ),
        ));
    }
    if let Some(cs) = &pipeline.chi {
        checks.push(Check::new(
            "chi_inequality",
            cs.iter().all(|c| c.chi_nondecreasing && c.c0.is_some()),
            format!("C0 [{}]", fmt_list(cs.iter().map(|c| c.c0.unwrap_or(f64::INFINITY)))),
        ));
    }
    if let Some(ls) = &pipeline.moser {
        checks.push(Check::new(
            "mean_value",
            ls.iter().all(|l| l.stable && l.reports.iter().all(|r| r.theta_exponent_ok)),
            format!(
                "A0 spread [{}]; theta exponents [{}]",
                fmt_list(ls.iter().map(|l| l.a0_spread)),
                fmt_list(ls.iter().flat_map(|l| l.reports.iter().map(|r| r.theta_exponent)))
            ),
        ));
    }
    if let Some(a) = &pipeline.alpha {
        checks.push(Check::new(
            "alpha_holder",
            a.holder_monotone,
            format!("alpha(q) {:.4}, alpha(2q) {:.4}", a.alpha_level.value, a.alpha_level_doubled_q.value),
        ));
    }
    if let (Some(d), Some(ok)) = (&pipeline.dimension, pipeline.count_ok) {
        checks.push(Check::new("end_count_bound", ok, format!("{k} ends, bound {:.3e}", d.dim_bound)));
    }
    // the condition is stated for the resolved m, which may exceed the area exponents
    let m_limit = rho.m_implied.max(pipeline.m) + rho.tolerance;
    let gradient_ok = rho.grad_hi <= 1.0 + 1e-12 && rho.grad_lo >= 0.5 - 1e-12;
    checks.push(Check::new(
        "rho_conditions",
        gradient_ok && rho.m_measured <= m_limit,
        format!("measured m {:.4}, allowed {:.4}", rho.m_measured, m_limit),
    ));
    if let Some(l) = &lemma {
        checks.push(Check::new(
            "area_volume_lemma",
            l.passed(),
            format!(
                "A r / V <= {:.4} (limit {}), doubling exponent {:.4}",
                l.tightest_area_constant, l.c_m, l.tightest_doubling_exponent
            ),
        ));
    }

    let files = manifold_series(&man, &pipeline)?;
    let passed = checks.iter().all(|c| c.passed);
    let report = RunReport {
        name: config.name.clone(),
        kind: "manifold".into(),
        stages,
        config: echo,
        manifold: Some(ManifoldSection {
            vertices: man.len(),
            layers: man.layer_count(),
            ends: k,
            pipeline,
            rho,
            lemma,
            sobolev,
        }),
        soliton: None,
        checks,
        advisories,
        passed,
    };
    Ok(RunOutput { report, series: files })
}

fn manifold_series(man: &DiscreteManifold, p: &EndCountReport) -> Result<Vec<(String, String)>, CliError> {
    let (vol, area) = volume_area_profiles(man);
    let mut out = vec![("volume.csv".to_string(), vol.to_csv_string()), ("area.csv".to_string(), area.to_csv_string())];
    for ef in &p.end_functions {
        let i = ef.end_index;
        let mut buf = Vec::new();
        ef.write_csv(man, &mut buf).map_err(|e| CliError::Compute(e.to_string()))?;
        out.push((format!("end_{i}.csv"), String::from_utf8(buf).expect("csv is utf-8")));
        out.push(series(format!("level_max_{i}"), man.radii().to_vec(), level_maxima(man, &ef.values))?);
        let (r, s): (Vec<f64>, Vec<f64>) = ef.normalization_history().into_iter().unzip();
        out.push(series(format!("ladder_scale_{i}"), r, s)?);
    }
    if let Some(cs) = &p.chi {
        for (i, c) in cs.iter().enumerate() {
            out.push((format!("chi_{i}.csv"), c.chi.to_csv_string()));
        }
    }
    Ok(out)
}

fn run_soliton(config: &RunConfig, echo: RunConfig, choice: &SolitonChoice) -> Result<RunOutput, CliError> {
    let ex = choice.example()?;
    let tail = config.estimates.tail_fraction.unwrap_or(endslab::limsup::DEFAULT_TAIL_FRACTION);
    let quad_tol = config.tolerances.quad_tol;
    let rep = soliton_report(&ex, quad_tol, tail).map_err(|e| CliError::Compute(e.to_string()))?;

    let mut checks = Vec::new();
    let mut advisories = Vec::new();
    let genuine_kind = !matches!(ex.kind, SolitonKind::ConicalToy { .. });
    if genuine_kind && ex.f_shift == 0.0 {
        checks.push(Check::new(
            "soliton_identity",
            rep.identity_residual <= 1e-12,
            format!("max residual {:.3e}", rep.identity_residual),
        ));
    } else {
        advisories.push(format!(
            "identity residual {:.3e} is expected to be nonzero for this example",
            rep.identity_residual
        ));
    }
    checks.push(Check::new(
        "entropy_refinement",
        rep.refinement_change < 10.0 * quad_tol,
        format!("mu {:.12}, change on halving tol {:.2e}", rep.entropy.mu, rep.refinement_change),
    ));
    checks.push(Check::new(
        "f_bounds",
        rep.f_bounds.holds,
        format!("c1 {:.4}, c2 {:.4}, volume constant {:.4}", rep.f_bounds.c1, rep.f_bounds.c2, rep.f_bounds.volume_constant),
    ));

    let files = soliton_series(&ex)?;
    let passed = checks.iter().all(|c| c.passed);
    let report = RunReport {
        name: config.name.clone(),
        kind: "soliton".into(),
        stages: config.stages(),
        config: echo,
        manifold: None,
        soliton: Some(rep),
        checks,
        advisories,
        passed,
    };
    Ok(RunOutput { report, series: files })
}

fn soliton_series(ex: &SolitonExample) -> Result<Vec<(String, String)>, CliError> {
    let grid = ex.radius_grid(201);
    let eval = |f: &dyn Fn(f64) -> f64| grid.iter().map(|&r| f(r)).collect::<Vec<_>>();
    Ok(vec![
        series("f".into(), grid.clone(), eval(&|r| ex.f(r)))?,
        series("scalar_curvature".into(), grid.clone(), eval(&|r| ex.scalar_curvature(r)))?,
        series("grad_f_sq".into(), grid.clone(), eval(&|r| ex.grad_f_sq(r)))?,
        series("area".into(), grid.clone(), eval(&|r| ex.area(r)))?,
    ])
}

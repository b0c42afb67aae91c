use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::run::{RunOutput, RunReport};

/// Wall-clock data kept out of the deterministic report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub started_unix: f64,
    pub elapsed_seconds: f64,
    pub jobs: usize,
    pub config_source: String,
}

impl Metadata {
    pub fn new(started: SystemTime, elapsed: Duration, jobs: usize, config_source: &str) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_unix: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            elapsed_seconds: elapsed.as_secs_f64(),
            jobs,
            config_source: config_source.into(),
        }
    }
}

fn write(path: PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(&path, text).map_err(|source| CliError::Write { path, source })
}

pub fn report_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `report.json`, `report.md`, `metadata.json` and `series/*.csv`.
pub fn write_outputs(dir: &Path, out: &RunOutput, meta: &Metadata) -> Result<(), CliError> {
    let series_dir = dir.join("series");
    fs::create_dir_all(&series_dir).map_err(|source| CliError::Write { path: series_dir.clone(), source })?;
    write(dir.join("report.json"), &report_json(&out.report))?;
    write(dir.join("report.md"), &render_markdown(&out.report))?;
    let mut m = serde_json::to_string_pretty(meta).expect("metadata serializes");
    m.push('\n');
    write(dir.join("metadata.json"), &m)?;
    for (name, text) in &out.series {
        write(series_dir.join(name), text)?;
    }
    Ok(())
}

pub fn read_report(dir: &Path) -> Result<RunReport, CliError> {
    let path = dir.join("report.json");
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        origin: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn render_markdown(r: &RunReport) -> String {
    let mut s = String::new();
    let verdict = if r.passed { "PASS" } else { "FAIL" };
    let _ = writeln!(s, "# {} ({})\n", r.name, r.kind);
    if !r.config.description.is_empty() {
        let _ = writeln!(s, "{}\n", r.config.description);
    }
    let stages: Vec<String> = r.stages.iter().map(|st| st.to_string()).collect();
    let _ = writeln!(s, "Overall: **{verdict}**. Stages: {}.\n", stages.join(", "));
    if let Some(m) = &r.manifold {
        let _ = writeln!(
            s,
            "Model: {} vertices, {} layers, {} ends. r0 = {}, m = {}, upsilon = {:.4}.\n",
            m.vertices, m.layers, m.ends, m.pipeline.r0, m.pipeline.m, m.pipeline.upsilon
        );
    }
    if let Some(sol) = &r.soliton {
        let _ = writeln!(
            s,
            "Soliton `{}` in dimension {}: entropy {:.10}, identity residual {:.3e}, balls are {}.\n",
            sol.example.name, sol.example.n, sol.entropy.mu, sol.identity_residual, sol.alpha.ball_proxy
        );
    }
    let _ = writeln!(s, "| check | result | detail |\n|---|---|---|");
    for c in &r.checks {
        let _ = writeln!(s, "| {} | {} | {} |", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
    }
    if !r.advisories.is_empty() {
        let _ = writeln!(s, "\n## Advisories\n");
        for a in &r.advisories {
            let _ = writeln!(s, "- {a}");
        }
    }
    s
}

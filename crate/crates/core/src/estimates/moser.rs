use serde::{Deserialize, Serialize};

use crate::error::EstimateError;
use crate::model::DiscreteManifold;

pub const DEFAULT_THETAS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
pub const DEFAULT_SUBSOLUTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoserOptions {
    pub nu: f64,
    pub thetas: Vec<f64>,
    /// Relative tolerance on `sigma u - L u <= 0`.
    pub subsolution_tol: f64,
    pub fit_tol: f64,
}

impl MoserOptions {
    pub fn new(nu: f64) -> Self {
        Self { nu, thetas: DEFAULT_THETAS.to_vec(), subsolution_tol: DEFAULT_SUBSOLUTION_TOL, fit_tol: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValueReport {
    pub radius: f64,
    /// End index for the localized variant.
    pub end: Option<usize>,
    pub nu: f64,
    pub thetas: Vec<f64>,
    pub sup: f64,
    /// `sup * V / int u` for each theta.
    pub ratios: Vec<f64>,
    /// Smallest `A0` with `sup <= A0 theta^{-2 nu} V^{-1} int u` for every theta.
    pub a0: f64,
    /// `-d ln(ratio) / d ln(theta)`, least squares.
    pub theta_exponent: f64,
    pub theta_exponent_ok: bool,
}

/// Checks `L u >= sigma u` at every vertex with `R0 <= rho < outer`.
///
/// The defect `sigma u - L u` is compared against `tol` times the largest
/// operator scale `|u| (deg_w / mu + sigma) + sum w |u(y)| / mu` over the
/// region, since iterative solves control the residual globally.
pub fn check_subsolution(man: &DiscreteManifold, u: &[f64], outer: f64, tol: f64) -> Result<(), EstimateError> {
    let g = man.graph();
    let r0 = man.inner_radius();
    let region: Vec<usize> = (0..man.len())
        .filter(|&x| man.rho()[x] >= r0 - 1e-9 * man.h() && man.in_sublevel(x, outer))
        .collect();
    let scale = region
        .iter()
        .map(|&x| {
            u[x].abs() * (g.weighted_degree(x) / g.measure()[x] + g.sigma()[x])
                + g.neighbors(x).map(|(y, w)| w * u[y].abs()).sum::<f64>() / g.measure()[x]
        })
        .fold(f64::MIN_POSITIVE, f64::max);
    for &x in &region {
        let defect = g.sigma()[x] * u[x] - g.laplacian_at(u, x);
        if defect > tol * scale {
            return Err(EstimateError::NotSubsolution { vertex: x, defect });
        }
    }
    Ok(())
}

fn theta_slope(thetas: &[f64], ratios: &[f64]) -> f64 {
    if thetas.len() < 2 {
        return 0.0;
    }
    let n = thetas.len() as f64;
    let xs: Vec<f64> = thetas.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|k| k.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

fn validate(man: &DiscreteManifold, u: &[f64], radius: f64, opts: &MoserOptions) -> Result<(), EstimateError> {
    if u.len() != man.len() {
        return Err(EstimateError::InvalidParameter("function length does not match the manifold".into()));
    }
    if opts.thetas.is_empty() || opts.thetas.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(EstimateError::InvalidParameter("thetas must lie in (0, 1]".into()));
    }
    if !(opts.nu > 1.0) {
        return Err(EstimateError::InvalidParameter(format!("nu = {} must exceed 1", opts.nu)));
    }
    let big_r0 = man.inner_radius();
    if radius < 4.0 * big_r0 - 1e-12 || man.layer_index(radius).is_none() {
        return Err(EstimateError::InvalidParameter(format!(
            "R = {radius} must be a layer radius with R >= 4 R0 = {}",
            4.0 * big_r0
        )));
    }
    if 2.0 * radius > man.r_max() + 1e-9 * man.h() {
        return Err(EstimateError::InvalidParameter(format!("2R = {} exceeds r_max", 2.0 * radius)));
    }
    for x in 0..man.len() {
        if man.rho()[x] >= big_r0 && man.in_sublevel(x, 2.0 * radius) && !(u[x] > 0.0) {
            return Err(EstimateError::NonPositiveValues { radius: man.rho()[x], value: u[x] });
        }
    }
    check_subsolution(man, u, 2.0 * radius, opts.subsolution_tol)
}

fn assemble(
    radius: f64,
    end: Option<usize>,
    sup: f64,
    opts: &MoserOptions,
    ratio: impl Fn(f64) -> f64,
) -> MeanValueReport {
    let ratios: Vec<f64> = opts.thetas.iter().map(|&t| ratio(t)).collect();
    let a0 = opts
        .thetas
        .iter()
        .zip(&ratios)
        .map(|(t, k)| t.powf(2.0 * opts.nu) * k)
        .fold(0.0, f64::max);
    let theta_exponent = theta_slope(&opts.thetas, &ratios);
    MeanValueReport {
        radius,
        end,
        nu: opts.nu,
        thetas: opts.thetas.clone(),
        sup,
        ratios,
        a0,
        theta_exponent,
        theta_exponent_ok: theta_exponent <= 2.0 * opts.nu + opts.fit_tol,
    }
}

/// Measures the mean-value constant at level `R`:
/// `sup_{Sigma(R)} u <= A0 theta^{-2 nu} V((1+theta)R)^{-1} int_{D((1+theta)R) \ D(R0)} u`.
pub fn moser_verify(
    man: &DiscreteManifold,
    u: &[f64],
    radius: f64,
    opts: &MoserOptions,
) -> Result<MeanValueReport, EstimateError> {
    validate(man, u, radius, opts)?;
    let j = man.layer_index(radius).expect("validated");
    let sup = man.level_set(j).iter().map(|&x| u[x]).fold(f64::NEG_INFINITY, f64::max);
    let mu = man.measure();
    let big_r0 = man.inner_radius();
    let tol = 1e-9 * man.h();
    Ok(assemble(radius, None, sup, opts, |t| {
        let outer = (1.0 + t) * radius;
        let integral: f64 = (0..man.len())
            .filter(|&x| man.rho()[x] >= big_r0 - tol && man.in_sublevel(x, outer))
            .map(|x| mu[x] * u[x])
            .sum();
        sup * man.volume_below(outer) / integral
    }))
}

/// Localized variant on end `E`: sup over `dE(R)`, integral over
/// `E((1+theta)R) \ E(R/4)`, normalized by the full `V(2R)`.
pub fn moser_verify_localized(
    man: &DiscreteManifold,
    u: &[f64],
    end: usize,
    radius: f64,
    opts: &MoserOptions,
) -> Result<MeanValueReport, EstimateError> {
    if end >= man.end_count() {
        return Err(EstimateError::InvalidParameter(format!("end index {end} out of range")));
    }
    validate(man, u, radius, opts)?;
    let j = man.layer_index(radius).expect("validated");
    let sup = man.layer(end, j).iter().map(|&x| u[x]).fold(f64::NEG_INFINITY, f64::max);
    let mu = man.measure();
    let v2 = man.volume_below(2.0 * radius);
    let tol = 1e-9 * man.h();
    let verts = man.end_vertices(end);
    Ok(assemble(radius, Some(end), sup, opts, |t| {
        let outer = (1.0 + t) * radius;
        let integral: f64 = verts
            .iter()
            .filter(|&&x| man.rho()[x] >= radius / 4.0 - tol && man.in_sublevel(x, outer))
            .map(|&x| mu[x] * u[x])
            .sum();
        sup * v2 / integral
    }))
}

/// Mean-value constants at several radii with their relative spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoserLadder {
    pub reports: Vec<MeanValueReport>,
    /// `|A0(last) / A0(previous) - 1|`.
    pub a0_spread: f64,
    pub stable: bool,
}

pub const MOSER_STABILITY: f64 = 0.2;

/// Default radii `r_max/4, r_max/2` snapped to layers.
pub fn moser_radii(man: &DiscreteManifold) -> Vec<f64> {
    [0.25, 0.5].iter().map(|f| man.radii()[man.nearest_layer(f * man.r_max())]).collect()
}

pub fn moser_ladder(
    man: &DiscreteManifold,
    u: &[f64],
    radii: &[f64],
    end: Option<usize>,
    opts: &MoserOptions,
) -> Result<MoserLadder, EstimateError> {
    let reports = radii
        .iter()
        .map(|&r| match end {
            Some(e) => moser_verify_localized(man, u, e, r, opts),
            None => moser_verify(man, u, r, opts),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let a0_spread = match reports.as_slice() {
        [.., a, b] => (b.a0 / a.a0 - 1.0).abs(),
        _ => 0.0,
    };
    Ok(MoserLadder { reports, a0_spread, stable: a0_spread <= MOSER_STABILITY })
}

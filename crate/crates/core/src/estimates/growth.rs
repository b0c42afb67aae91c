use serde::{Deserialize, Serialize};

use super::exponents::{epsilon_of, gamma_epsilon, quadratic_decay_bound};
use crate::error::EstimateError;
use crate::limsup::tail_start;
use crate::model::DiscreteManifold;

pub const DEFAULT_FIT_TOL: f64 = 0.25;
const MIN_FIT_POINTS: usize = 5;

/// Least-squares line through `(ln r, ln v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    /// `exp(intercept)`, the prefactor in `v ~ lambda r^b`.
    pub lambda: f64,
    pub points: usize,
}

/// Fits `values ~ lambda * radii^b`.
///
/// ```
/// use endslab::estimates::fit_power;
/// let r = [2.0, 3.0, 5.0, 8.0, 13.0];
/// let v: Vec<f64> = r.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
/// let fit = fit_power(&r, &v).unwrap();
/// assert!((fit.exponent - 1.5).abs() < 1e-12);
/// ```
pub fn fit_power(radii: &[f64], values: &[f64]) -> Result<PowerFit, EstimateError> {
    if radii.len() < MIN_FIT_POINTS {
        return Err(EstimateError::InsufficientLayers { needed: MIN_FIT_POINTS, found: radii.len() });
    }
    for (&r, &v) in radii.iter().zip(values) {
        if !(v > 0.0) {
            return Err(EstimateError::NonPositiveValues { radius: r, value: v });
        }
    }
    let n = radii.len() as f64;
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    Ok(PowerFit { exponent, lambda: (my - exponent * mx).exp(), points: radii.len() })
}

/// Inputs to the growth bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub m: f64,
    /// `sigma <= upsilon / rho^2` beyond `R0`; enables the `a + 4m + 1` bound.
    pub upsilon: Option<f64>,
    /// Measured constant from the chi inequality; enables `Gamma_eps`.
    pub c0: Option<f64>,
    pub q: f64,
    pub nu: f64,
    pub fit_tol: f64,
    /// Boundary integral `Lambda0`, recorded when known.
    pub lambda0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// Fitted exponent `b`, an empirical stand-in for the exponent produced
    /// by the contradiction argument.
    pub fitted_exponent: f64,
    /// Fitted prefactor `Lambda`.
    pub lambda: f64,
    pub lambda0: Option<f64>,
    pub window: (f64, f64),
    pub points: usize,
    pub m: f64,
    pub upsilon: Option<f64>,
    /// `a` from the quadratic-decay formula.
    pub exponent_a: Option<f64>,
    pub bound_a: Option<f64>,
    pub bound_gamma: Option<f64>,
    pub c0: Option<f64>,
    pub epsilon: f64,
    pub nu: f64,
    pub q: f64,
    pub fit_tol: f64,
    /// `min(bounds) + fit_tol - b`; `None` when no bound applies.
    pub margin: Option<f64>,
    pub pass: bool,
}

/// `r -> max_{Sigma(r)} u` at every layer radius.
pub fn level_maxima(man: &DiscreteManifold, u: &[f64]) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; man.layer_count()];
    for x in 0..man.len() {
        let j = man.level(x);
        out[j] = out[j].max(u[x]);
    }
    out
}

/// Log-log slope of `max_{Sigma(r)} u` over the top `tail_fraction` of layers
/// (at least five), compared with the available growth bounds.
pub fn growth_fit(
    man: &DiscreteManifold,
    u: &[f64],
    tail_fraction: f64,
    params: &GrowthParams,
) -> Result<GrowthReport, EstimateError> {
    if u.len() != man.len() {
        return Err(EstimateError::InvalidParameter(format!(
            "function has {} values, manifold has {} vertices",
            u.len(),
            man.len()
        )));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(EstimateError::InvalidParameter(format!("tail_fraction = {tail_fraction}")));
    }
    let maxima = level_maxima(man, u);
    let radii = man.radii();
    // short models still get the minimum number of fit points
    let start = tail_start(radii.len(), tail_fraction).min(radii.len().saturating_sub(MIN_FIT_POINTS));
    let fit = fit_power(&radii[start..], &maxima[start..])?;

    let a = params.upsilon.map(|ups| super::exponent_a(params.m, ups));
    let bound_a = params.upsilon.map(|ups| quadratic_decay_bound(params.m, ups));
    let eps = epsilon_of(params.q, params.nu);
    let bound_gamma = params.c0.and_then(|c0| gamma_epsilon(c0, eps.epsilon, params.m));
    let bound = [bound_a, bound_gamma].into_iter().flatten().reduce(f64::min);
    let margin = bound.map(|b| b + params.fit_tol - fit.exponent);
    Ok(GrowthReport {
        fitted_exponent: fit.exponent,
        lambda: fit.lambda,
        lambda0: params.lambda0,
        window: (radii[start], radii[radii.len() - 1]),
        points: fit.points,
        m: params.m,
        upsilon: params.upsilon,
        exponent_a: a,
        bound_a,
        bound_gamma,
        c0: params.c0,
        epsilon: eps.epsilon,
        nu: params.nu,
        q: params.q,
        fit_tol: params.fit_tol,
        margin,
        pass: margin.is_none_or(|m| m >= 0.0),
    })
}

/// Smallest `upsilon` with `sigma <= upsilon / rho^2` on `rho >= R0`.
pub fn effective_upsilon(man: &DiscreteManifold) -> f64 {
    let r0 = man.inner_radius();
    man.rho()
        .iter()
        .zip(man.sigma())
        .filter(|(r, _)| **r >= r0)
        .map(|(r, s)| s * r * r)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_manifold, EndSpec, ModelSpec, SigmaLaw};

    fn params(upsilon: Option<f64>) -> GrowthParams {
        GrowthParams { m: 2.0, upsilon, c0: None, q: 1.2, nu: 1.5, fit_tol: DEFAULT_FIT_TOL, lambda0: None }
    }

    fn cone() -> DiscreteManifold {
        build_manifold(&ModelSpec::symmetric(
            3,
            2,
            EndSpec::new(1.0, 2.0, 1),
            1.0,
            40.0,
            SigmaLaw::QuadraticDecay { upsilon: 2.0 },
        ))
        .unwrap()
    }

    #[test]
    fn synthetic_power_recovered() {
        let man = cone();
        for beta in [0.0, 0.5, 1.0, 2.7] {
            let u: Vec<f64> = man.rho().iter().map(|r| r.powf(beta)).collect();
            let g = growth_fit(&man, &u, 0.3, &params(Some(2.0))).unwrap();
            assert!((g.fitted_exponent - beta).abs() < 1e-9, "beta={beta}");
        }
    }

    #[test]
    fn bound_is_ten_on_quadratic_cone() {
        let man = cone();
        let u: Vec<f64> = man.rho().to_vec();
        let g = growth_fit(&man, &u, 0.3, &params(Some(effective_upsilon(&man)))).unwrap();
        assert!((g.bound_a.unwrap() - 10.0).abs() < 1e-12);
        assert!(g.pass);
        assert!((g.margin.unwrap() - 9.25).abs() < 1e-9);
    }

    #[test]
    fn too_steep_fails() {
        let man = cone();
        let u: Vec<f64> = man.rho().iter().map(|r| r.powi(11)).collect();
        assert!(!growth_fit(&man, &u, 0.3, &params(Some(2.0))).unwrap().pass);
    }

    #[test]
    fn errors() {
        let man = cone();
        let mut u: Vec<f64> = man.rho().to_vec();
        let last = man.layer(0, man.layer_count() - 1)[0];
        let other = man.layer(1, man.layer_count() - 1)[0];
        u[last] = 0.0;
        u[other] = -1.0;
        assert!(matches!(
            growth_fit(&man, &u, 0.3, &params(None)),
            Err(EstimateError::NonPositiveValues { .. })
        ));
        assert!(matches!(
            fit_power(&[1.0, 2.0, 3.0, 4.0], &[1.0; 4]),
            Err(EstimateError::InsufficientLayers { .. })
        ));
        let short = growth_fit(&man, &man.rho().to_vec(), 0.01, &params(None)).unwrap();
        assert_eq!(short.points, 5);
    }
}

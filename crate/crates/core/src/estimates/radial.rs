//! Radial integrals of a positive solution and the differential
//! inequalities they satisfy.

use serde::{Deserialize, Serialize};

use super::exponents::{alpha_bar, exponent_a};
use crate::error::EstimateError;
use crate::limsup::{tail_estimate, TailEstimate, DEFAULT_TAIL_FRACTION};
use crate::model::DiscreteManifold;
use crate::profile::ProfileSeries;

const MIN_RADII: usize = 5;

fn check_inputs(man: &DiscreteManifold, u: &[f64], r0: f64) -> Result<(), EstimateError> {
    if u.len() != man.len() {
        return Err(EstimateError::InvalidParameter(format!(
            "function has {} values, manifold has {} vertices",
            u.len(),
            man.len()
        )));
    }
    let big_r0 = man.inner_radius();
    if r0 < 4.0 * big_r0 - 1e-12 {
        return Err(EstimateError::InvalidParameter(format!("r0 = {r0} must be at least 4 R0 = {}", 4.0 * big_r0)));
    }
    for x in 0..man.len() {
        if man.rho()[x] >= big_r0 && man.in_sublevel(x, man.r_max()) && !(u[x] > 0.0) {
            return Err(EstimateError::NonPositiveValues { radius: man.rho()[x], value: u[x] });
        }
    }
    Ok(())
}

/// Per-layer sums of `mu * g(x)`.
fn layer_sums(man: &DiscreteManifold, g: impl Fn(usize) -> f64) -> Vec<f64> {
    let mu = man.measure();
    let mut out = vec![0.0; man.layer_count()];
    for x in 0..man.len() {
        out[man.level(x)] += mu[x] * g(x);
    }
    out
}

/// `F(r_j) = sum over lo <= r_k < r_j of sums[k]`, sampled at `r_j >= lo`.
fn cumulative_from(radii: &[f64], sums: &[f64], lo: f64) -> (Vec<f64>, Vec<f64>) {
    let tol = 1e-9 * (radii[1] - radii[0]);
    let mut acc = 0.0;
    let (mut rs, mut vs) = (Vec::new(), Vec::new());
    for (j, &r) in radii.iter().enumerate() {
        if r >= lo - tol {
            rs.push(r);
            vs.push(acc);
            acc += sums[j];
        }
    }
    (rs, vs)
}

fn derivative_series(name: &str, s: &ProfileSeries, second: bool) -> ProfileSeries {
    let (rs, vs): (Vec<f64>, Vec<f64>) = (1..s.len().saturating_sub(1))
        .map(|j| {
            let d = if second { s.second_derivative(j) } else { s.derivative(j) };
            (s.radii()[j], d.expect("interior index"))
        })
        .unzip();
    ProfileSeries::new(name, rs, vs).expect("subsequence of increasing radii")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub r0: f64,
    pub m: f64,
    pub upsilon: f64,
    pub a: f64,
    /// `omega(r) = int_{D(r) \ D(r0)} u / rho^2`.
    pub omega: ProfileSeries,
    /// `r^2 omega'' - (4m - 2) r omega' - 4 upsilon omega` at interior radii.
    pub residual: ProfileSeries,
    pub max_residual: f64,
    /// Smallest constant bounding the residual, `max(max_residual, 0)`.
    pub c_r0: f64,
    /// `xi(r) = r^a omega(r)`.
    pub xi: ProfileSeries,
    /// `r^{a+4m} d/dr (xi' / r^{2a+4m-2})`.
    pub xi_scaled: ProfileSeries,
    pub xi_tail: TailEstimate,
    pub omega_nondecreasing: bool,
}

pub fn omega_diagnostics(
    man: &DiscreteManifold,
    u: &[f64],
    r0: f64,
    m: f64,
    upsilon: f64,
) -> Result<OmegaReport, EstimateError> {
    check_inputs(man, u, r0)?;
    let rho = man.rho();
    let sums = layer_sums(man, |x| u[x] / (rho[x] * rho[x]));
    let (rs, vs) = cumulative_from(man.radii(), &sums, r0);
    if rs.len() < MIN_RADII {
        return Err(EstimateError::InsufficientLayers { needed: MIN_RADII, found: rs.len() });
    }
    let omega = ProfileSeries::new("omega", rs, vs)?;
    let (rr, res): (Vec<f64>, Vec<f64>) = (1..omega.len() - 1)
        .map(|j| {
            let r = omega.radii()[j];
            let d1 = omega.derivative(j).expect("interior");
            let d2 = omega.second_derivative(j).expect("interior");
            (r, r * r * d2 - (4.0 * m - 2.0) * r * d1 - 4.0 * upsilon * omega.values()[j])
        })
        .unzip();
    let residual = ProfileSeries::new("omega_residual", rr, res)?;
    let max_residual = residual.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let a = exponent_a(m, upsilon);
    let xi_vals = omega.radii().iter().zip(omega.values()).map(|(r, w)| r.powf(a) * w).collect();
    let xi = ProfileSeries::new("xi", omega.radii().to_vec(), xi_vals)?;
    let xi_d = derivative_series("xi_prime", &xi, false);
    let k = 2.0 * a + 4.0 * m - 2.0;
    let eta_vals = xi_d.radii().iter().zip(xi_d.values()).map(|(r, d)| d / r.powf(k)).collect();
    let eta = ProfileSeries::new("eta", xi_d.radii().to_vec(), eta_vals)?;
    let eta_d = derivative_series("eta_prime", &eta, false);
    let scaled: Vec<f64> = eta_d.radii().iter().zip(eta_d.values()).map(|(r, d)| d * r.powf(a + 4.0 * m)).collect();
    let xi_scaled = ProfileSeries::new("xi_scaled", eta_d.radii().to_vec(), scaled)?;
    let xi_tail = if xi_scaled.is_empty() {
        TailEstimate { value: 0.0, divergent: false, window_lo: r0, window_hi: r0 }
    } else {
        tail_estimate(xi_scaled.radii(), xi_scaled.values(), DEFAULT_TAIL_FRACTION)
    };

    Ok(OmegaReport {
        r0,
        m,
        upsilon,
        a,
        omega_nondecreasing: omega.is_nondecreasing(0.0),
        omega,
        residual,
        max_residual,
        c_r0: max_residual.max(0.0),
        xi,
        xi_scaled,
        xi_tail,
    })
}

/// Parameters of the chi inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiParams {
    pub r0: f64,
    pub m: f64,
    pub q: f64,
    pub nu: f64,
    pub theta: f64,
    /// Level-set alpha at exponent `q`; enters through `min(alpha, 1)`.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiReport {
    pub params: ChiParams,
    /// `chi(r) = int_{D(r) \ D(R0)} u / rho^{4m}`.
    pub chi: ProfileSeries,
    /// Co-area form `r^{-4m} int_{Sigma(r)} u`.
    pub chi_prime: ProfileSeries,
    /// `r^{4m} chi''` at interior radii.
    pub lhs: ProfileSeries,
    /// `int_{r0}^r chi^{1/q}((1+theta)t) chi'(t)^{1-1/q} t^{4m-2-1/q} dt`.
    pub integral: ProfileSeries,
    pub lambda0: f64,
    pub alpha_bar: f64,
    /// Smallest `C0 >= 0` making the inequality hold at every sampled radius;
    /// `None` when `alpha_bar = 0` and the inequality fails with `C0 = 0`.
    pub c0: Option<f64>,
    /// Largest `lhs - Lambda0`; nonpositive means the inequality holds with `C0 = 0`.
    pub max_excess: f64,
    pub chi_nondecreasing: bool,
}

/// Discrete `|grad u|(x)`: largest edge difference divided by `h`.
pub fn discrete_gradient(man: &DiscreteManifold, u: &[f64], x: usize) -> f64 {
    man.graph().neighbors(x).map(|(y, _)| (u[y] - u[x]).abs()).fold(0.0, f64::max) / man.h()
}

pub fn chi_diagnostics(man: &DiscreteManifold, u: &[f64], params: ChiParams) -> Result<ChiReport, EstimateError> {
    let ChiParams { r0, m, q, nu, theta, alpha } = params;
    check_inputs(man, u, r0)?;
    if !(theta > 0.0 && theta <= 1.0) || !(q >= 1.0) || !(nu > 1.0) || !(alpha >= 0.0) {
        return Err(EstimateError::InvalidParameter(format!(
            "chi diagnostics need 0 < theta <= 1, q >= 1, nu > 1, alpha >= 0 (got {params:?})"
        )));
    }
    let rho = man.rho();
    let h = man.h();
    let w = 4.0 * m;
    let big_r0 = man.inner_radius();
    let chi_sums = layer_sums(man, |x| u[x] / rho[x].powf(w));
    let (crs, cvs) = cumulative_from(man.radii(), &chi_sums, big_r0);
    let chi = ProfileSeries::new("chi", crs, cvs)?;

    let area_sums = layer_sums(man, |x| u[x] / h);
    let (prs, pvs): (Vec<f64>, Vec<f64>) = man
        .radii()
        .iter()
        .zip(&area_sums)
        .filter(|(r, _)| **r >= r0 - 1e-9 * h)
        .map(|(&r, &s)| (r, s / r.powf(w)))
        .unzip();
    // the truncation layer carries boundary data, not the equation
    let keep = prs.len() - 1;
    let chi_prime = ProfileSeries::new("chi_prime", prs[..keep].to_vec(), pvs[..keep].to_vec())?;
    if chi_prime.len() < MIN_RADII {
        return Err(EstimateError::InsufficientLayers { needed: MIN_RADII, found: chi_prime.len() });
    }

    let j0 = man.nearest_layer(r0);
    let lambda0: f64 = man
        .level_set(j0)
        .iter()
        .map(|&x| man.measure()[x] / h * (u[x] + discrete_gradient(man, u, x)))
        .sum();

    let d2 = derivative_series("chi_second", &chi_prime, false);
    let lhs_vals = d2.radii().iter().zip(d2.values()).map(|(r, d)| r.powf(w) * d).collect();
    let lhs = ProfileSeries::new("r4m_chi_second", d2.radii().to_vec(), lhs_vals)?;

    // trapezoidal integral over the chi' grid, kept while (1+theta) t stays inside the model
    let top = chi.radii()[chi.len() - 1];
    let integrand: Vec<(f64, f64)> = chi_prime
        .radii()
        .iter()
        .zip(chi_prime.values())
        .take_while(|(t, _)| (1.0 + theta) * **t <= top + 1e-9 * h)
        .map(|(&t, &dp)| {
            let c = chi.interpolate((1.0 + theta) * t);
            (t, c.powf(1.0 / q) * dp.powf(1.0 - 1.0 / q) * t.powf(w - 2.0 - 1.0 / q))
        })
        .collect();
    let mut acc = 0.0;
    let mut ir = Vec::with_capacity(integrand.len());
    let mut iv = Vec::with_capacity(integrand.len());
    for (k, &(t, f)) in integrand.iter().enumerate() {
        if k > 0 {
            let (tp, fp) = integrand[k - 1];
            acc += 0.5 * (t - tp) * (f + fp);
        }
        ir.push(t);
        iv.push(acc);
    }
    let integral = ProfileSeries::new("chi_integral", ir, iv)?;

    let abar = alpha_bar(alpha);
    let factor = abar * theta.powf(-2.0 * nu / q);
    let mut c0 = 0.0f64;
    let mut max_excess = f64::NEG_INFINITY;
    let mut feasible = true;
    for (&r, &l) in lhs.radii().iter().zip(lhs.values()) {
        if r > integral.radii()[integral.len() - 1] + 1e-9 * h {
            break;
        }
        let excess = l - lambda0;
        max_excess = max_excess.max(excess);
        if excess <= 0.0 {
            continue;
        }
        let rhs = factor * integral.interpolate(r);
        if rhs > 0.0 {
            c0 = c0.max(excess / rhs);
        } else {
            feasible = false;
        }
    }

    Ok(ChiReport {
        params,
        chi_nondecreasing: chi.is_nondecreasing(0.0),
        chi,
        chi_prime,
        lhs,
        integral,
        lambda0,
        alpha_bar: abar,
        c0: feasible.then_some(c0),
        max_excess,
    })
}

use serde::{Deserialize, Serialize};

use crate::error::{EstimateError, ModelError};
use crate::limsup::{tail_estimate, TailEstimate};
use crate::model::DiscreteManifold;

fn check_q(q: f64, tail_fraction: f64) -> Result<(), EstimateError> {
    if !(q >= 1.0) {
        return Err(EstimateError::InvalidParameter(format!("q = {q} must be at least 1")));
    }
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(EstimateError::InvalidParameter(format!(
            "tail_fraction = {tail_fraction} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// Level-set samples `(R^{2q} * num(R) / den(R))^{1/q}` for `R = r_1 ... r_max`.
fn level_samples(
    man: &DiscreteManifold,
    q: f64,
    numerator: impl Fn(usize) -> bool,
) -> Result<(Vec<f64>, Vec<f64>), EstimateError> {
    let mu = man.measure();
    let sigma = man.sigma();
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (j, &r) in man.radii().iter().enumerate().skip(1) {
        let level = man.level_set(j);
        if level.is_empty() {
            return Err(ModelError::EmptyLayer(r).into());
        }
        let den: f64 = level.iter().map(|&x| mu[x]).sum();
        let num: f64 = level.iter().filter(|&&x| numerator(x)).map(|&x| mu[x] * sigma[x].powf(q)).sum();
        radii.push(r);
        values.push((r.powf(2.0 * q) * num / den).powf(1.0 / q));
    }
    Ok((radii, values))
}

/// `alpha = limsup (R^{2q} avg_{Sigma(R)} sigma^q)^{1/q}`.
pub fn compute_alpha_level(man: &DiscreteManifold, q: f64, tail_fraction: f64) -> Result<TailEstimate, EstimateError> {
    check_q(q, tail_fraction)?;
    let (r, v) = level_samples(man, q, |_| true)?;
    Ok(tail_estimate(&r, &v, tail_fraction))
}

/// End-restricted variant: the integral runs over `dE(R)` but the
/// normalization is the full level-set area `A(R)`.
pub fn compute_alpha_end(
    man: &DiscreteManifold,
    end: usize,
    q: f64,
    tail_fraction: f64,
) -> Result<TailEstimate, EstimateError> {
    check_q(q, tail_fraction)?;
    if end >= man.end_count() {
        return Err(EstimateError::InvalidParameter(format!("end index {end} out of range")));
    }
    let (r, v) = level_samples(man, q, |x| man.in_end(x, end))?;
    Ok(tail_estimate(&r, &v, tail_fraction))
}

/// Radial profile `A(r)`, `sigma(r)` on a grid, integrated by trapezoids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub area: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl RadialProfile {
    pub fn from_fn(radii: Vec<f64>, area: impl Fn(f64) -> f64, sigma: impl Fn(f64) -> f64) -> Self {
        let a = radii.iter().map(|&r| area(r)).collect();
        let s = radii.iter().map(|&r| sigma(r)).collect();
        Self { radii, area: a, sigma: s }
    }

    fn cumulative(&self, integrand: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for j in 1..self.radii.len() {
            acc += 0.5 * (self.radii[j] - self.radii[j - 1]) * (integrand(j) + integrand(j - 1));
            out.push(acc);
        }
        out
    }
}

/// Ball-averaged alpha and the asymptotic volume ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallFunctionals {
    pub q: f64,
    pub n: f64,
    /// `limsup V(R)^{-1} int_{D(R)} (rho^q sigma)^{(n-1)/q}`.
    pub alpha: TailEstimate,
    /// `limsup V(R) / R^n`.
    pub v_infinity: TailEstimate,
}

fn ball_from_samples(
    radii: &[f64],
    volume: &[f64],
    weighted: &[f64],
    q: f64,
    n: f64,
    tail_fraction: f64,
) -> BallFunctionals {
    let alpha: Vec<f64> = weighted.iter().zip(volume).map(|(w, v)| w / v).collect();
    let vinf: Vec<f64> = volume.iter().zip(radii).map(|(v, r)| v / r.powf(n)).collect();
    BallFunctionals {
        q,
        n,
        alpha: tail_estimate(radii, &alpha, tail_fraction),
        v_infinity: tail_estimate(radii, &vinf, tail_fraction),
    }
}

/// Ball functionals on a discrete manifold, with balls `D(R)` and `n = n_dim`.
pub fn ball_functionals(man: &DiscreteManifold, q: f64, tail_fraction: f64) -> Result<BallFunctionals, EstimateError> {
    check_q(q, tail_fraction)?;
    let n = f64::from(man.spec().n_dim);
    let mu = man.measure();
    let sigma = man.sigma();
    let rho = man.rho();
    let mut mass = vec![0.0; man.layer_count()];
    let mut weight = vec![0.0; man.layer_count()];
    for x in 0..man.len() {
        mass[man.level(x)] += mu[x];
        weight[man.level(x)] += mu[x] * (rho[x].powf(q) * sigma[x]).powf((n - 1.0) / q);
    }
    let (mut radii, mut vol, mut wsum) = (Vec::new(), Vec::new(), Vec::new());
    let (mut v, mut w) = (0.0, 0.0);
    for (j, &r) in man.radii().iter().enumerate() {
        if j > 0 {
            radii.push(r);
            vol.push(v);
            wsum.push(w);
        }
        v += mass[j];
        w += weight[j];
    }
    Ok(ball_from_samples(&radii, &vol, &wsum, q, n, tail_fraction))
}

/// Ball functionals on a radial profile with `V(R) = int_0^R A`.
pub fn ball_functionals_profile(
    profile: &RadialProfile,
    q: f64,
    n: f64,
    tail_fraction: f64,
) -> Result<BallFunctionals, EstimateError> {
    check_q(q, tail_fraction)?;
    let vol = profile.cumulative(|j| profile.area[j]);
    let wsum = profile.cumulative(|j| {
        profile.area[j] * (profile.radii[j].powf(q) * profile.sigma[j]).powf((n - 1.0) / q)
    });
    let skip = vol.iter().take_while(|v| **v <= 0.0).count();
    Ok(ball_from_samples(&profile.radii[skip..], &vol[skip..], &wsum[skip..], q, n, tail_fraction))
}

/// Collected alpha variants for one manifold and exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub q: f64,
    pub tail_fraction: f64,
    pub alpha_level: TailEstimate,
    pub alpha_end: Vec<TailEstimate>,
    pub ball: BallFunctionals,
    /// `alpha_level` recomputed at `2q`; must not be smaller.
    pub alpha_level_doubled_q: TailEstimate,
    pub holder_monotone: bool,
}

pub fn alpha_report(man: &DiscreteManifold, q: f64, tail_fraction: f64) -> Result<AlphaReport, EstimateError> {
    let alpha_level = compute_alpha_level(man, q, tail_fraction)?;
    let alpha_end = (0..man.end_count())
        .map(|e| compute_alpha_end(man, e, q, tail_fraction))
        .collect::<Result<_, _>>()?;
    let ball = ball_functionals(man, q, tail_fraction)?;
    let doubled = compute_alpha_level(man, 2.0 * q, tail_fraction)?;
    let holder_monotone = doubled.divergent || doubled.value >= alpha_level.value * (1.0 - 1e-12) - 1e-12;
    Ok(AlphaReport {
        q,
        tail_fraction,
        alpha_level,
        alpha_end,
        ball,
        alpha_level_doubled_q: doubled,
        holder_monotone,
    })
}

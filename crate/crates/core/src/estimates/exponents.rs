use serde::{Deserialize, Serialize};

use crate::error::EstimateError;

/// Positive root of `a^2 + (4m - 1) a - 4 upsilon = 0`.
///
/// ```
/// use endslab::estimates::exponent_a;
/// assert_eq!(exponent_a(2.0, 2.0), 1.0);
/// assert_eq!(exponent_a(0.25, 4.0), 4.0);
/// ```
pub fn exponent_a(m: f64, upsilon: f64) -> f64 {
    let b = 4.0 * m - 1.0;
    let disc = (b * b + 16.0 * upsilon).sqrt();
    if b > 0.0 {
        // rationalized form avoids cancellation when upsilon is small
        8.0 * upsilon / (disc + b)
    } else {
        (disc - b) / 2.0
    }
}

/// Growth exponent `a + 4m + 1` from the quadratic-decay route.
pub fn quadratic_decay_bound(m: f64, upsilon: f64) -> f64 {
    exponent_a(m, upsilon) + 4.0 * m + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Epsilon {
    pub q: f64,
    pub nu: f64,
    pub epsilon: f64,
    /// `q = nu - 1/2`.
    pub critical: bool,
    /// `0 <= epsilon < 1/2`.
    pub in_regime: bool,
}

/// `epsilon = (2q + 1 - 2 nu) / q`.
pub fn epsilon_of(q: f64, nu: f64) -> Epsilon {
    let epsilon = (2.0 * q + 1.0 - 2.0 * nu) / q;
    let critical = epsilon.abs() <= 1e-12;
    let epsilon = if critical { 0.0 } else { epsilon };
    Epsilon { q, nu, epsilon, critical, in_regime: (0.0..0.5).contains(&epsilon) }
}

/// `Gamma_eps = (100 C0)^{2/eps} + 4m + 1`, with `C0` floored at 1.
///
/// `None` outside `0 < eps < 1/2`.
pub fn gamma_epsilon(c0: f64, epsilon: f64, m: f64) -> Option<f64> {
    (epsilon > 0.0 && epsilon < 0.5).then(|| (100.0 * c0.max(1.0)).powf(2.0 / epsilon) + 4.0 * m + 1.0)
}

pub fn alpha_bar(alpha: f64) -> f64 {
    alpha.min(1.0)
}

pub fn alpha_tilde(alpha: f64) -> f64 {
    alpha.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionBound {
    pub m: f64,
    pub d: f64,
    pub a0: f64,
    pub mu: f64,
    /// `2^{4m + 1 + 2d + 1}`.
    pub gamma_bar: f64,
    pub dim_bound: f64,
}

/// Bound on the dimension of polynomial-growth solutions of degree `d`.
///
/// ```
/// use endslab::estimates::dimension_bound;
/// let b = dimension_bound(1.0, 0.0, 1.0, 3.0).unwrap();
/// assert_eq!(b.gamma_bar, 64.0);
/// ```
pub fn dimension_bound(m: f64, d: f64, a0: f64, mu: f64) -> Result<DimensionBound, EstimateError> {
    if !(m > 0.0 && d >= 0.0 && a0 > 0.0 && mu > 1.0) {
        return Err(EstimateError::InvalidParameter(format!(
            "dimension bound needs m > 0, d >= 0, A0 > 0, mu > 1 (got m={m}, d={d}, A0={a0}, mu={mu})"
        )));
    }
    let gamma_bar = 2f64.powf(4.0 * m + 1.0 + 2.0 * d + 1.0);
    Ok(DimensionBound { m, d, a0, mu, gamma_bar, dim_bound: a0 * gamma_bar })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_a_examples() {
        assert_eq!(exponent_a(1.0, 0.0), 0.0);
        assert_eq!(exponent_a(0.25, 0.0), 0.0);
        assert!((exponent_a(0.25, 2.0) - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((quadratic_decay_bound(2.0, 2.0) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn exponent_a_solves_quadratic() {
        for &(m, u) in &[(0.1, 3.0), (0.5, 0.01), (2.0, 7.0), (5.0, 1e-9)] {
            let a = exponent_a(m, u);
            let res = a * a + (4.0 * m - 1.0) * a - 4.0 * u;
            assert!(res.abs() < 1e-12 * (1.0 + 4.0 * u), "m={m} u={u} res={res}");
        }
    }

    #[test]
    fn epsilon_examples() {
        let e = epsilon_of(1.0, 1.5);
        assert!(e.critical && e.in_regime);
        let e = epsilon_of(2.0, 2.0);
        assert_eq!(e.epsilon, 0.5);
        assert!(!e.in_regime);
        assert!(!epsilon_of(2.0, 1.5).in_regime);
        assert!((epsilon_of(1.2, 1.5).epsilon - 1.0 / 3.0).abs() < 1e-15);
        assert!(!epsilon_of(1.0, 2.0).in_regime);
    }

    #[test]
    fn dimension_bound_arithmetic() {
        let a = dimension_bound(1.0, 0.0, 1.0, 3.0).unwrap();
        let b = dimension_bound(1.0, 1.0, 1.0, 3.0).unwrap();
        assert_eq!(b.gamma_bar / a.gamma_bar, 4.0);
        assert!(dimension_bound(2.0, 0.0, 1.0, 3.0).unwrap().gamma_bar > a.gamma_bar);
        assert_eq!(dimension_bound(1.0, 0.0, 2.5, 3.0).unwrap().dim_bound, 160.0);
        assert!(dimension_bound(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn alpha_clamps() {
        assert_eq!(alpha_bar(2.0), 1.0);
        assert_eq!(alpha_bar(0.3), 0.3);
        assert_eq!(alpha_tilde(0.3), 1.0);
        assert_eq!(gamma_epsilon(0.5, 0.0, 1.0), None);
        assert_eq!(gamma_epsilon(0.5, 0.25, 1.0), Some(100f64.powi(8) + 5.0));
    }
}

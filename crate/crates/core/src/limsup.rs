//! Finite-radius stand-in for `limsup_{R -> inf}`.
//!
//! The value is the maximum over the top `tail_fraction` of sampled radii.
//! Four rungs evenly spaced across that window decide divergence: if each
//! rung exceeds the previous one by more than 10%, the tail is flagged as
//! growing without bound.

use serde::{Deserialize, Serialize};

pub const DEFAULT_TAIL_FRACTION: f64 = 0.3;
pub const DIVERGENCE_STEP: f64 = 1.10;
const RUNGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// Largest sampled value in the window.
    pub value: f64,
    pub divergent: bool,
    pub window_lo: f64,
    pub window_hi: f64,
}

impl TailEstimate {
    /// `None` when the tail diverges.
    pub fn finite(&self) -> Option<f64> {
        (!self.divergent).then_some(self.value)
    }
}

/// Start index of the tail window holding the top `tail_fraction` of `n` samples.
pub fn tail_start(n: usize, tail_fraction: f64) -> usize {
    let count = ((n as f64) * tail_fraction).ceil() as usize;
    n - count.clamp(1, n)
}

/// Applies the limsup policy to samples `(radius, value)` sorted by radius.
pub fn tail_estimate(radii: &[f64], values: &[f64], tail_fraction: f64) -> TailEstimate {
    assert_eq!(radii.len(), values.len());
    assert!(!radii.is_empty(), "tail estimate needs samples");
    let start = tail_start(radii.len(), tail_fraction);
    let window = &values[start..];
    let value = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let divergent = window.len() >= RUNGS && {
        let last = window.len() - 1;
        let rungs: Vec<f64> = (0..RUNGS).map(|k| window[k * last / (RUNGS - 1)]).collect();
        rungs.windows(2).all(|w| w[0] > 0.0 && w[1] > DIVERGENCE_STEP * w[0])
    };
    TailEstimate { value, divergent, window_lo: radii[start], window_hi: radii[radii.len() - 1] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_tail_is_finite() {
        let r: Vec<f64> = (1..=50).map(f64::from).collect();
        let est = tail_estimate(&r, &vec![2.0; 50], 0.3);
        assert_eq!(est.finite(), Some(2.0));
        assert_eq!(est.window_lo, 36.0);
    }

    #[test]
    fn quadratic_growth_diverges() {
        let r: Vec<f64> = (1..=64).map(f64::from).collect();
        let v: Vec<f64> = r.iter().map(|x| x * x).collect();
        assert!(tail_estimate(&r, &v, 0.3).divergent);
    }

    #[test]
    fn slow_growth_is_not_divergent() {
        let r: Vec<f64> = (1..=64).map(f64::from).collect();
        let v: Vec<f64> = r.iter().map(|x| x.ln()).collect();
        assert!(!tail_estimate(&r, &v, 0.3).divergent);
    }

    #[test]
    fn tail_start_bounds() {
        assert_eq!(tail_start(10, 0.3), 7);
        assert_eq!(tail_start(10, 1e-9), 9);
        assert_eq!(tail_start(10, 1.0), 0);
    }
}

//! Closed-form gradient shrinking soliton profiles and radial quadratures of
//! the identities and functionals attached to them.
//!
//! Every example is rotationally symmetric around a base point (or, for the
//! cylinder, symmetric in the axis coordinate), so all integrals reduce to
//! one-dimensional integrals against an area profile `A(r)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::SolitonError;
use crate::estimates::{ball_functionals_profile, BallFunctionals, RadialProfile};

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
pub const DEFAULT_R_QUAD_MAX: f64 = 20.0;
const RESIDUAL_GRID: usize = 2001;
const C1_GRID_STEP: f64 = 0.01;
const C1_GRID_MAX: f64 = 4.0;
const PROFILE_POINTS: usize = 801;
const MAX_DEPTH: u32 = 50;

/// Shipped example names accepted by [`SolitonExample::by_name`].
pub const EXAMPLE_NAMES: [&str; 3] = ["gaussian", "cylinder", "conical"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolitonKind {
    /// Flat `R^n` with `f = r^2/4`.
    Gaussian,
    /// `S^{n-1}(sqrt(2(n-2))) x R`, with `r` the axis coordinate `|t|`.
    Cylinder,
    /// Cone-like toy with `S = c / r^2` and `f = r^2/4 + c/(3 r^2)` on
    /// `r >= 1`. Not a genuine soliton: the identity fails by `4c^2/(9 r^6)`.
    ConicalToy { c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonExample {
    pub name: String,
    pub n: u32,
    pub kind: SolitonKind,
    /// Constant added to `f`; nonzero values make negative controls.
    #[serde(default)]
    pub f_shift: f64,
    #[serde(default = "default_r_quad_max")]
    pub r_quad_max: f64,
}

fn default_r_quad_max() -> f64 {
    DEFAULT_R_QUAD_MAX
}

/// `|S^{k}|` for the unit sphere, via `Gamma((k+1)/2)` on half-integers.
fn unit_sphere_area(k: u32) -> f64 {
    let two_s = k + 1; // 2 * (k+1)/2
    let mut gamma = if two_s % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if two_s % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * x < f64::from(two_s) {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(f64::from(two_s) / 2.0) / gamma
}

impl SolitonExample {
    pub fn gaussian(n: u32) -> Result<Self, SolitonError> {
        Self::new("gaussian", n, SolitonKind::Gaussian)
    }

    pub fn cylinder(n: u32) -> Result<Self, SolitonError> {
        if n < 3 {
            return Err(SolitonError::InvalidParameter(format!("cylinder needs n >= 3, got {n}")));
        }
        Self::new("cylinder", n, SolitonKind::Cylinder)
    }

    pub fn conical_toy(n: u32, c: f64) -> Result<Self, SolitonError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(SolitonError::InvalidParameter(format!("conical toy needs c > 0, got {c}")));
        }
        Self::new("conical", n, SolitonKind::ConicalToy { c })
    }

    /// Looks up a shipped example; the conical toy uses `c = 1`.
    pub fn by_name(name: &str, n: u32) -> Result<Self, SolitonError> {
        match name {
            "gaussian" => Self::gaussian(n),
            "cylinder" => Self::cylinder(n),
            "conical" | "conical_toy" => Self::conical_toy(n, 1.0),
            other => Err(SolitonError::UnknownExample(other.to_string())),
        }
    }

    fn new(name: &str, n: u32, kind: SolitonKind) -> Result<Self, SolitonError> {
        let ex = Self { name: name.into(), n, kind, f_shift: 0.0, r_quad_max: DEFAULT_R_QUAD_MAX };
        ex.validate()?;
        Ok(ex)
    }

    pub fn with_f_shift(mut self, shift: f64) -> Self {
        self.f_shift = shift;
        self
    }

    pub fn with_r_quad_max(mut self, r: f64) -> Self {
        self.r_quad_max = r;
        self
    }

    pub fn validate(&self) -> Result<(), SolitonError> {
        if self.n == 0 || self.n > 64 {
            return Err(SolitonError::InvalidParameter(format!("dimension n = {} out of range", self.n)));
        }
        if matches!(self.kind, SolitonKind::Cylinder) && self.n < 3 {
            return Err(SolitonError::InvalidParameter("cylinder needs n >= 3".into()));
        }
        if !self.f_shift.is_finite() {
            return Err(SolitonError::InvalidParameter("f_shift must be finite".into()));
        }
        if !(self.r_quad_max > 2.0 * self.r_min() && self.r_quad_max.is_finite()) {
            return Err(SolitonError::InvalidParameter(format!("r_quad_max = {}", self.r_quad_max)));
        }
        Ok(())
    }

    fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// Lower end of the radial domain.
    pub fn r_min(&self) -> f64 {
        match self.kind {
            SolitonKind::ConicalToy { .. } => 1.0,
            _ => 0.0,
        }
    }

    pub fn f(&self, r: f64) -> f64 {
        let base = match self.kind {
            SolitonKind::Gaussian => r * r / 4.0,
            SolitonKind::Cylinder => r * r / 4.0 + (self.nf() - 1.0) / 2.0,
            SolitonKind::ConicalToy { c } => r * r / 4.0 + c / (3.0 * r * r),
        };
        base + self.f_shift
    }

    pub fn scalar_curvature(&self, r: f64) -> f64 {
        match self.kind {
            SolitonKind::Gaussian => 0.0,
            SolitonKind::Cylinder => (self.nf() - 1.0) / 2.0,
            SolitonKind::ConicalToy { c } => c / (r * r),
        }
    }

    pub fn grad_f_sq(&self, r: f64) -> f64 {
        let df = match self.kind {
            SolitonKind::Gaussian | SolitonKind::Cylinder => r / 2.0,
            SolitonKind::ConicalToy { c } => r / 2.0 - 2.0 * c / (3.0 * r.powi(3)),
        };
        df * df
    }

    /// Area of the level set at radius `r`.
    pub fn area(&self, r: f64) -> f64 {
        match self.kind {
            SolitonKind::Gaussian | SolitonKind::ConicalToy { .. } => unit_sphere_area(self.n - 1) * r.powi(self.n as i32 - 1),
            SolitonKind::Cylinder => {
                let radius = (2.0 * (self.nf() - 2.0)).sqrt();
                2.0 * unit_sphere_area(self.n - 1) * radius.powi(self.n as i32 - 1)
            }
        }
    }

    /// Exponent `k` with `A(r) <= a_k r^k` used by the tail bound.
    fn area_power(&self) -> i32 {
        match self.kind {
            SolitonKind::Cylinder => 0,
            _ => self.n as i32 - 1,
        }
    }

    pub fn radius_grid(&self, points: usize) -> Vec<f64> {
        let (lo, hi) = (self.r_min(), self.r_quad_max);
        (0..points).map(|j| lo + (hi - lo) * j as f64 / (points - 1) as f64).collect()
    }

    /// Description of the sets used as balls.
    pub fn ball_proxy(&self) -> &'static str {
        match self.kind {
            SolitonKind::Cylinder => "sublevel sets of the axis distance |t|",
            SolitonKind::ConicalToy { .. } => "annuli 1 <= r < R around the cone tip",
            SolitonKind::Gaussian => "euclidean balls",
        }
    }
}

/// `max_r | |grad f|^2 + S - f |` on a uniform grid of the domain.
///
/// ```
/// use endslab::solitons::{soliton_identity_residual, SolitonExample};
/// let cyl = SolitonExample::cylinder(4).unwrap();
/// assert!(soliton_identity_residual(&cyl) < 1e-12);
/// ```
pub fn soliton_identity_residual(ex: &SolitonExample) -> f64 {
    ex.radius_grid(RESIDUAL_GRID)
        .into_iter()
        .map(|r| (ex.grad_f_sq(r) + ex.scalar_curvature(r) - ex.f(r)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FBoundsReport {
    pub c1: f64,
    pub c2: f64,
    /// Every grid point satisfies both inequalities with `(c1, c2)`.
    pub holds: bool,
    /// `max_{r >= 1} V(r) / r^n` on the grid.
    pub volume_constant: f64,
    pub volume_from: f64,
}

/// Smallest `c1 + c2` (ties to smaller `c1`) with
/// `|f - r^2/4| <= c1 r + c2`, `c1` on a grid and `c2` exact for it.
pub fn f_bounds_check(ex: &SolitonExample) -> FBoundsReport {
    let grid = ex.radius_grid(RESIDUAL_GRID);
    let dev: Vec<f64> = grid.iter().map(|&r| (ex.f(r) - r * r / 4.0).abs()).collect();
    let steps = (C1_GRID_MAX / C1_GRID_STEP).round() as usize;
    let (mut c1, mut c2) = (0.0, f64::INFINITY);
    for i in 0..=steps {
        let a = i as f64 * C1_GRID_STEP;
        let b = grid.iter().zip(&dev).map(|(r, d)| d - a * r).fold(0.0, f64::max);
        if a + b < c1 + c2 - 1e-15 {
            c1 = a;
            c2 = b;
        }
    }
    let holds = grid.iter().zip(&dev).all(|(r, d)| *d <= c1 * r + c2 + 1e-12);

    let volume_from = ex.r_min().max(1.0);
    let mut vol = 0.0;
    let mut volume_constant: f64 = 0.0;
    for w in grid.windows(2) {
        vol += 0.5 * (w[1] - w[0]) * (ex.area(w[0]) + ex.area(w[1]));
        if w[1] >= volume_from {
            volume_constant = volume_constant.max(vol / w[1].powi(ex.n as i32));
        }
    }
    FBoundsReport { c1, c2, holds, volume_constant, volume_from }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub n: u32,
    pub quad_tol: f64,
    /// `int e^{-f} A(r) dr` over the truncated domain.
    pub integral: f64,
    /// `ln((4 pi)^{-n/2} * integral)`.
    pub mu: f64,
    /// Analytic bound on the discarded tail beyond `r_quad_max`.
    pub tail_bound: f64,
    pub evaluations: usize,
}

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    g: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> f64 {
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    *evals += 2;
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(g, a, fa, m, fm, lm, flm, left, tol / 2.0, depth + 1, evals)
        + adaptive(g, m, fm, b, fb, rm, frm, right, tol / 2.0, depth + 1, evals)
}

/// Adaptive Simpson quadrature of `g` on `[a, b]` to absolute tolerance `tol`.
///
/// ```
/// use endslab::solitons::adaptive_simpson;
/// let (v, _) = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
/// assert!((v - 2.0).abs() < 1e-11);
/// ```
pub fn adaptive_simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, usize) {
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (g(a), g(b), g(m));
    let whole = simpson(a, fa, b, fb, fm);
    let mut evals = 3;
    let v = adaptive(&g, a, fa, b, fb, m, fm, whole, tol, 0, &mut evals);
    (v, evals)
}

/// Bound on `int_R^inf e^{-f} A`: with `f >= r^2/4 + shift` and
/// `A(r) = a_k r^k`, log-concavity of `r^k e^{-r^2/4}` gives
/// `R^k e^{-R^2/4} / (R/2 - k/R)` once `R^2 > 2k`.
fn tail_bound(ex: &SolitonExample) -> f64 {
    let r = ex.r_quad_max;
    let k = f64::from(ex.area_power());
    let slope = r / 2.0 - k / r;
    if slope <= 0.0 {
        return f64::INFINITY;
    }
    let a_k = ex.area(r) / r.powi(ex.area_power());
    // the cylinder's f carries an extra positive constant we may drop
    a_k * r.powf(k) * (-r * r / 4.0 - ex.f_shift).exp() / slope
}

/// Entropy `ln((4 pi)^{-n/2} int e^{-f})` by radial quadrature.
///
/// ```
/// use endslab::solitons::{entropy, SolitonExample};
/// let mu = entropy(&SolitonExample::gaussian(3).unwrap(), 1e-9).unwrap().mu;
/// assert!(mu.abs() < 1e-8);
/// ```
pub fn entropy(ex: &SolitonExample, quad_tol: f64) -> Result<EntropyReport, SolitonError> {
    ex.validate()?;
    if !(quad_tol > 0.0) {
        return Err(SolitonError::InvalidParameter(format!("quad_tol = {quad_tol}")));
    }
    let tail = tail_bound(ex);
    if !(tail <= quad_tol) {
        return Err(SolitonError::TailTooFat { radius: ex.r_quad_max, bound: tail, tol: quad_tol });
    }
    let (integral, evaluations) =
        adaptive_simpson(|r| (-ex.f(r)).exp() * ex.area(r), ex.r_min(), ex.r_quad_max, quad_tol);
    let mu = (integral / (4.0 * PI).powf(ex.nf() / 2.0)).ln();
    Ok(EntropyReport { n: ex.n, quad_tol, integral, mu, tail_bound: tail, evaluations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonAlpha {
    pub ball_proxy: String,
    pub functionals: BallFunctionals,
}

/// Ball average of `(S r^2)^{(n-1)/2}` with the tail limsup proxy.
pub fn soliton_alpha(ex: &SolitonExample, tail_fraction: f64) -> Result<SolitonAlpha, SolitonError> {
    ex.validate()?;
    let profile = RadialProfile::from_fn(ex.radius_grid(PROFILE_POINTS), |r| ex.area(r), |r| ex.scalar_curvature(r));
    let functionals = ball_functionals_profile(&profile, 2.0, ex.nf(), tail_fraction)
        .map_err(|e| SolitonError::InvalidParameter(e.to_string()))?;
    Ok(SolitonAlpha { ball_proxy: ex.ball_proxy().into(), functionals })
}

/// All soliton diagnostics for one example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonReport {
    pub example: SolitonExample,
    pub identity_residual: f64,
    /// The identity holds to round-off.
    pub genuine: bool,
    pub f_bounds: FBoundsReport,
    pub entropy: EntropyReport,
    /// `|mu(tol) - mu(tol/2)|`, expected below `10 quad_tol`.
    pub refinement_change: f64,
    pub alpha: SolitonAlpha,
}

pub fn soliton_report(ex: &SolitonExample, quad_tol: f64, tail_fraction: f64) -> Result<SolitonReport, SolitonError> {
    let identity_residual = soliton_identity_residual(ex);
    let entropy_report = entropy(ex, quad_tol)?;
    let refined = entropy(ex, quad_tol / 2.0)?;
    Ok(SolitonReport {
        example: ex.clone(),
        identity_residual,
        genuine: identity_residual <= 1e-12,
        f_bounds: f_bounds_check(ex),
        refinement_change: (entropy_report.mu - refined.mu).abs(),
        entropy: entropy_report,
        alpha: soliton_alpha(ex, tail_fraction)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identities() {
        for n in [3, 4] {
            assert!(soliton_identity_residual(&SolitonExample::gaussian(n).unwrap()) < 1e-12);
            assert!(soliton_identity_residual(&SolitonExample::cylinder(n).unwrap()) < 1e-12);
            let shifted = SolitonExample::gaussian(n).unwrap().with_f_shift(0.1);
            assert!((soliton_identity_residual(&shifted) - 0.1).abs() < 1e-12);
        }
        let toy = SolitonExample::conical_toy(3, 1.0).unwrap();
        assert!((soliton_identity_residual(&toy) - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_entropy_vanishes() {
        for n in 1..=6 {
            let e = entropy(&SolitonExample::gaussian(n).unwrap(), 1e-9).unwrap();
            assert!(e.mu.abs() < 1e-8, "n={n} mu={}", e.mu);
        }
    }

    #[test]
    fn cylinder_entropy_closed_form() {
        let n = 4;
        let ex = SolitonExample::cylinder(n).unwrap();
        let e = entropy(&ex, 1e-10).unwrap();
        let expect = ex.area(0.0) * (-(1.5f64)).exp() * PI.sqrt();
        assert!((e.integral - expect).abs() < 1e-8);
    }

    #[test]
    fn shift_moves_entropy() {
        let ex = SolitonExample::gaussian(3).unwrap();
        let base = entropy(&ex, 1e-10).unwrap().mu;
        let moved = entropy(&ex.with_f_shift(0.7), 1e-10).unwrap().mu;
        assert!((moved - base + 0.7).abs() < 1e-8);
    }

    #[test]
    fn short_domain_is_too_fat() {
        let ex = SolitonExample::gaussian(3).unwrap().with_r_quad_max(3.0);
        assert!(matches!(entropy(&ex, 1e-9), Err(SolitonError::TailTooFat { .. })));
    }

    #[test]
    fn f_bounds() {
        let g = f_bounds_check(&SolitonExample::gaussian(3).unwrap());
        assert_eq!((g.c1, g.c2), (0.0, 0.0));
        assert!((g.volume_constant - 4.0 * PI / 3.0).abs() < 1e-3);
        let c = f_bounds_check(&SolitonExample::cylinder(4).unwrap());
        assert_eq!(c.c1, 0.0);
        assert!((c.c2 - 1.5).abs() < 1e-12);
        assert!(c.holds);
        let t = f_bounds_check(&SolitonExample::conical_toy(3, 1.5).unwrap());
        assert!((t.c2 - 0.5).abs() < 1e-12 && t.holds);
    }

    #[test]
    fn alpha_values() {
        let g = soliton_alpha(&SolitonExample::gaussian(3).unwrap(), 0.3).unwrap();
        assert_eq!(g.functionals.alpha.finite(), Some(0.0));
        for n in [3, 4] {
            let c = soliton_alpha(&SolitonExample::cylinder(n).unwrap(), 0.3).unwrap();
            assert!(c.functionals.alpha.divergent);
        }
        let t = soliton_alpha(&SolitonExample::conical_toy(3, 2.0).unwrap(), 0.3).unwrap();
        assert!((t.functionals.alpha.value - 2.0).abs() < 1e-12);
        let t4 = soliton_alpha(&SolitonExample::conical_toy(4, 2.0).unwrap(), 0.3).unwrap();
        assert!((t4.functionals.alpha.value - 2f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn names() {
        for name in EXAMPLE_NAMES {
            assert!(SolitonExample::by_name(name, 3).is_ok());
        }
        assert!(matches!(SolitonExample::by_name("torus", 3), Err(SolitonError::UnknownExample(_))));
        assert!(SolitonExample::cylinder(2).is_err());
    }

    #[test]
    fn report_refines() {
        let r = soliton_report(&SolitonExample::gaussian(3).unwrap(), 1e-9, 0.3).unwrap();
        assert!(r.genuine);
        assert!(r.refinement_change < 1e-8);
    }
}

//! Volume/area profiles and the exhaustion-function checks.

use serde::{Deserialize, Serialize};

use crate::model::DiscreteManifold;
use crate::profile::ProfileSeries;

/// `V(r_j) = mu(D(r_j))` and `A(r_j) = mu(Sigma(r_j)) / h` at every layer radius.
pub fn volume_area_profiles(man: &DiscreteManifold) -> (ProfileSeries, ProfileSeries) {
    let mu = man.measure();
    let h = man.h();
    let mut layer_mass = vec![0.0; man.layer_count()];
    for x in 0..man.len() {
        layer_mass[man.level(x)] += mu[x];
    }
    let mut volume = Vec::with_capacity(layer_mass.len());
    let mut acc = 0.0;
    for m in &layer_mass {
        volume.push(acc);
        acc += m;
    }
    let area = layer_mass.iter().map(|m| m / h).collect();
    let radii = man.radii().to_vec();
    (
        ProfileSeries::new("volume", radii.clone(), volume).expect("layer radii increase"),
        ProfileSeries::new("area", radii, area).expect("layer radii increase"),
    )
}

/// Discrete counterpart of `1/2 <= |grad rho| <= 1`, `Delta rho <= m / rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoReport {
    /// `max rho * (L rho)` over vertices with `rho >= R0` strictly between the
    /// junction layer and the truncation layer.
    pub m_measured: f64,
    /// `max_i p_i`.
    pub m_implied: f64,
    pub grad_lo: f64,
    pub grad_hi: f64,
    pub tolerance: f64,
    pub violation: bool,
}

pub fn verify_rho_conditions(man: &DiscreteManifold) -> RhoReport {
    let g = man.graph();
    let rho = man.rho();
    let h = man.h();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (x, y, _) in g.edges() {
        let d = (rho[x] - rho[y]).abs() / h;
        if d > 1e-12 {
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    if !lo.is_finite() {
        lo = 0.0;
    }
    let last = man.layer_count() - 1;
    let r0 = man.inner_radius();
    let m_measured = (0..man.len())
        // layer 0 touches the core, where rho has a kink at the junction of the ends
        .filter(|&x| rho[x] >= r0 - 1e-9 * h && (1..last).contains(&man.level(x)))
        .map(|x| rho[x] * g.laplacian_at(rho, x))
        .fold(f64::NEG_INFINITY, f64::max);
    let m_measured = if m_measured.is_finite() { m_measured } else { 0.0 };
    let m_implied = man.spec().implied_m();
    // the midpoint stencil is exact for p in {0, 1, 2}; otherwise O((h/r)^2)
    let tolerance = 1e-9 + m_implied.max(1.0).powi(3) * (h / r0).powi(2) / 24.0;
    RhoReport {
        m_measured,
        m_implied,
        grad_lo: lo,
        grad_hi: hi,
        tolerance,
        violation: m_measured > m_implied + tolerance || hi > 1.0 + 1e-12 || lo < 0.5 - 1e-12,
    }
}

/// `c(m) = 4m + 1`.
pub fn lemma_constant(m: f64) -> f64 {
    4.0 * m + 1.0
}

/// Outcome of the area/doubling/growth checks at radii `r >= R0`.
///
/// The growth check is `V(r) <= V(R0) r^{4m+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaAreaReport {
    pub m: f64,
    pub c_m: f64,
    pub gamma_m: f64,
    pub area_ok: bool,
    pub doubling_ok: bool,
    pub growth_ok: bool,
    /// `max A(r) r / V(r)`.
    pub tightest_area_constant: f64,
    /// `max ln(V((1+theta) r)/V(r)) / ln(1+theta)`.
    pub tightest_doubling_exponent: f64,
    /// `max ln(V(r)/V(R0)) / ln r` over `r > 1`.
    pub tightest_growth_exponent: f64,
    pub samples: usize,
}

impl LemmaAreaReport {
    pub fn passed(&self) -> bool {
        self.area_ok && self.doubling_ok && self.growth_ok
    }
}

pub const DOUBLING_THETAS: [f64; 3] = [0.25, 0.5, 1.0];

/// Radii below the first layer above the core have `V = 0`, so sampling
/// starts at `max(R0, r_core + h)`. Off-layer volumes `V((1+theta) r)` are
/// interpolated linearly between layer radii.
pub fn check_area_volume_lemma(man: &DiscreteManifold, m: f64) -> LemmaAreaReport {
    let c = lemma_constant(m);
    let gamma = c;
    let (vol, area) = volume_area_profiles(man);
    let r0 = man.inner_radius().max(man.radii()[1]);
    let r_max = man.r_max();
    let v_r0 = man.volume_below(r0);
    let rel = 1e-12;

    let mut report = LemmaAreaReport {
        m,
        c_m: c,
        gamma_m: gamma,
        area_ok: true,
        doubling_ok: true,
        growth_ok: true,
        tightest_area_constant: 0.0,
        tightest_doubling_exponent: 0.0,
        tightest_growth_exponent: 0.0,
        samples: 0,
    };
    for (j, &r) in man.radii().iter().enumerate() {
        if r < r0 - 1e-9 * man.h() {
            continue;
        }
        report.samples += 1;
        let v = vol.values()[j];
        let a = area.values()[j];
        let ratio = a * r / v;
        report.tightest_area_constant = report.tightest_area_constant.max(ratio);
        if ratio > c * (1.0 + rel) {
            report.area_ok = false;
        }
        for theta in DOUBLING_THETAS {
            let s = (1.0 + theta) * r;
            if s > r_max + 1e-9 * man.h() {
                continue;
            }
            // linear interpolation between layers; the raw sublevel volume is a step function
            let vs = vol.interpolate(s);
            let exponent = (vs / v).ln() / (1.0 + theta).ln();
            report.tightest_doubling_exponent = report.tightest_doubling_exponent.max(exponent);
            if vs > (1.0 + theta).powf(c) * v * (1.0 + rel) {
                report.doubling_ok = false;
            }
        }
        if v > r.powf(gamma) * v_r0 * (1.0 + rel) {
            report.growth_ok = false;
        }
        if r > 1.0 {
            report.tightest_growth_exponent =
                report.tightest_growth_exponent.max((v / v_r0).ln() / r.ln());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_manifold, EndSpec, ModelSpec, SigmaLaw};

    fn spec(ends: Vec<EndSpec>, h: f64, r_max: f64) -> ModelSpec {
        ModelSpec {
            n_dim: 3,
            ends,
            core_size: 1,
            r_core: 1.0,
            inner_radius: 2.0,
            r_max,
            h,
            sigma_law: SigmaLaw::Bump { c: 1.0, r_lo: 0.0, r_hi: 1.0 },
        }
    }

    #[test]
    fn path_volume_counts_vertices() {
        let man = build_manifold(&spec(vec![EndSpec::new(1.0, 0.0, 1); 2], 1.0, 10.0)).unwrap();
        let (v, a) = volume_area_profiles(&man);
        for (j, &r) in v.radii().iter().enumerate() {
            if j == 0 {
                assert_eq!(v.values()[0], 0.0);
                assert_eq!(a.values()[0], 3.0);
            } else {
                assert_eq!(v.values()[j], 2.0 * r - 1.0);
                assert_eq!(a.values()[j], 2.0);
            }
        }
        assert_eq!(*v.values().last().unwrap() + 2.0, man.total_measure());
        assert!(v.is_nondecreasing(0.0));
    }

    #[test]
    fn cone_area_volume_ratio_tends_to_dimension() {
        let man = build_manifold(&spec(vec![EndSpec::new(1.0, 2.0, 1)], 0.05, 40.0)).unwrap();
        let (v, a) = volume_area_profiles(&man);
        let j = man.layer_count() - 1;
        let r = v.radii()[j];
        let ratio = a.values()[j] * r / v.values()[j];
        assert!((ratio - 3.0).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn rho_conditions_on_cone_and_path() {
        let cone = build_manifold(&spec(vec![EndSpec::new(1.0, 2.0, 1)], 0.5, 20.0)).unwrap();
        let rep = verify_rho_conditions(&cone);
        assert!((rep.m_measured - 2.0).abs() < 1e-9, "{rep:?}");
        assert!(!rep.violation);
        assert_eq!((rep.grad_lo, rep.grad_hi), (1.0, 1.0));

        let path = build_manifold(&spec(vec![EndSpec::new(1.0, 0.0, 4); 2], 1.0, 10.0)).unwrap();
        let rep = verify_rho_conditions(&path);
        assert!(rep.m_measured.abs() < 1e-12);
        assert!(!rep.violation);
    }

    #[test]
    fn lemma_holds_on_cone_with_tight_constant_near_three() {
        let man = build_manifold(&spec(vec![EndSpec::new(1.0, 2.0, 1)], 0.25, 40.0)).unwrap();
        let rep = check_area_volume_lemma(&man, 2.0);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.c_m, 9.0);
        assert!(rep.tightest_area_constant < 9.0);
    }

    #[test]
    fn lemma_detects_undersized_constant() {
        let man = build_manifold(&spec(vec![EndSpec::new(1.0, 2.0, 1)], 0.25, 40.0)).unwrap();
        // c(0.1) = 1.4 is far below the cone's area ratio of about 3
        let rep = check_area_volume_lemma(&man, 0.1);
        assert!(!rep.area_ok);
    }
}

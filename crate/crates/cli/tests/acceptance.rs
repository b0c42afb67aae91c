//! Acceptance suite: one pass/fail line per criterion.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use endslab::estimates::{
    compute_alpha_level, end_count_pipeline, growth_fit, EndCountReport, GrowthParams,
};
use endslab::geometry::{check_area_volume_lemma, volume_area_profiles};
use endslab::graph::WeightedGraph;
use endslab::linalg::CgOptions;
use endslab::model::{build_manifold, DiscreteManifold, EndSpec, ModelSpec, SigmaLaw};
use endslab::solitons::{entropy, soliton_identity_residual, SolitonExample};
use endslab::solver::{check_strict_bounds, dirichlet_nodes, exhaustion_ladder, Node, SchrodingerSystem};
use endslab_cli::config::{ModelChoice, RunConfig};
use endslab_cli::shipped::{shipped_config, SHIPPED};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Shipped manifold models meant to pass (the tiny demo is excluded).
fn shipped_manifolds() -> Vec<(String, ModelSpec, RunConfig)> {
    SHIPPED
        .iter()
        .filter(|(n, _)| *n != "tiny_demo")
        .filter_map(|(n, _)| {
            let cfg = shipped_config(n).unwrap();
            match &cfg.model {
                ModelChoice::Manifold(spec) => Some((n.to_string(), spec.clone(), cfg.clone())),
                ModelChoice::Soliton(_) => None,
            }
        })
        .collect()
}

fn run_pipeline(spec: &ModelSpec, cfg: &RunConfig) -> Result<(DiscreteManifold, EndCountReport), String> {
    let man = build_manifold(spec).map_err(|e| e.to_string())?;
    let rep = end_count_pipeline(&man, &cfg.pipeline_config()).map_err(|e| e.to_string())?;
    Ok((man, rep))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let e = entropy(&SolitonExample::gaussian(3).unwrap(), 1e-9).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(e.mu.abs() < 1e-8, || format!("mu = {:e}", e.mu))?;
    ensure(elapsed < 1.0, || format!("took {elapsed:.3}s"))?;
    Ok(format!("mu = {:.2e} in {:.1} ms", e.mu, elapsed * 1e3))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [3, 4] {
        for ex in [SolitonExample::gaussian(n).unwrap(), SolitonExample::cylinder(n).unwrap()] {
            let r = soliton_identity_residual(&ex);
            ensure(r <= 1e-12, || format!("{} n={n}: residual {r:e}", ex.name))?;
            worst = worst.max(r);
            let shifted = soliton_identity_residual(&ex.clone().with_f_shift(0.1));
            ensure((shifted - 0.1).abs() <= 1e-12, || format!("{} n={n}: control gave {shifted}", ex.name))?;
        }
    }
    Ok(format!("largest residual {worst:.1e}; controls return 0.1"))
}

fn criterion_3() -> Outcome {
    let mut lines = Vec::new();
    for name in ["two_end_cone", "three_end_cone", "four_end_star"] {
        let cfg = shipped_config(name).unwrap();
        let ModelChoice::Manifold(spec) = &cfg.model else { unreachable!() };
        ensure(spec.r_max >= 64.0 * spec.h, || format!("{name}: r_max too small"))?;
        let start = Instant::now();
        let (_, rep) = run_pipeline(spec, &cfg)?;
        let secs = start.elapsed().as_secs_f64();
        let k = spec.ends.len();
        ensure(rep.gram.rank == k, || format!("{name}: rank {} != {k}", rep.gram.rank))?;
        for e in &rep.separation.ends {
            ensure(
                e.positive && e.bounded_off_end && e.sup_on_end && e.sup_exceeds_one && e.end_strictly_increasing,
                || format!("{name}: end {} fails separation: {e:?}", e.end_index),
            )?;
        }
        ensure(secs < 30.0, || format!("{name}: took {secs:.1}s"))?;
        lines.push(format!("{name} rank {k} ({secs:.2}s)"));
    }
    Ok(lines.join(", "))
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (name, spec, cfg) in shipped_manifolds() {
        let man = build_manifold(&spec).map_err(|e| e.to_string())?;
        let r0 = cfg.pipeline_config().resolved_r0(&man);
        for radius in exhaustion_ladder(&man, r0).map_err(|e| e.to_string())? {
            for end in 0..man.end_count() {
                let nodes = dirichlet_nodes(&man, end, radius).map_err(|e| e.to_string())?;
                let sys = SchrodingerSystem::assemble(man.graph(), &nodes).map_err(|e| e.to_string())?;
                if sys.interior().len() >= 500 {
                    continue;
                }
                let cg = sys.solve(CgOptions { rel_tol: 1e-12, max_iter: 50_000 }, None).map_err(|e| e.to_string())?;
                let dense = sys.solve_dense().map_err(|e| e.to_string())?;
                let scale = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let err = cg.values.iter().zip(&dense).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
                ensure(err <= 1e-8, || format!("{name} end {end} R {radius}: relative error {err:e}"))?;
                worst = worst.max(err);
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "no system under 500 unknowns".into())?;
    Ok(format!("{checked} systems, worst relative sup error {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..10_000 {
        let n = rng.gen_range(3..10);
        let measure: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..5.0)).collect();
        let sigma: Vec<f64> =
            (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..3.0) }).collect();
        let mut edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, rng.gen_range(0.05..5.0))).collect();
        for _ in 0..rng.gen_range(0..n) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                edges.push((a, b, rng.gen_range(0.05..5.0)));
            }
        }
        let g = WeightedGraph::new(measure, sigma, &edges).map_err(|e| e.to_string())?;
        let mut nodes = vec![Node::Interior; n];
        nodes[0] = Node::Fixed(1.0);
        nodes[n - 1] = Node::Fixed(0.0);
        let sys = SchrodingerSystem::assemble(&g, &nodes).map_err(|e| e.to_string())?;
        let sol = sys.solve(CgOptions::default(), None).map_err(|e| format!("trial {trial}: {e}"))?;
        check_strict_bounds(&nodes, &sol.values, 0.0, 1.0).map_err(|e| format!("trial {trial}: {e}"))?;
    }
    Ok("10000 random instances strictly inside (0, 1)".into())
}

fn criterion_6() -> Outcome {
    let cfg = shipped_config("quadratic_decay_cone").unwrap();
    let ModelChoice::Manifold(spec) = &cfg.model else { unreachable!() };
    let (man, rep) = run_pipeline(spec, &cfg)?;
    ensure(rep.m == 2.0 && rep.upsilon == 2.0, || format!("m = {}, upsilon = {}", rep.m, rep.upsilon))?;
    let growth = rep.growth.as_ref().ok_or("growth stage missing")?;
    let mut margins = Vec::new();
    for g in growth {
        let bound = g.bound_a.ok_or("no bound")?;
        ensure((bound - 10.0).abs() < 1e-12, || format!("bound {bound}"))?;
        ensure(g.fitted_exponent <= bound, || format!("b = {} exceeds {bound}", g.fitted_exponent))?;
        margins.push(bound - g.fitted_exponent);
    }
    let params = GrowthParams { m: 2.0, upsilon: Some(2.0), c0: None, q: 1.2, nu: 1.5, fit_tol: 0.25, lambda0: None };
    for beta in [0.0, 0.5, 1.0, 2.5, 4.0] {
        let u: Vec<f64> = man.rho().iter().map(|r| r.powf(beta)).collect();
        let fit = growth_fit(&man, &u, 0.3, &params).map_err(|e| e.to_string())?;
        ensure((fit.fitted_exponent - beta).abs() <= 1e-6, || format!("beta {beta} fitted {}", fit.fitted_exponent))?;
    }
    Ok(format!(
        "b = [{}] <= 10, margins [{}]; synthetic powers recovered",
        growth.iter().map(|g| format!("{:.4}", g.fitted_exponent)).collect::<Vec<_>>().join(", "),
        margins.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>().join(", ")
    ))
}

fn criterion_7() -> Outcome {
    let ups = 1.7;
    let spec = ModelSpec::symmetric(3, 2, EndSpec::new(1.0, 2.0, 1), 1.0, 64.0, SigmaLaw::QuadraticDecay { upsilon: ups });
    let man = build_manifold(&spec).map_err(|e| e.to_string())?;
    for q in [1.0, 2.0, 3.0] {
        let a = compute_alpha_level(&man, q, 0.3).map_err(|e| e.to_string())?;
        ensure((a.value - ups).abs() <= 1e-10, || format!("q = {q}: alpha {}", a.value))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for field in 0..20 {
        let sigma: Vec<f64> = (0..man.len()).map(|_| rng.gen_range(0.0..2.0) / (1.0 + rng.gen_range(0.0..50.0f64).powi(2))).collect();
        let m = man.with_sigma_values(sigma).map_err(|e| e.to_string())?;
        for q in [1.0, 1.5, 2.0] {
            let lo = compute_alpha_level(&m, q, 0.3).map_err(|e| e.to_string())?;
            let hi = compute_alpha_level(&m, 2.0 * q, 0.3).map_err(|e| e.to_string())?;
            ensure(hi.divergent || hi.value >= lo.value * (1.0 - 1e-12), || {
                format!("field {field} q {q}: alpha(2q) {} < alpha(q) {}", hi.value, lo.value)
            })?;
        }
    }
    Ok(format!("alpha = {ups} for q in 1, 2, 3; Holder monotone on 20 random fields"))
}

fn criterion_8() -> Outcome {
    let mut worst_spread: f64 = 0.0;
    let mut worst_exp = f64::NEG_INFINITY;
    for (name, spec, cfg) in shipped_manifolds() {
        let (_, rep) = run_pipeline(&spec, &cfg)?;
        let nu = cfg.pipeline_config().nu;
        ensure(nu == 1.5, || format!("{name}: nu = {nu}"))?;
        for ladder in rep.moser.as_ref().ok_or("moser stage missing")? {
            ensure(ladder.a0_spread <= 0.2, || format!("{name}: A0 spread {}", ladder.a0_spread))?;
            worst_spread = worst_spread.max(ladder.a0_spread);
            for r in &ladder.reports {
                ensure(r.theta_exponent <= 2.0 * nu + 0.3, || format!("{name}: theta exponent {}", r.theta_exponent))?;
                worst_exp = worst_exp.max(r.theta_exponent);
            }
        }
    }
    Ok(format!("largest A0 spread {worst_spread:.3}, largest theta exponent {worst_exp:.3} <= 3.3"))
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    for (name, spec, cfg) in shipped_manifolds() {
        let man = build_manifold(&spec).map_err(|e| e.to_string())?;
        let m = cfg.pipeline_config().resolved_m(&man);
        let l = check_area_volume_lemma(&man, m);
        ensure(l.passed(), || format!("{name}: {l:?}"))?;
        count += 1;
    }
    // two-grid check against A(r) = 2 r^2, V(r) = 1 + 2 (r^3 - 1) / 3 on a two-end cone
    let errors: Vec<(f64, f64)> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&h| {
            let spec = ModelSpec::symmetric(3, 2, EndSpec::new(1.0, 2.0, 1), h, 9.0, SigmaLaw::Bump { c: 1.0, r_lo: 0.0, r_hi: 1.0 });
            let man = build_manifold(&spec).unwrap();
            let (vol, area) = volume_area_profiles(&man);
            let probe = 8.0;
            let j = man.layer_index(probe).unwrap();
            let v_exact = 1.0 + 2.0 * (probe.powi(3) - 1.0) / 3.0;
            let a_exact = 2.0 * probe * probe;
            ((vol.values()[j] - v_exact).abs() / v_exact, (area.values()[j] - a_exact).abs() / a_exact)
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0].0 / w[1].0).log2()).collect();
    for o in &orders {
        ensure((0.8..=1.2).contains(o), || format!("volume convergence order {o}"))?;
    }
    let area_err = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    ensure(area_err <= 1e-12, || format!("area error {area_err}"))?;
    Ok(format!(
        "{count} shipped models pass; volume order [{}], area exact",
        orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(", ")
    ))
}

fn criterion_10() -> Outcome {
    let cfg = shipped_config("quadratic_decay_path").unwrap();
    let ModelChoice::Manifold(base) = &cfg.model else { unreachable!() };
    let mut c0s = Vec::new();
    for r_max in [64.0, 128.0] {
        let spec = ModelSpec { r_max, ..base.clone() };
        let (_, rep) = run_pipeline(&spec, &cfg)?;
        for c in rep.chi.as_ref().ok_or("chi stage missing")? {
            ensure(c.chi_nondecreasing, || format!("chi decreases at r_max {r_max}"))?;
            let c0 = c.c0.ok_or_else(|| format!("C0 not finite at r_max {r_max}"))?;
            ensure(c0.is_finite(), || format!("C0 = {c0}"))?;
            c0s.push((r_max, c0));
        }
    }
    let lo = c0s.iter().filter(|c| c.0 == 64.0).map(|c| c.1).fold(0.0, f64::max);
    let hi = c0s.iter().filter(|c| c.0 == 128.0).map(|c| c.1).fold(0.0, f64::max);
    ensure(hi > 0.0, || "C0 vanished".into())?;
    let change = (lo / hi - 1.0).abs();
    ensure(change <= 0.3, || format!("C0 {lo} vs {hi}"))?;
    Ok(format!("C0 = {lo:.4} (r_max 64), {hi:.4} (r_max 128), change {:.1}%", change * 100.0))
}

fn criterion_11() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for name in ["three_end_mixed", "cylinder"] {
        let (ra, da) = endslab_cli::run_config(name, Some(a.path().join(name)), Some(11), 2).map_err(|e| e.to_string())?;
        let (_, db) = endslab_cli::run_config(name, Some(b.path().join(name)), Some(11), 4).map_err(|e| e.to_string())?;
        ensure(ra.passed, || format!("{name} did not pass"))?;
        let ja = std::fs::read(da.join("report.json")).map_err(|e| e.to_string())?;
        let jb = std::fs::read(db.join("report.json")).map_err(|e| e.to_string())?;
        ensure(ja == jb, || format!("{name}: report.json differs"))?;
        for entry in std::fs::read_dir(da.join("series")).map_err(|e| e.to_string())? {
            let p = entry.map_err(|e| e.to_string())?.path();
            let other = db.join("series").join(p.file_name().unwrap());
            ensure(std::fs::read(&p).ok() == std::fs::read(&other).ok(), || format!("{} differs", p.display()))?;
            compared += 1;
        }
    }
    Ok(format!("report.json and {compared} series files byte-identical across runs with 2 and 4 workers"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("gaussian entropy", criterion_1),
        ("soliton identity", criterion_2),
        ("end separation and independence", criterion_3),
        ("dirichlet oracle equivalence", criterion_4),
        ("maximum principle", criterion_5),
        ("growth bound", criterion_6),
        ("alpha cancellation", criterion_7),
        ("mean value property", criterion_8),
        ("area and volume lemma", criterion_9),
        ("chi inequality", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

//! Acceptance suite: one pass/fail line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use heisenberg_hardy::domains::{hardy_weight, weight_identity_check, Domain, HalfSpace, Polytope, WeightSpec};
use heisenberg_hardy::fields::{lambda_apply, make_bump, Bump, NumericOnly, Polynomial};
use heisenberg_hardy::hardy::{
    boundary_sign_terms, c_alpha, default_quadrature, evaluate_quotient, evaluate_quotient_l2, jensen_split,
    optimal_alpha, polytope_interface_audit_total, superadditivity_gap,
};
use heisenberg_hardy::heis::{commutator_check, dilate, group_compose};
use heisenberg_hardy::metrics::{bilipschitz_scan, cc_distance, SolverConfig};
use heisenberg_hardy::sharpness::{default_l2_schedule, default_lp_schedule, run_l2_sharpness, run_lp_sharpness, SharpnessOptions};
use heisenberg_hardy::{AxisBox, HorizontalVector, Point, QuadratureSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn pt(c: Vec<f64>) -> Point {
    Point::from_coords(c).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Point {
    pt((0..2 * n + 1).map(|_| rng.gen_range(-scale..scale)).collect())
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (0.1..=1.0).contains(&len) {
            return v.iter().map(|x| x / len).collect();
        }
    }
}

/// Random half-space and a bump whose support box sits at a random gap
/// from its boundary.
fn halfspace_config(rng: &mut ChaCha8Rng, n: usize) -> (HalfSpace, Bump) {
    let dim = 2 * n + 1;
    let nu = random_unit(rng, dim);
    let d = rng.gen_range(-1.0..1.0);
    let radii: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.3..1.2)).collect();
    let mut center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let reach: f64 = nu.iter().zip(&radii).map(|(v, r)| v.abs() * r).sum();
    let gap = rng.gen_range(0.01..1.0);
    let s = d + reach + gap - nu.iter().zip(&center).map(|(v, c)| v * c).sum::<f64>();
    center.iter_mut().zip(&nu).for_each(|(c, v)| *c += s * v);
    (HalfSpace::new(nu, d).unwrap(), make_bump(&center, &radii, 1.0))
}

/// A bump inside a bounded polytope, support box at least 1e-3 from every facet.
fn polytope_bump(rng: &mut ChaCha8Rng, poly: &Polytope) -> Bump {
    let bbox = poly.bounding_box().unwrap();
    let dim = bbox.dim();
    loop {
        let c: Vec<f64> = (0..dim).map(|j| rng.gen_range(bbox.lo[j]..bbox.hi[j])).collect();
        let dist = poly
            .facets()
            .iter()
            .map(|f| f.signed_distance(&c))
            .fold(f64::INFINITY, f64::min);
        if dist < 0.05 {
            continue;
        }
        let shape: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..1.0)).collect();
        let reach = poly
            .facets()
            .iter()
            .map(|f| f.normal().iter().zip(&shape).map(|(v, s)| v.abs() * s).sum::<f64>())
            .fold(0.0, f64::max);
        let scale = rng.gen_range(0.3..0.95) * (dist - 2e-3) / reach;
        let radii: Vec<f64> = shape.iter().map(|s| s * scale).collect();
        return make_bump(&c, &radii, 1.0);
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_assoc: f64 = 0.0;
    for k in 0..1000 {
        let n = 1 + k % 2;
        let (a, b, c) = (random_point(&mut rng, n, 3.0), random_point(&mut rng, n, 3.0), random_point(&mut rng, n, 3.0));
        let l = group_compose(&group_compose(&a, &b).unwrap(), &c).unwrap();
        let r = group_compose(&a, &group_compose(&b, &c).unwrap()).unwrap();
        for (x, y) in l.coords().iter().zip(r.coords()) {
            worst_assoc = worst_assoc.max((x - y).abs());
        }
        let e = group_compose(&a, &a.inverse()).unwrap();
        ensure(e.coords().iter().all(|v| *v == 0.0), "p ∘ p⁻¹ is not the identity")?;
        let (s, t) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
        let twice = dilate(s, &dilate(t, &a).unwrap()).unwrap();
        let once = dilate(s * t, &a).unwrap();
        for (x, y) in twice.coords().iter().zip(once.coords()) {
            ensure((x - y).abs() <= 1e-12 * (1.0 + y.abs()), "δ_s δ_t ≠ δ_st")?;
        }
        let hom_l = dilate(s, &group_compose(&a, &b).unwrap()).unwrap();
        let hom_r = group_compose(&dilate(s, &a).unwrap(), &dilate(s, &b).unwrap()).unwrap();
        for (x, y) in hom_l.coords().iter().zip(hom_r.coords()) {
            ensure((x - y).abs() <= 1e-11 * (1.0 + y.abs()), "dilation is not a homomorphism")?;
        }
    }
    ensure(worst_assoc <= 1e-12, format!("associativity residual {worst_assoc:e}"))?;
    let mut worst_comm: f64 = 0.0;
    for k in 0..100 {
        let n = 1 + k % 2;
        let u = Polynomial::random(&mut rng, 2 * n + 1, 3);
        let p = random_point(&mut rng, n, 1.0);
        for i in 0..n {
            let r = commutator_check(&NumericOnly(u.clone()), &p, i).map_err(|e| e.to_string())?;
            worst_comm = worst_comm.max(r.abs());
        }
    }
    ensure(worst_comm < 1e-5, format!("commutator residual {worst_comm:e}"))?;
    for _ in 0..1000 {
        let n = rng.gen_range(1..4);
        let v: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let w: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let lv = lambda_apply(&v);
        let lw = lambda_apply(&w);
        let a: f64 = lv.iter().zip(&w).map(|(x, y)| x * y).sum();
        let b: f64 = v.iter().zip(&lw).map(|(x, y)| x * y).sum();
        ensure((a + b).abs() <= 1e-12, "Λ is not skew-symmetric")?;
        let llv = lambda_apply(&lv);
        ensure(llv.iter().zip(&v).all(|(x, y)| *x == -*y), "Λ² ≠ −I")?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!(
        "assoc residual {worst_assoc:.1e}, commutator residual {worst_comm:.1e} on 100 polynomials, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut min_margin_sigma = f64::INFINITY;
    for (n, count) in [(1usize, 100usize), (2, 20)] {
        for k in 0..count {
            let (h, u) = halfspace_config(&mut rng, n);
            let domain: Domain = h.into();
            let r = evaluate_quotient_l2(&u, &domain, &default_quadrature(n, k as u64)).map_err(|e| e.to_string())?;
            ensure(r.holds(), format!("ℍ^{n} config {k}: margin {:e}, σ {:e}", r.margin, r.quotient_error))?;
            if r.quotient_error > 0.0 {
                min_margin_sigma = min_margin_sigma.min(r.margin / r.quotient_error);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    Ok(format!(
        "120 configurations hold, smallest margin/σ {min_margin_sigma:.1}, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = WeightSpec::per_component(2.0).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let n = 1 + k % 2;
        let mut nu = vec![0.0; 2 * n + 1];
        nu[2 * n] = 1.0;
        let domain: Domain = HalfSpace::new(nu, 0.0).unwrap().into();
        let mut c: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let t = rng.gen_range(1e-3..5.0);
        c.push(t);
        let p = pt(c.clone());
        let w = hardy_weight(&domain, &spec, &p).map_err(|e| e.to_string())?;
        let eq1 = c[..2 * n].iter().map(|v| v * v).sum::<f64>() / (t * t);
        worst = worst.max((0.25 * w - eq1).abs() / eq1.max(1e-300));
    }
    ensure(worst <= 1e-12, format!("pointwise relative mismatch {worst:e}"))?;
    let domain: Domain = HalfSpace::new(vec![0.0, 0.0, 1.0], 0.0).unwrap().into();
    let mut min_q = f64::INFINITY;
    for _ in 0..10 {
        let center = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(1.0..3.0)];
        let radii = [rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0), rng.gen_range(0.2..0.9)];
        let u = make_bump(&center, &radii, 1.0);
        let r = evaluate_quotient_l2(&u, &domain, &QuadratureSpec::gauss(24)).map_err(|e| e.to_string())?;
        // ∫|∇u|² / ∫(|x|²+|y|²)/t² u² = 4 × quotient.
        let q1 = 4.0 * r.quotient;
        ensure(q1 >= 1.0 - 12.0 * r.quotient_error, format!("normalized quotient {q1} below 1"))?;
        min_q = min_q.min(q1);
    }
    Ok(format!(
        "weight/4 = (|x|²+|y|²)/t² to {worst:.1e} on 10³ points; smallest normalized quotient {min_q:.3} ≥ 1"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_match: f64 = 0.0;
    for p in [2.0, 2.5, 3.0, 4.0] {
        let spec = WeightSpec::per_component(p).unwrap();
        for k in 0..20 {
            let (h, u) = halfspace_config(&mut rng, 1);
            let domain: Domain = h.into();
            let quad = QuadratureSpec::gauss(24);
            let r = evaluate_quotient(&u, &domain, &spec, &quad).map_err(|e| e.to_string())?;
            ensure(r.holds(), format!("p={p} config {k}: margin {:e}, σ {:e}", r.margin, r.quotient_error))?;
            if p == 2.0 {
                let l2 = evaluate_quotient_l2(&u, &domain, &quad).map_err(|e| e.to_string())?;
                worst_match = worst_match.max((l2.quotient - r.quotient).abs() / r.quotient);
            }
        }
    }
    ensure(worst_match <= 1e-10, format!("generic vs L² path differ by {worst_match:e}"))?;
    Ok(format!("80 configurations hold; p=2 generic vs L² path agree to {worst_match:.1e}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let random = loop {
        let p = Polytope::random(&mut rng, &[0.0, 0.0, 0.0], 6);
        if p.is_bounded() {
            break p;
        }
    };
    let polys = [("cube", Polytope::unit_cube(1)), ("simplex", Polytope::simplex(1)), ("random-6", random)];
    let mut audited = 0usize;
    for (name, poly) in &polys {
        let domain: Domain = poly.clone().into();
        for p in [2.0, 3.0] {
            let spec = WeightSpec::per_component(p).unwrap();
            for k in 0..20 {
                let u = polytope_bump(&mut rng, poly);
                let quad = QuadratureSpec::monte_carlo(200_000, 1000 + k);
                let r = evaluate_quotient(&u, &domain, &spec, &quad).map_err(|e| e.to_string())?;
                ensure(r.holds(), format!("{name} p={p} bump {k}: margin {:e}, σ {:e}", r.margin, r.quotient_error))?;
            }
            let audit = polytope_interface_audit_total(poly, p, 10_000, 7).map_err(|e| e.to_string())?;
            ensure(audit.total_samples >= 10_000, format!("{name}: only {} interface points", audit.total_samples))?;
            ensure(audit.negative_samples == 0, format!("{name} p={p}: {} negative samples", audit.negative_samples))?;
            ensure(
                audit.interfaces.iter().all(|i| i.max_consistency_error < 1e-12),
                format!("{name}: interface integrand assemblies disagree"),
            )?;
            audited += audit.total_samples;
        }
    }
    Ok(format!(
        "120 polytope bumps hold; 0 negative integrand samples over {audited} interface points, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_6() -> Outcome {
    let opts = SharpnessOptions::default();
    let start = Instant::now();
    let l2 = run_l2_sharpness(&default_l2_schedule(), &opts).map_err(|e| e.to_string())?;
    let t2 = start.elapsed();
    ensure(t2 < Duration::from_secs(600), format!("L² run took {t2:?}"))?;
    ensure(l2.strictly_decreasing(), format!("L² quotients not strictly decreasing: {:?}", l2.quotients))?;
    ensure(l2.final_quotient() <= 0.25 * 1.05, format!("L² final {}", l2.final_quotient()))?;
    ensure(l2.respects_floor(), "L² quotient below the sharp constant")?;
    let start = Instant::now();
    let lp = run_lp_sharpness(3.0, &default_lp_schedule(3.0), &opts).map_err(|e| e.to_string())?;
    let t3 = start.elapsed();
    ensure(t3 < Duration::from_secs(900), format!("Lᵖ run took {t3:?}"))?;
    ensure(lp.final_quotient() <= 8.0 / 27.0 * 1.10, format!("Lᵖ final {}", lp.final_quotient()))?;
    ensure(lp.respects_floor(), "Lᵖ quotient below the sharp constant")?;
    Ok(format!(
        "L² final {:.5} ≤ {:.5} strictly decreasing ({:.1}s); L³ final {:.5} ≤ {:.5} ({:.1}s)",
        l2.final_quotient(),
        0.25 * 1.05,
        t2.as_secs_f64(),
        lp.final_quotient(),
        8.0 / 27.0 * 1.10,
        t3.as_secs_f64()
    ))
}

fn criterion_7() -> Outcome {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = cc_distance(&Point::identity(1), &pt(vec![3.0, 4.0, 0.0]), &cfg).map_err(|e| e.to_string())?;
    ensure((4.997..=5.003).contains(&d.distance), format!("cc(0,(3,4,0)) = {}", d.distance))?;
    let mut worst_inv: f64 = 0.0;
    for _ in 0..10 {
        let (g, p, q) = (random_point(&mut rng, 1, 1.0), random_point(&mut rng, 1, 1.0), random_point(&mut rng, 1, 1.0));
        let a = cc_distance(&p, &q, &cfg).map_err(|e| e.to_string())?;
        let gp = group_compose(&g, &p).unwrap();
        let gq = group_compose(&g, &q).unwrap();
        let b = cc_distance(&gp, &gq, &cfg).map_err(|e| e.to_string())?;
        worst_inv = worst_inv.max((a.distance - b.distance).abs());
    }
    ensure(worst_inv <= 2e-3, format!("left-invariance defect {worst_inv:e}"))?;
    let mut worst_id: f64 = 0.0;
    let mut done = 0;
    while done < 20 {
        let nu = random_unit(&mut rng, 3);
        if nu[2].abs() < 0.2 {
            continue;
        }
        let h = HalfSpace::new(nu, rng.gen_range(-1.0..1.0)).unwrap();
        let xi = random_point(&mut rng, 1, 1.5);
        let r = weight_identity_check(&h, &xi, &cfg).map_err(|e| e.to_string())?;
        worst_id = worst_id.max(r.residual);
        done += 1;
    }
    ensure(worst_id < 5e-3, format!("weight identity residual {worst_id:e}"))?;
    let region = AxisBox::new(vec![-1.0; 3], vec![1.0; 3]);
    let b = bilipschitz_scan(200, &region, &cfg);
    ensure(
        b.min_ratio > 0.0 && b.max_ratio.is_finite() && b.min_ratio <= b.max_ratio,
        format!("bi-Lipschitz interval [{}, {}]", b.min_ratio, b.max_ratio),
    )?;
    Ok(format!(
        "cc(0,(3,4,0)) = {:.5}; invariance defect {worst_inv:.1e}; identity residual {worst_id:.1e}; cc/K ∈ [{:.3}, {:.3}]",
        d.distance, b.min_ratio, b.max_ratio
    ))
}

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    })
}

fn prop(name: &str, r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

/// Maximum of `C(·, p)` by successively refined grids.
fn grid_max(p: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (-2.0, 1.0);
    let mut best = (0.0, f64::NEG_INFINITY);
    for _ in 0..8 {
        let h = (hi - lo) / 40.0;
        for k in 0..=40 {
            let a = lo + k as f64 * h;
            let c = c_alpha(a, p);
            if c > best.1 {
                best = (a, c);
            }
        }
        lo = best.0 - h;
        hi = best.0 + h;
    }
    best
}

fn criterion_8() -> Outcome {
    prop(
        "superadditivity",
        runner().run(
            &(prop::collection::vec(-1.0..1.0f64, 2..7), 2.0..6.0f64),
            |(v, p)| {
                let n = v.len() / 2;
                let hv = HorizontalVector {
                    a: v[..n].to_vec(),
                    b: v[n..2 * n].to_vec(),
                };
                prop_assert!(superadditivity_gap(&hv, p).unwrap() >= -1e-12);
                Ok(())
            },
        ),
    )?;
    prop(
        "jensen",
        runner().run(
            &(prop::collection::vec((0.0..10.0f64, 0.01..10.0f64), 1..7), 1.0..5.0f64),
            |(xa, alpha)| {
                let (x, a): (Vec<f64>, Vec<f64>) = xa.into_iter().unzip();
                let j = jensen_split(&x, &a, alpha).unwrap();
                let target = x.iter().sum::<f64>().powf(alpha);
                prop_assert!(j.bound >= target * (1.0 - 1e-12), "{} < {}", j.bound, target);
                Ok(())
            },
        ),
    )?;
    prop(
        "boundary sign",
        runner().run(&(0.0..10.0f64, 0.0..10.0f64, 2.0..8.0f64), |(a, b, p)| {
            prop_assert!(boundary_sign_terms(a, b, p).unwrap() >= -1e-12);
            Ok(())
        }),
    )?;
    let mut worst: f64 = 0.0;
    prop(
        "optimal alpha",
        runner().run(&(2.0..10.0f64), |p| {
            let (alpha, c) = optimal_alpha(p).unwrap();
            let (ga, gc) = grid_max(p);
            prop_assert!((c - gc).abs() <= 1e-8, "value {c} vs grid {gc}");
            prop_assert!(gc <= c + 1e-14, "grid beats the optimum");
            prop_assert!((alpha - ga).abs() <= 1e-4);
            Ok(())
        }),
    )?;
    for p in [2.0, 3.0, 7.5] {
        let (_, c) = optimal_alpha(p).unwrap();
        worst = worst.max((c - grid_max(p).1).abs());
    }
    ensure(c_alpha(-0.5, 2.0) == 0.25, "C(−1/2, 2) ≠ 1/4")?;
    Ok(format!(
        "4 × 10⁴ property cases pass; optimal α within {worst:.1e} of grid maximum; C(−1/2, 2) = 1/4 exactly"
    ))
}

fn run_cli(args: &[String], threads: &str, dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hhardy"))
        .args(args)
        .current_dir(dir)
        .env("HHARDY_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        format!("hhardy {args:?} exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cases: [(&str, &[&str]); 7] = [
        ("verify --domain halfspace --nu 0,0.6,0.8 --p 3", &[]),
        ("verify --domain halfspace --nu 0,0,0,0,1 --seed 5", &[]),
        ("verify --domain cube --p 3 --seed 11", &[]),
        ("sharpness --p 2", &["csv"]),
        ("sharpness --conjecture --p 3 --budget 31 --seed 4", &[]),
        ("distance --from 0.1,-0.3,0.2 --to 1,0.5,-0.7", &["path-csv"]),
        ("distance --identity-check --nu 0,1,1 --xi 1,1,1", &[]),
    ];
    let runs = [("1", dir.path().join("a")), ("2", dir.path().join("b"))];
    let mut compared = 0;
    for (k, (cmd, extras)) in cases.iter().enumerate() {
        let mut args: Vec<String> = cmd.split_whitespace().map(String::from).collect();
        let mut files = vec![format!("case{k}.json")];
        args.extend(["--out".into(), files[0].clone()]);
        for e in extras.iter() {
            let f = format!("case{k}.{e}");
            args.extend([format!("--{e}"), f.clone()]);
            files.push(f);
        }
        for (threads, run_dir) in &runs {
            std::fs::create_dir_all(run_dir).map_err(|e| e.to_string())?;
            run_cli(&args, threads, run_dir)?;
        }
        for f in &files {
            let read = |d: &Path| std::fs::read(d.join(f)).map_err(|e| format!("{f}: {e}"));
            let (x, y) = (read(&runs[0].1)?, read(&runs[1].1)?);
            ensure(x == y, format!("hhardy {cmd}: {f} differs between runs"))?;
            ensure(String::from_utf8_lossy(&x).contains("seed"), format!("{f} does not record the seed"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} report files byte-identical across repeated runs with 1 and 2 threads"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("algebraic core", criterion_1),
        ("half-space L² inequality", criterion_2),
        ("vertical half-space weight", criterion_3),
        ("Lᵖ half-space inequality", criterion_4),
        ("convex polytopes", criterion_5),
        ("sharpness", criterion_6),
        ("metric identities", criterion_7),
        ("proof-side lemmas", criterion_8),
        ("determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = (k + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("acceptance {id} PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("acceptance {id} FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

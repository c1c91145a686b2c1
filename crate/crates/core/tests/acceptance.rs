//! Acceptance suite: one test per criterion. Each test prints its measured
//! values (visible with `--nocapture`) before asserting.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hardy_cert::blockdiag::{build_global_model, isometry_extract, mixture_behavior, BlockModel};
use hardy_cert::envelope::{
    analyze, build_cover, maximize, sweep_union, GridSpec, Objective, Surface, DEFAULT_ETA,
};
use hardy_cert::hardy::{
    angles_from_point, check_hardy_form, hardy_behavior, hardy_state, is_local,
    max_hardy_probability, HardyPoint, GOLDEN,
};
use hardy_cert::qcore::behavior_from_model;
use hardy_cert::selftest::{certify, reconstruct_behavior};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(start: Instant, limit: Duration) -> (bool, f64) {
    let t = start.elapsed();
    (t < limit, t.as_secs_f64())
}

fn maximal_violation() -> Outcome {
    let start = Instant::now();
    let f = Objective::omega_star();
    let m = maximize(&f, GridSpec::new(201, 0.005).unwrap()).unwrap();
    let dp = (m.value - max_hardy_probability()).abs();
    let dr = (m.r - GOLDEN).abs().max((m.s - GOLDEN).abs());
    let (fast, secs) = within(start, Duration::from_secs(5));
    outcome(
        dp <= 1e-6 && dr <= 1e-6 && fast,
        format!("p_max={:.10} at ({:.8}, {:.8}); |dp|={dp:.1e} |d(r,s)|={dr:.1e}; {secs:.2}s", m.value, m.r, m.s),
    )
}

fn closed_form_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (r, s) = (rng.random_range(1e-6..1.0 - 1e-6), rng.random_range(1e-6..1.0 - 1e-6));
        let (phi, xi) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
        let pt = HardyPoint::new(r, s).unwrap();
        let closed = hardy_behavior(pt).unwrap();
        let psi = hardy_state(pt, phi, xi).unwrap();
        let (alice, bob) = angles_from_point(pt, phi, xi).unwrap().observables().unwrap();
        let born = behavior_from_model(&psi.projector(), &alice, &bob).unwrap();
        worst = worst.max(closed.max_abs_diff(&born));
    }
    let (fast, secs) = within(start, Duration::from_secs(30));
    outcome(worst <= 1e-12 && fast, format!("max entrywise difference {worst:.2e} over 1000 points; {secs:.2}s"))
}

fn cover_contact() -> Outcome {
    let grid = GridSpec::new(201, 0.005).unwrap();
    let f = Objective::omega_star();
    let cover = build_cover(&f, grid).unwrap();
    let contact = cover.eval(GOLDEN, GOLDEN) - f.value(GOLDEN, GOLDEN);
    let a = analyze(&f, grid, grid.default_eps(), DEFAULT_ETA).unwrap();
    let (i, j) = grid.nearest(GOLDEN, GOLDEN);
    let contains_g = a.region.get(i, j);
    let component = a.equality.component(i, j);
    let connected = component.count() == a.equality.count();
    let interior_flagged =
        (0..grid.len()).filter(|&k| a.flagged.mask[k] && !grid.is_edge(k / grid.n, k % grid.n)).count();
    let flagged_frac = interior_flagged as f64 / a.equality.count() as f64;
    outcome(
        contact <= 1e-6 && !a.equality.is_empty() && contains_g && connected && flagged_frac <= 0.01,
        format!(
            "cover-f at g = {contact:.2e}; |R*| = {}, connected = {connected}, contains g = {contains_g}; \
             {interior_flagged} interior points fail strict concavity ({:.2}%)",
            a.equality.count(),
            100.0 * flagged_frac
        ),
    )
}

fn coverage_sweep() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::new(101, 0.02).unwrap();
    let cov: Vec<f64> = [2, 5, 10, 100]
        .iter()
        .map(|&n| sweep_union(n, grid, grid.default_eps(), DEFAULT_ETA).unwrap().coverage())
        .collect();
    let increasing = cov.windows(2).all(|w| w[1] > w[0]);
    let (fast, secs) = within(start, Duration::from_secs(600));
    outcome(
        increasing && cov[3] >= 0.95 && fast,
        format!("coverage N=2,5,10,100: {:.4} {:.4} {:.4} {:.4}; {secs:.2}s", cov[0], cov[1], cov[2], cov[3]),
    )
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -rng.random_range(1e-12f64..1.0).ln()).collect();
    let total: f64 = w.iter().sum();
    let spare = 1.0 - floor * n as f64;
    let mut mu: Vec<f64> = w.iter().map(|x| floor + spare * x / total).collect();
    let err: f64 = mu.iter().sum::<f64>() - 1.0;
    mu[0] -= err;
    mu
}

fn random_shape(rng: &mut ChaCha8Rng, min_blocks: usize) -> (usize, usize) {
    loop {
        let (a, b) = (rng.random_range(1..=3), rng.random_range(1..=3));
        if a * b >= min_blocks {
            return (a, b);
        }
    }
}

fn separated_model(rng: &mut ChaCha8Rng) -> BlockModel {
    loop {
        let (n_a, n_b) = random_shape(rng, 2);
        let alpha: Vec<f64> = (0..n_a).map(|_| rng.random_range(0.05 * PI..0.95 * PI)).collect();
        let beta: Vec<f64> = (0..n_b).map(|_| rng.random_range(0.05 * PI..0.95 * PI)).collect();
        let mu = random_weights(rng, n_a * n_b, 0.1);
        let Ok(m) = BlockModel::from_angles(&alpha, &beta, &mu, 0.0, 0.0) else { continue };
        let pts: Vec<HardyPoint> = m.blocks().iter().map(|b| b.point).collect();
        let separated = pts.iter().enumerate().all(|(k, p)| {
            pts[k + 1..].iter().all(|q| (p.r - q.r).abs().max((p.s - q.s).abs()) >= 0.05)
        });
        if separated && pts.iter().all(|p| p.is_interior()) {
            return m;
        }
    }
}

fn common_model(rng: &mut ChaCha8Rng, lo: f64) -> BlockModel {
    let (n_a, n_b) = random_shape(rng, 1);
    let pt = HardyPoint::new(rng.random_range(lo..1.0 - lo), rng.random_range(lo..1.0 - lo)).unwrap();
    let mu = random_weights(rng, n_a * n_b, 0.0);
    let (phi, xi) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
    BlockModel::common_point(pt, n_a, n_b, &mu, phi, xi).unwrap()
}

fn rigidity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut min_sep_residual = f64::INFINITY;
    let mut sep_fail = 0;
    for _ in 0..500 {
        let m = separated_model(&mut rng);
        let rep = check_hardy_form(&mixture_behavior(&m).unwrap(), 1e-5);
        min_sep_residual = min_sep_residual.min(rep.residual);
        if rep.pass || rep.residual <= 1e-5 {
            sep_fail += 1;
        }
    }
    let mut max_common_residual: f64 = 0.0;
    for _ in 0..500 {
        let m = common_model(&mut rng, 1e-3);
        let rep = check_hardy_form(&mixture_behavior(&m).unwrap(), 1e-12);
        max_common_residual = max_common_residual.max(rep.residual);
    }
    let (fast, secs) = within(start, Duration::from_secs(60));
    outcome(
        sep_fail == 0 && max_common_residual < 1e-12 && fast,
        format!(
            "separated: {sep_fail}/500 not rejected, min residual {min_sep_residual:.2e}; \
             common: max residual {max_common_residual:.1e}; {secs:.2}s"
        ),
    )
}

fn isometry_extraction() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut min_fid: f64 = 1.0;
    let mut max_diff: f64 = 0.0;
    let mut uncertified = 0;
    for _ in 0..100 {
        let m = common_model(&mut rng, 0.01);
        let e = isometry_extract(&m).unwrap();
        min_fid = min_fid.min(e.fidelity);
        let pre = build_global_model(&m).unwrap().behavior().unwrap();
        let cert = certify(&pre);
        match reconstruct_behavior(&cert).unwrap() {
            Some(post) if cert.is_certified() => max_diff = max_diff.max(pre.max_abs_diff(&post)),
            _ => uncertified += 1,
        }
    }
    let (fast, secs) = within(start, Duration::from_secs(60));
    outcome(
        min_fid >= 1.0 - 1e-10 && max_diff <= 1e-12 && uncertified == 0 && fast,
        format!(
            "min fidelity 1-{:.1e}; max reconstruction difference {max_diff:.1e}; \
             {uncertified} uncertified; {secs:.2}s",
            1.0 - min_fid
        ),
    )
}

fn nonlocality_oracle() -> Outcome {
    let start = Instant::now();
    let mut min_chsh = f64::INFINITY;
    let mut bad_interior = 0;
    for i in 1..100 {
        for j in 1..100 {
            let b = hardy_behavior(HardyPoint::new(i as f64 / 100.0, j as f64 / 100.0).unwrap()).unwrap();
            let c = certify(&b);
            match c.chsh_max {
                Some(v) if c.is_certified() && v > 2.0 => min_chsh = min_chsh.min(v),
                _ => bad_interior += 1,
            }
        }
    }
    let half = certify(&hardy_behavior(HardyPoint::new(0.5, 0.5).unwrap()).unwrap());
    let half_ok = (half.chsh_max.unwrap_or(0.0) - 7.0 / 3.0).abs() < 1e-12;
    let mut nonlocal_boundary = 0;
    for k in 1..100 {
        let t = k as f64 / 100.0;
        for (r, s) in [(0.0, t), (1.0, t), (t, 0.0), (t, 1.0)] {
            let b = hardy_behavior(HardyPoint::new(r, s).unwrap()).unwrap();
            if !is_local(&b).unwrap().local {
                nonlocal_boundary += 1;
            }
        }
    }
    let (fast, secs) = within(start, Duration::from_secs(60));
    outcome(
        bad_interior == 0 && half_ok && nonlocal_boundary == 0 && fast,
        format!(
            "interior: {bad_interior}/9801 failed, min CHSH {min_chsh:.6}; CHSH(0.5,0.5) = 7/3: {half_ok}; \
             boundary: {nonlocal_boundary}/396 nonlocal; {secs:.2}s"
        ),
    )
}

fn check(name: &str, o: Outcome) {
    println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    assert!(o.pass, "criterion {name} failed: {}", o.detail);
}

#[test]
fn criterion_1_maximal_hardy_violation() {
    check("1", maximal_violation());
}

#[test]
fn criterion_2_closed_form_matches_born_rule() {
    check("2", closed_form_equivalence());
}

#[test]
fn criterion_3_cover_contact_at_the_maximum() {
    check("3", cover_contact());
}

#[test]
fn criterion_4_coverage_sweep() {
    check("4", coverage_sweep());
}

#[test]
fn criterion_5_rigidity_of_block_mixtures() {
    check("5", rigidity());
}

#[test]
fn criterion_6_isometry_extraction() {
    check("6", isometry_extraction());
}

#[test]
fn criterion_7_nonlocality_oracle() {
    check("7", nonlocality_oracle());
}

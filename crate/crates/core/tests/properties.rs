use hardy_cert::blockdiag::{mixture_behavior, BlockEntry, BlockModel};
use hardy_cert::envelope::{
    build_cover, eval_nu, sample, sweep_union, GridSpec, NuObjective, Objective, Surface, DEFAULT_ETA,
};
use hardy_cert::hardy::{check_hardy_form, hardy_behavior, Behavior, HardyPoint};
use hardy_cert::io::{behavior_from_csv, behavior_from_json, behavior_to_csv, behavior_to_json};
use hardy_cert::selftest::{certificate_roundtrip_check, certify, Verdict};
use proptest::prelude::*;

fn interior() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certify_recovers_interior_points(r in interior(), s in interior()) {
        let c = certify(&hardy_behavior(HardyPoint::new(r, s).unwrap()).unwrap());
        prop_assert_eq!(c.verdict, Verdict::Certified);
        let pt = c.point.unwrap();
        prop_assert!((pt.r - r).abs() < 1e-9 && (pt.s - s).abs() < 1e-9);
        prop_assert!(c.chsh_max.unwrap() > 2.0);
        prop_assert!(certificate_roundtrip_check(&c));
    }

    #[test]
    fn certify_rejects_two_point_mixtures(
        r1 in interior(), s1 in interior(), r2 in interior(), s2 in interior(), w in 0.1f64..0.9,
    ) {
        prop_assume!((r1 - r2).abs().max((s1 - s2).abs()) > 0.05);
        let model = BlockModel::from_blocks(
            &[
                BlockEntry { i: 0, j: 0, mu: w, r: r1, s: s1 },
                BlockEntry { i: 1, j: 1, mu: 1.0 - w, r: r2, s: s2 },
            ],
            0.0,
            0.0,
        )
        .unwrap();
        let mix = mixture_behavior(&model).unwrap();
        prop_assert!(!check_hardy_form(&mix, 1e-9).pass);
        prop_assert_ne!(certify(&mix).verdict, Verdict::Certified);
    }

    #[test]
    fn objective_is_linear_on_mixtures(
        r1 in interior(), s1 in interior(), r2 in interior(), s2 in interior(), w in 0.0f64..1.0, nu in 0.0f64..1.0,
    ) {
        let f = NuObjective::new(nu).unwrap().to_objective();
        let a = hardy_behavior(HardyPoint::new(r1, s1).unwrap()).unwrap();
        let b = hardy_behavior(HardyPoint::new(r2, s2).unwrap()).unwrap();
        let mix = Behavior::mixture(&[(w, a), (1.0 - w, b)]);
        let lhs = f.on_behavior(&mix);
        let rhs = w * f.on_behavior(&a) + (1.0 - w) * f.on_behavior(&b);
        prop_assert!((lhs - rhs).abs() < 1e-14);
        prop_assert!((f.on_behavior(&a) - eval_nu(&NuObjective::new(nu).unwrap(), HardyPoint::new(r1, s1).unwrap()).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn behavior_files_roundtrip(r in 0.0f64..1.0, s in 0.0f64..0.999) {
        let b = hardy_behavior(HardyPoint::new(r, s).unwrap()).unwrap();
        prop_assert_eq!(behavior_from_json(&behavior_to_json(&b).unwrap()).unwrap(), b);
        prop_assert_eq!(behavior_from_csv(&behavior_to_csv(&b)).unwrap(), b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cover_dominates_and_is_concave(
        nu in 0.05f64..0.95,
        pts in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 50),
    ) {
        let grid = GridSpec::new(31, 0.02).unwrap();
        let f = NuObjective::new(nu).unwrap();
        let cover = build_cover(&f, grid).unwrap();
        let z = sample(&f, &grid).unwrap();
        for (k, zk) in z.iter().enumerate() {
            prop_assert!(cover.grid_values()[k] >= zk - 1e-12);
        }
        let lo = grid.coord(0);
        let span = grid.coord(grid.n - 1) - lo;
        for (a, b, c, d, t) in pts {
            let (p, q) = ((lo + a * span, lo + b * span), (lo + c * span, lo + d * span));
            let m = (t * p.0 + (1.0 - t) * q.0, t * p.1 + (1.0 - t) * q.1);
            let jensen = t * cover.eval(p.0, p.1) + (1.0 - t) * cover.eval(q.0, q.1);
            prop_assert!(cover.eval(m.0, m.1) >= jensen - 1e-12);
        }
    }

    #[test]
    fn cover_is_exact_on_concave_surfaces(a in 0.1f64..2.0, b in 0.1f64..2.0, c in -1.0f64..1.0) {
        let grid = GridSpec::new(21, 0.05).unwrap();
        let f = hardy_cert::envelope::FnSurface(move |r: f64, s: f64| -a * r * r - b * s * s + c * r + 0.5 * s);
        let cover = build_cover(&f, grid).unwrap();
        for k in 0..grid.len() {
            let (r, s) = grid.point(k);
            prop_assert!((cover.eval(r, s) - f.value(r, s)).abs() < 1e-10);
        }
    }
}

#[test]
fn sweep_union_grows_when_n_doubles() {
    let grid = GridSpec::new(41, 0.02).unwrap();
    let eps = grid.default_eps();
    for n in [2, 3, 5] {
        let coarse = sweep_union(n, grid, eps, DEFAULT_ETA).unwrap();
        let fine = sweep_union(2 * n, grid, eps, DEFAULT_ETA).unwrap();
        assert!(coarse.union.minus(&fine.union).unwrap().is_empty(), "N={n} not contained in N={}", 2 * n);
        assert!(fine.coverage() >= coarse.coverage());
    }
}

#[test]
fn omega_star_is_the_hardy_entry() {
    let f = Objective::omega_star();
    for &(r, s) in &[(0.1, 0.2), (0.5, 0.5), (0.9, 0.3)] {
        let pt = HardyPoint::new(r, s).unwrap();
        let want = r * (1.0 - r) * s * (1.0 - s) / (1.0 - r * s);
        assert!((f.value(r, s) - want).abs() < 1e-15);
        assert!((f.on_behavior(&hardy_behavior(pt).unwrap()) - want).abs() < 1e-15);
    }
}

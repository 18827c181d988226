use num_complex::Complex64;
use proptest::prelude::*;

use atgeo::asymptotic::{az_norm_sandwich, binary_variation_check, check_fundamental_inequalities, DEFAULT_T_SCHEDULE};
use atgeo::beltrami::cellwise_combo_bound;
use atgeo::geodesic::{
    certify_distance, distinctness_gap, family_closed_loop, family_nonsubstantial, family_substantial_example, patch_arc, GeodesicFamily,
    SigmaProfile, TwistLayout,
};
use atgeo::metric::{hyperbolic_distance, lemma_dist_F, mobius_difference, DilatationValue, HyperbolicParam};
use atgeo::quad::{DegeneratingFamily, Parity};
use atgeo::reich::{build_kappa, build_modulated, build_schedule, ReichSchedule};
use atgeo::report::{Content, Document};

fn schedule(k: f64) -> ReichSchedule {
    build_schedule(DilatationValue::new(k).unwrap(), 8).unwrap()
}

fn ramp(s: &ReichSchedule, lambda: f64, alpha: f64) -> GeodesicFamily {
    let k = s.k.get();
    family_substantial_example(s, 8, SigmaProfile::lambda_ramp(lambda, 0.4 * k, k).unwrap(), alpha).unwrap()
}

fn d_h(a: f64, b: f64) -> f64 {
    hyperbolic_distance(HyperbolicParam::new(a).unwrap(), HyperbolicParam::new(b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_is_monotone_in_k(r1 in 0.0..2.0f64, a1 in 0.0..6.3f64, r2 in 0.0..2.0f64, a2 in 0.0..6.3f64, u in 0.001..0.999f64, v in 0.001..1.0f64) {
        let (t1, t2) = (Complex64::from_polar(r1, a1), Complex64::from_polar(r2, a2));
        let k2 = u * (1.0 / (t1 * t2).norm().sqrt()).min(10.0);
        let k1 = v * k2;
        prop_assert!(lemma_dist_F(t1, t2, k1).unwrap() <= lemma_dist_F(t1, t2, k2).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn built_schedules_satisfy_the_inequalities(k in 0.05..0.95f64, depth in 1usize..=12) {
        let s = build_schedule(DilatationValue::new(k).unwrap(), depth).unwrap();
        prop_assert!(s.verify_fs_inequalities().all_pass());
    }

    #[test]
    fn ramp_upper_bound_is_sound(lambda in 0.05..0.6f64, alpha in 0.1..0.6f64, s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let sch = schedule(0.5);
        let f = ramp(&sch, lambda, alpha);
        let (s, t) = (0.5 * s, 0.5 * t);
        let bound = cellwise_combo_bound(&f.eval(s).unwrap(), &f.eval(t).unwrap()).unwrap();
        prop_assert!(bound <= mobius_difference(s, t).unwrap().abs() + 1e-12);
    }

    #[test]
    fn patch_upper_bound_is_sound(alpha in 0.05..0.8f64, t0 in 0.05..0.45f64, s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let sch = schedule(0.5);
        let layout = TwistLayout::new(sch, 8, Some(patch_arc(1.0, 0.5).unwrap())).unwrap();
        let Ok(f) = family_nonsubstantial(layout, SigmaProfile::tent(alpha, t0, 0.5).unwrap(), 0.5, 0.25, 0.1) else {
            return Ok(());
        };
        let (s, t) = (0.5 * s, 0.5 * t);
        let bound = cellwise_combo_bound(&f.eval(s).unwrap(), &f.eval(t).unwrap()).unwrap();
        prop_assert!(bound <= mobius_difference(s, t).unwrap().abs() + 1e-12);
    }

    #[test]
    fn intervals_are_ordered(a1 in 0.0..1.5f64, b1 in 0.0..1.5f64, a2 in 0.0..1.5f64, b2 in 0.0..1.5f64) {
        let sch = schedule(0.5);
        let (x, y) = (build_modulated(&sch, a1, b1).unwrap(), build_modulated(&sch, a2, b2).unwrap());
        let fams = [DegeneratingFamily::monomials(&sch, Parity::Odd), DegeneratingFamily::monomials(&sch, Parity::Even)];
        let iv = certify_distance(&x, &y, &fams, 6, 1e-9).unwrap();
        prop_assert!(iv.lower <= iv.upper);
    }

    #[test]
    fn ramp_distances_add_along_the_geodesic(lambda in 0.05..0.6f64, a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let sch = schedule(0.5);
        let f = ramp(&sch, lambda, 0.5);
        let mut p = [0.5 * a, 0.5 * b, 0.5 * c];
        p.sort_by(f64::total_cmp);
        let fams = f.certifiers();
        let d = |x: f64, y: f64| certify_distance(&f.eval(x).unwrap(), &f.eval(y).unwrap(), &fams, 6, 1e-9).unwrap();
        let (tu, us, ts) = (d(p[0], p[1]), d(p[1], p[2]), d(p[0], p[2]));
        prop_assert!(tu.is_certified() && us.is_certified() && ts.is_certified());
        prop_assert!((tu.upper + us.upper - ts.upper).abs() <= 1e-6);
        prop_assert!((ts.upper - d_h(p[0], p[2])).abs() <= 1e-12);
    }

    #[test]
    fn ramp_gap_is_the_scaled_slope_difference(l1 in 0.05..0.6f64, l2 in 0.05..0.6f64, alpha in 0.1..0.6f64) {
        let sch = schedule(0.5);
        let odd = DegeneratingFamily::monomials(&sch, Parity::Odd);
        let gap = distinctness_gap(&ramp(&sch, l1, alpha), &ramp(&sch, l2, alpha), 0.1, &odd).unwrap();
        prop_assert!((gap - alpha * (l1 - l2).abs()).abs() <= 1e-12);
    }

    #[test]
    fn tangent_norm_is_subadditive(a1 in -1.5..1.5f64, b1 in -1.5..1.5f64, a2 in -1.5..1.5f64, b2 in -1.5..1.5f64) {
        let sch = schedule(0.5);
        let fams = [DegeneratingFamily::monomials(&sch, Parity::All)];
        let x = build_modulated(&sch, a1.abs(), b1.abs()).unwrap().scale(Complex64::new(a1.signum(), 0.0));
        let y = build_modulated(&sch, a2.abs(), b2.abs()).unwrap().scale(Complex64::new(b2.signum(), 0.0));
        let sum = az_norm_sandwich(&x.add(&y).unwrap(), &fams, 6, 1e-12).unwrap();
        let (nx, ny) = (az_norm_sandwich(&x, &fams, 6, 1e-12).unwrap(), az_norm_sandwich(&y, &fams, 6, 1e-12).unwrap());
        prop_assert!(sum.upper <= nx.upper + ny.upper + 1e-15);
    }

    #[test]
    fn tangent_norm_is_homogeneous(a in 0.0..1.5f64, b in 0.0..1.5f64, c in -3.0..3.0f64) {
        let sch = schedule(0.5);
        let fams = [DegeneratingFamily::monomials(&sch, Parity::All)];
        let x = build_modulated(&sch, a, b).unwrap();
        let one = az_norm_sandwich(&x, &fams, 6, 1e-12).unwrap();
        let scaled = az_norm_sandwich(&x.scale(Complex64::new(c, 0.0)), &fams, 6, 1e-12).unwrap();
        prop_assert!((scaled.lower - c.abs() * one.lower).abs() <= 1e-15 * (1.0 + scaled.lower));
        prop_assert!((scaled.upper - c.abs() * one.upper).abs() <= 1e-15 * (1.0 + scaled.upper));
    }

    #[test]
    fn fundamental_margins_hold(a in 0.0..1.9f64, b in 0.0..1.9f64, t in 0.01..0.99f64) {
        let sch = schedule(0.5);
        let spec = build_modulated(&sch, a, b).unwrap().scale(Complex64::new(t, 0.0));
        for parity in [Parity::All, Parity::Odd, Parity::Even] {
            let r = check_fundamental_inequalities(&spec, &DegeneratingFamily::monomials(&sch, parity), 6, 1e-12).unwrap();
            if r.certified {
                prop_assert!(r.margin_upper >= -1e-9 && r.margin_lower >= -1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn variation_residuals_decrease(lambda in 0.0..0.9f64, k in 0.2..0.9f64) {
        let sch = schedule(k);
        let r = binary_variation_check(
            &build_kappa(&sch).unwrap(),
            &build_modulated(&sch, lambda, 1.0).unwrap(),
            &DEFAULT_T_SCHEDULE,
            &DegeneratingFamily::monomials(&sch, Parity::Odd),
            5e-3,
        ).unwrap();
        prop_assert!(r.decreasing, "{r:?}");
    }

    #[test]
    fn family_documents_round_trip(lambda in 0.05..0.6f64, alpha in 0.1..0.6f64) {
        let f = ramp(&schedule(0.5), lambda, alpha);
        let doc = Document::new(Content::Family(f));
        prop_assert_eq!(Document::from_json(&doc.to_json()).unwrap(), doc);
    }
}

#[test]
fn loop_edges_meet_the_bound_with_equality() {
    let sch = schedule(0.5);
    for e in family_closed_loop(&sch, 8).unwrap() {
        for (s, t) in [(0.0, 0.5), (0.1, 0.4), (0.2, 0.25)] {
            let bound = cellwise_combo_bound(&e.eval(s).unwrap(), &e.eval(t).unwrap()).unwrap();
            assert!((bound - mobius_difference(t, s).unwrap()).abs() <= 1e-12);
        }
    }
}

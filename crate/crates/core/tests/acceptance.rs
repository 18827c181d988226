//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::panic;
use std::time::Instant;

use num_complex::Complex64;

use atgeo::asymptotic::{binary_variation_check, certify_az_geodesic, check_fundamental_inequalities, DEFAULT_T_SCHEDULE};
use atgeo::beltrami::{combo_bounds, combo_spec};
use atgeo::certify::Status;
use atgeo::geodesic::{
    certify_distance, certify_geodesic, check_sigma_admissible, default_grid, distinctness_gap, family_closed_loop, family_infinitesimal,
    family_straight_line, family_substantial_example, patch_arc, substantial_propagation_check, GeodesicFamily, SigmaClass, SigmaProfile,
    TwistLayout, DEFAULT_GRID,
};
use atgeo::geometry::{BoundaryPoint, Radius};
use atgeo::metric::{hyperbolic_distance, DilatationValue, HyperbolicParam};
use atgeo::report::lemma_monotonicity_suite;
use atgeo::quad::{pair, pairing_limsup, DegeneratingFamily, Parity, DEFAULT_TOL};
use atgeo::reich::{build_etas, build_kappa, build_modulated, build_schedule, ReichSchedule};

const K: f64 = 0.5;
const DEPTH: usize = 8;
/// Odd-annulus factor of the ramp family's endpoint.
const RAMP_ALPHA: f64 = 0.5;
const RAMP_T0: f64 = 0.2;

fn schedule() -> ReichSchedule {
    build_schedule(DilatationValue::new(K).unwrap(), DEPTH).unwrap()
}

fn hp(t: f64) -> HyperbolicParam {
    HyperbolicParam::new(t).unwrap()
}

type Outcome = (bool, String);

fn schedule_validity() -> Outcome {
    let s = schedule();
    let report = s.verify_fs_inequalities();
    let worst = report.rows.iter().map(|r| r.min_margin()).fold(f64::INFINITY, f64::min);
    let mut radii = s.radii().to_vec();
    radii[1] = Radius::new(0.9).unwrap();
    let corrupted = ReichSchedule::from_parts(s.k, s.degrees().to_vec(), radii).map(|c| c.verify_fs_inequalities().all_pass());
    let negative_fails = !matches!(corrupted, Ok(true));
    (
        report.all_pass() && worst > 0.0 && negative_fails,
        format!("{} rows, smallest margin {worst:.3e}, corrupted r_2 rejected: {negative_fails}", report.rows.len()),
    )
}

fn hamilton_bound() -> Outcome {
    let s = schedule();
    let kappa = build_kappa(&s).unwrap();
    let fam = DegeneratingFamily::monomials(&s, Parity::All);
    let mut ok = true;
    let mut worst_gap: f64 = 0.0;
    for j in 2..=DEPTH {
        let p = pair(&kappa, &fam.member(j).unwrap(), DEFAULT_TOL).unwrap();
        let eps = 0.5f64.powi(j as i32 - 1);
        let bound = K * (1.0 - eps) - K * eps;
        ok &= p.value.re - p.err >= bound;
        ok &= K - (p.value.re - p.err) <= K * 0.5f64.powi(j as i32 - 2);
        worst_gap = worst_gap.max((K - p.value.re) / (K * 0.5f64.powi(j as i32 - 2)));
    }
    (ok, format!("j = 2..{DEPTH}, largest gap / allowed = {worst_gap:.3e}"))
}

fn modulated_norm() -> Outcome {
    let s = schedule();
    let fam = DegeneratingFamily::monomials(&s, Parity::All);
    let mut ok = true;
    let mut msg = Vec::new();
    for (a, b) in [(0.3, 1.0), (1.0, 0.3), (1.0, 1.0)] {
        let mu = build_modulated(&s, a, b).unwrap();
        let iv = pairing_limsup(&mu, &fam, 12, 1e-4).unwrap();
        let target = (a * K).max(b * K);
        ok &= iv.is_certified() && iv.within(target, 1e-4);
        msg.push(format!("({a},{b}) -> [{:.6}, {:.6}]", iv.lower, iv.upper));
    }
    (ok, msg.join(", "))
}

fn ramp_family(s: &ReichSchedule, lambda: f64) -> GeodesicFamily {
    family_substantial_example(s, DEPTH, SigmaProfile::lambda_ramp(lambda, RAMP_T0, K).unwrap(), RAMP_ALPHA).unwrap()
}

fn ramp_geodesics() -> Outcome {
    let s = schedule();
    let mut ok = true;
    let mut dev: f64 = 0.0;
    for lambda in [0.2, 0.4] {
        let f = ramp_family(&s, lambda);
        let r = certify_geodesic(&f, &default_grid(&f, 0.0, K, DEFAULT_GRID), 1e-6).unwrap();
        ok &= r.pass;
        dev = dev.max(r.max_deviation);
    }
    let odd = DegeneratingFamily::monomials(&s, Parity::Odd);
    let gap = distinctness_gap(&ramp_family(&s, 0.4), &ramp_family(&s, 0.2), 0.5 * RAMP_T0, &odd).unwrap();
    let gap_ok = gap == 0.2;
    (
        ok && gap_ok,
        format!("geodesic grids pass: {ok} (max deviation {dev:.2e}); distinctness gap {gap} (required 0.2)"),
    )
}

fn closed_loop() -> Outcome {
    let s = schedule();
    let etas = build_etas(&s).unwrap();
    let radius = DilatationValue::new(K).map(atgeo::metric::dilatation_to_distance).unwrap();
    let fams = [
        DegeneratingFamily::monomials(&s, Parity::Odd),
        DegeneratingFamily::monomials(&s, Parity::Even),
    ];
    let d = |i: usize, j: usize| certify_distance(&etas[i], &etas[j], &fams, 12, 1e-9).unwrap();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (i, j, mult) in [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 2, 2.0), (1, 3, 2.0)] {
        let iv = d(i, j);
        ok &= iv.is_certified() && iv.within(mult * radius, 1e-9);
        worst = worst.max((iv.lower - mult * radius).abs()).max((iv.upper - mult * radius).abs());
    }
    let via_1 = d(1, 0).upper + d(0, 3).upper;
    let via_3 = d(1, 2).upper + d(2, 3).upper;
    ok &= (via_1 - 2.0 * radius).abs() <= 1e-9 && (via_3 - 2.0 * radius).abs() <= 1e-9;
    let grid: Vec<f64> = (0..=4).map(|i| K * i as f64 / 4.0).collect();
    for edge in family_closed_loop(&s, DEPTH).unwrap() {
        let r = certify_geodesic(&edge, &grid, 1e-9).unwrap();
        ok &= r.pass && r.rows.iter().all(|x| x.status == Status::Certified);
    }
    (ok, format!("R = {radius:.12}, worst deviation {worst:.2e}, paths via η1 / η3: {via_1:.12} / {via_3:.12}"))
}

fn straight_line() -> Outcome {
    let (h, rho) = (K, 0.8);
    let layout = TwistLayout::new(schedule(), DEPTH, Some(patch_arc(0.0, 0.4).unwrap())).unwrap();
    let f = family_straight_line(layout, h).unwrap();
    let mut grid = default_grid(&f, -rho, rho, DEFAULT_GRID);
    grid.extend([-h, h]);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let r = certify_geodesic(&f, &grid, 1e-6).unwrap();
    let certs = f.certifiers();
    let d = |a: f64, b: f64| certify_distance(&f.eval(a).unwrap(), &f.eval(b).unwrap(), &certs, 12, 1e-9).unwrap();
    let (whole, half) = (d(-rho, rho), d(0.0, rho));
    let sym = whole.is_certified() && half.is_certified() && (whole.upper - 2.0 * half.upper).abs() <= 1e-9;
    let outside = f.eval(rho).unwrap();
    let inside = f.eval(0.6).unwrap();
    let combo = combo_spec(&outside, &inside).unwrap().expect("shared twists");
    let far = f.layout.far_point().angle();
    let off_cap_zero = combo.tail.sectors.iter().filter(|x| x.arc.contains_closed(far)).all(|x| x.is_zero())
        && combo.cells.iter().all(|c| c.terms.iter().all(|t| t.amplitude.norm() == 0.0));
    let on_cap = (combo_bounds(&outside, &inside).unwrap().whole - (rho - 0.6) / (1.0 - 0.6 * rho)).abs() <= 1e-15;
    let vanishes = off_cap_zero && on_cap;
    (
        r.pass && sym && vanishes,
        format!("{} pairs, max deviation {:.2e}, combo vanishes off the cap: {vanishes}, d(-ρ,ρ) - 2d(0,ρ) = {:.2e}", r.rows.len(), r.max_deviation, whole.upper - 2.0 * half.upper),
    )
}

fn monotone_f() -> Outcome {
    let r = lemma_monotonicity_suite(10_000, 7).unwrap();
    (r.violations == 0, format!("{} samples (seed {}), {} violations", r.samples, r.seed, r.violations))
}

fn sigma_cases() -> Outcome {
    let h = 0.9;
    let class = SigmaClass::Sigma { rho: 0.5 * h, beta: 0.2, h };
    let good = check_sigma_admissible(&SigmaProfile::tent(0.5, 0.1, h).unwrap(), class, 101).unwrap();
    let bad = check_sigma_admissible(&SigmaProfile::tent(3.0, 0.8, h).unwrap(), class, 101).unwrap();
    (
        good.admissible && !bad.admissible,
        format!("(0.5, 0.1) margin {:.3e}; (3, 0.8) margin {:.3e}", good.worst_margin, bad.worst_margin),
    )
}

fn fundamental_inequalities() -> Outcome {
    let s = schedule();
    let all = DegeneratingFamily::monomials(&s, Parity::All);
    let even = DegeneratingFamily::monomials(&s, Parity::Even);
    let kappa = build_kappa(&s).unwrap();
    let mut ok = true;
    let mut worst: f64 = f64::INFINITY;
    for t in [0.2, 0.6, 0.9] {
        let r = check_fundamental_inequalities(&kappa.scale(Complex64::new(t, 0.0)), &all, 12, 1e-12).unwrap();
        ok &= r.certified && r.pass && r.margin_upper.abs() <= 1e-12 && r.margin_lower.abs() <= 1e-12;
    }
    let f = ramp_family(&s, 0.4);
    let mut instances = vec![];
    for i in 1..=10 {
        instances.push(f.eval(K * i as f64 / 10.0).unwrap());
    }
    for (a, b) in [(0.3, 1.0), (1.0, 0.3), (1.0, 1.0)] {
        instances.push(build_modulated(&s, a, b).unwrap());
    }
    let mut counted = 0;
    for spec in &instances {
        for fam in [&all, &even] {
            let r = check_fundamental_inequalities(spec, fam, 12, 1e-12).unwrap();
            if r.certified {
                counted += 1;
                ok &= r.pass;
                worst = worst.min(r.margin_upper).min(r.margin_lower);
            }
        }
    }
    (ok && counted > 0, format!("scaled κ equality to 1e-12; {counted} certified instances, smallest margin {worst:.3e}"))
}

fn variation_formula() -> Outcome {
    let s = schedule();
    let kappa = build_kappa(&s).unwrap();
    let damped = build_modulated(&s, 0.5, 1.0).unwrap();
    let r = binary_variation_check(&kappa, &damped, &DEFAULT_T_SCHEDULE, &DegeneratingFamily::monomials(&s, Parity::Odd), 5e-3).unwrap();
    let res: Vec<String> = r.rows.iter().map(|x| format!("{:.3e}", x.residual)).collect();
    (r.pass, format!("limit {}, residuals [{}], extrapolated residual {:.3e}", r.limit.lower, res.join(", "), r.richardson_residual))
}

fn infinitesimal_suite() -> Outcome {
    let b = 0.5;
    let mut scan_ok = true;
    let mut scanned = 0;
    for rho in [0.1, 0.2, 0.3, 0.4] {
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            for beta in [0.05, 0.15, 0.25, 0.35] {
                let gamma: f64 = rho / b + alpha * beta;
                if (gamma - 1.0).abs() < 1e-9 {
                    continue;
                }
                let sigma = SigmaProfile::tent(alpha, 0.2, b).unwrap();
                let r = check_sigma_admissible(&sigma, SigmaClass::SigmaDoublePrime { rho, beta, b }, 101).unwrap();
                scan_ok &= r.admissible == (gamma < 1.0);
                scanned += 1;
            }
        }
    }
    let layout = TwistLayout::new(schedule(), DEPTH, None).unwrap();
    let f = family_infinitesimal(layout, SigmaProfile::tent(1.0, 0.2, b).unwrap(), b, 0.2, 0.2, true).unwrap();
    let r = certify_az_geodesic(&f, &default_grid(&f, 0.0, b, DEFAULT_GRID), 1e-4).unwrap();
    (scan_ok && r.pass, format!("{scanned} parameter triples agree: {scan_ok}; {} pairs, max deviation {:.2e}", r.rows.len(), r.max_deviation))
}

fn propagation() -> Outcome {
    let s = schedule();
    let f = ramp_family(&s, 0.4);
    let points = BoundaryPoint::sample(64, 0.1);
    let r = substantial_propagation_check(&f, &[0.1, 0.25, 0.4], &points, 0.0).unwrap();
    let h = (0.3 + 0.4) / (1.0 + 0.3 * 0.4);
    let d = |x: f64| hyperbolic_distance(hp(0.0), hp(x));
    let additive = (d(h) - d(0.3) - d(0.4)).abs() <= 1e-12;
    (r.pass && additive, format!("{} (t, p) samples exact: {}; additivity residual {:.2e}", r.rows.len(), r.pass, r.additivity_residual))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("schedule inequalities", schedule_validity),
        ("hamilton lower bound", hamilton_bound),
        ("modulated norm", modulated_norm),
        ("ramp geodesics and distinctness", ramp_geodesics),
        ("closed geodesic", closed_loop),
        ("straight line", straight_line),
        ("F monotonicity", monotone_f),
        ("sigma admissibility cases", sigma_cases),
        ("fundamental inequalities", fundamental_inequalities),
        ("first-order variation", variation_formula),
        ("infinitesimal suite", infinitesimal_suite),
        ("substantial propagation", propagation),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<34} {} ({:.1}s) {detail}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

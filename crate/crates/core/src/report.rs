//! Versioned JSON documents, CSV/`.dat` tables, and the bundled
//! reproduction run behind the `reproduce` command.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::asymptotic::{binary_variation_check, certify_az_geodesic, check_fundamental_inequalities, AzReport, DEFAULT_T_SCHEDULE};
use crate::beltrami::BeltramiSpec;
use crate::certify::Status;
use crate::error::{Error, Result};
use crate::geodesic::{
    certify_distance, certify_geodesic, check_sigma_admissible, default_grid, distinctness_gap, family_closed_loop, family_infinitesimal,
    family_nonsubstantial, family_straight_line, family_substantial_example, patch_arc, substantial_propagation_check, FamilyKind,
    GeodesicFamily, GeodesicReport, SigmaClass, SigmaProfile, TwistLayout,
};
use crate::geometry::BoundaryPoint;
use crate::metric::{dilatation_to_distance, lemma_dist_F, DilatationValue};
use crate::quad::{pair, pairing_limsup, DegeneratingFamily, Parity, DEFAULT_TOL};
use crate::reich::{build_etas, build_kappa, build_modulated, build_schedule, FsReport, ReichSchedule};

pub const SCHEMA: &str = "atgeo/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Content {
    Schedule(ReichSchedule),
    Spec(BeltramiSpec),
    Specs(Vec<BeltramiSpec>),
    Family(GeodesicFamily),
    Families(Vec<GeodesicFamily>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema: String,
    pub content: Content,
}

impl Document {
    pub fn new(content: Content) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            content,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if doc.schema != SCHEMA {
            return Err(Error::Schema(format!("schema {:?} is not {SCHEMA:?}", doc.schema)));
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table whose first column is the anchor tag of the check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        let mut h = vec!["anchor".to_string()];
        h.extend(header.iter().map(|s| s.to_string()));
        Self {
            name: name.to_string(),
            header: h,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, anchor: &str, cells: Vec<String>) {
        let mut row = vec![anchor.to_string()];
        row.extend(cells);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory writer");
        for r in &self.rows {
            w.write_record(r).expect("in-memory writer");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 cells")
    }
}

fn status_cell(s: Status) -> String {
    s.to_string()
}

/// Pair rows of a geodesic report.
pub fn geodesic_table(name: &str, anchor: &str, family_id: &str, report: &GeodesicReport) -> Table {
    let mut t = Table::new(name, &["family", "s", "t", "lower", "upper", "target", "status"]);
    for r in &report.rows {
        t.push(
            anchor,
            vec![
                family_id.to_string(),
                fmt_f64(r.s),
                fmt_f64(r.t),
                fmt_f64(r.lower),
                fmt_f64(r.upper),
                fmt_f64(r.target),
                status_cell(r.status),
            ],
        );
    }
    t
}

pub fn az_table(name: &str, anchor: &str, family_id: &str, report: &AzReport) -> Table {
    let mut t = Table::new(name, &["family", "s", "t", "lower", "upper", "target", "status"]);
    for r in &report.rows {
        t.push(
            anchor,
            vec![
                family_id.to_string(),
                fmt_f64(r.s),
                fmt_f64(r.t),
                fmt_f64(r.lower),
                fmt_f64(r.upper),
                fmt_f64(r.target),
                status_cell(r.status),
            ],
        );
    }
    t
}

pub fn fs_table(anchor: &str, report: &FsReport) -> Table {
    let mut t = Table::new(
        "schedule_inequalities",
        &["j", "degree", "r", "r_gap", "inner_mass", "inner_bound", "outer_tail", "outer_bound", "halfway_gap", "halfway_bound", "pass"],
    );
    let opt = |x: Option<f64>| x.map_or(String::new(), fmt_f64);
    for r in &report.rows {
        t.push(
            anchor,
            vec![
                r.j.to_string(),
                fmt_f64(r.degree),
                fmt_f64(r.r),
                fmt_f64(r.r_gap),
                fmt_f64(r.inner_mass),
                fmt_f64(r.inner_bound),
                fmt_f64(r.outer_tail),
                fmt_f64(r.outer_bound),
                opt(r.halfway_gap),
                opt(r.halfway_bound),
                (r.inner_ok && r.outer_ok && r.halfway_ok && r.monotone_ok).to_string(),
            ],
        );
    }
    t
}

/// Whitespace-separated `s t lower upper target` rows for plotting.
pub fn dat_from_geodesic(report: &GeodesicReport) -> String {
    let mut out = String::from("# s t lower upper target\n");
    for r in &report.rows {
        out.push_str(&format!("{} {} {} {} {}\n", fmt_f64(r.s), fmt_f64(r.t), fmt_f64(r.lower), fmt_f64(r.upper), fmt_f64(r.target)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub violations: usize,
    pub seed: u64,
}

/// Random `(t₁, t₂, k₁ <= k₂)` with `k₂²|t₁t₂| < 1`, `|tᵢ| < 2`; counts
/// samples where `F(k₁) > F(k₂)`.
pub fn lemma_monotonicity_suite(samples: usize, seed: u64) -> Result<MonotonicityReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..samples {
        let t1 = Complex64::from_polar(2.0 * rng.gen::<f64>(), TAU * rng.gen::<f64>());
        let t2 = Complex64::from_polar(2.0 * rng.gen::<f64>(), TAU * rng.gen::<f64>());
        let cap = (1.0 / (t1 * t2).norm().sqrt()).min(10.0);
        let k2 = cap * rng.gen_range(1e-6..1.0 - 1e-6);
        let k1 = k2 * rng.gen_range(1e-6..=1.0);
        if lemma_dist_F(t1, t2, k1)? > lemma_dist_F(t1, t2, k2)? * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    Ok(MonotonicityReport { samples, violations, seed })
}

/// Parameters of the reproduction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub k: f64,
    pub depth: usize,
    pub grid: usize,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
    /// Odd-annulus factor of the ramp family endpoint.
    pub alpha: f64,
    pub lambdas: (f64, f64),
    pub t0: f64,
    /// Straight-line half range; `None` picks `max(0.8, (1+k)/2)`.
    pub line_rho: Option<f64>,
    pub patch_half_width: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: 0.5,
            depth: 8,
            grid: 17,
            tol: 1e-6,
            seed: 7,
            samples: 10_000,
            alpha: 0.5,
            lambdas: (0.4, 0.2),
            t0: 0.2,
            line_rho: None,
            patch_half_width: 0.4,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        if !(self.tol > 0.0) {
            return bad(format!("tolerance {} must be > 0", self.tol));
        }
        if self.grid < 2 {
            return bad(format!("grid size {} must be >= 2", self.grid));
        }
        DilatationValue::new(self.k)?;
        if self.k == 0.0 {
            return bad("k must be positive".into());
        }
        if !(self.t0 > 0.0 && self.t0 < self.k) {
            return bad(format!("t0 = {} must lie in (0, k)", self.t0));
        }
        Ok(())
    }

    fn line_rho(&self) -> f64 {
        self.line_rho.unwrap_or(0.8f64.max(0.5 * (1.0 + self.k)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub anchor: String,
    pub pass: bool,
    pub hard_failure: bool,
    pub partial: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema: String,
    pub config: RunConfig,
    pub checks: Vec<CheckSummary>,
    pub passed: usize,
    pub failed: usize,
    pub hard_failures: usize,
    pub partial: usize,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries serialize") + "\n"
    }
}

/// Everything `reproduce` writes: a summary plus named tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub summary: Summary,
    pub tables: Vec<Table>,
    pub dats: Vec<(String, String)>,
    /// Set when a hard failure stopped the run.
    pub aborted_at: Option<String>,
}

impl Bundle {
    /// Writes all files into `dir`.
    pub fn write(&self, dir: &Path, with_dat: bool) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        if with_dat {
            for (name, body) in &self.dats {
                fs::write(dir.join(format!("{name}.dat")), body)?;
            }
        }
        fs::write(dir.join("summary.json"), self.summary.to_json())
    }
}

struct Run {
    checks: Vec<CheckSummary>,
    tables: Vec<Table>,
    dats: Vec<(String, String)>,
}

impl Run {
    fn check(&mut self, anchor: &str, pass: bool, hard: bool, partial: usize, detail: String) -> bool {
        self.checks.push(CheckSummary {
            anchor: anchor.to_string(),
            pass,
            hard_failure: hard,
            partial,
            detail,
        });
        hard
    }
}

/// Runs the full suite of constructions and certifications. A hard failure
/// stops the run with the failing table as the last one in the bundle.
pub fn reproduce(cfg: &RunConfig) -> Result<Bundle> {
    cfg.validate()?;
    let mut run = Run {
        checks: Vec::new(),
        tables: Vec::new(),
        dats: Vec::new(),
    };
    let aborted_at = run_all(cfg, &mut run)?;
    let hard_failures = run.checks.iter().filter(|c| c.hard_failure).count();
    let passed = run.checks.iter().filter(|c| c.pass).count();
    let summary = Summary {
        schema: SCHEMA.to_string(),
        config: cfg.clone(),
        failed: run.checks.len() - passed,
        passed,
        hard_failures,
        partial: run.checks.iter().map(|c| c.partial).sum(),
        checks: run.checks,
    };
    Ok(Bundle {
        summary,
        tables: run.tables,
        dats: run.dats,
        aborted_at,
    })
}

fn run_all(cfg: &RunConfig, run: &mut Run) -> Result<Option<String>> {
    let k = cfg.k;
    let s = build_schedule(DilatationValue::new(k)?, cfg.depth)?;
    let all = DegeneratingFamily::monomials(&s, Parity::All);
    let odd = DegeneratingFamily::monomials(&s, Parity::Odd);
    let even = DegeneratingFamily::monomials(&s, Parity::Even);
    macro_rules! stop_if {
        ($hard:expr, $anchor:expr) => {
            if $hard {
                return Ok(Some($anchor.to_string()));
            }
        };
    }

    let fs = s.verify_fs_inequalities();
    run.tables.push(fs_table("schedule-inequalities", &fs));
    let ok = fs.all_pass();
    stop_if!(run.check("schedule-inequalities", ok, !ok, 0, format!("{} annuli", fs.rows.len())), "schedule-inequalities");

    let kappa = build_kappa(&s)?;
    let mut t = Table::new("hamilton_bound", &["j", "degree", "re", "err", "bound", "gap", "allowed_gap"]);
    let mut ok = true;
    for j in 2..=cfg.depth {
        let p = pair(&kappa, &all.member(j)?, DEFAULT_TOL)?;
        let eps = 0.5f64.powi(j as i32 - 1);
        let bound = k * (1.0 - eps) - k * eps;
        let allowed = k * 0.5f64.powi(j as i32 - 2);
        ok &= p.value.re - p.err >= bound && k - (p.value.re - p.err) <= allowed;
        t.push(
            "hamilton-bound",
            vec![j.to_string(), fmt_f64(s.annulus(j)?.degree), fmt_f64(p.value.re), fmt_f64(p.err), fmt_f64(bound), fmt_f64(k - p.value.re), fmt_f64(allowed)],
        );
    }
    run.tables.push(t);
    stop_if!(run.check("hamilton-bound", ok, !ok, 0, format!("j = 2..{}", cfg.depth)), "hamilton-bound");

    let mut t = Table::new("modulated_extremality", &["alpha", "beta", "lower", "upper", "target", "status"]);
    let mut ok = true;
    for (a, b) in [(0.3, 1.0), (1.0, 0.3), (1.0, 1.0)] {
        let mu = build_modulated(&s, a, b)?;
        let iv = pairing_limsup(&mu, &all, 12, 1e-4)?;
        let target = (a * k).max(b * k);
        ok &= iv.is_certified() && iv.within(target, 1e-4);
        t.push("modulated-extremality", vec![fmt_f64(a), fmt_f64(b), fmt_f64(iv.lower), fmt_f64(iv.upper), fmt_f64(target), status_cell(iv.status)]);
    }
    run.tables.push(t);
    let hard = !ok;
    stop_if!(run.check("modulated-extremality", ok, hard, 0, "three (α, β) pairs".into()), "modulated-extremality");

    let ramp = |lambda: f64| family_substantial_example(&s, cfg.depth, SigmaProfile::lambda_ramp(lambda, cfg.t0, k)?, cfg.alpha);
    let (l1, l2) = cfg.lambdas;
    for (i, lambda) in [l1, l2].into_iter().enumerate() {
        let f = ramp(lambda)?;
        let r = certify_geodesic(&f, &default_grid(&f, 0.0, k, cfg.grid), cfg.tol)?;
        let name = format!("ramp_geodesic_{}", i + 1);
        run.tables.push(geodesic_table(&name, "ramp-geodesic", &format!("ramp-{lambda}"), &r));
        run.dats.push((name, dat_from_geodesic(&r)));
        stop_if!(
            run.check("ramp-geodesic", r.pass, r.hard_failures > 0, r.partial, format!("λ = {lambda}, max deviation {:.3e}", r.max_deviation)),
            "ramp-geodesic"
        );
    }
    let gap = distinctness_gap(&ramp(l1)?, &ramp(l2)?, 0.5 * cfg.t0, &odd)?;
    let mut t = Table::new("distinctness", &["first", "second", "probe", "family", "gap", "expected"]);
    let expected = cfg.alpha * (l1 - l2).abs();
    t.push("ramp-distinctness", vec![fmt_f64(l1), fmt_f64(l2), fmt_f64(0.5 * cfg.t0), odd.tag(), fmt_f64(gap), fmt_f64(expected)]);

    let loop_edges = family_closed_loop(&s, cfg.depth)?;
    let etas = build_etas(&s)?;
    let radius = dilatation_to_distance(DilatationValue::new(k)?);
    let fams = [odd.clone(), even.clone()];
    let mut lt = Table::new("closed_loop", &["from", "to", "lower", "upper", "target", "status"]);
    let mut ok = true;
    for (i, j, mult) in [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 2, 2.0), (1, 3, 2.0)] {
        let iv = certify_distance(&etas[i], &etas[j], &fams, 12, 1e-9)?;
        ok &= iv.is_certified() && iv.within(mult * radius, 1e-9);
        lt.push("closed-loop", vec![format!("eta{}", i + 1), format!("eta{}", j + 1), fmt_f64(iv.lower), fmt_f64(iv.upper), fmt_f64(mult * radius), status_cell(iv.status)]);
    }
    let grid: Vec<f64> = (0..=4).map(|i| k * i as f64 / 4.0).collect();
    let mut hard = !ok;
    for (n, edge) in loop_edges.iter().enumerate() {
        let r = certify_geodesic(edge, &grid, 1e-9)?;
        ok &= r.pass;
        hard |= r.hard_failures > 0;
        run.tables.push(geodesic_table(&format!("closed_loop_edge_{}", n + 1), "closed-loop", &format!("edge-{}", n + 1), &r));
    }
    run.tables.push(lt);
    stop_if!(run.check("closed-loop", ok, hard, 0, format!("R = {}", fmt_f64(radius))), "closed-loop");

    let rho = cfg.line_rho();
    let layout = TwistLayout::new(s.clone(), cfg.depth, Some(patch_arc(0.0, cfg.patch_half_width)?))?;
    let line = family_straight_line(layout.clone(), k)?;
    let mut grid = default_grid(&line, -rho, rho, cfg.grid);
    grid.extend([-k, k].into_iter().filter(|x| x.abs() <= rho));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let r = certify_geodesic(&line, &grid, cfg.tol)?;
    run.tables.push(geodesic_table("straight_line", "straight-line", "line", &r));
    run.dats.push(("straight_line".into(), dat_from_geodesic(&r)));
    stop_if!(
        run.check("straight-line", r.pass, r.hard_failures > 0, r.partial, format!("[-{rho}, {rho}], max deviation {:.3e}", r.max_deviation)),
        "straight-line"
    );

    let (ns_rho, ns_beta) = (0.5 * k, 0.2 * k);
    let tent = |a: f64| SigmaProfile::tent(a, 0.1f64.min(0.25 * k), k);
    let patch_families = [
        family_nonsubstantial(layout.clone(), tent(0.5)?, k, ns_rho, ns_beta)?,
        family_nonsubstantial(layout.clone(), tent(0.25)?, k, ns_rho, ns_beta)?,
    ];
    for (i, f) in patch_families.iter().enumerate() {
        let r = certify_geodesic(f, &default_grid(f, 0.0, k, cfg.grid), cfg.tol)?;
        run.tables.push(geodesic_table(&format!("patch_geodesic_{}", i + 1), "patch-geodesic", &format!("tent-{}", i + 1), &r));
        stop_if!(
            run.check("patch-geodesic", r.pass, r.hard_failures > 0, r.partial, format!("max deviation {:.3e}", r.max_deviation)),
            "patch-geodesic"
        );
    }
    let towards = DegeneratingFamily::peaked(&s, layout.patch_point().expect("patch"), Parity::All);
    let probe = 0.25 * 0.1f64.min(0.25 * k);
    let patch_gap = distinctness_gap(&patch_families[0], &patch_families[1], probe, &towards)?;
    t.push("patch-distinctness", vec![fmt_f64(0.5), fmt_f64(0.25), fmt_f64(probe), towards.tag(), fmt_f64(patch_gap), fmt_f64(0.25 * ns_beta)]);
    run.tables.push(t);
    run.check("ramp-distinctness", gap > 0.0, false, 0, format!("gap {}", fmt_f64(gap)));
    run.check("patch-distinctness", patch_gap > 0.0, false, 0, format!("gap {}", fmt_f64(patch_gap)));

    let m = lemma_monotonicity_suite(cfg.samples, cfg.seed)?;
    let mut t = Table::new("f_monotonicity", &["samples", "violations", "seed"]);
    t.push("f-monotonicity", vec![m.samples.to_string(), m.violations.to_string(), m.seed.to_string()]);
    run.tables.push(t);
    stop_if!(run.check("f-monotonicity", m.violations == 0, m.violations > 0, 0, format!("{} samples", m.samples)), "f-monotonicity");

    let mut t = Table::new("sigma_cases", &["alpha", "t0", "worst_margin", "admissible"]);
    let class = SigmaClass::Sigma { rho: 0.45, beta: 0.2, h: 0.9 };
    let good = check_sigma_admissible(&SigmaProfile::tent(0.5, 0.1, 0.9)?, class, 101)?;
    let bad = check_sigma_admissible(&SigmaProfile::tent(3.0, 0.8, 0.9)?, class, 101)?;
    t.push("sigma-cases", vec![fmt_f64(0.5), fmt_f64(0.1), fmt_f64(good.worst_margin), good.admissible.to_string()]);
    t.push("sigma-cases", vec![fmt_f64(3.0), fmt_f64(0.8), fmt_f64(bad.worst_margin), bad.admissible.to_string()]);
    run.tables.push(t);
    run.check("sigma-cases", good.admissible && !bad.admissible, false, 0, "small tent passes, large tent fails".into());

    let mut t = Table::new("fundamental_inequalities", &["instance", "family", "h", "i", "delta", "margin_upper", "margin_lower", "certified"]);
    let mut instances: Vec<(String, BeltramiSpec)> = [0.2, 0.6, 0.9].iter().map(|&x| (format!("scaled-{x}"), kappa.scale(Complex64::new(x, 0.0)))).collect();
    let ramp1 = ramp(l1)?;
    for i in 1..=4 {
        let x = k * i as f64 / 4.0;
        instances.push((format!("ramp-at-{x}"), ramp1.eval(x)?));
    }
    let (mut ok, mut hard, mut partial) = (true, false, 0);
    for (name, spec) in &instances {
        for fam in [&all, &even] {
            let r = check_fundamental_inequalities(spec, fam, 12, 1e-12)?;
            ok &= r.pass;
            hard |= !r.pass;
            partial += usize::from(!r.certified);
            t.push(
                "fundamental-inequalities",
                vec![
                    name.clone(),
                    fam.tag(),
                    fmt_f64(r.h.upper),
                    fmt_f64(r.quantities.i_lower),
                    fmt_f64(r.quantities.delta_lower),
                    fmt_f64(r.margin_upper),
                    fmt_f64(r.margin_lower),
                    r.certified.to_string(),
                ],
            );
        }
    }
    run.tables.push(t);
    stop_if!(run.check("fundamental-inequalities", ok, hard, partial, format!("{} instances", instances.len())), "fundamental-inequalities");

    let damped = build_modulated(&s, 0.5, 1.0)?;
    let v = binary_variation_check(&kappa, &damped, &DEFAULT_T_SCHEDULE, &odd, 5e-3)?;
    let mut t = Table::new("variation_formula", &["t", "distance", "ratio", "residual", "status"]);
    for r in &v.rows {
        t.push("variation-formula", vec![fmt_f64(r.t), fmt_f64(r.distance), fmt_f64(r.ratio), fmt_f64(r.residual), status_cell(r.status)]);
    }
    run.tables.push(t);
    run.check(
        "variation-formula",
        v.pass,
        false,
        0,
        format!("limit {}, extrapolated residual {:.3e}", fmt_f64(v.limit.lower), v.richardson_residual),
    );

    let b = 0.5;
    let mut scan = Table::new("tangent_admissibility", &["rho", "alpha", "beta", "gamma", "admissible"]);
    let mut ok = true;
    for rho in [0.1, 0.2, 0.3, 0.4] {
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            for beta in [0.05, 0.15, 0.25, 0.35] {
                let gamma: f64 = rho / b + alpha * beta;
                let r = check_sigma_admissible(&SigmaProfile::tent(alpha, 0.2, b)?, SigmaClass::SigmaDoublePrime { rho, beta, b }, 101)?;
                if (gamma - 1.0).abs() > 1e-9 {
                    ok &= r.admissible == (gamma < 1.0);
                }
                scan.push("tangent-suite", vec![fmt_f64(rho), fmt_f64(alpha), fmt_f64(beta), fmt_f64(gamma), r.admissible.to_string()]);
            }
        }
    }
    run.tables.push(scan);
    let parity_layout = TwistLayout::new(s.clone(), cfg.depth, None)?;
    let tangent = [
        family_infinitesimal(parity_layout, SigmaProfile::tent(1.0, 0.2, b)?, b, 0.2, 0.2, true)?,
        family_infinitesimal(layout.clone(), SigmaProfile::tent(1.0, 0.2, b)?, b, 0.2, 0.2, false)?,
    ];
    let mut hard = false;
    for (i, f) in tangent.iter().enumerate() {
        let r = certify_az_geodesic(f, &default_grid(f, 0.0, b, cfg.grid), 1e-4)?;
        ok &= r.pass;
        hard |= r.hard_failures > 0;
        run.tables.push(az_table(&format!("tangent_geodesic_{}", i + 1), "tangent-suite", if i == 0 { "by-parity" } else { "by-patch" }, &r));
    }
    stop_if!(run.check("tangent-suite", ok, hard, 0, "admissibility scan and two tangent families".into()), "tangent-suite");

    let points = BoundaryPoint::sample(64, 0.1);
    let grid: Vec<f64> = [0.2, 0.5, 0.8].iter().map(|x| x * k).collect();
    let r = substantial_propagation_check(&ramp1, &grid, &points, 0.0)?;
    let mut t = Table::new("substantial_propagation", &["t", "point", "boundary_dilatation", "certified_h", "ok"]);
    for row in &r.rows {
        t.push("substantial-propagation", vec![fmt_f64(row.t), fmt_f64(row.point), fmt_f64(row.boundary_dilatation), fmt_f64(row.certified_h), row.ok.to_string()]);
    }
    run.tables.push(t);
    run.check("substantial-propagation", r.pass, false, 0, format!("additivity residual {:.3e}", r.additivity_residual));
    Ok(None)
}

/// Degenerating families suited to the schedule a spec's tail follows.
pub fn certifiers_for(spec: &BeltramiSpec) -> Vec<DegeneratingFamily> {
    match &spec.tail.schedule {
        Some(s) => vec![
            DegeneratingFamily::monomials(s, Parity::Even),
            DegeneratingFamily::monomials(s, Parity::Odd),
        ],
        None => Vec::new(),
    }
}

/// Default sweep range of a family.
pub fn family_range(f: &GeodesicFamily) -> (f64, f64) {
    match f.kind {
        FamilyKind::StraightLine { h } => {
            let r = 0.8f64.max(0.5 * (1.0 + h));
            (-r, r)
        }
        _ => f.domain(),
    }
}

/// Schedule shorthand used by the CLI.
pub fn schedule_for(k: f64, depth: usize) -> Result<ReichSchedule> {
    build_schedule(DilatationValue::new(k)?, depth)
}

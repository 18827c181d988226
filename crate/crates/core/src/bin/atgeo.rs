use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use atgeo::asymptotic::certify_az_geodesic;
use atgeo::beltrami::BeltramiSpec;
use atgeo::geodesic::{
    certify_distance, certify_geodesic, default_grid, family_closed_loop, family_infinitesimal, family_nonsubstantial, family_straight_line,
    family_substantial_example, patch_arc, FamilyKind, GeodesicFamily, SigmaProfile, TwistLayout,
};
use atgeo::reich::{build_etas, build_kappa, build_modulated, ReichSchedule};
use atgeo::report::{
    az_table, certifiers_for, dat_from_geodesic, family_range, fmt_f64, fs_table, geodesic_table, reproduce, schedule_for, Content,
    Document, RunConfig, Table,
};

#[derive(Parser)]
#[command(name = "atgeo", version, about = "Twisted Beltrami coefficients and certified asymptotic distances on the disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a schedule and the specs or families of one construction.
    Construct(ConstructArgs),
    /// Certify the contents of a document.
    Certify(CertifyArgs),
    /// Run the full example suite and write a report bundle.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Kappa,
    Modulated,
    ClosedLoop,
    Step3,
    StraightLine,
    Nonsubstantial,
    Infinitesimal,
}

#[derive(clap::Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 0.5)]
    k: f64,
    #[arg(long = "J", alias = "depth", default_value_t = 8)]
    depth: usize,
    /// Odd-annulus factor (modulated, step3) or tent slope (nonsubstantial, infinitesimal).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    lambda: f64,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Endpoint of the tangent-space family.
    #[arg(long, default_value_t = 0.5)]
    b: f64,
    #[arg(long, default_value_t = 0.0)]
    patch_center: f64,
    #[arg(long, default_value_t = 0.4)]
    patch_half_width: f64,
    /// Tangent-space family split by the patch instead of by parity.
    #[arg(long)]
    by_patch: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct CertifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Second spec for a single distance.
    #[arg(long)]
    against: Option<PathBuf>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 17)]
    grid: usize,
    /// Explicit grid, comma separated; overrides --grid.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    points: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write gnuplot-ready `.dat` tables.
    #[arg(long)]
    dat: bool,
}

#[derive(clap::Args)]
struct ReproduceArgs {
    /// JSON run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long = "J", alias = "depth")]
    depth: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value = "report")]
    out: PathBuf,
    #[arg(long)]
    dat: bool,
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Pass,
    HardFailure,
}

fn write_doc(dir: &Path, name: &str, content: Content) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, Document::new(content).to_json()).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn construct(a: ConstructArgs) -> anyhow::Result<Verdict> {
    let s = schedule_for(a.k, a.depth)?;
    let mut files: Vec<(&str, Content)> = vec![("schedule.json", Content::Schedule(s.clone()))];
    let patch = || -> anyhow::Result<TwistLayout> { Ok(TwistLayout::new(s.clone(), a.depth, Some(patch_arc(a.patch_center, a.patch_half_width)?))?) };
    match a.kind {
        Kind::Kappa => files.push(("kappa.json", Content::Spec(build_kappa(&s)?))),
        Kind::Modulated => files.push(("modulated.json", Content::Spec(build_modulated(&s, a.alpha.unwrap_or(0.3), a.beta.unwrap_or(1.0))?))),
        Kind::ClosedLoop => {
            files.push(("etas.json", Content::Specs(build_etas(&s)?.to_vec())));
            files.push(("loop.json", Content::Families(family_closed_loop(&s, a.depth)?.to_vec())));
        }
        Kind::Step3 => {
            let sigma = SigmaProfile::lambda_ramp(a.lambda, a.t0.unwrap_or(0.2), a.k)?;
            files.push(("step3.json", Content::Family(family_substantial_example(&s, a.depth, sigma, a.alpha.unwrap_or(0.5))?)));
        }
        Kind::StraightLine => files.push(("line.json", Content::Family(family_straight_line(patch()?, a.k)?))),
        Kind::Nonsubstantial => {
            let sigma = SigmaProfile::tent(a.alpha.unwrap_or(0.5), a.t0.unwrap_or(0.1), a.k)?;
            let f = family_nonsubstantial(patch()?, sigma, a.k, a.rho.unwrap_or(0.5 * a.k), a.beta.unwrap_or(0.2 * a.k))?;
            files.push(("patch_family.json", Content::Family(f)));
        }
        Kind::Infinitesimal => {
            let layout = if a.by_patch { patch()? } else { TwistLayout::new(s.clone(), a.depth, None)? };
            let sigma = SigmaProfile::tent(a.alpha.unwrap_or(1.0), a.t0.unwrap_or(0.2), a.b)?;
            let f = family_infinitesimal(layout, sigma, a.b, a.rho.unwrap_or(0.2), a.beta.unwrap_or(0.2), !a.by_patch)?;
            files.push(("tangent.json", Content::Family(f)));
        }
    }
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for (name, content) in files {
        write_doc(&a.out, name, content)?;
    }
    Ok(Verdict::Pass)
}

fn schedule_ok(s: &ReichSchedule, tables: &mut Vec<Table>) -> bool {
    let r = s.verify_fs_inequalities();
    tables.push(fs_table("schedule-inequalities", &r));
    if let Err(e) = r.check() {
        eprintln!("schedule rejected: {e}");
        return false;
    }
    true
}

fn grid_for(a: &CertifyArgs, f: &GeodesicFamily) -> anyhow::Result<Vec<f64>> {
    match &a.points {
        Some(p) if p.is_empty() => bail!("empty grid"),
        Some(p) => Ok(p.clone()),
        None if a.grid < 2 => bail!("grid size {} is too small: need at least 2 points", a.grid),
        None => {
            let (lo, hi) = family_range(f);
            Ok(default_grid(f, lo, hi, a.grid))
        }
    }
}

fn certify(a: CertifyArgs) -> anyhow::Result<Verdict> {
    if !(a.tol > 0.0) {
        bail!("tolerance {} must be > 0", a.tol);
    }
    let doc = Document::read(&a.input)?;
    let mut tables = Vec::new();
    let mut dats = Vec::new();
    let mut hard = 0usize;
    let mut partial = 0usize;
    let mut lines = Vec::new();
    let mut families: Vec<GeodesicFamily> = Vec::new();
    let mut specs: Vec<BeltramiSpec> = Vec::new();
    match doc.content {
        Content::Schedule(s) => {
            if !schedule_ok(&s, &mut tables) {
                hard += 1;
            }
        }
        Content::Family(f) => families.push(f),
        Content::Families(fs) => families = fs,
        Content::Spec(s) => specs.push(s),
        Content::Specs(s) => specs = s,
    }
    if let Some(path) = &a.against {
        match Document::read(path)?.content {
            Content::Spec(s) => specs.push(s),
            _ => bail!("{} does not hold a single spec", path.display()),
        }
    }
    for (i, f) in families.iter().enumerate() {
        grid_for(&a, f)?;
        if !schedule_ok(&f.layout.schedule, &mut tables) {
            hard += 1;
            continue;
        }
        let grid = grid_for(&a, f)?;
        let id = format!("family-{}", i + 1);
        if matches!(f.kind, FamilyKind::Infinitesimal { .. }) {
            let r = certify_az_geodesic(f, &grid, a.tol)?;
            hard += r.hard_failures;
            partial += r.rows.iter().filter(|x| x.status != atgeo::certify::Status::Certified).count();
            lines.push(format!("{id}: {} pairs, max deviation {:.3e}, pass {}", r.rows.len(), r.max_deviation, r.pass));
            tables.push(az_table(&format!("certify_{}", i + 1), "tangent-geodesic", &id, &r));
        } else {
            let r = certify_geodesic(f, &grid, a.tol)?;
            hard += r.hard_failures;
            partial += r.partial;
            lines.push(format!("{id}: {} pairs, max deviation {:.3e}, pass {}", r.rows.len(), r.max_deviation, r.pass));
            tables.push(geodesic_table(&format!("certify_{}", i + 1), "geodesic", &id, &r));
            dats.push((format!("certify_{}", i + 1), dat_from_geodesic(&r)));
        }
    }
    if specs.len() >= 2 {
        let mut t = Table::new("distances", &["first", "second", "lower", "upper", "status"]);
        for i in 0..specs.len() {
            for j in i + 1..specs.len() {
                let mut fams = certifiers_for(&specs[i]);
                fams.extend(certifiers_for(&specs[j]));
                let iv = certify_distance(&specs[i], &specs[j], &fams, 12, a.tol)?;
                partial += usize::from(!iv.is_certified());
                lines.push(format!("spec {} - spec {}: [{}, {}] {}", i + 1, j + 1, fmt_f64(iv.lower), fmt_f64(iv.upper), iv.status));
                t.push("distance", vec![(i + 1).to_string(), (j + 1).to_string(), fmt_f64(iv.lower), fmt_f64(iv.upper), iv.status.to_string()]);
            }
        }
        tables.push(t);
    } else if specs.len() == 1 && families.is_empty() {
        bail!("a single spec needs --against to form a distance");
    }
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for t in &tables {
        fs::write(a.out.join(format!("{}.csv", t.name)), t.to_csv())?;
    }
    if a.dat {
        for (n, body) in &dats {
            fs::write(a.out.join(format!("{n}.dat")), body)?;
        }
    }
    let summary = serde_json::json!({
        "schema": atgeo::report::SCHEMA,
        "input": a.input.display().to_string(),
        "hard_failures": hard,
        "partial": partial,
        "lines": lines,
    });
    fs::write(a.out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    for l in &lines {
        println!("{l}");
    }
    if partial > 0 {
        eprintln!("warning: {partial} intervals not certified");
    }
    Ok(if hard > 0 { Verdict::HardFailure } else { Verdict::Pass })
}

fn run_reproduce(a: ReproduceArgs) -> anyhow::Result<Verdict> {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(k) = a.k {
        cfg.k = k;
    }
    if let Some(d) = a.depth {
        cfg.depth = d;
    }
    if let Some(g) = a.grid {
        cfg.grid = g;
    }
    if let Some(t) = a.tol {
        cfg.tol = t;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    let bundle = reproduce(&cfg)?;
    bundle.write(&a.out, a.dat).with_context(|| format!("writing {}", a.out.display()))?;
    for c in &bundle.summary.checks {
        println!("{:<26} {} {}", c.anchor, if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    if let Some(at) = &bundle.aborted_at {
        eprintln!("hard failure in {at}; run aborted");
        return Ok(Verdict::HardFailure);
    }
    if bundle.summary.partial > 0 {
        eprintln!("warning: {} intervals not certified", bundle.summary.partial);
    }
    Ok(if bundle.summary.failed > 0 { Verdict::HardFailure } else { Verdict::Pass })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Certify(a) => certify(a),
        Command::Reproduce(a) => run_reproduce(a),
    };
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::HardFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

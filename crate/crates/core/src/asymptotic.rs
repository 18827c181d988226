//! Asymptotic pairing quantities, the fundamental inequalities, the
//! first-order variation of the distance, and tangent-space norms.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::beltrami::BeltramiSpec;
use crate::certify::{CertifiedInterval, Status};
use crate::error::{Error, Result};
use crate::geodesic::{certify_distance, FamilyKind, GeodesicFamily, DEFAULT_DEPTH};
use crate::quad::{pairing_limsup, DegeneratingFamily, Parity};
use crate::reich::MAX_DEPTH;

/// Limits of the three pairings along one degenerating sequence, plus the
/// `h*` envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticQuantities {
    /// `lim |Re ∫∫ μφ/(1-|μ|²)|` after aligning the phase of the sequence.
    pub i_lower: f64,
    /// `lim |∫∫ μφ|`.
    pub j_lower: f64,
    /// `lim ∫∫ |μ|²|φ|/(1-|μ|²)`.
    pub delta_lower: f64,
    pub upper_envelope: f64,
    /// Parity of the schedule annuli the sequence was restricted to.
    pub parity: Parity,
    pub method: String,
}

/// `(weight, coefficient)` pairs that the members of `family` see in the
/// limit on annuli of parity `j`.
fn limit_weights(spec: &BeltramiSpec, family: &DegeneratingFamily, j: usize) -> Vec<(f64, Complex64)> {
    let sectors = &spec.tail.sectors;
    match family {
        DegeneratingFamily::Peaked { target, .. } => {
            let hits: Vec<_> = sectors.iter().filter(|s| s.arc.contains_closed(target.angle())).collect();
            let w = 1.0 / hits.len().max(1) as f64;
            hits.into_iter().map(|s| (w, s.coefficient(j))).collect()
        }
        _ => sectors.iter().map(|s| (s.arc.width / TAU, s.coefficient(j))).collect(),
    }
}

/// Limits for specs whose tail follows the family's schedule with no
/// offsets; the weight `1/(1-|μ|²)` is then constant on each tail sector.
pub fn estimate_ijdelta(spec: &BeltramiSpec, family: &DegeneratingFamily) -> Result<AsymptoticQuantities> {
    let h = spec.h_star();
    if h >= 1.0 {
        return Err(Error::Precondition(format!("h*(μ) = {h} must be < 1")));
    }
    let (schedule, parity) = match family {
        DegeneratingFamily::ScheduleMonomials { schedule, parity } | DegeneratingFamily::Peaked { schedule, parity, .. } => (schedule, *parity),
        DegeneratingFamily::Pushed { .. } => return Err(Error::Precondition("closed-form estimates need a schedule family".into())),
    };
    let tail = &spec.tail;
    let zero_tail = tail.is_zero() || tail.start.is_one();
    if !zero_tail {
        match &tail.schedule {
            Some(s) if s.same_geometry(schedule, MAX_DEPTH) => {}
            _ => return Err(Error::Precondition("the tail does not follow the family's schedule".into())),
        }
        if tail.sectors.iter().any(|s| s.offset.norm() > 0.0) {
            return Err(Error::Precondition("tail offsets make the weight non-constant".into()));
        }
    }
    if spec.cells.iter().any(|c| c.r_out.is_one()) {
        return Err(Error::Precondition("cells reaching the boundary are not supported".into()));
    }
    let mut best = AsymptoticQuantities {
        i_lower: 0.0,
        j_lower: 0.0,
        delta_lower: 0.0,
        upper_envelope: h,
        parity,
        method: format!("{}:closed-form-limit", family.tag()),
    };
    if zero_tail {
        return Ok(best);
    }
    let parities: &[(usize, Parity)] = match parity {
        Parity::All => &[(1, Parity::Odd), (2, Parity::Even)],
        Parity::Odd => &[(1, Parity::Odd)],
        Parity::Even => &[(2, Parity::Even)],
    };
    let mut first = true;
    for &(j, p) in parities {
        let w = limit_weights(spec, family, j);
        let jv = w.iter().map(|(x, c)| c * *x).sum::<Complex64>().norm();
        let iv = w.iter().map(|(x, c)| c * (*x / (1.0 - c.norm_sqr()))).sum::<Complex64>().norm();
        let dv: f64 = w.iter().map(|(x, c)| x * c.norm_sqr() / (1.0 - c.norm_sqr())).sum();
        if first || jv > best.j_lower {
            best.j_lower = jv;
            best.i_lower = iv;
            best.delta_lower = dv;
            best.parity = p;
            first = false;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalReport {
    pub quantities: AsymptoticQuantities,
    pub h: CertifiedInterval,
    /// `h/(1+h) + δ - I`.
    pub margin_upper: f64,
    /// `I - (h/(1-h) - δ)`.
    pub margin_lower: f64,
    /// Whether the instance counts (the `h` sandwich closed).
    pub certified: bool,
    pub pass: bool,
}

/// Both asymptotic fundamental inequalities along the family's sequence,
/// with `h` from the certified sandwich.
pub fn check_fundamental_inequalities(spec: &BeltramiSpec, family: &DegeneratingFamily, depth: usize, tol: f64) -> Result<FundamentalReport> {
    let q = estimate_ijdelta(spec, family)?;
    let hs = pairing_limsup(spec, family, depth, tol)?;
    let h = hs.upper;
    let margin_upper = h / (1.0 + h) + q.delta_lower - q.i_lower;
    let margin_lower = q.i_lower - (h / (1.0 - h) - q.delta_lower);
    let certified = hs.is_certified();
    Ok(FundamentalReport {
        pass: !certified || (margin_upper >= -1e-9 && margin_lower >= -1e-9),
        quantities: q,
        h: hs,
        margin_upper,
        margin_lower,
        certified,
    })
}

pub const DEFAULT_T_SCHEDULE: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationRow {
    pub t: f64,
    pub distance: f64,
    pub ratio: f64,
    pub residual: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationReport {
    pub limit: CertifiedInterval,
    pub rows: Vec<VariationRow>,
    /// `2q(t/2) - q(t)` from the two smallest `t`, minus the limit.
    pub richardson_residual: f64,
    pub decreasing: bool,
    pub pass: bool,
}

/// `d_AT([[tμ]], [[tν]])/t` against the pairing norm of `μ - ν`.
pub fn binary_variation_check(mu: &BeltramiSpec, nu: &BeltramiSpec, t_schedule: &[f64], family: &DegeneratingFamily, tol: f64) -> Result<VariationReport> {
    if t_schedule.len() < 2 || t_schedule.windows(2).any(|w| !(w[1] < w[0])) || t_schedule.iter().any(|t| *t <= 0.0) {
        return Err(Error::Precondition("t schedule must be positive and strictly decreasing".into()));
    }
    let diff = mu.sub(nu)?;
    let limit = pairing_limsup(&diff, family, DEFAULT_DEPTH, 1e-12)?;
    let j = limit.lower;
    let fams = [family.clone()];
    let mut rows = Vec::new();
    for &t in t_schedule {
        let c = Complex64::new(t, 0.0);
        let iv = certify_distance(&mu.scale(c), &nu.scale(c), &fams, DEFAULT_DEPTH, 1e-12)?;
        let d = 0.5 * (iv.lower + iv.upper);
        rows.push(VariationRow {
            t,
            distance: d,
            ratio: d / t,
            residual: (d / t - j).abs(),
            status: iv.status,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].residual < w[0].residual || w[0].residual == 0.0 && w[1].residual == 0.0);
    let n = rows.len();
    let (a, b) = (&rows[n - 2], &rows[n - 1]);
    let ratio = a.t / b.t;
    let extrapolated = (ratio * b.ratio - a.ratio) / (ratio - 1.0);
    let richardson_residual = (extrapolated - j).abs();
    let all_certified = limit.is_certified() && rows.iter().all(|r| r.status == Status::Certified);
    Ok(VariationReport {
        pass: all_certified && decreasing && b.residual <= tol && richardson_residual <= 1e-3,
        limit,
        rows,
        richardson_residual,
        decreasing,
    })
}

/// Norm of the tangent class `[[spec]]`: lower end from the best family,
/// upper end from `h*`.
pub fn az_norm_sandwich(spec: &BeltramiSpec, families: &[DegeneratingFamily], depth: usize, tol: f64) -> Result<CertifiedInterval> {
    let mut best: Option<CertifiedInterval> = None;
    let h = spec.h_star();
    let settled: Vec<&DegeneratingFamily> = families.iter().filter(|f| f.closed_form_limit(spec).is_some_and(|l| l >= h)).take(1).collect();
    let pool: Vec<&DegeneratingFamily> = if settled.is_empty() { families.iter().collect() } else { settled };
    for f in pool {
        let iv = pairing_limsup(spec, f, depth, tol)?;
        if best.as_ref().is_none_or(|b| iv.lower > b.lower) {
            best = Some(iv);
        }
    }
    best.ok_or_else(|| Error::Precondition("no degenerating family given".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AzRow {
    pub s: f64,
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub target: f64,
    pub status: Status,
    pub hard_failure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AzReport {
    pub rows: Vec<AzRow>,
    pub max_deviation: f64,
    pub hard_failures: usize,
    pub pass: bool,
}

/// Checks `‖[[μ_s - μ_t]]‖ = |s - t|` over all grid pairs.
pub fn certify_az_geodesic(family: &GeodesicFamily, grid: &[f64], tol: f64) -> Result<AzReport> {
    if !matches!(family.kind, FamilyKind::Infinitesimal { .. }) {
        return Err(Error::Precondition("tangent-space certification needs an infinitesimal family".into()));
    }
    if grid.len() < 2 {
        return Err(Error::Precondition("the grid needs at least two points".into()));
    }
    let specs: Vec<BeltramiSpec> = grid.iter().map(|&t| family.eval(t)).collect::<Result<_>>()?;
    let fams = family.certifiers();
    let mut rows = Vec::new();
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let diff = specs[j].sub(&specs[i])?;
            let iv = az_norm_sandwich(&diff, &fams, DEFAULT_DEPTH, tol)?;
            let target = (grid[j] - grid[i]).abs();
            rows.push(AzRow {
                s: grid[i],
                t: grid[j],
                lower: iv.lower,
                upper: iv.upper,
                target,
                status: iv.status,
                hard_failure: iv.upper < target - tol,
            });
        }
    }
    let max_deviation = rows
        .iter()
        .map(|r| (r.lower - r.target).abs().max((r.upper - r.target).abs()))
        .fold(0.0, f64::max);
    let hard_failures = rows.iter().filter(|r| r.hard_failure).count();
    Ok(AzReport {
        pass: hard_failures == 0 && max_deviation <= tol,
        rows,
        max_deviation,
        hard_failures,
    })
}

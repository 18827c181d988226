//! Geodesic and straight-line families built on the twist schedule, and
//! their certification against the hyperbolic distance.

pub mod sigma;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beltrami::{combo_bounds, combo_spec, BeltramiSpec, NormClass, SectorAnnularCell, TailRule, TailSector, TwistTerm};
use crate::certify::{CertifiedInterval, Status};
use crate::error::{Error, Result};
use crate::geometry::{wrap_pi, Arc, BoundaryPoint};
use crate::metric::{hyperbolic_distance, HyperbolicParam};
use crate::quad::{pairing_limsup, DegeneratingFamily, Parity};
use crate::reich::ReichSchedule;
pub use sigma::{check_sigma_admissible, AdmissibilityReport, SigmaClass, SigmaProfile};

/// Members per family used for lower bounds.
pub const DEFAULT_DEPTH: usize = 12;

/// Default number of grid points per axis.
pub const DEFAULT_GRID: usize = 17;

/// The schedule, how many annuli are materialized as cells, and an
/// optional boundary sector (applied from annulus `prefix_depth + 1` on)
/// where the coefficients may differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistLayout {
    pub schedule: ReichSchedule,
    pub prefix_depth: usize,
    pub patch: Option<Arc>,
}

/// Amplitudes of the unit twist `z̄^{n_j}/|z|^{n_j}` by parity of `j`,
/// outside and inside the patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionCoefs {
    pub odd_out: f64,
    pub even_out: f64,
    pub odd_in: f64,
    pub even_in: f64,
}

impl RegionCoefs {
    pub fn uniform(odd: f64, even: f64) -> Self {
        Self {
            odd_out: odd,
            even_out: even,
            odd_in: odd,
            even_in: even,
        }
    }

    fn values(&self) -> [f64; 4] {
        [self.odd_out, self.even_out, self.odd_in, self.even_in]
    }
}

impl TwistLayout {
    pub fn new(schedule: ReichSchedule, prefix_depth: usize, patch: Option<Arc>) -> Result<Self> {
        if prefix_depth < 1 || prefix_depth > schedule.depth() {
            return Err(Error::Precondition(format!(
                "prefix depth {prefix_depth} must lie in 1..={}",
                schedule.depth()
            )));
        }
        if let Some(p) = patch {
            if p.is_full() {
                return Err(Error::Precondition("the patch must be a proper sector".into()));
            }
        }
        Ok(Self {
            schedule,
            prefix_depth,
            patch,
        })
    }

    /// Centre of the patch.
    pub fn patch_point(&self) -> Option<BoundaryPoint> {
        self.patch.map(|a| BoundaryPoint::new(a.lo + 0.5 * a.width))
    }

    /// The point opposite the patch centre (or angle 0 without a patch).
    pub fn far_point(&self) -> BoundaryPoint {
        self.patch
            .map_or(BoundaryPoint::new(0.0), |a| BoundaryPoint::new(a.lo + 0.5 * a.width + PI))
    }

    pub fn spec(&self, c: RegionCoefs, class: NormClass) -> Result<BeltramiSpec> {
        if c.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("non-finite coefficient".into()));
        }
        let cx = |v: f64| Complex64::new(v, 0.0);
        let cells = self
            .schedule
            .annuli(self.prefix_depth)?
            .into_iter()
            .map(|a| SectorAnnularCell {
                r_in: a.inner,
                r_out: a.outer,
                arc: Arc::FULL,
                terms: crate::beltrami::merge_terms(vec![TwistTerm::new(
                    cx(if a.is_odd() { c.odd_out } else { c.even_out }),
                    a.degree,
                )]),
            })
            .collect();
        let sector = |arc: Arc, odd: f64, even: f64| TailSector {
            arc,
            odd: cx(odd),
            even: cx(even),
            offset: Complex64::new(0.0, 0.0),
        };
        let sectors = match self.patch {
            None => vec![sector(Arc::FULL, c.odd_out, c.even_out)],
            Some(p) => vec![
                sector(p, c.odd_in, c.even_in),
                sector(Arc { lo: p.hi(), width: TAU - p.width }, c.odd_out, c.even_out),
            ],
        };
        let tail = TailRule::scheduled(self.schedule.clone(), self.prefix_depth + 1, sectors)?;
        BeltramiSpec::new(cells, tail, class)
    }
}

/// Which of the η coefficients of the closed loop: `1` is `κ` on odd
/// annuli, `2` is `κ` on even annuli, `3 = -1`, `4 = -2`.
fn eta_parts(i: usize, k: f64) -> Result<(bool, f64)> {
    match i {
        1 => Ok((true, k)),
        2 => Ok((false, k)),
        3 => Ok((true, -k)),
        4 => Ok((false, -k)),
        _ => Err(Error::Precondition(format!("η index {i} must be 1..=4"))),
    }
}

pub fn eta_coefs(i: usize, k: f64) -> Result<RegionCoefs> {
    let (odd, v) = eta_parts(i, k)?;
    Ok(if odd { RegionCoefs::uniform(v, 0.0) } else { RegionCoefs::uniform(0.0, v) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum FamilyKind {
    /// `tμ/h` off the patch, `tμ/h + σ(t)δ` on it; the base is damped to
    /// `ρ` on the patch and `δ = β·u` there.
    Nonsubstantial { h: f64, rho: f64, beta: f64, sigma: SigmaProfile },
    /// `σ(t)·α` on odd annuli and `t` on even ones.
    SubstantialExample { alpha: f64, sigma: SigmaProfile },
    /// `t·μ/h` for `|t| <= h`; beyond, `t·μ/h` on the patch (the cap) and
    /// `sgn(t)·μ` elsewhere.
    StraightLine { h: f64 },
    /// Edge `η_from → η_to` of the closed loop.
    LoopEdge { from: usize, to: usize, k: f64 },
    /// Tangent-space family `tμ/b + σ(t)δ`; the base is `ρ` and `b` on the
    /// two regions and `δ = β·u` on the first. With `by_parity` the regions
    /// are the odd and even annuli, else the patch and its complement.
    Infinitesimal { b: f64, rho: f64, beta: f64, sigma: SigmaProfile, by_parity: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicFamily {
    pub layout: TwistLayout,
    pub kind: FamilyKind,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl GeodesicFamily {
    pub fn k(&self) -> f64 {
        self.layout.schedule.k.get()
    }

    /// Parameter interval of the family.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            FamilyKind::Nonsubstantial { h, .. } => (0.0, *h),
            FamilyKind::SubstantialExample { .. } | FamilyKind::LoopEdge { .. } => (0.0, self.k()),
            FamilyKind::StraightLine { .. } => (-1.0, 1.0),
            FamilyKind::Infinitesimal { b, .. } => (0.0, *b),
        }
    }

    pub fn coefs(&self, t: f64) -> Result<RegionCoefs> {
        let (lo, hi) = self.domain();
        let open = matches!(self.kind, FamilyKind::StraightLine { .. });
        let inside = if open { t > lo && t < hi } else { t >= lo - 1e-15 && t <= hi + 1e-15 };
        if !inside {
            return Err(Error::Precondition(format!("t = {t} outside the family domain [{lo}, {hi}]")));
        }
        Ok(match &self.kind {
            FamilyKind::Nonsubstantial { h, rho, beta, sigma } => {
                let inner = t * rho / h + sigma.eval(t)? * beta;
                RegionCoefs {
                    odd_out: t,
                    even_out: t,
                    odd_in: inner,
                    even_in: inner,
                }
            }
            FamilyKind::SubstantialExample { alpha, sigma } => RegionCoefs::uniform(sigma.eval(t)? * alpha, t),
            FamilyKind::StraightLine { h } => {
                if t.abs() <= *h {
                    RegionCoefs::uniform(t, t)
                } else {
                    let out = if t >= 0.0 { *h } else { -*h };
                    RegionCoefs {
                        odd_out: out,
                        even_out: out,
                        odd_in: t,
                        even_in: t,
                    }
                }
            }
            FamilyKind::LoopEdge { from, to, k } => {
                let (odd_a, sa) = eta_parts(*from, 1.0)?;
                let (odd_b, sb) = eta_parts(*to, 1.0)?;
                let s = (k - t) / (1.0 - t * k);
                let (a, b) = (sa * s, sb * t);
                if odd_a {
                    RegionCoefs::uniform(a, b)
                } else {
                    debug_assert!(odd_b);
                    RegionCoefs::uniform(b, a)
                }
            }
            FamilyKind::Infinitesimal { b, rho, beta, sigma, by_parity } => {
                let first = t * rho / b + sigma.eval(t)? * beta;
                if *by_parity {
                    RegionCoefs::uniform(first, t)
                } else {
                    RegionCoefs {
                        odd_out: t,
                        even_out: t,
                        odd_in: first,
                        even_in: first,
                    }
                }
            }
        })
    }

    fn class(&self) -> NormClass {
        match self.kind {
            FamilyKind::Infinitesimal { .. } => NormClass::Unrestricted,
            _ => NormClass::UnitBall,
        }
    }

    pub fn eval(&self, t: f64) -> Result<BeltramiSpec> {
        self.layout.spec(self.coefs(t)?, self.class())
    }

    /// Degenerating families used for lower bounds.
    pub fn certifiers(&self) -> Vec<DegeneratingFamily> {
        let s = &self.layout.schedule;
        let mut out = vec![
            DegeneratingFamily::monomials(s, Parity::Even),
            DegeneratingFamily::monomials(s, Parity::Odd),
        ];
        if let Some(p) = self.layout.patch_point() {
            out.push(DegeneratingFamily::peaked(s, p, Parity::All));
            out.push(DegeneratingFamily::peaked(s, self.layout.far_point(), Parity::All));
        }
        out
    }

    /// Whether the family is expected to certify every pair exactly.
    pub fn expects_certified(&self) -> bool {
        !matches!(self.kind, FamilyKind::Nonsubstantial { .. })
    }
}

fn require(ok: bool, what: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(what.into()))
    }
}

/// Geodesic from 0 to a non-substantial class, perturbed inside the patch.
pub fn family_nonsubstantial(layout: TwistLayout, sigma: SigmaProfile, h: f64, rho: f64, beta: f64) -> Result<GeodesicFamily> {
    let patch = layout
        .patch
        .ok_or_else(|| Error::Precondition("the perturbation needs a patch sector".into()))?;
    let k = layout.schedule.k.get();
    let base = layout.spec(
        RegionCoefs {
            odd_out: k,
            even_out: k,
            odd_in: rho,
            even_in: rho,
        },
        NormClass::UnitBall,
    )?;
    require(close(base.sup_modulus(), h), format!("sup |μ| = {} must equal h = {h}", base.sup_modulus()))?;
    require(close(base.h_star(), h), format!("h*(μ) = {} must equal h = {h}", base.h_star()))?;
    let q = BoundaryPoint::new(patch.lo + 0.5 * patch.width);
    require(
        base.boundary_dilatation(q) <= rho && rho < h,
        format!("need h*_q(μ) <= ρ < h, got h*_q = {}, ρ = {rho}", base.boundary_dilatation(q)),
    )?;
    let delta = layout.spec(
        RegionCoefs {
            odd_out: 0.0,
            even_out: 0.0,
            odd_in: beta,
            even_in: beta,
        },
        NormClass::UnitBall,
    )?;
    require(
        delta.sup_modulus() <= beta && beta < h - rho,
        format!("need sup |δ| <= β < h - ρ, got β = {beta}, h - ρ = {}", h - rho),
    )?;
    let rep = check_sigma_admissible(&sigma, SigmaClass::Sigma { rho, beta, h }, 101)?;
    if !rep.admissible {
        return Err(Error::SigmaRejected(format!("condition (B) fails: {rep:?}")));
    }
    Ok(GeodesicFamily {
        layout,
        kind: FamilyKind::Nonsubstantial { h, rho, beta, sigma },
    })
}

/// Odd annuli reparametrized by `σ`, even annuli linear in `t`.
pub fn family_substantial_example(schedule: &ReichSchedule, prefix_depth: usize, sigma: SigmaProfile, alpha: f64) -> Result<GeodesicFamily> {
    let k = schedule.k.get();
    require(alpha > 0.0 && alpha * k < 1.0, format!("α = {alpha} must lie in (0, 1/k)"))?;
    let rep = check_sigma_admissible(&sigma, SigmaClass::SigmaPrime { alpha, k }, 101)?;
    if !rep.admissible {
        return Err(Error::SigmaRejected(format!("condition (B) fails: {rep:?}")));
    }
    Ok(GeodesicFamily {
        layout: TwistLayout::new(schedule.clone(), prefix_depth, None)?,
        kind: FamilyKind::SubstantialExample { alpha, sigma },
    })
}

/// Straight line through 0 and `[[κ]]`, bending off at `|t| = h` outside the cap.
pub fn family_straight_line(layout: TwistLayout, h: f64) -> Result<GeodesicFamily> {
    require(layout.patch.is_some(), "the straight line needs a cap sector")?;
    let k = layout.schedule.k.get();
    require(close(h, k), format!("h = {h} must equal sup |μ| = h*(μ) = {k}"))?;
    Ok(GeodesicFamily {
        layout,
        kind: FamilyKind::StraightLine { h },
    })
}

/// The four edges `η₁→η₂→η₃→η₄→η₁`.
pub fn family_closed_loop(schedule: &ReichSchedule, prefix_depth: usize) -> Result<[GeodesicFamily; 4]> {
    let layout = TwistLayout::new(schedule.clone(), prefix_depth, None)?;
    let k = schedule.k.get();
    let edge = |from, to| GeodesicFamily {
        layout: layout.clone(),
        kind: FamilyKind::LoopEdge { from, to, k },
    };
    Ok([edge(1, 2), edge(2, 3), edge(3, 4), edge(4, 1)])
}

/// Tangent-space family; `by_parity` selects odd/even regions instead of
/// the patch.
pub fn family_infinitesimal(layout: TwistLayout, sigma: SigmaProfile, b: f64, rho: f64, beta: f64, by_parity: bool) -> Result<GeodesicFamily> {
    require(by_parity || layout.patch.is_some(), "the sector instance needs a patch")?;
    require(0.0 < rho && rho < b && beta < b - rho, format!("need 0 < ρ < b and β < b - ρ, got ρ = {rho}, β = {beta}, b = {b}"))?;
    let rep = check_sigma_admissible(&sigma, SigmaClass::SigmaDoublePrime { rho, beta, b }, 101)?;
    if !rep.admissible {
        return Err(Error::SigmaRejected(format!("condition (B) fails: {rep:?}")));
    }
    Ok(GeodesicFamily {
        layout,
        kind: FamilyKind::Infinitesimal { b, rho, beta, sigma, by_parity },
    })
}

/// `[lower, upper]` for `d_AT([[a]], [[b]])`: the upper end from the
/// boundary dilatation of the Möbius combination, the lower end from the
/// best family pairing with the combination (when it is representable).
pub fn certify_distance(a: &BeltramiSpec, b: &BeltramiSpec, families: &[DegeneratingFamily], depth: usize, tol: f64) -> Result<CertifiedInterval> {
    let bounds = combo_bounds(a, b)?;
    let upper = bounds.boundary.atanh();
    let mut lower = 0.0;
    let mut method = String::from("none:mixed-cells");
    if let Some(c) = combo_spec(a, b)? {
        method = String::from("none");
        let target = bounds.boundary;
        // a family whose exact limit already meets the upper end settles it
        let settled: Vec<&DegeneratingFamily> = families
            .iter()
            .filter(|f| f.closed_form_limit(&c).is_some_and(|l| l >= target))
            .take(1)
            .collect();
        let pool: Vec<&DegeneratingFamily> = if settled.is_empty() { families.iter().collect() } else { settled };
        for f in pool {
            let iv = pairing_limsup(&c, f, depth, 0.0)?;
            if iv.lower > lower || method == "none" {
                lower = iv.lower.max(lower);
                method = iv.lower_method;
            }
        }
    }
    Ok(CertifiedInterval::new(lower.atanh(), upper, method, "combo-boundary-dilatation", tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRow {
    pub s: f64,
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub target: f64,
    pub status: Status,
    /// Upper bound below the target: would contradict the geodesic claim.
    pub hard_failure: bool,
    pub within_tol: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicReport {
    pub rows: Vec<PairRow>,
    pub max_deviation: f64,
    pub hard_failures: usize,
    pub partial: usize,
    pub pass: bool,
}

/// Default grid: `n` equispaced points on `[lo, hi]` plus the profile knots.
pub fn default_grid(family: &GeodesicFamily, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect();
    let knots = match &family.kind {
        FamilyKind::Nonsubstantial { sigma, .. } | FamilyKind::SubstantialExample { sigma, .. } | FamilyKind::Infinitesimal { sigma, .. } => sigma.knots(),
        _ => Vec::new(),
    };
    g.extend(knots.into_iter().filter(|t| *t >= lo && *t <= hi));
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    g
}

/// Certifies `d_AT(μ_s, μ_t) = d_H(s, t)` over all grid pairs.
pub fn certify_geodesic(family: &GeodesicFamily, grid: &[f64], tol: f64) -> Result<GeodesicReport> {
    if grid.len() < 2 {
        return Err(Error::Precondition("the grid needs at least two points".into()));
    }
    let specs: Vec<BeltramiSpec> = grid.iter().map(|&t| family.eval(t)).collect::<Result<_>>()?;
    let fams = family.certifiers();
    let mut rows = Vec::new();
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let (s, t) = (grid[i], grid[j]);
            let iv = certify_distance(&specs[i], &specs[j], &fams, DEFAULT_DEPTH, tol)?;
            let target = hyperbolic_distance(HyperbolicParam::new(s)?, HyperbolicParam::new(t)?);
            rows.push(PairRow {
                s,
                t,
                lower: iv.lower,
                upper: iv.upper,
                target,
                status: iv.status,
                hard_failure: iv.upper < target - tol,
                within_tol: iv.within(target, tol),
            });
        }
    }
    summarize(rows, family.expects_certified(), tol)
}

fn summarize(rows: Vec<PairRow>, need_certified: bool, tol: f64) -> Result<GeodesicReport> {
    let max_deviation = rows
        .iter()
        .map(|r| (r.lower - r.target).abs().max((r.upper - r.target).abs()))
        .fold(0.0, f64::max);
    let hard_failures = rows.iter().filter(|r| r.hard_failure).count();
    let partial = rows.iter().filter(|r| r.status != Status::Certified).count();
    let pass = hard_failures == 0
        && rows.iter().all(|r| {
            if need_certified {
                r.status == Status::Certified && r.within_tol
            } else {
                r.within_tol || (r.upper - r.target).abs() <= tol
            }
        });
    Ok(GeodesicReport {
        rows,
        max_deviation,
        hard_failures,
        partial,
        pass,
    })
}

/// Certified lower bound on `sup limsup |∫∫ (μ¹ - μ²) φ_n|` for the
/// directions `μⁱ = evalᵢ(t)/t` of two families at `t`.
pub fn distinctness_gap(f1: &GeodesicFamily, f2: &GeodesicFamily, t_probe: f64, family: &DegeneratingFamily) -> Result<f64> {
    require(t_probe > 0.0, "t_probe must be positive")?;
    let a = f1.eval(t_probe)?;
    let b = f2.eval(t_probe)?;
    let diff = BeltramiSpec::linear(&a, 1.0 / t_probe, &b, -1.0 / t_probe)?;
    Ok(pairing_limsup(&diff, family, DEFAULT_DEPTH, 0.0)?.lower)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationRow {
    pub t: f64,
    pub point: f64,
    pub boundary_dilatation: f64,
    pub certified_h: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationReport {
    pub rows: Vec<PropagationRow>,
    pub additivity_residual: f64,
    pub pass: bool,
}

/// `½ log((1+x)/(1-x))`.
fn half_log_ratio(x: f64) -> f64 {
    0.5 * ((1.0 + x) / (1.0 - x)).ln()
}

/// Residual of `½logH((t+a)/(1+ta)) = ½logH(t) + ½logH(a)`.
pub fn additivity_residual(t: f64, a: f64) -> f64 {
    let h = (t + a) / (1.0 + t * a);
    (half_log_ratio(h) - half_log_ratio(t) - half_log_ratio(a)).abs()
}

/// Checks `h*_p(μ_t) = h(μ_t)` for every grid `t` and sample `p`, with
/// `h(μ_t)` taken from a certified sandwich.
pub fn substantial_propagation_check(family: &GeodesicFamily, grid: &[f64], points: &[BoundaryPoint], tol: f64) -> Result<PropagationReport> {
    let fams = family.certifiers();
    let mut rows = Vec::new();
    for &t in grid {
        let spec = family.eval(t)?;
        let mut h = 0.0;
        let mut certified = spec.h_star() == 0.0;
        for f in &fams {
            let iv = pairing_limsup(&spec, f, DEFAULT_DEPTH, tol)?;
            if iv.is_certified() {
                h = iv.upper;
                certified = true;
            }
        }
        for &p in points {
            let bd = spec.boundary_dilatation(p);
            rows.push(PropagationRow {
                t,
                point: p.angle(),
                boundary_dilatation: bd,
                certified_h: h,
                ok: certified && (bd - h).abs() <= tol,
            });
        }
    }
    let additivity = additivity_residual(0.3, 0.4);
    Ok(PropagationReport {
        pass: rows.iter().all(|r| r.ok) && additivity <= 1e-12,
        rows,
        additivity_residual: additivity,
    })
}

/// Patch arc of half-width `w` around angle `center`.
pub fn patch_arc(center: f64, w: f64) -> Result<Arc> {
    require(w > 0.0 && w < PI, format!("patch half-width {w} must lie in (0, π)"))?;
    Arc::centered(wrap_pi(center), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{mobius_difference, DilatationValue};
    use crate::reich::build_schedule;

    fn sched(k: f64) -> ReichSchedule {
        build_schedule(DilatationValue::new(k).unwrap(), 8).unwrap()
    }

    #[test]
    fn loop_edges_and_etas() {
        let s = sched(0.5);
        let edges = family_closed_loop(&s, 8).unwrap();
        let e12 = &edges[0];
        let start = e12.eval(0.0).unwrap();
        let end = e12.eval(0.5).unwrap();
        let eta1 = TwistLayout::new(s.clone(), 8, None).unwrap().spec(eta_coefs(1, 0.5).unwrap(), NormClass::UnitBall).unwrap();
        let eta2 = TwistLayout::new(s.clone(), 8, None).unwrap().spec(eta_coefs(2, 0.5).unwrap(), NormClass::UnitBall).unwrap();
        assert_eq!(start, eta1);
        assert!(crate::beltrami::cellwise_combo_bound(&end, &eta2).unwrap() < 1e-15);
        for e in &edges {
            for t in [0.0, 0.125, 0.25, 0.375, 0.5] {
                assert!((e.eval(t).unwrap().sup_modulus() - 0.5f64.max(0.0)).abs() < 0.5);
            }
        }
        let (a, b) = (e12.eval(0.1).unwrap(), e12.eval(0.3).unwrap());
        let v = crate::beltrami::cellwise_combo_bound(&a, &b).unwrap();
        assert!((v - mobius_difference(0.3, 0.1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn substantial_example_endpoints() {
        let s = sched(0.5);
        let sigma = SigmaProfile::lambda_ramp(0.4, 0.2, 0.5).unwrap();
        let f = family_substantial_example(&s, 8, sigma, 0.3).unwrap();
        assert_eq!(f.eval(0.0).unwrap().sup_modulus(), 0.0);
        let mu = crate::reich::build_modulated(&s, 0.3, 1.0).unwrap();
        assert!(crate::beltrami::cellwise_combo_bound(&f.eval(0.5).unwrap(), &mu).unwrap() < 1e-15);
        let c = f.coefs(0.1).unwrap();
        assert!((c.odd_out - 0.4 * 0.1 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn straight_line_branches() {
        let s = sched(0.5);
        let layout = TwistLayout::new(s, 8, Some(patch_arc(0.0, 0.3).unwrap())).unwrap();
        let f = family_straight_line(layout, 0.5).unwrap();
        let c = f.coefs(0.8).unwrap();
        assert_eq!((c.odd_in, c.odd_out), (0.8, 0.5));
        let m = f.coefs(-0.8).unwrap();
        assert_eq!((m.odd_in, m.odd_out), (-0.8, -0.5));
        assert_eq!(f.eval(0.8).unwrap().sup_modulus(), f.eval(-0.8).unwrap().sup_modulus());
        assert_eq!(f.coefs(0.3).unwrap(), RegionCoefs::uniform(0.3, 0.3));
    }

    #[test]
    fn nonsubstantial_preconditions() {
        let s = sched(0.5);
        let layout = TwistLayout::new(s, 8, Some(patch_arc(1.0, 0.4).unwrap())).unwrap();
        let sigma = SigmaProfile::tent(0.5, 0.1, 0.5).unwrap();
        let f = family_nonsubstantial(layout.clone(), sigma.clone(), 0.5, 0.25, 0.2).unwrap();
        assert_eq!(f.eval(0.5).unwrap(), layout.spec(RegionCoefs { odd_out: 0.5, even_out: 0.5, odd_in: 0.25, even_in: 0.25 }, NormClass::UnitBall).unwrap());
        for t in [0.05, 0.2, 0.4] {
            assert!((f.eval(t).unwrap().sup_modulus() - t).abs() < 1e-15);
        }
        assert!(family_nonsubstantial(layout.clone(), sigma.clone(), 0.5, 0.25, 0.3).is_err());
        assert!(family_nonsubstantial(layout, sigma, 0.4, 0.25, 0.1).is_err());
    }

    #[test]
    fn distance_of_identical_specs_is_zero() {
        let s = sched(0.5);
        let kappa = crate::reich::build_kappa(&s).unwrap();
        let iv = certify_distance(&kappa, &kappa, &[DegeneratingFamily::monomials(&s, Parity::All)], 6, 1e-12).unwrap();
        assert_eq!((iv.lower, iv.upper, iv.status), (0.0, 0.0, Status::Certified));
    }

    #[test]
    fn additivity_identity() {
        assert!(additivity_residual(0.3, 0.4) < 1e-12);
        let h: f64 = (0.3 + 0.4) / (1.0 + 0.12);
        assert!((h - 0.625).abs() < 1e-15);
    }
}

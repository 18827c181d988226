//! Piecewise Beltrami coefficients: sector-annular cells carrying twist
//! terms `c·z̄ⁿ/|z|ⁿ`, followed by an infinite tail that continues a winding
//! schedule towards the boundary.
//!
//! Moduli are piecewise constant (single-term cells) or depend only on the
//! angle (multi-term cells), so sup-norms and boundary dilatations are
//! finite maxima.

mod combine;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{Arc, BoundaryPoint, Radius};
use crate::reich::{Annulus, ReichSchedule, MAX_DEPTH};

pub use combine::{
    cellwise_combo_bound, combo_bounds, combo_spec, mobius_combine_modulus, ComboBounds,
};

/// Angular samples used for the sup of a multi-term cell.
pub const MIXED_GRID: usize = 65_536;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `amplitude · z̄ⁿ/|z|ⁿ = amplitude · e^{-inθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistTerm {
    pub amplitude: Complex64,
    pub winding: f64,
}

impl TwistTerm {
    pub fn new(amplitude: Complex64, winding: f64) -> Self {
        Self { amplitude, winding }
    }

    pub fn constant(amplitude: Complex64) -> Self {
        Self::new(amplitude, 0.0)
    }

    pub fn at_angle(&self, theta: f64) -> Complex64 {
        if self.winding == 0.0 {
            return self.amplitude;
        }
        self.amplitude * Complex64::from_polar(1.0, -(self.winding * theta).rem_euclid(TAU))
    }
}

/// Sums terms with equal winding and drops zero amplitudes.
pub(crate) fn merge_terms(mut terms: Vec<TwistTerm>) -> Vec<TwistTerm> {
    terms.sort_by(|a, b| a.winding.total_cmp(&b.winding));
    let mut out: Vec<TwistTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.winding == t.winding => last.amplitude += t.amplitude,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.amplitude != ZERO);
    out
}

fn terms_at(terms: &[TwistTerm], theta: f64) -> Complex64 {
    terms.iter().map(|t| t.at_angle(theta)).sum()
}

/// Upper bound on `sup_θ∈arc |Σ terms|`: exact for at most one term, an
/// angular grid plus a derivative bound otherwise.
pub(crate) fn terms_sup(terms: &[TwistTerm], arc: Arc) -> f64 {
    match terms {
        [] => 0.0,
        [t] => t.amplitude.norm(),
        _ => {
            let total: f64 = terms.iter().map(|t| t.amplitude.norm()).sum();
            let lip: f64 = terms.iter().map(|t| t.amplitude.norm() * t.winding).sum();
            let step = arc.width / MIXED_GRID as f64;
            let grid = (0..=MIXED_GRID)
                .map(|i| terms_at(terms, arc.lo + step * i as f64).norm())
                .fold(0.0, f64::max);
            (grid + 0.5 * lip * step).min(total)
        }
    }
}

/// `{r_in <= |z| < r_out, arg z ∈ arc}` carrying a sum of twist terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorAnnularCell {
    pub r_in: Radius,
    pub r_out: Radius,
    pub arc: Arc,
    pub terms: Vec<TwistTerm>,
}

impl SectorAnnularCell {
    pub fn at_angle(&self, theta: f64) -> Complex64 {
        terms_at(&self.terms, theta)
    }

    pub fn sup(&self) -> f64 {
        terms_sup(&self.terms, self.arc)
    }

    pub fn area(&self) -> f64 {
        self.arc.box_area(self.r_in, self.r_out)
    }

    fn contains(&self, r: f64, theta: f64) -> bool {
        self.r_in.value() <= r && r < self.r_out.value() && self.arc.contains(theta)
    }

    fn validate(&self) -> Result<()> {
        self.r_in.validate()?;
        self.r_out.validate()?;
        if !self.r_in.lt(self.r_out) {
            return Err(Error::InvalidSpec(format!(
                "cell radii must satisfy r_in < r_out, got {} and {}",
                self.r_in.value(),
                self.r_out.value()
            )));
        }
        validate_arc(self.arc)?;
        for t in &self.terms {
            if !(t.amplitude.re.is_finite() && t.amplitude.im.is_finite()) {
                return Err(Error::InvalidSpec("non-finite amplitude".into()));
            }
            if !(t.winding >= 0.0 && t.winding.fract() == 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "winding {} is not a nonnegative integer",
                    t.winding
                )));
            }
        }
        Ok(())
    }
}

fn validate_arc(arc: Arc) -> Result<()> {
    if !(arc.lo.is_finite() && arc.width > 0.0 && arc.width <= TAU) {
        return Err(Error::InvalidSpec(format!("bad arc {arc:?}")));
    }
    Ok(())
}

/// One angular sector of the tail. On annulus `E_j` of the schedule the
/// value is `c·e^{-i n_j θ} + offset` with `c = odd` or `even` by the
/// parity of `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSector {
    pub arc: Arc,
    pub odd: Complex64,
    pub even: Complex64,
    #[serde(default)]
    pub offset: Complex64,
}

impl TailSector {
    pub fn coefficient(&self, j: usize) -> Complex64 {
        if j % 2 == 1 {
            self.odd
        } else {
            self.even
        }
    }

    /// Ess-sup of the modulus over the sector tail. Deep annuli have
    /// winding times width far beyond 2π, so every twist phase occurs.
    pub fn sup(&self, scheduled: bool) -> f64 {
        if scheduled {
            self.odd.norm().max(self.even.norm()) + self.offset.norm()
        } else {
            self.offset.norm()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.odd == ZERO && self.even == ZERO && self.offset == ZERO
    }
}

/// Everything outside radius `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailRule {
    /// Continuation of the winding schedule; `None` for a tail without
    /// twists (offsets only).
    pub schedule: Option<ReichSchedule>,
    /// Index of the first annulus in the tail.
    pub first_index: usize,
    pub start: Radius,
    /// Angular partition of the tail; empty means zero.
    pub sectors: Vec<TailSector>,
}

impl TailRule {
    pub fn zero(start: Radius) -> Self {
        Self {
            schedule: None,
            first_index: 1,
            start,
            sectors: Vec::new(),
        }
    }

    /// Offsets only, no twists.
    pub fn constant(start: Radius, sectors: Vec<(Arc, Complex64)>) -> Self {
        Self {
            schedule: None,
            first_index: 1,
            start,
            sectors: sectors
                .into_iter()
                .map(|(arc, offset)| TailSector {
                    arc,
                    odd: ZERO,
                    even: ZERO,
                    offset,
                })
                .collect(),
        }
    }

    /// Tail continuing `schedule` from annulus `first_index` on.
    pub fn scheduled(schedule: ReichSchedule, first_index: usize, sectors: Vec<TailSector>) -> Result<Self> {
        if first_index == 0 || first_index > MAX_DEPTH + 1 {
            return Err(Error::InvalidSpec(format!("tail first index {first_index} out of range")));
        }
        let start = if first_index == 1 {
            Radius::ZERO
        } else {
            schedule.annulus(first_index - 1)?.outer
        };
        Ok(Self {
            schedule: Some(schedule),
            first_index,
            start,
            sectors,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.sectors.iter().all(TailSector::is_zero)
    }

    pub fn is_scheduled(&self) -> bool {
        self.schedule.is_some()
    }

    pub fn sup(&self) -> f64 {
        let s = self.is_scheduled();
        self.sectors.iter().map(|x| x.sup(s)).fold(0.0, f64::max)
    }

    /// Tail annuli `first_index..=last` (scheduled tails only).
    pub fn annuli(&self, last: usize) -> Result<Vec<Annulus>> {
        let sched = self
            .schedule
            .as_ref()
            .ok_or_else(|| Error::Precondition("tail has no schedule".into()))?;
        if last < self.first_index {
            return Ok(Vec::new());
        }
        Ok(sched.annuli(last)?.split_off(self.first_index - 1))
    }

    /// Cells for the tail annuli `first_index..=last`.
    pub fn cells(&self, last: usize) -> Result<Vec<SectorAnnularCell>> {
        let mut out = Vec::new();
        if !self.is_scheduled() {
            return Ok(out);
        }
        for a in self.annuli(last)? {
            out.extend(self.annulus_cells(&a));
        }
        Ok(out)
    }

    fn sector_terms(&self, s: &TailSector, j: usize, degree: f64) -> Vec<TwistTerm> {
        merge_terms(vec![
            TwistTerm::new(s.coefficient(j), degree),
            TwistTerm::constant(s.offset),
        ])
    }

    fn annulus_cells(&self, a: &Annulus) -> Vec<SectorAnnularCell> {
        if self.sectors.is_empty() {
            return vec![SectorAnnularCell {
                r_in: a.inner,
                r_out: a.outer,
                arc: Arc::FULL,
                terms: Vec::new(),
            }];
        }
        self.sectors
            .iter()
            .map(|s| SectorAnnularCell {
                r_in: a.inner,
                r_out: a.outer,
                arc: s.arc,
                terms: self.sector_terms(s, a.index, a.degree),
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        self.start.validate()?;
        for s in &self.sectors {
            validate_arc(s.arc)?;
            for c in [s.odd, s.even, s.offset] {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(Error::InvalidSpec("non-finite tail coefficient".into()));
                }
            }
        }
        match &self.schedule {
            Some(sched) => {
                let expected = TailRule::scheduled(sched.clone(), self.first_index, Vec::new())?.start;
                if expected.gap() != self.start.gap() {
                    return Err(Error::InvalidSpec(format!(
                        "tail start {} does not match annulus {} of the schedule ({})",
                        self.start.value(),
                        self.first_index,
                        expected.value()
                    )));
                }
            }
            None => {
                if self.sectors.iter().any(|s| s.odd != ZERO || s.even != ZERO) {
                    return Err(Error::InvalidSpec("twist coefficients in a tail without schedule".into()));
                }
            }
        }
        if self.sectors.is_empty() {
            return Ok(());
        }
        if self.start.is_one() {
            return Err(Error::InvalidSpec("tail starting at |z| = 1 must have no sectors".into()));
        }
        let total: f64 = self.sectors.iter().map(|s| s.arc.width).sum();
        if (total - TAU).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("tail sectors cover {total} radians, not 2π")));
        }
        for (i, a) in self.sectors.iter().enumerate() {
            for b in &self.sectors[i + 1..] {
                if !a.arc.intersect(b.arc).is_empty() {
                    return Err(Error::InvalidSpec("tail sectors overlap".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormClass {
    /// Sup-norm < 1: a genuine Beltrami coefficient.
    UnitBall,
    /// Any bounded differential (tangent vectors, differences).
    Unrestricted,
}

/// Prefix cells partitioning `|z| < tail.start`, then the tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawSpec")]
pub struct BeltramiSpec {
    pub cells: Vec<SectorAnnularCell>,
    pub tail: TailRule,
    pub norm_class: NormClass,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    cells: Vec<SectorAnnularCell>,
    tail: TailRule,
    norm_class: NormClass,
}

impl TryFrom<RawSpec> for BeltramiSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        BeltramiSpec::new(r.cells, r.tail, r.norm_class)
    }
}

impl BeltramiSpec {
    pub fn new(cells: Vec<SectorAnnularCell>, tail: TailRule, norm_class: NormClass) -> Result<Self> {
        let s = Self {
            cells,
            tail,
            norm_class,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn zero() -> Self {
        Self {
            cells: Vec::new(),
            tail: TailRule::zero(Radius::ZERO),
            norm_class: NormClass::UnitBall,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tail.validate()?;
        let start = self.tail.start;
        let mut area = 0.0;
        for c in &self.cells {
            c.validate()?;
            if start.lt(c.r_out) {
                return Err(Error::InvalidSpec(format!(
                    "cell reaches |z| = {} beyond the tail start {}",
                    c.r_out.value(),
                    start.value()
                )));
            }
            area += c.area();
        }
        let disk = PI * start.value().powi(2);
        if (area - disk).abs() > 1e-9 * disk.max(1e-12) {
            return Err(Error::InvalidSpec(format!(
                "cells cover area {area}, but |z| < {} has area {disk}",
                start.value()
            )));
        }
        for (i, a) in self.cells.iter().enumerate() {
            for b in &self.cells[i + 1..] {
                let radial = a.r_in.lt(b.r_out) && b.r_in.lt(a.r_out);
                if radial && !a.arc.intersect(b.arc).is_empty() {
                    return Err(Error::InvalidSpec(format!("cells overlap: {a:?} and {b:?}")));
                }
            }
        }
        if self.norm_class == NormClass::UnitBall && self.sup_modulus() >= 1.0 {
            return Err(Error::InvalidSpec(format!(
                "sup-norm {} >= 1 for a spec declared in the unit ball",
                self.sup_modulus()
            )));
        }
        Ok(())
    }

    /// Value at `z`, `|z| < 1`. At `z = 0` twist terms use `θ = 0`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(domain("eval", r, "requires |z| < 1"));
        }
        let theta = z.arg();
        if r >= self.tail.start.value() {
            return self.eval_tail(r, theta);
        }
        self.cells
            .iter()
            .find(|c| c.contains(r, theta))
            .map(|c| c.at_angle(theta))
            .ok_or_else(|| Error::InvalidSpec(format!("no cell contains {z}")))
    }

    fn eval_tail(&self, r: f64, theta: f64) -> Result<Complex64> {
        let Some(sector) = self.tail.sectors.iter().find(|s| s.arc.contains(theta)) else {
            return Ok(ZERO);
        };
        if !self.tail.is_scheduled() {
            return Ok(sector.offset);
        }
        for a in self.tail.annuli(MAX_DEPTH)? {
            if r < a.outer.value() {
                return Ok(self.tail.sector_terms(sector, a.index, a.degree).iter().map(|t| t.at_angle(theta)).sum());
            }
        }
        Err(Error::ScheduleTooDeep {
            requested: MAX_DEPTH + 1,
            max: MAX_DEPTH,
        })
    }

    /// Sup of `|spec|` over the disk (exact for single-term cells).
    pub fn sup_modulus(&self) -> f64 {
        self.cells
            .iter()
            .map(SectorAnnularCell::sup)
            .fold(self.tail.sup(), f64::max)
    }

    /// Boundary dilatation at `p`: the ess-sup of `|spec|` near `p`.
    pub fn boundary_dilatation(&self, p: BoundaryPoint) -> f64 {
        let th = p.angle();
        let s = self.tail.is_scheduled();
        let tail = self
            .tail
            .sectors
            .iter()
            .filter(|x| x.arc.contains_closed(th))
            .map(|x| x.sup(s))
            .fold(0.0, f64::max);
        self.cells
            .iter()
            .filter(|c| c.r_out.is_one() && c.arc.contains_closed(th))
            .map(|c| match c.terms.as_slice() {
                [t] => t.amplitude.norm(),
                terms => terms_at(terms, th).norm(),
            })
            .fold(tail, f64::max)
    }

    /// `h*`: the ess-sup of `|spec|` outside compact subsets.
    pub fn h_star(&self) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.r_out.is_one())
            .map(SectorAnnularCell::sup)
            .fold(self.tail.sup(), f64::max)
    }

    /// All tail annuli up to `last` turned into cells; the tail then starts
    /// at annulus `last + 1`.
    pub fn materialize(&self, last: usize) -> Result<BeltramiSpec> {
        if !self.tail.is_scheduled() || last < self.tail.first_index {
            return Ok(self.clone());
        }
        let mut cells = self.cells.clone();
        cells.extend(self.tail.cells(last)?);
        let sched = self.tail.schedule.clone().expect("scheduled");
        let tail = TailRule::scheduled(sched, last + 1, self.tail.sectors.clone())?;
        Ok(BeltramiSpec {
            cells,
            tail,
            norm_class: self.norm_class,
        })
    }

    /// Moves the start of an unscheduled tail out to `target`.
    pub(crate) fn extend_plain_tail(&self, target: Radius) -> Result<BeltramiSpec> {
        if self.tail.is_scheduled() {
            return Err(Error::Precondition("tail follows a schedule".into()));
        }
        if !self.tail.start.lt(target) {
            return Ok(self.clone());
        }
        let mut cells = self.cells.clone();
        let (r_in, r_out) = (self.tail.start, target);
        if self.tail.sectors.is_empty() {
            cells.push(SectorAnnularCell {
                r_in,
                r_out,
                arc: Arc::FULL,
                terms: Vec::new(),
            });
        }
        for s in &self.tail.sectors {
            cells.push(SectorAnnularCell {
                r_in,
                r_out,
                arc: s.arc,
                terms: merge_terms(vec![TwistTerm::constant(s.offset)]),
            });
        }
        let mut tail = self.tail.clone();
        tail.start = target;
        if target.is_one() {
            tail.sectors.clear();
        }
        Ok(BeltramiSpec {
            cells,
            tail,
            norm_class: self.norm_class,
        })
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: Complex64) -> BeltramiSpec {
        let mut out = self.clone();
        for cell in &mut out.cells {
            for t in &mut cell.terms {
                t.amplitude *= c;
            }
            cell.terms = merge_terms(std::mem::take(&mut cell.terms));
        }
        for s in &mut out.tail.sectors {
            s.odd *= c;
            s.even *= c;
            s.offset *= c;
        }
        out.norm_class = out.fitting_class();
        out
    }

    pub(crate) fn fitting_class(&self) -> NormClass {
        if self.sup_modulus() < 1.0 {
            NormClass::UnitBall
        } else {
            NormClass::Unrestricted
        }
    }

    /// `wa·a + wb·b` on the common refinement.
    pub fn linear(a: &BeltramiSpec, wa: f64, b: &BeltramiSpec, wb: f64) -> Result<BeltramiSpec> {
        combine::linear(a, wa, b, wb)
    }

    pub fn sub(&self, other: &BeltramiSpec) -> Result<BeltramiSpec> {
        Self::linear(self, 1.0, other, -1.0)
    }

    pub fn add(&self, other: &BeltramiSpec) -> Result<BeltramiSpec> {
        Self::linear(self, 1.0, other, 1.0)
    }

    /// Caps every modulus above `h*` at `h*` (the whole cell is rescaled
    /// for multi-term cells); all of `|z| < 1` becomes zero when `h* = 0`.
    pub fn clamp_to_nonstrebel(&self) -> BeltramiSpec {
        let h = self.h_star();
        if h == 0.0 {
            return BeltramiSpec::zero();
        }
        let mut out = self.clone();
        for cell in &mut out.cells {
            let sup = cell.sup();
            if sup > h * (1.0 + 1e-12) {
                let f = h / sup;
                let single = cell.terms.len() == 1;
                for t in &mut cell.terms {
                    t.amplitude = match single {
                        true => t.amplitude / t.amplitude.norm() * h,
                        false => t.amplitude * f,
                    };
                }
            }
        }
        out.norm_class = out.fitting_class();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DilatationValue;
    use crate::reich::{build_kappa, build_modulated, build_schedule};

    fn sched(k: f64, j: usize) -> ReichSchedule {
        build_schedule(DilatationValue::new(k).unwrap(), j).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kappa_eval_examples() {
        let kappa = build_kappa(&sched(0.5, 8)).unwrap();
        assert!((kappa.eval(c(0.5, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        // n_1 = 1 and 0.5 < r_1
        assert!((kappa.eval(c(0.0, 0.5)).unwrap() - c(0.0, -0.5)).norm() < 1e-15);
        assert!(kappa.eval(c(1.0, 0.0)).is_err());
        assert!((kappa.eval(c(0.0, 0.999)).unwrap().norm() - 0.5).abs() < 1e-12);
        assert_eq!(BeltramiSpec::zero().eval(c(0.3, 0.1)).unwrap(), ZERO);
    }

    #[test]
    fn sup_and_boundary_of_reich_specs() {
        let s = sched(0.5, 8);
        let kappa = build_kappa(&s).unwrap();
        assert_eq!(kappa.sup_modulus(), 0.5);
        assert_eq!(kappa.h_star(), 0.5);
        for p in BoundaryPoint::sample(64, 0.1) {
            assert_eq!(kappa.boundary_dilatation(p), 0.5);
        }
        let mu = build_modulated(&s, 0.3, 1.0).unwrap();
        assert_eq!(mu.sup_modulus(), 0.5);
        assert_eq!(mu.h_star(), 0.5);
        assert_eq!(BeltramiSpec::zero().sup_modulus(), 0.0);
    }

    fn damped(rho: f64) -> BeltramiSpec {
        let s = sched(0.5, 4);
        let mut spec = build_kappa(&s).unwrap();
        let q = Arc::new(1.0, 2.0).unwrap();
        let rest = Arc::new(2.0, 1.0 + TAU).unwrap();
        let k = c(0.5, 0.0);
        spec.tail.sectors = vec![
            TailSector { arc: q, odd: k * (rho / 0.5), even: k * (rho / 0.5), offset: ZERO },
            TailSector { arc: rest, odd: k, even: k, offset: ZERO },
        ];
        spec.validate().unwrap();
        spec
    }

    #[test]
    fn damped_sector_boundary_values() {
        let spec = damped(0.2);
        assert!((spec.boundary_dilatation(BoundaryPoint::new(1.5)) - 0.2).abs() < 1e-15);
        assert_eq!(spec.boundary_dilatation(BoundaryPoint::new(1.0)), 0.5);
        assert_eq!(spec.boundary_dilatation(BoundaryPoint::new(2.0)), 0.5);
        assert_eq!(spec.boundary_dilatation(BoundaryPoint::new(4.0)), 0.5);
        let lakic = BoundaryPoint::sample(720, 0.0)
            .into_iter()
            .map(|p| spec.boundary_dilatation(p))
            .fold(0.0, f64::max);
        assert_eq!(lakic, spec.h_star());
    }

    #[test]
    fn compact_support_has_zero_h_star_and_clamps_to_zero() {
        let cell = SectorAnnularCell {
            r_in: Radius::ZERO,
            r_out: Radius::new(0.9).unwrap(),
            arc: Arc::FULL,
            terms: vec![TwistTerm::constant(c(0.7, 0.0))],
        };
        let spec = BeltramiSpec::new(vec![cell], TailRule::zero(Radius::new(0.9).unwrap()), NormClass::UnitBall).unwrap();
        assert_eq!(spec.h_star(), 0.0);
        assert_eq!(spec.sup_modulus(), 0.7);
        assert_eq!(spec.clamp_to_nonstrebel(), BeltramiSpec::zero());
    }

    #[test]
    fn clamp_rescales_prefix_and_is_idempotent() {
        let s = sched(0.5, 3);
        let mut spec = build_kappa(&s).unwrap();
        spec.cells[0].terms[0].amplitude = c(0.0, 0.8);
        spec.validate().unwrap();
        let cl = spec.clamp_to_nonstrebel();
        assert!((cl.cells[0].terms[0].amplitude - c(0.0, 0.5)).norm() < 1e-15);
        assert_eq!(cl.sup_modulus(), cl.h_star());
        assert_eq!(cl.clamp_to_nonstrebel(), cl);
        let kappa = build_kappa(&s).unwrap();
        assert_eq!(kappa.clamp_to_nonstrebel(), kappa);
    }

    #[test]
    fn validation_rejects_overlaps_and_gaps() {
        let s = sched(0.5, 3);
        let mut spec = build_kappa(&s).unwrap();
        spec.cells[1].r_in = Radius::new(0.5).unwrap();
        assert!(spec.validate().is_err());
        let mut spec = build_kappa(&s).unwrap();
        spec.cells.pop();
        assert!(spec.validate().is_err());
        let mut spec = build_kappa(&s).unwrap();
        spec.tail.sectors[0].arc = Arc::new(0.0, 3.0).unwrap();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn materialize_keeps_values() {
        let spec = damped(0.2);
        let m = spec.materialize(7).unwrap();
        assert_eq!(m.tail.first_index, 8);
        for z in [c(0.99, 0.01), c(-0.3, 0.95), c(0.1, 0.2)] {
            assert!((m.eval(z).unwrap() - spec.eval(z).unwrap()).norm() < 1e-12);
        }
        assert_eq!(m.h_star(), spec.h_star());
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let spec = damped(0.2);
        let text = serde_json::to_string(&spec).unwrap();
        let back: BeltramiSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let bad = text.replacen("\"norm_class\"", "\"norm_klass\"", 1);
        assert!(serde_json::from_str::<BeltramiSpec>(&bad).is_err());
    }
}

//! Pairs of specs on a common refinement: linear combinations and the
//! Möbius combination `(a - b)/(1 - conj(b)·a)`.

use num_complex::Complex64;

use super::{merge_terms, terms_at, BeltramiSpec, SectorAnnularCell, TailRule, TailSector, TwistTerm, MIXED_GRID, ZERO};
use crate::error::{Error, Result};
use crate::geometry::{Arc, Radius};
use crate::reich::{ReichSchedule, MAX_DEPTH};

struct CellPiece {
    r_in: Radius,
    r_out: Radius,
    arc: Arc,
    a: Vec<TwistTerm>,
    b: Vec<TwistTerm>,
}

struct SectorPiece {
    arc: Arc,
    a: TailSector,
    b: TailSector,
}

struct Refinement {
    cells: Vec<CellPiece>,
    sectors: Vec<SectorPiece>,
    schedule: Option<ReichSchedule>,
    first_index: usize,
    start: Radius,
}

impl Refinement {
    fn tail(&self, sectors: Vec<TailSector>) -> Result<TailRule> {
        match &self.schedule {
            Some(s) => TailRule::scheduled(s.clone(), self.first_index, sectors),
            None => Ok(TailRule {
                schedule: None,
                first_index: 1,
                start: self.start,
                sectors,
            }),
        }
    }
}

/// Brings both tails to the same start radius.
fn align(a: &BeltramiSpec, b: &BeltramiSpec) -> Result<(BeltramiSpec, BeltramiSpec)> {
    match (&a.tail.schedule, &b.tail.schedule) {
        (Some(sa), Some(sb)) => {
            if !sa.same_geometry(sb, MAX_DEPTH) {
                return Err(Error::Incompatible("tails follow different schedules".into()));
            }
            let last = a.tail.first_index.max(b.tail.first_index) - 1;
            Ok((a.materialize(last)?, b.materialize(last)?))
        }
        (Some(_), None) => align_mixed(a, b),
        (None, Some(_)) => align_mixed(b, a).map(|(s, p)| (p, s)),
        (None, None) => {
            let target = a.tail.start.max(b.tail.start);
            Ok((a.extend_plain_tail(target)?, b.extend_plain_tail(target)?))
        }
    }
}

/// `s` has a scheduled tail, `p` a plain one.
fn align_mixed(s: &BeltramiSpec, p: &BeltramiSpec) -> Result<(BeltramiSpec, BeltramiSpec)> {
    let sched = s.tail.schedule.as_ref().expect("scheduled");
    let mut index = s.tail.first_index;
    let mut start = s.tail.start;
    while start.lt(p.tail.start) {
        if index > MAX_DEPTH {
            return Err(Error::Incompatible(format!(
                "plain tail starting at {} lies beyond every representable annulus",
                p.tail.start.value()
            )));
        }
        start = sched.annulus(index)?.outer;
        index += 1;
    }
    Ok((s.materialize(index - 1)?, p.extend_plain_tail(start)?))
}

fn refine(a: &BeltramiSpec, b: &BeltramiSpec) -> Result<Refinement> {
    let (a, b) = align(a, b)?;
    let mut cells = Vec::new();
    for ca in &a.cells {
        for cb in &b.cells {
            let r_in = ca.r_in.max(cb.r_in);
            let r_out = ca.r_out.min(cb.r_out);
            if !r_in.lt(r_out) {
                continue;
            }
            for arc in ca.arc.intersect(cb.arc) {
                cells.push(CellPiece {
                    r_in,
                    r_out,
                    arc,
                    a: ca.terms.clone(),
                    b: cb.terms.clone(),
                });
            }
        }
    }
    let full_zero = vec![TailSector {
        arc: Arc::FULL,
        odd: ZERO,
        even: ZERO,
        offset: ZERO,
    }];
    let sa = if a.tail.sectors.is_empty() { &full_zero } else { &a.tail.sectors };
    let sb = if b.tail.sectors.is_empty() { &full_zero } else { &b.tail.sectors };
    let mut sectors = Vec::new();
    if !a.tail.start.is_one() {
        for x in sa {
            for y in sb {
                for arc in x.arc.intersect(y.arc) {
                    sectors.push(SectorPiece { arc, a: *x, b: *y });
                }
            }
        }
    }
    let schedule = a.tail.schedule.clone().or_else(|| b.tail.schedule.clone());
    let first_index = if a.tail.is_scheduled() {
        a.tail.first_index
    } else {
        b.tail.first_index
    };
    Ok(Refinement {
        cells,
        sectors,
        schedule,
        first_index,
        start: a.tail.start,
    })
}

pub(super) fn linear(a: &BeltramiSpec, wa: f64, b: &BeltramiSpec, wb: f64) -> Result<BeltramiSpec> {
    let rf = refine(a, b)?;
    let scaled = |ts: &[TwistTerm], w: f64| ts.iter().map(|t| TwistTerm::new(t.amplitude * w, t.winding)).collect::<Vec<_>>();
    let cells = rf
        .cells
        .iter()
        .map(|p| {
            let mut terms = scaled(&p.a, wa);
            terms.extend(scaled(&p.b, wb));
            SectorAnnularCell {
                r_in: p.r_in,
                r_out: p.r_out,
                arc: p.arc,
                terms: merge_terms(terms),
            }
        })
        .collect();
    let sectors = rf
        .sectors
        .iter()
        .map(|p| TailSector {
            arc: p.arc,
            odd: p.a.odd * wa + p.b.odd * wb,
            even: p.a.even * wa + p.b.even * wb,
            offset: p.a.offset * wa + p.b.offset * wb,
        })
        .collect();
    let tail = rf.tail(sectors)?;
    let mut out = BeltramiSpec {
        cells,
        tail,
        norm_class: super::NormClass::Unrestricted,
    };
    out.norm_class = out.fitting_class();
    out.validate()?;
    Ok(out)
}

fn g(a: Complex64, b: Complex64) -> Complex64 {
    (a - b) / (Complex64::new(1.0, 0.0) - b.conj() * a)
}

fn sup_of(terms: &[TwistTerm]) -> f64 {
    terms.iter().map(|t| t.amplitude.norm()).sum()
}

fn lipschitz(terms: &[TwistTerm]) -> f64 {
    terms.iter().map(|t| t.amplitude.norm() * t.winding).sum()
}

/// The combination on a piece where both sides are multiples of one twist.
fn shared_terms(a: &[TwistTerm], b: &[TwistTerm]) -> Option<Vec<TwistTerm>> {
    match (a, b) {
        ([], []) => Some(Vec::new()),
        ([x], []) => Some(vec![*x]),
        ([], [y]) => Some(vec![TwistTerm::new(-y.amplitude, y.winding)]),
        ([x], [y]) if x.winding == y.winding => Some(merge_terms(vec![TwistTerm::new(g(x.amplitude, y.amplitude), x.winding)])),
        _ => None,
    }
}

/// Grid sup of `|g(A(θ), B(θ))|` plus a derivative bound.
fn mixed_sup(arc: Arc, a: &[TwistTerm], b: &[TwistTerm]) -> f64 {
    let (sa, sb) = (sup_of(a), sup_of(b));
    let den = 1.0 - sa * sb;
    let step = arc.width / MIXED_GRID as f64;
    let grid = (0..=MIXED_GRID)
        .map(|i| {
            let th = arc.lo + step * i as f64;
            g(terms_at(a, th), terms_at(b, th)).norm()
        })
        .fold(0.0, f64::max);
    let lip = (lipschitz(a) + lipschitz(b)) / (den * den);
    (grid + 0.5 * lip * step).min((sa + sb) / den).min(1.0)
}

/// One parity of one tail sector: `(c_a u + o_a, c_b u + o_b)` over all
/// unit phases `u`.
fn tail_parity(ca: Complex64, oa: Complex64, cb: Complex64, ob: Complex64) -> (f64, Option<(Complex64, Complex64)>) {
    if oa == ZERO && ob == ZERO {
        let v = g(ca, cb);
        return (v.norm(), Some((v, ZERO)));
    }
    if ca == ZERO && cb == ZERO {
        let v = g(oa, ob);
        return (v.norm(), Some((ZERO, v)));
    }
    let a = [TwistTerm::new(ca, 1.0), TwistTerm::constant(oa)];
    let b = [TwistTerm::new(cb, 1.0), TwistTerm::constant(ob)];
    (mixed_sup(Arc::FULL, &a, &b), None)
}

/// Sup of the Möbius combination over the disk and near the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComboBounds {
    /// Sup over the whole disk.
    pub whole: f64,
    /// Sup over the tail and boundary-reaching cells: the boundary
    /// dilatation of the combination.
    pub boundary: f64,
    /// True when every piece shares one twist, so both values are exact.
    pub exact: bool,
}

fn check_pair(a: &BeltramiSpec, b: &BeltramiSpec) -> Result<()> {
    let prod = a.sup_modulus() * b.sup_modulus();
    if prod >= 1.0 {
        return Err(Error::Precondition(format!(
            "Möbius combination needs sup|a|·sup|b| < 1, got {prod}"
        )));
    }
    Ok(())
}

pub fn combo_bounds(a: &BeltramiSpec, b: &BeltramiSpec) -> Result<ComboBounds> {
    check_pair(a, b)?;
    let rf = refine(a, b)?;
    let mut whole: f64 = 0.0;
    let mut boundary: f64 = 0.0;
    let mut exact = true;
    for p in &rf.cells {
        let v = match shared_terms(&p.a, &p.b) {
            Some(t) => sup_of(&t),
            None => {
                exact = false;
                mixed_sup(p.arc, &p.a, &p.b)
            }
        };
        whole = whole.max(v);
        if p.r_out.is_one() {
            boundary = boundary.max(v);
        }
    }
    for p in &rf.sectors {
        let parities: &[(Complex64, Complex64)] = if rf.schedule.is_some() {
            &[(p.a.odd, p.b.odd), (p.a.even, p.b.even)]
        } else {
            &[(ZERO, ZERO)]
        };
        for &(ca, cb) in parities {
            let (v, shared) = tail_parity(ca, p.a.offset, cb, p.b.offset);
            exact &= shared.is_some();
            whole = whole.max(v);
            boundary = boundary.max(v);
        }
    }
    Ok(ComboBounds { whole, boundary, exact })
}

/// Sup over the disk of `|(a - b)/(1 - conj(b) a)|`.
pub fn cellwise_combo_bound(a: &BeltramiSpec, b: &BeltramiSpec) -> Result<f64> {
    Ok(combo_bounds(a, b)?.whole)
}

/// The combination as a spec, when every piece shares one twist.
pub fn combo_spec(a: &BeltramiSpec, b: &BeltramiSpec) -> Result<Option<BeltramiSpec>> {
    check_pair(a, b)?;
    let rf = refine(a, b)?;
    let mut cells = Vec::with_capacity(rf.cells.len());
    for p in &rf.cells {
        let Some(terms) = shared_terms(&p.a, &p.b) else {
            return Ok(None);
        };
        cells.push(SectorAnnularCell {
            r_in: p.r_in,
            r_out: p.r_out,
            arc: p.arc,
            terms,
        });
    }
    let mut sectors = Vec::with_capacity(rf.sectors.len());
    for p in &rf.sectors {
        let sector = if rf.schedule.is_none() {
            let (_, s) = tail_parity(ZERO, p.a.offset, ZERO, p.b.offset);
            let (_, offset) = s.expect("constant tails always share");
            TailSector { arc: p.arc, odd: ZERO, even: ZERO, offset }
        } else {
            let (_, odd) = tail_parity(p.a.odd, p.a.offset, p.b.odd, p.b.offset);
            let (_, even) = tail_parity(p.a.even, p.a.offset, p.b.even, p.b.offset);
            match (odd, even) {
                (Some((co, oo)), Some((ce, oe))) => {
                    let offset = if oo != ZERO { oo } else { oe };
                    // one offset per sector: both parities must agree on it
                    if (oo != ZERO && (ce != ZERO || (oe != ZERO && oe != oo))) || (oe != ZERO && co != ZERO) {
                        return Ok(None);
                    }
                    TailSector { arc: p.arc, odd: co, even: ce, offset }
                }
                _ => return Ok(None),
            }
        };
        sectors.push(sector);
    }
    let tail = rf.tail(sectors)?;
    Ok(Some(BeltramiSpec::new(cells, tail, super::NormClass::UnitBall)?))
}

/// `|(a(z) - b(z))/(1 - conj(b(z)) a(z))|`.
pub fn mobius_combine_modulus(a: &BeltramiSpec, b: &BeltramiSpec, z: Complex64) -> Result<f64> {
    check_pair(a, b)?;
    Ok(g(a.eval(z)?, b.eval(z)?).norm())
}

//! Holomorphic quadratic differentials on the disk and their pairings
//! `∫∫ μ φ dx dy` with piecewise Beltrami coefficients.
//!
//! Monomials pair with twist cells in closed form:
//! `∫∫ c·e^{-iwθ} · z^m = c·(ρ₂^{m+2} - ρ₁^{m+2})/(m+2) · ∫_arc e^{i(m-w)θ} dθ`.

pub mod cubature;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beltrami::{BeltramiSpec, SectorAnnularCell, TwistTerm};
use crate::certify::CertifiedInterval;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, Radius};
use crate::reich::{ReichSchedule, MAX_DEPTH};
use cubature::{graded, integrate, PolarBox};

/// Angular frequency beyond which sector integrals are bounded, not summed.
const MAX_RESOLVED_FREQUENCY: f64 = 1e6;

/// Largest Fejér order used by peaked members.
pub const MAX_KERNEL_ORDER: usize = 4096;

/// Default absolute tolerance of the quadrature path.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default subdivision budget of the quadrature path.
pub const MAX_CELLS: usize = 1 << 20;

/// `φ_n(z) = (n+2) zⁿ / 2π`, unit L¹ norm on the disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomialQD {
    pub degree: f64,
}

impl MonomialQD {
    pub fn new(degree: f64) -> Self {
        Self { degree }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let n = self.degree;
        let r = z.norm();
        if r == 0.0 {
            return Complex64::new(if n == 0.0 { 1.0 / PI } else { 0.0 }, 0.0);
        }
        let modulus = (n + 2.0) / TAU * (n * r.ln()).exp();
        Complex64::from_polar(modulus, (n * z.arg()).rem_euclid(TAU))
    }
}

/// `∫∫_{ρ₁<|z|<ρ₂} |φ_n| = ρ₂^{n+2} - ρ₁^{n+2}`.
pub fn l1_mass_annulus(phi: MonomialQD, rho1: Radius, rho2: Radius) -> f64 {
    Radius::pow_diff(rho1, rho2, phi.degree + 2.0)
}

/// A pairing value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: Complex64,
    pub err: f64,
}

impl PairingResult {
    pub const ZERO: PairingResult = PairingResult {
        value: Complex64 { re: 0.0, im: 0.0 },
        err: 0.0,
    };

    fn add(&mut self, o: PairingResult) {
        self.value += o.value;
        self.err += o.err;
    }
}

/// Power `z^{base+shift}`; keeping the shift apart keeps `base - winding`
/// exact when the base equals a cell winding far beyond 2^53.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Degree {
    base: f64,
    shift: i64,
}

impl Degree {
    fn exponent(self) -> f64 {
        self.base + self.shift as f64
    }

    fn frequency_against(self, winding: f64) -> f64 {
        let d = if self.base == winding { 0.0 } else { self.base - winding };
        d + self.shift as f64
    }
}

/// `∫∫_cell (Σ terms) · weight · z^m`.
fn pair_cell_power(cell: &SectorAnnularCell, deg: Degree, weight: Complex64) -> PairingResult {
    let m = deg.exponent();
    let radial = Radius::pow_diff(cell.r_in, cell.r_out, m + 2.0) / (m + 2.0);
    let mut out = PairingResult::ZERO;
    if radial == 0.0 {
        return out;
    }
    for t in &cell.terms {
        let scale = t.amplitude * weight * radial;
        let d = deg.frequency_against(t.winding);
        if d.abs() > MAX_RESOLVED_FREQUENCY && !(cell.arc.is_full() && d.fract() == 0.0) {
            out.err += scale.norm() * cell.arc.width.min(2.0 / d.abs());
        } else {
            let v = scale * cell.arc.fourier(d);
            out.value += v;
            out.err += 8.0 * f64::EPSILON * scale.norm() * cell.arc.width;
        }
    }
    out
}

/// Closed-form `∫∫_cell μ φ` for a twist cell against a monomial.
pub fn pair_twist_monomial(cell: &SectorAnnularCell, phi: MonomialQD) -> Complex64 {
    let w = Complex64::new((phi.degree + 2.0) / TAU, 0.0);
    pair_cell_power(cell, Degree { base: phi.degree, shift: 0 }, w).value
}

/// Normalized Jackson kernel coefficients `b_l`, `l = -2(N-1)..=2(N-1)`,
/// with `b_0 = 1`: the Fourier coefficients of the squared Fejér kernel.
pub fn jackson_coefficients(order: usize) -> Vec<f64> {
    let n = order.max(1) as i64;
    let fej = |a: i64| if a.abs() < n { 1.0 - a.abs() as f64 / n as f64 } else { 0.0 };
    let d = 2 * (n - 1);
    let mut b: Vec<f64> = (-d..=d)
        .map(|l| {
            let (lo, hi) = ((l - n + 1).max(-n + 1), (l + n - 1).min(n - 1));
            (lo..=hi).map(|a| fej(a) * fej(l - a)).sum()
        })
        .collect();
    let b0 = b[d as usize];
    for x in &mut b {
        *x /= b0;
    }
    b
}

/// Fejér order of the peaked member built on winding `n`.
pub fn kernel_order(n: f64) -> f64 {
    1.0 + (n / 8.0).cbrt().floor()
}

/// `((n+2)/2π) zⁿ K(θ - θ_p)` with `K` the Jackson kernel written as a
/// polynomial: `Σ_l b_l e^{-ilθ_p} z^{n+l}`. Mass concentrates near `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakedQD {
    pub degree: f64,
    pub target: BoundaryPoint,
    coeffs: Vec<f64>,
}

impl PeakedQD {
    pub fn new(degree: f64, target: BoundaryPoint) -> Result<Self> {
        let order = kernel_order(degree);
        if order > MAX_KERNEL_ORDER as f64 {
            return Err(Error::Precondition(format!(
                "peaked member on winding {degree:e} needs kernel order {order:e} > {MAX_KERNEL_ORDER}"
            )));
        }
        Ok(Self {
            degree,
            target,
            coeffs: jackson_coefficients(order as usize),
        })
    }

    fn half_len(&self) -> i64 {
        (self.coeffs.len() as i64 - 1) / 2
    }

    fn terms(&self) -> impl Iterator<Item = (Degree, Complex64)> + '_ {
        let d = self.half_len();
        let base = (self.degree + 2.0) / TAU;
        let th = self.target.angle();
        self.coeffs.iter().enumerate().map(move |(i, &b)| {
            let l = i as i64 - d;
            let phase = Complex64::from_polar(1.0, (-(l as f64) * th).rem_euclid(TAU));
            (Degree { base: self.degree, shift: l }, phase * (b * base))
        })
    }

    /// `‖ψ‖₁ <= 1 + Σ b_l |l|/(n+l+2)`.
    pub fn norm_bound(&self) -> f64 {
        let d = self.half_len();
        1.0 + self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let l = (i as i64 - d) as f64;
                b * l.abs() / (self.degree + l + 2.0)
            })
            .sum::<f64>()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let (r, th) = (z.norm(), z.arg());
        self.terms()
            .map(|(deg, w)| {
                let m = deg.exponent();
                let modulus = if r == 0.0 { if m == 0.0 { 1.0 } else { 0.0 } } else { (m * r.ln()).exp() };
                w * Complex64::from_polar(modulus, (m * th).rem_euclid(TAU))
            })
            .sum()
    }

    /// Upper bound on `sup_{|z|<=ρ} |ψ|`.
    pub fn sup_on_disk(&self, rho: f64) -> f64 {
        self.terms().map(|(deg, w)| w.norm() * rho.powf(deg.exponent())).sum()
    }
}

/// `ψ = (φ∘T)(T')²` with `T(z) = (z - a)/(1 - āz)`, `a = s·q`; the disk
/// automorphism preserves the L¹ norm and moves the mass of φ towards `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PushedQD {
    pub base: MonomialQD,
    pub target: BoundaryPoint,
    pub concentration: f64,
}

impl PushedQD {
    pub fn new(base: MonomialQD, target: BoundaryPoint, concentration: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&concentration) {
            return Err(Error::Precondition(format!("concentration {concentration} must lie in [0, 1)")));
        }
        Ok(Self {
            base,
            target,
            concentration,
        })
    }

    fn center(&self) -> Complex64 {
        Complex64::from_polar(self.concentration, self.target.angle())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let a = self.center();
        let one = Complex64::new(1.0, 0.0);
        let den = one - a.conj() * z;
        let t = (z - a) / den;
        let dt = (1.0 - a.norm_sqr()) / (den * den);
        self.base.eval(t) * dt * dt
    }

    /// `sup_{|z|<=ρ} |ψ| <= ((m+2)/2π)(1-s²)²/(1-sρ)⁴`.
    pub fn sup_on_disk(&self, rho: f64) -> f64 {
        let s = self.concentration;
        (self.base.degree + 2.0) / TAU * (1.0 - s * s).powi(2) / (1.0 - s * rho).powi(4)
    }
}

/// One member of a degenerating family.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadDiff {
    Monomial(MonomialQD),
    Peaked(PeakedQD),
    Pushed(PushedQD),
}

impl QuadDiff {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            QuadDiff::Monomial(m) => m.eval(z),
            QuadDiff::Peaked(p) => p.eval(z),
            QuadDiff::Pushed(p) => p.eval(z),
        }
    }

    /// Upper bound on the L¹ norm (exactly 1 except for peaked members).
    pub fn norm_bound(&self) -> f64 {
        match self {
            QuadDiff::Peaked(p) => p.norm_bound(),
            _ => 1.0,
        }
    }

    pub fn sup_on_disk(&self, rho: f64) -> f64 {
        match self {
            QuadDiff::Monomial(m) => {
                let n = m.degree;
                if rho == 0.0 {
                    return if n == 0.0 { 1.0 / PI } else { 0.0 };
                }
                (n + 2.0) / TAU * (n * rho.ln()).exp()
            }
            QuadDiff::Peaked(p) => p.sup_on_disk(rho),
            QuadDiff::Pushed(p) => p.sup_on_disk(rho),
        }
    }
}

/// Cells covering the spec out to the deepest representable annulus, the
/// radius where they stop, and the sup of the spec beyond it.
fn regions(spec: &BeltramiSpec) -> Result<(Vec<SectorAnnularCell>, Radius, f64)> {
    let mut cells = spec.cells.clone();
    let tail = &spec.tail;
    if tail.start.is_one() || tail.sectors.is_empty() {
        return Ok((cells, Radius::ONE, 0.0));
    }
    if tail.is_scheduled() {
        cells.extend(tail.cells(MAX_DEPTH)?);
        let end = cells.last().map_or(tail.start, |c| c.r_out);
        return Ok((cells, end, tail.sup()));
    }
    for s in &tail.sectors {
        cells.push(SectorAnnularCell {
            r_in: tail.start,
            r_out: Radius::ONE,
            arc: s.arc,
            terms: crate::beltrami::merge_terms(vec![TwistTerm::constant(s.offset)]),
        });
    }
    Ok((cells, Radius::ONE, 0.0))
}

/// `∫∫ spec · φ` with an error bound: closed form for monomial and peaked
/// members, adaptive cubature (absolute tolerance `tol`) for pushed ones.
pub fn pair(spec: &BeltramiSpec, phi: &QuadDiff, tol: f64) -> Result<PairingResult> {
    let (cells, end, beyond) = regions(spec)?;
    let mut out = PairingResult::ZERO;
    match phi {
        QuadDiff::Monomial(m) => {
            let deg = Degree { base: m.degree, shift: 0 };
            let w = Complex64::new((m.degree + 2.0) / TAU, 0.0);
            for c in &cells {
                out.add(pair_cell_power(c, deg, w));
            }
            out.err += beyond * end.one_minus_pow(m.degree + 2.0);
        }
        QuadDiff::Peaked(p) => {
            for (deg, w) in p.terms() {
                for c in &cells {
                    out.add(pair_cell_power(c, deg, w));
                }
                let m = deg.exponent();
                out.err += beyond * w.norm() * TAU / (m + 2.0) * end.one_minus_pow(m + 2.0);
            }
        }
        QuadDiff::Pushed(p) => out = pair_pushed(spec, p, tol)?,
    }
    Ok(out)
}

/// Windings above this are bounded by `|c|·∫|ψ|` instead of integrated.
const MAX_QUADRATURE_WINDING: f64 = 1e4;

/// Radial grading depth of the starting partition near the rim.
const RIM_LEVELS: usize = 40;

fn cell_box(c: &SectorAnnularCell) -> PolarBox {
    PolarBox {
        r0: c.r_in.value(),
        r1: c.r_out.value(),
        t0: c.arc.lo,
        t1: c.arc.hi(),
    }
}

fn pair_pushed(spec: &BeltramiSpec, p: &PushedQD, tol: f64) -> Result<PairingResult> {
    let start = spec.tail.start;
    let cells: Vec<&SectorAnnularCell> = spec.cells.iter().filter(|c| c.r_in.value() < c.r_out.value()).collect();
    let budget = tol / (2.0 * cells.len().max(1) as f64 + 2.0);
    let mut out = PairingResult::ZERO;
    for c in &cells {
        let b = graded(cell_box(c), RIM_LEVELS, 8);
        let (slow, fast): (Vec<&TwistTerm>, Vec<&TwistTerm>) = c.terms.iter().partition(|t| t.winding <= MAX_QUADRATURE_WINDING);
        if !slow.is_empty() {
            let f = |r: f64, th: f64| {
                let z = Complex64::from_polar(r, th);
                let mu: Complex64 = slow.iter().map(|t| t.at_angle(th)).sum();
                mu * p.eval(z)
            };
            let q = integrate(f, &b, budget, MAX_CELLS)?;
            out.add(PairingResult { value: q.value, err: q.err });
        }
        if !fast.is_empty() {
            let amp: f64 = fast.iter().map(|t| t.amplitude.norm()).sum();
            let q = integrate(|r, th| Complex64::new(p.eval(Complex64::from_polar(r, th)).norm(), 0.0), &b, budget, MAX_CELLS)?;
            out.err += amp * (q.value.re + q.err);
        }
    }
    if !(start.is_one() || spec.tail.sectors.is_empty()) {
        let th = p.target.angle();
        let b = graded(
            PolarBox {
                r0: 0.0,
                r1: start.value(),
                t0: th - PI,
                t1: th + PI,
            },
            RIM_LEVELS,
            16,
        );
        let inside = integrate(|r, t| Complex64::new(p.eval(Complex64::from_polar(r, t)).norm(), 0.0), &b, budget, MAX_CELLS)?;
        let outside = (1.0 - inside.value.re + inside.err).max(0.0);
        out.err += spec.tail.sup() * outside;
    }
    Ok(out)
}

/// `∫∫ |ψ|` over the disk by cubature (checks the change-of-variables identity).
pub fn l1_norm_numeric(phi: &QuadDiff, tol: f64) -> Result<(f64, f64)> {
    let th = match phi {
        QuadDiff::Pushed(p) => p.target.angle(),
        QuadDiff::Peaked(p) => p.target.angle(),
        QuadDiff::Monomial(_) => 0.0,
    };
    let b = graded(
        PolarBox {
            r0: 0.0,
            r1: 1.0,
            t0: th - PI,
            t1: th + PI,
        },
        RIM_LEVELS,
        16,
    );
    let q = integrate(|r, t| Complex64::new(phi.eval(Complex64::from_polar(r, t)).norm(), 0.0), &b, tol, MAX_CELLS)?;
    Ok((q.value.re, q.err))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    All,
    Odd,
    Even,
}

impl Parity {
    fn admits(self, j: usize) -> bool {
        match self {
            Parity::All => true,
            Parity::Odd => j % 2 == 1,
            Parity::Even => j.is_multiple_of(2),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Parity::All => "all",
            Parity::Odd => "odd",
            Parity::Even => "even",
        }
    }
}

/// A named sequence of unit-norm quadratic differentials tending to 0 on
/// compact subsets.
#[derive(Debug, Clone, PartialEq)]
pub enum DegeneratingFamily {
    /// `φ_{n_j}` over the schedule indices of one parity.
    ScheduleMonomials { schedule: ReichSchedule, parity: Parity },
    /// Jackson-peaked members on the schedule windings, aimed at `target`.
    Peaked {
        schedule: ReichSchedule,
        target: BoundaryPoint,
        parity: Parity,
    },
    /// Pushed-forward monomial with concentration `1 - 2^{-i}` for member `i`.
    Pushed { base: MonomialQD, target: BoundaryPoint },
}

impl DegeneratingFamily {
    pub fn monomials(schedule: &ReichSchedule, parity: Parity) -> Self {
        Self::ScheduleMonomials {
            schedule: schedule.clone(),
            parity,
        }
    }

    pub fn peaked(schedule: &ReichSchedule, target: BoundaryPoint, parity: Parity) -> Self {
        Self::Peaked {
            schedule: schedule.clone(),
            target,
            parity,
        }
    }

    pub fn pushed(target: BoundaryPoint) -> Self {
        Self::Pushed {
            base: MonomialQD::new(0.0),
            target,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Self::ScheduleMonomials { parity, .. } => format!("monomial-{}", parity.name()),
            Self::Peaked { target, parity, .. } => format!("peaked-{}@{:.6}", parity.name(), target.angle()),
            Self::Pushed { base, target } => format!("pushed-n{}@{:.6}", base.degree, target.angle()),
        }
    }

    /// Schedule index of member `i` (1-based), for schedule families.
    pub fn schedule_index(&self, i: usize) -> Option<usize> {
        let parity = match self {
            Self::ScheduleMonomials { parity, .. } | Self::Peaked { parity, .. } => *parity,
            Self::Pushed { .. } => return None,
        };
        (1..).filter(|&j| parity.admits(j)).nth(i - 1)
    }

    /// Member `i` (1-based).
    pub fn member(&self, i: usize) -> Result<QuadDiff> {
        if i == 0 {
            return Err(Error::Precondition("family members are numbered from 1".into()));
        }
        match self {
            Self::ScheduleMonomials { schedule, .. } => {
                let j = self.schedule_index(i).expect("schedule family");
                Ok(QuadDiff::Monomial(MonomialQD::new(schedule.annulus(j)?.degree)))
            }
            Self::Peaked { schedule, target, .. } => {
                let j = self.schedule_index(i).expect("schedule family");
                Ok(QuadDiff::Peaked(PeakedQD::new(schedule.annulus(j)?.degree, *target)?))
            }
            Self::Pushed { base, target } => {
                let s = 1.0 - 0.5f64.powi(i as i32);
                Ok(QuadDiff::Pushed(PushedQD::new(*base, *target, s)?))
            }
        }
    }

    /// Exact `lim |∫∫ spec·ψ_i|` when the spec's tail follows this
    /// family's schedule (or carries no twists).
    pub fn closed_form_limit(&self, spec: &BeltramiSpec) -> Option<f64> {
        let (schedule, parity) = match self {
            Self::ScheduleMonomials { schedule, parity } | Self::Peaked { schedule, parity, .. } => (schedule, *parity),
            Self::Pushed { .. } => return None,
        };
        let tail = &spec.tail;
        if tail.start.is_one() || tail.sectors.is_empty() {
            return Some(0.0);
        }
        match &tail.schedule {
            None => return Some(0.0),
            Some(s) if !s.same_geometry(schedule, MAX_DEPTH) => return None,
            Some(_) => {}
        }
        let parities: &[usize] = match parity {
            Parity::All => &[1, 2],
            Parity::Odd => &[1],
            Parity::Even => &[2],
        };
        let per_parity = |j: usize| -> f64 {
            match self {
                Self::Peaked { target, .. } => {
                    let th = target.angle();
                    let hits: Vec<Complex64> = tail
                        .sectors
                        .iter()
                        .filter(|s| s.arc.contains_closed(th))
                        .map(|s| s.coefficient(j))
                        .collect();
                    match hits.len() {
                        0 => 0.0,
                        1 => hits[0].norm(),
                        // on a common endpoint the kernel mass splits evenly
                        _ => (hits.iter().sum::<Complex64>() / hits.len() as f64).norm(),
                    }
                }
                _ => tail
                    .sectors
                    .iter()
                    .map(|s| s.coefficient(j) * (s.arc.width / TAU))
                    .sum::<Complex64>()
                    .norm(),
            }
        };
        Some(parities.iter().map(|&j| per_parity(j)).fold(0.0, f64::max))
    }
}

/// `sup_{|z|<=ρ} |ψ_i|` for the first `count` members (bounds for peaked
/// and pushed members).
pub fn compact_sup_decay(family: &DegeneratingFamily, rho: f64, count: usize) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Precondition(format!("rho = {rho} must lie in [0, 1)")));
    }
    (1..=count)
        .map(|i| match (family, family.member(i)) {
            (_, Ok(m)) => Ok(m.sup_on_disk(rho)),
            (DegeneratingFamily::Peaked { schedule, parity, .. }, Err(_)) => {
                let j = family.schedule_index(i).expect("schedule family");
                let _ = parity;
                let n = schedule.annulus(j)?.degree;
                let order = kernel_order(n);
                let mass = 3.0 * order.powi(3) / (2.0 * order * order + 1.0);
                let d = 2.0 * (order - 1.0);
                Ok((n + 2.0) / TAU * mass * if rho == 0.0 { 0.0 } else { ((n - d) * rho.ln()).exp() })
            }
            (_, Err(e)) => Err(e),
        })
        .collect()
}

/// Values of one family against a spec, member by member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyRow {
    pub member: usize,
    pub schedule_index: Option<usize>,
    pub value: Complex64,
    pub err: f64,
    pub norm_bound: f64,
}

impl FamilyRow {
    /// Certified lower bound on `|∫∫ spec·ψ/‖ψ‖|`.
    pub fn normalized_lower(&self) -> f64 {
        ((self.value.norm() - self.err) / self.norm_bound).max(0.0)
    }
}

/// Pairings with members `1..=depth`; members that cannot be built are skipped.
pub fn family_rows(spec: &BeltramiSpec, family: &DegeneratingFamily, depth: usize, tol: f64) -> Result<Vec<FamilyRow>> {
    rows_between(spec, family, 1, depth, tol)
}

fn rows_between(spec: &BeltramiSpec, family: &DegeneratingFamily, first: usize, last: usize, tol: f64) -> Result<Vec<FamilyRow>> {
    let mut rows = Vec::new();
    for i in first..=last {
        let m = match family.member(i) {
            Ok(m) => m,
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        };
        let p = pair(spec, &m, tol)?;
        rows.push(FamilyRow {
            member: i,
            schedule_index: family.schedule_index(i),
            value: p.value,
            err: p.err,
            norm_bound: m.norm_bound(),
        });
    }
    Ok(rows)
}

/// Sandwich of `sup_φ limsup |∫∫ spec·φ_n|`: the lower end from the family
/// (the best of the last ⌈depth/2⌉ members, or the exact limit when known),
/// the upper end from `h*`.
pub fn pairing_limsup(spec: &BeltramiSpec, family: &DegeneratingFamily, depth: usize, gap_tolerance: f64) -> Result<CertifiedInterval> {
    if depth < 3 {
        return Err(Error::Precondition(format!("depth {depth} < 3")));
    }
    let first = depth - depth.div_ceil(2) + 1;
    let limit = family.closed_form_limit(spec);
    let h = spec.h_star();
    // finite members cannot raise a lower end that already meets h*
    let finite = if limit.is_some_and(|l| l >= h) {
        0.0
    } else {
        rows_between(spec, family, first, depth, DEFAULT_TOL)?
            .iter()
            .map(FamilyRow::normalized_lower)
            .fold(0.0, f64::max)
    };
    let tag = family.tag();
    let (lower, method) = match limit {
        Some(l) if l >= finite => (l, format!("{tag}:closed-form-limit")),
        _ => (finite, format!("{tag}:depth-{depth}")),
    };
    Ok(CertifiedInterval::new(lower, h, method, "h-star", gap_tolerance))
}

/// CSV rows `(spec-id, family, index, re, im, err)`.
pub fn pairing_csv(spec_id: &str, family: &DegeneratingFamily, rows: &[FamilyRow]) -> String {
    let mut out = String::from("spec_id,family,index,re,im,err\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.17e},{:.17e},{:.17e}\n",
            spec_id,
            family.tag(),
            r.schedule_index.unwrap_or(r.member),
            r.value.re,
            r.value.im,
            r.err
        ));
    }
    out
}

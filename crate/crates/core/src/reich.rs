//! The iterative winding/radius schedule behind the constant-modulus
//! coefficient κ, and the coefficients built on it.
//!
//! Annulus `E_j = {r_{j-1} <= |z| < r_j}` (with `r_0 = 0`) carries the twist
//! `z̄^{n_j}/|z|^{n_j}`. The schedule is chosen so that
//!
//! * `r_{j-1}^{n_j+2} < 2^{-j}`,
//! * `r_j^{n_j+2} > 1 - 2^{-j}`,
//! * `r_j > r_{j-1} + (1 - r_{j-1})/2` for `j >= 2`,
//!
//! which makes `φ_{n_j}` put almost all of its mass on `E_j`.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beltrami::{BeltramiSpec, NormClass, SectorAnnularCell, TailRule, TailSector, TwistTerm};
use crate::error::{Error, Result};
use crate::geometry::{Arc, Radius};
use crate::metric::DilatationValue;

/// Deepest annulus index whose degree and radius complement are still
/// representable as normal doubles.
pub const MAX_DEPTH: usize = 38;

/// Relative log-space margin on `r_{j-1}^{n_j+2} < 2^{-j}`; without it the
/// smallest degree leaves a margin far below double precision.
const DEGREE_MARGIN: f64 = 1e-10;

/// One annulus of the schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    /// 1-based index `j`.
    pub index: usize,
    /// Winding `n_j` (an integer stored in floating point; it outgrows u128 at j = 13).
    pub degree: f64,
    pub inner: Radius,
    pub outer: Radius,
}

impl Annulus {
    pub fn is_odd(&self) -> bool {
        self.index % 2 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Smallest admissible degree, then the geometric midpoint of the
    /// admissible radius window.
    #[default]
    SmallestDegreeMidpoint,
}

/// The sequences `(n_j, r_j)`, `j = 1..=J`, plus the dilatation `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleDoc", into = "ScheduleDoc")]
pub struct ReichSchedule {
    pub k: DilatationValue,
    degrees: Vec<f64>,
    radii: Vec<Radius>,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    k: f64,
    #[serde(rename = "J")]
    depth: usize,
    n: Vec<f64>,
    r: Vec<f64>,
    r_gap: Vec<f64>,
    #[serde(default)]
    strategy: Strategy,
}

impl From<ReichSchedule> for ScheduleDoc {
    fn from(s: ReichSchedule) -> Self {
        ScheduleDoc {
            k: s.k.get(),
            depth: s.depth(),
            n: s.degrees.clone(),
            r: s.radii.iter().map(|r| r.value()).collect(),
            r_gap: s.radii.iter().map(|r| r.gap()).collect(),
            strategy: s.strategy,
        }
    }
}

impl TryFrom<ScheduleDoc> for ReichSchedule {
    type Error = Error;
    fn try_from(d: ScheduleDoc) -> Result<Self> {
        if d.n.len() != d.depth || d.r.len() != d.depth || d.r_gap.len() != d.depth {
            return Err(Error::Schema(format!(
                "schedule J = {} but n/r/r_gap have lengths {}/{}/{}",
                d.depth,
                d.n.len(),
                d.r.len(),
                d.r_gap.len()
            )));
        }
        let radii = d
            .r_gap
            .iter()
            .zip(&d.r)
            .map(|(&g, &r)| {
                Radius::from_parts(r, g).map_err(|_| Error::Schema(format!("r = {r} disagrees with r_gap = {g}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ReichSchedule::from_parts(DilatationValue::new(d.k)?, d.n, radii)
    }
}

/// Smallest admissible degree for step `j` after radius `r_prev`.
pub fn next_degree(r_prev: Radius, j: usize, n_prev: f64) -> f64 {
    let floor = n_prev + 1.0;
    if r_prev.value() == 0.0 {
        return floor.max(1.0);
    }
    let ell = -r_prev.ln();
    let target = j as f64 * LN_2 * (1.0 + DEGREE_MARGIN);
    let x = target / ell - 2.0;
    let mut n = x.floor() + 1.0;
    // x is exact enough below 2^53; above it every double is an integer
    while n > 1.0 && n < 9.0e15 && (n - 1.0 + 2.0) * ell >= target && n - 1.0 >= floor {
        n -= 1.0;
    }
    while (n + 2.0) * ell < target {
        n = if n < 9.0e15 { n + 1.0 } else { n * (1.0 + 4.0 * f64::EPSILON) };
    }
    n.max(floor)
}

/// Geometric midpoint of the admissible window for `r_j`.
pub fn next_radius(r_prev: Radius, degree: f64, j: usize) -> Radius {
    let pow = -(-(0.5f64).powi(j as i32)).ln_1p() / (degree + 2.0);
    let half_way = -(-0.5 * r_prev.gap()).ln_1p();
    let ell = if j >= 2 { pow.min(half_way) } else { pow };
    Radius::from_neg_log(0.5 * ell)
}

/// Builds the schedule to depth `J` with the deterministic strategy.
pub fn build_schedule(k: DilatationValue, depth: usize) -> Result<ReichSchedule> {
    if depth < 1 {
        return Err(Error::Precondition("schedule depth J must be >= 1".into()));
    }
    if depth > MAX_DEPTH {
        return Err(Error::ScheduleTooDeep {
            requested: depth,
            max: MAX_DEPTH,
        });
    }
    let mut s = ReichSchedule {
        k,
        degrees: Vec::with_capacity(depth),
        radii: Vec::with_capacity(depth),
        strategy: Strategy::SmallestDegreeMidpoint,
    };
    while s.degrees.len() < depth {
        let a = s.step(s.degrees.len() + 1);
        s.degrees.push(a.degree);
        s.radii.push(a.outer);
    }
    Ok(s)
}

impl ReichSchedule {
    /// A schedule from explicit entries; later annuli continue with the
    /// default strategy.
    pub fn from_parts(k: DilatationValue, degrees: Vec<f64>, radii: Vec<Radius>) -> Result<Self> {
        if degrees.is_empty() || degrees.len() != radii.len() {
            return Err(Error::Precondition(
                "schedule needs equally many (>= 1) degrees and radii".into(),
            ));
        }
        if degrees.len() > MAX_DEPTH {
            return Err(Error::ScheduleTooDeep {
                requested: degrees.len(),
                max: MAX_DEPTH,
            });
        }
        for r in &radii {
            r.validate()?;
        }
        for (i, n) in degrees.iter().enumerate() {
            if !(n.fract() == 0.0 && *n >= 1.0) {
                return Err(Error::Precondition(format!("n_{} = {n} is not a positive integer", i + 1)));
            }
        }
        Ok(Self {
            k,
            degrees,
            radii,
            strategy: Strategy::SmallestDegreeMidpoint,
        })
    }

    pub fn depth(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn radii(&self) -> &[Radius] {
        &self.radii
    }

    /// Annulus `j` computed from the materialized annulus `j - 1`.
    fn step_from(prev: Option<Annulus>, j: usize) -> Annulus {
        let (r_prev, n_prev) = prev.map_or((Radius::ZERO, 0.0), |a| (a.outer, a.degree));
        let degree = next_degree(r_prev, j, n_prev);
        Annulus {
            index: j,
            degree,
            inner: r_prev,
            outer: next_radius(r_prev, degree, j),
        }
    }

    fn step(&self, j: usize) -> Annulus {
        let prev = (j >= 2).then(|| self.stored(j - 1));
        Self::step_from(prev, j)
    }

    fn stored(&self, j: usize) -> Annulus {
        Annulus {
            index: j,
            degree: self.degrees[j - 1],
            inner: if j == 1 { Radius::ZERO } else { self.radii[j - 2] },
            outer: self.radii[j - 1],
        }
    }

    /// Annuli `1..=depth`, continuing the stored prefix deterministically.
    pub fn annuli(&self, depth: usize) -> Result<Vec<Annulus>> {
        if depth > MAX_DEPTH {
            return Err(Error::ScheduleTooDeep {
                requested: depth,
                max: MAX_DEPTH,
            });
        }
        let mut out: Vec<Annulus> = (1..=depth.min(self.depth())).map(|j| self.stored(j)).collect();
        while out.len() < depth {
            let j = out.len() + 1;
            out.push(Self::step_from(out.last().copied(), j));
        }
        Ok(out)
    }

    pub fn annulus(&self, j: usize) -> Result<Annulus> {
        if j == 0 {
            return Err(Error::Precondition("annulus indices start at 1".into()));
        }
        Ok(self.annuli(j)?[j - 1])
    }

    /// Same geometry (degrees and radii) over the first `depth` annuli.
    pub fn same_geometry(&self, other: &ReichSchedule, depth: usize) -> bool {
        match (self.annuli(depth), other.annuli(depth)) {
            (Ok(a), Ok(b)) => a
                .iter()
                .zip(&b)
                .all(|(x, y)| x.degree == y.degree && x.outer.gap() == y.outer.gap()),
            _ => false,
        }
    }

    /// A copy materialized to depth `J` (continuation entries become stored).
    pub fn with_depth(&self, depth: usize) -> Result<ReichSchedule> {
        let ann = self.annuli(depth)?;
        Ok(ReichSchedule {
            k: self.k,
            degrees: ann.iter().map(|a| a.degree).collect(),
            radii: ann.iter().map(|a| a.outer).collect(),
            strategy: self.strategy,
        })
    }

    /// Per-annulus table of the three defining inequalities.
    pub fn verify_fs_inequalities(&self) -> FsReport {
        let rows = (1..=self.depth())
            .map(|j| {
                let a = self.stored(j);
                let e = a.degree + 2.0;
                let bound = 0.5f64.powi(j as i32);
                let inner_mass = a.inner.powf(e);
                let outer_tail = a.outer.one_minus_pow(e);
                let monotone = j == 1 || (a.degree > self.degrees[j - 2] && a.inner.lt(a.outer));
                let halfway = if j >= 2 {
                    Some((a.outer.gap(), 0.5 * a.inner.gap()))
                } else {
                    None
                };
                FsRow {
                    j,
                    degree: a.degree,
                    r_prev: a.inner.value(),
                    r: a.outer.value(),
                    r_gap: a.outer.gap(),
                    inner_mass,
                    inner_bound: bound,
                    inner_ok: inner_mass < bound,
                    outer_tail,
                    outer_bound: bound,
                    outer_ok: outer_tail < bound && a.outer.gap() > 0.0,
                    halfway_gap: halfway.map(|h| h.0),
                    halfway_bound: halfway.map(|h| h.1),
                    halfway_ok: halfway.is_none_or(|(g, b)| g < b),
                    monotone_ok: monotone,
                }
            })
            .collect();
        FsReport { rows }
    }
}

/// One row of the schedule verification table.
#[derive(Debug, Clone, Serialize)]
pub struct FsRow {
    pub j: usize,
    pub degree: f64,
    pub r_prev: f64,
    pub r: f64,
    pub r_gap: f64,
    /// `r_{j-1}^{n_j+2}`, the mass of `φ_{n_j}` inside `r_{j-1}`.
    pub inner_mass: f64,
    pub inner_bound: f64,
    pub inner_ok: bool,
    /// `1 - r_j^{n_j+2}`, the mass of `φ_{n_j}` outside `r_j`.
    pub outer_tail: f64,
    pub outer_bound: f64,
    pub outer_ok: bool,
    /// `1 - r_j` against `(1 - r_{j-1})/2`.
    pub halfway_gap: Option<f64>,
    pub halfway_bound: Option<f64>,
    pub halfway_ok: bool,
    pub monotone_ok: bool,
}

impl FsRow {
    /// Smallest relative slack over the three inequalities of the row.
    pub fn min_margin(&self) -> f64 {
        let inner = (self.inner_bound - self.inner_mass) / self.inner_bound;
        let outer = (self.outer_bound - self.outer_tail) / self.outer_bound;
        let half = match (self.halfway_gap, self.halfway_bound) {
            (Some(g), Some(b)) => (b - g) / b,
            _ => f64::INFINITY,
        };
        inner.min(outer).min(half)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FsReport {
    pub rows: Vec<FsRow>,
}

impl FsReport {
    pub fn all_pass(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.inner_ok && r.outer_ok && r.halfway_ok && r.monotone_ok)
    }

    /// The first violated inequality, as a structured error.
    pub fn check(&self) -> Result<()> {
        for r in &self.rows {
            let fail = |inequality: &'static str, detail: String| {
                Err(Error::ScheduleViolation {
                    j: r.j,
                    inequality,
                    detail,
                })
            };
            if !r.inner_ok {
                return fail(
                    "r_{j-1}^{n_j+2} < 2^-j",
                    format!("{:e} >= {:e}", r.inner_mass, r.inner_bound),
                );
            }
            if !r.outer_ok {
                return fail(
                    "r_j^{n_j+2} > 1 - 2^-j",
                    format!("1 - r^(n+2) = {:e} >= {:e}", r.outer_tail, r.outer_bound),
                );
            }
            if !r.halfway_ok {
                return fail(
                    "r_j > r_{j-1} + (1 - r_{j-1})/2",
                    format!("1 - r_j = {:e} >= {:e}", r.halfway_gap.unwrap_or(f64::NAN), r.halfway_bound.unwrap_or(f64::NAN)),
                );
            }
            if !r.monotone_ok {
                return fail("strict monotonicity of (n_j, r_j)", format!("n_j = {}", r.degree));
            }
        }
        Ok(())
    }
}

/// Unit twist coefficient layout over the schedule: one coefficient per
/// parity, full angle, no prefix/tail distinction.
fn parity_spec(schedule: &ReichSchedule, odd: Complex64, even: Complex64) -> Result<BeltramiSpec> {
    let cells = schedule
        .annuli(schedule.depth())?
        .into_iter()
        .map(|a| SectorAnnularCell {
            r_in: a.inner,
            r_out: a.outer,
            arc: Arc::FULL,
            terms: vec![TwistTerm {
                amplitude: if a.is_odd() { odd } else { even },
                winding: a.degree,
            }],
        })
        .collect();
    let tail = TailRule::scheduled(
        schedule.clone(),
        schedule.depth() + 1,
        vec![TailSector {
            arc: Arc::FULL,
            odd,
            even,
            offset: Complex64::new(0.0, 0.0),
        }],
    )?;
    BeltramiSpec::new(cells, tail, NormClass::UnitBall)
}

/// κ: modulus `k` everywhere, twist `z̄^{n_j}/|z|^{n_j}` on `E_j`.
pub fn build_kappa(schedule: &ReichSchedule) -> Result<BeltramiSpec> {
    let k = Complex64::new(schedule.k.get(), 0.0);
    parity_spec(schedule, k, k)
}

/// `ακ` on odd annuli and `βκ` on even annuli.
pub fn build_modulated(schedule: &ReichSchedule, alpha: f64, beta: f64) -> Result<BeltramiSpec> {
    let k = schedule.k.get();
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v >= 0.0 && v * k < 1.0) {
            return Err(Error::Precondition(format!(
                "{name} = {v} must satisfy 0 <= {name} < 1/k = {}",
                1.0 / k
            )));
        }
    }
    parity_spec(
        schedule,
        Complex64::new(alpha * k, 0.0),
        Complex64::new(beta * k, 0.0),
    )
}

/// The four coefficients η₁..η₄ of the closed loop: κ on odd annuli only,
/// κ on even annuli only, and their negatives.
pub fn build_etas(schedule: &ReichSchedule) -> Result<[BeltramiSpec; 4]> {
    let k = schedule.k.get();
    let zero = Complex64::new(0.0, 0.0);
    let c = |v: f64| Complex64::new(v, 0.0);
    Ok([
        parity_spec(schedule, c(k), zero)?,
        parity_spec(schedule, zero, c(k))?,
        parity_spec(schedule, c(-k), zero)?,
        parity_spec(schedule, zero, c(-k))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: f64) -> DilatationValue {
        DilatationValue::new(v).unwrap()
    }

    #[test]
    fn first_steps_of_the_strategy() {
        assert_eq!(next_degree(Radius::ZERO, 1, 0.0), 1.0);
        // from r_1 = 0.8: 0.8^6 = 0.262 >= 1/4, 0.8^7 = 0.2097 < 1/4
        assert_eq!(next_degree(Radius::new(0.8).unwrap(), 2, 1.0), 5.0);
        let s = build_schedule(k(0.5), 4).unwrap();
        assert_eq!(s.degrees()[0], 1.0);
        let r1 = s.radii()[0].value();
        assert!((r1 - 0.5f64.powf(1.0 / 6.0)).abs() < 1e-15);
        assert_eq!(s.degrees()[1], 11.0);
    }

    #[test]
    fn hand_schedule_example_passes_and_corruption_fails() {
        let good = ReichSchedule::from_parts(
            k(0.5),
            vec![1.0, 5.0],
            vec![Radius::new(0.8).unwrap(), Radius::new(0.96).unwrap()],
        )
        .unwrap();
        let rep = good.verify_fs_inequalities();
        assert!(rep.all_pass(), "{rep:?}");
        assert_eq!(rep.rows[0].r_prev, 0.0);
        assert!((rep.rows[1].inner_mass - 0.8f64.powi(7)).abs() < 1e-15);
        assert!((0.96f64.powi(7) - 0.7514474).abs() < 1e-6);

        let bad = ReichSchedule::from_parts(
            k(0.5),
            vec![1.0, 5.0],
            vec![Radius::new(0.8).unwrap(), Radius::new(0.90).unwrap()],
        )
        .unwrap();
        match bad.verify_fs_inequalities().check() {
            Err(Error::ScheduleViolation { j, inequality, .. }) => {
                assert_eq!(j, 2);
                assert_eq!(inequality, "r_j^{n_j+2} > 1 - 2^-j");
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn deep_schedule_is_valid_and_reproducible() {
        let a = build_schedule(k(0.5), MAX_DEPTH).unwrap();
        let b = build_schedule(k(0.5), MAX_DEPTH).unwrap();
        assert_eq!(a, b);
        a.verify_fs_inequalities().check().unwrap();
        assert!(build_schedule(k(0.5), MAX_DEPTH + 1).is_err());
        let short = build_schedule(k(0.5), 8).unwrap();
        assert!(short.same_geometry(&a, MAX_DEPTH));
    }

    #[test]
    fn json_round_trip() {
        let s = build_schedule(k(0.5), 8).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"J\":8"));
        let back: ReichSchedule = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let typo = text.replace("\"strategy\"", "\"stratgy\"");
        assert!(serde_json::from_str::<ReichSchedule>(&typo).is_err());
    }
}

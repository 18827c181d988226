//! Radii, angular arcs and boundary points of the unit disk.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A radius in `[0, 1]` stored together with its complement `1 - r`.
///
/// Schedule radii approach 1 far faster than double precision can resolve
/// (`1 - r_8 ≈ 1e-17`), so powers `r^e` are evaluated from the complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Radius {
    r: f64,
    gap: f64,
}

impl Radius {
    pub const ZERO: Radius = Radius { r: 0.0, gap: 1.0 };
    pub const ONE: Radius = Radius { r: 1.0, gap: 0.0 };

    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidSpec(format!("radius {r} outside [0, 1]")));
        }
        Ok(Self { r, gap: 1.0 - r })
    }

    pub fn from_gap(gap: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gap) {
            return Err(Error::InvalidSpec(format!("radius complement {gap} outside [0, 1]")));
        }
        Ok(Self { r: 1.0 - gap, gap })
    }

    /// Both fields given explicitly (they may differ from `1 - gap` in the
    /// last bit when computed in log space).
    pub fn from_parts(r: f64, gap: f64) -> Result<Self> {
        let out = Self { r, gap };
        out.validate()?;
        Ok(out)
    }

    /// Builds a radius from `-ln r > 0`.
    pub fn from_neg_log(ell: f64) -> Self {
        let gap = -(-ell).exp_m1();
        Self { r: (-ell).exp(), gap }
    }

    pub fn value(self) -> f64 {
        self.r
    }

    pub fn gap(self) -> f64 {
        self.gap
    }

    pub fn is_one(self) -> bool {
        self.gap == 0.0
    }

    /// `ln r`, accurate near 1.
    pub fn ln(self) -> f64 {
        if self.r < 0.5 {
            self.r.ln()
        } else {
            (-self.gap).ln_1p()
        }
    }

    /// `r^e` for `e > 0`.
    pub fn powf(self, e: f64) -> f64 {
        if self.r == 0.0 {
            return 0.0;
        }
        (e * self.ln()).exp()
    }

    /// `1 - r^e` for `e > 0`, accurate when `r^e` is close to 1.
    pub fn one_minus_pow(self, e: f64) -> f64 {
        if self.r == 0.0 {
            return 1.0;
        }
        -(e * self.ln()).exp_m1()
    }

    /// `b^e - a^e` for `a <= b`, accurate when both are close to 1.
    pub fn pow_diff(a: Radius, b: Radius, e: f64) -> f64 {
        a.one_minus_pow(e) - b.one_minus_pow(e)
    }

    /// Consistency of the two stored fields (used after deserialization).
    pub fn validate(self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.r) || !(0.0..=1.0).contains(&self.gap) {
            return Err(Error::InvalidSpec(format!("radius {self:?} outside [0, 1]")));
        }
        if (self.r + self.gap - 1.0).abs() > 4.0 * f64::EPSILON {
            return Err(Error::InvalidSpec(format!("radius fields disagree: {self:?}")));
        }
        Ok(())
    }

    pub(crate) fn lt(self, other: Radius) -> bool {
        if self.r < 0.5 || other.r < 0.5 {
            self.r < other.r
        } else {
            self.gap > other.gap
        }
    }

    pub(crate) fn max(self, other: Radius) -> Radius {
        if self.lt(other) {
            other
        } else {
            self
        }
    }

    pub(crate) fn min(self, other: Radius) -> Radius {
        if self.lt(other) {
            self
        } else {
            other
        }
    }
}

/// A point `e^{iθ}` of the unit circle, canonical angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct BoundaryPoint {
    angle: f64,
}

impl BoundaryPoint {
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(TAU);
        if a >= TAU {
            a = 0.0;
        }
        Self { angle: a }
    }

    pub fn angle(self) -> f64 {
        self.angle
    }

    /// `count` equally spaced points starting at `offset`.
    pub fn sample(count: usize, offset: f64) -> Vec<BoundaryPoint> {
        (0..count)
            .map(|i| BoundaryPoint::new(offset + TAU * i as f64 / count as f64))
            .collect()
    }
}

impl From<f64> for BoundaryPoint {
    fn from(a: f64) -> Self {
        BoundaryPoint::new(a)
    }
}

impl From<BoundaryPoint> for f64 {
    fn from(p: BoundaryPoint) -> f64 {
        p.angle
    }
}

/// An angular interval `[lo, lo + width]` with `0 < width <= 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arc {
    pub lo: f64,
    pub width: f64,
}

/// Slack used when deciding whether an angle lies on an arc endpoint.
pub(crate) const ANGLE_EPS: f64 = 1e-12;

impl Arc {
    pub const FULL: Arc = Arc { lo: 0.0, width: TAU };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let width = hi - lo;
        if !(width > 0.0 && width <= TAU + ANGLE_EPS) {
            return Err(Error::InvalidSpec(format!(
                "arc [{lo}, {hi}] must have width in (0, 2π]"
            )));
        }
        Ok(Self {
            lo,
            width: width.min(TAU),
        })
    }

    /// The arc of half-width `half` centred at `center`.
    pub fn centered(center: f64, half: f64) -> Result<Self> {
        Self::new(center - half, center + half)
    }

    pub fn hi(self) -> f64 {
        self.lo + self.width
    }

    pub fn is_full(self) -> bool {
        self.width >= TAU - ANGLE_EPS
    }

    /// Offset of `theta` from `lo`, reduced to `[0, 2π)`.
    fn offset(self, theta: f64) -> f64 {
        (theta - self.lo).rem_euclid(TAU)
    }

    /// Closed-arc membership.
    pub fn contains_closed(self, theta: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let o = self.offset(theta);
        o <= self.width + ANGLE_EPS || o >= TAU - ANGLE_EPS
    }

    /// Half-open membership `[lo, hi)`, used for point evaluation.
    pub fn contains(self, theta: f64) -> bool {
        self.is_full() || self.offset(theta) < self.width
    }

    /// Intersection pieces (at most two) of positive width.
    pub fn intersect(self, other: Arc) -> Vec<Arc> {
        if self.is_full() {
            return vec![other];
        }
        if other.is_full() {
            return vec![self];
        }
        let mut out = Vec::new();
        let start = self.lo + self.offset(other.lo);
        for shift in [-TAU, 0.0] {
            let b_lo = start + shift;
            let lo = self.lo.max(b_lo);
            let hi = self.hi().min(b_lo + other.width);
            if hi - lo > ANGLE_EPS {
                out.push(Arc { lo, width: hi - lo });
            }
        }
        out
    }

    /// Area of the sector-annular box `{r_in <= |z| < r_out, θ ∈ arc}`.
    pub fn box_area(self, r_in: Radius, r_out: Radius) -> f64 {
        0.5 * self.width * (r_out.value().powi(2) - r_in.value().powi(2))
    }

    /// `∫_arc e^{i d θ} dθ`.
    pub fn fourier(self, d: f64) -> num_complex::Complex64 {
        use num_complex::Complex64;
        if d == 0.0 {
            return Complex64::new(self.width, 0.0);
        }
        if self.is_full() && d.fract() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let e = |t: f64| Complex64::from_polar(1.0, (d * t).rem_euclid(TAU));
        (e(self.hi()) - e(self.lo)) / Complex64::new(0.0, d)
    }
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_pi(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

//! Reparametrization profiles `σ` for the perturbed geodesic families and
//! their admissibility conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum SigmaProfile {
    /// Linear interpolation of `(t, σ(t))` knots with increasing `t`.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// `σ(t) = (k - t)/(1 - t k)`.
    HyperbolicLoop { k: f64 },
}

impl SigmaProfile {
    pub fn piecewise(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 || knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::SigmaRejected("knots need at least two strictly increasing abscissae".into()));
        }
        if knots.iter().any(|(t, s)| !(t.is_finite() && s.is_finite())) {
            return Err(Error::SigmaRejected("non-finite knot".into()));
        }
        Ok(Self::PiecewiseLinear { knots })
    }

    /// `σ ≡ 0` on `[0, end]`.
    pub fn zero(end: f64) -> Self {
        Self::PiecewiseLinear {
            knots: vec![(0.0, 0.0), (end, 0.0)],
        }
    }

    /// `αt` on `[0, t₀/2]`, back down to 0 at `t₀`, then 0 up to `end`.
    pub fn tent(alpha: f64, t0: f64, end: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0 < end) {
            return Err(Error::SigmaRejected(format!("ramp needs 0 < t0 < {end}, got {t0}")));
        }
        Self::piecewise(vec![(0.0, 0.0), (0.5 * t0, 0.5 * alpha * t0), (t0, 0.0), (end, 0.0)])
    }

    /// `λt` on `[0, t₀]`, then linear up to `σ(k) = k`.
    pub fn lambda_ramp(lambda: f64, t0: f64, k: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0 < k) {
            return Err(Error::SigmaRejected(format!("ramp needs 0 < t0 < {k}, got {t0}")));
        }
        Self::piecewise(vec![(0.0, 0.0), (t0, lambda * t0), (k, k)])
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::PiecewiseLinear { knots } => (knots[0].0, knots[knots.len() - 1].0),
            Self::HyperbolicLoop { k } => (0.0, *k),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let eps = 1e-12 * hi.abs().max(1.0);
        if !(t >= lo - eps && t <= hi + eps) {
            return Err(Error::Precondition(format!("t = {t} outside the profile domain [{lo}, {hi}]")));
        }
        Ok(match self {
            Self::PiecewiseLinear { knots } => {
                let t = t.clamp(lo, hi);
                let i = knots.partition_point(|k| k.0 <= t).clamp(1, knots.len() - 1);
                let ((t0, s0), (t1, s1)) = (knots[i - 1], knots[i]);
                s0 + (s1 - s0) * (t - t0) / (t1 - t0)
            }
            Self::HyperbolicLoop { k } => (k - t) / (1.0 - t * k),
        })
    }

    /// Knot abscissae (endpoints for smooth profiles).
    pub fn knots(&self) -> Vec<f64> {
        match self {
            Self::PiecewiseLinear { knots } => knots.iter().map(|k| k.0).collect(),
            Self::HyperbolicLoop { k } => vec![0.0, *k],
        }
    }

    /// Largest `|σ(s) - σ(t)|/|s - t|`.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::PiecewiseLinear { knots } => knots
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max),
            Self::HyperbolicLoop { k } => (1.0 - k * k) / (1.0 - k * k).powi(2),
        }
    }
}

/// The three classes of profiles and their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "class")]
pub enum SigmaClass {
    /// Metric perturbations inside a patch: `σ(0) = σ(h) = 0`.
    Sigma { rho: f64, beta: f64, h: f64 },
    /// Odd/even reparametrizations: `σ(0) = 0`, `σ(k) = k`.
    SigmaPrime { alpha: f64, k: f64 },
    /// Tangent-space perturbations: `σ(0) = σ(b) = 0`.
    SigmaDoublePrime { rho: f64, beta: f64, b: f64 },
}

impl SigmaClass {
    fn end(&self) -> f64 {
        match *self {
            Self::Sigma { h, .. } => h,
            Self::SigmaPrime { k, .. } => k,
            Self::SigmaDoublePrime { b, .. } => b,
        }
    }

    fn end_value(&self) -> f64 {
        match *self {
            Self::SigmaPrime { k, .. } => k,
            _ => 0.0,
        }
    }

    /// `(lhs, rhs)` of condition (B) at `(s, t)`.
    pub fn sides(&self, s: f64, t: f64, ss: f64, st: f64) -> (f64, f64) {
        let d = (s - t).abs();
        match *self {
            Self::Sigma { rho, beta, h } => {
                let a = |x: f64, sx: f64| x * rho / h + sx.abs() * beta;
                let lhs = (d * rho / h + (st - ss).abs() * beta) / (1.0 - a(s, ss) * a(t, st));
                (lhs, d / (1.0 - s * t))
            }
            Self::SigmaPrime { alpha, .. } => {
                let lhs = (ss - st).abs() * alpha / (1.0 - st * ss * alpha * alpha).abs();
                (lhs, d / (1.0 - s * t))
            }
            Self::SigmaDoublePrime { rho, beta, b } => (d * rho / b + (st - ss).abs() * beta, d),
        }
    }
}

/// Outcome of an admissibility scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Smallest `rhs - lhs`, relative to `max(rhs, 1e-300)`, after a
    /// rounding allowance.
    pub worst_margin: f64,
    pub worst_pair: (f64, f64),
    pub pairs_checked: usize,
}

/// Evaluates condition (B) on a `grid_n × grid_n` grid plus all knot pairs,
/// and along the diagonal of every linear piece.
pub fn check_sigma_admissible(sigma: &SigmaProfile, class: SigmaClass, grid_n: usize) -> Result<AdmissibilityReport> {
    let end = class.end();
    let (lo, hi) = sigma.domain();
    if lo != 0.0 || (hi - end).abs() > 1e-12 * end.max(1.0) {
        return Err(Error::SigmaRejected(format!("profile domain [{lo}, {hi}] is not [0, {end}]")));
    }
    let s0 = sigma.eval(0.0)?;
    let s1 = sigma.eval(end)?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let forward = close(s0, 0.0) && close(s1, class.end_value());
    // the closed-loop edges run a Σ′ profile backwards, from k down to 0
    let backward = matches!(class, SigmaClass::SigmaPrime { .. }) && close(s0, class.end_value()) && close(s1, 0.0);
    if !(forward || backward) {
        return Err(Error::SigmaRejected(format!(
            "condition (A) fails: σ(0) = {s0}, σ({end}) = {s1}, expected {}",
            class.end_value()
        )));
    }
    if grid_n < 2 {
        return Err(Error::Precondition("grid_n must be >= 2".into()));
    }
    let mut pts: Vec<f64> = (0..grid_n).map(|i| end * i as f64 / (grid_n - 1) as f64).collect();
    pts.extend(sigma.knots());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let vals: Vec<f64> = pts.iter().map(|&t| sigma.eval(t)).collect::<Result<_>>()?;
    let mut report = AdmissibilityReport {
        admissible: true,
        worst_margin: f64::INFINITY,
        worst_pair: (0.0, 0.0),
        pairs_checked: 0,
    };
    let mut record = |s: f64, t: f64, ss: f64, st: f64| {
        let (lhs, rhs) = class.sides(s, t, ss, st);
        // rounding in σ(s) - σ(t) is amplified by 1/|s - t|
        let slack = 64.0 * f64::EPSILON * (1.0 + ss.abs() + st.abs()) / (s - t).abs().max(1e-300);
        let margin = (rhs - lhs) / rhs.max(1e-300) + slack.min(1e-3);
        report.pairs_checked += 1;
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.worst_pair = (s, t);
        }
    };
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            record(pts[i], pts[j], vals[i], vals[j]);
        }
    }
    // near-diagonal pairs inside each linear piece
    for w in pts.windows(2) {
        for f in [0.0, 0.5, 1.0 - 1e-9] {
            let t = w[0] + f * (w[1] - w[0]);
            let h = (w[1] - w[0]) * 1e-7;
            if t + h <= w[1] {
                record(t, t + h, sigma.eval(t)?, sigma.eval(t + h)?);
            }
        }
    }
    report.admissible = report.worst_margin >= -1e-10;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_profile_is_admissible_in_sigma() {
        let class = SigmaClass::Sigma { rho: 0.25, beta: 0.2, h: 0.5 };
        let r = check_sigma_admissible(&SigmaProfile::zero(0.5), class, 41).unwrap();
        assert!(r.admissible, "{r:?}");
    }

    #[test]
    fn tent_scan_matches_case_analysis() {
        let h = 0.9;
        let class = SigmaClass::Sigma { rho: 0.5 * h, beta: 0.2, h };
        let good = SigmaProfile::tent(0.5, 0.1, h).unwrap();
        assert!(check_sigma_admissible(&good, class, 101).unwrap().admissible);
        let bad = SigmaProfile::tent(3.0, 0.8, h).unwrap();
        assert!(!check_sigma_admissible(&bad, class, 101).unwrap().admissible);
    }

    #[test]
    fn hyperbolic_loop_is_the_equality_case() {
        let k = 0.5;
        let sigma = SigmaProfile::HyperbolicLoop { k };
        assert_eq!(sigma.eval(0.0).unwrap(), k);
        let r = check_sigma_admissible(&sigma, SigmaClass::SigmaPrime { alpha: 1.0, k }, 33).unwrap();
        assert!(r.admissible && r.worst_margin.abs() < 1e-6, "{r:?}");
        for (s, t) in [(0.1, 0.3), (0.0, 0.5), (0.2, 0.45)] {
            let (lhs, rhs) = SigmaClass::SigmaPrime { alpha: 1.0, k }.sides(s, t, sigma.eval(s).unwrap(), sigma.eval(t).unwrap());
            assert!((lhs - rhs).abs() < 1e-15);
        }
    }

    #[test]
    fn condition_a_is_checked_first() {
        let bad = SigmaProfile::piecewise(vec![(0.0, 0.1), (0.5, 0.0)]).unwrap();
        let class = SigmaClass::Sigma { rho: 0.2, beta: 0.1, h: 0.5 };
        assert!(matches!(check_sigma_admissible(&bad, class, 11), Err(Error::SigmaRejected(_))));
    }

    #[test]
    fn double_prime_threshold() {
        let b = 0.5;
        for (rho, alpha, beta) in [(0.2, 1.0, 0.5), (0.3, 1.0, 0.5), (0.25, 2.0, 0.2)] {
            let sigma = SigmaProfile::tent(alpha, 0.2, b).unwrap();
            let r = check_sigma_admissible(&sigma, SigmaClass::SigmaDoublePrime { rho, beta, b }, 51).unwrap();
            assert_eq!(r.admissible, rho / b + alpha * beta < 1.0, "{rho} {alpha} {beta}: {r:?}");
        }
    }
}

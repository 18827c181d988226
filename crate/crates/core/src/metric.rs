//! Scalar functions of the Teichmüller and hyperbolic metrics.
//!
//! Everything here is a closed form in double precision. Domain violations
//! are reported as errors and never clamped.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A dilatation or sup-norm in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DilatationValue(f64);

impl DilatationValue {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(domain("DilatationValue", value, "must lie in [0, 1)"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for DilatationValue {
    type Error = crate::Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DilatationValue> for f64 {
    fn from(v: DilatationValue) -> f64 {
        v.0
    }
}

/// A real point of the hyperbolic disk, `|t| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HyperbolicParam(f64);

impl HyperbolicParam {
    pub fn new(value: f64) -> Result<Self> {
        if value.abs() < 1.0 {
            Ok(Self(value))
        } else {
            Err(domain("HyperbolicParam", value, "must satisfy |t| < 1"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for HyperbolicParam {
    type Error = crate::Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HyperbolicParam> for f64 {
    fn from(v: HyperbolicParam) -> f64 {
        v.0
    }
}

/// `½ log((1+x)/(1-x))`, i.e. `atanh(x)`, for `0 <= x < 1`.
fn half_log_ratio(x: f64) -> f64 {
    x.atanh()
}

/// Hyperbolic distance between two real points of the disk.
pub fn hyperbolic_distance(t1: HyperbolicParam, t2: HyperbolicParam) -> f64 {
    let (a, b) = (t1.get(), t2.get());
    if a == b {
        return 0.0;
    }
    let x = ((a - b) / (1.0 - a * b)).abs();
    half_log_ratio(x)
}

/// Hyperbolic distance between two complex points of the disk.
pub fn hyperbolic_distance_complex(z1: Complex64, z2: Complex64) -> Result<f64> {
    if z1.norm() >= 1.0 {
        return Err(domain("hyperbolic_distance", z1.norm(), "|z1| must be < 1"));
    }
    if z2.norm() >= 1.0 {
        return Err(domain("hyperbolic_distance", z2.norm(), "|z2| must be < 1"));
    }
    let x = ((z1 - z2) / (Complex64::new(1.0, 0.0) - z1.conj() * z2)).norm();
    Ok(half_log_ratio(x))
}

/// The Möbius combination `(s - t) / (1 - s t)`.
pub fn mobius_difference(s: f64, t: f64) -> Result<f64> {
    let st = s * t;
    if st.abs() >= 1.0 || !st.is_finite() {
        return Err(domain("mobius_difference", st, "requires |s t| < 1"));
    }
    Ok((s - t) / (1.0 - st))
}

/// Distance from the basepoint of a class with dilatation `h`: `½ log((1+h)/(1-h))`.
pub fn dilatation_to_distance(h: DilatationValue) -> f64 {
    half_log_ratio(h.get())
}

/// Inverse of [`dilatation_to_distance`].
pub fn distance_to_dilatation(d: f64) -> Result<DilatationValue> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(domain("distance_to_dilatation", d, "must be finite and >= 0"));
    }
    DilatationValue::new(d.tanh())
}

/// `F(k) = |(t1 - t2) k / (1 - conj(t2) t1 k²)|²`, nondecreasing in `k` on
/// `(0, 1/sqrt|t1 t2|)`.
#[allow(non_snake_case)]
pub fn lemma_dist_F(t1: Complex64, t2: Complex64, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(domain("lemma_dist_F", k, "k must be positive"));
    }
    let prod = k * k * (t1 * t2).norm();
    if prod >= 1.0 {
        return Err(domain("lemma_dist_F", prod, "requires k² |t1 t2| < 1"));
    }
    let num = (t1 - t2) * k;
    let den = Complex64::new(1.0, 0.0) - t2.conj() * t1 * (k * k);
    Ok((num / den).norm_sqr())
}

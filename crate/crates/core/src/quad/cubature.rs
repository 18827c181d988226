//! Adaptive Gauss–Kronrod (7/15) tensor cubature on polar boxes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the Kronrod nodes with odd index.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// `{r0 <= r <= r1, t0 <= θ <= t1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarBox {
    pub r0: f64,
    pub r1: f64,
    pub t0: f64,
    pub t1: f64,
}

/// 15 nodes and Kronrod/Gauss weights on `[a, b]`.
fn rule(a: f64, b: f64) -> ([f64; 15], [f64; 15], [f64; 15]) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut x = [0.0; 15];
    let mut wk = [0.0; 15];
    let mut wg = [0.0; 15];
    for i in 0..8 {
        x[i] = c - h * XGK[i];
        x[14 - i] = c + h * XGK[i];
        wk[i] = h * WGK[i];
        wk[14 - i] = h * WGK[i];
        if i % 2 == 1 {
            wg[i] = h * WG[i / 2];
            wg[14 - i] = h * WG[i / 2];
        }
    }
    (x, wk, wg)
}

/// Splits `b` radially at `r1 - (r1 - r0)·2^{-i}`, `i = 1..levels`, and
/// angularly into `angular` equal parts: a starting partition for
/// integrands peaked near the outer rim.
pub fn graded(b: PolarBox, levels: usize, angular: usize) -> Vec<PolarBox> {
    let mut radii = vec![b.r0];
    for i in 1..levels {
        let r = b.r1 - (b.r1 - b.r0) * 0.5f64.powi(i as i32);
        if r > *radii.last().expect("nonempty") && r < b.r1 {
            radii.push(r);
        }
    }
    radii.push(b.r1);
    let dt = (b.t1 - b.t0) / angular.max(1) as f64;
    let mut out = Vec::new();
    for w in radii.windows(2) {
        for k in 0..angular.max(1) {
            out.push(PolarBox {
                r0: w[0],
                r1: w[1],
                t0: b.t0 + dt * k as f64,
                t1: b.t0 + dt * (k + 1) as f64,
            });
        }
    }
    out
}

struct Piece {
    b: PolarBox,
    value: Complex64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn apply<F: Fn(f64, f64) -> Complex64>(f: &F, b: PolarBox) -> Piece {
    let (xr, wkr, wgr) = rule(b.r0, b.r1);
    let (xt, wkt, wgt) = rule(b.t0, b.t1);
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for i in 0..15 {
        for j in 0..15 {
            let v = f(xr[i], xt[j]) * xr[i];
            k += v * (wkr[i] * wkt[j]);
            g += v * (wgr[i] * wgt[j]);
        }
    }
    Piece {
        b,
        value: k,
        err: (k - g).norm(),
    }
}

fn split(b: PolarBox) -> [PolarBox; 4] {
    let rm = 0.5 * (b.r0 + b.r1);
    let tm = 0.5 * (b.t0 + b.t1);
    [
        PolarBox { r1: rm, t1: tm, ..b },
        PolarBox { r0: rm, t1: tm, ..b },
        PolarBox { r1: rm, t0: tm, ..b },
        PolarBox { r0: rm, t0: tm, ..b },
    ]
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubature {
    pub value: Complex64,
    pub err: f64,
    pub cells: usize,
}

/// `∫∫_boxes f(r, θ) r dr dθ` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64, f64) -> Complex64>(f: F, boxes: &[PolarBox], tol: f64, max_cells: usize) -> Result<Cubature> {
    let mut heap: BinaryHeap<Piece> = boxes.iter().map(|&b| apply(&f, b)).collect();
    let mut cells = heap.len();
    loop {
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= tol {
            let value = heap.iter().map(|p| p.value).sum();
            return Ok(Cubature { value, err, cells });
        }
        if cells + 3 > max_cells {
            return Err(Error::Quadrature { tol, best: err, cells });
        }
        let worst = heap.pop().expect("nonempty");
        for b in split(worst.b) {
            heap.push(apply(&f, b));
        }
        cells += 3;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn disk_area_and_polynomial_moment() {
        let b = [PolarBox { r0: 0.0, r1: 1.0, t0: 0.0, t1: TAU }];
        let area = integrate(|_, _| Complex64::new(1.0, 0.0), &b, 1e-12, 1 << 10).unwrap();
        assert!((area.value.re - PI).abs() < 1e-13);
        let m = integrate(|r, _| Complex64::new(r.powi(40), 0.0), &b, 1e-12, 1 << 12).unwrap();
        assert!((m.value.re - TAU / 42.0).abs() < 1e-12);
    }

    #[test]
    fn tolerance_failure_reports_best_bound() {
        let b = [PolarBox { r0: 0.0, r1: 1.0, t0: 0.0, t1: TAU }];
        let r = integrate(|r, t| Complex64::from_polar(1.0, 400.0 * t + 300.0 * r), &b, 1e-14, 16);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}

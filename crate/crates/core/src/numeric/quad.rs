//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], 0).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

impl QuadratureOptions {
    pub fn tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64 + ?Sized>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    ((kronrod * half), ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]`; either bound may be infinite.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadratureOptions,
) -> Result<Quadrature> {
    integrate_with_breaks(f, a, b, &[], opts)
}

/// Like [`integrate`], but the initial partition is split at `breaks`
/// (kinks, modes or other features of the integrand). Break points outside
/// `(a, b)` are ignored.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadratureOptions,
) -> Result<Quadrature> {
    integrate_dyn(&mut f, a, b, breaks, opts)
}

fn integrate_dyn(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadratureOptions,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, abs_error: 0.0, intervals: 0 });
    }
    if a > b {
        let q = integrate_dyn(f, b, a, breaks, opts)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }
    if a.is_nan() || b.is_nan() {
        return Err(Error::Numerical("NaN integration bound".into()));
    }

    // Map infinite ranges onto finite ones; the break points follow the map.
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(f, a, b, breaks, opts),
        (true, false) => {
            let to_t = |x: f64| (x - a) / (1.0 + x - a);
            let mapped: Vec<f64> = breaks.iter().filter(|&&x| x > a).map(|&x| to_t(x)).collect();
            let mut g = |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - t;
                let v = f(a + t / s) / (s * s);
                if v.is_finite() { v } else { 0.0 }
            };
            adaptive(&mut g, 0.0, 1.0, &mapped, opts)
        }
        (false, true) => {
            let to_t = |x: f64| (b - x) / (1.0 + b - x);
            let mapped: Vec<f64> = breaks.iter().filter(|&&x| x < b).map(|&x| to_t(x)).collect();
            let mut g = |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - t;
                let v = f(b - t / s) / (s * s);
                if v.is_finite() { v } else { 0.0 }
            };
            adaptive(&mut g, 0.0, 1.0, &mapped, opts)
        }
        (false, false) => {
            let lower = integrate_dyn(f, f64::NEG_INFINITY, 0.0, breaks, opts)?;
            let upper = integrate_dyn(f, 0.0, f64::INFINITY, breaks, opts)?;
            Ok(Quadrature {
                value: lower.value + upper.value,
                abs_error: lower.abs_error + upper.abs_error,
                intervals: lower.intervals + upper.intervals,
            })
        }
    }
}

fn adaptive<F: FnMut(f64) -> f64 + ?Sized>(
    f: &mut F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadratureOptions,
) -> Result<Quadrature> {
    let mut points: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    points.push(a);
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        let (value, error) = kronrod(f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Segment { a: w[0], b: w[1], value, error });
    }

    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Numerical(format!(
                "quadrature did not converge on [{a}, {b}]: estimate {total}, error {total_err}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point; accept it.
            heap.push(Segment { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = kronrod(f, worst.a, mid);
        let (v2, e2) = kronrod(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }

    // Re-sum to shed the drift accumulated by the running updates.
    let (value, abs_error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(Quadrature { value, abs_error, intervals: heap.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
        integrate(f, a, b, QuadratureOptions::tolerances(1e-14, 1e-12)).unwrap().value
    }

    #[test]
    fn exact_on_polynomials() {
        // A single G7K15 panel integrates degree-22 polynomials exactly.
        let v = q(|x| x.powi(22), 0.0, 1.0);
        assert!((v - 1.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn semi_infinite_ranges() {
        let v = q(|x: f64| (-x).exp(), 0.0, f64::INFINITY);
        assert!((v - 1.0).abs() < 1e-12);
        let v = q(|x: f64| x.exp(), f64::NEG_INFINITY, 0.0);
        assert!((v - 1.0).abs() < 1e-12);
        let v = q(|x: f64| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v = q(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn breaks_handle_kinks() {
        let v = integrate_with_breaks(
            |x: f64| (x - 0.3).abs(),
            0.0,
            1.0,
            &[0.3],
            QuadratureOptions::default(),
        )
        .unwrap();
        assert!((v.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        assert!((q(|x| x, 1.0, 0.0) + 0.5).abs() < 1e-15);
    }
}

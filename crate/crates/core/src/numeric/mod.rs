//! Small numerical toolkit shared by the estimators: adaptive quadrature,
//! scalar and quasi-Newton minimisation, root finding, normal-distribution
//! helpers and the Kolmogorov–Smirnov distance.

mod bfgs;
mod normal;
mod optimize;
mod quad;

pub use bfgs::{bfgs, BfgsOptions, BfgsResult};
pub use normal::{ln_std_normal_cdf, std_normal_cdf, std_normal_quantile, std_normal_sf};
pub use optimize::{brent_minimize, brent_root, Minimum};
pub use quad::{integrate, integrate_with_breaks, Quadrature, QuadratureOptions};

/// Kolmogorov–Smirnov distance between the empirical CDF of `sample` and
/// `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (f - lo).abs().max((hi - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Empirical quantile by linear interpolation between order statistics
/// (the "type 7" definition). `sorted` must be in ascending order.
pub fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two points.
pub(crate) fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

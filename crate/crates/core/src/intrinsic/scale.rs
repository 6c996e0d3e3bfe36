//! Scale parameter: intrinsic discrepancy, the numeric Bayes rule under the
//! joint reference posterior, its closed-form approximation, and the uniform
//! and location-exponential special cases.

use super::{ip_mle, BriMode, SuffStats};
use crate::distributions::GammaPosterior;
use crate::error::{Error, Result};
use crate::numeric::{brent_minimize, integrate, integrate_with_breaks, QuadratureOptions};
use serde::Serialize;
use std::f64::consts::LN_2;

/// Scale discrepancy with `φ = κ ln(σ/σᵉ)`: `n ln(1 - φ)` for `φ < 0`,
/// `nφ` otherwise.
pub fn delta_scale(sigma: f64, kappa: f64, sigma_e: f64, n: usize) -> Result<f64> {
    if !(sigma > 0.0 && kappa > 0.0 && sigma_e > 0.0) {
        return Err(Error::Domain(format!(
            "sigma, kappa and sigma_e must be positive, got ({sigma}, {kappa}, {sigma_e})"
        )));
    }
    Ok(n as f64 * scale_discrepancy_unit(kappa * (sigma / sigma_e).ln()))
}

#[inline]
fn scale_discrepancy_unit(phi: f64) -> f64 {
    if phi < 0.0 { (-phi).ln_1p() } else { phi }
}

const INNER: QuadratureOptions = QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 2000 };
const OUTER: QuadratureOptions = QuadratureOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 2000 };

/// Expected scale loss given the shape, as a function of `c = nκ ln(σᵉ/σ̂)`.
///
/// With `v = ln(σ/σ̂)`, the posterior of `σ | κ` makes `nκv` standard
/// exponential. The `φ ≥ 0` branch integrates to `e^{-c}`; the `φ < 0` branch
/// is `n ∫_0^c ln(1 + (c - w)/n) e^{-w} dw`, done by quadrature.
fn conditional_scale_loss(c: f64, n: f64) -> f64 {
    if c <= 0.0 {
        // σᵉ = σ̂: only the upper branch contributes.
        return 1.0;
    }
    let lower = integrate(|w: f64| ((c - w) / n).ln_1p() * (-w).exp(), 0.0, c, INNER)
        .map(|q| q.value)
        .unwrap_or(f64::NAN);
    (-c).exp() + n * lower
}

/// Expected scale loss for `s = nκ̂ ln(σᵉ/σ̂)`, with `κ/κ̂ ~ Ga(n, n)` under the
/// joint posterior `∝ κ^n σ^{-(nκ+1)} t1^{nκ}`.
fn standardised_scale_loss(s: f64, n: usize) -> f64 {
    let post = GammaPosterior::new(n as f64, n as f64).expect("n >= 1");
    let nf = n as f64;
    let sd = post.variance().sqrt();
    let breaks = [post.mode(), 1.0 - 3.0 * sd, 1.0 + 3.0 * sd, 1.0 + 10.0 * sd];
    integrate_with_breaks(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            conditional_scale_loss(s * u, nf) * post.ln_pdf(u).exp()
        },
        0.0,
        f64::INFINITY,
        &breaks,
        OUTER,
    )
    .map(|q| q.value)
    .unwrap_or(f64::NAN)
}

/// Posterior expected scale loss at `σᵉ` for the given sufficient statistics.
pub fn expected_loss_scale(sigma_e: f64, stats: &SuffStats) -> Result<f64> {
    let mle = ip_mle(stats)?;
    if sigma_e < mle.sigma_hat {
        return Err(Error::Domain(format!(
            "sigma_e = {sigma_e} lies below the sample maximum {}",
            mle.sigma_hat
        )));
    }
    let s = stats.n as f64 * mle.kappa_hat * (sigma_e / mle.sigma_hat).ln();
    Ok(standardised_scale_loss(s, stats.n))
}

/// BRI estimate of the inverted-Pareto scale.
///
/// Approximation: `2^{1/(nκ̂)} σ̂`. Numeric: minimises the posterior expected
/// loss over `σᵉ ≥ σ̂`.
pub fn bri_scale(stats: &SuffStats, mode: BriMode) -> Result<f64> {
    let mle = ip_mle(stats)?;
    let nk = stats.n as f64 * mle.kappa_hat;
    match mode {
        BriMode::Approximation => Ok(mle.sigma_hat * (LN_2 / nk).exp()),
        BriMode::Numeric => {
            let n = stats.n;
            let best = brent_minimize(|s| standardised_scale_loss(s, n), 0.0, 10.0, 1e-10);
            Ok(mle.sigma_hat * (best.x / nk).exp())
        }
    }
}

/// BRI for the upper bound of a Uniform(0, σ) sample: the `Pa(n, σ̂)`
/// posterior median.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformScaleBri {
    pub n: usize,
    pub sigma_hat: f64,
    pub point: f64,
}

impl UniformScaleBri {
    /// Expected loss `2z - ln z - 1` with `z = (σ̂/σᵉ)^n` for `σᵉ ≥ σ̂`, and
    /// `ln z + 1` below the sample maximum.
    pub fn expected_loss(&self, sigma_e: f64) -> f64 {
        let z = (self.sigma_hat / sigma_e).powi(self.n as i32);
        if sigma_e >= self.sigma_hat {
            2.0 * z - z.ln() - 1.0
        } else {
            z.ln() + 1.0
        }
    }
}

pub fn bri_uniform_scale(n: usize, sigma_hat: f64) -> Result<UniformScaleBri> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if !(sigma_hat > 0.0) {
        return Err(Error::Domain(format!("sigma_hat must be positive, got {sigma_hat}")));
    }
    let point = 2f64.powf(1.0 / n as f64) * sigma_hat;
    Ok(UniformScaleBri { n, sigma_hat, point })
}

/// BRI for the location `φ = ln σ` of the log-transformed uniform model,
/// obtained by invariance: `ln σ̃ = ln σ̂ + ln 2 / n`.
pub fn bri_log_scale(n: usize, sigma_hat: f64) -> Result<f64> {
    Ok(bri_uniform_scale(n, sigma_hat)?.point.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistSpec;
    use approx::assert_relative_eq;

    #[test]
    fn delta_scale_examples() {
        // φ = 0, 1 and -1.
        assert_eq!(delta_scale(2.0, 3.0, 2.0, 5).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert_relative_eq!(delta_scale(e, 1.0, 1.0, 1).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(delta_scale(1.0, 1.0, e, 2).unwrap(), 2.0 * LN_2, max_relative = 1e-15);
        assert_relative_eq!(2.0 * LN_2, 1.38629, epsilon = 1e-5);
        assert!(delta_scale(0.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn conditional_loss_matches_direct_double_integral() {
        // Oracle: integrate δ against the Pa(nκ, σ̂) conditional directly in σ.
        let (n, kappa, sigma_hat, sigma_e) = (7usize, 1.7, 2.0, 2.3);
        let lam = n as f64 * kappa;
        let cond = DistSpec::pareto(lam, sigma_hat).unwrap();
        let q = integrate_with_breaks(
            |s| delta_scale(s, kappa, sigma_e, n).unwrap() * cond.density(s).unwrap(),
            sigma_hat,
            f64::INFINITY,
            &[sigma_e],
            QuadratureOptions::tolerances(1e-13, 1e-11),
        )
        .unwrap()
        .value;
        let c = lam * (sigma_e / sigma_hat).ln();
        assert_relative_eq!(conditional_scale_loss(c, n as f64), q, max_relative = 1e-9);
    }

    #[test]
    fn approximation_reproduces_reported_value() {
        let (n, kh, sh) = (33usize, 2.44f64, 19.71);
        let stats = SuffStats { t1: sh * (-1.0 / kh).exp(), t2: sh, n };
        let s = bri_scale(&stats, BriMode::Approximation).unwrap();
        assert_relative_eq!(s, 19.88, epsilon = 0.01);
    }

    #[test]
    fn numeric_agrees_with_approximation() {
        let (n, kh) = (50usize, 3.0f64);
        let stats = SuffStats { t1: (-1.0 / kh).exp(), t2: 1.0, n };
        let num = bri_scale(&stats, BriMode::Numeric).unwrap();
        let approx = bri_scale(&stats, BriMode::Approximation).unwrap();
        assert!(((num - approx) / approx).abs() < 0.005, "{num} vs {approx}");
        assert!(num >= 1.0);
    }

    #[test]
    fn numeric_scale_minimises_the_expected_loss() {
        let stats = SuffStats { t1: (-0.5f64).exp(), t2: 1.0, n: 12 };
        let best = bri_scale(&stats, BriMode::Numeric).unwrap();
        let at = |s: f64| expected_loss_scale(s, &stats).unwrap();
        for s in [best * 0.999, best * 1.001, best * 1.05] {
            assert!(at(s) >= at(best) - 1e-12);
        }
    }

    #[test]
    fn uniform_case() {
        let b = bri_uniform_scale(1, 1.0).unwrap();
        assert_relative_eq!(b.point, 2.0);
        assert_relative_eq!(b.expected_loss(1.0), 1.0);
        // Minimum of 2z - ln z - 1 is at z = 1/2 with value ln 2.
        let b = bri_uniform_scale(4, 3.0).unwrap();
        let at_min = 3.0 * 2f64.powf(0.25);
        assert_relative_eq!(b.expected_loss(at_min), LN_2, max_relative = 1e-14);
        assert!(b.expected_loss(at_min * 1.01) > LN_2);
        assert!(b.expected_loss(at_min * 0.99) > LN_2);
    }

    #[test]
    fn uniform_closed_form_matches_quadrature() {
        let (n, sh, se) = (3usize, 1.5, 1.9);
        let post = DistSpec::pareto(n as f64, sh).unwrap();
        let q = integrate_with_breaks(
            |s| n as f64 * (s / se).ln().abs() * post.density(s).unwrap(),
            sh,
            f64::INFINITY,
            &[se],
            QuadratureOptions::tolerances(1e-13, 1e-11),
        )
        .unwrap()
        .value;
        let b = bri_uniform_scale(n, sh).unwrap();
        assert_relative_eq!(b.expected_loss(se), q, max_relative = 1e-9);
    }

    #[test]
    fn uniform_point_is_posterior_median() {
        for n in [1usize, 2, 7, 40] {
            let b = bri_uniform_scale(n, 2.5).unwrap();
            let median = DistSpec::pareto(n as f64, 2.5).unwrap().quantile(0.5).unwrap();
            assert_relative_eq!(b.point, median, max_relative = 1e-14);
        }
    }

    #[test]
    fn log_scale_invariance() {
        let (n, sh) = (9usize, 4.0);
        let phi = bri_log_scale(n, sh).unwrap();
        assert_relative_eq!(phi, sh.ln() + LN_2 / n as f64, max_relative = 1e-14);
    }
}

//! Reference-intrinsic (BRI) estimation on the inverted-Pareto scale.
//!
//! Data `x_i ~ InvPareto(κ, σ)` on `(0, σ]` reduce to the sufficient
//! statistics `t1` (geometric mean) and `t2` (maximum). The shape's reference
//! posterior is `Ga(n - 1, n/κ̂)` with `κ̂ = 1/ln(t2/t1)`. Point estimates
//! minimise the posterior expected intrinsic discrepancy (the smaller of the
//! two Kullback–Leibler directions); interval estimates collect the values of
//! lowest expected loss. Both are invariant under one-to-one
//! reparameterisation, which is how results move to the GPD shape `-1/κ`.

mod level_set;
pub mod reparam;
mod scale;

pub use scale::{bri_log_scale, bri_scale, bri_uniform_scale, delta_scale, expected_loss_scale, UniformScaleBri};

use crate::distributions::GammaPosterior;
use crate::error::{Error, Result};
use crate::numeric::{brent_minimize, integrate_with_breaks, QuadratureOptions};
use level_set::{assert_unimodal, level_set_interval};
use serde::Serialize;

/// Sufficient statistics of an inverted-Pareto sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuffStats {
    /// Geometric mean.
    pub t1: f64,
    /// Sample maximum.
    pub t2: f64,
    pub n: usize,
}

pub fn suff_stats(sample: &[f64]) -> Result<SuffStats> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(&bad) = sample.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("observations must be positive, got {bad}")));
    }
    let n = sample.len();
    let mean_log = sample.iter().map(|x| x.ln()).sum::<f64>() / n as f64;
    let t2 = sample.iter().copied().fold(f64::MIN, f64::max);
    // exp(mean log) can land an ulp above the maximum for constant samples.
    let t1 = mean_log.exp().min(t2);
    Ok(SuffStats { t1, t2, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IpMle {
    pub kappa_hat: f64,
    pub sigma_hat: f64,
}

pub fn ip_mle(stats: &SuffStats) -> Result<IpMle> {
    if stats.n < 2 {
        return Err(Error::DegenerateSample(format!("MLE needs n >= 2, got {}", stats.n)));
    }
    if stats.t1 >= stats.t2 {
        return Err(Error::DegenerateSample("all observations are equal".into()));
    }
    Ok(IpMle { kappa_hat: 1.0 / (stats.t2 / stats.t1).ln(), sigma_hat: stats.t2 })
}

/// Intrinsic discrepancy between `InvPareto(κ, ·)` and `InvPareto(κᵉ, ·)` for a
/// sample of size `n`.
pub fn delta_shape(kappa: f64, kappa_e: f64, n: usize) -> Result<f64> {
    if !(kappa > 0.0 && kappa_e > 0.0) {
        return Err(Error::Domain(format!("shapes must be positive, got ({kappa}, {kappa_e})")));
    }
    Ok(n as f64 * shape_discrepancy_unit(kappa / kappa_e))
}

#[inline]
fn shape_discrepancy_unit(theta: f64) -> f64 {
    if theta < 1.0 {
        -theta.ln() + theta - 1.0
    } else {
        theta.ln() + 1.0 / theta - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BriMode {
    /// Quadrature of the expected loss and numerical minimisation.
    Numeric,
    /// Closed-form large-sample approximations.
    Approximation,
}

/// Posterior expected intrinsic loss for the shape, `d(κᵉ)`.
///
/// The loss depends on `κᵉ` and `κ̂` only through `κᵉ/κ̂`, and the posterior of
/// `κ/κ̂` is `Ga(n - 1, n)`; everything is computed on that standardised scale.
#[derive(Debug, Clone, Copy)]
pub struct ShapeLoss {
    n: usize,
    kappa_hat: f64,
    standard: GammaPosterior,
}

const LOSS_QUAD: QuadratureOptions =
    QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 4000 };

impl ShapeLoss {
    pub fn new(n: usize, kappa_hat: f64) -> Result<Self> {
        if n <= 2 {
            return Err(Error::UndefinedLoss(format!(
                "the expected intrinsic loss needs n > 2, got {n}"
            )));
        }
        if !(kappa_hat > 0.0 && kappa_hat.is_finite()) {
            return Err(Error::Domain(format!("kappa_hat must be positive, got {kappa_hat}")));
        }
        Ok(Self { n, kappa_hat, standard: GammaPosterior::reference(n, 1.0)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa_hat(&self) -> f64 {
        self.kappa_hat
    }

    pub fn posterior(&self) -> GammaPosterior {
        GammaPosterior::reference(self.n, self.kappa_hat).expect("validated")
    }

    /// `d` as a function of the ratio `ρ = κᵉ/κ̂`.
    fn standardised(&self, rho: f64) -> f64 {
        let post = self.standard;
        let (m, sd) = (post.mean(), post.variance().sqrt());
        let breaks = [rho, post.mode(), m - 3.0 * sd, m + 3.0 * sd, m + 10.0 * sd];
        let nf = self.n as f64;
        let integrand = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            nf * shape_discrepancy_unit(u / rho) * post.ln_pdf(u).exp()
        };
        integrate_with_breaks(integrand, 0.0, f64::INFINITY, &breaks, LOSS_QUAD)
            .map(|q| q.value)
            .unwrap_or(f64::NAN)
    }

    pub fn expected_loss(&self, kappa_e: f64) -> f64 {
        if !(kappa_e > 0.0) {
            return f64::INFINITY;
        }
        self.standardised(kappa_e / self.kappa_hat)
    }

    /// Large-sample approximation `δ(κ̂, κᵉ) + 1/2`.
    pub fn approx_expected_loss(&self, kappa_e: f64) -> f64 {
        self.n as f64 * shape_discrepancy_unit(self.kappa_hat / kappa_e) + 0.5
    }

    /// Numerical minimiser of [`Self::expected_loss`], searched on
    /// `[κ̂/10, 10κ̂]`.
    pub fn minimiser(&self) -> f64 {
        self.kappa_hat * bri_shape_factor_unchecked(self)
    }
}

fn bri_shape_factor_unchecked(loss: &ShapeLoss) -> f64 {
    brent_minimize(|rho| loss.standardised(rho), 0.1, 10.0, 1e-11).x
}

/// `κ̃/κ̂` for the numeric BRI shape estimator. The estimator is equivariant
/// under rescaling of the data's log-spread, so `κ̃ = κ̂ · bri_shape_factor(n)`.
pub fn bri_shape_factor(n: usize) -> Result<f64> {
    Ok(bri_shape_factor_unchecked(&ShapeLoss::new(n, 1.0)?))
}

pub fn expected_loss_shape(kappa_e: f64, n: usize, kappa_hat: f64) -> Result<f64> {
    if !(kappa_e > 0.0) {
        return Err(Error::Domain(format!("kappa_e must be positive, got {kappa_e}")));
    }
    Ok(ShapeLoss::new(n, kappa_hat)?.expected_loss(kappa_e))
}

/// Approximate expected loss `δ(κ̂, κᵉ) + 1/2`.
pub fn approx_expected_loss_shape(kappa_e: f64, n: usize, kappa_hat: f64) -> Result<f64> {
    Ok(delta_shape(kappa_hat, kappa_e, n)? + 0.5)
}

/// BRI point estimate of the inverted-Pareto shape.
pub fn bri_shape(n: usize, kappa_hat: f64, mode: BriMode) -> Result<f64> {
    match mode {
        BriMode::Numeric => Ok(ShapeLoss::new(n, kappa_hat)?.minimiser()),
        BriMode::Approximation => {
            if n < 1 {
                return Err(Error::EmptySample);
            }
            Ok(kappa_hat * (1.0 - 1.5 / n as f64))
        }
    }
}

/// Search bounds for level sets: far enough into both posterior tails that
/// no reasonable `p` reaches them.
fn level_bounds(post: &GammaPosterior) -> (f64, f64) {
    let lo = post.quantile(1e-15).unwrap_or(post.mean() * 1e-6);
    let hi = post.quantile(1.0 - 1e-15).unwrap_or(post.mean() * 1e3);
    (lo.max(f64::MIN_POSITIVE), hi)
}

/// Intrinsic credible interval of posterior mass `p` for the shape.
pub fn bri_interval_shape(n: usize, kappa_hat: f64, p: f64) -> Result<(f64, f64)> {
    let loss = ShapeLoss::new(n, kappa_hat)?;
    let centre = loss.minimiser();
    intrinsic_interval(&loss, centre, p)
}

fn intrinsic_interval(loss: &ShapeLoss, centre: f64, p: f64) -> Result<(f64, f64)> {
    let post = loss.posterior();
    let (lo, hi) = level_bounds(&post);
    let f = |k: f64| loss.expected_loss(k);
    assert_unimodal(&f, lo.max(centre * 0.05), centre, hi.min(centre * 20.0))?;
    level_set_interval(f, |a, b| post.mass(a, b), centre, lo, hi, p)
}

/// Highest-posterior-density interval of a Gamma law.
pub fn hpd_interval(post: &GammaPosterior, p: f64) -> Result<(f64, f64)> {
    if post.shape <= 1.0 {
        // Monotone density: the HPD region starts at zero.
        let hi = post.quantile(p)?;
        return Ok((0.0, hi));
    }
    let (lo, hi) = level_bounds(post);
    let mode = post.mode();
    level_set_interval(|k| -post.ln_pdf(k), |a, b| post.mass(a, b), mode, lo, hi, p)
}

/// Point and interval estimate on one parameter scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BriFit {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub probability: f64,
    pub expected_loss_at_point: f64,
    pub mode: BriMode,
}

impl BriFit {
    /// Maps an inverted-Pareto shape fit to the GPD shape `-1/α`. The map is
    /// its own inverse.
    pub fn to_gpd(&self) -> Result<Self> {
        let (point, lower, upper) = neg_reciprocal(self.point, self.lower, self.upper)?;
        Ok(Self { point, lower, upper, ..*self })
    }
}

/// Applies `x -> -1/x` to a point and interval, keeping the interval ordered.
pub fn neg_reciprocal(point: f64, lower: f64, upper: f64) -> Result<(f64, f64, f64)> {
    let same_side = (lower > 0.0 && upper > 0.0) || (lower < 0.0 && upper < 0.0);
    if !same_side || point == 0.0 {
        return Err(Error::Domain(format!(
            "interval ({lower}, {upper}) touches zero; -1/x is not one-to-one across it"
        )));
    }
    let (a, b) = (-1.0 / lower, -1.0 / upper);
    Ok((-1.0 / point, a.min(b), a.max(b)))
}

/// Full BRI fit of the inverted-Pareto shape from sufficient statistics.
pub fn bri_shape_fit(stats: &SuffStats, p: f64, mode: BriMode) -> Result<BriFit> {
    let mle = ip_mle(stats)?;
    let loss = ShapeLoss::new(stats.n, mle.kappa_hat)?;
    let post = loss.posterior();
    let (point, (lower, upper), expected_loss_at_point) = match mode {
        BriMode::Numeric => {
            let point = loss.minimiser();
            (point, intrinsic_interval(&loss, point, p)?, loss.expected_loss(point))
        }
        BriMode::Approximation => {
            let point = bri_shape(stats.n, mle.kappa_hat, mode)?;
            let f = |k: f64| loss.approx_expected_loss(k);
            let (lo, hi) = level_bounds(&post);
            let interval = level_set_interval(f, |a, b| post.mass(a, b), mle.kappa_hat, lo, hi, p)?;
            (point, interval, loss.approx_expected_loss(point))
        }
    };
    Ok(BriFit { point, lower, upper, probability: p, expected_loss_at_point, mode })
}

/// BRI fit from `(n, κ̂)` alone, numeric mode.
pub fn bri_shape_fit_from_mle(n: usize, kappa_hat: f64, p: f64) -> Result<BriFit> {
    let loss = ShapeLoss::new(n, kappa_hat)?;
    let point = loss.minimiser();
    let (lower, upper) = intrinsic_interval(&loss, point, p)?;
    Ok(BriFit {
        point,
        lower,
        upper,
        probability: p,
        expected_loss_at_point: loss.expected_loss(point),
        mode: BriMode::Numeric,
    })
}

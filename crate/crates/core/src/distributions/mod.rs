//! The generalised Pareto family: densities, CDFs, quantiles, inverse-CDF
//! samplers, variable changes between members and mean-excess functions.
//!
//! GPD convention: `f(x) = (1/σ)(1 - κx/σ)^(1/κ - 1)`, support `(0, ∞)` for
//! `κ ≤ 0` and `(0, σ/κ]` for `κ > 0`. Heavy tails are `κ < 0`; the common
//! `ξ` parameterisation is `ξ = -κ`.

mod conjugate;
mod transform;

pub use conjugate::{pareto_gamma_update, reference_shape_posterior, GammaPosterior, ParetoGammaHyper};
pub use transform::{transform, transform_into, Family, Mapping, VariableChange};

use crate::error::{Error, Result};
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistSpec {
    /// Generalised Pareto with shape `kappa` (any real) and scale `sigma > 0`.
    Gpd { kappa: f64, sigma: f64 },
    /// Pareto on `[beta, ∞)`.
    Pareto { alpha: f64, beta: f64 },
    /// Inverted Pareto on `(0, beta]`.
    InvPareto { alpha: f64, beta: f64 },
    /// Location-exponential: rate `alpha`, support `[theta, ∞)`.
    LocExp { alpha: f64, theta: f64 },
    Exponential { rate: f64 },
    /// Uniform on `(0, upper]`.
    Uniform { upper: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite, got {v}")))
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")))
    }
}

impl DistSpec {
    pub fn gpd(kappa: f64, sigma: f64) -> Result<Self> {
        Self::Gpd { kappa, sigma }.validated()
    }
    pub fn pareto(alpha: f64, beta: f64) -> Result<Self> {
        Self::Pareto { alpha, beta }.validated()
    }
    pub fn inv_pareto(alpha: f64, beta: f64) -> Result<Self> {
        Self::InvPareto { alpha, beta }.validated()
    }
    pub fn loc_exp(alpha: f64, theta: f64) -> Result<Self> {
        Self::LocExp { alpha, theta }.validated()
    }
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }
    pub fn uniform(upper: f64) -> Result<Self> {
        Self::Uniform { upper }.validated()
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Gpd { kappa, sigma } => {
                finite("kappa", kappa)?;
                positive("sigma", sigma)
            }
            Self::Pareto { alpha, beta } | Self::InvPareto { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)
            }
            Self::LocExp { alpha, theta } => {
                positive("alpha", alpha)?;
                finite("theta", theta)
            }
            Self::Exponential { rate } => positive("rate", rate),
            Self::Uniform { upper } => positive("upper", upper),
        }
    }

    fn validated(self) -> Result<Self> {
        self.validate().map(|_| self)
    }

    /// Closure of the support as `(lower, upper)`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Gpd { kappa, sigma } if kappa > 0.0 => (0.0, sigma / kappa),
            Self::Gpd { .. } | Self::Exponential { .. } => (0.0, f64::INFINITY),
            Self::Pareto { beta, .. } => (beta, f64::INFINITY),
            Self::InvPareto { beta, .. } => (0.0, beta),
            Self::LocExp { theta, .. } => (theta, f64::INFINITY),
            Self::Uniform { upper } => (0.0, upper),
        }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        self.validate()?;
        let (lo, hi) = self.support();
        if x < lo || x > hi || x.is_nan() {
            return Ok(0.0);
        }
        let d = match *self {
            Self::Gpd { kappa, sigma } => {
                if kappa == 0.0 {
                    (-x / sigma).exp() / sigma
                } else {
                    let t = -kappa * x / sigma;
                    if t <= -1.0 {
                        // Upper endpoint of a bounded support: 0, 1/σ or ∞.
                        0f64.powf(1.0 / kappa - 1.0) / sigma
                    } else {
                        ((1.0 / kappa - 1.0) * t.ln_1p()).exp() / sigma
                    }
                }
            }
            Self::Pareto { alpha, beta } => alpha / beta * (x / beta).powf(-(alpha + 1.0)),
            Self::InvPareto { alpha, beta } => alpha / beta * (x / beta).powf(alpha - 1.0),
            Self::LocExp { alpha, theta } => alpha * (-alpha * (x - theta)).exp(),
            Self::Exponential { rate } => rate * (-rate * x).exp(),
            Self::Uniform { upper } => 1.0 / upper,
        };
        Ok(d)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        let (lo, hi) = self.support();
        if x <= lo {
            return Ok(0.0);
        }
        if x >= hi {
            return Ok(1.0);
        }
        let p = match *self {
            Self::Gpd { kappa, sigma } => {
                if kappa == 0.0 {
                    -(-x / sigma).exp_m1()
                } else {
                    -((-kappa * x / sigma).ln_1p() / kappa).exp_m1()
                }
            }
            Self::Pareto { alpha, beta } => -(alpha * (beta / x).ln()).exp_m1(),
            Self::InvPareto { alpha, beta } => (x / beta).powf(alpha),
            Self::LocExp { alpha, theta } => -(-alpha * (x - theta)).exp_m1(),
            Self::Exponential { rate } => -(-rate * x).exp_m1(),
            Self::Uniform { upper } => x / upper,
        };
        Ok(p.clamp(0.0, 1.0))
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.validate()?;
        check_probability(p)?;
        Ok(self.quantile_unchecked(p))
    }

    fn quantile_unchecked(&self, p: f64) -> f64 {
        // ln(1 - p), accurate for small p.
        let log_survival = (-p).ln_1p();
        match *self {
            Self::Gpd { kappa, sigma } => {
                if kappa == 0.0 {
                    -sigma * log_survival
                } else {
                    -sigma * (kappa * log_survival).exp_m1() / kappa
                }
            }
            Self::Pareto { alpha, beta } => beta * (-log_survival / alpha).exp(),
            Self::InvPareto { alpha, beta } => beta * (p.ln() / alpha).exp(),
            Self::LocExp { alpha, theta } => theta - log_survival / alpha,
            Self::Exponential { rate } => -log_survival / rate,
            Self::Uniform { upper } => p * upper,
        }
    }

    /// `n` i.i.d. draws by inversion of the CDF, in draw order.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.validate()?;
        Ok((0..n).map(|_| self.quantile_unchecked(rng.sample(Open01))).collect())
    }

    /// Mean, when it exists.
    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        match *self {
            Self::Gpd { kappa, sigma } => {
                if kappa > -1.0 {
                    Ok(sigma / (1.0 + kappa))
                } else {
                    Err(Error::MomentExistence(format!("GPD mean requires kappa > -1, got {kappa}")))
                }
            }
            Self::Pareto { alpha, beta } => {
                if alpha > 1.0 {
                    Ok(alpha * beta / (alpha - 1.0))
                } else {
                    Err(Error::MomentExistence(format!("Pareto mean requires alpha > 1, got {alpha}")))
                }
            }
            Self::InvPareto { alpha, beta } => Ok(alpha * beta / (alpha + 1.0)),
            Self::LocExp { alpha, theta } => Ok(theta + 1.0 / alpha),
            Self::Exponential { rate } => Ok(1.0 / rate),
            Self::Uniform { upper } => Ok(upper / 2.0),
        }
    }

    /// Mean excess `E[X - t | X > t]` for `t` inside the support.
    pub fn mean_excess(&self, t: f64) -> Result<f64> {
        self.validate()?;
        let (lo, hi) = self.support();
        if !(t >= lo && t < hi) {
            return Err(Error::Domain(format!("threshold {t} outside the support [{lo}, {hi})")));
        }
        match *self {
            Self::Gpd { kappa, sigma } => {
                if kappa <= -1.0 {
                    return Err(Error::MomentExistence(format!(
                        "GPD mean excess requires kappa > -1, got {kappa}"
                    )));
                }
                Ok((sigma - kappa * t) / (1.0 + kappa))
            }
            Self::Pareto { alpha, .. } => {
                if alpha <= 1.0 {
                    return Err(Error::MomentExistence(format!(
                        "Pareto mean excess requires alpha > 1, got {alpha}"
                    )));
                }
                Ok(t / (alpha - 1.0))
            }
            Self::InvPareto { alpha, beta } => {
                let r = t / beta;
                let survival = 1.0 - r.powf(alpha);
                let integral = beta - t - beta * (1.0 - r.powf(alpha + 1.0)) / (alpha + 1.0);
                Ok(integral / survival)
            }
            Self::LocExp { alpha, .. } => Ok(1.0 / alpha),
            Self::Exponential { rate } => Ok(1.0 / rate),
            Self::Uniform { upper } => Ok((upper - t) / 2.0),
        }
    }
}

use crate::error::{Error, Result};
use crate::intrinsic::SuffStats;
use serde::Serialize;
use statrs::distribution::{Continuous, ContinuousCDF, Gamma};

/// Pareto-Gamma conjugate prior for the inverted-Pareto `(κ, σ)`:
/// `σ | κ ~ Pareto(kκ, b)` and `κ ~ Gamma(c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParetoGammaHyper {
    pub k: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ParetoGammaHyper {
    pub fn new(k: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, v) in [("k", k), ("b", b), ("c", c), ("d", d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("hyperparameter {name} must be positive, got {v}")));
            }
        }
        Ok(Self { k, b, c, d })
    }
}

/// Gamma law (shape/rate) for the inverted-Pareto shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPosterior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPosterior {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && rate > 0.0 && rate.is_finite()) {
            return Err(Error::Parameter(format!(
                "gamma posterior needs positive shape and rate, got ({shape}, {rate})"
            )));
        }
        Ok(Self { shape, rate })
    }

    /// Reference posterior `Ga(n - 1, n / κ̂)`.
    pub fn reference(n: usize, kappa_hat: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateSample(format!(
                "reference posterior needs n >= 2, got {n}"
            )));
        }
        Self::new(n as f64 - 1.0, n as f64 / kappa_hat)
    }

    fn law(&self) -> Gamma {
        Gamma::new(self.shape, self.rate).expect("validated on construction")
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    pub fn mode(&self) -> f64 {
        ((self.shape - 1.0) / self.rate).max(0.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 { 0.0 } else { self.law().pdf(x) }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 { f64::NEG_INFINITY } else { self.law().ln_pdf(x) }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 { 0.0 } else { self.law().cdf(x) }
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 { 1.0 } else { self.law().sf(x) }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
        }
        Ok(self.law().inverse_cdf(p))
    }

    /// Mass of `[lo, hi]`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        // Work on whichever tail keeps precision.
        if lo > self.mean() {
            self.sf(lo) - self.sf(hi)
        } else {
            self.cdf(hi) - self.cdf(lo)
        }
    }
}

/// Marginal posterior of the shape under the Pareto-Gamma prior:
/// `Ga(n + c, d + q)` with `q = n ln(s/t1) + k ln(s/b)` and `s = max(t2, b)`.
pub fn pareto_gamma_update(hyper: &ParetoGammaHyper, stats: &SuffStats) -> Result<GammaPosterior> {
    if stats.n > 1 && stats.t1 >= stats.t2 {
        return Err(Error::DegenerateSample("all observations are equal".into()));
    }
    let n = stats.n as f64;
    let s = stats.t2.max(hyper.b);
    let q = n * (s / stats.t1).ln() + hyper.k * (s / hyper.b).ln();
    GammaPosterior::new(n + hyper.c, hyper.d + q)
}

/// The improper-prior limit `π(κ, σ) ∝ 1/(κσ)`: `Ga(n - 1, n/κ̂)`.
pub fn reference_shape_posterior(stats: &SuffStats) -> Result<GammaPosterior> {
    let mle = crate::intrinsic::ip_mle(stats)?;
    GammaPosterior::reference(stats.n, mle.kappa_hat)
}

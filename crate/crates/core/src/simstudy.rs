//! Monte Carlo comparison of the BRI, maximum-likelihood and PWM shape
//! estimators on Pareto data, and a check of the shape MLE's sampling law.

use crate::classical::pwm_fit;
use crate::distributions::DistSpec;
use crate::error::{Error, Result};
use crate::evt::Method;
use crate::intrinsic::{bri_shape_factor, ip_mle, suff_stats};
use crate::numeric::ks_statistic;
use crate::rng::{derive_seed, stream};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma_ur;

/// Scale on which estimation errors are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorScale {
    /// Pareto shape `κ`.
    ParetoShape,
    /// GPD shape of the excesses, `-1/κ`.
    GpdShape,
}

impl std::str::FromStr for ErrorScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pareto-shape" => Ok(ErrorScale::ParetoShape),
            "gpd-shape" => Ok(ErrorScale::GpdShape),
            other => Err(Error::Parameter(format!("unknown error scale '{other}'"))),
        }
    }
}

impl std::fmt::Display for ErrorScale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ErrorScale::ParetoShape => "pareto-shape",
            ErrorScale::GpdShape => "gpd-shape",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    /// Pareto shapes.
    pub kappas: Vec<f64>,
    /// Pareto scale (lower bound of the support).
    pub sigma: f64,
    pub sizes: Vec<usize>,
    pub replications: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub error_scale: ErrorScale,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            kappas: vec![1.0 / 3.0, 3.0, 7.0],
            sigma: 4.0,
            sizes: vec![15, 50, 100],
            replications: 5000,
            methods: vec![Method::Bri, Method::Mle, Method::Pwm],
            seed: 20_240_601,
            error_scale: ErrorScale::GpdShape,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Parameter("replications must be at least 1".into()));
        }
        if self.kappas.is_empty() || self.sizes.is_empty() || self.methods.is_empty() {
            return Err(Error::Parameter("shapes, sample sizes and methods must be non-empty".into()));
        }
        if let Some(k) = self.kappas.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(Error::Parameter(format!("Pareto shapes must be positive, got {k}")));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Parameter(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.methods.contains(&Method::Jeffreys) {
            return Err(Error::Parameter("the simulation study covers BRI, MLE and PWM only".into()));
        }
        if let Some(n) = self.sizes.iter().find(|n| **n < 3) {
            return Err(Error::Parameter(format!("sample sizes must be at least 3 for BRI, got {n}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyRow {
    pub kappa: f64,
    pub n: usize,
    pub method: Method,
    pub bias: f64,
    pub mse: f64,
    /// Replications that produced an estimate.
    pub replications: usize,
    /// Replications where the estimator was undefined.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyTable {
    pub error_scale: ErrorScale,
    pub seed: u64,
    pub rows: Vec<StudyRow>,
}

impl StudyTable {
    pub fn get(&self, kappa: f64, n: usize, method: Method) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.kappa == kappa && r.n == n && r.method == method)
    }
}

/// Cell identifier derived from the cell's values, so seeds do not depend on
/// the order in which cells are listed.
fn cell_id(kappa: f64, n: usize) -> u64 {
    kappa.to_bits() ^ (n as u64).rotate_left(32)
}

/// GPD-shape estimates `(BRI, MLE, PWM)` for one Pareto sample; `None` marks
/// an undefined estimator.
fn estimates(y: &[f64], sigma: f64, bri_factor: f64) -> [Option<f64>; 3] {
    let recip: Vec<f64> = y.iter().map(|v| 1.0 / v).collect();
    let mle = suff_stats(&recip).and_then(|s| ip_mle(&s)).map(|m| m.kappa_hat).ok();
    let z: Vec<f64> = y.iter().map(|v| (v - sigma).max(0.0)).collect();
    let pwm = pwm_fit(&z).ok().map(|f| f.kappa);
    [mle.map(|k| -1.0 / (k * bri_factor)), mle.map(|k| -1.0 / k), pwm]
}

fn method_index(m: Method) -> usize {
    match m {
        Method::Bri => 0,
        Method::Mle => 1,
        Method::Pwm => 2,
        Method::Jeffreys => unreachable!("rejected by validate"),
    }
}

pub fn run_study(config: &StudyConfig) -> Result<StudyTable> {
    config.validate()?;
    let mut rows = Vec::new();
    for &n in &config.sizes {
        let factor = bri_shape_factor(n)?;
        for &kappa in &config.kappas {
            let law = DistSpec::pareto(kappa, config.sigma)?;
            let cell = cell_id(kappa, n);
            let draws: Vec<[Option<f64>; 3]> = (0..config.replications as u64)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = stream(derive_seed(config.seed, cell, rep));
                    let y = law.sample(n, &mut rng).expect("valid size");
                    estimates(&y, config.sigma, factor)
                })
                .collect();
            let (target, map): (f64, fn(f64) -> f64) = match config.error_scale {
                ErrorScale::GpdShape => (-1.0 / kappa, |g| g),
                ErrorScale::ParetoShape => (kappa, |g| -1.0 / g),
            };
            for &method in &config.methods {
                let idx = method_index(method);
                let errors: Vec<f64> = draws
                    .iter()
                    .filter_map(|d| d[idx].map(map).filter(|v| v.is_finite()))
                    .map(|v| v - target)
                    .collect();
                let m = errors.len();
                let (bias, mse) = if m == 0 {
                    (f64::NAN, f64::NAN)
                } else {
                    let mf = m as f64;
                    (errors.iter().sum::<f64>() / mf, errors.iter().map(|e| e * e).sum::<f64>() / mf)
                };
                rows.push(StudyRow { kappa, n, method, bias, mse, replications: m, failures: config.replications - m });
            }
        }
    }
    Ok(StudyTable { error_scale: config.error_scale, seed: config.seed, rows })
}

/// Empirical sampling law of the inverted-Pareto shape MLE beside the
/// inverted-Gamma law `IGa(n, nκ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingLawReport {
    pub n: usize,
    pub kappa: f64,
    pub replications: usize,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    pub analytic_mean: f64,
    /// Absent for `n ≤ 2`.
    pub analytic_variance: Option<f64>,
    /// KS distance of the κ̂ sample to `IGa(n, nκ)`; absent for `n ≤ 2`.
    pub ks_statistic: Option<f64>,
    /// KS distance to `IGa(n - 1, nκ)`, the exact law when the scale is
    /// estimated by the sample maximum.
    pub ks_statistic_estimated_scale: Option<f64>,
    /// Mean and KS distance to `IGa(n, nκ)` of `n / Σ ln(σ/xᵢ)`, the shape
    /// estimator with the scale known.
    pub known_scale_mean: f64,
    pub known_scale_ks: f64,
    /// Largest σ̂ across replications, never above σ.
    pub sigma_hat_max: f64,
    pub sigma_hat_mean: f64,
    pub sigma: f64,
}

impl SamplingLawReport {
    /// `|empirical - analytic|` in units of the analytic standard error.
    pub fn mean_z(&self) -> Option<f64> {
        self.analytic_variance
            .map(|v| (self.empirical_mean - self.analytic_mean) / (v / self.replications as f64).sqrt())
    }
}

/// CDF of the inverted-Gamma law with shape `a` and scale `b`.
pub fn inv_gamma_cdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_ur(a, b / x)
    }
}

pub fn sampling_law_check(n: usize, kappa: f64, replications: usize, seed: u64) -> Result<SamplingLawReport> {
    if replications < 1000 {
        return Err(Error::Parameter(format!("need at least 1000 replications, got {replications}")));
    }
    if n < 2 {
        return Err(Error::DegenerateSample(format!("the shape MLE needs n >= 2, got {n}")));
    }
    let sigma = 1.0;
    let law = DistSpec::inv_pareto(kappa, sigma)?;
    let fits: Vec<(f64, f64, f64)> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| -> Result<(f64, f64, f64)> {
            let x = law.sample(n, &mut stream(derive_seed(seed, n as u64, rep)))?;
            let m = ip_mle(&suff_stats(&x)?)?;
            let known = n as f64 / x.iter().map(|v| (sigma / v).ln()).sum::<f64>();
            Ok((m.kappa_hat, m.sigma_hat, known))
        })
        .collect::<Result<_>>()?;
    let k: Vec<f64> = fits.iter().map(|f| f.0).collect();
    let known: Vec<f64> = fits.iter().map(|f| f.2).collect();
    let (nf, r) = (n as f64, replications as f64);
    let b = nf * kappa;
    let analytic_mean = b / (nf - 1.0);
    let analytic_variance = (n > 2).then(|| b * b / ((nf - 1.0).powi(2) * (nf - 2.0)));
    let ks = (n > 2).then(|| ks_statistic(&k, |x| inv_gamma_cdf(x, nf, b)));
    let ks_est = (n > 2).then(|| ks_statistic(&k, |x| inv_gamma_cdf(x, nf - 1.0, b)));
    Ok(SamplingLawReport {
        n,
        kappa,
        replications,
        empirical_mean: crate::numeric::mean(&k),
        empirical_variance: crate::numeric::variance(&k),
        analytic_mean,
        analytic_variance,
        ks_statistic: ks,
        ks_statistic_estimated_scale: ks_est,
        known_scale_mean: crate::numeric::mean(&known),
        known_scale_ks: ks_statistic(&known, |x| inv_gamma_cdf(x, nf, b)),
        sigma_hat_max: fits.iter().map(|f| f.1).fold(0.0, f64::max),
        sigma_hat_mean: fits.iter().map(|f| f.1).sum::<f64>() / r,
        sigma,
    })
}

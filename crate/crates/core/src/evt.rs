//! Peaks over threshold: returns, tail extraction, mean-excess diagnostics,
//! Lorenz/Gini functionals, Value-at-Risk and a side-by-side comparison of
//! the four estimators.

use crate::classical::{gpd_mle_with, pwm_fit_at_level, FitResult, MleOptions};
use crate::error::{Error, Result};
use crate::intrinsic::{bri_scale, bri_shape_fit, suff_stats, BriMode};
use crate::jeffreys_mcmc::{run_chain, summarize, ChainConfig, PotContext};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnKind {
    Log,
    Simple,
}

pub fn log_to_simple(r: f64) -> f64 {
    r.exp_m1()
}

pub fn simple_to_log(r: f64) -> f64 {
    r.ln_1p()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    pub returns: Vec<f64>,
    pub kind: ReturnKind,
    /// Trading days per period.
    pub horizon: usize,
}

impl ReturnSeries {
    pub fn new(returns: Vec<f64>, kind: ReturnKind, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Parameter("horizon must be at least 1".into()));
        }
        if let Some(&bad) = returns.iter().find(|r| !r.is_finite() || (kind == ReturnKind::Simple && **r <= -1.0)) {
            return Err(Error::Domain(format!("invalid return {bad}")));
        }
        Ok(Self { returns, kind, horizon })
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn to_kind(&self, kind: ReturnKind) -> Self {
        let returns = match (self.kind, kind) {
            (ReturnKind::Log, ReturnKind::Simple) => self.returns.iter().map(|&r| log_to_simple(r)).collect(),
            (ReturnKind::Simple, ReturnKind::Log) => self.returns.iter().map(|&r| simple_to_log(r)).collect(),
            _ => self.returns.clone(),
        };
        Self { returns, kind, horizon: self.horizon }
    }
}

/// Non-overlapping `horizon`-period returns; a trailing partial period is
/// dropped.
pub fn prices_to_returns(prices: &[f64], horizon: usize, kind: ReturnKind) -> Result<ReturnSeries> {
    if horizon == 0 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    if let Some(&bad) = prices.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Error::Domain(format!("prices must be positive, got {bad}")));
    }
    if prices.len() < horizon + 1 {
        return Err(Error::DegenerateSample(format!(
            "need at least {} prices for horizon {horizon}, got {}",
            horizon + 1,
            prices.len()
        )));
    }
    let returns = prices
        .iter()
        .step_by(horizon)
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| {
            let ratio = w[1] / w[0];
            match kind {
                ReturnKind::Log => ratio.ln(),
                ReturnKind::Simple => ratio - 1.0,
            }
        })
        .collect();
    ReturnSeries::new(returns, kind, horizon)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailData {
    pub threshold: f64,
    /// Losses beyond the threshold, `|r|` for `r < -u`.
    pub exceedances: Vec<f64>,
    /// `exceedance - u`.
    pub excesses: Vec<f64>,
    pub n_tail: usize,
    pub n_total: usize,
    pub f_tilde: f64,
}

pub fn tail_exceedances(returns: &ReturnSeries, u: f64) -> Result<TailData> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Parameter(format!("threshold must be positive, got {u}")));
    }
    let exceedances: Vec<f64> = returns.returns.iter().filter(|&&r| r < -u).map(|r| -r).collect();
    if exceedances.is_empty() {
        return Err(Error::EmptyTail(u));
    }
    let excesses = exceedances.iter().map(|x| x - u).collect();
    let (n_tail, n_total) = (exceedances.len(), returns.len());
    Ok(TailData { threshold: u, exceedances, excesses, n_tail, n_total, f_tilde: n_tail as f64 / n_total as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanExcessPoint {
    pub u: f64,
    pub mean_excess: f64,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Empirical mean excess with a normal-approximation 95% band. Grid points
/// with fewer than two exceedances are omitted.
pub fn empirical_mean_excess(sample: &[f64], u_grid: &[f64]) -> Result<Vec<MeanExcessPoint>> {
    if u_grid.is_empty() {
        return Err(Error::Parameter("empty threshold grid".into()));
    }
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        let start = sorted.partition_point(|&x| x <= u);
        let ex: Vec<f64> = sorted[start..].iter().map(|x| x - u).collect();
        if ex.len() < 2 {
            continue;
        }
        let m = crate::numeric::mean(&ex);
        let half = 1.96 * (crate::numeric::variance(&ex) / ex.len() as f64).sqrt();
        out.push(MeanExcessPoint { u, mean_excess: m, lower: m - half, upper: m + half, count: ex.len() });
    }
    Ok(out)
}

fn check_mean_exists(kappa: f64) -> Result<()> {
    if kappa > -1.0 {
        Ok(())
    } else {
        Err(Error::MomentExistence(format!("the GPD mean needs kappa > -1, got {kappa}")))
    }
}

/// Gini index `1/(κ + 2)`.
pub fn gini(kappa: f64) -> Result<f64> {
    check_mean_exists(kappa)?;
    Ok(1.0 / (kappa + 2.0))
}

/// Lorenz curve `L(p) = ((1 - p)^{κ+1} + (κ + 1)p - 1)/κ`.
pub fn lorenz(p: f64, kappa: f64) -> Result<f64> {
    check_mean_exists(kappa)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("Lorenz argument must lie in [0, 1], got {p}")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(p);
    }
    let a = (-p).ln_1p();
    // (1 - p)(e^{κa} - 1)/κ + p, with the κ → 0 limit (1 - p)a + p.
    let ratio = if kappa == 0.0 { a } else { (kappa * a).exp_m1() / kappa };
    Ok((1.0 - p) * ratio + p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorenzGini {
    pub lorenz: Option<f64>,
    pub gini: f64,
}

pub fn lorenz_gini(kappa: f64, p: Option<f64>) -> Result<LorenzGini> {
    Ok(LorenzGini { lorenz: p.map(|p| lorenz(p, kappa)).transpose()?, gini: gini(kappa)? })
}

/// Value-at-Risk in log-loss units with its simple-return equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarValue {
    pub log_loss: f64,
    /// `1 - exp(-VaR)`.
    pub simple_loss: f64,
}

/// `u + (σ/κ)(1 - r^κ)` with `r = (1 - ε)/F̃`.
pub fn var_quantile(epsilon: f64, u: f64, kappa: f64, sigma: f64, f_tilde: f64) -> Result<VarValue> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
    }
    if !(u > 0.0) {
        return Err(Error::Parameter(format!("threshold must be positive, got {u}")));
    }
    if !(f_tilde > 0.0 && f_tilde <= 1.0) {
        return Err(Error::Domain(format!("F_tilde must lie in (0, 1], got {f_tilde}")));
    }
    let survival = 1.0 - epsilon;
    // 1 - ε carries rounding from the subtraction; a few ulps above F̃ still
    // counts as the threshold itself.
    if survival > f_tilde * (1.0 + 8.0 * f64::EPSILON) {
        return Err(Error::OutOfTail { survival, f_tilde });
    }
    let lr = (survival / f_tilde).ln().min(0.0);
    let excess = if kappa == 0.0 { -sigma * lr } else { -sigma * (kappa * lr).exp_m1() / kappa };
    let log_loss = u + excess;
    Ok(VarValue { log_loss, simple_loss: -(-log_loss).exp_m1() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bri,
    Mle,
    Pwm,
    Jeffreys,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Bri, Method::Mle, Method::Pwm, Method::Jeffreys];
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Bri => "BRI",
            Method::Mle => "MLE",
            Method::Pwm => "PWM",
            Method::Jeffreys => "Jeffreys",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bri" => Ok(Method::Bri),
            "mle" => Ok(Method::Mle),
            "pwm" => Ok(Method::Pwm),
            "jeffreys" | "mcmc" => Ok(Method::Jeffreys),
            other => Err(Error::Parameter(format!("unknown method '{other}'"))),
        }
    }
}

/// A point with an optional interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub point: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Estimate {
    fn new(point: f64, interval: Option<(f64, f64)>) -> Self {
        Self { point, lower: interval.map(|i| i.0), upper: interval.map(|i| i.1) }
    }

    /// Gini estimate by the decreasing map `κ ↦ 1/(κ + 2)`; endpoints where
    /// the mean does not exist are dropped.
    fn gini_of(kappa: &Estimate) -> Option<Estimate> {
        let point = gini(kappa.point).ok()?;
        let lower = kappa.upper.and_then(|k| gini(k).ok());
        let upper = kappa.lower.and_then(|k| gini(k).ok());
        Some(Estimate { point, lower, upper })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub method: Method,
    /// GPD shape for the excesses.
    pub kappa: Estimate,
    pub sigma: f64,
    pub gini: Option<Estimate>,
    pub var: VarValue,
    /// Interval probability (Bayesian) or confidence level (frequentist).
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFitOptions {
    pub probability: f64,
    pub epsilon: f64,
    pub bri_mode: BriMode,
}

impl Default for TailFitOptions {
    fn default() -> Self {
        Self { probability: 0.95, epsilon: 0.99, bri_mode: BriMode::Numeric }
    }
}

/// Fits the requested methods to one tail and tabulates shape, Gini and VaR.
///
/// BRI works on the reciprocals of the exceedances (inverted-Pareto data);
/// MLE, PWM and the Jeffreys chain work on the excesses over the threshold.
pub fn fit_tail_all(
    tail: &TailData,
    methods: &[Method],
    mcmc: &ChainConfig,
    opts: &TailFitOptions,
) -> Result<Vec<ComparisonRow>> {
    if methods.is_empty() {
        return Err(Error::Parameter("no estimation method selected".into()));
    }
    let mut unique: Vec<Method> = Vec::new();
    for m in methods {
        if !unique.contains(m) {
            unique.push(*m);
        }
    }
    unique.par_iter().map(|&m| fit_one(tail, m, mcmc, opts)).collect()
}

fn fit_one(tail: &TailData, method: Method, mcmc: &ChainConfig, opts: &TailFitOptions) -> Result<ComparisonRow> {
    let p = opts.probability;
    let var = |k: f64, s: f64| var_quantile(opts.epsilon, tail.threshold, k, s, tail.f_tilde);
    let frequentist = |fit: FitResult| -> Result<ComparisonRow> {
        let kappa = Estimate::new(fit.kappa, fit.ci_kappa);
        Ok(ComparisonRow {
            method,
            gini: Estimate::gini_of(&kappa),
            kappa,
            sigma: fit.sigma,
            var: var(fit.kappa, fit.sigma)?,
            probability: p,
        })
    };
    match method {
        Method::Bri => {
            let recip: Vec<f64> = tail.exceedances.iter().map(|x| 1.0 / x).collect();
            let stats = suff_stats(&recip)?;
            let shape = bri_shape_fit(&stats, p, opts.bri_mode)?.to_gpd()?;
            // Inverted-Pareto scale estimates 1/β of the exceedance Pareto.
            let alpha = -1.0 / shape.point;
            let beta = 1.0 / bri_scale(&stats, opts.bri_mode)?;
            let sigma = beta / alpha;
            let kappa = Estimate::new(shape.point, Some((shape.lower, shape.upper)));
            Ok(ComparisonRow { method, gini: Estimate::gini_of(&kappa), kappa, sigma, var: var(shape.point, sigma)?, probability: p })
        }
        Method::Mle => frequentist(gpd_mle_with(&tail.excesses, &MleOptions { level: p, ..MleOptions::default() })?),
        Method::Pwm => frequentist(pwm_fit_at_level(&tail.excesses, p)?),
        Method::Jeffreys => {
            let chain = run_chain(&tail.excesses, mcmc)?;
            let pot = PotContext { threshold: tail.threshold, f_tilde: tail.f_tilde, epsilon: opts.epsilon };
            let s = summarize(&chain, p, Some(pot))?;
            let kappa = Estimate::new(s.kappa.median, Some((s.kappa.lower, s.kappa.upper)));
            let var = s
                .var
                .and_then(|v| v.summary)
                .map(|v| VarValue { log_loss: v.median, simple_loss: -(-v.median).exp_m1() })
                .ok_or_else(|| Error::Numerical("no draw produced a finite VaR".into()))?;
            Ok(ComparisonRow { method, gini: Estimate::gini_of(&kappa), kappa, sigma: s.sigma.median, var, probability: p })
        }
    }
}

//! GPD posterior under the independent Jeffreys prior
//! `π(κ, σ) ∝ σ⁻¹ (1 - κ)⁻¹ (1 - 2κ)^{-1/2}`, `κ < 1/2`, sampled by
//! Metropolis-within-Gibbs.
//!
//! The κ step proposes from a Gaussian centred at the MLE and truncated above
//! at `min(1/2, σᶜ/x₍ₙ₎)`. The σ step proposes from a Gamma with mode `σᶜ`
//! when `κᶜ < 0`, and otherwise from a Gaussian centred at `σᶜ` truncated
//! below at `κᶜ x₍ₙ₎`. Both steps carry the full Hastings correction.

use crate::classical::{gpd_loglik, gpd_mle};
use crate::error::{Error, Result};
use crate::evt::{gini, var_quantile};
use crate::numeric::{ln_std_normal_cdf, sorted_quantile, std_normal_cdf, std_normal_quantile};
use crate::rng::{stream, Stream};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use std::io::Write;

pub fn log_prior(kappa: f64, sigma: f64) -> f64 {
    if !(kappa < 0.5 && sigma > 0.0) {
        return f64::NEG_INFINITY;
    }
    -sigma.ln() - (1.0 - kappa).ln() - 0.5 * (1.0 - 2.0 * kappa).ln()
}

pub fn log_posterior(kappa: f64, sigma: f64, sample: &[f64]) -> f64 {
    let lp = log_prior(kappa, sigma);
    if lp == f64::NEG_INFINITY || sample.is_empty() {
        return f64::NEG_INFINITY;
    }
    // Inside the prior support σ > 0, so the likelihood cannot fail.
    lp + gpd_loglik(kappa, sigma, sample).unwrap_or(f64::NEG_INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Standard deviation of the κ proposal; `None` picks a default from the MLE.
    pub kappa_scale: Option<f64>,
    /// Standard deviation of the truncated-Gaussian σ proposal.
    pub sigma_scale: Option<f64>,
    /// Shape of the Gamma σ proposal used while `κ < 0`.
    pub gamma_shape: f64,
    pub init: Option<(f64, f64)>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 1_000_000,
            burn_in: 10_000,
            thin: 5,
            seed: 0,
            kappa_scale: None,
            sigma_scale: None,
            gamma_shape: 50.0,
            init: None,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(Error::ChainConfig(format!(
                "iterations ({}) must exceed burn_in ({})",
                self.iterations, self.burn_in
            )));
        }
        if self.thin == 0 {
            return Err(Error::ChainConfig("thin must be at least 1".into()));
        }
        for (name, v) in [("kappa_scale", self.kappa_scale), ("sigma_scale", self.sigma_scale)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::ChainConfig(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if !(self.gamma_shape > 1.0 && self.gamma_shape.is_finite()) {
            return Err(Error::ChainConfig(format!(
                "gamma_shape must exceed 1 for the mode to exist, got {}",
                self.gamma_shape
            )));
        }
        Ok(())
    }

    pub fn retained_count(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainOutput {
    pub iteration: Vec<usize>,
    pub kappa: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Post-burn-in acceptance rate of the κ step.
    pub acceptance_kappa: f64,
    /// Post-burn-in acceptance rate of the σ step.
    pub acceptance_sigma: f64,
    /// Proposal settings actually used.
    pub kappa_scale: f64,
    pub sigma_scale: f64,
    pub kappa_centre: f64,
}

impl ChainOutput {
    /// Wraps externally produced draws, e.g. for summaries of a fixed chain.
    pub fn from_draws(kappa: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if kappa.len() != sigma.len() {
            return Err(Error::Parameter("kappa and sigma draws differ in length".into()));
        }
        Ok(Self {
            iteration: (1..=kappa.len()).collect(),
            kappa,
            sigma,
            acceptance_kappa: f64::NAN,
            acceptance_sigma: f64::NAN,
            kappa_scale: f64::NAN,
            sigma_scale: f64::NAN,
            kappa_centre: f64::NAN,
        })
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    /// Writes `iteration,kappa,sigma` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "kappa", "sigma"])?;
        for i in 0..self.len() {
            w.write_record([self.iteration[i].to_string(), self.kappa[i].to_string(), self.sigma[i].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Gaussian `N(μ, s²)` restricted to one side of a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormal {
    pub mean: f64,
    pub sd: f64,
    pub bound: f64,
    /// `true` keeps `x < bound`, `false` keeps `x > bound`.
    pub upper: bool,
}

impl TruncatedNormal {
    pub fn below(mean: f64, sd: f64, bound: f64) -> Self {
        Self { mean, sd, bound, upper: true }
    }

    pub fn above(mean: f64, sd: f64, bound: f64) -> Self {
        Self { mean, sd, bound, upper: false }
    }

    /// Standardised bound, reflected so the kept side is always `z < beta`.
    fn beta(&self) -> f64 {
        let z = (self.bound - self.mean) / self.sd;
        if self.upper { z } else { -z }
    }

    fn standardise(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.sd;
        if self.upper { z } else { -z }
    }

    fn destandardise(&self, z: f64) -> f64 {
        if self.upper { self.mean + self.sd * z } else { self.mean - self.sd * z }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = self.standardise(x);
        if z >= self.beta() {
            return f64::NEG_INFINITY;
        }
        -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln() - self.sd.ln() - ln_std_normal_cdf(self.beta())
    }

    /// Inverse-CDF draw. Deep in the tail the CDF is inverted in log space.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let beta = self.beta();
        let z = if beta > -5.0 {
            std_normal_quantile(u * std_normal_cdf(beta)).min(beta)
        } else {
            let target = u.ln() + ln_std_normal_cdf(beta);
            solve_ln_cdf(target, beta)
        };
        self.destandardise(z)
    }
}

/// Solves `ln Φ(z) = target` for `z ≤ beta` by Newton's method. `ln Φ` is
/// concave, so after the first step the iterates climb to the root from the
/// left.
fn solve_ln_cdf(target: f64, beta: f64) -> f64 {
    let mut z = beta;
    for _ in 0..100 {
        let lc = ln_std_normal_cdf(z);
        let ln_pdf = -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln();
        let slope = (ln_pdf - lc).exp();
        let step = (lc - target) / slope;
        z -= step;
        if step.abs() <= 1e-14 * z.abs().max(1.0) {
            break;
        }
    }
    z.min(beta)
}

/// Metropolis–Hastings acceptance with log target and log proposal
/// densities for the forward and reverse moves.
pub fn mh_accept<R: Rng + ?Sized>(rng: &mut R, target_new: f64, target_cur: f64, q_reverse: f64, q_forward: f64) -> bool {
    if target_new == f64::NEG_INFINITY {
        return false;
    }
    let log_ratio = target_new - target_cur + q_reverse - q_forward;
    log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio
}

fn gamma_ln_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - statrs::function::gamma::ln_gamma(shape)
}

struct Proposals {
    kappa_centre: f64,
    kappa_scale: f64,
    sigma_scale: f64,
    gamma_shape: f64,
    x_max: f64,
}

impl Proposals {
    fn kappa(&self, sigma_c: f64) -> TruncatedNormal {
        let cap = 0.5f64.min(sigma_c / self.x_max);
        TruncatedNormal::below(self.kappa_centre, self.kappa_scale, cap)
    }

    fn sigma_step(&self, rng: &mut Stream, kappa_c: f64, sigma_c: f64) -> (f64, f64, f64) {
        if kappa_c < 0.0 {
            let k = self.gamma_shape;
            let fwd_rate = (k - 1.0) / sigma_c;
            let prop = Gamma::new(k, 1.0 / fwd_rate).expect("validated shape").sample(rng);
            let rev_rate = (k - 1.0) / prop;
            (prop, gamma_ln_pdf(prop, k, fwd_rate), gamma_ln_pdf(sigma_c, k, rev_rate))
        } else {
            let lower = kappa_c * self.x_max;
            let fwd = TruncatedNormal::above(sigma_c, self.sigma_scale, lower);
            let prop = fwd.sample(rng);
            let rev = TruncatedNormal::above(prop, self.sigma_scale, lower);
            (prop, fwd.ln_pdf(prop), rev.ln_pdf(sigma_c))
        }
    }
}

/// Runs the Metropolis-within-Gibbs chain.
pub fn run_chain(sample: &[f64], config: &ChainConfig) -> Result<ChainOutput> {
    config.validate()?;
    if sample.len() < 2 {
        return Err(Error::DegenerateSample(format!("need at least 2 observations, got {}", sample.len())));
    }
    if let Some(&bad) = sample.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("observations must be positive, got {bad}")));
    }
    let n = sample.len() as f64;
    let x_max = sample.iter().copied().fold(0.0, f64::max);

    let mle = gpd_mle(sample, None).ok().filter(|f| f.kappa.is_finite() && f.sigma > 0.0);
    let (kh, sh) = mle.as_ref().map_or((0.0, crate::numeric::mean(sample)), |f| (f.kappa, f.sigma));
    let se_ok = kh < 0.5 && mle.is_some();
    let kappa_scale = config.kappa_scale.unwrap_or(if se_ok { 2.0 * (1.0 - kh) / n.sqrt() } else { 0.25 });
    let sigma_scale =
        config.sigma_scale.unwrap_or(if se_ok { 2.0 * sh * (2.0 * (1.0 - kh) / n).sqrt() } else { 0.25 * sh });
    let props = Proposals { kappa_centre: kh, kappa_scale, sigma_scale, gamma_shape: config.gamma_shape, x_max };

    let (mut k, mut s) = initial_state(config.init.unwrap_or((kh, sh)), x_max);
    let mut lp = log_posterior(k, s, sample);
    if !lp.is_finite() {
        return Err(Error::ChainConfig(format!("initial state ({k}, {s}) has zero posterior density")));
    }

    let mut rng = stream(config.seed);
    let keep = config.retained_count();
    let mut out = ChainOutput {
        iteration: Vec::with_capacity(keep),
        kappa: Vec::with_capacity(keep),
        sigma: Vec::with_capacity(keep),
        acceptance_kappa: 0.0,
        acceptance_sigma: 0.0,
        kappa_scale,
        sigma_scale,
        kappa_centre: kh,
    };
    let (mut acc_k, mut acc_s) = (0usize, 0usize);

    for it in 1..=config.iterations {
        let counted = it > config.burn_in;

        let q = props.kappa(s);
        let kp = q.sample(&mut rng);
        let lp_new = log_posterior(kp, s, sample);
        // Independence proposal: the reverse density is evaluated at the current κ.
        if mh_accept(&mut rng, lp_new, lp, q.ln_pdf(k), q.ln_pdf(kp)) {
            k = kp;
            lp = lp_new;
            acc_k += counted as usize;
        }

        let (sp, q_fwd, q_rev) = props.sigma_step(&mut rng, k, s);
        let lp_new = log_posterior(k, sp, sample);
        if mh_accept(&mut rng, lp_new, lp, q_rev, q_fwd) {
            s = sp;
            lp = lp_new;
            acc_s += counted as usize;
        }

        if counted && (it - config.burn_in) % config.thin == 0 {
            out.iteration.push(it);
            out.kappa.push(k);
            out.sigma.push(s);
        }
    }

    let post = (config.iterations - config.burn_in) as f64;
    out.acceptance_kappa = acc_k as f64 / post;
    out.acceptance_sigma = acc_s as f64 / post;
    if acc_k == 0 || acc_s == 0 {
        return Err(Error::Diagnostics(format!(
            "a coordinate never moved after burn-in (acceptance kappa {}, sigma {}); retune the proposal scales",
            out.acceptance_kappa, out.acceptance_sigma
        )));
    }
    Ok(out)
}

/// Clips a starting point into `κ < 1/2` and `σ > κ x₍ₙ₎`.
fn initial_state((k, s): (f64, f64), x_max: f64) -> (f64, f64) {
    let k = if k.is_finite() { k.min(0.49) } else { 0.0 };
    let s = if s > 0.0 && s.is_finite() { s } else { x_max };
    let s = if k > 0.0 { s.max(1.01 * k * x_max) } else { s };
    (k, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSummary {
    pub mean: f64,
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ParamSummary {
    fn of(values: &[f64], p: f64) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Self {
            mean: crate::numeric::mean(&v),
            median: sorted_quantile(&v, 0.5),
            lower: sorted_quantile(&v, 0.5 * (1.0 - p)),
            upper: sorted_quantile(&v, 0.5 * (1.0 + p)),
        }
    }
}

/// Peaks-over-threshold setting needed for draw-wise VaR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotContext {
    pub threshold: f64,
    pub f_tilde: f64,
    pub epsilon: f64,
}

/// A functional summarised over the draws where it is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalSummary {
    pub summary: Option<ParamSummary>,
    /// Draws where the functional does not exist (e.g. Gini for `κ ≤ -1`).
    pub undefined: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub probability: f64,
    pub draws: usize,
    pub kappa: ParamSummary,
    pub sigma: ParamSummary,
    pub gini: FunctionalSummary,
    pub var: Option<FunctionalSummary>,
}

pub const MIN_SUMMARY_DRAWS: usize = 100;

/// Posterior means, medians and equal-tailed intervals of mass `p`.
pub fn summarize(output: &ChainOutput, p: f64, pot: Option<PotContext>) -> Result<PosteriorSummary> {
    if output.len() < MIN_SUMMARY_DRAWS {
        return Err(Error::TooFewDraws { have: output.len(), need: MIN_SUMMARY_DRAWS });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let functional = |f: &dyn Fn(f64, f64) -> Result<f64>| {
        let vals: Vec<f64> =
            output.kappa.iter().zip(&output.sigma).filter_map(|(&k, &s)| f(k, s).ok()).collect();
        FunctionalSummary {
            summary: (!vals.is_empty()).then(|| ParamSummary::of(&vals, p)),
            undefined: output.len() - vals.len(),
        }
    };
    let gini_summary = functional(&|k, _| gini(k));
    let var = pot.map(|c| functional(&|k, s| var_quantile(c.epsilon, c.threshold, k, s, c.f_tilde).map(|v| v.log_loss)));
    Ok(PosteriorSummary {
        probability: p,
        draws: output.len(),
        kappa: ParamSummary::of(&output.kappa, p),
        sigma: ParamSummary::of(&output.sigma, p),
        gini: gini_summary,
        var,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistSpec;
    use crate::numeric::{integrate, QuadratureOptions};
    use approx::assert_relative_eq;

    fn synthetic(kappa: f64, sigma: f64, n: usize, seed: u64) -> Vec<f64> {
        DistSpec::gpd(kappa, sigma).unwrap().sample(n, &mut stream(seed)).unwrap()
    }

    fn short(seed: u64, iterations: usize) -> ChainConfig {
        ChainConfig { iterations, burn_in: 2_000, thin: 5, seed, ..ChainConfig::default() }
    }

    #[test]
    fn prior_examples() {
        assert_eq!(log_prior(0.0, 1.0), 0.0);
        assert_eq!(log_prior(0.5, 1.0), f64::NEG_INFINITY);
        assert_eq!(log_prior(0.1, 0.0), f64::NEG_INFINITY);
        let v = log_prior(-1.0, 2.0);
        assert_relative_eq!(v, -2.0 * 2f64.ln() - 0.5 * 3f64.ln(), max_relative = 1e-15);
        assert!((v + 1.93560).abs() < 1e-5);
    }

    #[test]
    fn posterior_examples() {
        assert_eq!(log_posterior(0.6, 1.0, &[0.1]), f64::NEG_INFINITY);
        assert_eq!(log_posterior(0.4, 1.0, &[3.0]), f64::NEG_INFINITY);
        assert_eq!(log_posterior(0.0, 1.0, &[1.0, 2.0]), -3.0);
    }

    #[test]
    fn config_validation() {
        assert!(ChainConfig::default().validate().is_ok());
        assert_eq!(ChainConfig::default().retained_count(), 198_000);
        let bad = ChainConfig { iterations: 10, burn_in: 10, ..ChainConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::ChainConfig(_))));
        let bad = ChainConfig { thin: 0, ..ChainConfig::default() };
        assert!(bad.validate().is_err());
        let bad = ChainConfig { kappa_scale: Some(0.0), ..ChainConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn truncated_normal_density_integrates_to_one() {
        for t in [TruncatedNormal::below(0.3, 0.2, 0.1), TruncatedNormal::above(1.0, 0.5, 1.2)] {
            let (a, b) = if t.upper { (f64::NEG_INFINITY, t.bound) } else { (t.bound, f64::INFINITY) };
            let m = integrate(|x| t.ln_pdf(x).exp(), a, b, QuadratureOptions::tolerances(1e-13, 1e-11)).unwrap().value;
            assert_relative_eq!(m, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn truncated_normal_sampling_matches_cdf() {
        let mut rng = stream(7);
        for t in [TruncatedNormal::below(0.0, 1.0, 0.5), TruncatedNormal::above(0.0, 1.0, -0.3)] {
            let xs: Vec<f64> = (0..50_000).map(|_| t.sample(&mut rng)).collect();
            assert!(xs.iter().all(|&x| if t.upper { x < t.bound } else { x > t.bound }));
            let z = std_normal_cdf(t.beta());
            let cdf = |x: f64| {
                let c = std_normal_cdf(t.standardise(x)) / z;
                if t.upper { c } else { 1.0 - c }
            };
            assert!(crate::numeric::ks_statistic(&xs, cdf) < 0.01);
        }
    }

    #[test]
    fn deep_tail_sampling_stays_in_support() {
        // Truncation 40 sd below the mean: plain inversion would underflow.
        let t = TruncatedNormal::below(0.0, 1.0, -40.0);
        let mut rng = stream(3);
        let xs: Vec<f64> = (0..2000).map(|_| t.sample(&mut rng)).collect();
        assert!(xs.iter().all(|x| *x < -40.0 && *x > -41.0));
        // Conditional excess below the bound is close to Exp(40).
        let m = xs.iter().map(|x| -40.0 - x).sum::<f64>() / xs.len() as f64;
        assert!((m * 40.0 - 1.0).abs() < 0.1, "{m}");
    }

    #[test]
    fn two_state_detailed_balance() {
        // Target (0.3, 0.7); independence proposal picks state 1 w.p. 0.8.
        let target = [0.3f64.ln(), 0.7f64.ln()];
        let q = [0.2f64.ln(), 0.8f64.ln()];
        let mut rng = stream(42);
        let mut state = 0usize;
        let mut visits = [0usize; 2];
        let mut moves = [[0usize; 2]; 2];
        let steps = 400_000;
        for _ in 0..steps {
            let prop = if rng.random::<f64>() < 0.8 { 1 } else { 0 };
            let next = if mh_accept(&mut rng, target[prop], target[state], q[state], q[prop]) { prop } else { state };
            visits[state] += 1;
            moves[state][next] += 1;
            state = next;
        }
        let flow01 = moves[0][1] as f64 / steps as f64;
        let flow10 = moves[1][0] as f64 / steps as f64;
        // Both flows equal 0.3 × 0.8 × 7/12 = 0.14.
        assert!((flow01 - 0.14).abs() < 0.004, "{flow01}");
        assert!((flow10 - 0.14).abs() < 0.004, "{flow10}");
        let p01 = moves[0][1] as f64 / visits[0] as f64;
        assert!((p01 - 0.8 * 7.0 / 12.0).abs() < 0.01);
        assert!((visits[1] as f64 / steps as f64 - 0.7).abs() < 0.01);
    }

    #[test]
    fn chain_recovers_shape_and_respects_support() {
        let xs = synthetic(-0.4, 1.0, 500, 1);
        let out = run_chain(&xs, &short(5, 40_000)).unwrap();
        assert_eq!(out.len(), (40_000 - 2_000) / 5);
        let x_max = xs.iter().copied().fold(0.0, f64::max);
        for (&k, &s) in out.kappa.iter().zip(&out.sigma) {
            assert!(k < 0.5 && s > 0.0);
            assert!(k <= 0.0 || s > k * x_max);
        }
        let s = summarize(&out, 0.95, None).unwrap();
        let sd = {
            let m = s.kappa.mean;
            (out.kappa.iter().map(|k| (k - m).powi(2)).sum::<f64>() / out.len() as f64).sqrt()
        };
        assert!((s.kappa.median + 0.4).abs() < 2.0 * sd, "median {} sd {sd}", s.kappa.median);
        for a in [out.acceptance_kappa, out.acceptance_sigma] {
            assert!(a > 0.1 && a < 0.7, "acceptance {a}");
        }
    }

    #[test]
    fn light_tail_chain_uses_gaussian_sigma_step() {
        let xs = synthetic(0.3, 1.0, 300, 2);
        let out = run_chain(&xs, &short(9, 20_000)).unwrap();
        let x_max = xs.iter().copied().fold(0.0, f64::max);
        assert!(out.kappa.iter().any(|&k| k > 0.0));
        for (&k, &s) in out.kappa.iter().zip(&out.sigma) {
            assert!(k < 0.5 && (k <= 0.0 || s > k * x_max));
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let xs = synthetic(-0.2, 2.0, 100, 4);
        let a = run_chain(&xs, &short(11, 8_000)).unwrap();
        let b = run_chain(&xs, &short(11, 8_000)).unwrap();
        assert_eq!(a, b);
        let c = run_chain(&xs, &short(12, 8_000)).unwrap();
        assert_ne!(a.kappa, c.kappa);
    }

    #[test]
    fn posterior_narrows_with_sample_size() {
        let iqr = |n: usize| {
            let xs = synthetic(-0.4, 1.0, n, 17);
            let out = run_chain(&xs, &short(23, 30_000)).unwrap();
            let mut k = out.kappa.clone();
            k.sort_by(f64::total_cmp);
            sorted_quantile(&k, 0.75) - sorted_quantile(&k, 0.25)
        };
        let ratio = iqr(500) / iqr(5000);
        let target = 10f64.sqrt();
        assert!(ratio > target / 1.5 && ratio < target * 1.5, "ratio {ratio}");
    }

    #[test]
    fn frozen_proposals_are_diagnosed() {
        let xs = synthetic(-0.4, 1.0, 200, 6);
        // A κ proposal this wide essentially never lands in the posterior bulk.
        let cfg = ChainConfig { kappa_scale: Some(1e6), iterations: 3_000, burn_in: 1_000, ..short(1, 3_000) };
        assert!(matches!(run_chain(&xs, &cfg), Err(Error::Diagnostics(_))));
    }

    #[test]
    fn constant_chain_summaries() {
        let out = ChainOutput::from_draws(vec![-0.429; 500], vec![0.02; 500]).unwrap();
        let pot = PotContext { threshold: 0.05, f_tilde: 33.0 / 316.0, epsilon: 0.99 };
        let s = summarize(&out, 0.95, Some(pot)).unwrap();
        assert_eq!((s.kappa.median, s.kappa.lower, s.kappa.upper), (-0.429, -0.429, -0.429));
        assert_relative_eq!(s.kappa.mean, -0.429, max_relative = 1e-13);
        assert_eq!(s.sigma.median, 0.02);
        let g = s.gini.summary.unwrap();
        assert!((g.median - 0.637).abs() < 5e-4);
        let v = s.var.unwrap().summary.unwrap();
        assert_eq!(v.lower, v.upper);
        let few = ChainOutput::from_draws(vec![0.0; 10], vec![1.0; 10]).unwrap();
        assert!(matches!(summarize(&few, 0.95, None), Err(Error::TooFewDraws { .. })));
    }

    #[test]
    fn csv_export() {
        let out = ChainOutput::from_draws(vec![-0.1, -0.2], vec![1.0, 1.5]).unwrap();
        let mut buf = Vec::new();
        out.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "iteration,kappa,sigma\n1,-0.1,1\n2,-0.2,1.5\n");
    }
}

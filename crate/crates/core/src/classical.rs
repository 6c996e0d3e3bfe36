//! Frequentist GPD calibration: log-likelihood, maximum likelihood and
//! probability-weighted moments, each with asymptotic covariance and Wald
//! intervals.

use crate::error::{Error, Result};
use crate::numeric::{bfgs, std_normal_quantile, BfgsOptions};
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Mle,
    Pwm,
}

impl std::fmt::Display for FitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitMethod::Mle => "MLE",
            FitMethod::Pwm => "PWM",
        })
    }
}

pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub method: FitMethod,
    pub kappa: f64,
    pub sigma: f64,
    /// Asymptotic covariance of `(κ, σ)`; absent outside its validity region.
    pub covariance: Option<Matrix2>,
    /// Inverse observed information (MLE only, when positive definite).
    pub observed_covariance: Option<Matrix2>,
    pub level: f64,
    pub ci_kappa: Option<(f64, f64)>,
    pub ci_sigma: Option<(f64, f64)>,
    pub converged: bool,
    /// Log-likelihood at the estimate (MLE only).
    pub objective_value: Option<f64>,
    pub iterations: usize,
}

impl FitResult {
    fn new(method: FitMethod, kappa: f64, sigma: f64, covariance: Option<Matrix2>, level: f64) -> Self {
        let mut fit = Self {
            method,
            kappa,
            sigma,
            covariance,
            observed_covariance: None,
            level,
            ci_kappa: None,
            ci_sigma: None,
            converged: true,
            objective_value: None,
            iterations: 0,
        };
        fit.set_intervals();
        fit
    }

    fn set_intervals(&mut self) {
        let z = std_normal_quantile(0.5 + 0.5 * self.level);
        let wald = |centre: f64, var: f64| (centre - z * var.sqrt(), centre + z * var.sqrt());
        self.ci_kappa = self.covariance.map(|c| wald(self.kappa, c[0][0]));
        self.ci_sigma = self.covariance.map(|c| wald(self.sigma, c[1][1]));
    }

    /// Standard error of the shape, from the asymptotic covariance.
    pub fn se_kappa(&self) -> Option<f64> {
        self.covariance.map(|c| c[0][0].sqrt())
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("confidence level must lie in (0, 1), got {level}")))
    }
}

fn check_sample(sample: &[f64], min_len: usize) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.len() < min_len {
        return Err(Error::DegenerateSample(format!(
            "need at least {min_len} observations, got {}",
            sample.len()
        )));
    }
    if let Some(&bad) = sample.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("excesses must be nonnegative and finite, got {bad}")));
    }
    Ok(())
}

/// GPD log-likelihood. Points outside the support give `-∞`.
pub fn gpd_loglik(kappa: f64, sigma: f64, sample: &[f64]) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
    }
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(loglik_unchecked(kappa, sigma, sample))
}

fn loglik_unchecked(kappa: f64, sigma: f64, sample: &[f64]) -> f64 {
    let n = sample.len() as f64;
    let mut sum = 0.0;
    for &x in sample {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        let y = x / sigma;
        if kappa == 0.0 {
            sum -= y;
            continue;
        }
        let u = kappa * y;
        if u > 1.0 {
            return f64::NEG_INFINITY;
        }
        if u == 1.0 {
            // Upper endpoint: density is 0, finite or infinite as κ <, =, > 1.
            if kappa < 1.0 {
                return f64::NEG_INFINITY;
            } else if kappa > 1.0 {
                return f64::INFINITY;
            }
            continue;
        }
        let l = (-u).ln_1p();
        // (1/κ - 1) ln(1 - u), written to stay accurate as κ → 0.
        sum += if u == 0.0 { 0.0 } else { y * l / u } - l;
    }
    -n * sigma.ln() + sum
}

/// Gradient of the log-likelihood in `(κ, ln σ)`, finite inside the support.
fn loglik_gradient(kappa: f64, sigma: f64, sample: &[f64]) -> [f64; 2] {
    let mut gk = 0.0;
    let mut gs = -(sample.len() as f64);
    for &x in sample {
        let y = x / sigma;
        let u = kappa * y;
        gk += y * y * small_h(u) + y / (1.0 - u);
        gs += (1.0 - kappa) * y / (1.0 - u);
    }
    [gk, gs]
}

/// `h(u) = (-ln(1 - u) - u/(1 - u)) / u²`, with a series near 0.
fn small_h(u: f64) -> f64 {
    if u.abs() < 0.1 {
        // -Σ (j+1)/(j+2) u^j
        let mut term = 1.0;
        let mut acc = 0.0;
        for j in 0..24 {
            let jf = j as f64;
            acc -= (jf + 1.0) / (jf + 2.0) * term;
            term *= u;
        }
        acc
    } else {
        (-(-u).ln_1p() - u / (1.0 - u)) / (u * u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub init: Option<(f64, f64)>,
    pub level: f64,
    pub max_iterations: usize,
    /// Convergence threshold on the gradient norm of the mean log-likelihood
    /// in `(κ, ln σ)`.
    pub gradient_tolerance: f64,
    pub restarts: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { init: None, level: 0.95, max_iterations: 500, gradient_tolerance: 1e-8, restarts: 3 }
    }
}

/// Maximum-likelihood GPD fit with default options and the given start.
pub fn gpd_mle(sample: &[f64], init: Option<(f64, f64)>) -> Result<FitResult> {
    gpd_mle_with(sample, &MleOptions { init, ..MleOptions::default() })
}

pub fn gpd_mle_with(sample: &[f64], opts: &MleOptions) -> Result<FitResult> {
    check_sample(sample, 2)?;
    check_level(opts.level)?;
    let n = sample.len() as f64;
    let x_max = sample.iter().copied().fold(0.0, f64::max);
    if x_max == 0.0 {
        return Err(Error::DegenerateSample("all excesses are zero".into()));
    }

    // Minimise the negative mean log-likelihood over θ = (κ, ln σ), κ ≤ 1.
    let objective = |t: &[f64]| -> (f64, Vec<f64>) {
        let (kappa, sigma) = (t[0], t[1].exp());
        if kappa > 1.0 || !sigma.is_finite() || sigma <= 0.0 || kappa * x_max >= sigma {
            return (f64::INFINITY, vec![0.0, 0.0]);
        }
        let l = loglik_unchecked(kappa, sigma, sample);
        if !l.is_finite() {
            return (f64::INFINITY, vec![0.0, 0.0]);
        }
        let g = loglik_gradient(kappa, sigma, sample);
        (-l / n, vec![-g[0] / n, -g[1] / n])
    };

    let start = feasible_start(opts.init, sample, x_max);
    let bfgs_opts = BfgsOptions {
        max_iterations: opts.max_iterations,
        // Iterate past the reporting threshold; stop early only on stagnation.
        gradient_tolerance: opts.gradient_tolerance * 1e-2,
    };
    let mut best = bfgs(objective, &[start.0, start.1.ln()], bfgs_opts);
    let mut iterations = best.iterations;
    let mut rng = crate::rng::stream(0x6d6c_6521);
    for _ in 0..opts.restarts {
        if best.gradient_norm() < opts.gradient_tolerance {
            break;
        }
        let jitter = [start.0 + 0.2 * (rng.random::<f64>() - 0.5), start.1.ln() + 0.2 * (rng.random::<f64>() - 0.5)];
        let k = jitter[0].min(0.99);
        let ls = jitter[1].max((k.max(0.0) * x_max * 1.01).ln());
        if !objective(&[k, ls]).0.is_finite() {
            continue;
        }
        let attempt = bfgs(objective, &[k, ls], bfgs_opts);
        iterations += attempt.iterations;
        let better_grad = attempt.gradient_norm() < best.gradient_norm();
        if attempt.value < best.value - 1e-12 || (attempt.value <= best.value + 1e-12 && better_grad) {
            best = attempt;
        }
    }

    let (kappa, sigma, grad_norm) = newton_polish(&objective, best.x[0], best.x[1], best.gradient_norm());
    let converged = grad_norm < opts.gradient_tolerance;
    let covariance = (kappa < 0.5).then(|| mle_covariance(kappa, sigma, sample.len()));
    let mut fit = FitResult::new(FitMethod::Mle, kappa, sigma, covariance, opts.level);
    fit.converged = converged;
    fit.objective_value = Some(loglik_unchecked(kappa, sigma, sample));
    fit.iterations = iterations;
    fit.observed_covariance = observed_covariance(kappa, sigma, sample);
    Ok(fit)
}

/// A few Newton steps on the gradient, with the Hessian from central
/// differences. Near the optimum the objective's value is flat to rounding,
/// so a value-based line search stalls early; the gradient still carries
/// information. Steps are kept only while they shrink the gradient.
fn newton_polish<F>(objective: &F, k0: f64, l0: f64, g0: f64) -> (f64, f64, f64)
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let (mut k, mut l, mut gnorm) = (k0, l0, g0);
    for _ in 0..6 {
        let (v, g) = objective(&[k, l]);
        if !v.is_finite() {
            break;
        }
        let h = 1e-6;
        let column = |dk: f64, dl: f64| -> Option<[f64; 2]> {
            let (vp, gp) = objective(&[k + dk, l + dl]);
            let (vm, gm) = objective(&[k - dk, l - dl]);
            (vp.is_finite() && vm.is_finite()).then(|| [(gp[0] - gm[0]) / (2.0 * h), (gp[1] - gm[1]) / (2.0 * h)])
        };
        let (Some(ck), Some(cl)) = (column(h, 0.0), column(0.0, h)) else { break };
        let (a, b, d) = (ck[0], 0.5 * (ck[1] + cl[0]), cl[1]);
        let det = a * d - b * b;
        if !(a > 0.0 && det > 0.0) {
            break;
        }
        let dk = -(d * g[0] - b * g[1]) / det;
        let dl = -(a * g[1] - b * g[0]) / det;
        let (vn, gn) = objective(&[k + dk, l + dl]);
        let nn = (gn[0] * gn[0] + gn[1] * gn[1]).sqrt();
        if !vn.is_finite() || nn >= gnorm {
            break;
        }
        (k, l, gnorm) = (k + dk, l + dl, nn);
    }
    (k, l.exp(), gnorm)
}

fn feasible_start(init: Option<(f64, f64)>, sample: &[f64], x_max: f64) -> (f64, f64) {
    let clip = |(k, s): (f64, f64)| {
        let k = k.min(0.95);
        let s = if k > 0.0 { s.max(1.05 * k * x_max) } else { s };
        (k, s)
    };
    if let Some((k, s)) = init {
        if k.is_finite() && s > 0.0 && s.is_finite() {
            return clip((k, s));
        }
    }
    if let Ok(p) = pwm_fit(sample) {
        if p.kappa < 1.0 && p.sigma > 0.0 && p.kappa * x_max < p.sigma {
            return clip((p.kappa, p.sigma));
        }
    }
    // For a GPD, var/mean² = 1/(1 + 2κ); its side of 1 gives the sign of κ.
    let m = crate::numeric::mean(sample);
    let v = if sample.len() > 1 { crate::numeric::variance(sample) } else { 0.0 };
    let hint = if v < m * m { 1.0 } else { -1.0 };
    clip((0.1 * hint, m.max(f64::MIN_POSITIVE)))
}

/// Expected-information covariance of the MLE, valid for κ < 1/2.
pub fn mle_covariance(kappa: f64, sigma: f64, n: usize) -> Matrix2 {
    let a = 1.0 - kappa;
    let nf = n as f64;
    let off = sigma * a / nf;
    [[a * a / nf, off], [off, 2.0 * sigma * sigma * a / nf]]
}

/// Inverse of the observed information, by central differences of the
/// analytic gradient in `(κ, ln σ)` mapped back to `(κ, σ)`.
fn observed_covariance(kappa: f64, sigma: f64, sample: &[f64]) -> Option<Matrix2> {
    let ls = sigma.ln();
    let grad = |k: f64, l: f64| -> Option<[f64; 2]> {
        let s = l.exp();
        let max = sample.iter().copied().fold(0.0, f64::max);
        (k <= 1.0 && k * max < s).then(|| loglik_gradient(k, s, sample))
    };
    let hk = 1e-5 * kappa.abs().max(0.1);
    let hl = 1e-5;
    let (gkp, gkm) = (grad(kappa + hk, ls)?, grad(kappa - hk, ls)?);
    let (glp, glm) = (grad(kappa, ls + hl)?, grad(kappa, ls - hl)?);
    let h00 = (gkp[0] - gkm[0]) / (2.0 * hk);
    let h11 = (glp[1] - glm[1]) / (2.0 * hl);
    let h01 = 0.5 * ((gkp[1] - gkm[1]) / (2.0 * hk) + (glp[0] - glm[0]) / (2.0 * hl));
    // Information = -Hessian; invert the 2×2.
    let (a, b, d) = (-h00, -h01, -h11);
    let det = a * d - b * b;
    if !(a > 0.0 && det > 0.0) {
        return None;
    }
    let (c00, c01, c11) = (d / det, -b / det, a / det);
    // κ is untouched; σ = e^l contributes a factor σ per σ index.
    Some([[c00, sigma * c01], [sigma * c01, sigma * sigma * c11]])
}

/// Probability-weighted-moments fit at the 0.95 level.
pub fn pwm_fit(sample: &[f64]) -> Result<FitResult> {
    pwm_fit_at_level(sample, 0.95)
}

/// Empirical `(μ̂₀, μ̂₁)` with plotting positions `p_i = (i - 0.35)/n`.
pub fn pwm_moments(sample: &[f64]) -> Result<(f64, f64)> {
    check_sample(sample, 1)?;
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let (mut m0, mut m1) = (0.0, 0.0);
    for (i, x) in xs.iter().enumerate() {
        let p = (i as f64 + 1.0 - 0.35) / n;
        m0 += x;
        m1 += x * (1.0 - p);
    }
    Ok((m0 / n, m1 / n))
}

pub fn pwm_fit_at_level(sample: &[f64], level: f64) -> Result<FitResult> {
    check_sample(sample, 2)?;
    check_level(level)?;
    let (m0, m1) = pwm_moments(sample)?;
    let denom = m0 - 2.0 * m1;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::EstimatorUndefined("mu0 = 2 mu1".into()));
    }
    let kappa = m0 / denom - 2.0;
    let sigma = 2.0 * m0 * m1 / denom;
    if !(sigma > 0.0) {
        return Err(Error::EstimatorUndefined(format!("non-positive scale {sigma}")));
    }
    let covariance = pwm_covariance(kappa, sigma, sample.len());
    Ok(FitResult::new(FitMethod::Pwm, kappa, sigma, covariance, level))
}

/// Asymptotic PWM covariance.
///
/// Reported for `-1/2 < κ < 1/2`: below `-1/2` the `1 + 2κ` factor turns
/// negative and the matrix is no longer a covariance.
pub fn pwm_covariance(kappa: f64, sigma: f64, n: usize) -> Option<Matrix2> {
    if !(kappa > -0.5 && kappa < 0.5) {
        return None;
    }
    let k = kappa;
    let scale = 1.0 / (n as f64 * (1.0 + 2.0 * k) * (3.0 + 2.0 * k));
    let c00 = (1.0 + k) * (2.0 + k).powi(2) * (1.0 + k + 2.0 * k * k);
    let c01 = sigma * (2.0 + k) * (2.0 + 6.0 * k + 7.0 * k * k + 2.0 * k.powi(3));
    let c11 = sigma * sigma * (7.0 + 18.0 * k + 11.0 * k * k + 2.0 * k.powi(3));
    Some([[scale * c00, scale * c01], [scale * c01, scale * c11]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistSpec;
    use crate::numeric::integrate;
    use crate::rng::stream;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gpd_sample(kappa: f64, sigma: f64, n: usize, seed: u64) -> Vec<f64> {
        DistSpec::gpd(kappa, sigma).unwrap().sample(n, &mut stream(seed)).unwrap()
    }

    #[test]
    fn loglik_examples() {
        assert_eq!(gpd_loglik(0.0, 1.0, &[1.0, 2.0]).unwrap(), -3.0);
        let xs = [0.2, 0.9, 1.7, 2.5];
        let v = gpd_loglik(1.0, 2.5, &xs).unwrap();
        assert_relative_eq!(v, -4.0 * 2.5f64.ln(), max_relative = 1e-15);
        let a = gpd_loglik(0.0, 1.3, &xs).unwrap();
        let b = gpd_loglik(1e-10, 1.3, &xs).unwrap();
        assert!((a - b).abs() < 1e-6);
        assert_eq!(gpd_loglik(0.5, 1.0, &[2.5]).unwrap(), f64::NEG_INFINITY);
        assert!(gpd_loglik(0.1, 0.0, &xs).is_err());
        assert!(matches!(gpd_loglik(0.1, 1.0, &[]), Err(Error::EmptySample)));
    }

    #[test]
    fn loglik_matches_density() {
        let xs = [0.1, 0.4, 1.9];
        for &(k, s) in &[(-0.4, 1.0), (0.3, 2.0), (0.0, 0.7)] {
            let d = DistSpec::gpd(k, s).unwrap();
            let direct: f64 = xs.iter().map(|&x| d.density(x).unwrap().ln()).sum();
            assert_relative_eq!(gpd_loglik(k, s, &xs).unwrap(), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let xs = gpd_sample(-0.3, 1.2, 50, 3);
        for &(k, s) in &[(-0.3, 1.2), (0.05, 20.0), (1e-9, 0.9), (-2e-3, 1.5)] {
            let g = loglik_gradient(k, s, &xs);
            let h = 1e-6;
            let fk = (loglik_unchecked(k + h, s, &xs) - loglik_unchecked(k - h, s, &xs)) / (2.0 * h);
            let fl = (loglik_unchecked(k, s * h.exp(), &xs) - loglik_unchecked(k, s * (-h).exp(), &xs)) / (2.0 * h);
            assert!((g[0] - fk).abs() < 1e-5 * fk.abs().max(1.0), "{k}: {} vs {fk}", g[0]);
            assert!((g[1] - fl).abs() < 1e-5 * fl.abs().max(1.0));
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        for u in [0.0999999f64, -0.0999999] {
            let exact = (-(-u).ln_1p() - u / (1.0 - u)) / (u * u);
            assert_relative_eq!(small_h(u), exact, max_relative = 1e-9);
        }
        assert_eq!(small_h(0.0), -0.5);
    }

    #[test]
    fn mle_recovers_heavy_tail() {
        let (k, s, n) = (-1.0 / 3.0, 4.0 / 3.0, 5000);
        let xs = gpd_sample(k, s, n, 11);
        let fit = gpd_mle(&xs, None).unwrap();
        assert!(fit.converged);
        let se = (1.0 - k) / (n as f64).sqrt();
        assert!((fit.kappa - k).abs() < 3.0 * se, "{fit:?}");
        let (lo, hi) = fit.ci_kappa.unwrap();
        assert!(lo < fit.kappa && fit.kappa < hi);
        let obs = fit.observed_covariance.unwrap();
        assert!((obs[0][0].sqrt() / fit.se_kappa().unwrap() - 1.0).abs() < 0.2);
    }

    #[test]
    fn mle_is_a_local_maximum() {
        let xs = gpd_sample(-0.25, 1.0, 300, 5);
        let fit = gpd_mle(&xs, None).unwrap();
        let best = fit.objective_value.unwrap();
        assert_relative_eq!(best, gpd_loglik(fit.kappa, fit.sigma, &xs).unwrap(), max_relative = 1e-12);
        let mut rng = stream(99);
        for _ in 0..100 {
            let k = fit.kappa + 0.05 * (rng.random::<f64>() - 0.5);
            let s = fit.sigma * (1.0 + 0.05 * (rng.random::<f64>() - 0.5));
            assert!(gpd_loglik(k, s, &xs).unwrap() <= best);
        }
    }

    #[test]
    fn mle_light_tail_and_covariance_gating() {
        let xs = gpd_sample(0.7, 1.0, 400, 8);
        let fit = gpd_mle(&xs, None).unwrap();
        assert!(fit.kappa > 0.5 && fit.kappa <= 1.0, "{fit:?}");
        assert!(fit.covariance.is_none() && fit.ci_kappa.is_none());
        let xs = gpd_sample(0.2, 1.0, 400, 8);
        let fit = gpd_mle(&xs, None).unwrap();
        assert!(fit.converged && fit.covariance.is_some());
        assert!(fit.kappa * xs.iter().copied().fold(0.0, f64::max) < fit.sigma);
    }

    #[test]
    fn mle_degenerate_samples_do_not_panic() {
        let fit = gpd_mle(&[1.0, 1.0], None).unwrap();
        assert!(fit.kappa <= 1.0 && fit.sigma > 0.0);
        assert!(gpd_mle(&[1.0], None).is_err());
        assert!(gpd_mle(&[0.0, 0.0], None).is_err());
        assert!(gpd_mle(&[1.0, -1.0], None).is_err());
    }

    #[test]
    fn mle_covariance_is_psd_below_half() {
        for k in [-3.0, -0.5, 0.0, 0.3, 0.49] {
            let c = mle_covariance(k, 2.0, 10);
            assert!(c[0][0] > 0.0 && c[0][0] * c[1][1] - c[0][1] * c[1][0] > 0.0);
        }
    }

    #[test]
    fn pwm_population_inversion() {
        // Exponential(1): μ₀ = 1, μ₁ = 1/4.
        let (m0, m1) = (1.0, 0.25);
        let denom: f64 = m0 - 2.0 * m1;
        assert_eq!(m0 / denom - 2.0, 0.0);
        assert_eq!(2.0 * m0 * m1 / denom, 1.0);
    }

    #[test]
    fn population_moments_match_closed_form() {
        // μ_s = ∫ x (1 - F)^s f dx = σ/((s+1)(s+1+κ)).
        let (k, s) = (-0.3, 1.7);
        let d = DistSpec::gpd(k, s).unwrap();
        for sp in [0i32, 1] {
            let v = integrate(
                |x| x * (1.0 - d.cdf(x).unwrap()).powi(sp) * d.density(x).unwrap(),
                0.0,
                f64::INFINITY,
                crate::numeric::QuadratureOptions::tolerances(1e-12, 1e-10),
            )
            .unwrap()
            .value;
            let spf = sp as f64;
            assert_relative_eq!(v, s / ((spf + 1.0) * (spf + 1.0 + k)), max_relative = 1e-8);
        }
    }

    #[test]
    fn pwm_recovers_parameters() {
        let (k, s, n) = (-1.0 / 3.0, 4.0 / 3.0, 10_000);
        let xs = gpd_sample(k, s, n, 21);
        let fit = pwm_fit(&xs).unwrap();
        let c = pwm_covariance(k, s, n).unwrap();
        assert!((fit.kappa - k).abs() < 3.0 * c[0][0].sqrt(), "{fit:?}");
        assert!((fit.sigma - s).abs() < 3.0 * c[1][1].sqrt());
    }

    #[test]
    fn pwm_covariance_gating_sweep() {
        for i in 0..=60 {
            let k = -1.5 + 0.05 * i as f64;
            let c = pwm_covariance(k, 1.0, 100);
            assert_eq!(c.is_some(), k > -0.5 && k < 0.5, "k = {k}");
            if let Some(c) = c {
                assert!(c[0][0] > 0.0 && c[0][0] * c[1][1] - c[0][1] * c[0][1] >= 0.0, "k = {k}");
            }
        }
    }

    #[test]
    fn pwm_equal_points_is_defined() {
        let fit = pwm_fit(&[2.0, 2.0, 2.0]).unwrap();
        assert!(fit.sigma > 0.0);
        assert!(pwm_fit(&[1.0]).is_err());
    }

    #[test]
    fn level_controls_interval_width() {
        let xs = gpd_sample(-0.2, 1.0, 500, 4);
        let a = pwm_fit_at_level(&xs, 0.95).unwrap().ci_kappa.unwrap();
        let b = pwm_fit_at_level(&xs, 0.5).unwrap().ci_kappa.unwrap();
        assert!(b.1 - b.0 < a.1 - a.0);
        let half = 0.5 * (a.1 - a.0);
        let fit = pwm_fit(&xs).unwrap();
        assert_relative_eq!(half, 1.959964 * fit.se_kappa().unwrap(), max_relative = 1e-6);
        assert!(pwm_fit_at_level(&xs, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn pwm_matches_sample_moments(seed in 0u64..1000, k in -0.45f64..0.4) {
            let xs = gpd_sample(k, 1.0, 200, seed);
            let fit = pwm_fit(&xs).unwrap();
            let (m0, m1) = pwm_moments(&xs).unwrap();
            let mu = |s: f64| fit.sigma / ((s + 1.0) * (s + 1.0 + fit.kappa));
            prop_assert!((mu(0.0) - m0).abs() < 1e-10 * m0);
            prop_assert!((mu(1.0) - m1).abs() < 1e-10 * m0);
        }

        #[test]
        fn fits_are_scale_equivariant(seed in 0u64..1000, c in 0.01f64..100.0) {
            let xs = gpd_sample(-0.3, 1.0, 150, seed);
            let ys: Vec<f64> = xs.iter().map(|x| c * x).collect();
            let (p, q) = (pwm_fit(&xs).unwrap(), pwm_fit(&ys).unwrap());
            prop_assert!((p.kappa - q.kappa).abs() < 1e-12);
            prop_assert!((c * p.sigma - q.sigma).abs() < 1e-12 * q.sigma);
            let (m, w) = (gpd_mle(&xs, None).unwrap(), gpd_mle(&ys, None).unwrap());
            prop_assert!(m.converged && w.converged);
            prop_assert!((m.kappa - w.kappa).abs() < 1e-8, "{} vs {}", m.kappa, w.kappa);
            prop_assert!((c * m.sigma - w.sigma).abs() < 1e-8 * w.sigma);
        }
    }
}

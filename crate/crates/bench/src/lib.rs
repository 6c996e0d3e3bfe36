//! Shared fixtures for the benchmarks.

use paretocal::rng::stream;
use paretocal::DistSpec;

/// Seeded GPD sample of excesses.
pub fn gpd_sample(kappa: f64, sigma: f64, n: usize, seed: u64) -> Vec<f64> {
    DistSpec::gpd(kappa, sigma).and_then(|d| d.sample(n, &mut stream(seed))).expect("valid GPD")
}

/// Seeded inverted-Pareto sample.
pub fn inv_pareto_sample(alpha: f64, beta: f64, n: usize, seed: u64) -> Vec<f64> {
    DistSpec::inv_pareto(alpha, beta).and_then(|d| d.sample(n, &mut stream(seed))).expect("valid inverted Pareto")
}

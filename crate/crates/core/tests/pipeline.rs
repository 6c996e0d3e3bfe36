use paretocal::evt::{fit_tail_all, prices_to_returns, tail_exceedances, var_quantile, Method, TailFitOptions};
use paretocal::jeffreys_mcmc::ChainConfig;
use paretocal::rng::stream;
use paretocal::{DistSpec, ReturnKind};
use proptest::prelude::*;

/// Prices whose daily losses above 1% are exactly GPD(κ, σ) excesses.
fn synthetic_prices(kappa: f64, sigma: f64, days: usize) -> Vec<f64> {
    let mut rng = stream(17);
    let tail = DistSpec::gpd(kappa, sigma).unwrap().sample(days, &mut rng).unwrap();
    let body = DistSpec::uniform(0.02).unwrap().sample(days, &mut rng).unwrap();
    let mut p = 1000.0;
    let mut out = vec![p];
    for i in 0..days {
        let r = if i % 10 == 0 { -(0.01 + tail[i]) } else { body[i] - 0.01 };
        p *= f64::exp(r);
        out.push(p);
    }
    out
}

#[test]
fn prices_to_comparison_table() {
    let prices = synthetic_prices(-0.3, 0.005, 5000);
    let series = prices_to_returns(&prices, 1, ReturnKind::Log).unwrap();
    let tail = tail_exceedances(&series, 0.01).unwrap();
    assert_eq!(tail.n_tail, 500);
    let chain = ChainConfig { iterations: 30_000, burn_in: 2_000, seed: 4, ..ChainConfig::default() };
    let rows = fit_tail_all(&tail, &Method::ALL, &chain, &TailFitOptions::default()).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!((r.kappa.point + 0.3).abs() < 0.15, "{r:?}");
        assert!((r.sigma / 0.005 - 1.0).abs() < 0.25, "{r:?}");
        let (lo, hi) = (r.kappa.lower.unwrap(), r.kappa.upper.unwrap());
        assert!(lo < r.kappa.point && r.kappa.point < hi, "{r:?}");
        let g = r.gini.unwrap();
        assert!((g.point - 1.0 / (r.kappa.point + 2.0)).abs() < 1e-12);
        assert!(r.var.log_loss > tail.threshold);
        assert!(r.var.simple_loss < r.var.log_loss);
    }
}

#[test]
fn horizons_aggregate_log_returns() {
    let prices = synthetic_prices(-0.2, 0.004, 100);
    let daily = prices_to_returns(&prices, 1, ReturnKind::Log).unwrap();
    let weekly = prices_to_returns(&prices, 5, ReturnKind::Log).unwrap();
    assert_eq!(weekly.len(), 20);
    for (w, chunk) in weekly.returns.iter().zip(daily.returns.chunks(5)) {
        assert!((w - chunk.iter().sum::<f64>()).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn var_increases_with_scale(kappa in -0.8f64..0.8, s1 in 1e-3f64..0.1, bump in 1.0001f64..3.0, eps in 0.951f64..0.9999) {
        let lo = var_quantile(eps, 0.02, kappa, s1, 0.05).unwrap().log_loss;
        let hi = var_quantile(eps, 0.02, kappa, s1 * bump, 0.05).unwrap().log_loss;
        prop_assert!(hi > lo);
    }

    #[test]
    fn tail_fraction_matches_counts(u in 0.001f64..0.05) {
        let series = prices_to_returns(&synthetic_prices(-0.2, 0.004, 400), 1, ReturnKind::Log).unwrap();
        if let Ok(t) = tail_exceedances(&series, u) {
            prop_assert_eq!(t.n_tail, t.exceedances.len());
            prop_assert!((t.f_tilde - t.n_tail as f64 / 400.0).abs() < 1e-15);
            prop_assert!(t.excesses.iter().all(|&e| e > 0.0));
        }
    }
}

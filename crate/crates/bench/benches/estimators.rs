use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use paretocal::classical::{gpd_mle, pwm_fit};
use paretocal::intrinsic::{bri_scale, bri_shape_fit, suff_stats, BriMode};
use paretocal::jeffreys_mcmc::{run_chain, ChainConfig};
use paretocal::simstudy::{run_study, StudyConfig};
use paretocal_bench::{gpd_sample, inv_pareto_sample};
use std::hint::black_box;

fn bri(c: &mut Criterion) {
    let stats = suff_stats(&inv_pareto_sample(2.44, 19.71, 33, 1)).unwrap();
    let mut g = c.benchmark_group("bri");
    for mode in [BriMode::Numeric, BriMode::Approximation] {
        g.bench_with_input(BenchmarkId::new("shape_fit", format!("{mode:?}")), &mode, |b, &m| {
            b.iter(|| bri_shape_fit(black_box(&stats), 0.95, m).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("scale", format!("{mode:?}")), &mode, |b, &m| {
            b.iter(|| bri_scale(black_box(&stats), m).unwrap())
        });
    }
    g.finish();
}

fn classical(c: &mut Criterion) {
    let mut g = c.benchmark_group("classical");
    for n in [50, 500, 5000] {
        let x = gpd_sample(-0.3, 1.0, n, 2);
        g.bench_with_input(BenchmarkId::new("mle", n), &x, |b, x| b.iter(|| gpd_mle(black_box(x), None).unwrap()));
        g.bench_with_input(BenchmarkId::new("pwm", n), &x, |b, x| b.iter(|| pwm_fit(black_box(x)).unwrap()));
    }
    g.finish();
}

fn mcmc(c: &mut Criterion) {
    let x = gpd_sample(-0.4, 1.0, 500, 3);
    let cfg = ChainConfig { iterations: 20_000, burn_in: 1_000, ..ChainConfig::default() };
    let mut g = c.benchmark_group("mcmc");
    g.sample_size(10);
    g.bench_function("chain_20k_n500", |b| b.iter(|| run_chain(black_box(&x), &cfg).unwrap()));
    g.finish();
}

fn study(c: &mut Criterion) {
    let cfg = StudyConfig { replications: 500, ..StudyConfig::default() };
    let mut g = c.benchmark_group("simstudy");
    g.sample_size(10);
    g.bench_function("default_grid_500_reps", |b| b.iter(|| run_study(black_box(&cfg)).unwrap()));
    g.finish();
}

criterion_group!(benches, bri, classical, mcmc, study);
criterion_main!(benches);

use crate::input::read_values;
use crate::output::{render, write_out, Cell, Table};
use crate::{
    ChainArgs, CliError, Command, ErrorScaleArg, FitArgs, InputKind, Kind, MeanExcessArgs, Model, OutputArgs,
    PotArgs, ReturnsArgs, SimulateArgs,
};
use paretocal::classical::{gpd_mle_with, pwm_fit_at_level, MleOptions};
use paretocal::evt::{empirical_mean_excess, fit_tail_all, prices_to_returns, tail_exceedances, Method, TailFitOptions};
use paretocal::intrinsic::{bri_scale, bri_shape_fit, ip_mle, suff_stats, BriMode};
use paretocal::jeffreys_mcmc::{run_chain, summarize, ChainConfig};
use paretocal::numeric::sorted_quantile;
use paretocal::simstudy::{run_study, ErrorScale, StudyConfig};
use paretocal::{ReturnKind, ReturnSeries};
use serde::Serialize;
use serde_json::{json, Value};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Returns(a) => returns(&a),
        Command::MeanExcess(a) => mean_excess(&a),
        Command::Fit(a) => fit(&a),
        Command::Pot(a) => pot(&a),
        Command::Simulate(a) => simulate(&a),
    }
}

fn metadata<T: Serialize>(subcommand: &str, seed: Option<u64>, options: &T, extra: Value) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "seed": seed,
        "options": options,
        "context": extra,
    })
}

fn emit(table: &Table, meta: &Value, out: &OutputArgs) -> Result<()> {
    let bytes = render(table, meta, out.format).map_err(CliError::Data)?;
    write_out(&bytes, out.output.as_deref()).map_err(|e| {
        let target = out.output.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
        CliError::Data(format!("cannot write {target}: {e}"))
    })
}

fn return_kind(k: Kind) -> ReturnKind {
    match k {
        Kind::Log => ReturnKind::Log,
        Kind::Simple => ReturnKind::Simple,
    }
}

fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m: Method = token.parse().map_err(|e: paretocal::Error| CliError::Usage(e.to_string()))?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(CliError::Usage("empty method set".into()));
    }
    Ok(methods)
}

/// Parses a comma-separated list of numbers; `a/b` fractions are allowed.
fn parse_numbers(list: &str, what: &str) -> Result<Vec<f64>> {
    let parse = |t: &str| -> Option<f64> {
        match t.split_once('/') {
            Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
            None => t.parse().ok(),
        }
    };
    let values: Vec<f64> = list
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse(t).ok_or_else(|| CliError::Usage(format!("{what}: '{t}' is not a number"))))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("{what}: empty list")));
    }
    Ok(values)
}

fn chain_config(chain: &ChainArgs, methods: &[Method], seed: u64) -> Result<ChainConfig> {
    let given = chain.iterations.is_some() || chain.burn_in.is_some() || chain.thin.is_some();
    if given && !methods.contains(&Method::Jeffreys) {
        return Err(CliError::Usage("chain settings apply only with the jeffreys method".into()));
    }
    let d = ChainConfig::default();
    let cfg = ChainConfig {
        iterations: chain.iterations.unwrap_or(d.iterations),
        burn_in: chain.burn_in.unwrap_or(d.burn_in),
        thin: chain.thin.unwrap_or(d.thin),
        seed,
        ..d
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn returns(a: &ReturnsArgs) -> Result<()> {
    let prices = read_values(&a.input).map_err(CliError::Data)?;
    let series = prices_to_returns(&prices, a.horizon, return_kind(a.kind))?;
    let mut t = Table::new(&["index", "return"]);
    for (i, r) in series.returns.iter().enumerate() {
        t.push(vec![i.into(), (*r).into()]);
    }
    emit(&t, &metadata("returns", None, a, json!({ "prices": prices.len(), "returns": series.len() })), &a.out)
}

fn mean_excess(a: &MeanExcessArgs) -> Result<()> {
    let raw = read_values(&a.input).map_err(CliError::Data)?;
    let sample: Vec<f64> = if a.prices {
        prices_to_returns(&raw, a.horizon, return_kind(a.kind))?.returns.iter().map(|r| -r).collect()
    } else {
        raw
    };
    let grid = match &a.thresholds {
        Some(list) => parse_numbers(list, "thresholds")?,
        None => {
            if a.points < 2 {
                return Err(CliError::Usage("--points must be at least 2".into()));
            }
            let mut sorted = sample.clone();
            sorted.sort_by(f64::total_cmp);
            let lo = a.from.unwrap_or(sorted[0]);
            let hi = a.to.unwrap_or_else(|| sorted_quantile(&sorted, 0.98));
            if !(lo < hi) {
                return Err(CliError::Usage(format!("empty threshold range [{lo}, {hi}]")));
            }
            (0..a.points).map(|i| lo + (hi - lo) * i as f64 / (a.points - 1) as f64).collect()
        }
    };
    let series = empirical_mean_excess(&sample, &grid)?;
    let mut t = Table::new(&["u", "me", "lo", "hi", "count"]);
    for p in &series {
        t.push(vec![p.u.into(), p.mean_excess.into(), p.lower.into(), p.upper.into(), p.count.into()]);
    }
    emit(&t, &metadata("mean-excess", None, a, json!({ "n": sample.len() })), &a.out)
}

const FIT_COLUMNS: [&str; 8] = ["method", "kappa", "kappa_lo", "kappa_hi", "sigma", "sigma_lo", "sigma_hi", "converged"];

fn fit(a: &FitArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let allowed: &[Method] = match a.model {
        Model::Gpd => &[Method::Mle, Method::Pwm, Method::Jeffreys],
        Model::InvPareto => &[Method::Bri, Method::Mle],
    };
    if let Some(m) = methods.iter().find(|m| !allowed.contains(m)) {
        let model = serde_json::to_value(a.model).unwrap_or_default();
        return Err(CliError::Usage(format!("method {m} is not available for the {} model", model.as_str().unwrap_or("?"))));
    }
    let chain = chain_config(&a.chain, &methods, a.seed)?;
    if !(a.probability > 0.0 && a.probability < 1.0) {
        return Err(CliError::Usage(format!("--probability must lie in (0, 1), got {}", a.probability)));
    }
    let sample = read_values(&a.input).map_err(CliError::Data)?;
    let mut t = Table::new(&FIT_COLUMNS);
    for &m in &methods {
        let row: Vec<Cell> = match (a.model, m) {
            (Model::Gpd, Method::Mle | Method::Pwm) => {
                let f = if m == Method::Mle {
                    gpd_mle_with(&sample, &MleOptions { level: a.probability, ..MleOptions::default() })?
                } else {
                    pwm_fit_at_level(&sample, a.probability)?
                };
                vec![
                    m.to_string().into(),
                    f.kappa.into(),
                    f.ci_kappa.map(|c| c.0).into(),
                    f.ci_kappa.map(|c| c.1).into(),
                    f.sigma.into(),
                    f.ci_sigma.map(|c| c.0).into(),
                    f.ci_sigma.map(|c| c.1).into(),
                    f.converged.into(),
                ]
            }
            (Model::Gpd, _) => {
                let s = summarize(&run_chain(&sample, &chain)?, a.probability, None)?;
                vec![
                    m.to_string().into(),
                    s.kappa.median.into(),
                    s.kappa.lower.into(),
                    s.kappa.upper.into(),
                    s.sigma.median.into(),
                    s.sigma.lower.into(),
                    s.sigma.upper.into(),
                    true.into(),
                ]
            }
            (Model::InvPareto, Method::Bri) => {
                let stats = suff_stats(&sample)?;
                let shape = bri_shape_fit(&stats, a.probability, BriMode::Numeric)?;
                let scale = bri_scale(&stats, BriMode::Numeric)?;
                vec![
                    m.to_string().into(),
                    shape.point.into(),
                    shape.lower.into(),
                    shape.upper.into(),
                    scale.into(),
                    Cell::Missing,
                    Cell::Missing,
                    true.into(),
                ]
            }
            (Model::InvPareto, _) => {
                let mle = ip_mle(&suff_stats(&sample)?)?;
                vec![
                    m.to_string().into(),
                    mle.kappa_hat.into(),
                    Cell::Missing,
                    Cell::Missing,
                    mle.sigma_hat.into(),
                    Cell::Missing,
                    Cell::Missing,
                    true.into(),
                ]
            }
        };
        t.push(row);
    }
    let resolved = json!({ "methods": methods, "chain": methods.contains(&Method::Jeffreys).then_some(chain) });
    emit(&t, &metadata("fit", Some(a.seed), a, json!({ "n": sample.len(), "resolved": resolved })), &a.out)
}

fn pot(a: &PotArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let chain = chain_config(&a.chain, &methods, a.seed)?;
    let raw = read_values(&a.input).map_err(CliError::Data)?;
    let series = match a.input_kind {
        InputKind::Prices => prices_to_returns(&raw, a.horizon, return_kind(a.kind))?,
        InputKind::Returns => ReturnSeries::new(raw, return_kind(a.kind), a.horizon)?,
    };
    // Thresholds and VaR are on the log-loss scale.
    let series = series.to_kind(ReturnKind::Log);
    let tail = tail_exceedances(&series, a.threshold)?;
    let opts = TailFitOptions { probability: a.probability, epsilon: a.epsilon, bri_mode: BriMode::Numeric };
    let rows = fit_tail_all(&tail, &methods, &chain, &opts)?;
    let mut t = Table::new(&[
        "method", "kappa", "kappa_lo", "kappa_hi", "sigma", "gini", "gini_lo", "gini_hi", "var_log", "var_simple",
    ]);
    for r in &rows {
        let g = r.gini.as_ref();
        t.push(vec![
            r.method.to_string().into(),
            r.kappa.point.into(),
            r.kappa.lower.into(),
            r.kappa.upper.into(),
            r.sigma.into(),
            g.map(|g| g.point).into(),
            g.and_then(|g| g.lower).into(),
            g.and_then(|g| g.upper).into(),
            r.var.log_loss.into(),
            r.var.simple_loss.into(),
        ]);
    }
    let context = json!({
        "threshold": tail.threshold,
        "n_tail": tail.n_tail,
        "n_total": tail.n_total,
        "f_tilde": tail.f_tilde,
        "resolved": { "methods": methods, "chain": methods.contains(&Method::Jeffreys).then_some(chain) },
    });
    emit(&t, &metadata("pot", Some(a.seed), a, context), &a.out)
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let kappas = parse_numbers(&a.kappa, "kappa")?;
    let sizes = parse_numbers(&a.n, "n")?
        .into_iter()
        .map(|v| {
            if v.fract() == 0.0 && v >= 0.0 {
                Ok(v as usize)
            } else {
                Err(CliError::Usage(format!("sample size {v} is not a whole number")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let config = StudyConfig {
        kappas,
        sigma: a.sigma,
        sizes,
        replications: a.reps,
        methods,
        seed: a.seed,
        error_scale: match a.error_scale {
            ErrorScaleArg::GpdShape => ErrorScale::GpdShape,
            ErrorScaleArg::ParetoShape => ErrorScale::ParetoShape,
        },
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let table = run_study(&config)?;
    let mut t = Table::new(&["kappa", "n", "method", "bias", "mse", "failures", "R"]);
    for r in &table.rows {
        t.push(vec![
            r.kappa.into(),
            r.n.into(),
            r.method.to_string().into(),
            r.bias.into(),
            r.mse.into(),
            r.failures.into(),
            config.replications.into(),
        ]);
    }
    emit(&t, &metadata("simulate", Some(a.seed), a, json!({ "resolved": config })), &a.out)
}

use paretocal::evt::Method;
use paretocal::simstudy::{run_study, StudyConfig};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn paretocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paretocal")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_str().unwrap().to_string()
}

/// Random-walk prices with occasional large drops.
fn prices(n: usize) -> String {
    use paretocal::rng::stream;
    use paretocal::DistSpec;
    let mut rng = stream(11);
    let body = DistSpec::uniform(1.0).unwrap().sample(n, &mut rng).unwrap();
    let jumps = DistSpec::gpd(-0.3, 0.01).unwrap().sample(n, &mut rng).unwrap();
    let mut p = 100.0;
    let mut s = String::from("date,price\n");
    for i in 0..n {
        let r = if i % 9 == 0 { -0.015 - jumps[i] } else { 0.01 * (body[i] - 0.45) };
        p *= f64::exp(r);
        s.push_str(&format!("d{i},{p}\n"));
    }
    s
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn metadata(text: &str) -> Value {
    let line = text.lines().next().unwrap();
    serde_json::from_str(line.strip_prefix("# metadata ").unwrap()).unwrap()
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let args = ["simulate", "--kappa", "3", "--n", "50", "--reps", "100", "--seed", "7"];
    let (a, b) = (paretocal(&args), paretocal(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (header, rows) = csv_rows(&stdout(&a));
    assert_eq!(header, ["kappa", "n", "method", "bias", "mse", "failures", "R"]);
    assert_eq!(rows.len(), 3);
}

#[test]
fn study_csv_round_trips_at_six_digits() {
    let out = paretocal(&["simulate", "--kappa", "3,7", "--n", "15", "--reps", "200", "--seed", "5"]);
    let (_, rows) = csv_rows(&stdout(&out));
    let cfg = StudyConfig { kappas: vec![3.0, 7.0], sizes: vec![15], replications: 200, seed: 5, ..StudyConfig::default() };
    let table = run_study(&cfg).unwrap();
    assert_eq!(rows.len(), table.rows.len());
    for (csv_row, r) in rows.iter().zip(&table.rows) {
        let bias: f64 = csv_row[3].parse().unwrap();
        let mse: f64 = csv_row[4].parse().unwrap();
        assert!((bias - r.bias).abs() <= 5e-6 * r.bias.abs());
        assert!((mse - r.mse).abs() <= 5e-6 * r.mse);
        assert_eq!(csv_row[2], r.method.to_string());
    }
}

#[test]
fn metadata_alone_reproduces_the_run() {
    let first = stdout(&paretocal(&["simulate", "--kappa", "1/3", "--n", "20", "--reps", "50", "--seed", "3"]));
    let meta = metadata(&first);
    assert_eq!(meta["subcommand"], "simulate");
    assert_eq!(meta["seed"], 3);
    assert!(meta["version"].is_string());
    let o = &meta["options"];
    let again = paretocal(&[
        "simulate",
        "--kappa",
        o["kappa"].as_str().unwrap(),
        "--n",
        o["n"].as_str().unwrap(),
        "--reps",
        &o["reps"].to_string(),
        "--methods",
        o["methods"].as_str().unwrap(),
        "--sigma",
        &o["sigma"].to_string(),
        "--error-scale",
        o["error_scale"].as_str().unwrap(),
        "--seed",
        &o["seed"].to_string(),
    ]);
    assert_eq!(stdout(&again), first);
}

#[test]
fn one_point_pwm_fit_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "one.csv", "0.5\n");
    let out = paretocal(&["fit", "--input", &input, "--method", "pwm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 2"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "x.csv", "0.5\n1.5\n0.2\n");
    for args in [
        vec!["fit", "--input", &input, "--methods", ""],
        vec!["fit", "--input", &input, "--methods", "mle", "--iterations", "100"],
        vec!["fit", "--input", &input, "--methods", "bri"],
        vec!["fit", "--input", &input, "--methods", "nope"],
        vec!["simulate", "--methods", "jeffreys"],
        vec!["simulate", "--n", "2.5"],
        vec!["pot", "--input", &input],
        vec!["bogus"],
    ] {
        let out = paretocal(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn mean_excess_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let sample: String = (1..=200).map(|i| format!("{}\n", (i as f64 / 201.0).ln().abs())).collect();
    let input = write(dir.path(), "s.csv", &sample);
    let out = paretocal(&["mean-excess", "--input", &input, "--points", "5", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        for key in ["u", "me", "lo", "hi"] {
            assert!(r[key].is_number(), "{key} missing in {r}");
        }
        assert!(r["lo"].as_f64() <= r["me"].as_f64() && r["me"].as_f64() <= r["hi"].as_f64());
    }
    assert_eq!(v["metadata"]["subcommand"], "mean-excess");
}

#[test]
fn writes_only_the_declared_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "prices.csv", &prices(50));
    let target = dir.path().join("out.csv");
    let out = paretocal(&["returns", "--input", &input, "--horizon", "5", "--output", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let mut names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names, ["out.csv", "prices.csv"]);
    let (header, rows) = csv_rows(&std::fs::read_to_string(&target).unwrap());
    assert_eq!(header, ["index", "return"]);
    assert_eq!(rows.len(), 9);
}

#[test]
fn pot_table_has_one_row_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "prices.csv", &prices(1500));
    let out = paretocal(&[
        "pot", "--input", &input, "--threshold", "0.015", "--methods", "bri,mle,pwm,jeffreys", "--iterations", "6000",
        "--burn-in", "500",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header[0], "method");
    assert!(header.contains(&"var_log".to_string()) && header.contains(&"gini".to_string()));
    let methods: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    let want: Vec<String> = [Method::Bri, Method::Mle, Method::Pwm, Method::Jeffreys].iter().map(|m| m.to_string()).collect();
    assert_eq!(methods, want);
    let meta = metadata(&text);
    assert!(meta["context"]["n_tail"].as_u64().unwrap() > 100);
    for r in &rows {
        let kappa: f64 = r[1].parse().unwrap();
        assert!(kappa < 0.0, "{r:?}");
    }
}

#[test]
fn empty_tail_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "prices.csv", &prices(100));
    let out = paretocal(&["pot", "--input", &input, "--threshold", "5", "--methods", "mle"]);
    assert_eq!(out.status.code(), Some(1));
}

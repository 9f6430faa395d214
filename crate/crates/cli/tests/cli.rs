use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn evscale(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evscale")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn ok(o: Output) -> Output {
    assert_eq!(code(&o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn column(rows: &[Vec<String>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

/// 300 GEV draws well inside the positive axis.
fn gev_data(dir: &Path) {
    ok(evscale(
        dir,
        &["simulate", "--design", "gev", "--location", "20", "--scale", "2", "--shape", "-0.1", "--n", "300", "--out", "sim"],
    ));
}

#[test]
fn simulate_is_seed_deterministic() {
    let t = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        ok(evscale(t.path(), &["simulate", "--total-intensity", "5000", "--largest", "100", "--seed", "4", "--out", out]));
    }
    for f in ["exceedances.csv", "block_maxima.csv", "largest.csv", "low_threshold.csv"] {
        assert_eq!(fs::read(t.path().join("a").join(f)).unwrap(), fs::read(t.path().join("b").join(f)).unwrap());
    }
    assert_eq!(read_csv(&t.path().join("a/largest.csv")).len(), 100);
    // time blocks without a point have no maximum and are dropped
    let maxima = read_csv(&t.path().join("a/block_maxima.csv")).len();
    assert!((990..=1000).contains(&maxima), "{maxima} block maxima");
    ok(evscale(t.path(), &["simulate", "--total-intensity", "5000", "--seed", "5", "--out", "c"]));
    assert_ne!(fs::read(t.path().join("a/exceedances.csv")).unwrap(), fs::read(t.path().join("c/exceedances.csv")).unwrap());
}

#[test]
fn invalid_parameters_are_usage_errors() {
    let t = tempfile::tempdir().unwrap();
    let o = evscale(t.path(), &["simulate", "--scale", "-1", "--out", "x"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&evscale(t.path(), &["simulate", "--design", "banana", "--out", "x"])), 2);
    assert_eq!(code(&evscale(t.path(), &["simulate"])), 2, "missing --out");
    assert_eq!(code(&evscale(t.path(), &["simulate", "--seed", "18446744073709551615", "--out", "x"])), 2);
}

#[test]
fn fit4_requires_a_slope() {
    let t = tempfile::tempdir().unwrap();
    gev_data(t.path());
    let o = evscale(t.path(), &["fit4", "--input", "sim/series.csv", "--out", "f4"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--c"));
}

#[test]
fn numerical_failure_exit_code() {
    let t = tempfile::tempdir().unwrap();
    fs::create_dir(t.path().join("in")).unwrap();
    fs::write(t.path().join("in/flat.csv"), format!("value\n{}", "3.5\n".repeat(40))).unwrap();
    assert_eq!(code(&evscale(t.path(), &["fit3", "--input", "in/flat.csv", "--out", "f"])), 3);
}

#[test]
fn output_directory_must_differ_from_inputs() {
    let t = tempfile::tempdir().unwrap();
    gev_data(t.path());
    assert_eq!(code(&evscale(t.path(), &["fit3", "--input", "sim/series.csv", "--out", "sim"])), 2);
}

#[test]
fn flags_override_file_and_unknown_keys_fail() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("run.toml"), "seed = 5\n[asymptotics]\nn = [100]\n").unwrap();
    ok(evscale(t.path(), &["asymptotics", "--config", "run.toml", "--seed", "6", "--out", "a"]));
    let manifest = fs::read_to_string(t.path().join("a/manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 6") && manifest.contains("n = [100]"), "{manifest}");
    fs::write(t.path().join("bad.toml"), "[sampler]\niteration = 5\n").unwrap();
    assert_eq!(code(&evscale(t.path(), &["asymptotics", "--config", "bad.toml", "--out", "b"])), 2);
}

#[test]
fn rerun_from_manifest_is_bit_identical() {
    let t = tempfile::tempdir().unwrap();
    gev_data(t.path());
    let args = ["fit4", "--input", "sim/series.csv", "--c", "0.1", "--iterations", "400", "--burn-in", "100", "--out", "f4"];
    ok(evscale(t.path(), &args));
    let first = fs::read(t.path().join("f4/draws.csv")).unwrap();
    fs::copy(t.path().join("f4/manifest.toml"), t.path().join("m.toml")).unwrap();
    fs::remove_dir_all(t.path().join("f4")).unwrap();
    ok(evscale(t.path(), &["fit4", "--config", "m.toml"]));
    assert_eq!(first, fs::read(t.path().join("f4/draws.csv")).unwrap());
}

#[test]
fn pinned_lambda_matches_three_parameter_fit() {
    let t = tempfile::tempdir().unwrap();
    gev_data(t.path());
    ok(evscale(t.path(), &["fit3", "--input", "sim/series.csv", "--out", "f3"]));
    let fit: toml::Table = fs::read_to_string(t.path().join("f3/fit3.toml")).unwrap().parse().unwrap();
    let get = |k: &str| fit[k].as_float().unwrap();
    ok(evscale(
        t.path(),
        &[
            "fit4", "--input", "sim/series.csv", "--c", "0", "--prior-lambda-min", "1", "--prior-lambda-max", "1",
            "--iterations", "4000", "--out", "f4",
        ],
    ));
    let rows = read_csv(&t.path().join("f4/draws.csv"));
    assert!(column(&rows, 4).iter().all(|&l| l == 1.0));
    for (k, mle, se) in [(1, get("location"), get("se_location")), (3, get("shape"), get("se_shape"))] {
        let v = column(&rows, k);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        assert!((mean - mle).abs() < 0.5 * se, "column {k}: posterior mean {mean}, MLE {mle}, SE {se}");
    }
}

/// Writes a posterior directory holding `n` copies of one state.
fn degenerate_posterior(dir: &Path, n: usize) {
    fs::create_dir_all(dir).unwrap();
    fs::write(
        dir.join("posterior.toml"),
        "kind = \"gev\"\nc = 0.0\ndraws = 5\nburn_in = 0\nseed = 1\nlambda_range = [1.0, 1.0]\nacceptance = [0.5, 0.5, 0.5, nan]\n",
    )
    .unwrap();
    let mut text = String::from("iteration,beta_x,log_alpha_x,gamma_x,lambda,beta_y,alpha_y,gamma_y\n");
    for i in 0..n {
        text.push_str(&format!("{i},20,0.5,-0.1,1,19,{},-0.1\n", 0.5f64.exp()));
    }
    fs::write(dir.join("draws.csv"), text).unwrap();
}

#[test]
fn degenerate_posterior_returns() {
    let t = tempfile::tempdir().unwrap();
    degenerate_posterior(&t.path().join("post"), 5);
    ok(evscale(t.path(), &["returns", "--draws-dir", "post", "--svg", "--out", "r"]));
    let rows = read_csv(&t.path().join("r/return_levels.csv"));
    let (median, pred) = (column(&rows, 1), column(&rows, 4));
    for (m, p) in median.iter().zip(&pred) {
        assert!((m - p).abs() < 1e-6 * m, "{m} vs {p}");
    }
    assert!(median.windows(2).all(|w| w[0] <= w[1]));
    let svg = fs::read_to_string(t.path().join("r/return_levels.svg")).unwrap();
    assert_well_formed(&svg);
}

#[test]
fn periods_in_user_units() {
    let t = tempfile::tempdir().unwrap();
    degenerate_posterior(&t.path().join("post"), 3);
    ok(evscale(t.path(), &["returns", "--draws-dir", "post", "--periods", "50", "--blocks-per-unit", "2", "--out", "a"]));
    ok(evscale(t.path(), &["returns", "--draws-dir", "post", "--periods", "100", "--out", "b"]));
    let a = read_csv(&t.path().join("a/return_levels.csv"));
    let b = read_csv(&t.path().join("b/return_levels.csv"));
    assert_eq!(a[0][0], "50");
    assert_eq!(a[0][1], b[0][1]);
}

#[test]
fn qq_from_a_fit() {
    let t = tempfile::tempdir().unwrap();
    gev_data(t.path());
    ok(evscale(
        t.path(),
        &["fit4", "--input", "sim/series.csv", "--c", "0.1", "--iterations", "500", "--burn-in", "200", "--out", "f4"],
    ));
    ok(evscale(t.path(), &["qq", "--draws-dir", "f4", "--input", "sim/series.csv", "--svg", "--out", "q"]));
    let rows = read_csv(&t.path().join("q/qq.csv"));
    assert_eq!(rows.len(), 300);
    let emp = column(&rows, 0);
    assert!(emp.windows(2).all(|w| w[0] <= w[1]));
    for r in &rows {
        let [lo, med, hi] = [2, 1, 3].map(|k| r[k].parse::<f64>().unwrap());
        assert!(lo <= med && med <= hi);
    }
    assert_well_formed(&fs::read_to_string(t.path().join("q/qq.svg")).unwrap());
}

#[test]
fn asymptotics_table() {
    let t = tempfile::tempdir().unwrap();
    ok(evscale(t.path(), &["asymptotics", "--n", "100,1000,10000", "--out", "tn"]));
    let rows = read_csv(&t.path().join("tn/asymptotics.csv"));
    let star: f64 = rows[0][7].parse().unwrap();
    assert!((star - 1.86).abs() < 0.15, "λ*_100 = {star}");
    for r in &rows {
        assert!(r[8].parse::<f64>().unwrap() <= r[9].parse::<f64>().unwrap());
    }
    ok(evscale(t.path(), &["asymptotics", "--family", "exponential", "--params", "1.5", "--out", "ex"]));
    for r in read_csv(&t.path().join("ex/asymptotics.csv")) {
        assert!(r[4].parse::<f64>().unwrap().abs() < 1e-9);
    }
    ok(evscale(t.path(), &["asymptotics", "--family", "weibull", "--params", "2,1", "--n", "100,10000", "--out", "wb"]));
    for r in read_csv(&t.path().join("wb/asymptotics.csv")) {
        assert!(r[8].parse::<f64>().unwrap() <= r[9].parse::<f64>().unwrap(), "{r:?}");
    }
    assert_eq!(code(&evscale(t.path(), &["asymptotics", "--family", "weibull", "--out", "bad"])), 2);
}

#[test]
fn profile_then_fit4_pipeline() {
    let t = tempfile::tempdir().unwrap();
    gev_data(t.path());
    ok(evscale(
        t.path(),
        &["profile", "--input", "sim/series.csv", "--n-gamma", "9", "--n-lambda", "9", "--out", "p"],
    ));
    let grid = read_csv(&t.path().join("p/profile_grid.csv"));
    assert_eq!(grid.len(), 81);
    ok(evscale(
        t.path(),
        &["fit4", "--input", "sim/series.csv", "--profile-dir", "p", "--iterations", "300", "--burn-in", "100", "--out", "f"],
    ));
    let slope: toml::Table = fs::read_to_string(t.path().join("p/slope.toml")).unwrap().parse().unwrap();
    let post: toml::Table = fs::read_to_string(t.path().join("f/posterior.toml")).unwrap().parse().unwrap();
    assert_eq!(slope["c"].as_float(), post["c"].as_float());
    assert_eq!(read_csv(&t.path().join("f/diagnostics.csv")).len(), 7);
}

#[test]
fn exceedance_input_with_sidecar() {
    let t = tempfile::tempdir().unwrap();
    ok(evscale(t.path(), &["simulate", "--total-intensity", "3000", "--largest", "200", "--out", "sim"]));
    ok(evscale(t.path(), &["fit3", "--input", "sim/largest.csv", "--kind", "pp", "--out", "f"]));
    let fit: toml::Table = fs::read_to_string(t.path().join("f/fit3.toml")).unwrap().parse().unwrap();
    assert_eq!(fit["n_points"].as_integer(), Some(200));
    assert_eq!(fit["n_blocks"].as_float(), Some(200.0));
    let reference = fit["reference"].as_table().unwrap();
    assert_eq!(reference["n_blocks"].as_float(), Some(1000.0));
    // the reference location sits near the simulated 15
    assert!((reference["location"].as_float().unwrap() - 15.0).abs() < 1.0);
}

/// Every opened element is closed in order.
fn assert_well_formed(svg: &str) {
    let body = svg.trim_start();
    let body = body.strip_prefix("<?xml").map_or(body, |r| r[r.find("?>").unwrap() + 2..].trim_start());
    assert!(body.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let mut stack = Vec::new();
    let mut rest = svg;
    while let Some(i) = rest.find('<') {
        let j = rest[i..].find('>').expect("unterminated tag") + i;
        let tag = &rest[i + 1..j];
        if let Some(name) = tag.strip_prefix('/') {
            assert_eq!(stack.pop().as_deref(), Some(name.trim()), "mismatched </{name}>");
        } else if !tag.ends_with('/') && !tag.starts_with('?') && !tag.starts_with('!') {
            stack.push(tag.split_whitespace().next().unwrap().to_string());
        }
        rest = &rest[j + 1..];
    }
    assert!(stack.is_empty(), "unclosed {stack:?}");
}

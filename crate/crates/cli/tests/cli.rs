use std::path::Path;
use std::process::{Command, Output};

fn mdsplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdsplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = mdsplan(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Fails with exactly one line on stderr; returns it.
fn fails(args: &[&str]) -> String {
    let out = mdsplan(args);
    assert!(!out.status.success(), "{args:?} succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: "), "{err}");
    err
}

fn gen(dir: &Path, preset: &str, seed: &str) -> String {
    let path = dir.join(format!("{preset}.json"));
    let p = path.to_str().unwrap().to_owned();
    ok(&[
        "gen",
        "--preset",
        preset,
        "--gamma-multiplier",
        "2",
        "--seed",
        seed,
        "--out",
        &p,
    ]);
    p
}

#[test]
fn gen_writes_a_loadable_seeded_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "large", "3");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["meta"]["seed"], 3);
    assert_eq!(v["masters"].as_array().unwrap().len(), 4);
    assert_eq!(v["workers"][0].as_array().unwrap().len(), 50);
    // Same seed, same bytes.
    let again = dir.path().join("again.json");
    ok(&[
        "gen",
        "--preset",
        "large",
        "--gamma-multiplier",
        "2",
        "--seed",
        "3",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&again).unwrap()
    );
}

#[test]
fn plan_respects_grant_limits() {
    let dir = tempfile::tempdir().unwrap();
    let scen = gen(dir.path(), "small", "7");
    let out = dir.path().join("plan.json");
    ok(&[
        "plan",
        "--scenario",
        &scen,
        "--allocation",
        "markov",
        "--out",
        out.to_str().unwrap(),
    ]);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let k = v["k"].as_array().unwrap();
    for w in 0..5 {
        let total: f64 = k.iter().map(|row| row[w].as_f64().unwrap()).sum();
        assert!(total <= 1.0 + 1e-9);
    }
    let markov_max = v["predicted_delay"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .fold(0.0, f64::max);

    let stdout = ok(&["plan", "--scenario", &scen, "--allocation", "sca"]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let sca_max = v["predicted_delay"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!(sca_max <= markov_max);
}

#[test]
fn uniform_uncoded_plan_splits_evenly() {
    let dir = tempfile::tempdir().unwrap();
    let scen = gen(dir.path(), "large", "1");
    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "plan",
        "--scenario",
        &scen,
        "--policy",
        "uniform-uncoded",
    ]))
    .unwrap();
    assert_eq!(v["allocation"], "uniform");
    let row = v["loads"][3].as_array().unwrap();
    let positive: Vec<f64> = row
        .iter()
        .map(|x| x.as_f64().unwrap())
        .filter(|&l| l > 0.0)
        .collect();
    assert_eq!(positive, vec![10_000.0 / 12.0; 12]);
}

#[test]
fn simulate_and_compare_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let scen = gen(dir.path(), "small", "2");
    let sim_dir = dir.path().join("sim");
    let table = ok(&[
        "simulate",
        "--scenario",
        &scen,
        "--trials",
        "500",
        "--integer-loads",
        "--out",
        sim_dir.to_str().unwrap(),
    ]);
    assert!(table.starts_with("policy\tpredicted_max\tmean_max\tquantile_0.95"));
    assert!(sim_dir.join("cdf.csv").exists());

    let cmp_dir = dir.path().join("cmp");
    let args = [
        "compare",
        "--scenario",
        &scen,
        "--trials",
        "500",
        "--policies",
        "dedicated-iter,uniform-coded,uniform-uncoded",
        "--out",
        cmp_dir.to_str().unwrap(),
    ];
    let first = ok(&args);
    assert_eq!(first.lines().count(), 4);
    let mut files: Vec<String> = std::fs::read_dir(&cmp_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(
        files,
        [
            "cdf_0_dedicated-iter_sca.csv",
            "cdf_1_uniform-coded_exact-comp.csv",
            "cdf_2_uniform-uncoded_uniform.csv",
            "summary.tsv"
        ]
    );
    let threaded: Vec<&str> = args.iter().copied().chain(["--threads", "5"]).collect();
    assert_eq!(ok(&threaded), first);
}

#[test]
fn sweep_reports_every_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let scen = gen(dir.path(), "small", "4");
    let out = ok(&[
        "sweep",
        "--scenario",
        &scen,
        "--trials",
        "200",
        "--values",
        "0.5,1,2,4",
    ]);
    assert_eq!(out.lines().count(), 5);
    assert!(out.starts_with("gamma_ratio\tmean_max"));
}

#[test]
fn fit_prints_link_fragment() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("s.csv");
    let data: Vec<String> = (1..=200)
        .map(|i| format!("{}", 1.0 + (i as f64 / 201.0).ln().abs()))
        .collect();
    std::fs::write(&samples, data.join("\n")).unwrap();
    let out_path = dir.path().join("fit.json");
    let out = ok(&[
        "fit",
        "--samples",
        samples.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["u"].as_f64().unwrap() > 0.0);
    assert!(v["a"].as_f64().unwrap() >= 0.0);
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), out.trim_end());
}

#[test]
fn errors_are_single_line() {
    let dir = tempfile::tempdir().unwrap();
    let scen = gen(dir.path(), "small", "1");
    let err = fails(&[
        "compare",
        "--scenario",
        &scen,
        "--policies",
        "dedicated-iter",
    ]);
    assert!(err.contains("at least 2 policies"), "{err}");
    let err = fails(&["sweep", "--scenario", &scen, "--values", ""]);
    assert!(err.contains("at least one value"), "{err}");
    fails(&["sweep", "--scenario", &scen, "--values", "1,x"]);
    fails(&["plan", "--scenario", "/nonexistent.json"]);
    fails(&["plan", "--scenario", &scen, "--policy", "bogus"]);
    fails(&["plan", "--scenario", &scen, "--allocation", "uniform"]);
    fails(&["simulate", "--scenario", &scen, "--rho", "1.5"]);
    fails(&["plan", "--bogus"]);
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1.0\n-2\n").unwrap();
    let err = fails(&["fit", "--samples", bad.to_str().unwrap()]);
    assert!(err.contains("line 2"), "{err}");
}

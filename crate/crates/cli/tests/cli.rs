use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use falc::problems::MetricsRow;
use falc_cli::{aggregate, BenchSummary, RunConfig};
use serde_json::Value;

fn falc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_falc"))
        .args(args)
        .current_dir(dir)
        .env("FALC_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time");
    v
}

#[test]
fn solve_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = falc(&["solve", "--problem", "robust_pca", "--n", "50", "--seed", "1", "--output", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["termination"], "stagnation");

    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    let mut lines = history.lines();
    assert_eq!(lines.next().unwrap(), "k,lambda,eps,residual_2,objective,svd_count,branch");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len() as u64, report["outer_iterations"].as_u64().unwrap());
    assert_eq!(rows[0].split(',').count(), 7);

    let metrics: Value = serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["rank_est"], 2.0);
    assert!(metrics["rel_err_x"].as_f64().unwrap() < 1e-4);
}

#[test]
fn repeated_solves_match() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = falc(&["solve", "--problem", "robust_pca", "--n", "30", "--seed", "4", "--output", out], dir.path());
        assert_eq!(code(&o), 0);
    }
    let read = |d: &str| -> Value {
        serde_json::from_str(&fs::read_to_string(dir.path().join(d).join("report.json")).unwrap()).unwrap()
    };
    assert_eq!(without_timing(read("a")), without_timing(read("b")));
    assert_eq!(
        fs::read(dir.path().join("a/history.csv")).unwrap(),
        fs::read(dir.path().join("b/history.csv")).unwrap()
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = falc(&["solve", "--config", "missing.json"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());

    let o = falc(
        &["solve", "--problem", "robust_pca", "--n", "30", "--max-outer", "1", "--output", "short"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(dir.path().join("short/report.json").exists());

    let o = falc(&["solve", "--problem", "no_such_preset", "--n", "30"], dir.path());
    assert_eq!(code(&o), 1);

    fs::write(
        dir.path().join("bad.json"),
        r#"{"command":"solve","problem":{"preset":"robust_pca","n":30},"solver":{"c_lamda":0.4}}"#,
    )
    .unwrap();
    assert_eq!(code(&falc(&["solve", "--config", "bad.json"], dir.path())), 1);

    fs::write(
        dir.path().join("range.json"),
        r#"{"command":"solve","problem":{"preset":"robust_pca","n":30},"solver":{"c_lambda":1.5}}"#,
    )
    .unwrap();
    assert_eq!(code(&falc(&["solve", "--config", "range.json"], dir.path())), 1);

    let o = falc(&["bench", "--problem", "basis_pursuit", "--n", "64"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn run_uses_config_command_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"command":"solve","problem":{"preset":"robust_pca","n":40},"seeds":[9],"output":"from_cfg","format":"csv"}"#,
    )
    .unwrap();
    let o = falc(&["run", "--config", "cfg.json", "--n", "30", "--output", "from_flag"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("from_cfg").exists());
    let out = dir.path().join("from_flag");
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["x"]["rows"], 30);
    let csv = fs::read_to_string(out.join("metrics.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header, MetricsRow::FIELDS);
}

#[test]
fn geometric_schedule_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = falc(
        &["solve", "--problem", "robust_pca", "--n", "30", "--schedule", "geometric", "--nu", "0.3", "--output", "g"],
        dir.path(),
    );
    assert!(code(&o) == 0 || code(&o) == 2);
    let history = fs::read_to_string(dir.path().join("g/history.csv")).unwrap();
    let lambdas: Vec<f64> = history
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for w in lambdas.windows(2) {
        assert!((w[1] / w[0] - 0.3).abs() < 1e-12);
    }
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["i1", "i2"] {
        let o = falc(&["generate", "--problem", "robust_pca", "--n", "100", "--seed", "7", "--output", out], dir.path());
        assert_eq!(code(&o), 0);
    }
    let mut names: Vec<String> = fs::read_dir(dir.path().join("i1"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["D.fmat", "S0.fmat", "X0.fmat", "Y0.fmat", "meta.json"]);
    for n in &names {
        assert_eq!(
            fs::read(dir.path().join("i1").join(n)).unwrap(),
            fs::read(dir.path().join("i2").join(n)).unwrap()
        );
    }
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("i1/meta.json")).unwrap()).unwrap();
    assert_eq!(meta["support"].as_array().unwrap().len(), 500);

    // the instance solves through the `instance` preset
    fs::write(
        dir.path().join("inst.json"),
        r#"{"command":"solve","problem":{"preset":"instance","path":"i1"},"output":"sol"}"#,
    )
    .unwrap();
    let o = falc(&["run", "--config", "inst.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let metrics: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sol/metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["rank_est"], 5.0);
}

fn parse_rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn bench_summary_matches_trials() {
    let dir = tempfile::tempdir().unwrap();
    let o = falc(&["bench", "--problem", "robust_pca", "--n", "30", "--trials", "3", "--output", "b"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("b");
    let (th, trials) = parse_rows(&fs::read_to_string(out.join("trials.csv")).unwrap());
    let (sh, summary) = parse_rows(&fs::read_to_string(out.join("summary.csv")).unwrap());
    assert_eq!(th[0], "seed");
    assert_eq!(sh[0], "stat");
    assert_eq!(th[1..], MetricsRow::FIELDS);
    assert_eq!(sh[1..], MetricsRow::FIELDS);
    assert_eq!(trials.len(), 3);

    let rows: Vec<MetricsRow> = trials
        .iter()
        .map(|r| MetricsRow::from_values(r.clone().try_into().unwrap()))
        .collect();
    let (avg, min, max) = aggregate(&rows).unwrap();
    assert_eq!(summary[0], avg.values());
    assert_eq!(summary[1], min.values());
    assert_eq!(summary[2], max.values());
    for i in 0..12 {
        assert!(min.values()[i] <= avg.values()[i] && avg.values()[i] <= max.values()[i]);
    }

    let js: BenchSummary = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(!js.partial);
    assert_eq!(js.seeds, [1, 2, 3]);
    assert_eq!(js.average.unwrap(), avg);
}

#[test]
fn single_trial_bench() {
    let dir = tempfile::tempdir().unwrap();
    let o = falc(
        &["bench", "--problem", "stable_pcp", "--n", "30", "--trials", "1", "--seed", "5", "--output", "b"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, summary) = parse_rows(&fs::read_to_string(dir.path().join("b/summary.csv")).unwrap());
    assert_eq!(summary[0], summary[1]);
    assert_eq!(summary[1], summary[2]);
}

#[test]
fn parallel_bench_matches_serial() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_falc"))
            .args(["bench", "--problem", "robust_pca", "--n", "30", "--trials", "3", "--output", out])
            .current_dir(dir.path())
            .env("FALC_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        let (_, rows) = parse_rows(&fs::read_to_string(dir.path().join(out).join("trials.csv")).unwrap());
        // drop cpu_seconds
        rows.into_iter().map(|r| r[..11].to_vec()).collect::<Vec<_>>()
    };
    assert_eq!(run("1", "serial"), run("3", "parallel"));
}

#[test]
fn config_round_trip() {
    let text = r#"{
        "command": "bench",
        "problem": {"preset": "stable_pcp", "n": 80, "rho": 0.001, "noise": "gaussian"},
        "solver": {"c_lambda": 0.5, "schedule": {"mode": "geometric", "nu": 0.3}},
        "seeds": [3, 5],
        "output": "x/y",
        "format": "csv",
        "trials": 4
    }"#;
    let cfg = RunConfig::from_json(text).unwrap();
    assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    assert_eq!(cfg.trial_seeds(), [3, 5, 6, 7]);
    let p = cfg.solver_params().unwrap();
    assert_eq!(p.c_lambda, 0.5);
    // stable PCP settings survive under the overrides
    assert!(p.global_stop.is_some());
}

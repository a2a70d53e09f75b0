use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use falc::linalg::io::format_real;
use falc::outer::IterationRecord;
use falc::problems::{compute_metrics, generate_instance, save_instance, MetricsRow};
use falc::{solve_with_progress, SolveReport, Termination};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::build::{build, score, Truth};
use crate::config::{Format, ProblemConfig, RunConfig};
use crate::error::CliError;

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(&format!("cannot write {}", path.display()), e))
}

fn make_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(&format!("cannot create {}", dir.display()), e))
}

fn progress_line(r: &IterationRecord) -> String {
    format!(
        "k={:3} lambda={:.3e} eps={:.3e} residual={:.3e} objective={:.10e} inner={} svd={} {}",
        r.k,
        r.lambda,
        r.eps,
        r.residual_2,
        r.objective,
        r.inner_iterations,
        r.svd_count,
        branch_name(r)
    )
}

fn branch_name(r: &IterationRecord) -> String {
    match serde_json::to_value(r.branch) {
        Ok(Value::String(s)) => s,
        _ => format!("{:?}", r.branch),
    }
}

pub const HISTORY_COLUMNS: [&str; 7] = ["k", "lambda", "eps", "residual_2", "objective", "svd_count", "branch"];

pub fn history_csv(report: &SolveReport) -> String {
    let mut out = HISTORY_COLUMNS.join(",");
    out.push('\n');
    for r in &report.history {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            format_real(r.lambda),
            format_real(r.eps),
            format_real(r.residual_2),
            format_real(r.objective),
            r.svd_count,
            branch_name(r)
        ));
    }
    out
}

fn metrics_csv(metrics: &[(String, f64)]) -> String {
    let names: Vec<&str> = metrics.iter().map(|(n, _)| n.as_str()).collect();
    let vals: Vec<String> = metrics.iter().map(|(_, v)| format_real(*v)).collect();
    format!("{}\n{}\n", names.join(","), vals.join(","))
}

fn metrics_json(metrics: &[(String, f64)]) -> String {
    let mut m = Map::new();
    for (k, v) in metrics {
        m.insert(k.clone(), Value::from(*v));
    }
    serde_json::to_string_pretty(&Value::Object(m)).unwrap()
}

/// Solves for the first seed and writes report.json, history.csv and, when
/// the problem has a planted solution, metrics.json or metrics.csv.
/// Returns the process exit code.
pub fn run_solve(cfg: &RunConfig, verbose: bool) -> Result<i32, CliError> {
    let params = cfg.solver_params()?;
    let built = build(&cfg.problem, cfg.seeds[0])?;
    let report = solve_with_progress(&built.spec, &params, |r| {
        if verbose {
            eprintln!("{}", progress_line(r));
        }
    })
    .map_err(CliError::Solver)?;
    make_dir(&cfg.output)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::io("cannot encode report", e))?;
    write_file(&cfg.output.join("report.json"), json.as_bytes())?;
    write_file(&cfg.output.join("history.csv"), history_csv(&report).as_bytes())?;
    let metrics = score(&built, &report)?;
    if !metrics.is_empty() {
        match cfg.format {
            Format::Json => write_file(&cfg.output.join("metrics.json"), metrics_json(&metrics).as_bytes())?,
            Format::Csv => write_file(&cfg.output.join("metrics.csv"), metrics_csv(&metrics).as_bytes())?,
        }
    }
    if verbose {
        eprintln!(
            "{:?} after {} outer / {} inner iterations, {} SVDs, objective {:.10e}",
            report.termination,
            report.outer_iterations,
            report.total_inner_iterations,
            report.svd_count,
            report.objective
        );
    }
    Ok(if report.termination == Termination::MaxOuter { 2 } else { 0 })
}

/// Writes the planted instance for the first seed into the output directory.
pub fn run_generate(cfg: &RunConfig) -> Result<i32, CliError> {
    let params = cfg.problem.instance_params(cfg.seeds[0]).ok_or_else(|| {
        CliError::Config(format!(
            "generate needs robust_pca or stable_pcp, not {}",
            cfg.problem.name()
        ))
    })?;
    let (truth, d) = generate_instance(&params).map_err(|e| CliError::Config(e.to_string()))?;
    save_instance(&cfg.output, &params, &truth, &d)
        .map_err(|e| CliError::io(&format!("cannot write instance to {}", cfg.output.display()), e))?;
    Ok(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub seed: u64,
    pub error: String,
}

/// Average / min / max of every metric over the completed trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub problem: String,
    pub requested_trials: usize,
    /// Seeds of the completed trials, in trial order.
    pub seeds: Vec<u64>,
    /// Set when a trial failed and the remaining trials were abandoned.
    pub partial: bool,
    pub failures: Vec<TrialFailure>,
    pub average: Option<MetricsRow>,
    pub min: Option<MetricsRow>,
    pub max: Option<MetricsRow>,
}

/// (average, min, max) per field; the average sums in row order.
pub fn aggregate(rows: &[MetricsRow]) -> Option<(MetricsRow, MetricsRow, MetricsRow)> {
    let first = rows.first()?.values();
    let (mut sum, mut lo, mut hi) = ([0.0; 12], first, first);
    for r in rows {
        for (i, v) in r.values().into_iter().enumerate() {
            sum[i] += v;
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    let avg = sum.map(|s| s / rows.len() as f64);
    Some((
        MetricsRow::from_values(avg),
        MetricsRow::from_values(lo),
        MetricsRow::from_values(hi),
    ))
}

pub fn trials_csv(seeds: &[u64], rows: &[MetricsRow]) -> String {
    let mut out = format!("seed,{}\n", MetricsRow::FIELDS.join(","));
    for (seed, r) in seeds.iter().zip(rows) {
        let vals: Vec<String> = r.values().iter().map(|v| format_real(*v)).collect();
        out.push_str(&format!("{seed},{}\n", vals.join(",")));
    }
    out
}

pub fn summary_csv(s: &BenchSummary) -> String {
    let mut out = format!("stat,{}\n", MetricsRow::FIELDS.join(","));
    for (label, row) in [("average", &s.average), ("min", &s.min), ("max", &s.max)] {
        if let Some(r) = row {
            let vals: Vec<String> = r.values().iter().map(|v| format_real(*v)).collect();
            out.push_str(&format!("{label},{}\n", vals.join(",")));
        }
    }
    out
}

fn thread_cap() -> usize {
    std::env::var("FALC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(1)
}

fn one_trial(cfg: &RunConfig, seed: u64) -> Result<MetricsRow, CliError> {
    let params = cfg.solver_params()?;
    let built = build(&cfg.problem, seed)?;
    let report = solve_with_progress(&built.spec, &params, |_| {}).map_err(CliError::Solver)?;
    match &built.truth {
        Truth::Decomposition(t) => compute_metrics(&report, t, &built.spec).map_err(CliError::Solver),
        _ => unreachable!("bench runs decomposition presets only"),
    }
}

/// Runs `trials` independent solves, at most FALC_THREADS at a time, and
/// writes trials.csv, summary.csv and summary.json. A failed trial stops
/// new trials from starting; the summary then covers the completed ones and
/// is flagged partial.
pub fn run_bench(cfg: &RunConfig, verbose: bool) -> Result<(i32, BenchSummary), CliError> {
    if !matches!(
        cfg.problem,
        ProblemConfig::RobustPca { .. } | ProblemConfig::StablePcp { .. }
    ) {
        return Err(CliError::Config(format!(
            "bench needs robust_pca or stable_pcp, not {}",
            cfg.problem.name()
        )));
    }
    cfg.solver_params()?;
    make_dir(&cfg.output)?;
    let seeds = cfg.trial_seeds();
    let results: Mutex<Vec<Option<Result<MetricsRow, String>>>> = Mutex::new(vec![None; seeds.len()]);
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let workers = thread_cap().min(seeds.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if abort.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= seeds.len() {
                    break;
                }
                let out = one_trial(cfg, seeds[i]).map_err(|e| e.to_string());
                if out.is_err() {
                    abort.store(true, Ordering::SeqCst);
                }
                if verbose {
                    match &out {
                        Ok(r) => eprintln!(
                            "trial {} seed {}: rel_err_x {:.3e} rank {} svd {} ({:.2}s)",
                            i + 1,
                            seeds[i],
                            r.rel_err_x,
                            r.rank_est,
                            r.svd_count,
                            r.cpu_seconds
                        ),
                        Err(e) => eprintln!("trial {} seed {} failed: {e}", i + 1, seeds[i]),
                    }
                }
                results.lock().unwrap()[i] = Some(out);
            });
        }
    });
    let results = results.into_inner().unwrap();
    let mut done_seeds = Vec::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (seed, r) in seeds.iter().zip(results) {
        match r {
            Some(Ok(row)) => {
                done_seeds.push(*seed);
                rows.push(row);
            }
            Some(Err(error)) => failures.push(TrialFailure { seed: *seed, error }),
            None => {}
        }
    }
    let partial = rows.len() < seeds.len();
    let agg = aggregate(&rows);
    let summary = BenchSummary {
        problem: cfg.problem.name().into(),
        requested_trials: seeds.len(),
        seeds: done_seeds,
        partial,
        failures,
        average: agg.as_ref().map(|a| a.0.clone()),
        min: agg.as_ref().map(|a| a.1.clone()),
        max: agg.as_ref().map(|a| a.2.clone()),
    };
    write_file(&cfg.output.join("trials.csv"), trials_csv(&summary.seeds, &rows).as_bytes())?;
    write_file(&cfg.output.join("summary.csv"), summary_csv(&summary).as_bytes())?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::io("cannot encode summary", e))?;
    write_file(&cfg.output.join("summary.json"), json.as_bytes())?;
    if partial {
        let mut err = std::io::stderr();
        let _ = writeln!(
            err,
            "bench incomplete: {} of {} trials finished",
            summary.seeds.len(),
            summary.requested_trials
        );
        for f in &summary.failures {
            let _ = writeln!(err, "  seed {}: {}", f.seed, f.error);
        }
    }
    Ok((if partial { 3 } else { 0 }, summary))
}

//! Verification runner: selects suites, fans the checks out over a thread
//! pool, and writes a canonically ordered machine-readable report.
//!
//! Exit codes: 0 all checks passed; 1 at least one identity failed; 2
//! configuration error; 3 a lattice sum failed to converge (without any
//! identity failure).

mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use qjackson_core::qcore::QContext;
use qjackson_core::verify::{catalog, CheckError, CheckInput, CheckReport};
use rayon::prelude::*;

use config::{resolve, Cli, Format, RunConfig};

struct Job {
    base_id: &'static str,
    full_id: String,
    n: usize,
    trial: u32,
    tol: f64,
    seed: u64,
}

fn trial_seed(base: u64, trial: u32) -> u64 {
    base.wrapping_add((trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn build_jobs(cfg: &RunConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for def in catalog() {
        if !cfg.suites.contains(&def.suite) {
            continue;
        }
        let dims: Vec<usize> = if def.dims.is_empty() {
            vec![0]
        } else {
            match &cfg.n_values {
                Some(ns) => def.dims.iter().copied().filter(|d| ns.contains(d)).collect(),
                None => def.dims.to_vec(),
            }
        };
        for n in dims {
            let full_id = if n == 0 {
                def.id.to_string()
            } else {
                format!("{}.n{}", def.id, n)
            };
            let trials = cfg.trials.unwrap_or(def.default_trials);
            let tol = cfg.tol.unwrap_or_else(|| (def.default_tol)(n));
            for trial in 0..trials {
                jobs.push(Job {
                    base_id: def.id,
                    full_id: full_id.clone(),
                    n,
                    trial,
                    tol,
                    seed: trial_seed(cfg.seed, trial),
                });
            }
        }
    }
    jobs
}

fn run(cfg: &RunConfig) -> Result<ExitCode, String> {
    let mut ctx = QContext::new(cfg.q).map_err(|e| e.to_string())?;
    if let Some(c) = cfg.cutoff {
        ctx = ctx.with_cutoff(c).map_err(|e| e.to_string())?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| e.to_string())?;
    let jobs = build_jobs(cfg);
    if jobs.is_empty() {
        return Err("no checks selected (suite/dimension filter left nothing to run)".into());
    }
    let results: Vec<(String, u32, Result<CheckReport, CheckError>)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let input = CheckInput {
                    check_id: job.full_id.clone(),
                    n: job.n,
                    ctx: &ctx,
                    seed: job.seed,
                    tol: job.tol,
                };
                let def = qjackson_core::verify::find_check(job.base_id).expect("catalog id");
                (job.full_id.clone(), job.trial, (def.run)(&input))
            })
            .collect()
    });

    let mut rows: Vec<(String, u32, CheckReport)> = Vec::new();
    let mut not_converged: Vec<String> = Vec::new();
    let mut hard_errors: Vec<String> = Vec::new();
    for (id, trial, res) in results {
        match res {
            Ok(report) => rows.push((id, trial, report)),
            Err(e @ CheckError::NotConverged { .. }) => {
                not_converged.push(format!("{e} (trial {trial})"))
            }
            Err(e) => hard_errors.push(format!("{id} trial {trial}: {e}")),
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let reports: Vec<CheckReport> = rows.into_iter().map(|(_, _, r)| r).collect();

    let body = match cfg.format {
        Format::Json => output::to_json(&reports),
        Format::Csv => output::to_csv(&reports),
        Format::Text => output::to_text(&reports),
    };
    match &cfg.report {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| format!("cannot write report {}: {e}", path.display()))?,
        None => print!("{body}"),
    }

    for line in &not_converged {
        eprintln!("not converged: {line}");
    }
    for line in &hard_errors {
        eprintln!("error: {line}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let passed = reports.len() - failed;
    eprintln!(
        "{passed} passed, {failed} failed, {} not converged, {} errors",
        not_converged.len(),
        hard_errors.len()
    );
    if failed > 0 || !hard_errors.is_empty() {
        Ok(ExitCode::from(1))
    } else if !not_converged.is_empty() {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match resolve(cli).and_then(|cfg| run(&cfg)) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

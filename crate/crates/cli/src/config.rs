//! Run configuration: flag parsing, optional flat key=value config file,
//! and the merge rule (flags win).

use std::path::PathBuf;

use clap::Parser;
use qjackson_core::verify::Suite;

/// Verify multi-dimensional bilateral q-series identities: Milne-Gustafson
/// sums, q-Dixon-Anderson (Evans) sums and Gustafson A_n sums, against their
/// closed-form product evaluations, contiguous relations, expansion lemmas
/// and asymptotics.
#[derive(Parser, Debug)]
#[command(name = "qjackson", version, about)]
pub struct Cli {
    /// Comma-separated suites: core, mg, da, gus, lemmas, asymptotics, all
    #[arg(long, value_delimiter = ',')]
    pub suites: Option<Vec<String>>,

    /// Comma-separated dimensions to run (intersected with each check's
    /// supported dimensions); default: every supported dimension
    #[arg(long = "n", value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,

    /// Base q in (0,1)
    #[arg(long)]
    pub q: Option<f64>,

    /// Master seed; per-check trial seeds derive from it
    #[arg(long)]
    pub seed: Option<u64>,

    /// Trials per check (default: per-check catalog value)
    #[arg(long)]
    pub trials: Option<u32>,

    /// Tolerance override applied to every selected check
    #[arg(long)]
    pub tol: Option<f64>,

    /// Initial lattice cutoff override
    #[arg(long)]
    pub cutoff: Option<i64>,

    /// Report file path (stdout when absent)
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Report format: json, csv or text
    #[arg(long)]
    pub format: Option<String>,

    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,

    /// Flat key=value config file; flags override file values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub n_values: Option<Vec<usize>>,
    pub q: f64,
    pub seed: u64,
    pub trials: Option<u32>,
    pub tol: Option<f64>,
    pub cutoff: Option<i64>,
    pub report: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
}

pub fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        "text" => Ok(Format::Text),
        other => Err(format!("unknown format '{other}' (expected json, csv or text)")),
    }
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>, String> {
    let mut out = Vec::new();
    for name in names {
        let mut parsed =
            Suite::parse(name).ok_or_else(|| format!("unknown suite '{name}'"))?;
        for s in parsed.drain(..) {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    if out.is_empty() {
        return Err("suite list must be nonempty".into());
    }
    Ok(out)
}

/// File values for every flag that may appear in a config file.
#[derive(Default)]
struct FileValues {
    suites: Option<Vec<String>>,
    n_values: Option<Vec<usize>>,
    q: Option<f64>,
    seed: Option<u64>,
    trials: Option<u32>,
    tol: Option<f64>,
    cutoff: Option<i64>,
    report: Option<PathBuf>,
    format: Option<String>,
    workers: Option<usize>,
}

fn parse_config_file(path: &std::path::Path) -> Result<FileValues, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut out = FileValues::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got '{line}'", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| format!("line {}: invalid {what} '{value}'", lineno + 1);
        match key {
            "suites" => out.suites = Some(value.split(',').map(|s| s.trim().to_string()).collect()),
            "n" => {
                let mut ns = Vec::new();
                for part in value.split(',') {
                    ns.push(part.trim().parse().map_err(|_| bad("dimension"))?);
                }
                out.n_values = Some(ns);
            }
            "q" => out.q = Some(value.parse().map_err(|_| bad("q"))?),
            "seed" => out.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "trials" => out.trials = Some(value.parse().map_err(|_| bad("trials"))?),
            "tol" => out.tol = Some(value.parse().map_err(|_| bad("tol"))?),
            "cutoff" => out.cutoff = Some(value.parse().map_err(|_| bad("cutoff"))?),
            "report" => out.report = Some(PathBuf::from(value)),
            "format" => out.format = Some(value.to_string()),
            "workers" => out.workers = Some(value.parse().map_err(|_| bad("workers"))?),
            other => return Err(format!("line {}: unknown key '{other}'", lineno + 1)),
        }
    }
    Ok(out)
}

/// Merge flags over file values and validate.
pub fn resolve(cli: Cli) -> Result<RunConfig, String> {
    let file = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => FileValues::default(),
    };
    let suites_raw = cli
        .suites
        .or(file.suites)
        .unwrap_or_else(|| vec!["all".to_string()]);
    let suites = parse_suites(&suites_raw)?;
    let n_values = cli.n_values.or(file.n_values);
    if let Some(ns) = &n_values {
        if ns.is_empty() || ns.iter().any(|&n| n == 0) {
            return Err("dimension list must be nonempty with entries >= 1".into());
        }
    }
    let q = cli.q.or(file.q).unwrap_or(0.5);
    if !(q > 0.0 && q < 1.0) {
        return Err(format!("q must lie in (0,1), got {q}"));
    }
    let tol = cli.tol.or(file.tol);
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(format!("tol must be positive, got {t}"));
        }
    }
    let cutoff = cli.cutoff.or(file.cutoff);
    if let Some(c) = cutoff {
        if c < 1 {
            return Err(format!("cutoff must be at least 1, got {c}"));
        }
    }
    let trials = cli.trials.or(file.trials);
    if trials == Some(0) {
        return Err("trials must be at least 1".into());
    }
    let format = match cli.format.or(file.format) {
        Some(s) => parse_format(&s)?,
        None => Format::Json,
    };
    let workers = cli
        .workers
        .or(file.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1));
    if workers == 0 {
        return Err("workers must be at least 1".into());
    }
    Ok(RunConfig {
        suites,
        n_values,
        q,
        seed: cli.seed.or(file.seed).unwrap_or(0),
        trials,
        tol,
        cutoff,
        report: cli.report.or(file.report),
        format,
        workers,
    })
}

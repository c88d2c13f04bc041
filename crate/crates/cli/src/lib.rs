//! The `logion` command line: search for boundary conditions, check a
//! candidate, analyze result files, measure formula distance and list the
//! bundled cases.
//!
//! Exit codes: 0 success, 1 nothing found (or the candidate is not a BC),
//! 2 unreadable or malformed input, 3 invalid flags.

use std::env;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use logion_core::analysis::{
    consecutive_distances, dedup, most_general_set, similarity_report, CorpusEntry, DedupMode, GeneralSet,
    SimilarityReport,
};
use logion_core::cases::{self, CASES};
use logion_core::files::{FileError, ResultFile, SpecFile};
use logion_core::search::run_portfolio;
use logion_core::treedist::normalized_distance;
use logion_core::{evaluate, parse, SatLimits, SatSolver, SearchConfig, Specification};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FOUND: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Overrides the wall-clock budget of each satisfiability check.
pub const SAT_BUDGET_ENV: &str = "LOGION_SAT_BUDGET_MS";

#[derive(Debug)]
pub enum CliError {
    /// A file or formula could not be read or parsed.
    Input(String),
    /// The flags do not make sense.
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn io_error(what: &Path, e: io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", what.display()))
}

#[derive(Debug, Parser)]
#[command(name = "logion", version, about = "Boundary-condition search for LTL goal specifications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search a specification for boundary conditions.
    Search(SearchArgs),
    /// Check whether a formula is a boundary condition of a specification.
    Check(CheckArgs),
    /// Merge result files and report on the BCs they contain.
    Analyze(AnalyzeArgs),
    /// Tree edit distance between two formulae.
    Distance(DistanceArgs),
    /// List the bundled benchmark cases.
    Cases(CasesArgs),
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Specification file, or the id of a bundled case.
    pub spec: String,
    /// Time limit per run in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub time: f64,
    /// Neighbors sampled per iteration.
    #[arg(long, default_value_t = 50)]
    pub k: usize,
    /// Tabu tenure.
    #[arg(long, default_value_t = 4)]
    pub tabu: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Stop each run after this many iterations.
    #[arg(long)]
    pub max_iterations: Option<u64>,
    /// Discard neighbors larger than this.
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Go back to the trivial condition when a run stagnates.
    #[arg(long)]
    pub restart: bool,
    /// Where to write the result file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write zero for every elapsed time in the trace.
    #[arg(long)]
    pub normalize_times: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Specification file, or the id of a bundled case.
    pub spec: String,
    pub formula: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(required = true)]
    pub results: Vec<PathBuf>,
    /// Compute the most general BCs.
    #[arg(long)]
    pub pi: bool,
    /// Compute the structural similarity report.
    #[arg(long)]
    pub similarity: bool,
    /// Merge logically equivalent BCs.
    #[arg(long)]
    pub semantic_dedup: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Skip re-checking every listed BC.
    #[arg(long)]
    pub no_verify: bool,
    /// Where to write the report; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Args)]
pub struct CasesArgs {
    /// Write every shipped case as a JSON file into this directory.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Search(a) => cmd_search(a, out, err),
        Command::Check(a) => cmd_check(a, out),
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Distance(a) => cmd_distance(a, out),
        Command::Cases(a) => cmd_cases(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Default limits, with the time budget taken from [`SAT_BUDGET_ENV`] when set.
pub fn sat_limits_from_env() -> Result<SatLimits, CliError> {
    let mut limits = SatLimits::default();
    if let Ok(v) = env::var(SAT_BUDGET_ENV) {
        let ms: u64 = v.trim().parse().map_err(|_| {
            CliError::Usage(format!("{SAT_BUDGET_ENV} must be a whole number of milliseconds, got `{v}`"))
        })?;
        limits.time_budget = Some(Duration::from_millis(ms));
    }
    Ok(limits)
}

/// A path to a specification file, or failing that a bundled case id.
pub fn load_spec(key: &str) -> Result<SpecFile, CliError> {
    let path = Path::new(key);
    if path.exists() {
        return Ok(SpecFile::load(path)?);
    }
    if let Some(file) = cases::find(key).and_then(|c| c.spec_file()) {
        return Ok(file);
    }
    Err(CliError::Input(format!("{key}: no such file or bundled case")))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(contents).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

fn emit(out: &mut dyn Write, target: Option<&Path>, text: &str) -> Result<(), CliError> {
    match target {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Input(e.to_string())),
    }
}

pub fn search_config(args: &SearchArgs) -> Result<SearchConfig, CliError> {
    if !(args.time.is_finite() && args.time >= 0.0) {
        return Err(CliError::Usage(format!("--time must be a non-negative number of seconds, got {}", args.time)));
    }
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let config = SearchConfig {
        k: args.k,
        tabu_tenure: args.tabu,
        cutoff: Duration::from_secs_f64(args.time),
        seed: args.seed,
        sat_limits: sat_limits_from_env()?,
        max_formula_size: args.max_size,
        max_iterations: args.max_iterations,
        restart_on_stagnation: args.restart,
        ..SearchConfig::default()
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

pub fn cmd_search(args: &SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let config = search_config(args)?;
    let file = load_spec(&args.spec)?;
    let spec = file.to_specification()?;
    let result = run_portfolio(&spec, &config, args.runs);
    let report = ResultFile::from_portfolio(&file, &config, args.runs, &result);

    if let Some(path) = &args.trace {
        let mut buf = Vec::new();
        for run in &result.runs {
            run.trace.write_jsonl(&mut buf, args.normalize_times).map_err(|e| io_error(path, e))?;
        }
        write_atomic(path, &buf)?;
    }
    emit(out, args.out.as_deref(), &(report.to_json() + "\n"))?;

    let s = &report.summary;
    let _ = writeln!(
        err,
        "{}: {} BCs, {}/{} runs successful, smallest {}, first after {}",
        report.spec_name,
        s.num_bc,
        s.successful_runs,
        args.runs,
        s.s_bbc.map_or("-".into(), |v| v.to_string()),
        s.t_fbc_ms.map_or("-".into(), |v| format!("{v:.1} ms")),
    );
    Ok(if s.success { EXIT_OK } else { EXIT_NOT_FOUND })
}

fn verdict(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec: Specification = load_spec(&args.spec)?.to_specification()?;
    let phi = parse(&args.formula).map_err(|e| CliError::Input(format!("formula: {e}")))?;
    let c = evaluate(&phi, &spec, &SatSolver::uncached(sat_limits_from_env()?));
    let mut text = format!("formula: {phi}\nlogical inconsistency: {}\n", verdict(c.li));
    for (g, m) in spec.goals.iter().zip(&c.min) {
        text += &format!("minimality without {}: {}\n", g.name, verdict(*m));
    }
    text += &format!("non-triviality: {}\n", verdict(c.nt));
    if c.budget_exhausted {
        text += "note: a satisfiability check ran out of budget\n";
    }
    text += &format!("score: {}\nBC: {}\n", c.score, verdict(c.is_bc));
    out.write_all(text.as_bytes()).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(if c.is_bc { EXIT_OK } else { EXIT_NOT_FOUND })
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub sources: Vec<String>,
    /// BCs listed across all inputs.
    pub listed: usize,
    pub corpus: Vec<String>,
    /// An equivalence check ran out of budget during semantic dedup.
    pub dedup_flagged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi: Option<GeneralSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub similarity: Option<SimilarityReport>,
    /// Mean distance and mean normalized distance between BCs found one
    /// after the other in the same run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consecutive: Option<(f64, f64)>,
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.format == Format::Csv && !args.similarity {
        return Err(CliError::Usage("--format csv needs --similarity".into()));
    }
    let limits = sat_limits_from_env()?;
    let mut raw = Vec::new();
    let mut names = Vec::new();
    let mut sequences = Vec::new();
    for path in &args.results {
        let result = ResultFile::load(path)?;
        if !args.no_verify {
            let failing = result.failing_bcs(&limits)?;
            if let Some(&i) = failing.first() {
                return Err(CliError::Input(format!(
                    "{}: listed BC `{}` does not re-verify",
                    path.display(),
                    result.bcs[i].formula
                )));
            }
        }
        let source = path.display().to_string();
        let runs: std::collections::BTreeSet<usize> = result.bcs.iter().map(|b| b.run).collect();
        for run in runs {
            sequences.push(result.bcs.iter().filter(|b| b.run == run).map(|b| b.formula.clone()).collect::<Vec<_>>());
        }
        for b in &result.bcs {
            raw.push(CorpusEntry {
                formula: b.formula.clone(),
                source: source.clone(),
                run: Some(b.run),
                iteration: Some(b.iteration),
            });
        }
        if !names.contains(&result.spec_name) {
            names.push(result.spec_name.clone());
        }
    }
    let listed = raw.len();
    let sat = SatSolver::new(limits, logion_core::sat::DEFAULT_CACHE_CAPACITY);
    let mode = if args.semantic_dedup { DedupMode::Semantic } else { DedupMode::Syntactic };
    let corpus = dedup(raw, mode, &sat);
    let similarity = args.similarity.then(|| similarity_report(&corpus.formulas()));

    let text = match args.format {
        Format::Csv => {
            let report = similarity.expect("checked above");
            format!("{}\n{}\n", SimilarityReport::CSV_HEADER, report.csv_row(&names.join("+")))
        }
        Format::Json => {
            let per_run: Vec<(f64, f64)> = sequences.iter().filter_map(|s| consecutive_distances(s)).collect();
            let consecutive = (!per_run.is_empty()).then(|| {
                let n = per_run.len() as f64;
                (per_run.iter().map(|p| p.0).sum::<f64>() / n, per_run.iter().map(|p| p.1).sum::<f64>() / n)
            });
            let report = AnalysisReport {
                sources: args.results.iter().map(|p| p.display().to_string()).collect(),
                listed,
                corpus: corpus.entries.iter().map(|e| e.formula.to_string()).collect(),
                dedup_flagged: corpus.flagged,
                pi: args.pi.then(|| most_general_set(&corpus, &sat)),
                similarity,
                consecutive,
            };
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
    };
    emit(out, args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

pub fn cmd_distance(args: &DistanceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let a = parse(&args.a).map_err(|e| CliError::Input(format!("first formula: {e}")))?;
    let b = parse(&args.b).map_err(|e| CliError::Input(format!("second formula: {e}")))?;
    let r = normalized_distance(&a, &b);
    writeln!(out, "δ={} Δ={:.3}", r.num, r.as_f64()).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(EXIT_OK)
}

pub fn cmd_cases(args: &CasesArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut text =
        String::from("id    name                 provenance      #dom #goal #var size(published) size(shipped)\n");
    for c in CASES {
        let shipped = c
            .spec_file()
            .map(|f| f.to_specification().map(|s| s.total_size().to_string()))
            .transpose()?
            .unwrap_or_else(|| "-".into());
        let p = c.published;
        text += &format!(
            "{:<5} {:<20} {:<15} {:>4} {:>5} {:>4} {:>15} {:>13}\n",
            c.id,
            c.name,
            c.provenance.as_str(),
            p.domains,
            p.goals,
            p.variables,
            p.size,
            shipped
        );
    }
    out.write_all(text.as_bytes()).map_err(|e| CliError::Input(e.to_string()))?;
    if let Some(dir) = &args.export {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        for c in CASES {
            if let Some(json) = c.json() {
                write_atomic(&dir.join(format!("{}.json", c.id.to_lowercase())), json.as_bytes())?;
            }
        }
    }
    Ok(EXIT_OK)
}

//! Tabu local search for boundary conditions.
//!
//! Starting from the trivial condition, each iteration samples `k` edit
//! neighbors of the current formula, drops the tabu ones, scores the rest,
//! moves to the best (ties broken at random, worse moves accepted), keeps
//! every BC seen, and records the move in tabu memory.

use std::collections::HashSet;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{Formula, Specification};
use crate::neighborhood::{filter_tabu, sample_neighbors, TabuMemory};
use crate::objective::{evaluate, trivial_condition, ScoredCandidate};
use crate::sat::{SatLimits, SatSolver, DEFAULT_CACHE_CAPACITY};

/// Consecutive non-improving iterations before a restart, when enabled.
pub const RESTART_AFTER: u64 = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Neighbors sampled per iteration.
    pub k: usize,
    pub tabu_tenure: usize,
    /// Wall-clock limit, checked between iterations.
    pub cutoff: Duration,
    pub seed: u64,
    pub sat_limits: SatLimits,
    pub sat_cache_capacity: usize,
    /// Neighbors larger than this are discarded before scoring.
    pub max_formula_size: Option<usize>,
    /// Iteration limit; with it a run no longer depends on machine speed.
    pub max_iterations: Option<u64>,
    /// Go back to the trivial condition after [`RESTART_AFTER`] iterations
    /// without a move to a better formula.
    pub restart_on_stagnation: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            k: 50,
            tabu_tenure: 4,
            cutoff: Duration::from_secs(60),
            seed: 0,
            sat_limits: SatLimits::default(),
            sat_cache_capacity: DEFAULT_CACHE_CAPACITY,
            max_formula_size: None,
            max_iterations: None,
            restart_on_stagnation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("the formula size cap must be at least 1")]
    ZeroSizeCap,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return Err(ConfigError::ZeroK);
        }
        if self.max_formula_size == Some(0) {
            return Err(ConfigError::ZeroSizeCap);
        }
        Ok(())
    }
}

/// State of the walk after one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub run: usize,
    /// 0 is the initial formula.
    pub iteration: u64,
    pub current_key: String,
    pub score: f64,
    pub bc_count: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcDiscovery {
    pub candidate: ScoredCandidate,
    pub run: usize,
    pub iteration: u64,
    pub elapsed_ms: f64,
}

impl BcDiscovery {
    pub fn formula(&self) -> &Formula {
        &self.candidate.formula
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub iterations: Vec<IterationRecord>,
    /// BCs in discovery order, one per canonical key.
    pub discoveries: Vec<BcDiscovery>,
    pub evaluations: u64,
    pub sat_calls: u64,
    pub sat_cache_hits: u64,
}

impl SearchTrace {
    /// One JSON object per iteration. With `normalize_times` every elapsed
    /// time is written as zero so that runs can be compared byte for byte.
    pub fn write_jsonl<W: Write>(&self, mut out: W, normalize_times: bool) -> io::Result<()> {
        for r in &self.iterations {
            let mut r = r.clone();
            if normalize_times {
                r.elapsed_ms = 0.0;
            }
            serde_json::to_writer(&mut out, &r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn time_to_first_bc_ms(&self) -> Option<f64> {
        self.discoveries.first().map(|d| d.elapsed_ms)
    }

    /// Size of the smallest BC found.
    pub fn smallest_bc(&self) -> Option<usize> {
        self.discoveries.iter().map(|d| d.candidate.size).min()
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// One search run. Returns the BCs in discovery order and the trace.
pub fn run_search(spec: &Specification, config: &SearchConfig) -> (Vec<Formula>, SearchTrace) {
    let trace = search_run(spec, config, 0);
    (trace.discoveries.iter().map(|d| d.formula().clone()).collect(), trace)
}

fn search_run(spec: &Specification, config: &SearchConfig, run: usize) -> SearchTrace {
    let started = Instant::now();
    let sat = SatSolver::new(config.sat_limits, config.sat_cache_capacity);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut memory = TabuMemory::new(config.tabu_tenure);
    let mut trace = SearchTrace::default();
    let mut found: HashSet<String> = HashSet::new();

    let start = trivial_condition(spec);
    let mut current = evaluate(&start, spec, &sat);
    trace.evaluations += 1;
    trace.iterations.push(IterationRecord {
        run,
        iteration: 0,
        current_key: current.formula.canonical_key(),
        score: current.score,
        bc_count: 0,
        elapsed_ms: ms(started.elapsed()),
    });

    let mut stale = 0u64;
    let mut iteration = 0u64;
    loop {
        if started.elapsed() >= config.cutoff || config.max_iterations.is_some_and(|m| iteration >= m) {
            break;
        }
        iteration += 1;

        let mut sampled = sample_neighbors(&current.formula, config.k, &spec.vocabulary, &mut rng);
        if let Some(cap) = config.max_formula_size {
            sampled.retain(|f| f.size() <= cap);
        }
        let mut seen = HashSet::new();
        sampled.retain(|f| seen.insert(f.canonical_key()));
        let candidates = filter_tabu(sampled, &memory);

        let scored: Vec<ScoredCandidate> = candidates.iter().map(|f| evaluate(f, spec, &sat)).collect();
        trace.evaluations += scored.len() as u64;

        let mut improved = false;
        if !scored.is_empty() {
            let best = scored.iter().map(|c| c.score).fold(f64::NEG_INFINITY, f64::max);
            let ties: Vec<usize> = (0..scored.len()).filter(|&i| scored[i].score == best).collect();
            let pick = ties[rng.gen_range(0..ties.len())];
            improved = best > current.score;
            let elapsed_ms = ms(started.elapsed());
            for c in &scored {
                if c.is_bc && found.insert(c.formula.canonical_key()) {
                    trace.discoveries.push(BcDiscovery { candidate: c.clone(), run, iteration, elapsed_ms });
                }
            }
            current = scored[pick].clone();
        }
        memory.record_visit(&current.formula);

        stale = if improved { 0 } else { stale + 1 };
        if config.restart_on_stagnation && stale >= RESTART_AFTER {
            current = evaluate(&start, spec, &sat);
            trace.evaluations += 1;
            stale = 0;
        }

        trace.iterations.push(IterationRecord {
            run,
            iteration,
            current_key: current.formula.canonical_key(),
            score: current.score,
            bc_count: trace.discoveries.len(),
            elapsed_ms: ms(started.elapsed()),
        });
    }
    trace.sat_calls = sat.calls();
    trace.sat_cache_hits = sat.cache_hits();
    trace
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub run: usize,
    pub seed: u64,
    pub trace: SearchTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioResult {
    pub runs: Vec<RunOutcome>,
    /// BCs from all runs, one per canonical key, in run order then
    /// discovery order.
    pub merged: Vec<BcDiscovery>,
}

impl PortfolioResult {
    pub fn successes(&self) -> usize {
        self.runs.iter().filter(|r| !r.trace.discoveries.is_empty()).count()
    }

    pub fn mean_bc_count(&self) -> f64 {
        self.runs.iter().map(|r| r.trace.discoveries.len()).sum::<usize>() as f64 / self.runs.len() as f64
    }

    /// Mean time to the first BC over the successful runs.
    pub fn mean_time_to_first_bc_ms(&self) -> Option<f64> {
        let times: Vec<f64> = self.runs.iter().filter_map(|r| r.trace.time_to_first_bc_ms()).collect();
        (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64)
    }

    pub fn smallest_bc(&self) -> Option<usize> {
        self.merged.iter().map(|d| d.candidate.size).min()
    }
}

/// Independent runs with seeds `seed`, `seed + 1`, ..., executed in
/// parallel. Each run has its own random source, tabu memory and SAT cache,
/// so the outcome does not depend on scheduling.
pub fn run_portfolio(spec: &Specification, config: &SearchConfig, runs: usize) -> PortfolioResult {
    assert!(runs >= 1, "a portfolio needs at least one run");
    let outcomes: Vec<RunOutcome> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let seed = config.seed.wrapping_add(run as u64);
            let cfg = SearchConfig { seed, ..config.clone() };
            RunOutcome { run, seed, trace: search_run(spec, &cfg, run) }
        })
        .collect();
    let mut seen = HashSet::new();
    let merged = outcomes
        .iter()
        .flat_map(|o| o.trace.discoveries.iter())
        .filter(|d| seen.insert(d.formula().canonical_key()))
        .cloned()
        .collect();
    PortfolioResult { runs: outcomes, merged }
}

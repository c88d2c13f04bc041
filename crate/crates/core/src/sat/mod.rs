//! LTL satisfiability, implication and equivalence.
//!
//! [`check_sat`] builds a tableau graph over NNF obligations and looks for a
//! reachable strongly connected component in which every postponed until is
//! eventually fulfilled. Satisfiable answers carry a lasso witness.
//! [`bounded_sat`] is an independent brute-force search over short lassos,
//! used as a differential oracle.

mod bounded;
mod nnf;
mod tableau;

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use lru::LruCache;
use thiserror::Error;

use crate::ltl::{Formula, LassoTrace, State, Vocabulary};

pub use bounded::bounded_sat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("satisfiability check exceeded {0} tableau states")]
    StateLimit(usize),
    #[error("satisfiability check exceeded its time budget")]
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, Default)]
pub struct SatStats {
    pub states: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SatResult {
    pub verdict: Verdict,
    /// Present iff the verdict is `Sat`.
    pub witness: Option<LassoTrace>,
    pub stats: SatStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatLimits {
    pub max_states: usize,
    /// Wall-clock budget for one check; `None` means unbounded.
    pub time_budget: Option<Duration>,
}

impl Default for SatLimits {
    fn default() -> Self {
        SatLimits { max_states: 1 << 20, time_budget: Some(Duration::from_secs(10)) }
    }
}

pub fn check_sat(f: &Formula, vocabulary: &Vocabulary) -> Result<SatResult, SatError> {
    check_sat_with(f, vocabulary, &SatLimits::default())
}

/// The vocabulary only bounds which variables a witness may mention; the
/// witness sets exactly the variables of `f` that it needs.
pub fn check_sat_with(f: &Formula, _vocabulary: &Vocabulary, limits: &SatLimits) -> Result<SatResult, SatError> {
    let started = Instant::now();
    let mut arena = nnf::Arena::new();
    let root = arena.translate(f, true);
    let tl = tableau::Limits { max_states: limits.max_states, deadline: limits.time_budget.map(|d| started + d) };
    let search = tableau::search(&arena, root, &tl)?;
    let stats = SatStats { states: search.graph.nodes.len(), elapsed: started.elapsed() };
    let Some((stem, cycle)) = search.lasso else {
        return Ok(SatResult { verdict: Verdict::Unsat, witness: None, stats });
    };
    let label = |&(n, i): &(usize, usize)| -> State {
        search.graph.edges[n][i].true_vars.iter().map(|&v| arena.vars[v as usize].clone()).collect()
    };
    let witness = LassoTrace::new(stem.iter().map(label).collect(), cycle.iter().map(label).collect());
    debug_assert!(witness.eval(f, 0), "tableau witness {witness} does not satisfy {f}");
    Ok(SatResult { verdict: Verdict::Sat, witness: Some(witness), stats })
}

/// Satisfiability service with an LRU verdict cache keyed by canonical key.
///
/// Budget-exhausted checks are never cached.
pub struct SatSolver {
    limits: SatLimits,
    cache: Option<Mutex<LruCache<String, bool>>>,
    calls: AtomicU64,
    hits: AtomicU64,
}

pub const DEFAULT_CACHE_CAPACITY: usize = 100_000;

impl SatSolver {
    pub fn new(limits: SatLimits, cache_capacity: usize) -> Self {
        let cache = NonZeroUsize::new(cache_capacity).map(|c| Mutex::new(LruCache::new(c)));
        SatSolver { limits, cache, calls: AtomicU64::new(0), hits: AtomicU64::new(0) }
    }

    /// A solver that always runs the checker.
    pub fn uncached(limits: SatLimits) -> Self {
        Self::new(limits, 0)
    }

    pub fn limits(&self) -> &SatLimits {
        &self.limits
    }

    /// Number of queries answered, including cache hits.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn is_sat(&self, f: &Formula) -> Result<bool, SatError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let key = self.cache.as_ref().map(|_| f.canonical_key());
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(&v) = cache.lock().expect("sat cache poisoned").get(key) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(v);
            }
        }
        let verdict = check_sat_with(f, &Vocabulary::new(), &self.limits)?.verdict == Verdict::Sat;
        if let (Some(cache), Some(key)) = (&self.cache, key) {
            cache.lock().expect("sat cache poisoned").put(key, verdict);
        }
        Ok(verdict)
    }

    /// `a` implies `b` iff `a & !b` is unsatisfiable.
    pub fn implies(&self, a: &Formula, b: &Formula) -> Result<bool, SatError> {
        Ok(!self.is_sat(&a.clone().and(b.clone().not()))?)
    }

    pub fn equivalent(&self, a: &Formula, b: &Formula) -> Result<bool, SatError> {
        Ok(self.implies(a, b)? && self.implies(b, a)?)
    }
}

impl Default for SatSolver {
    fn default() -> Self {
        SatSolver::new(SatLimits::default(), DEFAULT_CACHE_CAPACITY)
    }
}

pub fn implies(a: &Formula, b: &Formula) -> Result<bool, SatError> {
    SatSolver::uncached(SatLimits::default()).implies(a, b)
}

pub fn equivalent(a: &Formula, b: &Formula) -> Result<bool, SatError> {
    SatSolver::uncached(SatLimits::default()).equivalent(a, b)
}

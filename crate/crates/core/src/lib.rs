//! Boundary-condition discovery for LTL goal specifications.
//!
//! A boundary condition is a satisfiable situation under which the goals,
//! together with the domain properties, can no longer be met at the same
//! time even though each proper subset of them can. This crate provides the
//! pieces to find them by tabu local search over formula edits: an LTL
//! front end, a satisfiability checker, tree edit distance, the edit
//! neighborhood, the fitness function, the search loop and corpus analysis.

pub mod analysis;
pub mod cases;
pub mod files;
pub mod ltl;
pub mod neighborhood;
pub mod objective;
pub mod random;
pub mod sat;
pub mod search;
pub mod treedist;

pub use ltl::{parse, Formula, LassoTrace, ParseError, Specification, Vocabulary};
pub use objective::{evaluate, trivial_condition, ScoredCandidate};
pub use sat::{check_sat, SatError, SatLimits, SatSolver, Verdict};
pub use search::{run_portfolio, run_search, SearchConfig, SearchTrace};

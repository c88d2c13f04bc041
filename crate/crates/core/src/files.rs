//! JSON specification and result documents.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{is_identifier, parse_with, Named, ParseError, ParseOptions, Specification, Vocabulary};
use crate::objective::ScoredCandidate;
use crate::sat::SatLimits;
use crate::search::{PortfolioResult, SearchConfig};
use crate::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedText {
    pub name: String,
    pub formula: String,
}

/// A specification as written on disk. Formulae are strings in the
/// concrete syntax of [`crate::ltl::parse`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub name: String,
    /// When present, formulae may only use these variables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    #[serde(default)]
    pub domains: Vec<NamedText>,
    pub goals: Vec<NamedText>,
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: malformed JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{item}: {source}")]
    Formula { item: String, source: ParseError },
    #[error("`{0}` is not a valid variable name")]
    BadVariable(String),
    #[error("specification `{0}` has no goals")]
    NoGoals(String),
    #[error("{0}")]
    Invalid(String),
}

impl SpecFile {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|source| FileError::Json { path: origin.to_string(), source })
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        Self::from_json(&read(path)?, &path.display().to_string())
    }

    pub fn to_specification(&self) -> Result<Specification, FileError> {
        let declared: Option<Vocabulary> = match &self.variables {
            Some(vs) => {
                if let Some(bad) = vs.iter().find(|v| !is_identifier(v)) {
                    return Err(FileError::BadVariable(bad.clone()));
                }
                Some(vs.iter().cloned().collect())
            }
            None => None,
        };
        let opts = ParseOptions { vocabulary: declared.as_ref(), desugar_implication: false };
        let parse_all = |items: &[NamedText], kind: &str| -> Result<Vec<Named>, FileError> {
            items
                .iter()
                .map(|n| {
                    parse_with(&n.formula, opts)
                        .map(|f| Named::new(n.name.clone(), f))
                        .map_err(|source| FileError::Formula { item: format!("{kind} `{}`", n.name), source })
                })
                .collect()
        };
        let domains = parse_all(&self.domains, "domain property")?;
        let goals = parse_all(&self.goals, "goal")?;
        Specification::new(self.name.clone(), domains, goals, declared.unwrap_or_default())
            .map_err(|_| FileError::NoGoals(self.name.clone()))
    }

    pub fn from_specification(spec: &Specification) -> Self {
        let text = |ns: &[Named]| {
            ns.iter().map(|n| NamedText { name: n.name.clone(), formula: n.formula.to_string() }).collect()
        };
        SpecFile {
            name: spec.name.clone(),
            variables: Some(spec.vocabulary.iter().cloned().collect()),
            domains: text(&spec.domains),
            goals: text(&spec.goals),
        }
    }
}

fn read(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|source| FileError::Io { path: path.display().to_string(), source })
}

/// The search settings that shaped a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub tabu: usize,
    pub seed: u64,
    pub cutoff_ms: u64,
    pub runs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_formula_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcRecord {
    pub formula: Formula,
    pub li: bool,
    pub min: Vec<bool>,
    pub nt: bool,
    pub size: usize,
    pub score: f64,
    pub run: usize,
    pub iteration: u64,
    pub discovery_ms: f64,
}

impl BcRecord {
    pub fn from_candidate(c: &ScoredCandidate, run: usize, iteration: u64, discovery_ms: f64) -> Self {
        BcRecord {
            formula: c.formula.clone(),
            li: c.li,
            min: c.min.clone(),
            nt: c.nt,
            size: c.size,
            score: c.score,
            run,
            iteration,
            discovery_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub num_bc: usize,
    /// Mean time to the first BC over successful runs.
    pub t_fbc_ms: Option<f64>,
    /// Size of the smallest BC.
    pub s_bbc: Option<usize>,
    pub success: bool,
    pub successful_runs: usize,
    pub mean_bc_per_run: f64,
}

/// What a search run leaves on disk. The specification travels with the
/// BCs so that they can be re-checked without the original file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub spec_name: String,
    pub spec: SpecFile,
    pub config: ConfigEcho,
    pub bcs: Vec<BcRecord>,
    pub summary: Summary,
}

impl ResultFile {
    pub fn from_portfolio(spec: &SpecFile, config: &SearchConfig, runs: usize, result: &PortfolioResult) -> Self {
        let bcs: Vec<BcRecord> = result
            .merged
            .iter()
            .map(|d| BcRecord::from_candidate(&d.candidate, d.run, d.iteration, d.elapsed_ms))
            .collect();
        ResultFile {
            spec_name: spec.name.clone(),
            spec: spec.clone(),
            config: ConfigEcho {
                k: config.k,
                tabu: config.tabu_tenure,
                seed: config.seed,
                cutoff_ms: config.cutoff.as_millis() as u64,
                runs,
                max_formula_size: config.max_formula_size,
            },
            summary: Summary {
                num_bc: bcs.len(),
                t_fbc_ms: result.mean_time_to_first_bc_ms(),
                s_bbc: result.smallest_bc(),
                success: !bcs.is_empty(),
                successful_runs: result.successes(),
                mean_bc_per_run: result.mean_bc_count(),
            },
            bcs,
        }
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, FileError> {
        let r: ResultFile =
            serde_json::from_str(text).map_err(|source| FileError::Json { path: origin.to_string(), source })?;
        if r.summary.num_bc != r.bcs.len() {
            return Err(FileError::Invalid(format!(
                "{origin}: summary counts {} BCs but {} are listed",
                r.summary.num_bc,
                r.bcs.len()
            )));
        }
        Ok(r)
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        Self::from_json(&read(path)?, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// The BC list with discovery times zeroed, for run-to-run comparison.
    pub fn normalized_bcs_json(&self) -> String {
        let bcs: Vec<BcRecord> = self.bcs.iter().cloned().map(|b| BcRecord { discovery_ms: 0.0, ..b }).collect();
        serde_json::to_string(&bcs).expect("bcs serialize")
    }

    /// Indices of listed BCs that fail a fresh check against the embedded
    /// specification.
    pub fn failing_bcs(&self, limits: &SatLimits) -> Result<Vec<usize>, FileError> {
        let spec = self.spec.to_specification()?;
        Ok(self
            .bcs
            .iter()
            .enumerate()
            .filter(|(_, b)| !crate::objective::recheck_bc(&b.formula, &spec, limits))
            .map(|(i, _)| i)
            .collect())
    }
}

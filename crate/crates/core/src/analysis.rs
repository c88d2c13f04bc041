//! Analysis of a set of found BCs: deduplication, the most general subset
//! and structural similarity statistics.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ltl::Formula;
use crate::sat::SatSolver;
use crate::search::SearchTrace;
use crate::treedist::{decomposed_distance, normalized_distance, Decomposed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub formula: Formula,
    /// Where the entry came from, e.g. a result file name.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration: Option<u64>,
}

impl CorpusEntry {
    pub fn new(formula: Formula, source: impl Into<String>) -> Self {
        CorpusEntry { formula, source: source.into(), run: None, iteration: None }
    }
}

/// BCs with distinct canonical keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BcCorpus {
    pub entries: Vec<CorpusEntry>,
    /// Set when an equivalence check ran out of budget and the pair was
    /// kept apart.
    pub flagged: bool,
}

impl BcCorpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn formulas(&self) -> Vec<Formula> {
        self.entries.iter().map(|e| e.formula.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DedupMode {
    Syntactic,
    Semantic,
}

/// Smaller first, then lexicographic canonical key.
fn preferred(a: &Formula, b: &Formula) -> bool {
    (a.size(), a.canonical_key()) < (b.size(), b.canonical_key())
}

/// Removes repeated BCs. Syntactic mode keeps the first entry per canonical
/// key. Semantic mode also merges logically equivalent entries into one
/// class, represented by its preferred member; classes keep the position of
/// their first member.
pub fn dedup(raw: Vec<CorpusEntry>, mode: DedupMode, sat: &SatSolver) -> BcCorpus {
    let mut seen = HashSet::new();
    let unique: Vec<CorpusEntry> = raw.into_iter().filter(|e| seen.insert(e.formula.canonical_key())).collect();
    if mode == DedupMode::Syntactic {
        return BcCorpus { entries: unique, flagged: false };
    }
    let mut flagged = false;
    let mut classes: Vec<CorpusEntry> = Vec::new();
    for e in unique {
        let mut merged = false;
        for rep in classes.iter_mut() {
            match sat.equivalent(&rep.formula, &e.formula) {
                Ok(true) => {
                    if preferred(&e.formula, &rep.formula) {
                        *rep = e.clone();
                    }
                    merged = true;
                    break;
                }
                Ok(false) => {}
                Err(_) => flagged = true,
            }
        }
        if !merged {
            classes.push(e);
        }
    }
    BcCorpus { entries: classes, flagged }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralSet {
    pub members: Vec<Formula>,
    /// Some implication check ran out of budget and was read as "no".
    pub approximate: bool,
}

/// The most general BCs: equivalent entries are collapsed to one
/// representative, then the maximal elements under implication are kept.
/// Every corpus entry implies some member, and no member implies another.
pub fn most_general_set(corpus: &BcCorpus, sat: &SatSolver) -> GeneralSet {
    let collapsed = dedup(corpus.entries.clone(), DedupMode::Semantic, sat);
    let fs = collapsed.formulas();
    let n = fs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let results: Vec<(usize, usize, Option<bool>)> =
        pairs.par_iter().map(|&(i, j)| (i, j, sat.implies(&fs[i], &fs[j]).ok())).collect();
    let mut implies = vec![vec![false; n]; n];
    let mut approximate = collapsed.flagged;
    for (i, j, r) in results {
        match r {
            Some(v) => implies[i][j] = v,
            None => approximate = true,
        }
    }
    let members =
        (0..n).filter(|&i| !(0..n).any(|j| j != i && implies[i][j] && !implies[j][i])).map(|i| fs[i].clone()).collect();
    GeneralSet { members, approximate }
}

pub const DELTA_THRESHOLDS: [usize; 3] = [1, 2, 3];
/// Normalized thresholds as tenths.
pub const NORM_THRESHOLDS: [usize; 3] = [1, 2, 3];

/// Share of BCs with a similar neighbor and mean neighbor counts, for
/// absolute (`delta`) and normalized (`norm`) distance thresholds.
/// Percentages are in `[0, 100]`. A BC is never counted as similar to itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub pct_bc_delta: BTreeMap<String, f64>,
    pub num_sim_delta: BTreeMap<String, f64>,
    pub pct_bc_norm: BTreeMap<String, f64>,
    pub num_sim_norm: BTreeMap<String, f64>,
    /// Mean distance from each BC to its closest other BC.
    pub avg_min: Option<f64>,
    pub total: usize,
}

fn norm_label(tenths: usize) -> String {
    format!("0.{tenths}")
}

struct Row {
    delta_counts: [usize; 3],
    norm_counts: [usize; 3],
    min: Option<usize>,
}

pub fn similarity_report(formulas: &[Formula]) -> SimilarityReport {
    let trees: Vec<Decomposed> = formulas.par_iter().map(Decomposed::from_formula).collect();
    let sizes: Vec<usize> = formulas.iter().map(Formula::size).collect();
    // One row at a time, so memory stays linear in the corpus size.
    let rows: Vec<Row> = (0..formulas.len())
        .into_par_iter()
        .map(|i| {
            let mut row = Row { delta_counts: [0; 3], norm_counts: [0; 3], min: None };
            for j in (0..formulas.len()).filter(|&j| j != i) {
                let d = decomposed_distance(&trees[i], &trees[j]);
                let den = sizes[i] + sizes[j];
                for (c, &l) in row.delta_counts.iter_mut().zip(&DELTA_THRESHOLDS) {
                    *c += usize::from(d <= l);
                }
                for (c, &k) in row.norm_counts.iter_mut().zip(&NORM_THRESHOLDS) {
                    *c += usize::from(d * 10 <= k * den);
                }
                row.min = Some(row.min.map_or(d, |m| m.min(d)));
            }
            row
        })
        .collect();

    let total = formulas.len();
    let pct = |has: usize| if total == 0 { 0.0 } else { 100.0 * has as f64 / total as f64 };
    let mean = |sum: usize| if total == 0 { 0.0 } else { sum as f64 / total as f64 };
    let mut report = SimilarityReport {
        pct_bc_delta: BTreeMap::new(),
        num_sim_delta: BTreeMap::new(),
        pct_bc_norm: BTreeMap::new(),
        num_sim_norm: BTreeMap::new(),
        avg_min: None,
        total,
    };
    for (t, &l) in DELTA_THRESHOLDS.iter().enumerate() {
        let has = rows.iter().filter(|r| r.delta_counts[t] > 0).count();
        let sum = rows.iter().map(|r| r.delta_counts[t]).sum();
        report.pct_bc_delta.insert(l.to_string(), pct(has));
        report.num_sim_delta.insert(l.to_string(), mean(sum));
    }
    for (t, &k) in NORM_THRESHOLDS.iter().enumerate() {
        let has = rows.iter().filter(|r| r.norm_counts[t] > 0).count();
        let sum = rows.iter().map(|r| r.norm_counts[t]).sum();
        report.pct_bc_norm.insert(norm_label(k), pct(has));
        report.num_sim_norm.insert(norm_label(k), mean(sum));
    }
    if total >= 2 {
        let sum: usize = rows.iter().map(|r| r.min.expect("other BCs exist")).sum();
        report.avg_min = Some(sum as f64 / total as f64);
    }
    report
}

impl SimilarityReport {
    pub const CSV_HEADER: &'static str = "case,pct_bc_delta_1,pct_bc_delta_2,pct_bc_delta_3,\
num_sim_delta_1,num_sim_delta_2,num_sim_delta_3,\
pct_bc_norm_0.1,pct_bc_norm_0.2,pct_bc_norm_0.3,\
num_sim_norm_0.1,num_sim_norm_0.2,num_sim_norm_0.3,avg_min,total";

    /// One CSV line in the column order of [`Self::CSV_HEADER`].
    pub fn csv_row(&self, case: &str) -> String {
        let mut cols = vec![case.to_string()];
        let delta = |m: &BTreeMap<String, f64>, digits: usize| -> Vec<String> {
            DELTA_THRESHOLDS.iter().map(|l| format!("{:.*}", digits, m[&l.to_string()])).collect()
        };
        let norm = |m: &BTreeMap<String, f64>, digits: usize| -> Vec<String> {
            NORM_THRESHOLDS.iter().map(|&k| format!("{:.*}", digits, m[&norm_label(k)])).collect()
        };
        cols.extend(delta(&self.pct_bc_delta, 1));
        cols.extend(delta(&self.num_sim_delta, 1));
        cols.extend(norm(&self.pct_bc_norm, 1));
        cols.extend(norm(&self.num_sim_norm, 1));
        cols.push(self.avg_min.map(|v| format!("{v:.1}")).unwrap_or_default());
        cols.push(self.total.to_string());
        cols.join(",")
    }
}

/// Mean distance and mean normalized distance between consecutive BCs.
/// `None` for fewer than two BCs.
pub fn consecutive_distances(bcs: &[Formula]) -> Option<(f64, f64)> {
    if bcs.len() < 2 {
        return None;
    }
    let pairs = bcs.len() - 1;
    let (d, n) = bcs.windows(2).fold((0usize, 0.0f64), |(d, n), w| {
        let r = normalized_distance(&w[0], &w[1]);
        (d + r.num, n + r.as_f64())
    });
    Some((d as f64 / pairs as f64, n / pairs as f64))
}

/// [`consecutive_distances`] over the BCs of a trace in discovery order.
pub fn consecutive_similarity(trace: &SearchTrace) -> Option<(f64, f64)> {
    let bcs: Vec<Formula> = trace.discoveries.iter().map(|d| d.formula().clone()).collect();
    consecutive_distances(&bcs)
}

use std::collections::BTreeSet;

use thiserror::Error;

use super::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub formula: Formula,
}

impl Named {
    pub fn new(name: impl Into<String>, formula: Formula) -> Self {
        Named { name: name.into(), formula }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("specification `{0}` has no goals")]
    NoGoals(String),
}

/// Domain properties and an ordered list of goals over a shared vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specification {
    pub name: String,
    pub domains: Vec<Named>,
    pub goals: Vec<Named>,
    pub vocabulary: BTreeSet<String>,
}

impl Specification {
    /// Builds a specification; the vocabulary is the union of `declared` and
    /// every variable used in a formula.
    pub fn new(
        name: impl Into<String>,
        domains: Vec<Named>,
        goals: Vec<Named>,
        declared: impl IntoIterator<Item = String>,
    ) -> Result<Self, SpecError> {
        let name = name.into();
        if goals.is_empty() {
            return Err(SpecError::NoGoals(name));
        }
        let mut vocabulary: BTreeSet<String> = declared.into_iter().collect();
        for n in domains.iter().chain(goals.iter()) {
            n.formula.collect_vars(&mut vocabulary);
        }
        Ok(Specification { name, domains, goals, vocabulary })
    }

    /// Conjunction of the domain properties (`true` when there are none).
    pub fn domain(&self) -> Formula {
        Formula::conjunction(self.domains.iter().map(|d| d.formula.clone()))
    }

    /// Conjunction of all goals.
    pub fn goal_conjunction(&self) -> Formula {
        Formula::conjunction(self.goals.iter().map(|g| g.formula.clone()))
    }

    /// Conjunction of every goal except the `i`-th (`true` for a single goal).
    pub fn goals_without(&self, i: usize) -> Formula {
        Formula::conjunction(self.goals.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.formula.clone()))
    }

    /// Total node count over all domain and goal formulae.
    pub fn total_size(&self) -> usize {
        self.domains.iter().chain(self.goals.iter()).map(|n| n.formula.size()).sum()
    }
}

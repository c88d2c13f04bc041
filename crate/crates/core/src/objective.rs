//! The boundary-condition predicate and the search fitness function.
//!
//! For a candidate `phi` over domain `Dom` and goals `G1..Gn`:
//! * `li = 1` when `Dom & G & phi` is unsatisfiable (logical inconsistency),
//! * `min_i = 1/n` when `Dom & G_{-i} & phi` is satisfiable (minimality),
//! * `nt = 0.5` when `phi` is not equivalent to `!G` (non-triviality),
//!
//! and the score is `li + sum(min_i) + nt + 1/|phi|`.

use serde::{Deserialize, Serialize};

use crate::ltl::{Formula, Specification};
use crate::sat::{SatError, SatSolver};

/// `!(G1 & (G2 & ... & Gn))`, where the search starts.
pub fn trivial_condition(spec: &Specification) -> Formula {
    spec.goal_conjunction().not()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub formula: Formula,
    pub li: bool,
    /// Whether minimality holds for each goal index.
    pub min: Vec<bool>,
    pub nt: bool,
    pub size: usize,
    pub score: f64,
    pub is_bc: bool,
    /// Satisfiability queries issued for this candidate, cache hits included.
    pub sat_calls: usize,
    pub budget_exhausted: bool,
}

impl ScoredCandidate {
    pub fn goal_count(&self) -> usize {
        self.min.len()
    }

    /// Per-goal minimality terms, each `0` or `1/|G|`.
    pub fn min_vector(&self) -> Vec<f64> {
        let w = 1.0 / self.goal_count() as f64;
        self.min.iter().map(|&m| if m { w } else { 0.0 }).collect()
    }

    pub fn li_term(&self) -> f64 {
        if self.li {
            1.0
        } else {
            0.0
        }
    }

    pub fn min_term(&self) -> f64 {
        self.min.iter().filter(|&&m| m).count() as f64 / self.goal_count() as f64
    }

    pub fn nt_term(&self) -> f64 {
        if self.nt {
            0.5
        } else {
            0.0
        }
    }

    pub fn size_term(&self) -> f64 {
        1.0 / self.size as f64
    }
}

fn conj(parts: &[&Formula]) -> Formula {
    Formula::conjunction(parts.iter().map(|f| (*f).clone()))
}

/// Scores `phi` against `spec`.
///
/// A query that runs out of budget counts as a failed component and marks
/// the candidate exhausted, so it can never be reported as a BC.
pub fn evaluate(phi: &Formula, spec: &Specification, sat: &SatSolver) -> ScoredCandidate {
    let mut calls = 0usize;
    let mut exhausted = false;
    let mut query = |f: Formula| -> Option<bool> {
        calls += 1;
        match sat.is_sat(&f) {
            Ok(v) => Some(v),
            Err(SatError::StateLimit(_) | SatError::Timeout) => {
                exhausted = true;
                None
            }
        }
    };

    let domains: Vec<&Formula> = spec.domains.iter().map(|d| &d.formula).collect();
    let goals: Vec<&Formula> = spec.goals.iter().map(|g| &g.formula).collect();

    let mut all = domains.clone();
    all.extend(goals.iter().copied());
    all.push(phi);
    let joint = query(conj(&all));
    let li = joint == Some(false);

    // If Dom & G & phi is satisfiable then so is G & phi, hence phi differs from !G.
    let nt = if joint == Some(true) {
        true
    } else {
        let g = spec.goal_conjunction();
        query(g.clone().and(phi.clone())) == Some(true) || query(g.not().and(phi.clone().not())) == Some(true)
    };

    let min = (0..goals.len())
        .map(|i| {
            let mut parts = domains.clone();
            parts.extend(goals.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| *g));
            parts.push(phi);
            query(conj(&parts)) == Some(true)
        })
        .collect::<Vec<bool>>();

    let size = phi.size();
    let hits = min.iter().filter(|&&m| m).count();
    let score =
        f64::from(u8::from(li)) + hits as f64 / goals.len() as f64 + if nt { 0.5 } else { 0.0 } + 1.0 / size as f64;
    let is_bc = li && hits == goals.len() && nt && !exhausted;
    ScoredCandidate {
        formula: phi.clone(),
        li,
        min,
        nt,
        size,
        score,
        is_bc,
        sat_calls: calls,
        budget_exhausted: exhausted,
    }
}

/// Definition check with a fresh, uncached solver.
pub fn recheck_bc(phi: &Formula, spec: &Specification, sat_limits: &crate::sat::SatLimits) -> bool {
    evaluate(phi, spec, &SatSolver::uncached(*sat_limits)).is_bc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse, Named};
    use crate::sat::SatLimits;

    fn minepump() -> Specification {
        Specification::new(
            "MinePump",
            vec![Named::new("PumpEffect", parse("G((p & X p) -> X X !h)").unwrap())],
            vec![
                Named::new("NoFlooding", parse("G(h -> X p)").unwrap()),
                Named::new("NoExplosion", parse("G(m -> X !p)").unwrap()),
            ],
            Vec::new(),
        )
        .unwrap()
    }

    fn eval(s: &str) -> ScoredCandidate {
        evaluate(&parse(s).unwrap(), &minepump(), &SatSolver::default())
    }

    #[test]
    fn trivial_condition_shape() {
        let spec = minepump();
        let t = trivial_condition(&spec);
        assert_eq!(t, parse("!(G(h -> X p) & G(m -> X !p))").unwrap());
        assert_eq!(t.size(), 5 + 6 + 1 + 1);
        let single = Specification::new("one", vec![], vec![spec.goals[0].clone()], Vec::new()).unwrap();
        assert_eq!(trivial_condition(&single), spec.goals[0].formula.clone().not());
    }

    #[test]
    fn eventually_both_is_a_bc() {
        let c = eval("F(h & m)");
        assert!(c.li && c.nt && c.is_bc);
        assert_eq!(c.min_vector(), vec![0.5, 0.5]);
        assert_eq!(c.score, 1.0 + 1.0 + 0.5 + 0.25);
    }

    #[test]
    fn always_both_breaks_minimality() {
        // The domain property forbids h after two pump steps, and NoFlooding
        // keeps the pump running while h holds.
        let c = eval("G(h & m)");
        assert!(c.li && c.nt);
        assert_eq!(c.min_vector(), vec![0.5, 0.0]);
        assert!(!c.is_bc);
        assert_eq!(c.score, 1.0 + 0.5 + 0.5 + 0.25);
    }

    #[test]
    fn trivial_and_false_are_rejected() {
        let t = evaluate(&trivial_condition(&minepump()), &minepump(), &SatSolver::default());
        assert!(t.li && !t.nt && !t.is_bc);
        assert_eq!(t.min, vec![true, true]);
        let f = eval("false");
        assert!(f.li && f.nt && !f.is_bc);
        assert_eq!(f.min_vector(), vec![0.0, 0.0]);
    }

    #[test]
    fn single_goal_minimality_uses_domain_only() {
        let spec = Specification::new(
            "one",
            vec![Named::new("d", parse("G(a -> X !b)").unwrap())],
            vec![Named::new("g", parse("G b").unwrap())],
            Vec::new(),
        )
        .unwrap();
        let c = evaluate(&parse("F a").unwrap(), &spec, &SatSolver::default());
        assert!(c.li && c.min == vec![true] && c.nt && c.is_bc);
    }

    #[test]
    fn smaller_wins_ties() {
        let a = eval("F(h & m)");
        let b = eval("F(m & h & h)");
        assert_eq!((a.li, &a.min, a.nt), (b.li, &b.min, b.nt));
        assert!(a.score > b.score);
    }

    #[test]
    fn exhausted_budget_is_never_a_bc() {
        let tiny = SatSolver::uncached(SatLimits { max_states: 1, time_budget: None });
        let c = evaluate(&parse("F(h & m)").unwrap(), &minepump(), &tiny);
        assert!(c.budget_exhausted && !c.is_bc);
    }

    #[test]
    fn recheck_matches_evaluate() {
        let limits = SatLimits::default();
        assert!(recheck_bc(&parse("F(h & m)").unwrap(), &minepump(), &limits));
        assert!(!recheck_bc(&parse("G(h & m)").unwrap(), &minepump(), &limits));
    }
}

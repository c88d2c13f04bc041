//! Brute-force bounded lasso search.
//!
//! Enumerates lassos by total length, then prefix length, then loop states
//! (lexicographic on state bitmasks), then prefix states. For each loop the
//! truth vector of every subformula at the loop entry comes from the lasso
//! evaluator; prefixes are handled by a backward sweep of the one-step
//! unfolding, so every prefix is covered without listing them one by one.
//! Finding nothing says nothing about unsatisfiability.

use std::collections::{BTreeSet, HashSet};

use crate::ltl::{BinaryOp, Formula, LassoTrace, State, TruthTable, UnaryOp, Vocabulary};

enum Op {
    Const(bool),
    Var(usize),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
}

fn flatten(f: &Formula, vars: &[String], out: &mut Vec<Op>) -> usize {
    let op = match f {
        Formula::Const(b) => Op::Const(*b),
        Formula::Var(v) => Op::Var(vars.iter().position(|x| x == v).expect("variable in vocabulary")),
        Formula::Unary(o, c) => {
            let c = flatten(c, vars, out);
            Op::Unary(*o, c)
        }
        Formula::Binary(o, l, r) => {
            let l = flatten(l, vars, out);
            let r = flatten(r, vars, out);
            Op::Binary(*o, l, r)
        }
    };
    out.push(op);
    out.len() - 1
}

/// Truth vector at a prefix position from its state and the vector of the
/// following position.
fn step(ops: &[Op], state: u32, next: &[bool]) -> Vec<bool> {
    let mut cur: Vec<bool> = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        let v = match *op {
            Op::Const(b) => b,
            Op::Var(k) => state >> k & 1 == 1,
            Op::Unary(UnaryOp::Not, c) => !cur[c],
            Op::Unary(UnaryOp::Next, c) => next[c],
            Op::Unary(UnaryOp::Globally, c) => cur[c] && next[i],
            Op::Unary(UnaryOp::Finally, c) => cur[c] || next[i],
            Op::Binary(BinaryOp::And, a, b) => cur[a] && cur[b],
            Op::Binary(BinaryOp::Or, a, b) => cur[a] || cur[b],
            Op::Binary(BinaryOp::Implies, a, b) => !cur[a] || cur[b],
            Op::Binary(BinaryOp::Until, a, b) | Op::Binary(BinaryOp::WeakUntil, a, b) => cur[b] || (cur[a] && next[i]),
            Op::Binary(BinaryOp::Release, a, b) => cur[b] && (cur[a] || next[i]),
        };
        cur.push(v);
    }
    cur
}

fn to_state(mask: u32, vars: &[String]) -> State {
    vars.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, v)| v.clone()).collect()
}

/// First lasso (in enumeration order) with `|prefix| <= max_prefix` and
/// `1 <= |loop| <= max_loop` that satisfies `f`, if any.
///
/// # Panics
/// If the vocabulary has more than 16 variables.
pub fn bounded_sat(f: &Formula, vocabulary: &Vocabulary, max_prefix: usize, max_loop: usize) -> Option<LassoTrace> {
    let mut all: BTreeSet<String> = vocabulary.clone();
    all.extend(f.variables());
    let vars: Vec<String> = all.into_iter().collect();
    assert!(vars.len() <= 16, "bounded search over {} variables is not practical", vars.len());
    let n_states = 1u32 << vars.len();
    let mut ops = Vec::new();
    let root = flatten(f, &vars, &mut ops);

    let mut failed: HashSet<(usize, Vec<bool>)> = HashSet::new();
    for total in 1..=max_prefix + max_loop {
        for plen in 0..=max_prefix.min(total - 1) {
            let llen = total - plen;
            if llen > max_loop || llen == 0 {
                continue;
            }
            let mut masks = vec![0u32; llen];
            loop {
                let table = TruthTable::build(f, llen, 0, |pos, var| {
                    let k = vars.iter().position(|x| x == var).expect("variable in vocabulary");
                    masks[pos] >> k & 1 == 1
                });
                let entry = table.column(0);
                if !failed.contains(&(plen, entry.clone())) {
                    if let Some(prefix) = find_prefix(&ops, root, n_states, plen, &entry) {
                        return Some(LassoTrace::new(
                            prefix.into_iter().map(|m| to_state(m, &vars)).collect(),
                            masks.iter().map(|&m| to_state(m, &vars)).collect(),
                        ));
                    }
                    failed.insert((plen, entry));
                }
                // Next loop in lexicographic order, first state most significant.
                let mut k = llen;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    masks[k] += 1;
                    if masks[k] < n_states {
                        break;
                    }
                    masks[k] = 0;
                    if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if k == usize::MAX {
                    break;
                }
            }
        }
    }
    None
}

/// Lexicographically smallest prefix of length `plen` leading into a loop
/// whose entry vector is `entry` such that the root holds at position 0.
fn find_prefix(ops: &[Op], root: usize, n_states: u32, plen: usize, entry: &[bool]) -> Option<Vec<u32>> {
    // levels[j] = truth vectors achievable at position j.
    let mut levels: Vec<HashSet<Vec<bool>>> = vec![HashSet::new(); plen + 1];
    levels[plen].insert(entry.to_vec());
    for j in (0..plen).rev() {
        let mut here = HashSet::new();
        for next in &levels[j + 1] {
            for s in 0..n_states {
                here.insert(step(ops, s, next));
            }
        }
        levels[j] = here;
    }
    let mut allowed: HashSet<Vec<bool>> = levels[0].iter().filter(|v| v[root]).cloned().collect();
    if allowed.is_empty() {
        return None;
    }
    let mut prefix = Vec::with_capacity(plen);
    for j in 0..plen {
        let mut chosen = None;
        for s in 0..n_states {
            let compatible: HashSet<Vec<bool>> =
                levels[j + 1].iter().filter(|v| allowed.contains(&step(ops, s, v))).cloned().collect();
            if !compatible.is_empty() {
                chosen = Some((s, compatible));
                break;
            }
        }
        let (s, compatible) = chosen.expect("backward sweep guarantees a compatible state");
        prefix.push(s);
        allowed = compatible;
    }
    Some(prefix)
}

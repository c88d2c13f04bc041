use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::formula::{BinaryOp, Formula, UnaryOp};

/// Variables that hold in one state of a trace.
pub type State = BTreeSet<String>;

/// An ultimately periodic word: `prefix` once, then `loop_states` forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoTrace {
    pub prefix: Vec<State>,
    #[serde(rename = "loop")]
    pub loop_states: Vec<State>,
}

impl LassoTrace {
    /// # Panics
    /// If `loop_states` is empty.
    pub fn new(prefix: Vec<State>, loop_states: Vec<State>) -> Self {
        assert!(!loop_states.is_empty(), "lasso loop must contain at least one state");
        LassoTrace { prefix, loop_states }
    }

    /// Number of distinct positions (`|prefix| + |loop|`).
    pub fn len(&self) -> usize {
        self.prefix.len() + self.loop_states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Folds an arbitrary position onto the finite representation.
    pub fn normalize(&self, i: usize) -> usize {
        let p = self.prefix.len();
        if i < self.len() {
            i
        } else {
            p + (i - p) % self.loop_states.len()
        }
    }

    pub fn state(&self, i: usize) -> &State {
        let i = self.normalize(i);
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.loop_states[i - self.prefix.len()]
        }
    }

    /// Truth of `f` at position `i`. Variables absent from a state are false.
    pub fn eval(&self, f: &Formula, i: usize) -> bool {
        let table = TruthTable::build(f, self.len(), self.prefix.len(), |pos, var| self.state(pos).contains(var));
        table.root()[self.normalize(i)]
    }
}

impl fmt::Display for LassoTrace {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &State| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","));
        let prefix: Vec<String> = self.prefix.iter().map(show).collect();
        let lp: Vec<String> = self.loop_states.iter().map(show).collect();
        write!(out, "{} ({})^w", prefix.join(" "), lp.join(" "))
    }
}

/// Convenience wrapper over [`LassoTrace::eval`].
pub fn eval_on_lasso(f: &Formula, trace: &LassoTrace, i: usize) -> bool {
    trace.eval(f, i)
}

/// Truth values of every subformula at every position of a lasso.
///
/// Nodes are stored in post-order; the last node is the root. Positions are
/// `0..len` and the successor of `len - 1` is `loop_start`. Fixpoint
/// operators are resolved by iterating backward passes until stable: least
/// fixpoint for `U`/`F`, greatest for `G`/`R`/`W`.
pub(crate) struct TruthTable {
    values: Vec<Vec<bool>>,
}

enum Node<'a> {
    Const(bool),
    Var(&'a str),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
}

fn flatten<'a>(f: &'a Formula, out: &mut Vec<Node<'a>>) -> usize {
    let node = match f {
        Formula::Const(b) => Node::Const(*b),
        Formula::Var(v) => Node::Var(v),
        Formula::Unary(op, c) => {
            let c = flatten(c, out);
            Node::Unary(*op, c)
        }
        Formula::Binary(op, l, r) => {
            let l = flatten(l, out);
            let r = flatten(r, out);
            Node::Binary(*op, l, r)
        }
    };
    out.push(node);
    out.len() - 1
}

impl TruthTable {
    pub(crate) fn build<V>(f: &Formula, len: usize, loop_start: usize, holds: V) -> Self
    where
        V: Fn(usize, &str) -> bool,
    {
        assert!(loop_start < len);
        let succ = |j: usize| if j + 1 < len { j + 1 } else { loop_start };
        let mut nodes = Vec::new();
        flatten(f, &mut nodes);
        let mut values: Vec<Vec<bool>> = Vec::with_capacity(nodes.len());
        for node in &nodes {
            let row: Vec<bool> = match *node {
                Node::Const(b) => vec![b; len],
                Node::Var(v) => (0..len).map(|j| holds(j, v)).collect(),
                Node::Unary(UnaryOp::Not, c) => values[c].iter().map(|b| !b).collect(),
                Node::Unary(UnaryOp::Next, c) => (0..len).map(|j| values[c][succ(j)]).collect(),
                Node::Unary(UnaryOp::Globally, c) => {
                    let a = &values[c];
                    fixpoint(len, true, succ, |j, nxt| a[j] && nxt)
                }
                Node::Unary(UnaryOp::Finally, c) => {
                    let a = &values[c];
                    fixpoint(len, false, succ, |j, nxt| a[j] || nxt)
                }
                Node::Binary(op, l, r) => {
                    let (a, b) = (&values[l], &values[r]);
                    match op {
                        BinaryOp::And => (0..len).map(|j| a[j] && b[j]).collect(),
                        BinaryOp::Or => (0..len).map(|j| a[j] || b[j]).collect(),
                        BinaryOp::Implies => (0..len).map(|j| !a[j] || b[j]).collect(),
                        BinaryOp::Until => fixpoint(len, false, succ, |j, nxt| b[j] || (a[j] && nxt)),
                        BinaryOp::Release => fixpoint(len, true, succ, |j, nxt| b[j] && (a[j] || nxt)),
                        BinaryOp::WeakUntil => fixpoint(len, true, succ, |j, nxt| b[j] || (a[j] && nxt)),
                    }
                }
            };
            values.push(row);
        }
        TruthTable { values }
    }

    pub(crate) fn root(&self) -> &[bool] {
        self.values.last().expect("formula has at least one node")
    }

    /// Values of every node (post-order) at one position.
    pub(crate) fn column(&self, pos: usize) -> Vec<bool> {
        self.values.iter().map(|row| row[pos]).collect()
    }
}

fn fixpoint<S, Step>(len: usize, init: bool, succ: S, step: Step) -> Vec<bool>
where
    S: Fn(usize) -> usize,
    Step: Fn(usize, bool) -> bool,
{
    let mut cur = vec![init; len];
    loop {
        let mut changed = false;
        for j in (0..len).rev() {
            let v = step(j, cur[succ(j)]);
            if v != cur[j] {
                cur[j] = v;
                changed = true;
            }
        }
        if !changed {
            return cur;
        }
    }
}

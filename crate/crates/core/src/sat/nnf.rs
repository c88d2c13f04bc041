//! Hash-consed negation normal form over `& | X U R` and literals.

use std::collections::HashMap;

use crate::ltl::{BinaryOp, Formula, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Id(pub(crate) u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    True,
    False,
    /// Variable index and polarity.
    Lit(u32, bool),
    And(Id, Id),
    Or(Id, Id),
    Next(Id),
    Until(Id, Id),
    Release(Id, Id),
}

pub(crate) struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
    pub(crate) vars: Vec<String>,
    var_index: HashMap<String, u32>,
}

pub(crate) const TRUE: Id = Id(0);
pub(crate) const FALSE: Id = Id(1);

impl Arena {
    pub(crate) fn new() -> Self {
        let mut a = Arena { nodes: Vec::new(), index: HashMap::new(), vars: Vec::new(), var_index: HashMap::new() };
        a.intern(Node::True);
        a.intern(Node::False);
        a
    }

    pub(crate) fn node(&self, id: Id) -> Node {
        self.nodes[id.0 as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }

    fn intern(&mut self, n: Node) -> Id {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = Id(self.nodes.len() as u32);
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }

    fn var(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.var_index.get(name) {
            return i;
        }
        let i = self.vars.len() as u32;
        self.vars.push(name.to_string());
        self.var_index.insert(name.to_string(), i);
        i
    }

    fn complementary(&self, a: Id, b: Id) -> bool {
        matches!((self.node(a), self.node(b)), (Node::Lit(x, p), Node::Lit(y, q)) if x == y && p != q)
    }

    pub(crate) fn lit(&mut self, var: u32, positive: bool) -> Id {
        self.intern(Node::Lit(var, positive))
    }

    pub(crate) fn and(&mut self, a: Id, b: Id) -> Id {
        if a == FALSE || b == FALSE || self.complementary(a, b) {
            return FALSE;
        }
        if a == TRUE {
            return b;
        }
        if b == TRUE || a == b {
            return a;
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.intern(Node::And(a, b))
    }

    pub(crate) fn or(&mut self, a: Id, b: Id) -> Id {
        if a == TRUE || b == TRUE || self.complementary(a, b) {
            return TRUE;
        }
        if a == FALSE {
            return b;
        }
        if b == FALSE || a == b {
            return a;
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.intern(Node::Or(a, b))
    }

    pub(crate) fn next(&mut self, a: Id) -> Id {
        if a == TRUE || a == FALSE {
            return a;
        }
        self.intern(Node::Next(a))
    }

    pub(crate) fn until(&mut self, a: Id, b: Id) -> Id {
        if b == TRUE || b == FALSE || a == FALSE || a == b {
            return b;
        }
        self.intern(Node::Until(a, b))
    }

    pub(crate) fn release(&mut self, a: Id, b: Id) -> Id {
        if b == TRUE || b == FALSE || a == TRUE || a == b {
            return b;
        }
        self.intern(Node::Release(a, b))
    }

    /// Translates `f` (negated when `positive` is false) into NNF.
    /// `G`, `F`, `W` and `->` are rewritten through their defining identities
    /// and constants are folded away.
    pub(crate) fn translate(&mut self, f: &Formula, positive: bool) -> Id {
        match f {
            Formula::Const(b) => {
                if *b == positive {
                    TRUE
                } else {
                    FALSE
                }
            }
            Formula::Var(v) => {
                let i = self.var(v);
                self.lit(i, positive)
            }
            Formula::Unary(op, c) => match op {
                UnaryOp::Not => self.translate(c, !positive),
                UnaryOp::Next => {
                    let c = self.translate(c, positive);
                    self.next(c)
                }
                UnaryOp::Globally | UnaryOp::Finally => {
                    let c = self.translate(c, positive);
                    // G c = false R c; F c = true U c; negation swaps the two.
                    if (*op == UnaryOp::Globally) == positive {
                        self.release(FALSE, c)
                    } else {
                        self.until(TRUE, c)
                    }
                }
            },
            Formula::Binary(op, l, r) => match (op, positive) {
                (BinaryOp::And, true) | (BinaryOp::Or, false) => {
                    let (a, b) = (self.translate(l, positive), self.translate(r, positive));
                    self.and(a, b)
                }
                (BinaryOp::Or, true) | (BinaryOp::And, false) => {
                    let (a, b) = (self.translate(l, positive), self.translate(r, positive));
                    self.or(a, b)
                }
                (BinaryOp::Implies, true) => {
                    let (a, b) = (self.translate(l, false), self.translate(r, true));
                    self.or(a, b)
                }
                (BinaryOp::Implies, false) => {
                    let (a, b) = (self.translate(l, true), self.translate(r, false));
                    self.and(a, b)
                }
                (BinaryOp::Until, true) | (BinaryOp::Release, false) => {
                    let (a, b) = (self.translate(l, positive), self.translate(r, positive));
                    self.until(a, b)
                }
                (BinaryOp::Release, true) | (BinaryOp::Until, false) => {
                    let (a, b) = (self.translate(l, positive), self.translate(r, positive));
                    self.release(a, b)
                }
                // a W b = b R (a | b); its negation is !b U (!a & !b).
                (BinaryOp::WeakUntil, true) => {
                    let (a, b) = (self.translate(l, true), self.translate(r, true));
                    let ab = self.or(a, b);
                    self.release(b, ab)
                }
                (BinaryOp::WeakUntil, false) => {
                    let (a, b) = (self.translate(l, false), self.translate(r, false));
                    let ab = self.and(a, b);
                    self.until(b, ab)
                }
            },
        }
    }
}

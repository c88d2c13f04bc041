use std::collections::BTreeSet;
use std::fmt;

/// Unary LTL connectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Not,
    Next,
    Globally,
    Finally,
}

/// Binary LTL connectives. `Implies` is kept as its own node so that sizes
/// and tree distances are computed on the formula as written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    And,
    Or,
    Implies,
    Until,
    Release,
    WeakUntil,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Not, UnaryOp::Globally, UnaryOp::Finally, UnaryOp::Next];

    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Next => "X",
            UnaryOp::Globally => "G",
            UnaryOp::Finally => "F",
        }
    }
}

impl BinaryOp {
    /// Binary operators produced by formula edits. `Implies` is never created.
    pub const EDITABLE: [BinaryOp; 5] =
        [BinaryOp::And, BinaryOp::Or, BinaryOp::Until, BinaryOp::Release, BinaryOp::WeakUntil];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
            BinaryOp::Implies => "->",
            BinaryOp::Until => "U",
            BinaryOp::Release => "R",
            BinaryOp::WeakUntil => "W",
        }
    }
}

/// An LTL formula as an owned tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const(bool),
    Var(String),
    Unary(UnaryOp, Box<Formula>),
    Binary(BinaryOp, Box<Formula>, Box<Formula>),
}

/// Root-to-node position: the sequence of child indices (0 = left/only, 1 = right).
pub type Path = Vec<u8>;

impl Formula {
    pub fn tt() -> Self {
        Formula::Const(true)
    }

    pub fn ff() -> Self {
        Formula::Const(false)
    }

    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn unary(op: UnaryOp, child: Formula) -> Self {
        Formula::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: Formula, right: Formula) -> Self {
        Formula::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn not(self) -> Self {
        Self::unary(UnaryOp::Not, self)
    }

    pub fn next(self) -> Self {
        Self::unary(UnaryOp::Next, self)
    }

    pub fn globally(self) -> Self {
        Self::unary(UnaryOp::Globally, self)
    }

    pub fn finally(self) -> Self {
        Self::unary(UnaryOp::Finally, self)
    }

    pub fn and(self, other: Formula) -> Self {
        Self::binary(BinaryOp::And, self, other)
    }

    pub fn or(self, other: Formula) -> Self {
        Self::binary(BinaryOp::Or, self, other)
    }

    pub fn implies(self, other: Formula) -> Self {
        Self::binary(BinaryOp::Implies, self, other)
    }

    pub fn until(self, other: Formula) -> Self {
        Self::binary(BinaryOp::Until, self, other)
    }

    pub fn release(self, other: Formula) -> Self {
        Self::binary(BinaryOp::Release, self, other)
    }

    pub fn weak_until(self, other: Formula) -> Self {
        Self::binary(BinaryOp::WeakUntil, self, other)
    }

    /// Right-nested conjunction `f1 & (f2 & (... & fn))`; `true` when empty.
    pub fn conjunction<I>(parts: I) -> Formula
    where
        I: IntoIterator<Item = Formula>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut iter = parts.into_iter().rev();
        match iter.next() {
            None => Formula::tt(),
            Some(last) => iter.fold(last, |acc, f| f.and(acc)),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Formula::Const(_) | Formula::Var(_))
    }

    /// Number of nodes: variables, constants and operators each count one.
    pub fn size(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 1,
            Formula::Unary(_, c) => 1 + c.size(),
            Formula::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 1,
            Formula::Unary(_, c) => 1 + c.depth(),
            Formula::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Const(_) | Formula::Var(_) => vec![],
            Formula::Unary(_, c) => vec![c],
            Formula::Binary(_, l, r) => vec![l, r],
        }
    }

    /// Every node paired with its path, in pre-order. The root comes first.
    pub fn subformulae(&self) -> Vec<(&Formula, Path)> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack: Vec<(&Formula, Path)> = vec![(self, Vec::new())];
        while let Some((f, path)) = stack.pop() {
            let kids = f.children();
            for (i, c) in kids.iter().enumerate().rev() {
                let mut p = path.clone();
                p.push(i as u8);
                stack.push((c, p));
            }
            out.push((f, path));
        }
        out
    }

    /// Paths of every node in pre-order, without borrowing the nodes.
    pub fn positions(&self) -> Vec<Path> {
        self.subformulae().into_iter().map(|(_, p)| p).collect()
    }

    pub fn at(&self, path: &[u8]) -> Option<&Formula> {
        let mut cur = self;
        for &step in path {
            cur = match (cur, step) {
                (Formula::Unary(_, c), 0) => c,
                (Formula::Binary(_, l, _), 0) => l,
                (Formula::Binary(_, _, r), 1) => r,
                _ => return None,
            };
        }
        Some(cur)
    }

    pub fn at_mut(&mut self, path: &[u8]) -> Option<&mut Formula> {
        let mut cur = self;
        for &step in path {
            cur = match (cur, step) {
                (Formula::Unary(_, c), 0) => c,
                (Formula::Binary(_, l, _), 0) => l,
                (Formula::Binary(_, _, r), 1) => r,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Copy of `self` with the node at `path` replaced.
    pub fn replace_at(&self, path: &[u8], replacement: Formula) -> Option<Formula> {
        let mut out = self.clone();
        *out.at_mut(path)? = replacement;
        Some(out)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Unary(_, c) => c.collect_vars(out),
            Formula::Binary(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Rewrites every `a -> b` as `!a | b`.
    pub fn desugar_implications(&self) -> Formula {
        match self {
            Formula::Const(_) | Formula::Var(_) => self.clone(),
            Formula::Unary(op, c) => Formula::unary(*op, c.desugar_implications()),
            Formula::Binary(BinaryOp::Implies, l, r) => l.desugar_implications().not().or(r.desugar_implications()),
            Formula::Binary(op, l, r) => Formula::binary(*op, l.desugar_implications(), r.desugar_implications()),
        }
    }

    /// Label of the root node as used in parse trees and printing.
    pub fn label(&self) -> &str {
        match self {
            Formula::Const(true) => "true",
            Formula::Const(false) => "false",
            Formula::Var(v) => v,
            Formula::Unary(op, _) => op.symbol(),
            Formula::Binary(op, _, _) => op.symbol(),
        }
    }

    /// Identity string used for tabu memory and deduplication.
    pub fn canonical_key(&self) -> String {
        self.to_string()
    }
}

fn write_operand(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if f.is_leaf() {
        write!(out, "{f}")
    } else {
        write!(out, "({f})")
    }
}

/// Canonical rendering: every non-leaf operand is parenthesized and tokens are
/// separated by single spaces, so the output re-parses to the same tree
/// regardless of precedence rules.
impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(_) | Formula::Var(_) => out.write_str(self.label()),
            Formula::Unary(op, c) => {
                write!(out, "{} ", op.symbol())?;
                write_operand(c, out)
            }
            Formula::Binary(op, l, r) => {
                write_operand(l, out)?;
                write!(out, " {} ", op.symbol())?;
                write_operand(r, out)
            }
        }
    }
}

/// Formulae serialize as their printed form and deserialize by parsing.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc1() -> Formula {
        Formula::var("h").and(Formula::var("m")).globally()
    }

    #[test]
    fn sizes_match_worked_examples() {
        assert_eq!(bc1().size(), 4);
        assert_eq!(Formula::var("p").size(), 1);
        let g1 = Formula::var("h").implies(Formula::var("p").next()).globally();
        assert_eq!(g1.size(), 5);
    }

    #[test]
    fn printing() {
        assert_eq!(bc1().to_string(), "G (h & m)");
        assert_eq!(Formula::ff().to_string(), "false");
        let g1 = Formula::var("h").implies(Formula::var("p").next()).globally();
        assert_eq!(g1.to_string(), "G (h -> (X p))");
    }

    #[test]
    fn subformulae_walk() {
        let f = bc1();
        let subs: Vec<String> = f.subformulae().iter().map(|(s, _)| s.to_string()).collect();
        assert_eq!(subs, vec!["G (h & m)", "h & m", "h", "m"]);
        assert_eq!(Formula::var("p").subformulae().len(), 1);
        for (s, p) in f.subformulae() {
            assert_eq!(f.at(&p), Some(s));
        }
    }

    #[test]
    fn keys_are_structural() {
        let a = bc1();
        let b = Formula::var("m").and(Formula::var("h")).globally();
        assert_ne!(a.canonical_key(), b.canonical_key());
        assert_eq!(a.canonical_key(), bc1().canonical_key());
    }

    #[test]
    fn conjunction_nests_right() {
        let c = Formula::conjunction(vec![Formula::var("a"), Formula::var("b"), Formula::var("c")]);
        assert_eq!(c.to_string(), "a & (b & c)");
        assert_eq!(Formula::conjunction(Vec::new()), Formula::tt());
    }

    #[test]
    fn desugar() {
        let f = Formula::var("a").implies(Formula::var("b"));
        assert_eq!(f.desugar_implications().to_string(), "(! a) | b");
    }
}

//! Formula edit operations, the edit neighborhood and tabu memory.
//!
//! Three kinds of edit act on the node at a path:
//! * rename swaps the top symbol for another of the same arity,
//! * insert puts a new unary operator above the node, or a new binary
//!   operator with a fresh leaf on one side,
//! * delete removes the top operator. Binary operators may only be deleted
//!   when the discarded operand is a leaf, so that every edit stays within
//!   tree distance two of the original.
//!
//! `->` is never created by an edit and is never renamed, but it may be
//! deleted or have operators inserted above it.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::ltl::{BinaryOp, Formula, Path, UnaryOp, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Edit {
    /// Replace a leaf by another variable or constant.
    RenameLeaf(Formula),
    RenameUnary(UnaryOp),
    RenameBinary(BinaryOp),
    InsertUnary(UnaryOp),
    /// `side` is where the new leaf goes; the old node becomes the other operand.
    InsertBinary {
        op: BinaryOp,
        side: Side,
        leaf: Formula,
    },
    /// `keep` is `None` for unary operators and names the surviving operand
    /// of a binary one.
    Delete {
        keep: Option<Side>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EditOp {
    pub path: Path,
    pub edit: Edit,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("no subformula at path {0:?}")]
    NoSuchPath(Path),
    #[error("edit {edit:?} does not apply to `{node}`: {reason}")]
    Inapplicable { edit: Edit, node: String, reason: &'static str },
}

/// Leaf symbols available to renames and inserts: the vocabulary, then
/// `true` and `false`.
pub fn leaf_alphabet(vocabulary: &Vocabulary) -> Vec<Formula> {
    vocabulary.iter().map(Formula::var).chain([Formula::tt(), Formula::ff()]).collect()
}

fn edit_node(node: &Formula, edit: &Edit) -> Result<Formula, &'static str> {
    match (edit, node) {
        (Edit::RenameLeaf(new), _) => {
            if !node.is_leaf() {
                return Err("only leaves take leaf renames");
            }
            if !new.is_leaf() {
                return Err("replacement is not a leaf");
            }
            if new == node {
                return Err("rename must change the symbol");
            }
            Ok(new.clone())
        }
        (Edit::RenameUnary(new), Formula::Unary(old, c)) => {
            if new == old {
                return Err("rename must change the symbol");
            }
            Ok(Formula::unary(*new, (**c).clone()))
        }
        (Edit::RenameBinary(new), Formula::Binary(old, l, r)) => {
            if *old == BinaryOp::Implies || *new == BinaryOp::Implies {
                return Err("implication is outside the rename alphabet");
            }
            if new == old {
                return Err("rename must change the symbol");
            }
            Ok(Formula::binary(*new, (**l).clone(), (**r).clone()))
        }
        (Edit::RenameUnary(_), _) => Err("not a unary operator"),
        (Edit::RenameBinary(_), _) => Err("not a binary operator"),
        (Edit::InsertUnary(op), _) => Ok(Formula::unary(*op, node.clone())),
        (Edit::InsertBinary { op, side, leaf }, _) => {
            if *op == BinaryOp::Implies {
                return Err("implication is outside the insert alphabet");
            }
            if !leaf.is_leaf() {
                return Err("inserted operand is not a leaf");
            }
            Ok(match side {
                Side::Left => Formula::binary(*op, leaf.clone(), node.clone()),
                Side::Right => Formula::binary(*op, node.clone(), leaf.clone()),
            })
        }
        (Edit::Delete { keep: None }, Formula::Unary(_, c)) => Ok((**c).clone()),
        (Edit::Delete { keep: Some(side) }, Formula::Binary(_, l, r)) => {
            let (kept, dropped) = match side {
                Side::Left => (l, r),
                Side::Right => (r, l),
            };
            if !dropped.is_leaf() {
                return Err("the discarded operand must be a leaf");
            }
            Ok((**kept).clone())
        }
        (Edit::Delete { .. }, Formula::Const(_) | Formula::Var(_)) => Err("leaves cannot be deleted"),
        (Edit::Delete { .. }, _) => Err("delete arity does not match the operator"),
    }
}

/// Applies one edit, leaving `f` untouched.
pub fn apply_edit(f: &Formula, op: &EditOp) -> Result<Formula, EditError> {
    let node = f.at(&op.path).ok_or_else(|| EditError::NoSuchPath(op.path.clone()))?;
    let replaced = edit_node(node, &op.edit).map_err(|reason| EditError::Inapplicable {
        edit: op.edit.clone(),
        node: node.to_string(),
        reason,
    })?;
    Ok(f.replace_at(&op.path, replaced).expect("path checked above"))
}

/// Every edit applicable to `node` itself, in a fixed order.
pub fn applicable_edits(node: &Formula, vocabulary: &Vocabulary) -> Vec<Edit> {
    let leaves = leaf_alphabet(vocabulary);
    let mut out = Vec::new();
    match node {
        Formula::Const(_) | Formula::Var(_) => {
            out.extend(leaves.iter().filter(|l| *l != node).cloned().map(Edit::RenameLeaf));
        }
        Formula::Unary(op, _) => {
            out.extend(UnaryOp::ALL.iter().filter(|o| *o != op).copied().map(Edit::RenameUnary));
        }
        Formula::Binary(op, _, _) => {
            if *op != BinaryOp::Implies {
                out.extend(BinaryOp::EDITABLE.iter().filter(|o| *o != op).copied().map(Edit::RenameBinary));
            }
        }
    }
    out.extend(UnaryOp::ALL.iter().copied().map(Edit::InsertUnary));
    for op in BinaryOp::EDITABLE {
        for side in [Side::Left, Side::Right] {
            for leaf in &leaves {
                out.push(Edit::InsertBinary { op, side, leaf: leaf.clone() });
            }
        }
    }
    match node {
        Formula::Unary(..) => out.push(Edit::Delete { keep: None }),
        Formula::Binary(_, l, r) => {
            if r.is_leaf() {
                out.push(Edit::Delete { keep: Some(Side::Left) });
            }
            if l.is_leaf() {
                out.push(Edit::Delete { keep: Some(Side::Right) });
            }
        }
        _ => {}
    }
    out
}

/// Every edit applicable anywhere in `f`, positions in pre-order.
pub fn all_edits(f: &Formula, vocabulary: &Vocabulary) -> Vec<EditOp> {
    f.subformulae()
        .into_iter()
        .flat_map(|(node, path)| {
            applicable_edits(node, vocabulary).into_iter().map(move |edit| EditOp { path: path.clone(), edit })
        })
        .collect()
}

/// The neighborhood of `f`: every single-edit result, duplicates removed,
/// in order of first occurrence.
pub fn neighbors(f: &Formula, vocabulary: &Vocabulary) -> Vec<Formula> {
    let mut seen = HashSet::new();
    all_edits(f, vocabulary)
        .iter()
        .map(|op| apply_edit(f, op).expect("enumerated edits apply"))
        .filter(|g| seen.insert(g.canonical_key()))
        .collect()
}

/// `k` random edits: a position is drawn uniformly, then one of the edits
/// applicable there. Draws are independent, so results may repeat.
pub fn sample_edits<R: Rng + ?Sized>(f: &Formula, k: usize, vocabulary: &Vocabulary, rng: &mut R) -> Vec<EditOp> {
    let positions = f.positions();
    (0..k)
        .map(|_| {
            let path = positions.choose(rng).expect("a formula has at least one position").clone();
            let node = f.at(&path).expect("position exists");
            let edit = applicable_edits(node, vocabulary).choose(rng).expect("inserts always apply").clone();
            EditOp { path, edit }
        })
        .collect()
}

pub fn sample_neighbors<R: Rng + ?Sized>(f: &Formula, k: usize, vocabulary: &Vocabulary, rng: &mut R) -> Vec<Formula> {
    sample_edits(f, k, vocabulary, rng).iter().map(|op| apply_edit(f, op).expect("sampled edits apply")).collect()
}

/// The last `tenure` visited formulae, oldest first, keyed by canonical key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabuMemory {
    tenure: usize,
    entries: VecDeque<String>,
}

impl TabuMemory {
    pub fn new(tenure: usize) -> Self {
        TabuMemory { tenure, entries: VecDeque::with_capacity(tenure + 1) }
    }

    pub fn tenure(&self) -> usize {
        self.tenure
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.iter().any(|k| k == key)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.contains_key(&f.canonical_key())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    /// Records a visit. A formula already in memory moves to the newest slot.
    pub fn record_visit(&mut self, f: &Formula) {
        if self.tenure == 0 {
            return;
        }
        let key = f.canonical_key();
        self.entries.retain(|k| *k != key);
        self.entries.push_back(key);
        while self.entries.len() > self.tenure {
            self.entries.pop_front();
        }
    }
}

/// Drops candidates that are in tabu memory, keeping order.
pub fn filter_tabu(candidates: Vec<Formula>, memory: &TabuMemory) -> Vec<Formula> {
    candidates.into_iter().filter(|c| !memory.contains(c)).collect()
}

/// An edit script turning `from` into `to`: delete operators bottom-up until
/// a single leaf remains, then grow `to` top-down by inserts and renames.
///
/// `to` must not contain `->`, which no edit can create.
pub fn reach_script(from: &Formula, to: &Formula) -> Vec<EditOp> {
    assert!(
        to.subformulae().iter().all(|(g, _)| !matches!(g, Formula::Binary(BinaryOp::Implies, ..))),
        "implication cannot be built by edits"
    );
    let mut script = Vec::new();
    let mut cur = from.clone();
    while !cur.is_leaf() {
        // A deepest operator has only leaves below it.
        let (node, path) = cur
            .subformulae()
            .into_iter()
            .filter(|(g, _)| !g.is_leaf())
            .max_by_key(|(_, p)| p.len())
            .expect("non-leaf formula has an operator");
        let keep = match node {
            Formula::Unary(..) => None,
            _ => Some(Side::Left),
        };
        let op = EditOp { path, edit: Edit::Delete { keep } };
        cur = apply_edit(&cur, &op).expect("deepest operator is deletable");
        script.push(op);
    }
    build(&cur, to, Vec::new(), &mut script);
    script
}

fn build(leaf: &Formula, target: &Formula, path: Path, script: &mut Vec<EditOp>) {
    let child = |i: u8| {
        let mut p = path.clone();
        p.push(i);
        p
    };
    match target {
        Formula::Const(_) | Formula::Var(_) => {
            if leaf != target {
                script.push(EditOp { path, edit: Edit::RenameLeaf(target.clone()) });
            }
        }
        Formula::Unary(op, c) => {
            script.push(EditOp { path: path.clone(), edit: Edit::InsertUnary(*op) });
            build(leaf, c, child(0), script);
        }
        Formula::Binary(op, l, r) => {
            let fresh = Formula::tt();
            script.push(EditOp {
                path: path.clone(),
                edit: Edit::InsertBinary { op: *op, side: Side::Right, leaf: fresh.clone() },
            });
            build(leaf, l, child(0), script);
            build(&fresh, r, child(1), script);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;
    use crate::treedist::formula_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn vocab(vs: &[&str]) -> Vocabulary {
        vs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn figure_edits() {
        let g = f("G(h -> X p)");
        let rename = EditOp { path: vec![0, 0], edit: Edit::RenameLeaf(Formula::var("m")) };
        assert_eq!(apply_edit(&g, &rename).unwrap(), f("G(m -> X p)"));
        let insert = EditOp { path: vec![0], edit: Edit::InsertUnary(UnaryOp::Finally) };
        assert_eq!(apply_edit(&g, &insert).unwrap(), f("G F (h -> X p)"));
        let delete = EditOp { path: vec![0, 1], edit: Edit::Delete { keep: None } };
        assert_eq!(apply_edit(&g, &delete).unwrap(), f("G(h -> p)"));
        assert_eq!(g, f("G(h -> X p)"));
    }

    #[test]
    fn inapplicable_edits() {
        let g = f("G(h -> X p)");
        let bad = [
            EditOp { path: vec![0], edit: Edit::RenameBinary(BinaryOp::And) },
            EditOp { path: vec![0, 0], edit: Edit::Delete { keep: None } },
            EditOp { path: vec![0], edit: Edit::Delete { keep: Some(Side::Left) } },
            EditOp { path: vec![], edit: Edit::RenameUnary(UnaryOp::Globally) },
            EditOp { path: vec![], edit: Edit::RenameBinary(BinaryOp::Or) },
            EditOp { path: vec![0, 0], edit: Edit::RenameLeaf(Formula::var("h")) },
            EditOp {
                path: vec![],
                edit: Edit::InsertBinary { op: BinaryOp::Implies, side: Side::Left, leaf: Formula::tt() },
            },
        ];
        for op in &bad {
            assert!(matches!(apply_edit(&g, op), Err(EditError::Inapplicable { .. })), "{op:?}");
        }
        let missing = EditOp { path: vec![1], edit: Edit::InsertUnary(UnaryOp::Not) };
        assert_eq!(apply_edit(&g, &missing), Err(EditError::NoSuchPath(vec![1])));
        // Deleting the implication is fine when the dropped side is a leaf.
        let keep_right = EditOp { path: vec![0], edit: Edit::Delete { keep: Some(Side::Right) } };
        assert_eq!(apply_edit(&g, &keep_right).unwrap(), f("G X p"));
    }

    #[test]
    fn neighbors_of_a_variable() {
        let got: HashSet<String> = neighbors(&f("p"), &vocab(&["p", "q"])).iter().map(|g| g.to_string()).collect();
        let mut want = HashSet::new();
        for leaf in ["q", "true", "false"] {
            want.insert(leaf.to_string());
        }
        for op in ["!", "G", "F", "X"] {
            want.insert(format!("{op} p"));
        }
        for op in ["&", "|", "U", "R", "W"] {
            for leaf in ["p", "q", "true", "false"] {
                want.insert(format!("{leaf} {op} p"));
                want.insert(format!("p {op} {leaf}"));
            }
        }
        // `p op p` arises from both sides.
        assert_eq!(want.len(), 3 + 4 + 5 * 7);
        assert_eq!(got, want);
    }

    #[test]
    fn neighborhood_counts() {
        let g = f("G(h & m)");
        let v = vocab(&["h", "m", "p"]);
        assert_eq!(all_edits(&g, &v).len(), 58 + 60 + 58 + 58);
        let n = neighbors(&g, &v);
        let keys: HashSet<String> = n.iter().map(Formula::canonical_key).collect();
        assert_eq!(keys.len(), n.len());
        assert!(n.iter().all(|h| matches!(formula_distance(&g, h), 1 | 2)));
    }

    #[test]
    fn sampling_is_reproducible() {
        let g = f("G(h -> X p)");
        let v = g.variables();
        let a = sample_neighbors(&g, 3, &v, &mut ChaCha8Rng::seed_from_u64(7));
        let b = sample_neighbors(&g, 3, &v, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        let all: HashSet<String> = neighbors(&g, &v).iter().map(Formula::canonical_key).collect();
        assert!(a.iter().all(|h| all.contains(&h.canonical_key()) && formula_distance(&g, h) <= 2));
        let one = sample_neighbors(&f("p"), 1, &vocab(&["p"]), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn tabu_buffer() {
        let fs: Vec<Formula> = ["a", "b", "c", "d", "e"].iter().map(|s| f(s)).collect();
        assert_eq!(filter_tabu(fs.clone(), &TabuMemory::new(4)), fs);
        let mut m = TabuMemory::new(4);
        for g in &fs {
            m.record_visit(g);
        }
        assert_eq!(m.keys().collect::<Vec<_>>(), ["b", "c", "d", "e"]);
        assert_eq!(filter_tabu(fs.clone(), &m), vec![f("a")]);
        m.record_visit(&f("b"));
        assert_eq!(m.keys().collect::<Vec<_>>(), ["c", "d", "e", "b"]);
        m.record_visit(&f("a"));
        assert_eq!(m.keys().collect::<Vec<_>>(), ["d", "e", "b", "a"]);

        let mut one = TabuMemory::new(1);
        one.record_visit(&f("a"));
        one.record_visit(&f("b"));
        assert_eq!(one.keys().collect::<Vec<_>>(), ["b"]);
        let mut none = TabuMemory::new(0);
        none.record_visit(&f("a"));
        assert!(none.is_empty());
    }

    #[test]
    fn scripts_reach_their_target() {
        for (a, b) in [("G(h -> X p)", "F(h & m)"), ("p", "p"), ("(a U b) R !c", "X d"), ("q", "G (p W (q | r))")] {
            let (a, b) = (f(a), f(b));
            let mut cur = a.clone();
            for op in reach_script(&a, &b) {
                cur = apply_edit(&cur, &op).unwrap();
            }
            assert_eq!(cur, b);
        }
    }
}

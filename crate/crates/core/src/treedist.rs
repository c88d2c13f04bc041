//! Ordered labeled tree edit distance (Zhang–Shasha) over formula parse trees.
//!
//! All three node edits (relabel, insert, delete) cost one.

use crate::ltl::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree {
    pub label: String,
    pub children: Vec<LabeledTree>,
}

impl LabeledTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        LabeledTree { label: label.into(), children: Vec::new() }
    }

    pub fn node(label: impl Into<String>, children: Vec<LabeledTree>) -> Self {
        LabeledTree { label: label.into(), children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(LabeledTree::size).sum::<usize>()
    }
}

pub fn to_parse_tree(f: &Formula) -> LabeledTree {
    LabeledTree { label: f.label().to_string(), children: f.children().into_iter().map(to_parse_tree).collect() }
}

/// Post-order decomposition of a tree, reusable across many distance queries.
#[derive(Debug, Clone)]
pub struct Decomposed {
    labels: Vec<String>,
    /// Left-most leaf descendant of each node (post-order indices).
    lml: Vec<usize>,
    keyroots: Vec<usize>,
}

impl Decomposed {
    pub fn new(tree: &LabeledTree) -> Self {
        let mut d = Decomposed { labels: Vec::new(), lml: Vec::new(), keyroots: Vec::new() };
        d.walk(tree);
        // A node is a keyroot iff no node with a larger index shares its
        // left-most leaf.
        let n = d.labels.len();
        let mut seen = vec![false; n];
        for i in (0..n).rev() {
            if !seen[d.lml[i]] {
                seen[d.lml[i]] = true;
                d.keyroots.push(i);
            }
        }
        d.keyroots.sort_unstable();
        d
    }

    pub fn from_formula(f: &Formula) -> Self {
        Self::new(&to_parse_tree(f))
    }

    fn walk(&mut self, t: &LabeledTree) -> usize {
        let mut first_leaf = None;
        for c in &t.children {
            let idx = self.walk(c);
            first_leaf.get_or_insert(self.lml[idx]);
        }
        let idx = self.labels.len();
        self.labels.push(t.label.clone());
        self.lml.push(first_leaf.unwrap_or(idx));
        idx
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }
}

pub fn decomposed_distance(a: &Decomposed, b: &Decomposed) -> usize {
    let (n, m) = (a.size(), b.size());
    let mut tree_dist = vec![vec![0usize; m]; n];
    let mut fd = vec![vec![0usize; m + 1]; n + 1];
    for &i in &a.keyroots {
        for &j in &b.keyroots {
            let (li, lj) = (a.lml[i], b.lml[j]);
            // Forest distances, offset so that row/column 0 is the empty forest.
            fd[0][0] = 0;
            for x in li..=i {
                fd[x - li + 1][0] = fd[x - li][0] + 1;
            }
            for y in lj..=j {
                fd[0][y - lj + 1] = fd[0][y - lj] + 1;
            }
            for x in li..=i {
                for y in lj..=j {
                    let (xi, yj) = (x - li + 1, y - lj + 1);
                    let del = fd[xi - 1][yj] + 1;
                    let ins = fd[xi][yj - 1] + 1;
                    if a.lml[x] == li && b.lml[y] == lj {
                        let relabel = fd[xi - 1][yj - 1] + usize::from(a.labels[x] != b.labels[y]);
                        let v = del.min(ins).min(relabel);
                        fd[xi][yj] = v;
                        tree_dist[x][y] = v;
                    } else {
                        let (px, py) = (a.lml[x] - li, b.lml[y] - lj);
                        fd[xi][yj] = del.min(ins).min(fd[px][py] + tree_dist[x][y]);
                    }
                }
            }
        }
    }
    tree_dist[n - 1][m - 1]
}

pub fn tree_distance(a: &LabeledTree, b: &LabeledTree) -> usize {
    decomposed_distance(&Decomposed::new(a), &Decomposed::new(b))
}

/// Tree edit distance between the parse trees of two formulae.
pub fn formula_distance(a: &Formula, b: &Formula) -> usize {
    tree_distance(&to_parse_tree(a), &to_parse_tree(b))
}

/// An exact non-negative rational `num / den`.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    pub num: usize,
    pub den: usize,
}

impl Ratio {
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self <= p / q`, compared exactly.
    pub fn le(self, p: usize, q: usize) -> bool {
        self.num * q <= p * self.den
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.num * other.den == other.num * self.den
    }
}

impl Eq for Ratio {}

/// `distance / (|a| + |b|)`, kept exact.
pub fn normalized_distance(a: &Formula, b: &Formula) -> Ratio {
    Ratio { num: formula_distance(a, b), den: a.size() + b.size() }
}

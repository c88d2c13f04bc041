//! Explicit tableau graph for LTL satisfiability.
//!
//! A graph node is a set of NNF obligations that must hold at the current
//! position. Expanding a node with the usual fixpoint unfoldings
//! (`a U b = b | (a & X(a U b))`, `a R b = b & (a | X(a R b))`) yields a set of
//! branches; each branch fixes a consistent set of literals for the current
//! position, the obligations for the next position (the edge target), and
//! the untils it postpones. A formula is satisfiable iff some reachable
//! strongly connected component has an internal edge and, for every until
//! postponed on one of its internal edges, another internal edge that does
//! not postpone it.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use smallvec::{smallvec, SmallVec};

use super::nnf::{Arena, Id, Node, FALSE, TRUE};
use super::SatError;

type Obligations = Vec<Id>;

/// A fixed-width bit set over arena ids or variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits(SmallVec<[u64; 4]>);

impl Bits {
    fn new(universe: usize) -> Self {
        Bits(smallvec![0; universe.div_ceil(64).max(1)])
    }

    /// Inserts `i`, returning whether it was absent.
    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.0[w] & b == 0;
        self.0[w] |= b;
        fresh
    }

    pub(crate) fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, &word)| (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Branch {
    pos: Bits,
    neg: Bits,
    next: Bits,
    postponed: Bits,
}

impl Branch {
    fn subsumes(&self, other: &Branch) -> bool {
        self.pos.is_subset(&other.pos)
            && self.neg.is_subset(&other.neg)
            && self.next.is_subset(&other.next)
            && self.postponed.is_subset(&other.postponed)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub(crate) target: usize,
    /// Variables that must be true at this step; all others may be false.
    pub(crate) true_vars: Vec<u32>,
    pub(crate) postponed: Bits,
}

pub(crate) struct Graph {
    pub(crate) nodes: Vec<Obligations>,
    pub(crate) edges: Vec<Vec<Edge>>,
}

pub(crate) struct Limits {
    pub(crate) max_states: usize,
    pub(crate) deadline: Option<Instant>,
}

/// Stem and cycle of an accepting lasso.
pub(crate) type Lasso = (Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Outcome of a search: either an accepting lasso through the graph, given as
/// the edge sequence of the stem and of the cycle, or none.
pub(crate) struct Search {
    pub(crate) graph: Graph,
    pub(crate) lasso: Option<Lasso>,
}

/// Pending work of one branch: nodes that cannot split are handled before
/// any that can, so literals are known by the time a choice is made.
#[derive(Clone)]
struct Todo {
    plain: SmallVec<[Id; 16]>,
    choice: SmallVec<[Id; 16]>,
}

impl Todo {
    fn push(&mut self, arena: &Arena, id: Id) {
        match arena.node(id) {
            Node::Or(..) | Node::Until(..) => self.choice.push(id),
            Node::Release(a, _) if a != FALSE => self.choice.push(id),
            _ => self.plain.push(id),
        }
    }

    fn pop(&mut self) -> Option<Id> {
        self.plain.pop().or_else(|| self.choice.pop())
    }
}

impl Branch {
    /// Truth value of `id` if it is a literal already fixed on this branch.
    fn known(&self, arena: &Arena, id: Id) -> Option<bool> {
        match arena.node(id) {
            Node::Lit(v, p) => {
                let (v, p) = (v as usize, p);
                if self.pos.contains(v) {
                    Some(p)
                } else if self.neg.contains(v) {
                    Some(!p)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

fn expand(arena: &Arena, start: &[Id]) -> Vec<Branch> {
    let (n_ids, n_vars) = (arena.len(), arena.vars.len());
    let mut out: Vec<Branch> = Vec::new();
    let init =
        Branch { pos: Bits::new(n_vars), neg: Bits::new(n_vars), next: Bits::new(n_ids), postponed: Bits::new(n_ids) };
    let mut todo0 = Todo { plain: SmallVec::new(), choice: SmallVec::new() };
    for &id in start.iter().rev() {
        todo0.push(arena, id);
    }
    let mut stack: Vec<(Todo, Branch, Bits)> = vec![(todo0, init, Bits::new(n_ids))];
    while let Some((mut todo, mut br, mut seen)) = stack.pop() {
        let mut alive = true;
        while let Some(id) = todo.pop() {
            if seen.contains(id.0 as usize) {
                continue;
            }
            match arena.node(id) {
                Node::True => {}
                Node::False => {
                    alive = false;
                    break;
                }
                Node::Lit(v, p) => {
                    let (set, other) = if p { (&mut br.pos, &br.neg) } else { (&mut br.neg, &br.pos) };
                    if other.contains(v as usize) {
                        alive = false;
                        break;
                    }
                    set.insert(v as usize);
                }
                Node::And(a, b) => {
                    todo.push(arena, b);
                    todo.push(arena, a);
                }
                Node::Next(a) => {
                    br.next.insert(a.0 as usize);
                }
                Node::Or(a, b) => {
                    let held = |x: Id| seen.contains(x.0 as usize) || br.known(arena, x) == Some(true);
                    if held(a) || held(b) {
                        seen.insert(id.0 as usize);
                        continue;
                    }
                    if br.known(arena, a) == Some(false) {
                        todo.push(arena, b);
                    } else if br.known(arena, b) == Some(false) {
                        todo.push(arena, a);
                    } else {
                        let mut alt = todo.clone();
                        alt.push(arena, b);
                        let mut alt_seen = seen.clone();
                        alt_seen.insert(id.0 as usize);
                        stack.push((alt, br.clone(), alt_seen));
                        todo.push(arena, a);
                    }
                }
                Node::Until(a, b) => {
                    if seen.contains(b.0 as usize) || br.known(arena, b) == Some(true) {
                        seen.insert(id.0 as usize);
                        continue;
                    }
                    let postpone = |br: &mut Branch, todo: &mut Todo| {
                        br.next.insert(id.0 as usize);
                        br.postponed.insert(id.0 as usize);
                        todo.push(arena, a);
                    };
                    if br.known(arena, b) == Some(false) {
                        postpone(&mut br, &mut todo);
                    } else if br.known(arena, a) == Some(false) {
                        todo.push(arena, b);
                    } else {
                        let (mut alt, mut alt_br) = (todo.clone(), br.clone());
                        postpone(&mut alt_br, &mut alt);
                        let mut alt_seen = seen.clone();
                        alt_seen.insert(id.0 as usize);
                        stack.push((alt, alt_br, alt_seen));
                        todo.push(arena, b);
                    }
                }
                Node::Release(a, b) => {
                    todo.push(arena, b);
                    if a == FALSE || br.known(arena, a) == Some(false) {
                        br.next.insert(id.0 as usize);
                    } else if seen.contains(a.0 as usize) || br.known(arena, a) == Some(true) {
                        // Released now; nothing carries over.
                    } else {
                        let (alt, mut alt_br) = (todo.clone(), br.clone());
                        alt_br.next.insert(id.0 as usize);
                        let mut alt_seen = seen.clone();
                        alt_seen.insert(id.0 as usize);
                        stack.push((alt, alt_br, alt_seen));
                        todo.push(arena, a);
                    }
                }
            }
            seen.insert(id.0 as usize);
        }
        if alive {
            out.push(br);
        }
    }
    // Drop branches that another branch subsumes; keep the first of equals.
    let mut kept: Vec<Branch> = Vec::with_capacity(out.len());
    for (i, b) in out.iter().enumerate() {
        let dominated =
            out.iter().enumerate().any(|(j, other)| j != i && other.subsumes(b) && (j < i || !b.subsumes(other)));
        if !dominated {
            kept.push(b.clone());
        }
    }
    kept
}

pub(crate) fn search(arena: &Arena, root: Id, limits: &Limits) -> Result<Search, SatError> {
    let mut graph = Graph { nodes: Vec::new(), edges: Vec::new() };
    if root == FALSE {
        return Ok(Search { graph, lasso: None });
    }
    let mut index: HashMap<Obligations, usize> = HashMap::new();
    let start: Obligations = if root == TRUE { vec![] } else { vec![root] };
    index.insert(start.clone(), 0);
    graph.nodes.push(start);
    graph.edges.push(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    let mut empty_node: Option<usize> = if root == TRUE { Some(0) } else { None };
    while let Some(n) = queue.pop_front() {
        if let Some(deadline) = limits.deadline {
            if n % 64 == 0 && Instant::now() > deadline {
                return Err(SatError::Timeout);
            }
        }
        let branches = expand(arena, &graph.nodes[n]);
        let mut edges = Vec::with_capacity(branches.len());
        for br in branches {
            let key: Obligations = br.next.iter().map(|i| Id(i as u32)).collect();
            let target = match index.get(&key) {
                Some(&t) => t,
                None => {
                    let t = graph.nodes.len();
                    if t >= limits.max_states {
                        return Err(SatError::StateLimit(limits.max_states));
                    }
                    if key.is_empty() {
                        empty_node = Some(t);
                    }
                    index.insert(key.clone(), t);
                    graph.nodes.push(key);
                    graph.edges.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            let true_vars = br.pos.iter().map(|v| v as u32).collect();
            edges.push(Edge { target, true_vars, postponed: br.postponed });
        }
        graph.edges[n] = edges;
        // Reaching the empty obligation set settles satisfiability at once.
        if empty_node.is_some() {
            break;
        }
    }
    if let Some(e) = empty_node {
        if graph.edges[e].is_empty() {
            graph.edges[e] = vec![Edge { target: e, true_vars: vec![], postponed: Bits::new(arena.len()) }];
        }
        let stem = path(&graph, 0, |x| x == e, |_| true).expect("empty node was reached from the root");
        return Ok(Search { graph, lasso: Some((stem, vec![(e, 0)])) });
    }
    let lasso = accepting_lasso(&graph, arena.len());
    Ok(Search { graph, lasso })
}

/// Shortest edge path from `from` to a node satisfying `goal`, moving only
/// through nodes accepted by `allowed`. Edges are `(source, edge index)`.
fn path(
    graph: &Graph,
    from: usize,
    goal: impl Fn(usize) -> bool,
    allowed: impl Fn(usize) -> bool,
) -> Option<Vec<(usize, usize)>> {
    let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = std::collections::HashSet::from([from]);
    let mut found = None;
    while let Some(n) = queue.pop_front() {
        if goal(n) {
            found = Some(n);
            break;
        }
        for (i, e) in graph.edges[n].iter().enumerate() {
            if allowed(e.target) && seen.insert(e.target) {
                parent.insert(e.target, (n, i));
                queue.push_back(e.target);
            }
        }
    }
    let mut cur = found?;
    let mut steps = Vec::new();
    while cur != from {
        let (p, i) = parent[&cur];
        steps.push((p, i));
        cur = p;
    }
    steps.reverse();
    Some(steps)
}

/// Iterative Tarjan; components are returned in reverse topological order.
fn sccs(graph: &Graph) -> Vec<Vec<usize>> {
    let n = graph.nodes.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, ei)) = call.last() {
            if ei < graph.edges[v].len() {
                let w = graph.edges[v][ei].target;
                call.last_mut().expect("non-empty").1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

fn accepting_lasso(graph: &Graph, universe: usize) -> Option<Lasso> {
    let mut comps = sccs(graph);
    // Prefer components close to the root for shorter witnesses.
    comps.sort_by_key(|c| c[0]);
    let mut member = vec![usize::MAX; graph.nodes.len()];
    for (ci, comp) in comps.iter().enumerate() {
        for &n in comp {
            member[n] = ci;
        }
    }
    for (ci, comp) in comps.iter().enumerate() {
        let internal = |n: usize| member[n] == ci;
        let mut postponed = Bits::new(universe);
        let mut has_edge = false;
        for &n in comp {
            for e in graph.edges[n].iter().filter(|e| internal(e.target)) {
                has_edge = true;
                postponed.union_with(&e.postponed);
            }
        }
        if !has_edge {
            continue;
        }
        let fulfilled = postponed.iter().all(|u| {
            comp.iter().any(|&n| graph.edges[n].iter().any(|e| internal(e.target) && !e.postponed.contains(u)))
        });
        if !fulfilled {
            continue;
        }
        let entry = comp[0];
        let stem = path(graph, 0, |x| x == entry, |_| true)?;
        let cycle = cycle_through(graph, entry, &postponed, internal);
        return Some((stem, cycle));
    }
    None
}

/// A cycle from `entry` back to itself inside one component that, for each
/// until in `obligations`, takes at least one edge not postponing it.
fn cycle_through(
    graph: &Graph,
    entry: usize,
    obligations: &Bits,
    internal: impl Fn(usize) -> bool + Copy,
) -> Vec<(usize, usize)> {
    let mut cycle: Vec<(usize, usize)> = Vec::new();
    let mut cur = entry;
    for u in obligations.iter() {
        let done = cycle.iter().any(|&(n, i)| !graph.edges[n][i].postponed.contains(u));
        if done {
            continue;
        }
        let good = |n: usize| graph.edges[n].iter().position(|e| internal(e.target) && !e.postponed.contains(u));
        let to = path(graph, cur, |n| good(n).is_some(), internal).expect("node in the same component");
        let last = to.last().map(|&(n, i)| graph.edges[n][i].target).unwrap_or(cur);
        cycle.extend(to);
        let i = good(last).expect("goal node has a fulfilling edge");
        cycle.push((last, i));
        cur = graph.edges[last][i].target;
    }
    if cycle.is_empty() {
        let i = graph.edges[entry].iter().position(|e| internal(e.target)).expect("component has an internal edge");
        cycle.push((entry, i));
        cur = graph.edges[entry][i].target;
    }
    let back = path(graph, cur, |n| n == entry, internal).expect("strongly connected");
    cycle.extend(back);
    cycle
}

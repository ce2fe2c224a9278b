//! Rooted trees with levels, protection sets and stretch computation.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{ceil_i64, q, Q};

/// Set of fireproofed (protected) non-root vertices.
pub type ProtectionSet = BTreeSet<usize>;

/// Rooted tree on vertices `0..n` with precomputed levels and ancestry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    level: Vec<usize>,
    height: usize,
    leaves: Vec<usize>,
    by_level: Vec<Vec<usize>>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl RootedTree {
    /// Builds a tree from a parent array (`None` exactly at the root).
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::MalformedInput(format!("expected one root, found {}", roots.len())));
        }
        let edges: Vec<(usize, usize)> =
            (0..n).filter_map(|v| parent[v].map(|p| (p, v))).collect();
        build_tree(n, &edges, roots[0])
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    /// Height `L` (maximum level).
    pub fn height(&self) -> usize {
        self.height
    }

    /// Leaves in increasing id order.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v != self.root && self.children[v].is_empty()
    }

    /// Vertices of level `l` in increasing id order.
    pub fn level_vertices(&self, l: usize) -> &[usize] {
        self.by_level.get(l).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Non-root vertices in increasing id order.
    pub fn non_root(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(move |&v| v != self.root)
    }

    /// True iff `a` is an ancestor of `d` or equal to it.
    pub fn is_ancestor_or_self(&self, a: usize, d: usize) -> bool {
        self.tin[a] <= self.tin[d] && self.tout[d] <= self.tout[a]
    }

    /// `P_v`: the vertices on the path from `v` up to (excluding) the root,
    /// starting at `v`.
    pub fn path(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = v;
        while cur != self.root {
            out.push(cur);
            cur = self.parent[cur].expect("non-root has parent");
        }
        out
    }

    /// Ancestor of `v` at level `l` (`l <= level(v)`).
    pub fn ancestor_at(&self, v: usize, l: usize) -> usize {
        let mut cur = v;
        while self.level[cur] > l {
            cur = self.parent[cur].expect("non-root has parent");
        }
        cur
    }

    /// `T_v`: vertices of the subtree rooted at `v`, in preorder.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            for &c in self.children[u].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Leaves of `T_v` in increasing id order.
    pub fn leaves_under(&self, v: usize) -> Vec<usize> {
        self.leaves.iter().copied().filter(|&t| self.is_ancestor_or_self(v, t)).collect()
    }

    /// Vertices in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<usize> {
        self.by_level.iter().flatten().copied().collect()
    }
}

/// Builds a tree on vertices `0..n` from `(parent, child)` edges.
pub fn build_tree(n: usize, edges: &[(usize, usize)], root: usize) -> Result<RootedTree> {
    let bad = |m: String| Error::MalformedInput(m);
    if n < 2 {
        return Err(bad("tree needs a root and at least one other vertex".into()));
    }
    if root >= n {
        return Err(bad(format!("root {root} out of range")));
    }
    if edges.len() != n - 1 {
        return Err(bad(format!("expected {} edges, found {}", n - 1, edges.len())));
    }
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    for &(p, c) in edges {
        if p >= n || c >= n {
            return Err(bad(format!("edge ({p},{c}) out of range")));
        }
        if c == root {
            return Err(bad(format!("root {root} appears as a child (cycle)")));
        }
        if parent[c].is_some() {
            return Err(bad(format!("vertex {c} has two parents")));
        }
        parent[c] = Some(p);
        children[p].push(c);
    }
    for ch in children.iter_mut() {
        ch.sort_unstable();
    }
    let mut level = vec![usize::MAX; n];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut seen = 1;
    while let Some(u) = queue.pop_front() {
        for &c in &children[u] {
            level[c] = level[u] + 1;
            seen += 1;
            queue.push_back(c);
        }
    }
    if seen != n {
        return Err(bad("edges contain a cycle or a disconnected vertex".into()));
    }
    let height = *level.iter().max().unwrap();
    let mut by_level = vec![Vec::new(); height + 1];
    for v in 0..n {
        by_level[level[v]].push(v);
    }
    let leaves: Vec<usize> = (0..n).filter(|&v| v != root && children[v].is_empty()).collect();
    let mut tin = vec![0; n];
    let mut tout = vec![0; n];
    let mut clock = 0;
    let mut stack = vec![(root, false)];
    while let Some((u, done)) = stack.pop() {
        if done {
            tout[u] = clock;
            clock += 1;
            continue;
        }
        tin[u] = clock;
        clock += 1;
        stack.push((u, true));
        for &c in children[u].iter().rev() {
            stack.push((c, false));
        }
    }
    Ok(RootedTree { root, parent, children, level, height, leaves, by_level, tin, tout })
}

/// Tree with a nonnegative rational budget per level `1..=L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrmfcInstance {
    pub tree: RootedTree,
    budgets: Vec<Q>,
    prefix: Vec<Q>,
}

impl SrmfcInstance {
    pub fn new(tree: RootedTree, budgets: Vec<Q>) -> Result<Self> {
        if budgets.len() != tree.height() {
            return Err(Error::MalformedInput(format!(
                "budget length {} differs from height {}",
                budgets.len(),
                tree.height()
            )));
        }
        if budgets.iter().any(|b| b.is_negative()) {
            return Err(Error::MalformedInput("negative budget".into()));
        }
        let mut prefix = vec![Q::zero()];
        for b in &budgets {
            let last = prefix.last().unwrap().clone();
            prefix.push(last + b);
        }
        Ok(SrmfcInstance { tree, budgets, prefix })
    }

    /// Height `L`.
    pub fn height(&self) -> usize {
        self.tree.height()
    }

    /// All budgets `B_1..B_L` (index 0 is level 1).
    pub fn budgets(&self) -> &[Q] {
        &self.budgets
    }

    /// `B_l` for `1 <= l <= L`.
    pub fn budget(&self, l: usize) -> &Q {
        &self.budgets[l - 1]
    }

    /// `B_{<=l}` for `0 <= l <= L`; levels beyond `L` saturate.
    pub fn prefix(&self, l: usize) -> &Q {
        &self.prefix[l.min(self.budgets.len())]
    }

    /// Same tree with budgets multiplied by `s`.
    pub fn scaled(&self, s: &Q) -> SrmfcInstance {
        SrmfcInstance::new(self.tree.clone(), self.budgets.iter().map(|b| b * s).collect())
            .expect("scaling keeps the shape")
    }

    /// Same tree with new budgets.
    pub fn with_budgets(&self, budgets: Vec<Q>) -> Result<SrmfcInstance> {
        SrmfcInstance::new(self.tree.clone(), budgets)
    }
}

/// Classic instance: a tree and one integral budget per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RmfcInstance {
    pub tree: RootedTree,
    pub budget: u64,
}

impl RmfcInstance {
    /// The uniform smooth instance with `B_l = budget` for every level.
    pub fn to_srmfc(&self) -> SrmfcInstance {
        let b = q(self.budget as i64);
        SrmfcInstance::new(self.tree.clone(), vec![b; self.tree.height()]).expect("uniform budgets")
    }
}

/// Prunes the tree so that the ancestor-minimal members of `s` become the
/// leaves. Returns the new tree and the map from new ids to old ids
/// (new ids follow increasing old ids; the root keeps the smallest id slot
/// it had relative to the others).
pub fn normalize_targets(tree: &RootedTree, s: &BTreeSet<usize>) -> Result<(RootedTree, Vec<usize>)> {
    if s.is_empty() {
        return Err(Error::EmptyTargets);
    }
    if s.iter().any(|&v| v >= tree.vertex_count() || v == tree.root()) {
        return Err(Error::MalformedInput("targets must be non-root vertices".into()));
    }
    let minimal: Vec<usize> = s
        .iter()
        .copied()
        .filter(|&v| !tree.path(v).iter().skip(1).any(|a| s.contains(a)))
        .collect();
    let mut keep = vec![false; tree.vertex_count()];
    keep[tree.root()] = true;
    for &t in &minimal {
        for u in tree.path(t) {
            keep[u] = true;
        }
    }
    // Vertices strictly below a minimal target are dropped even if on a path.
    let map: Vec<usize> = (0..tree.vertex_count()).filter(|&v| keep[v]).collect();
    let mut index = vec![usize::MAX; tree.vertex_count()];
    for (i, &v) in map.iter().enumerate() {
        index[v] = i;
    }
    let edges: Vec<(usize, usize)> = map
        .iter()
        .filter(|&&v| v != tree.root())
        .map(|&v| (index[tree.parent(v).unwrap()], index[v]))
        .collect();
    let t = build_tree(map.len(), &edges, index[tree.root()])?;
    Ok((t, map))
}

/// True iff every leaf has an ancestor-or-self in `r`.
pub fn check_protection(tree: &RootedTree, r: &ProtectionSet) -> bool {
    let mut safe = vec![false; tree.vertex_count()];
    for v in tree.bfs_order() {
        if v == tree.root() {
            continue;
        }
        let p = tree.parent(v).unwrap();
        safe[v] = r.contains(&v) || (p != tree.root() && safe[p]);
    }
    tree.leaves().iter().all(|&t| safe[t])
}

/// Outcome of a stretch computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stretch {
    Finite(Q),
    /// Some prefix has zero budget but nonzero usage.
    Infinite,
    /// The set does not protect every leaf.
    Unprotected,
}

impl Stretch {
    /// True iff finite and at most `bound`.
    pub fn at_most(&self, bound: &Q) -> bool {
        matches!(self, Stretch::Finite(s) if s <= bound)
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            Stretch::Finite(s) => Some(s),
            _ => None,
        }
    }
}

/// Per-level counts `|R ∩ V_l|` for `l = 0..=L`.
pub fn level_counts(tree: &RootedTree, r: &ProtectionSet) -> Vec<usize> {
    let mut c = vec![0; tree.height() + 1];
    for &v in r {
        c[tree.level(v)] += 1;
    }
    c
}

/// Smallest `α` with `|R ∩ V_{<=l}| <= α B_{<=l}` for every level, ignoring
/// protection.
pub fn budget_stretch(inst: &SrmfcInstance, r: &ProtectionSet) -> Stretch {
    let counts = level_counts(&inst.tree, r);
    let mut best = Q::zero();
    let mut used = 0usize;
    for l in 1..=inst.height() {
        used += counts[l];
        if used == 0 {
            continue;
        }
        let b = inst.prefix(l);
        if b.is_zero() {
            return Stretch::Infinite;
        }
        let ratio = q(used as i64) / b;
        if ratio > best {
            best = ratio;
        }
    }
    Stretch::Finite(best)
}

/// Stretch of a protecting set; `Unprotected` if some leaf is exposed.
pub fn stretch_of(inst: &SrmfcInstance, r: &ProtectionSet) -> Stretch {
    if r.contains(&inst.tree.root()) || !check_protection(&inst.tree, r) {
        return Stretch::Unprotected;
    }
    budget_stretch(inst, r)
}

/// Removes members that have a proper ancestor in the set.
pub fn antichain(tree: &RootedTree, r: &ProtectionSet) -> ProtectionSet {
    r.iter()
        .copied()
        .filter(|&v| !tree.path(v).iter().skip(1).any(|a| r.contains(a)))
        .collect()
}

/// Converts a set with cumulative usage `|R ∩ V_{<=l}| <= α·l·B` into one
/// with `|R' ∩ V_l| <= ⌈αB⌉` per level by moving vertices to ancestors on
/// under-full levels. Moves onto an ancestor already in the set merge, so
/// `|R'| <= |R|`.
pub fn levelize_solution(tree: &RootedTree, r: &ProtectionSet, budget: u64, alpha: &Q) -> Result<ProtectionSet> {
    let cap_q = alpha * q(budget as i64);
    let cap = ceil_i64(&cap_q).max(0) as usize;
    let counts = level_counts(tree, r);
    let mut used = 0usize;
    for (l, &c) in counts.iter().enumerate().skip(1) {
        used += c;
        if q(used as i64) > &cap_q * q(l as i64) {
            return Err(Error::PreconditionViolated(format!("cumulative bound fails at level {l}")));
        }
    }
    let mut out = r.clone();
    loop {
        let counts = level_counts(tree, &out);
        let Some(l) = (1..=tree.height()).rev().find(|&l| counts[l] > cap) else {
            return Ok(out);
        };
        let Some(target) = (1..l).rev().find(|&m| counts[m] < cap) else {
            return Err(Error::PreconditionViolated(format!("no under-full level below {l}")));
        };
        let v = *out.iter().find(|&&v| tree.level(v) == l).unwrap();
        out.remove(&v);
        out.insert(tree.ancestor_at(v, target));
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// r=0, a=1, b=2, a1=3, a2=4, b1=5.
    pub fn t1() -> RootedTree {
        build_tree(6, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)], 0).unwrap()
    }

    /// Star with three leaves 1, 2, 3.
    pub fn t2() -> RootedTree {
        build_tree(4, &[(0, 1), (0, 2), (0, 3)], 0).unwrap()
    }

    /// Path r=0 → v1=1 → v2=2 → t=3.
    pub fn p3() -> RootedTree {
        build_tree(4, &[(0, 1), (1, 2), (2, 3)], 0).unwrap()
    }
}

//! Exact solvers: the budget-vector dynamic program and an exhaustive
//! antichain enumerator used as its oracle.

use std::cmp::Ordering;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ratio::{floor_i64, q, Q};
use crate::tree_core::{check_protection, level_counts, stretch_of, ProtectionSet, SrmfcInstance, Stretch};

/// DP limits.
#[derive(Debug, Clone, Copy)]
pub struct DpConfig {
    /// Keep only componentwise-minimal budget vectors.
    pub prune: bool,
    /// Largest budget-vector list allowed at any vertex.
    pub max_list: usize,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig { prune: true, max_list: 200_000 }
    }
}

/// Per-level caps `⌊B_{<=i}⌋ − ⌊B_{<=i−1}⌋` for `i = 1..=L` (index 0 unused).
pub fn level_caps(inst: &SrmfcInstance) -> Vec<u32> {
    let mut caps = vec![0u32];
    for i in 1..=inst.height() {
        let d = floor_i64(inst.prefix(i)) - floor_i64(inst.prefix(i - 1));
        caps.push(d.max(0) as u32);
    }
    caps
}

#[derive(Clone)]
enum Choice {
    /// Fireproof the vertex itself.
    SelfProtect,
    /// Index into the previous merge stage and into the child's list.
    Merge(usize, usize),
}

#[derive(Clone)]
struct Entry {
    vec: Vec<u32>,
    choice: Choice,
}

/// Per vertex, `stages[k]` holds the combinations of the first `k` children;
/// `finals` is the vertex's complete list.
struct Table {
    stages: Vec<Vec<Vec<Entry>>>,
    finals: Vec<Vec<Entry>>,
}

fn dominates(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn pareto(mut list: Vec<Entry>) -> Vec<Entry> {
    list.sort_by(|a, b| a.vec.iter().sum::<u32>().cmp(&b.vec.iter().sum::<u32>()).then_with(|| a.vec.cmp(&b.vec)));
    let mut kept: Vec<Entry> = Vec::new();
    for e in list {
        if !kept.iter().any(|k| dominates(&k.vec, &e.vec)) {
            kept.push(e);
        }
    }
    kept
}

fn dedup(mut list: Vec<Entry>) -> Vec<Entry> {
    list.sort_by(|a, b| a.vec.cmp(&b.vec));
    list.dedup_by(|a, b| a.vec == b.vec);
    list
}

/// A protecting set with `|R ∩ V_{<=l}| <= ⌊B_{<=l}⌋` for all `l`, or
/// `None` if no such set exists.
pub fn dp_exact(inst: &SrmfcInstance) -> Result<Option<ProtectionSet>> {
    dp_exact_with(inst, DpConfig::default())
}

/// [`dp_exact`] with explicit limits.
pub fn dp_exact_with(inst: &SrmfcInstance, cfg: DpConfig) -> Result<Option<ProtectionSet>> {
    let tree = &inst.tree;
    let l_max = tree.height();
    let caps = level_caps(inst);
    let n = tree.vertex_count();
    let mut table = Table { stages: (0..n).map(|_| Vec::new()).collect(), finals: (0..n).map(|_| Vec::new()).collect() };
    let order: Vec<usize> = tree.bfs_order().into_iter().rev().collect();
    for v in order {
        let lv = tree.level(v);
        let mut cur: Vec<Entry> = Vec::new();
        let children = tree.children(v);
        if !children.is_empty() {
            cur.push(Entry { vec: vec![0; l_max + 1], choice: Choice::Merge(usize::MAX, usize::MAX) });
            for &c in children {
                let mut next = Vec::new();
                for (i, a) in cur.iter().enumerate() {
                    for (j, b) in table.finals[c].iter().enumerate() {
                        let s: Vec<u32> = a.vec.iter().zip(&b.vec).map(|(x, y)| x + y).collect();
                        if s.iter().zip(&caps).all(|(x, k)| x <= k) {
                            next.push(Entry { vec: s, choice: Choice::Merge(i, j) });
                        }
                    }
                }
                let next = if cfg.prune { pareto(next) } else { dedup(next) };
                if next.len() > cfg.max_list {
                    return Err(Error::ResourceCap(format!("DP list of {} vectors at vertex {v}", next.len())));
                }
                table.stages[v].push(std::mem::replace(&mut cur, next));
            }
        }
        if v == tree.root() {
            table.finals[v] = cur;
            continue;
        }
        if caps[lv] > 0 {
            let mut e = vec![0; l_max + 1];
            e[lv] = 1;
            cur.push(Entry { vec: e, choice: Choice::SelfProtect });
        }
        table.finals[v] = if cfg.prune { pareto(cur) } else { cur };
    }
    let root = tree.root();
    if table.finals[root].is_empty() {
        return Ok(None);
    }
    let mut out = ProtectionSet::new();
    let mut stack = vec![(root, 0usize)];
    while let Some((v, idx)) = stack.pop() {
        let mut e = &table.finals[v][idx];
        if let Choice::SelfProtect = e.choice {
            out.insert(v);
            continue;
        }
        // stages[v][k] holds the combinations of the first k children.
        let children = tree.children(v);
        for k in (0..children.len()).rev() {
            let Choice::Merge(i, j) = e.choice else { unreachable!() };
            stack.push((children[k], j));
            e = &table.stages[v][k][i];
        }
    }
    debug_assert!(check_protection(tree, &out));
    Ok(Some(out))
}

/// Result of the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exhaustive {
    /// Minimum stretch over protecting antichains.
    pub alpha: Stretch,
    /// Lexicographically smallest optimal antichain.
    pub witness: ProtectionSet,
    /// Minimum over protecting antichains of the largest per-level count.
    pub classic_budget: usize,
    /// Number of protecting antichains enumerated.
    pub enumerated: usize,
}

impl Exhaustive {
    /// True iff some protecting set has stretch at most one.
    pub fn one_feasible(&self) -> bool {
        self.alpha.at_most(&q(1))
    }
}

/// Largest number of non-root vertices the exhaustive oracle accepts.
pub const EXHAUSTIVE_LIMIT: usize = 18;

/// Every protecting antichain, as sorted id vectors.
pub fn protecting_antichains(inst: &SrmfcInstance) -> Result<Vec<Vec<usize>>> {
    let tree = &inst.tree;
    if tree.vertex_count() - 1 > EXHAUSTIVE_LIMIT {
        return Err(Error::ResourceCap(format!("exhaustive search limited to {EXHAUSTIVE_LIMIT} vertices")));
    }
    fn rec(tree: &crate::tree_core::RootedTree, v: usize) -> Vec<Vec<usize>> {
        let mut below: Vec<Vec<usize>> = vec![Vec::new()];
        for &c in tree.children(v) {
            let opts = rec(tree, c);
            let mut next = Vec::with_capacity(below.len() * opts.len());
            for a in &below {
                for b in &opts {
                    let mut s = a.clone();
                    s.extend_from_slice(b);
                    next.push(s);
                }
            }
            below = next;
        }
        if v == tree.root() {
            return below;
        }
        if tree.children(v).is_empty() {
            return vec![vec![v]];
        }
        below.push(vec![v]);
        below
    }
    let mut all = rec(tree, tree.root());
    for s in all.iter_mut() {
        s.sort_unstable();
    }
    Ok(all)
}

/// Exhaustive optimum over all protecting antichains.
pub fn exhaustive_exact(inst: &SrmfcInstance) -> Result<Exhaustive> {
    let all = protecting_antichains(inst)?;
    let mut best: Option<(Stretch, Vec<usize>)> = None;
    let mut classic = usize::MAX;
    for s in &all {
        let r: ProtectionSet = s.iter().copied().collect();
        let st = stretch_of(inst, &r);
        let per_level = level_counts(&inst.tree, &r).into_iter().max().unwrap_or(0);
        classic = classic.min(per_level);
        let better = match &best {
            None => true,
            Some((bs, bv)) => match cmp_stretch(&st, bs) {
                Ordering::Less => true,
                Ordering::Equal => s < bv,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((st, s.clone()));
        }
    }
    let (alpha, w) = best.expect("the leaf set is a protecting antichain");
    Ok(Exhaustive { alpha, witness: w.into_iter().collect(), classic_budget: classic, enumerated: all.len() })
}

/// Orders stretches with `Infinite` above every finite value.
pub fn cmp_stretch(a: &Stretch, b: &Stretch) -> Ordering {
    match (a, b) {
        (Stretch::Finite(x), Stretch::Finite(y)) => x.cmp(y),
        (Stretch::Finite(_), _) => Ordering::Less,
        (_, Stretch::Finite(_)) => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// Smallest stretch among `candidates` for which `dp_exact` on `αB` is
/// feasible, scanning in increasing order.
pub fn min_feasible_alpha(inst: &SrmfcInstance, candidates: &[Q]) -> Result<Option<Q>> {
    for a in candidates {
        if a.is_zero() {
            continue;
        }
        if dp_exact(&inst.scaled(a))?.is_some() {
            return Ok(Some(a.clone()));
        }
    }
    Ok(None)
}

//! Seeded instance generators. Both use `ChaCha8Rng` seeded with the 64-bit
//! seed, so the same parameters always give the same instance.
//!
//! Trees: vertex 0 is the root and vertices `1..=depth` form a spine, so
//! the height is exactly `depth`. Every later vertex picks its parent
//! uniformly among the earlier vertices above level `depth` that have
//! fewer than `branching` children. Budgets are drawn from `0..=2` per
//! level with the first at least 1.
//!
//! Metrics: integer points on a line or in the plane under `ℓ₁`, or random
//! weights in `1..=15` repaired by shortest-path closure. Budgets are drawn
//! from `0..=2` with `k_1 >= 1` and radii are nonincreasing integers in
//! `1..=12`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gen::{random_closure_metric, random_int_budgets, random_points_metric};
use crate::nukc::SnukcInstance;
use crate::ratio::q;
use crate::tree_core::{RootedTree, SrmfcInstance};

/// Shape of a generated metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Line,
    Plane,
    Closure,
}

/// Random tree on `n` vertices with height `depth` and at most
/// `branching` children per vertex.
pub fn generate_tree(n: usize, depth: usize, branching: usize, seed: u64) -> Result<SrmfcInstance> {
    if depth == 0 || branching == 0 || n < depth + 1 {
        return Err(Error::ParameterOutOfRange(format!("need depth >= 1, branching >= 1 and n > depth (n={n}, depth={depth})")));
    }
    // A complete tree of height `depth` bounds the vertex count.
    let mut cap: usize = 1;
    let mut width: usize = 1;
    for _ in 0..depth {
        width = width.saturating_mul(branching);
        cap = cap.saturating_add(width);
    }
    if n > cap {
        return Err(Error::ParameterOutOfRange(format!("{n} vertices do not fit under depth {depth} and branching {branching}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent: Vec<Option<usize>> = vec![None];
    for v in 1..=depth {
        parent.push(Some(v - 1));
    }
    for _ in depth + 1..n {
        let open: Vec<usize> = (0..parent.len()).filter(|&u| level_of(&parent, u) < depth && kids_of(&parent, u) < branching).collect();
        let p = open[rng.gen_range(0..open.len())];
        parent.push(Some(p));
    }
    let tree = RootedTree::from_parents(parent)?;
    let budgets = random_int_budgets(&mut rng, depth, 2, 1);
    SrmfcInstance::new(tree, budgets)
}

fn level_of(parent: &[Option<usize>], mut v: usize) -> usize {
    let mut l = 0;
    while let Some(p) = parent[v] {
        v = p;
        l += 1;
    }
    l
}

fn kids_of(parent: &[Option<usize>], v: usize) -> usize {
    parent.iter().filter(|p| **p == Some(v)).count()
}

/// Random instance on `n` points with `levels` levels.
pub fn generate_metric(n: usize, kind: MetricKind, levels: usize, seed: u64) -> Result<SnukcInstance> {
    if n == 0 || levels == 0 {
        return Err(Error::ParameterOutOfRange("need at least one point and one level".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = match kind {
        MetricKind::Line => random_points_metric(&mut rng, n, 1, 20),
        MetricKind::Plane => random_points_metric(&mut rng, n, 2, 10),
        MetricKind::Closure => random_closure_metric(&mut rng, n, 15),
    };
    let k = random_int_budgets(&mut rng, levels, 2, 1);
    let mut r: Vec<i64> = (0..levels).map(|_| rng.gen_range(1..=12)).collect();
    r.sort_unstable_by(|a, b| b.cmp(a));
    SnukcInstance::new(space, k, r.into_iter().map(q).collect())
}

//! Seeded random instance families shared by tests, benches and the CLI.

use rand::Rng;

use crate::nukc::{MetricSpace, SnukcInstance};
use crate::ratio::{q, qf, Q};
use crate::tree_core::RootedTree;

/// Random tree on `n >= 2` vertices rooted at 0 whose levels do not exceed
/// `max_height` (pass `usize::MAX` for no limit).
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, max_height: usize) -> RootedTree {
    assert!(n >= 2 && max_height >= 1);
    let mut parent = vec![None];
    let mut level = vec![0usize];
    for v in 1..n {
        let eligible: Vec<usize> = (0..v).filter(|&u| level[u] < max_height).collect();
        let p = eligible[rng.gen_range(0..eligible.len())];
        parent.push(Some(p));
        level.push(level[p] + 1);
    }
    RootedTree::from_parents(parent).expect("parents point to earlier vertices")
}

/// Random caterpillar-like tree: a spine of length `height` with extra
/// leaves hung at random spine vertices, `n` vertices in total.
pub fn random_spine_tree<R: Rng>(rng: &mut R, n: usize, height: usize) -> RootedTree {
    assert!(height >= 1 && n > height);
    let mut parent: Vec<Option<usize>> = vec![None];
    for v in 1..=height {
        parent.push(Some(v - 1));
    }
    for _ in height + 1..n {
        let p = rng.gen_range(0..height);
        parent.push(Some(p));
    }
    RootedTree::from_parents(parent).expect("valid spine tree")
}

/// `len` integral budgets drawn from `0..=max`, with the first at least `min_first`.
pub fn random_int_budgets<R: Rng>(rng: &mut R, len: usize, max: u32, min_first: u32) -> Vec<Q> {
    (0..len)
        .map(|i| {
            let lo = if i == 0 { min_first.min(max) } else { 0 };
            q(rng.gen_range(lo..=max) as i64)
        })
        .collect()
}

/// `len` rational budgets `a/den` with `a` drawn from `0..=max*den`.
pub fn random_rational_budgets<R: Rng>(rng: &mut R, len: usize, max: u32, den: u32) -> Vec<Q> {
    (0..len)
        .map(|_| qf(rng.gen_range(0..=(max * den)) as i64, den as i64))
        .collect()
}

/// `n` random integer points in `dim` dimensions with coordinates in
/// `0..=max`, under the `ℓ₁` distance.
pub fn random_points_metric<R: Rng>(rng: &mut R, n: usize, dim: usize, max: i64) -> MetricSpace {
    assert!(n >= 1 && dim >= 1);
    let pts: Vec<Vec<i64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0..=max)).collect()).collect();
    let d = pts
        .iter()
        .map(|a| pts.iter().map(|b| q(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())).collect())
        .collect();
    MetricSpace::new(d).expect("l1 distances form a metric")
}

/// Random symmetric weights in `1..=max` repaired by shortest-path closure.
pub fn random_closure_metric<R: Rng>(rng: &mut R, n: usize, max: i64) -> MetricSpace {
    assert!(n >= 1 && max >= 1);
    let mut d = vec![vec![0i64; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let w = rng.gen_range(1..=max);
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for m in 0..n {
        for u in 0..n {
            for v in 0..n {
                if d[u][m] + d[m][v] < d[u][v] {
                    d[u][v] = d[u][m] + d[m][v];
                }
            }
        }
    }
    MetricSpace::new(d.into_iter().map(|row| row.into_iter().map(q).collect()).collect()).expect("closure is a metric")
}

/// Random instance on `n` points with `levels` levels: a line, plane or
/// closure metric, integer budgets in `0..=2` with `k_1 >= 1`, and
/// nonincreasing integer radii in `1..=12`.
pub fn random_metric_instance<R: Rng>(rng: &mut R, n: usize, levels: usize) -> SnukcInstance {
    let space = match rng.gen_range(0..3) {
        0 => random_points_metric(rng, n, 1, 20),
        1 => random_points_metric(rng, n, 2, 10),
        _ => random_closure_metric(rng, n, 15),
    };
    let k = random_int_budgets(rng, levels, 2, 1);
    let mut r: Vec<i64> = (0..levels).map(|_| rng.gen_range(1..=12)).collect();
    r.sort_unstable_by(|a, b| b.cmp(a));
    SnukcInstance::new(space, k, r.into_iter().map(q).collect()).expect("valid random instance")
}

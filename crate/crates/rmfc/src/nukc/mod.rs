//! Smooth non-uniform k-center: model, feasibility, compression, the
//! LP-aware reduction to trees, sparsification, roundings, the cover DP,
//! the exploration and the end-to-end solver.
//!
//! Levels are 1-based throughout: level 1 carries the largest radius.

pub mod analysis;
pub mod compress;
pub mod cover;
pub mod explore;
pub mod lp;
pub mod reduce;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{ceil, floor, q, Q};

pub use compress::{compress_nukc, NukcLifter};
pub use cover::dp_cover;
pub use explore::{explore_nukc, solve_nukc, solve_snukc, NukcExploreConfig, NukcExploreResult, NukcLimits, NukcThresholds, SnukcOutcome};
pub use lp::{solve_vertex_nukc, NukcPolytope};
pub use reduce::{project_back, reduce_to_tree, round_small_radii, sparsify_nukc, TreeReduction};

/// Finite metric on points `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    d: Vec<Vec<Q>>,
}

impl MetricSpace {
    /// Validates a distance matrix, including the triangle inequality.
    pub fn new(d: Vec<Vec<Q>>) -> Result<Self> {
        let n = d.len();
        let bad = |m: String| Err(Error::MalformedInput(m));
        if n == 0 {
            return bad("metric has no points".into());
        }
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return bad(format!("distance row {i} has {} entries, expected {n}", row.len()));
            }
        }
        for u in 0..n {
            if !d[u][u].is_zero() {
                return bad(format!("non-metric: d({u},{u}) != 0"));
            }
            for v in 0..n {
                if d[u][v].is_negative() {
                    return bad(format!("non-metric: d({u},{v}) < 0"));
                }
                if d[u][v] != d[v][u] {
                    return bad(format!("non-metric: d({u},{v}) != d({v},{u})"));
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if d[u][w] > &d[u][v] + &d[v][w] {
                        return bad(format!("non-metric: d({u},{w}) > d({u},{v}) + d({v},{w})"));
                    }
                }
            }
        }
        Ok(MetricSpace { d })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self, u: usize, v: usize) -> &Q {
        &self.d[u][v]
    }

    pub fn matrix(&self) -> &[Vec<Q>] {
        &self.d
    }

    /// `Ball(v, r)`, increasing id.
    pub fn ball(&self, v: usize, r: &Q) -> Vec<usize> {
        (0..self.n()).filter(|&u| self.d[v][u] <= *r).collect()
    }
}

/// Instance `(V, d, k, r)` with nonincreasing radii.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnukcInstance {
    pub space: MetricSpace,
    k: Vec<Q>,
    r: Vec<Q>,
    prefix: Vec<Q>,
}

impl SnukcInstance {
    pub fn new(space: MetricSpace, k: Vec<Q>, r: Vec<Q>) -> Result<Self> {
        let bad = |m: &str| Err(Error::MalformedInput(m.into()));
        if k.is_empty() || k.len() != r.len() {
            return bad("budgets and radii need the same positive length");
        }
        if k.iter().chain(&r).any(|x| x.is_negative()) {
            return bad("budgets and radii must be nonnegative");
        }
        if r.windows(2).any(|w| w[0] < w[1]) {
            return bad("radii must be nonincreasing");
        }
        let mut prefix = vec![Q::zero()];
        for x in &k {
            let next = prefix.last().unwrap() + x;
            prefix.push(next);
        }
        Ok(SnukcInstance { space, k, r, prefix })
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn levels(&self) -> usize {
        self.k.len()
    }

    pub fn budgets(&self) -> &[Q] {
        &self.k
    }

    pub fn radii(&self) -> &[Q] {
        &self.r
    }

    /// `k_ℓ`.
    pub fn k(&self, l: usize) -> &Q {
        &self.k[l - 1]
    }

    /// `r_ℓ`.
    pub fn r(&self, l: usize) -> &Q {
        &self.r[l - 1]
    }

    /// `k_{<=ℓ}` (zero for `ℓ = 0`).
    pub fn prefix(&self, l: usize) -> &Q {
        &self.prefix[l]
    }

    pub fn d(&self, u: usize, v: usize) -> &Q {
        self.space.d(u, v)
    }

    /// Same metric, new budgets and radii.
    pub fn with_levels(&self, k: Vec<Q>, r: Vec<Q>) -> Result<Self> {
        SnukcInstance::new(self.space.clone(), k, r)
    }

    /// Radii multiplied by `s`.
    pub fn scaled_radii(&self, s: &Q) -> Self {
        let r = self.r.iter().map(|x| x * s).collect();
        self.with_levels(self.k.clone(), r).expect("scaling keeps the instance valid")
    }

    /// `(V, d, k, r)_{<=h}`.
    pub fn low(&self, h: usize) -> Result<Self> {
        self.with_levels(self.k[..h].to_vec(), self.r[..h].to_vec())
    }

    /// `(V, d, k, r)_{>h}`.
    pub fn high(&self, h: usize) -> Result<Self> {
        self.with_levels(self.k[h..].to_vec(), self.r[h..].to_vec())
    }
}

/// Set of `(point, level)` centers.
pub type CenterSet = BTreeSet<(usize, usize)>;

/// `V(C)` at dilation `s`: the union of `Ball(v, s·r_ℓ)` over `C`.
pub fn covered_points(inst: &SnukcInstance, c: &CenterSet, s: &Q) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &(v, l) in c {
        out.extend(inst.space.ball(v, &(s * inst.r(l))));
    }
    out
}

/// Smallest dilation `β` with `⋃ Ball(v, βr_ℓ) = V`, or `None` when no
/// finite dilation works.
pub fn coverage_dilation(inst: &SnukcInstance, c: &CenterSet) -> Option<Q> {
    let mut worst = Q::zero();
    for p in 0..inst.n() {
        let mut best: Option<Q> = None;
        for &(v, l) in c {
            let d = inst.d(p, v);
            let need = if d.is_zero() {
                Q::zero()
            } else if inst.r(l).is_zero() {
                continue;
            } else {
                d / inst.r(l)
            };
            if best.as_ref().map_or(true, |b| need < *b) {
                best = Some(need);
            }
        }
        let b = best?;
        if b > worst {
            worst = b;
        }
    }
    Some(worst)
}

/// Smallest `α` with `|C_{<=ℓ}| <= α k_{<=ℓ}` (smooth) or `|C_ℓ| <= α k_ℓ`
/// (classic) for every level; `None` if a zero budget carries a center.
pub fn budget_stretch(inst: &SnukcInstance, c: &CenterSet, smooth: bool) -> Option<Q> {
    let counts = level_counts(inst.levels(), c);
    let mut best = Q::zero();
    let mut run = 0usize;
    for l in 1..=inst.levels() {
        run += counts[l];
        let (used, cap) = if smooth { (run, inst.prefix(l)) } else { (counts[l], inst.k(l)) };
        if used == 0 {
            continue;
        }
        if cap.is_zero() {
            return None;
        }
        let s = q(used as i64) / cap;
        if s > best {
            best = s;
        }
    }
    Some(best)
}

/// Centers per level, index 0 unused.
pub fn level_counts(levels: usize, c: &CenterSet) -> Vec<usize> {
    let mut out = vec![0; levels + 1];
    for &(_, l) in c {
        out[l] += 1;
    }
    out
}

/// True iff `C` is `(α, β)`-feasible.
pub fn is_feasible(inst: &SnukcInstance, c: &CenterSet, alpha: &Q, beta: &Q, smooth: bool) -> bool {
    if c.iter().any(|&(v, l)| v >= inst.n() || l == 0 || l > inst.levels()) {
        return false;
    }
    let counts = level_counts(inst.levels(), c);
    let mut run = 0usize;
    for l in 1..=inst.levels() {
        run += counts[l];
        let ok = if smooth {
            q(run as i64) <= alpha * inst.prefix(l)
        } else {
            q(counts[l] as i64) <= alpha * inst.k(l)
        };
        if !ok {
            return false;
        }
    }
    (0..inst.n()).all(|p| c.iter().any(|&(v, l)| *inst.d(p, v) <= beta * inst.r(l)))
}

/// Moves centers from over-full levels to the nearest earlier under-full
/// level until `|C_ℓ| <= ⌈α k_ℓ⌉` on every level. A moved center that
/// lands on a pair already in `C` is dropped.
pub fn flatten_budgets(c: &CenterSet, k: &[u64], alpha: &Q) -> Result<CenterSet> {
    let levels = k.len();
    if c.iter().any(|&(_, l)| l == 0 || l > levels) {
        return Err(Error::PreconditionViolated("center level out of range".into()));
    }
    let caps: Vec<usize> = k.iter().map(|&b| ceil(&(alpha * q(b as i64))).try_into().unwrap_or(usize::MAX)).collect();
    let counts = level_counts(levels, c);
    let (mut used, mut cap) = (0usize, 0usize);
    for l in 1..=levels {
        used += counts[l];
        cap = cap.saturating_add(caps[l - 1]);
        if used > cap {
            return Err(Error::PreconditionViolated(format!("prefix condition fails at level {l}")));
        }
    }
    let mut by_level: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); levels + 1];
    for &(v, l) in c {
        by_level[l].insert(v);
    }
    for l in 1..=levels {
        while by_level[l].len() > caps[l - 1] {
            let v = *by_level[l].iter().next().unwrap();
            let target = (1..l).rev().find(|&j| by_level[j].len() < caps[j - 1]).expect("prefix condition leaves room");
            by_level[l].remove(&v);
            by_level[target].insert(v);
        }
    }
    Ok(by_level.iter().enumerate().flat_map(|(l, vs)| vs.iter().map(move |&v| (v, l))).collect())
}

/// `{d(u,v)/r_ℓ : u != v, r_ℓ > 0}`, sorted and deduplicated. Empty when
/// every radius is zero.
pub fn beta_candidates(inst: &SnukcInstance) -> Vec<Q> {
    let mut out = BTreeSet::new();
    for l in 1..=inst.levels() {
        let r = inst.r(l);
        if r.is_zero() {
            continue;
        }
        for u in 0..inst.n() {
            for v in u + 1..inst.n() {
                out.insert(inst.d(u, v) / r);
            }
        }
    }
    out.into_iter().collect()
}

/// Per-level caps equivalent to the floored prefix budgets: with
/// `P_ℓ = min_{j>=ℓ} ⌊b_{<=j}⌋`, a set obeys every prefix bound iff
/// moving centers to earlier levels makes `|C_ℓ| <= P_ℓ − P_{ℓ−1}`.
/// `None` when some prefix bound is negative.
pub fn floor_prefix_caps(b: &[Q]) -> Option<Vec<usize>> {
    let mut run = Q::zero();
    let mut p: Vec<num_bigint::BigInt> = Vec::with_capacity(b.len());
    for x in b {
        run += x;
        p.push(floor(&run));
    }
    for i in (0..p.len().saturating_sub(1)).rev() {
        if p[i + 1] < p[i] {
            p[i] = p[i + 1].clone();
        }
    }
    if p.first().map_or(false, |x| x.is_negative()) {
        return None;
    }
    let mut prev = num_bigint::BigInt::zero();
    let mut caps = Vec::with_capacity(p.len());
    for x in p {
        let c: i64 = (&x - &prev).try_into().unwrap_or(i64::MAX);
        caps.push(c.max(0) as usize);
        prev = x;
    }
    Some(caps)
}

/// Enumeration limit for [`exhaustive_nukc`].
pub const EXHAUSTIVE_NUKC_LIMIT: u64 = 2_000_000;

/// Exact optimum by enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NukcOptimum {
    pub beta: Q,
    /// First optimal set in enumeration order.
    pub witness: CenterSet,
}

/// Minimal dilation over all 1-feasible center sets, or `None` when no
/// budget-respecting set covers `V` at any dilation.
///
/// Adding centers never raises the dilation and moving a center to an
/// earlier level never shrinks its ball, so it suffices to enumerate sets
/// that fill every per-level cap.
pub fn exhaustive_nukc(inst: &SnukcInstance) -> Result<Option<NukcOptimum>> {
    let n = inst.n();
    let caps: Vec<usize> = floor_prefix_caps(inst.budgets()).unwrap_or_default().into_iter().map(|c| c.min(n)).collect();
    if caps.is_empty() || caps.iter().all(|&c| c == 0) {
        return Ok(None);
    }
    let mut count: u64 = 1;
    for &c in &caps {
        count = count.saturating_mul(binomial(n as u64, c as u64));
        if count > EXHAUSTIVE_NUKC_LIMIT {
            return Err(Error::ResourceCap(format!("more than {EXHAUSTIVE_NUKC_LIMIT} center sets")));
        }
    }
    let per_level: Vec<Vec<Vec<usize>>> = caps.iter().map(|&c| combinations(n, c)).collect();
    let mut best: Option<NukcOptimum> = None;
    let mut idx = vec![0usize; caps.len()];
    loop {
        let c: CenterSet =
            idx.iter().enumerate().flat_map(|(l, &i)| per_level[l][i].iter().map(move |&v| (v, l + 1))).collect();
        if let Some(b) = coverage_dilation(inst, &c) {
            if best.as_ref().map_or(true, |o| b < o.beta) {
                best = Some(NukcOptimum { beta: b, witness: c });
            }
        }
        let mut pos = caps.len();
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_level[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Nonnegative point indexed by `(point, level)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPoint {
    n: usize,
    levels: usize,
    x: Vec<Q>,
}

impl PairPoint {
    pub fn zeros(n: usize, levels: usize) -> Self {
        PairPoint { n, levels, x: vec![Q::zero(); n * levels] }
    }

    /// Builds a point from a dense vector in `(level − 1)·n + v` order.
    pub fn from_vec(n: usize, levels: usize, x: Vec<Q>) -> Self {
        assert_eq!(x.len(), n * levels);
        PairPoint { n, levels, x }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn index(&self, v: usize, l: usize) -> usize {
        (l - 1) * self.n + v
    }

    pub fn get(&self, v: usize, l: usize) -> &Q {
        &self.x[self.index(v, l)]
    }

    pub fn set(&mut self, v: usize, l: usize, val: Q) {
        let i = self.index(v, l);
        self.x[i] = val;
    }

    pub fn add(&mut self, v: usize, l: usize, val: &Q) {
        let i = self.index(v, l);
        self.x[i] += val;
    }

    pub fn raw(&self) -> &[Q] {
        &self.x
    }

    /// Pairs with positive value, by level then point.
    pub fn support(&self) -> Vec<(usize, usize)> {
        (1..=self.levels)
            .flat_map(|l| (0..self.n).map(move |v| (v, l)))
            .filter(|&(v, l)| self.get(v, l).is_positive())
            .collect()
    }

    /// `Σ_v x_{v,ℓ}`.
    pub fn level_mass(&self, l: usize) -> Q {
        (0..self.n).map(|v| self.get(v, l).clone()).sum()
    }

    /// `Σ_{ℓ'<=ℓ} Σ_v x_{v,ℓ'}`.
    pub fn prefix_mass(&self, l: usize) -> Q {
        (1..=l).map(|j| self.level_mass(j)).sum()
    }

    /// `Σ_ℓ Σ_{u∈Ball(v, β_ℓ r_ℓ)} x_{u,ℓ}` over the levels in `range`.
    pub fn coverage_in(&self, inst: &SnukcInstance, v: usize, beta: &[Q], range: std::ops::RangeInclusive<usize>) -> Q {
        let mut s = Q::zero();
        for l in range {
            let rad = &beta[l - 1] * inst.r(l);
            for u in 0..self.n {
                if *inst.d(v, u) <= rad {
                    s += self.get(u, l);
                }
            }
        }
        s
    }

    /// Coverage of `v` over all levels.
    pub fn coverage(&self, inst: &SnukcInstance, v: usize, beta: &[Q]) -> Q {
        self.coverage_in(inst, v, beta, 1..=self.levels)
    }

    /// Smallest `α` meeting every prefix budget, `None` if a zero prefix
    /// carries mass.
    pub fn stretch(&self, inst: &SnukcInstance) -> Option<Q> {
        let mut best = Q::zero();
        for l in 1..=self.levels {
            let m = self.prefix_mass(l);
            if m.is_zero() {
                continue;
            }
            if inst.prefix(l).is_zero() {
                return None;
            }
            let s = m / inst.prefix(l);
            if s > best {
                best = s;
            }
        }
        Some(best)
    }

    pub fn scaled(&self, s: &Q) -> Self {
        PairPoint { n: self.n, levels: self.levels, x: self.x.iter().map(|v| v * s).collect() }
    }

    /// Every entry clipped to at most one.
    pub fn capped(&self) -> Self {
        PairPoint { n: self.n, levels: self.levels, x: self.x.iter().map(|v| if *v > Q::one() { Q::one() } else { v.clone() }).collect() }
    }

    /// Levels `lo+1..=hi` as a point on `hi − lo` levels.
    pub fn slice_levels(&self, lo: usize, hi: usize) -> Self {
        let mut out = PairPoint::zeros(self.n, hi - lo);
        for l in lo + 1..=hi {
            for v in 0..self.n {
                out.set(v, l - lo, self.get(v, l).clone());
            }
        }
        out
    }

    /// Average of a nonempty list of points.
    pub fn mix(ys: &[PairPoint]) -> Result<PairPoint> {
        let first = ys.first().ok_or(Error::EmptyCollection)?;
        let mut out = PairPoint::zeros(first.n, first.levels);
        for y in ys {
            for (a, b) in out.x.iter_mut().zip(&y.x) {
                *a += b;
            }
        }
        Ok(out.scaled(&Q::new(1.into(), (ys.len() as i64).into())))
    }
}

/// Uniform dilation vector of length `levels`.
pub fn uniform_beta(levels: usize, b: &Q) -> Vec<Q> {
    vec![b.clone(); levels]
}

//! LP-guided guessing: thresholds, blocked sets, partition generation,
//! point mixing and one recursion engine for the four exploration variants.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lp_tree::{solve_vertex, sparsify_unchecked, FractionalSolution, TreePolytope};
use crate::ratio::{ceil_i64, ceil_log, floor_i64, pow, q, qf, Q};
use crate::tree_core::{RootedTree, SrmfcInstance};

/// Level thresholds and search constants of an ε-compressed instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExploreThresholds {
    pub eps: Q,
    /// `ĥ` as given by its formula, before clamping.
    pub h_hat_raw: usize,
    /// `ȟ` as given by its formula, before clamping.
    pub h_check_raw: usize,
    /// `min(ĥ, L)`.
    pub h_hat: usize,
    /// `min(ȟ, ĥ, L)`.
    pub h_check: usize,
    pub kappa: usize,
    /// Number of mixed points `N = ⌈4/ε⌉`.
    pub n_mix: usize,
    /// `ζ̄` with the clamped levels.
    pub zeta_bar: Q,
    /// Sparsification parameter `min(ε, 1/7)`.
    pub eps_s: Q,
}

impl ExploreThresholds {
    /// True iff the proven guarantees cover this ε.
    pub fn in_guarantee_range(&self) -> bool {
        self.eps <= qf(1, 7)
    }
}

fn log_level(eps: &Q, x: &Q) -> usize {
    (ceil_log(&(Q::one() + eps), x).max(0) + 1) as usize
}

/// Computes `ĥ`, `ȟ`, `κ`, `N` and `ζ̄` exactly.
pub fn thresholds(eps: &Q, inst: &SrmfcInstance) -> ExploreThresholds {
    let l = inst.height();
    let e2 = eps * eps;
    let h_hat_raw = log_level(eps, &(q(l as i64) / &e2));
    let h_check_raw = log_level(eps, &(q(h_hat_raw as i64) / &e2));
    let h_hat = h_hat_raw.min(l);
    let h_check = h_check_raw.min(h_hat);
    let n_mix = ceil_i64(&(q(4) / eps)) as usize;
    let kappa_arg = (Q::one() + q(3) * eps) * q(n_mix as i64) / &e2;
    let kappa = ceil_log(&(Q::one() + eps), &kappa_arg).max(0) as usize;
    let hc = q(h_check as i64);
    let zeta_bar = q(2 * n_mix as i64) / (&e2 * eps)
        * (&hc * &hc * inst.prefix(h_check) + q(2 * kappa as i64) * inst.prefix(h_hat));
    let eps_s = if *eps < qf(1, 7) { eps.clone() } else { qf(1, 7) };
    ExploreThresholds { eps: eps.clone(), h_hat_raw, h_check_raw, h_hat, h_check, kappa, n_mix, zeta_bar, eps_s }
}

/// Bipartition of the leaves into bottom-protected and top-protected parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionCandidate {
    pub bot: Vec<usize>,
    pub top: Vec<usize>,
}

impl PartitionCandidate {
    /// Partition with the given top leaves; every other leaf is bottom.
    pub fn from_top(tree: &RootedTree, top: &BTreeSet<usize>) -> Self {
        let (t, b): (Vec<usize>, Vec<usize>) = tree.leaves().iter().partition(|l| top.contains(l));
        PartitionCandidate { bot: b, top: t }
    }
}

/// `Γ_top^h(y) = {t : y(P_t ∩ V_{>h}) >= 1 − ε}`.
pub fn gamma_top(tree: &RootedTree, y: &FractionalSolution, h: usize, eps: &Q) -> BTreeSet<usize> {
    let need = Q::one() - eps;
    tree.leaves()
        .iter()
        .copied()
        .filter(|&t| y.path_sum_between(tree, t, h, usize::MAX) >= need)
        .collect()
}

/// `D_top^h(A) = ⋃_{v∈A} P_v ∪ (T_v ∩ V_{<=h})`.
pub fn blocked_top(tree: &RootedTree, a: &[usize], h: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &v in a {
        out.extend(tree.path(v));
        out.extend(tree.subtree(v).into_iter().filter(|&u| tree.level(u) <= h));
    }
    out
}

/// `T_{v,κ}`: descendants of `v` (and `v`) at most `κ` levels below it.
pub fn subtree_within(tree: &RootedTree, v: usize, kappa: usize) -> Vec<usize> {
    let cap = tree.level(v) + kappa;
    tree.subtree(v).into_iter().filter(|&u| tree.level(u) <= cap).collect()
}

/// Blocked set for dropped vertices: `P_v ∪ (T_v ∩ V_{<=ȟ})` on levels up
/// to `ȟ`, and `P_v ∪ (T_{v,κ} ∩ V_{<=ĥ})` above.
pub fn blocked_dropped(tree: &RootedTree, a: &[usize], th: &ExploreThresholds) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &v in a {
        out.extend(tree.path(v));
        if tree.level(v) <= th.h_check {
            out.extend(tree.subtree(v).into_iter().filter(|&u| tree.level(u) <= th.h_check));
        } else {
            out.extend(subtree_within(tree, v, th.kappa).into_iter().filter(|&u| tree.level(u) <= th.h_hat));
        }
    }
    out
}

/// Support vertices of `y` on levels `<= h`, in id order.
pub fn bottom_support(tree: &RootedTree, y: &FractionalSolution, h: usize) -> Vec<usize> {
    y.support().into_iter().filter(|&v| tree.level(v) <= h).collect()
}

/// One partition per subset `G` of `supp(y) ∩ V_{<=h}`, with `Γ_bot` the
/// leaves below `G`. Duplicates are removed.
pub fn partitions_from_point(
    tree: &RootedTree,
    y: &FractionalSolution,
    h: usize,
    max_support: usize,
) -> Result<Vec<PartitionCandidate>> {
    let s = bottom_support(tree, y, h);
    if s.len() > max_support {
        return Err(Error::ResourceCap(format!("{} bottom support vertices exceed {max_support}", s.len())));
    }
    let below: Vec<BTreeSet<usize>> = s.iter().map(|&v| tree.leaves_under(v).into_iter().collect()).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << s.len()) {
        let mut bot = BTreeSet::new();
        for (i, set) in below.iter().enumerate() {
            if mask >> i & 1 == 1 {
                bot.extend(set.iter().copied());
            }
        }
        let top: BTreeSet<usize> = tree.leaves().iter().copied().filter(|t| !bot.contains(t)).collect();
        out.insert(PartitionCandidate::from_top(tree, &top));
    }
    Ok(out.into_iter().collect())
}

/// Pointwise average of the points in `ys`.
pub fn mix(ys: &[FractionalSolution]) -> Result<FractionalSolution> {
    let first = ys.first().ok_or(Error::EmptyCollection)?;
    let k = q(ys.len() as i64);
    let x = (0..first.x.len()).map(|v| ys.iter().map(|y| &y.x[v]).sum::<Q>() / &k).collect();
    Ok(FractionalSolution { x })
}

/// Which exploration procedure to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Guess the core part of the bottom support; emit the induced partitions.
    Basic,
    /// Also guess top-protected support vertices and mix collected points.
    Mixing,
    /// Mixing with a thinned core and dropped vertices.
    Thinned,
    /// Thinned mixing with level-wise bulk guessing under a ζ budget.
    Efficient,
}

/// Recursion budget presets for the depth-limited variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaPreset {
    /// `h·B_{<=h} + 1`.
    Basic,
    /// `h(1+ε)^h + N`.
    Mixing,
}

/// Depth budget `γ` for threshold `h` and `n_mix` mixed points.
pub fn gamma_preset(preset: GammaPreset, inst: &SrmfcInstance, eps: &Q, h: usize, n_mix: usize) -> Q {
    let hq = q(h as i64);
    match preset {
        GammaPreset::Basic => &hq * inst.prefix(h) + Q::one(),
        GammaPreset::Mixing => &hq * pow(&(Q::one() + eps), h as i64) + q(n_mix as i64),
    }
}

/// Search configuration.
#[derive(Debug, Clone)]
pub struct ExploreConfig {
    pub variant: Variant,
    /// Level threshold for `Basic` and `Mixing` (the others use `ĥ`).
    pub h: usize,
    /// `γ` for the depth-limited variants, `ζ` for `Efficient`.
    pub budget: Q,
    /// Number of mixed points before a partition is emitted.
    pub n_mix: usize,
    pub max_nodes: usize,
    pub max_partitions: usize,
    /// Largest bottom support enumerated at one node.
    pub max_support: usize,
    /// Skip states already explored with at least the same budget.
    pub memo: bool,
    /// Emit only `(Γ, ∅)` when every level is a bottom level.
    pub shortcut: bool,
}

impl ExploreConfig {
    /// Standard parameters for `variant`: `h = ĥ`, `N = ⌈4/ε⌉` and `ζ̄` for the
    /// thinned variants; `N = ⌈1/ε⌉` and the mixing `γ` for `Mixing`; the
    /// basic `γ` for `Basic`.
    pub fn standard(variant: Variant, inst: &SrmfcInstance, th: &ExploreThresholds) -> Self {
        let n1 = ceil_i64(&th.eps.recip()) as usize;
        let (h, budget, n_mix) = match variant {
            Variant::Basic => (th.h_hat, gamma_preset(GammaPreset::Basic, inst, &th.eps, th.h_hat, 1), 1),
            Variant::Mixing => (th.h_hat, gamma_preset(GammaPreset::Mixing, inst, &th.eps, th.h_hat, n1), n1),
            Variant::Thinned => (th.h_hat, gamma_preset(GammaPreset::Mixing, inst, &th.eps, th.h_hat, th.n_mix), th.n_mix),
            Variant::Efficient => (th.h_hat, q(ceil_i64(&th.zeta_bar)), th.n_mix),
        };
        ExploreConfig {
            variant,
            h,
            budget,
            n_mix,
            max_nodes: 20_000,
            max_partitions: 5_000,
            max_support: 8,
            memo: true,
            shortcut: true,
        }
    }
}

/// Outcome of one exploration run.
#[derive(Debug, Clone, Default)]
pub struct ExploreResult {
    /// Emitted partitions, deduplicated and sorted.
    pub partitions: Vec<PartitionCandidate>,
    /// For mixing variants, the first mixed point that produced each partition.
    pub mixtures: BTreeMap<PartitionCandidate, FractionalSolution>,
    /// Number of recursive calls made.
    pub nodes: usize,
    /// True when a limit stopped the search before the configured budget.
    pub truncated: bool,
    /// Sparsified points checked against the sparsification bounds.
    pub points_checked: usize,
    /// Sparsified points violating a sparsification bound or `y(D) = 0`.
    pub point_violations: usize,
    /// Calls whose subtree exceeded the inductive bound `C^ζ·D^s`
    /// (efficient variant only).
    pub bound_violations: usize,
    /// Calls checked against the inductive bound.
    pub bound_checked: usize,
    /// True when ε lies in the range covered by the proven guarantees.
    pub eps_in_range: bool,
}

/// Constants `C = 2^{⌊N/ε³⌋+1}` and `D = 3^{s_max+1}` of the call-count
/// bound, with `s_max` the support bound of the sparsified points on
/// `V_{<=ĥ}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeBound {
    pub c_exp: u64,
    pub s_max: u64,
}

impl NodeBound {
    pub fn new(inst: &SrmfcInstance, th: &ExploreThresholds) -> Self {
        let e = &th.eps;
        let c_exp = floor_i64(&(q(th.n_mix as i64) / (e * e * e))) as u64 + 1;
        let s = (Q::one() + q(3) * e) / &th.eps_s
            * (q(th.h_check as i64) * inst.prefix(th.h_check) + inst.prefix(th.h_hat));
        NodeBound { c_exp, s_max: ceil_i64(&s) as u64 }
    }

    /// True iff `calls <= C^ζ · D^s`, compared exactly.
    pub fn holds(&self, calls: usize, zeta: u64, s: u64) -> bool {
        let log2_c = self.c_exp.saturating_mul(zeta);
        if log2_c >= 64 {
            return true;
        }
        let c = BigUint::one() << (log2_c as usize);
        let d_exp = (self.s_max + 1).saturating_mul(s);
        if d_exp >= 64 {
            return true;
        }
        let d = BigUint::from(3u32).pow(d_exp as u32);
        BigUint::from(calls) <= c * d
    }
}

/// Label vectors over `k` classes for `m` items, ordered by the number of
/// non-zero labels and then lexicographically.
pub(crate) fn assignments(m: usize, k: u32) -> Vec<Vec<u32>> {
    let total = (k as usize).pow(m as u32);
    let mut out: Vec<Vec<u32>> = (0..total)
        .map(|mut c| {
            (0..m)
                .map(|_| {
                    let d = (c % k as usize) as u32;
                    c /= k as usize;
                    d
                })
                .collect()
        })
        .collect();
    out.sort_by_key(|a| (a.iter().filter(|&&d| d != 0).count(), a.clone()));
    out
}

fn pick(s: &[usize], labels: &[u32], want: u32) -> Vec<usize> {
    s.iter().zip(labels).filter(|(_, &l)| l == want).map(|(&v, _)| v).collect()
}

type MemoKey = (Vec<usize>, Vec<FractionalSolution>);

struct Engine<'a> {
    inst: &'a SrmfcInstance,
    th: &'a ExploreThresholds,
    cfg: &'a ExploreConfig,
    bound: NodeBound,
    memo: BTreeMap<MemoKey, Q>,
    out: BTreeMap<PartitionCandidate, Option<FractionalSolution>>,
    res: ExploreResult,
    stopped: bool,
}

/// Sparsified point of the exploration: sparsification with `ε_s` on the
/// band `(ȟ, ĥ]`, scaled by `1/(1 − 2ε_s)`.
pub fn sparsified_point(inst: &SrmfcInstance, x: &FractionalSolution, th: &ExploreThresholds) -> FractionalSolution {
    let y = sparsify_unchecked(inst, x, &th.eps_s, &Q::one(), th.h_hat, th.h_check);
    y.scaled(&(Q::one() - q(2) * &th.eps_s).recip())
}

/// Checks the sparsification bounds of `y` against `x` and `D`: support
/// inclusion, the two value floors, membership in `Q_{1+3ε}^D(Γ)`.
pub fn sparsified_point_ok(
    inst: &SrmfcInstance,
    x: &FractionalSolution,
    y: &FractionalSolution,
    forbidden: &BTreeSet<usize>,
    th: &ExploreThresholds,
) -> bool {
    let tree = &inst.tree;
    let supp_x: BTreeSet<usize> = x.support().into_iter().collect();
    let low_floor = &th.eps_s / q(th.h_check.max(1) as i64);
    let ok_support = y.support().into_iter().all(|v| {
        supp_x.contains(&v)
            && if tree.level(v) <= th.h_check {
                y.x[v] >= low_floor
            } else if tree.level(v) <= th.h_hat {
                y.x[v] >= th.eps_s
            } else {
                true
            }
    });
    let p = TreePolytope::new(inst, Q::one() + q(3) * &th.eps).with_forbidden(forbidden.iter().copied());
    ok_support && p.contains(y)
}

impl<'a> Engine<'a> {
    fn h(&self) -> usize {
        match self.cfg.variant {
            Variant::Basic | Variant::Mixing => self.cfg.h.min(self.inst.height()),
            Variant::Thinned | Variant::Efficient => self.th.h_hat,
        }
    }

    fn emit(&mut self, p: PartitionCandidate, mixture: Option<FractionalSolution>) {
        if self.out.len() >= self.cfg.max_partitions && !self.out.contains_key(&p) {
            self.res.truncated = true;
            self.stopped = true;
            return;
        }
        self.out.entry(p).or_insert(mixture);
    }

    fn emit_mixed(&mut self, ys: &[FractionalSolution]) {
        let ybar = mix(ys).expect("nonempty");
        let top = gamma_top(&self.inst.tree, &ybar, self.h(), &self.th.eps);
        let p = PartitionCandidate::from_top(&self.inst.tree, &top);
        self.emit(p, Some(ybar));
    }

    /// Feasible point of `Q_1^D(Γ)` minimizing mass on the bottom levels.
    fn point(&mut self, d: &BTreeSet<usize>) -> Option<FractionalSolution> {
        let tree = &self.inst.tree;
        let h = self.h();
        let obj: Vec<(usize, Q)> = tree.non_root().filter(|&v| tree.level(v) <= h).map(|v| (v, Q::one())).collect();
        let p = TreePolytope::new(self.inst, Q::one()).with_forbidden(d.iter().copied()).with_objective(obj);
        solve_vertex(&p)
    }

    /// Returns the number of calls in this subtree.
    fn node(&mut self, d: &BTreeSet<usize>, budget: &Q, ys: &[FractionalSolution]) -> usize {
        if self.stopped {
            return 0;
        }
        if self.res.nodes >= self.cfg.max_nodes {
            self.res.truncated = true;
            self.stopped = true;
            return 0;
        }
        if self.cfg.memo {
            let mut sorted = ys.to_vec();
            sorted.sort();
            let key = (d.iter().copied().collect::<Vec<_>>(), sorted);
            match self.memo.get(&key) {
                Some(seen) if seen >= budget => return 0,
                _ => {
                    self.memo.insert(key, budget.clone());
                }
            }
        }
        self.res.nodes += 1;
        let mut calls = 1;
        let depth_limited = self.cfg.variant != Variant::Efficient;
        if depth_limited && budget <= &Q::zero() {
            return calls;
        }
        let Some(x) = self.point(d) else { return calls };
        if self.cfg.shortcut && self.h() >= self.inst.height() {
            let all: BTreeSet<usize> = BTreeSet::new();
            self.emit(PartitionCandidate::from_top(&self.inst.tree, &all), None);
            return calls;
        }
        let y = sparsified_point(self.inst, &x, self.th);
        self.res.points_checked += 1;
        if !sparsified_point_ok(self.inst, &x, &y, d, self.th) {
            self.res.point_violations += 1;
        }
        let tree = &self.inst.tree;
        let s = bottom_support(tree, &y, self.h());
        let fits = s.len() <= self.cfg.max_support;
        if !fits {
            self.res.truncated = true;
        }
        let dec = budget - Q::one();
        match self.cfg.variant {
            Variant::Basic => {
                let lists = if fits { assignments(s.len(), 2) } else { vec![vec![0; s.len()]] };
                for labels in lists {
                    let a_core = pick(&s, &labels, 1);
                    if a_core.is_empty() {
                        match partitions_from_point(tree, &y, self.h(), self.cfg.max_support) {
                            Ok(ps) => ps.into_iter().for_each(|p| self.emit(p, None)),
                            Err(_) => self.res.truncated = true,
                        }
                    } else {
                        let mut d2 = d.clone();
                        d2.extend(a_core);
                        calls += self.node(&d2, &dec, ys);
                    }
                }
            }
            Variant::Mixing | Variant::Thinned => {
                let k = if self.cfg.variant == Variant::Mixing { 3 } else { 4 };
                let lists = if fits { assignments(s.len(), k) } else { vec![vec![0; s.len()]] };
                for labels in lists {
                    let a_core = pick(&s, &labels, 1);
                    let a_top = pick(&s, &labels, 2);
                    let a_drop = pick(&s, &labels, 3);
                    let mut d2 = d.clone();
                    d2.extend(a_core.iter().copied());
                    d2.extend(blocked_top(tree, &a_top, self.h()));
                    d2.extend(blocked_dropped(tree, &a_drop, self.th));
                    let mut y2 = ys.to_vec();
                    if a_core.is_empty() {
                        y2.push(y.clone());
                    }
                    if y2.len() >= self.cfg.n_mix {
                        self.emit_mixed(&y2);
                    } else {
                        calls += self.node(&d2, &dec, &y2);
                    }
                }
            }
            Variant::Efficient => {
                calls += self.efficient_branches(d, budget, ys, &y, &s, fits);
            }
        }
        if self.cfg.variant == Variant::Efficient && !self.cfg.memo && !self.res.truncated {
            let zeta = budget.to_integer().to_u64().unwrap_or(u64::MAX);
            let s_left = (self.cfg.n_mix - ys.len()) as u64;
            self.res.bound_checked += 1;
            if !self.bound.holds(calls, zeta, s_left) {
                self.res.bound_violations += 1;
            }
        }
        calls
    }

    fn efficient_branches(
        &mut self,
        d: &BTreeSet<usize>,
        zeta: &Q,
        ys: &[FractionalSolution],
        y: &FractionalSolution,
        s: &[usize],
        fits: bool,
    ) -> usize {
        let tree = &self.inst.tree;
        let mut calls = 0;
        let n = q(self.cfg.n_mix as i64);
        for l in 1..=self.th.h_hat {
            let sl: Vec<usize> = s.iter().copied().filter(|&v| tree.level(v) == l).collect();
            let size = q(sl.len() as i64);
            if sl.is_empty() || size > *zeta {
                continue;
            }
            if sl.len() > self.cfg.max_support {
                self.res.truncated = true;
                continue;
            }
            let need = &self.th.eps / &n * self.inst.budget(l);
            let rest = zeta - &size;
            for labels in assignments(sl.len(), 2) {
                let a = pick(&sl, &labels, 1);
                if q(a.len() as i64) < need || a.is_empty() {
                    continue;
                }
                let mut d2 = d.clone();
                d2.extend(a);
                calls += self.node(&d2, &rest, ys);
            }
        }
        let mut y2 = ys.to_vec();
        y2.push(y.clone());
        if y2.len() >= self.cfg.n_mix {
            self.emit_mixed(&y2);
            return calls;
        }
        let lists = if fits { assignments(s.len(), 3) } else { vec![vec![0; s.len()]] };
        for labels in lists {
            let a_top = pick(s, &labels, 1);
            let a_drop = pick(s, &labels, 2);
            let mut d2 = d.clone();
            d2.extend(blocked_top(tree, &a_top, self.th.h_hat));
            d2.extend(blocked_dropped(tree, &a_drop, self.th));
            calls += self.node(&d2, zeta, &y2);
        }
        calls
    }
}

/// Runs the selected exploration from `D = ∅`, `Y = ∅`.
pub fn explore(inst: &SrmfcInstance, th: &ExploreThresholds, cfg: &ExploreConfig) -> ExploreResult {
    let mut engine = Engine {
        inst,
        th,
        cfg,
        bound: NodeBound::new(inst, th),
        memo: BTreeMap::new(),
        out: BTreeMap::new(),
        res: ExploreResult { eps_in_range: th.in_guarantee_range(), ..Default::default() },
        stopped: false,
    };
    engine.node(&BTreeSet::new(), &cfg.budget, &[]);
    let mut res = engine.res;
    res.partitions = engine.out.keys().cloned().collect();
    res.mixtures = engine.out.into_iter().filter_map(|(p, m)| m.map(|m| (p, m))).collect();
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress_tree::compress;
    use crate::dp_tree::dp_exact;
    use crate::lp_tree::band_instance;
    use crate::tree_core::build_tree;
    use crate::tree_core::fixtures::*;

    fn compressed_path(len: usize, eps: &Q) -> SrmfcInstance {
        let edges: Vec<(usize, usize)> = (0..len).map(|i| (i, i + 1)).collect();
        let t = build_tree(len + 1, &edges, 0).unwrap();
        let b = (1..=len)
            .map(|l| if l == 1 { Q::one() } else { pow(&(Q::one() + eps), l as i64 - 1) - pow(&(Q::one() + eps), l as i64 - 2) })
            .collect();
        SrmfcInstance::new(t, b).unwrap()
    }

    #[test]
    fn threshold_examples() {
        let i = compressed_path(10, &qf(1, 7));
        let th = thresholds(&qf(1, 7), &i);
        assert_eq!(th.h_hat_raw, 48);
        assert_eq!(th.h_hat, 10);
        assert_eq!(th.n_mix, 28);
        let big = compressed_path(100, &qf(1, 2));
        let th = thresholds(&qf(1, 2), &big);
        assert_eq!(th.h_hat_raw, 16);
        assert_eq!(th.h_hat, 16);
        assert!(th.h_check <= th.h_hat);
    }

    #[test]
    fn gamma_top_boundary() {
        let t = p3();
        let mut y = FractionalSolution::zeros(4);
        y.x[3] = Q::one();
        assert!(gamma_top(&t, &y, 2, &qf(1, 2)).contains(&3));
        y.x[3] = qf(1, 2);
        assert!(gamma_top(&t, &y, 2, &qf(1, 2)).contains(&3));
        y.x[3] = Q::zero();
        assert!(gamma_top(&t, &y, 2, &qf(1, 2)).is_empty());
    }

    #[test]
    fn blocked_top_examples() {
        let t = t1();
        assert!(blocked_top(&t, &[], 2).is_empty());
        assert_eq!(blocked_top(&t, &[1], 2), [1, 3, 4].into_iter().collect());
        assert_eq!(blocked_top(&t, &[3], 2), [1, 3].into_iter().collect());
    }

    #[test]
    fn blocked_dropped_examples() {
        // Chain 0 → 1 → … → 6.
        let edges: Vec<(usize, usize)> = (0..6).map(|i| (i, i + 1)).collect();
        let t = build_tree(7, &edges, 0).unwrap();
        let mut th = thresholds(&qf(1, 2), &SrmfcInstance::new(t.clone(), vec![Q::one(); 6]).unwrap());
        th.h_check = 2;
        th.h_hat = 5;
        th.kappa = 0;
        assert!(blocked_dropped(&t, &[], &th).is_empty());
        assert_eq!(blocked_dropped(&t, &[3], &th), [1, 2, 3].into_iter().collect());
        th.kappa = 1;
        assert_eq!(blocked_dropped(&t, &[3], &th), [1, 2, 3, 4].into_iter().collect());
        th.kappa = 5;
        assert_eq!(blocked_dropped(&t, &[4], &th), [1, 2, 3, 4, 5].into_iter().collect());
        assert_eq!(blocked_dropped(&t, &[1], &th), [1, 2].into_iter().collect());
        // Replay of the definition.
        for v in 1..=6 {
            let mut want: BTreeSet<usize> = t.path(v).into_iter().collect();
            for u in t.subtree(v) {
                let lu = t.level(u);
                if (t.level(v) <= 2 && lu <= 2) || (t.level(v) > 2 && lu <= 5 && lu <= t.level(v) + 5) {
                    want.insert(u);
                }
            }
            assert_eq!(blocked_dropped(&t, &[v], &th), want);
        }
    }

    #[test]
    fn partition_examples() {
        let t = t1();
        let y = FractionalSolution::zeros(6);
        let ps = partitions_from_point(&t, &y, 2, 8).unwrap();
        assert_eq!(ps, vec![PartitionCandidate { bot: vec![], top: vec![3, 4, 5] }]);
        let mut y = FractionalSolution::zeros(6);
        y.x[1] = Q::one();
        let ps = partitions_from_point(&t, &y, 2, 8).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps.contains(&PartitionCandidate { bot: vec![3, 4], top: vec![5] }));
        assert!(matches!(partitions_from_point(&t, &y, 2, 0), Err(Error::ResourceCap(_))));
    }

    #[test]
    fn mix_examples() {
        let mut y = FractionalSolution::zeros(4);
        y.x[3] = Q::one();
        assert_eq!(mix(&[y.clone()]).unwrap(), y);
        let z = FractionalSolution::zeros(4);
        assert_eq!(mix(&[y.clone(), z]).unwrap().x[3], qf(1, 2));
        assert_eq!(mix(&[]), Err(Error::EmptyCollection));
    }

    #[test]
    fn degenerate_run_emits_everything_bottom() {
        let eps = qf(1, 2);
        let i = compress(&SrmfcInstance::new(t1(), vec![q(1), q(1)]).unwrap(), &eps).unwrap().inst;
        let th = thresholds(&eps, &i);
        assert!(th.h_hat >= i.height());
        let cfg = ExploreConfig::standard(Variant::Efficient, &i, &th);
        let r = explore(&i, &th, &cfg);
        assert_eq!(r.partitions, vec![PartitionCandidate { bot: i.tree.leaves().to_vec(), top: vec![] }]);
        assert!(dp_exact(&i).unwrap().is_some());
    }

    /// Compressed path with a few side leaves: enough levels for `ĥ < L` at ε = 1/2.
    fn deep_instance(extra: &[(usize, usize)]) -> SrmfcInstance {
        let eps = qf(1, 2);
        let len = 14;
        let mut edges: Vec<(usize, usize)> = (0..len).map(|i| (i, i + 1)).collect();
        let mut n = len + 1;
        for &(p, _) in extra {
            edges.push((p, n));
            n += 1;
        }
        let t = build_tree(n, &edges, 0).unwrap();
        let b = compressed_path(len, &eps).budgets().to_vec();
        SrmfcInstance::new(t, b).unwrap()
    }

    #[test]
    fn all_variants_find_a_good_partition() {
        let eps = qf(1, 2);
        let i = deep_instance(&[(3, 0), (9, 0), (12, 0)]);
        let th = thresholds(&eps, &i);
        assert!(th.h_hat < i.height());
        for v in [Variant::Basic, Variant::Mixing, Variant::Thinned, Variant::Efficient] {
            let mut cfg = ExploreConfig::standard(v, &i, &th);
            cfg.max_nodes = 4000;
            let r = explore(&i, &th, &cfg);
            assert_eq!(r.point_violations, 0, "{v:?}");
            let good = r.partitions.iter().any(|p| {
                let bot_ok = match band_instance(&i, 0, th.h_hat, Some(&p.bot)) {
                    None => true,
                    Some(b) => dp_exact(&b.inst.scaled(&(Q::one() + q(2) * &eps))).unwrap().is_some(),
                };
                let top_ok = match band_instance(&i, th.h_hat, i.height(), Some(&p.top)) {
                    None => p.top.is_empty(),
                    Some(tp) => {
                        let targets: Vec<usize> = tp.rep.values().copied().collect();
                        let poly = TreePolytope::new(&tp.inst, Q::one() + q(7) * &eps).with_targets(targets);
                        solve_vertex(&poly).is_some()
                    }
                };
                bot_ok && top_ok && p.top.iter().all(|&t| i.tree.level(t) > th.h_hat)
            });
            assert!(good, "{v:?}: {} partitions, truncated {}", r.partitions.len(), r.truncated);
            for p in &r.partitions {
                let mut all: Vec<usize> = p.bot.iter().chain(&p.top).copied().collect();
                all.sort();
                assert_eq!(all, i.tree.leaves());
            }
            for (p, m) in &r.mixtures {
                assert_eq!(PartitionCandidate::from_top(&i.tree, &gamma_top(&i.tree, m, cfg.h, &eps)), *p);
            }
        }
    }

    #[test]
    fn node_bound_instrumented() {
        let eps = qf(1, 2);
        let i = deep_instance(&[(2, 0), (11, 0)]);
        let th = thresholds(&eps, &i);
        let mut cfg = ExploreConfig::standard(Variant::Efficient, &i, &th);
        cfg.memo = false;
        cfg.budget = q(2);
        cfg.n_mix = 2;
        cfg.max_nodes = 5000;
        let r = explore(&i, &th, &cfg);
        assert!(!r.truncated);
        assert!(r.bound_checked > 0);
        assert_eq!(r.bound_violations, 0);
        let b = NodeBound::new(&i, &th);
        assert!(b.holds(1, 0, 0));
        assert!(!NodeBound { c_exp: 1, s_max: 0 }.holds(100, 1, 1));
    }

    #[test]
    fn assignments_ordered_by_size() {
        let a = assignments(2, 3);
        assert_eq!(a.len(), 9);
        assert_eq!(a[0], vec![0, 0]);
        assert!(a.windows(2).all(|w| w[0].iter().filter(|&&d| d != 0).count() <= w[1].iter().filter(|&&d| d != 0).count()));
    }
}

//! Tree polytopes `Q_α^D(Γ′)` / `Q_{α,δ}`, loose/tight classification,
//! sparsification and the loose-vertex roundings.

pub mod simplex;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{ceil_log, ceil_to, floor_to, q, qf, Q};
use crate::tree_core::{build_tree, check_protection, ProtectionSet, RootedTree, SrmfcInstance};
use simplex::{Lp, LpOutcome, Sense};

static VERTICES_CHECKED: AtomicUsize = AtomicUsize::new(0);
static LOOSE_VIOLATIONS: AtomicUsize = AtomicUsize::new(0);

/// `(vertices checked, vertices with more than L loose support vertices)`
/// over every `solve_vertex` call in this process.
pub fn sparsity_counters() -> (usize, usize) {
    (VERTICES_CHECKED.load(Ordering::Relaxed), LOOSE_VIOLATIONS.load(Ordering::Relaxed))
}

/// Nonnegative point indexed by vertex id (the root entry stays zero).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FractionalSolution {
    pub x: Vec<Q>,
}

impl FractionalSolution {
    pub fn zeros(n: usize) -> Self {
        FractionalSolution { x: vec![Q::zero(); n] }
    }

    /// Vertices with positive value, increasing id.
    pub fn support(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&v| self.x[v].is_positive()).collect()
    }

    /// `x(U)`.
    pub fn mass<I: IntoIterator<Item = usize>>(&self, u: I) -> Q {
        u.into_iter().map(|v| self.x[v].clone()).sum()
    }

    /// `x(P_v)`.
    pub fn path_sum(&self, tree: &RootedTree, v: usize) -> Q {
        self.mass(tree.path(v))
    }

    /// `x(P_v ∩ V_{>lo} ∩ V_{<=hi})`.
    pub fn path_sum_between(&self, tree: &RootedTree, v: usize, lo: usize, hi: usize) -> Q {
        self.mass(tree.path(v).into_iter().filter(|&u| tree.level(u) > lo && tree.level(u) <= hi))
    }

    /// `x(V_{<=l})`.
    pub fn prefix_mass(&self, tree: &RootedTree, l: usize) -> Q {
        self.mass(tree.non_root().filter(|&v| tree.level(v) <= l))
    }

    pub fn scaled(&self, s: &Q) -> Self {
        FractionalSolution { x: self.x.iter().map(|v| v * s).collect() }
    }

    /// Smallest `α` with `x(V_{<=l}) <= α B_{<=l}` for all levels, or
    /// `None` if some zero prefix budget carries mass.
    pub fn stretch(&self, inst: &SrmfcInstance) -> Option<Q> {
        let mut best = Q::zero();
        for l in 1..=inst.height() {
            let m = self.prefix_mass(&inst.tree, l);
            if m.is_zero() {
                continue;
            }
            let b = inst.prefix(l);
            if b.is_zero() {
                return None;
            }
            let r = m / b;
            if r > best {
                best = r;
            }
        }
        Some(best)
    }
}

/// The polytope `Q_{α,δ}^D(Γ′)` of a tree instance.
#[derive(Debug, Clone)]
pub struct TreePolytope<'a> {
    pub inst: &'a SrmfcInstance,
    pub alpha: Q,
    /// Leaves carrying a coverage constraint.
    pub targets: Vec<usize>,
    /// Coverage requirement per vertex id; only target entries are read.
    pub delta: Vec<Q>,
    /// `D` as a per-vertex flag.
    pub forbidden: Vec<bool>,
    /// Optional linear objective to minimize while picking the vertex.
    pub objective: Option<Vec<(usize, Q)>>,
}

impl<'a> TreePolytope<'a> {
    /// `Q_α(Γ)` with `δ ≡ 1` and `D = ∅`.
    pub fn new(inst: &'a SrmfcInstance, alpha: Q) -> Self {
        let n = inst.tree.vertex_count();
        TreePolytope {
            inst,
            alpha,
            targets: inst.tree.leaves().to_vec(),
            delta: vec![Q::one(); n],
            forbidden: vec![false; n],
            objective: None,
        }
    }

    pub fn with_targets(mut self, targets: Vec<usize>) -> Self {
        self.targets = targets;
        self
    }

    pub fn with_delta(mut self, delta: Vec<Q>) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_forbidden<I: IntoIterator<Item = usize>>(mut self, d: I) -> Self {
        for v in d {
            self.forbidden[v] = true;
        }
        self
    }

    /// Restricts the support to `s` by forbidding its complement.
    pub fn within_support(mut self, s: &[usize]) -> Self {
        let keep: BTreeSet<usize> = s.iter().copied().collect();
        for v in 0..self.forbidden.len() {
            if !keep.contains(&v) {
                self.forbidden[v] = true;
            }
        }
        self
    }

    pub fn with_objective(mut self, obj: Vec<(usize, Q)>) -> Self {
        self.objective = Some(obj);
        self
    }

    /// The polytope as an LP over one variable per vertex id.
    pub fn to_lp(&self) -> Lp {
        let tree = &self.inst.tree;
        let n = tree.vertex_count();
        let mut lp = Lp::new(n);
        lp.forbid(tree.root());
        for v in 0..n {
            if self.forbidden[v] {
                lp.forbid(v);
            }
        }
        for l in 1..=tree.height() {
            let coeffs = tree.non_root().filter(|&v| tree.level(v) <= l).map(|v| (v, Q::one())).collect();
            lp.add(coeffs, Sense::Le, &self.alpha * self.inst.prefix(l));
        }
        for &t in &self.targets {
            if self.delta[t].is_positive() {
                lp.add(tree.path(t).into_iter().map(|v| (v, Q::one())).collect(), Sense::Ge, self.delta[t].clone());
            }
        }
        lp.objective = self.objective.clone();
        lp
    }

    /// True iff `x` lies in the polytope.
    pub fn contains(&self, x: &FractionalSolution) -> bool {
        let tree = &self.inst.tree;
        if x.x.iter().any(|v| v.is_negative()) || !x.x[tree.root()].is_zero() {
            return false;
        }
        if (0..x.x.len()).any(|v| self.forbidden[v] && !x.x[v].is_zero()) {
            return false;
        }
        (1..=tree.height()).all(|l| x.prefix_mass(tree, l) <= &self.alpha * self.inst.prefix(l))
            && self.targets.iter().all(|&t| x.path_sum(tree, t) >= self.delta[t])
    }
}

/// A vertex of the polytope, or `None` when it is empty.
pub fn solve_vertex(p: &TreePolytope) -> Option<FractionalSolution> {
    let n = p.inst.tree.vertex_count();
    let x = if p.targets.iter().all(|&t| !p.delta[t].is_positive()) && p.objective.is_none() {
        FractionalSolution::zeros(n)
    } else {
        match p.to_lp().solve() {
            LpOutcome::Optimal(x) => FractionalSolution { x },
            LpOutcome::Infeasible => return None,
            LpOutcome::Unbounded => unreachable!("prefix budgets bound every variable"),
        }
    };
    let (loose, _) = classify_supports(&x, p);
    VERTICES_CHECKED.fetch_add(1, Ordering::Relaxed);
    if loose.len() > p.inst.height() {
        LOOSE_VIOLATIONS.fetch_add(1, Ordering::Relaxed);
    }
    Some(x)
}

/// Splits `supp(x)` into loose and tight vertices with respect to the
/// targets of `p`: `v` is tight iff `x(P_v) = δ_t` for some target leaf `t`
/// below `v`.
pub fn classify_supports(x: &FractionalSolution, p: &TreePolytope) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let tree = &p.inst.tree;
    let mut loose = BTreeSet::new();
    let mut tight = BTreeSet::new();
    for v in x.support() {
        let pv = x.path_sum(tree, v);
        let is_tight = p.targets.iter().any(|&t| tree.is_ancestor_or_self(v, t) && pv == p.delta[t]);
        if is_tight {
            tight.insert(v);
        } else {
            loose.insert(v);
        }
    }
    (loose, tight)
}

/// Levels `(lo, hi]` of a tree as a stand-alone instance.
#[derive(Debug, Clone)]
pub struct SubInstance {
    pub inst: SrmfcInstance,
    /// New id → original id (the new root maps to the original root).
    pub to_orig: Vec<usize>,
    /// Original target leaf → its representative leaf in the sub-instance.
    pub rep: BTreeMap<usize, usize>,
}

impl SubInstance {
    /// Original vertex → new id.
    pub fn from_orig(&self) -> BTreeMap<usize, usize> {
        self.to_orig.iter().enumerate().skip(1).map(|(i, &v)| (v, i)).collect()
    }

    /// Lifts a set of new ids to original ids.
    pub fn lift(&self, r: &ProtectionSet) -> ProtectionSet {
        r.iter().map(|&v| self.to_orig[v]).collect()
    }

    /// Restricts an original point to the sub-instance.
    pub fn restrict(&self, x: &FractionalSolution) -> FractionalSolution {
        let mut out = FractionalSolution::zeros(self.to_orig.len());
        for (i, &v) in self.to_orig.iter().enumerate().skip(1) {
            out.x[i] = x.x[v].clone();
        }
        out
    }
}

/// Builds the instance on levels `(lo, hi]`: the first `lo` levels are
/// contracted into a new root and levels above `hi` are deleted. With
/// `targets`, only band vertices on paths to the targets' representatives
/// are kept (a target's representative is itself, or its ancestor on
/// level `hi`). Targets on levels `<= lo` are skipped. Returns `None` when
/// nothing remains.
pub fn band_instance(inst: &SrmfcInstance, lo: usize, hi: usize, targets: Option<&[usize]>) -> Option<SubInstance> {
    let tree = &inst.tree;
    let hi = hi.min(tree.height());
    if lo >= hi {
        return None;
    }
    let in_band = |v: usize| v != tree.root() && tree.level(v) > lo && tree.level(v) <= hi;
    let mut keep = vec![false; tree.vertex_count()];
    let mut reps = BTreeMap::new();
    match targets {
        None => {
            for v in tree.non_root() {
                keep[v] = in_band(v);
            }
        }
        Some(ts) => {
            for &t in ts {
                if tree.level(t) <= lo {
                    continue;
                }
                let r = tree.ancestor_at(t, hi);
                reps.insert(t, r);
                for u in tree.path(r) {
                    if tree.level(u) <= lo {
                        break;
                    }
                    keep[u] = true;
                }
            }
        }
    }
    let kept: Vec<usize> = tree.bfs_order().into_iter().filter(|&v| keep[v]).collect();
    if kept.is_empty() {
        return None;
    }
    let mut to_orig = vec![tree.root()];
    to_orig.extend(kept.iter().copied());
    let mut index = BTreeMap::new();
    for (i, &v) in to_orig.iter().enumerate().skip(1) {
        index.insert(v, i);
    }
    let edges: Vec<(usize, usize)> = kept
        .iter()
        .map(|&v| {
            let p = tree.parent(v).unwrap();
            let np = if tree.level(p) <= lo { 0 } else { index[&p] };
            (np, index[&v])
        })
        .collect();
    let sub_tree = build_tree(to_orig.len(), &edges, 0).expect("band is a tree");
    let h = sub_tree.height();
    let budgets = inst.budgets()[lo..lo + h].to_vec();
    let sub = SrmfcInstance::new(sub_tree, budgets).expect("band budgets");
    let rep = match targets {
        None => sub.tree.leaves().iter().map(|&l| (to_orig[l], l)).collect(),
        Some(_) => reps.into_iter().map(|(t, r)| (t, index[&r])).collect(),
    };
    Some(SubInstance { inst: sub, to_orig, rep })
}

/// Sparsification of `x ∈ Q_{1,δ}` on the band `(h2, h1]` with an explicit
/// precondition check. `delta` is indexed by vertex id.
pub fn sparsify(
    inst: &SrmfcInstance,
    x: &FractionalSolution,
    delta: &[Q],
    eps: &Q,
    gamma: &Q,
    h1: usize,
    h2: usize,
) -> Result<FractionalSolution> {
    let l = inst.height();
    let pre = |m: &str| Err(Error::PreconditionViolated(m.into()));
    if !(eps.is_positive() && *eps <= qf(1, 7)) {
        return pre("sparsify needs 0 < eps <= 1/7");
    }
    if !(gamma.is_positive() && *gamma <= Q::one()) {
        return pre("sparsify needs gamma in (0, 1]");
    }
    if !(1 <= h2 && h2 <= h1 && h1 <= l) {
        return pre("sparsify needs 1 <= h2 <= h1 <= L");
    }
    if h1 != l && *inst.budget(h1 + 1) < q(l as i64) / eps {
        return pre("B_{h1+1} < L/eps");
    }
    if h2 != h1 && *inst.budget(h2 + 1) < q(h1 as i64) / eps {
        return pre("B_{h2+1} < h1/eps");
    }
    let p = TreePolytope::new(inst, Q::one()).with_delta(delta.to_vec());
    if !p.contains(x) {
        return pre("x is not in Q_{1,delta}");
    }
    Ok(sparsify_unchecked(inst, x, eps, gamma, h1, h2))
}

/// The sparsification steps without precondition checks: band vertex with
/// support inside `supp(x)`, loose-up / tight-down rounding to multiples of
/// `εγ`, and rounding of `V_{<=h2}` down to multiples of `εγ/h2`.
pub fn sparsify_unchecked(
    inst: &SrmfcInstance,
    x: &FractionalSolution,
    eps: &Q,
    gamma: &Q,
    h1: usize,
    h2: usize,
) -> FractionalSolution {
    let tree = &inst.tree;
    let unit = eps * gamma;
    let mut y = x.clone();
    if let Some(band) = band_instance(inst, h2, h1, None) {
        let xb = band.restrict(x);
        // Budgets of the band are x's own usage there.
        let bt = &band.inst.tree;
        let mut usage = Vec::with_capacity(bt.height());
        let mut prev = Q::zero();
        for j in 1..=bt.height() {
            let cur = xb.prefix_mass(bt, j);
            usage.push(&cur - &prev);
            prev = cur;
        }
        let g = band.inst.with_budgets(usage).expect("usage budgets");
        let mut delta = vec![Q::zero(); bt.vertex_count()];
        for &t in bt.leaves() {
            delta[t] = floor_to(&xb.path_sum(bt, t), &unit);
        }
        let supp = xb.support();
        let p = TreePolytope::new(&g, Q::one()).with_delta(delta).within_support(&supp);
        let xv = solve_vertex(&p).expect("x itself is feasible for the band polytope");
        let (loose, tight) = classify_supports(&xv, &p);
        for (i, &v) in band.to_orig.iter().enumerate().skip(1) {
            y.x[v] = if loose.contains(&i) {
                ceil_to(&xv.x[i], &unit)
            } else if tight.contains(&i) {
                floor_to(&xv.x[i], &unit)
            } else {
                Q::zero()
            };
        }
    }
    if h2 == 0 {
        return y;
    }
    let low_unit = &unit / q(h2 as i64);
    for v in tree.non_root() {
        if tree.level(v) <= h2 {
            y.x[v] = floor_to(&y.x[v], &low_unit);
        }
    }
    y
}

/// Integral rounding of a vertex of `Q_α(Γ′)` (`δ ≡ 1`): tight vertices with
/// value one plus every loose vertex.
pub fn round_loose(x: &FractionalSolution, p: &TreePolytope) -> Result<ProtectionSet> {
    if p.targets.iter().any(|&t| p.delta[t] != Q::one()) {
        return Err(Error::PreconditionViolated("round_loose needs unit coverage".into()));
    }
    if !p.contains(x) {
        return Err(Error::PreconditionViolated("x is not in the polytope".into()));
    }
    let (loose, tight) = classify_supports(x, p);
    let r: ProtectionSet = loose.into_iter().chain(tight.into_iter().filter(|&v| x.x[v] == Q::one())).collect();
    let tree = &p.inst.tree;
    let covered = p.targets.iter().all(|&t| tree.path(t).iter().any(|v| r.contains(v)));
    if !covered {
        return Err(Error::PreconditionViolated("x is not a vertex: some target is unprotected".into()));
    }
    Ok(r)
}

/// Rounds `Q_α(Γ′)` for a sub-instance: computes a vertex and rounds it.
pub fn round_instance(inst: &SrmfcInstance, alpha: &Q, targets: Vec<usize>) -> Result<Option<ProtectionSet>> {
    let p = TreePolytope::new(inst, alpha.clone()).with_targets(targets);
    match solve_vertex(&p) {
        None => Ok(None),
        Some(x) => round_loose(&x, &p).map(Some),
    }
}

/// Level thresholds `h_0 = L`, `h_i = ⌈log_{1+ε}(h_{i−1}/ε²)⌉ + 1`, each
/// clamped to `L`.
pub fn layer_heights(l: usize, k: usize, eps: &Q) -> Vec<usize> {
    let base = Q::one() + eps;
    let mut h = vec![l];
    for i in 1..=k {
        let prev = q(h[i - 1] as i64);
        let v = ceil_log(&base, &(prev / (eps * eps))) + 1;
        h.push((v.max(0) as usize).min(l));
    }
    h
}

/// Slice-wise stretch of `y` for the layered rounding: the maximum over
/// slices `(h_i, h_{i−1}]` of the stretch of `y` restricted to the slice,
/// measured against the slice's own budgets `B_{h_i+1}, …, B_{h_{i−1}}`.
pub fn layered_stretch(y: &FractionalSolution, k: usize, eps: &Q, inst: &SrmfcInstance) -> Option<Q> {
    let h = layer_heights(inst.height(), k, eps);
    let mut best = Q::zero();
    for i in 1..=k {
        if let Some(sub) = band_instance(inst, h[i], h[i - 1], None) {
            let s = sub.restrict(y).stretch(&sub.inst)?;
            if s > best {
                best = s;
            }
        }
    }
    Some(best)
}

/// Layered rounding: with `y` covering every leaf and no support on
/// `V_{<=h_k}`, returns a protecting set avoiding `V_{<=h_k}` of stretch at
/// most `kα + ε` on an ε-compressed instance, where `α` is
/// [`layered_stretch`].
pub fn round_layered(y: &FractionalSolution, k: usize, eps: &Q, inst: &SrmfcInstance) -> Result<ProtectionSet> {
    let tree = &inst.tree;
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be positive".into()));
    }
    let h = layer_heights(tree.height(), k, eps);
    if y.support().iter().any(|&v| tree.level(v) <= h[k]) {
        return Err(Error::PreconditionViolated("y has support on V_{<=h_k}".into()));
    }
    let alpha = layered_stretch(y, k, eps, inst)
        .ok_or_else(|| Error::PreconditionViolated("y uses a zero budget".into()))?;
    if !TreePolytope::new(inst, y.stretch(inst).unwrap_or_default()).contains(y) {
        return Err(Error::PreconditionViolated("y does not cover every leaf".into()));
    }
    let thresh = qf(1, k as i64);
    let mut out = ProtectionSet::new();
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    for i in 1..=k {
        let gamma_i: Vec<usize> = tree
            .leaves()
            .iter()
            .copied()
            .filter(|&t| y.path_sum_between(tree, t, h[i], h[i - 1]) >= thresh)
            .collect();
        if gamma_i.is_empty() {
            continue;
        }
        let sub = band_instance(inst, h[i], h[i - 1], Some(&gamma_i)).expect("slice carries the leaf mass");
        let targets: Vec<usize> = gamma_i.iter().map(|t| sub.rep[t]).collect::<BTreeSet<_>>().into_iter().collect();
        let ka = q(k as i64) * &alpha;
        let r = round_instance(&sub.inst, &ka, targets)?
            .ok_or_else(|| Error::PreconditionViolated("slice polytope empty".into()))?;
        out.extend(sub.lift(&r));
        covered.extend(gamma_i);
    }
    debug_assert_eq!(covered.len(), tree.leaves().len());
    debug_assert!(check_protection(tree, &out));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_core::fixtures::*;
    use crate::tree_core::stretch_of;

    #[test]
    fn star_vertex() {
        let inst = SrmfcInstance::new(t2(), vec![q(3)]).unwrap();
        let p = TreePolytope::new(&inst, q(1));
        let x = solve_vertex(&p).unwrap();
        assert_eq!(x.x, vec![q(0), q(1), q(1), q(1)]);
        assert!(simplex::is_vertex(&p.to_lp(), &x.x));
        let (loose, tight) = classify_supports(&x, &p);
        assert!(loose.is_empty());
        assert_eq!(tight.len(), 3);
        assert_eq!(round_loose(&x, &p).unwrap(), [1, 2, 3].into_iter().collect());
        assert!(solve_vertex(&TreePolytope::new(&inst, qf(1, 2))).is_none());
    }

    #[test]
    fn path_unique_point() {
        let inst = SrmfcInstance::new(p3(), vec![q(1), q(1), q(1)]).unwrap();
        let p = TreePolytope::new(&inst, qf(1, 3));
        let x = solve_vertex(&p).unwrap();
        assert!(p.contains(&x) && simplex::is_vertex(&p.to_lp(), &x.x));
        assert_eq!(x.mass(1..4), q(1));
        // Pushing mass away from the bottom levels selects x_t = 1.
        let p = p.with_objective(vec![(1, q(1)), (2, q(1))]);
        let x = solve_vertex(&p).unwrap();
        assert_eq!(x.x, vec![q(0), q(0), q(0), q(1)]);
    }

    #[test]
    fn empty_targets_zero_point() {
        let inst = SrmfcInstance::new(t2(), vec![q(3)]).unwrap();
        let x = solve_vertex(&TreePolytope::new(&inst, q(0)).with_targets(vec![])).unwrap();
        assert!(x.support().is_empty());
    }

    #[test]
    fn loose_internal_vertex() {
        // x_a = 1/2 with every leaf below at 3/4 < 1.
        let inst = SrmfcInstance::new(t1(), vec![q(5), q(5)]).unwrap();
        let mut x = FractionalSolution::zeros(6);
        x.x[1] = qf(1, 2);
        x.x[3] = qf(1, 4);
        x.x[4] = qf(1, 4);
        let p = TreePolytope::new(&inst, q(1)).with_targets(vec![3, 4]).with_delta(vec![q(1); 6]);
        let (loose, _) = classify_supports(&x, &p);
        assert!(loose.contains(&1));
    }

    #[test]
    fn band_and_rounding_examples() {
        // 3/10 on a bottom vertex with unit 1/8 goes to 1/4.
        assert_eq!(floor_to(&qf(3, 10), &qf(1, 8)), qf(1, 4));
        let inst = SrmfcInstance::new(t1(), vec![q(1), q(2)]).unwrap();
        let sub = band_instance(&inst, 1, 2, None).unwrap();
        assert_eq!(sub.inst.height(), 1);
        assert_eq!(sub.inst.tree.leaves().len(), 3);
        let sub = band_instance(&inst, 0, 1, Some(&[5])).unwrap();
        assert_eq!(sub.to_orig, vec![0, 2]);
        assert_eq!(sub.rep[&5], 1);
    }

    #[test]
    fn round_layered_tie_goes_to_both() {
        // Path of 12 levels, compressed with eps = 1.
        let n = 13;
        let edges: Vec<(usize, usize)> = (0..12).map(|i| (i, i + 1)).collect();
        let tree = build_tree(n, &edges, 0).unwrap();
        let eps = q(1);
        let budgets: Vec<Q> = (1..=12).map(|l| if l == 1 { q(1) } else { crate::ratio::pow(&q(2), l - 2) }).collect();
        let inst = SrmfcInstance::new(tree, budgets).unwrap();
        let h = layer_heights(12, 2, &eps);
        assert_eq!(h, vec![12, 5, 4]);
        let mut y = FractionalSolution::zeros(n);
        y.x[h[1] + 1] = qf(1, 2);
        y.x[h[1]] = qf(1, 2);
        let r = round_layered(&y, 2, &eps, &inst).unwrap();
        assert!(r.iter().all(|&v| inst.tree.level(v) > h[2]));
        let alpha = layered_stretch(&y, 2, &eps, &inst).unwrap();
        assert!(stretch_of(&inst, &r).at_most(&(q(2) * alpha + &eps)));
    }
}

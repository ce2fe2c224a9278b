//! LP-aware reduction of SNUkC points to tree points and back, the
//! slice-wise sparsification built on it, and the small-radii rounding.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::explore::NukcThresholds;
use super::{CenterSet, PairPoint, SnukcInstance};
use crate::error::{Error, Result};
use crate::lp_tree::{round_instance, sparsify_unchecked, FractionalSolution};
use crate::ratio::{ceil_log, floor_to, pow, q, Q};
use crate::tree_core::{RootedTree, SrmfcInstance};

/// Tree built from a point `x`: level `ℓ` vertices are points chosen
/// greedily at pairwise distance `> 2βr_ℓ`.
#[derive(Debug, Clone)]
pub struct TreeReduction {
    /// Tree instance with the metric instance's budgets.
    pub inst: SrmfcInstance,
    /// Tree vertex → its point `ψ(v)` (`usize::MAX` at the root).
    pub psi: Vec<usize>,
    /// Points hanging below each level-`L` vertex (empty elsewhere).
    pub leaf_points: Vec<Vec<usize>>,
    /// Point → its level-`L` vertex.
    pub leaf_of: Vec<usize>,
    /// `y^x`.
    pub y: FractionalSolution,
    /// Leaf requirement `δ''`: the largest requirement among its points.
    pub delta: Vec<Q>,
    pub beta: Q,
    pub eta: Q,
}

impl TreeReduction {
    /// Dilation multiplier `2η/(η−2)`.
    pub fn multiplier(&self) -> Q {
        dilation_multiplier(&self.eta)
    }

    /// Leaves with positive requirement.
    pub fn targets(&self) -> Vec<usize> {
        self.inst.tree.leaves().iter().copied().filter(|&t| self.delta[t].is_positive()).collect()
    }
}

/// `2η/(η−2)`.
pub fn dilation_multiplier(eta: &Q) -> Q {
    q(2) * eta / (eta - q(2))
}

/// Builds the tree level by level from level `L` down to 1. On each level
/// the uncovered point with the largest `Σ_{u∈Ball(v,βr_ℓ)} x_{u,ℓ}`
/// (smallest id on ties) becomes a vertex, adopting the current top
/// vertex of every uncovered point within `2βr_ℓ`. Level `L + 1` is never
/// materialized: points hang directly below level-`L` vertices.
pub fn reduce_to_tree(inst: &SnukcInstance, x: &PairPoint, beta: &Q, eta: &Q, delta: &[Q]) -> Result<TreeReduction> {
    if *eta <= q(2) {
        return Err(Error::PreconditionViolated("reduction needs eta > 2".into()));
    }
    let levels = inst.levels();
    for l in 1..levels {
        if *inst.r(l) < eta * inst.r(l + 1) {
            return Err(Error::PreconditionViolated(format!("r_{l} < eta * r_{}", l + 1)));
        }
    }
    if x.n() != inst.n() || x.levels() != levels || delta.len() != inst.n() {
        return Err(Error::PreconditionViolated("point or requirements do not match the instance".into()));
    }
    let n = inst.n();
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut psi = vec![usize::MAX];
    let mut yv = vec![Q::zero()];
    let mut leaf_points: Vec<Vec<usize>> = vec![Vec::new()];
    let mut leaf_of = vec![usize::MAX; n];
    // Current top vertex of each point (none before level L is built).
    let mut top: Vec<Option<usize>> = vec![None; n];
    for l in (1..=levels).rev() {
        let rad = beta * inst.r(l);
        let attach = q(2) * &rad;
        let cov: Vec<Q> = (0..n)
            .map(|p| (0..n).filter(|&u| *inst.d(p, u) <= rad).map(|u| x.get(u, l).clone()).sum())
            .collect();
        let mut covered = vec![false; n];
        while let Some(p) = (0..n).filter(|&p| !covered[p]).fold(None, |best: Option<usize>, p| match best {
            Some(b) if cov[b] >= cov[p] => Some(b),
            _ => Some(p),
        }) {
            let w = parent.len();
            parent.push(None);
            psi.push(p);
            yv.push(cov[p].clone());
            leaf_points.push(Vec::new());
            let group: Vec<usize> = (0..n).filter(|&u| !covered[u] && *inst.d(u, p) <= attach).collect();
            for u in group {
                match top[u] {
                    None => {
                        covered[u] = true;
                        leaf_points[w].push(u);
                        leaf_of[u] = w;
                    }
                    Some(t) => {
                        parent[t] = Some(w);
                        for (z, cz) in covered.iter_mut().enumerate() {
                            if top[z] == Some(t) {
                                *cz = true;
                            }
                        }
                    }
                }
            }
        }
        for u in 0..n {
            let mut t = top[u].unwrap_or(leaf_of[u]);
            if top[u].is_some() {
                t = parent[t].expect("every top vertex was adopted");
            }
            top[u] = Some(t);
        }
    }
    for p in parent.iter_mut().skip(1) {
        if p.is_none() {
            *p = Some(0);
        }
    }
    let tree = RootedTree::from_parents(parent)?;
    let t_inst = SrmfcInstance::new(tree, inst.budgets().to_vec())?;
    let mut dl = vec![Q::zero(); psi.len()];
    for (w, pts) in leaf_points.iter().enumerate() {
        if let Some(m) = pts.iter().map(|&p| delta[p].clone()).max() {
            dl[w] = m;
        }
    }
    Ok(TreeReduction {
        inst: t_inst,
        psi,
        leaf_points,
        leaf_of,
        y: FractionalSolution { x: yv },
        delta: dl,
        beta: beta.clone(),
        eta: eta.clone(),
    })
}

/// `x^y_{v,ℓ} = Σ_{v'∈V'_ℓ : ψ(v')=v} y_{v'}`.
pub fn project_back(red: &TreeReduction, y: &FractionalSolution) -> PairPoint {
    let tree = &red.inst.tree;
    let n = red.leaf_of.len();
    let mut out = PairPoint::zeros(n, red.inst.height());
    for v in tree.non_root() {
        if y.x[v].is_positive() {
            out.add(red.psi[v], tree.level(v), &y.x[v]);
        }
    }
    out
}

/// Projects tree centers to `(ψ(v), level(v))` pairs.
pub fn project_centers(red: &TreeReduction, r: &BTreeSet<usize>) -> CenterSet {
    r.iter().map(|&v| (red.psi[v], red.inst.tree.level(v))).collect()
}

/// `β(λ) = 1 + 2/(1 − 2(1+ε)^{−λ})`.
pub fn beta_lambda(eps: &Q, lambda: usize) -> Q {
    let eta = pow(&(Q::one() + eps), lambda as i64);
    Q::one() + q(2) / (Q::one() - q(2) / eta)
}

/// Per-level dilation of the sparsified point: `β(λ)` up to `ĥ`, then 1.
pub fn sparsified_beta(th: &NukcThresholds, levels: usize) -> Vec<Q> {
    (1..=levels).map(|l| if l <= th.h_hat { th.beta_lambda.clone() } else { Q::one() }).collect()
}

/// Sparsifies `x ∈ Q_{1,1}(U)` slice by slice on levels `<= ĥ` and keeps
/// `x` above. Each slice of levels `≡ m (mod λ)` is reduced to a tree with
/// `η = (1+ε)^λ`, sparsified there with `γ = 1/λ`, projected back, and
/// every projected pair is replaced by the nearest-id pair of `supp(x)`
/// within `r_ℓ`. The combined point is scaled by `1/(1−3ε_s)` and clipped
/// to one. Floors use `ε_s`; the ratio `η` uses the compression `ε`.
pub fn sparsify_nukc(inst: &SnukcInstance, x: &PairPoint, th: &NukcThresholds) -> Result<PairPoint> {
    let eps_s = &th.eps_s;
    if !(eps_s.is_positive() && *eps_s <= Q::new(1.into(), 7.into())) {
        return Err(Error::PreconditionViolated("sparsification needs 0 < eps_s <= 1/7".into()));
    }
    let lambda = th.lambda;
    let eta = pow(&(Q::one() + &th.eps), lambda as i64);
    if lambda == 0 || eta <= q(2) {
        return Err(Error::PreconditionViolated("sparsification needs (1+eps)^lambda > 2".into()));
    }
    let (n, levels) = (inst.n(), inst.levels());
    let h_hat = th.h_hat.min(levels);
    let unit = eps_s / q(lambda as i64);
    let mut out = PairPoint::zeros(n, levels);
    for m in 1..=lambda.min(h_hat) {
        let slice: Vec<usize> = (m..=h_hat).step_by(lambda).collect();
        let k: Vec<Q> = slice.iter().map(|&l| inst.k(l).clone()).collect();
        let r: Vec<Q> = slice.iter().map(|&l| inst.r(l).clone()).collect();
        let sub = inst.with_levels(k, r)?;
        let mut xs = PairPoint::zeros(n, slice.len());
        for (i, &l) in slice.iter().enumerate() {
            for v in 0..n {
                xs.set(v, i + 1, x.get(v, l).clone());
            }
        }
        let ones = vec![Q::one(); slice.len()];
        let delta: Vec<Q> = (0..n).map(|v| floor_to(&xs.coverage(&sub, v, &ones), &unit)).collect();
        let red = reduce_to_tree(&sub, &xs, &Q::one(), &eta, &delta)?;
        let h1 = red.inst.height();
        let h2 = slice.iter().filter(|&&l| l <= th.h_check).count();
        let ys = sparsify_unchecked(&red.inst, &red.y, eps_s, &(Q::one() / q(lambda as i64)), h1, h2);
        let xy = project_back(&red, &ys);
        for (i, &l) in slice.iter().enumerate() {
            for v in 0..n {
                let val = xy.get(v, i + 1);
                if !val.is_positive() {
                    continue;
                }
                let u = if x.get(v, l).is_positive() {
                    v
                } else {
                    (0..n)
                        .find(|&u| x.get(u, l).is_positive() && inst.d(u, v) <= inst.r(l))
                        .expect("projected pairs lie within r_l of supp(x)")
                };
                out.add(u, l, val);
            }
        }
    }
    for l in h_hat + 1..=levels {
        for v in 0..n {
            out.set(v, l, x.get(v, l).clone());
        }
    }
    Ok(out.scaled(&(Q::one() / (Q::one() - q(3) * eps_s))).capped())
}

/// Rounds `x ∈ Q_{α,β}(U)` to centers: radii are coarsened up to powers of
/// 4 (levels sharing a power are merged onto the last of them), the point
/// is reduced to a tree with `η = 4`, a vertex of the tree polytope at the
/// stretch of `y^x` is rounded by taking tight unit and loose vertices, and
/// the tree centers are projected back. Coverage holds at dilation `16β`.
/// Returns `None` when `x` does not cover `U`.
pub fn round_small_radii(inst: &SnukcInstance, x: &PairPoint, beta: &Q, u: &BTreeSet<usize>) -> Result<Option<CenterSet>> {
    let (n, levels) = (inst.n(), inst.levels());
    if x.n() != n || x.levels() != levels || x.raw().iter().any(|v| v.is_negative()) || beta.is_negative() {
        return Err(Error::PreconditionViolated("point does not match the instance".into()));
    }
    if u.is_empty() {
        return Ok(Some(CenterSet::new()));
    }
    let betas = vec![beta.clone(); levels];
    if u.iter().any(|&p| x.coverage(inst, p, &betas) < Q::one()) {
        return Ok(None);
    }
    let four = q(4);
    let coarse: Vec<Q> =
        (1..=levels).map(|l| if inst.r(l).is_positive() { pow(&four, ceil_log(&four, inst.r(l))) } else { Q::zero() }).collect();
    // Groups of consecutive levels with equal coarse radius; each maps to
    // its last original level.
    let mut last_of: Vec<usize> = Vec::new();
    let mut group_of = vec![0usize; levels + 1];
    for l in 1..=levels {
        if l == 1 || coarse[l - 1] != coarse[l - 2] {
            last_of.push(l);
        } else {
            *last_of.last_mut().unwrap() = l;
        }
        group_of[l] = last_of.len();
    }
    let g = last_of.len();
    let mut k = vec![Q::zero(); g];
    let mut r = vec![Q::zero(); g];
    let mut xm = PairPoint::zeros(n, g);
    for l in 1..=levels {
        let gi = group_of[l];
        k[gi - 1] += inst.k(l);
        r[gi - 1] = coarse[l - 1].clone();
        for v in 0..n {
            xm.add(v, gi, x.get(v, l));
        }
    }
    let merged = inst.with_levels(k, r)?;
    let xm = xm.capped();
    let delta: Vec<Q> = (0..n).map(|p| if u.contains(&p) { Q::one() } else { Q::zero() }).collect();
    let red = reduce_to_tree(&merged, &xm, beta, &four, &delta)?;
    let alpha = red.y.stretch(&red.inst).unwrap_or_else(Q::zero);
    let rt = match round_instance(&red.inst, &alpha, red.targets())? {
        None => return Ok(None),
        Some(rt) => rt,
    };
    Ok(Some(project_centers(&red, &rt).into_iter().map(|(v, gi)| (v, last_of[gi - 1])).collect()))
}

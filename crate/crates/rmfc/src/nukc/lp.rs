//! The polytope `Q_{α,β}(U)` over `(point, level)` pairs with
//! `(C, D)`-compatibility.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::{level_counts, CenterSet, PairPoint, SnukcInstance};
use crate::lp_tree::simplex::{Lp, LpOutcome, Sense};
use crate::ratio::{q, Q};

/// Coverage, prefix budgets reduced by the fixed centers, unit upper
/// bounds and forbidden pairs.
#[derive(Debug, Clone)]
pub struct NukcPolytope<'a> {
    pub inst: &'a SnukcInstance,
    pub alpha: Q,
    /// Dilation per level.
    pub beta: Vec<Q>,
    /// Coverage requirement per point; zero means no constraint.
    pub delta: Vec<Q>,
    /// Fixed centers `C`; each uses one unit of its level's prefix budgets.
    pub fixed: CenterSet,
    /// Forbidden pairs `D`.
    pub forbidden: BTreeSet<(usize, usize)>,
    /// Optional objective over pair indices to minimize.
    pub objective: Option<Vec<((usize, usize), Q)>>,
}

impl<'a> NukcPolytope<'a> {
    /// `Q_{α,β}(U)` with `C = D = ∅`.
    pub fn new(inst: &'a SnukcInstance, alpha: Q, beta: Vec<Q>, u: &BTreeSet<usize>) -> Self {
        let delta = (0..inst.n()).map(|v| if u.contains(&v) { Q::one() } else { Q::zero() }).collect();
        NukcPolytope { inst, alpha, beta, delta, fixed: CenterSet::new(), forbidden: BTreeSet::new(), objective: None }
    }

    pub fn with_delta(mut self, delta: Vec<Q>) -> Self {
        self.delta = delta;
        self
    }

    pub fn compatible(mut self, c: &CenterSet, d: &BTreeSet<(usize, usize)>) -> Self {
        self.fixed = c.clone();
        self.forbidden = d.clone();
        self
    }

    pub fn with_objective(mut self, obj: Vec<((usize, usize), Q)>) -> Self {
        self.objective = Some(obj);
        self
    }

    /// Right-hand side of the prefix row at level `l`: `α(k_{<=ℓ} − |C_{<=ℓ}|)`.
    pub fn prefix_cap(&self, l: usize) -> Q {
        let used: usize = level_counts(self.inst.levels(), &self.fixed)[1..=l].iter().sum();
        &self.alpha * (self.inst.prefix(l) - q(used as i64))
    }

    fn idx(&self, v: usize, l: usize) -> usize {
        (l - 1) * self.inst.n() + v
    }

    pub fn to_lp(&self) -> Lp {
        let (n, levels) = (self.inst.n(), self.inst.levels());
        let mut lp = Lp::new(n * levels);
        for &(v, l) in &self.forbidden {
            if v < n && (1..=levels).contains(&l) {
                lp.forbid(self.idx(v, l));
            }
        }
        for l in 1..=levels {
            let coeffs = (1..=l).flat_map(|j| (0..n).map(move |v| (v, j))).map(|(v, j)| (self.idx(v, j), Q::one())).collect();
            lp.add(coeffs, Sense::Le, self.prefix_cap(l));
        }
        // Unit bounds are implied on a level whose smallest later cap is <= 1.
        for l in 1..=levels {
            let implied = (l..=levels).map(|j| self.prefix_cap(j)).min().map_or(false, |m| m <= Q::one());
            if !implied {
                for v in 0..n {
                    lp.add(vec![(self.idx(v, l), Q::one())], Sense::Le, Q::one());
                }
            }
        }
        for p in 0..n {
            if self.delta[p].is_positive() {
                let mut coeffs = Vec::new();
                for l in 1..=levels {
                    let rad = &self.beta[l - 1] * self.inst.r(l);
                    for u in 0..n {
                        if *self.inst.d(p, u) <= rad {
                            coeffs.push((self.idx(u, l), Q::one()));
                        }
                    }
                }
                lp.add(coeffs, Sense::Ge, self.delta[p].clone());
            }
        }
        lp.objective = self.objective.as_ref().map(|o| o.iter().map(|((v, l), c)| (self.idx(*v, *l), c.clone())).collect());
        lp
    }

    /// True iff `x` lies in the polytope.
    pub fn contains(&self, x: &PairPoint) -> bool {
        let levels = self.inst.levels();
        if x.raw().iter().any(|v| v.is_negative() || *v > Q::one()) {
            return false;
        }
        if self.forbidden.iter().any(|&(v, l)| v < self.inst.n() && (1..=levels).contains(&l) && !x.get(v, l).is_zero()) {
            return false;
        }
        (1..=levels).all(|l| x.prefix_mass(l) <= self.prefix_cap(l))
            && (0..self.inst.n()).all(|p| x.coverage(self.inst, p, &self.beta) >= self.delta[p])
    }
}

/// A vertex of the polytope, or `None` when it is empty.
pub fn solve_vertex_nukc(p: &NukcPolytope) -> Option<PairPoint> {
    let (n, levels) = (p.inst.n(), p.inst.levels());
    if p.delta.iter().all(|d| !d.is_positive()) && p.objective.is_none() {
        let zero = PairPoint::zeros(n, levels);
        return if (1..=levels).all(|l| !p.prefix_cap(l).is_negative()) { Some(zero) } else { None };
    }
    match p.to_lp().solve() {
        LpOutcome::Optimal(x) => Some(PairPoint::from_vec(n, levels, x)),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("prefix budgets bound every variable"),
    }
}

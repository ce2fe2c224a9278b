//! Analysis helpers that depend on a known optimum: the classification of
//! sparsified support pairs and the thinned non-separable set. Used by
//! tests to replay the structural observations behind the exploration.

use num_traits::Zero;

use super::explore::NukcThresholds;
use super::{CenterSet, SnukcInstance};
use crate::ratio::{q, Q};

/// Class of a support pair relative to an optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairClass {
    Big,
    Small,
    Sep,
    NonSep,
}

/// `r_ℓ`, or zero beyond the last level.
fn radius(inst: &SnukcInstance, l: usize) -> Q {
    if l <= inst.levels() {
        inst.r(l).clone()
    } else {
        Q::zero()
    }
}

/// Centers `(w, ℓ')` of `opt` with `w ∈ Ball(v, σ(r_ℓ + r_ℓ'))`.
pub fn close_centers(inst: &SnukcInstance, th: &NukcThresholds, (v, l): (usize, usize), opt: &CenterSet) -> Vec<(usize, usize)> {
    opt.iter()
        .copied()
        .filter(|&(w, lp)| *inst.d(v, w) <= &th.sigma * (inst.r(l) + inst.r(lp)))
        .collect()
}

/// Classifies `(v, ℓ)` by replaying the definitions. A pair is small when
/// no close center has level `<= ĥ`.
pub fn classify(inst: &SnukcInstance, th: &NukcThresholds, pair: (usize, usize), opt: &CenterSet) -> PairClass {
    let l = pair.1;
    let close = close_centers(inst, th, pair, opt);
    if close.iter().any(|&(_, lp)| lp <= l) {
        return PairClass::Big;
    }
    if !close.iter().any(|&(_, lp)| lp <= th.h_hat) {
        return PairClass::Small;
    }
    let sep = if l <= th.h_check {
        !close.iter().any(|&(_, lp)| lp <= th.h_check)
    } else {
        let lk = l + th.kappa;
        let near: Vec<usize> = close.iter().filter(|&&(_, lp)| lp <= th.h_hat).map(|&(w, _)| w).collect();
        let spread = &th.mu * radius(inst, lk);
        !close.iter().any(|&(_, lp)| lp <= lk)
            && near.iter().all(|&a| near.iter().all(|&b| *inst.d(a, b) <= spread))
    };
    if sep {
        PairClass::Sep
    } else {
        PairClass::NonSep
    }
}

/// Which of the three non-separable cases hold for `(v, ℓ)`.
pub fn nonsep_cases(inst: &SnukcInstance, th: &NukcThresholds, pair: (usize, usize), opt: &CenterSet) -> [bool; 3] {
    let l = pair.1;
    let close = close_centers(inst, th, pair, opt);
    let lk = l + th.kappa;
    let case1 = l <= th.h_check && close.iter().any(|&(_, lp)| l < lp && lp <= th.h_check);
    let case2 = l > th.h_check && close.iter().any(|&(_, lp)| l < lp && lp <= lk);
    let far: Vec<usize> = close.iter().filter(|&&(_, lp)| lk < lp && lp <= th.h_hat).map(|&(w, _)| w).collect();
    let spread = &th.mu * radius(inst, lk);
    let case3 = l > th.h_check && far.iter().any(|&a| far.iter().any(|&b| *inst.d(a, b) > spread));
    [case1, case2, case3]
}

/// Greedy maximal subset of `pairs` (in the given order) whose same-level
/// members are more than `4σr_ℓ` apart.
pub fn thin_subset(inst: &SnukcInstance, th: &NukcThresholds, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &(v, l) in pairs {
        let rad = q(4) * &th.sigma * inst.r(l);
        if !out.iter().any(|&(u, lu)| lu == l && *inst.d(u, v) <= rad) {
            out.push((v, l));
        }
    }
    out
}

//! Thresholds, the thinned exploration over `(C, D)`-compatible points and
//! the end-to-end SNUkC and NUkC solvers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::compress::{compress_nukc, push_small_first};
use super::cover::dp_cover;
use super::lp::{solve_vertex_nukc, NukcPolytope};
use super::reduce::{beta_lambda, round_small_radii, sparsified_beta, sparsify_nukc};
use super::{
    beta_candidates, budget_stretch, coverage_dilation, covered_points, flatten_budgets, level_counts, uniform_beta,
    CenterSet, PairPoint, SnukcInstance,
};
use crate::error::{Error, Result};
use crate::ratio::{ceil_i64, ceil_log, floor_i64, pow, q, qf, Q};

/// Level thresholds and search constants of an ε-compressed instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NukcThresholds {
    pub eps: Q,
    /// Sparsification parameter `min(ε, 1/7)`.
    pub eps_s: Q,
    pub h_hat: usize,
    /// Clamped to `ĥ`.
    pub h_check: usize,
    /// `ρ = 15 + 6ε`.
    pub rho: Q,
    /// `σ = 3 + ε`.
    pub sigma: Q,
    /// Smallest `λ` with `(1+ε)^λ > 2` and `β(λ) <= 3 + ε/2`.
    pub lambda: usize,
    pub beta_lambda: Q,
    pub kappa: usize,
    pub kappa2: usize,
    pub mu: Q,
    /// `N = ⌈3/ε⌉`.
    pub n_mix: usize,
    /// `ζ̄ = (4Nλ/ε⁵)(ȟ²ĥ + 3κL)`.
    pub zeta_bar: Q,
    /// Support bound of the sparsified points on levels `<= ĥ`.
    pub s_max: u64,
}

impl NukcThresholds {
    pub fn new(inst: &SnukcInstance, eps: &Q) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::ParameterOutOfRange("eps must be positive".into()));
        }
        let levels = inst.levels();
        let lq = q(levels as i64);
        let first_above = |bound: &Q| (1..levels).find(|&h| inst.k(h + 1) >= bound).unwrap_or(levels);
        let h_hat = first_above(&(&lq / eps));
        let h_check = first_above(&(q(h_hat as i64) / eps)).min(h_hat);
        let base = Q::one() + eps;
        let sigma = q(3) + eps;
        let target = &sigma - eps / q(2);
        let mut lambda = 1usize;
        while pow(&base, lambda as i64) <= q(2) || beta_lambda(eps, lambda) > target {
            lambda += 1;
        }
        let four_sigma = q(4) * &sigma;
        let k1 = ceil_log(&base, &(&four_sigma / eps));
        let k2 = ceil_log(&base, &((&four_sigma + q(2)) * (&four_sigma + q(2))));
        let kappa = k1.max(k2).max(0) as usize;
        let kappa2 = ceil_log(&base, &(q(2) * &sigma / eps)).max(1) as usize;
        let n_mix = ceil_i64(&(q(3) / eps)) as usize;
        let (hc, hh) = (q(h_check as i64), q(h_hat as i64));
        let e5 = pow(eps, 5);
        let zeta_bar = q(4 * n_mix as i64 * lambda as i64) / e5 * (&hc * &hc * &hh + q(3 * kappa as i64) * &lq);
        let eps_s = if *eps < qf(1, 7) { eps.clone() } else { qf(1, 7) };
        let s = (Q::one() + q(7) * &eps_s) * q(lambda as i64) / &eps_s
            * (&hc * inst.prefix(h_check) + inst.prefix(h_hat));
        Ok(NukcThresholds {
            eps: eps.clone(),
            eps_s,
            h_hat,
            h_check,
            rho: q(15) + q(6) * eps,
            sigma,
            lambda,
            beta_lambda: beta_lambda(eps, lambda),
            kappa,
            kappa2,
            mu: q(2),
            n_mix,
            zeta_bar,
            s_max: ceil_i64(&s).max(0) as u64,
        })
    }

    /// True iff the proven guarantees cover this ε.
    pub fn in_guarantee_range(&self) -> bool {
        self.eps <= qf(1, 7)
    }

    /// Dilation constant of the end-to-end certificate, `max(ρ, 16)`.
    pub fn dilation_constant(&self) -> Q {
        if self.rho > q(16) {
            self.rho.clone()
        } else {
            q(16)
        }
    }
}

/// Search configuration of one exploration.
#[derive(Debug, Clone)]
pub struct NukcExploreConfig {
    /// Number of collected points before the cover DP runs.
    pub n_mix: usize,
    /// Heavy-branch budget `ζ`.
    pub zeta: u64,
    pub max_nodes: usize,
    pub max_solutions: usize,
    /// Largest `supp(y)_{<=ĥ}` whose labelings are enumerated; larger
    /// supports only take the all-DP branch.
    pub max_support: usize,
    /// Skip states already explored with at least the same `ζ`.
    pub memo: bool,
}

impl NukcExploreConfig {
    /// `N` and `ζ = ⌈ζ̄⌉` from the thresholds with default limits.
    pub fn standard(th: &NukcThresholds) -> Self {
        NukcExploreConfig {
            n_mix: th.n_mix,
            zeta: ceil_i64(&th.zeta_bar).to_u64().unwrap_or(u64::MAX),
            max_nodes: 400,
            max_solutions: 16,
            max_support: 6,
            memo: true,
        }
    }
}

/// User limits of the end-to-end solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NukcLimits {
    pub max_nodes: usize,
    pub max_solutions: usize,
    pub max_support: usize,
    /// Overrides `N` when set.
    pub n_mix: Option<usize>,
    /// Overrides `ζ` when set.
    pub zeta: Option<u64>,
}

impl Default for NukcLimits {
    fn default() -> Self {
        NukcLimits { max_nodes: 400, max_solutions: 16, max_support: 6, n_mix: None, zeta: None }
    }
}

impl NukcLimits {
    pub fn config(&self, th: &NukcThresholds) -> NukcExploreConfig {
        let mut cfg = NukcExploreConfig::standard(th);
        cfg.max_nodes = self.max_nodes;
        cfg.max_solutions = self.max_solutions;
        cfg.max_support = self.max_support;
        if let Some(n) = self.n_mix {
            cfg.n_mix = n.max(1);
        }
        if let Some(z) = self.zeta {
            cfg.zeta = z;
        }
        cfg
    }
}

/// Outcome of one exploration.
#[derive(Debug, Clone, Default)]
pub struct NukcExploreResult {
    /// Emitted center sets on the explored instance, deduplicated and sorted.
    pub solutions: Vec<CenterSet>,
    pub nodes: usize,
    /// True when a limit stopped the search.
    pub truncated: bool,
    /// Calls checked against the inductive bound `C^ζ·D^s`.
    pub bound_checked: usize,
    pub bound_violations: usize,
    pub eps_in_range: bool,
    /// Sparsified points checked against their guarantees.
    pub points_checked: usize,
    pub point_violations: usize,
    /// Separable pairs found to be successors of an earlier separable pair
    /// on the same path.
    pub successors: usize,
    pub dp_calls: usize,
}

/// Constants `C = 3^{⌊N/ε³⌋+1}` and `D = (κ₂+4)^{s_max+1}` of the
/// call-count bound `P(ζ, s) <= C^ζ·D^s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NukcNodeBound {
    pub c_exp: u64,
    pub d_base: u32,
    pub s_max: u64,
}

impl NukcNodeBound {
    pub fn new(th: &NukcThresholds, n_mix: usize) -> Self {
        let e = &th.eps;
        let c_exp = floor_i64(&(q(n_mix as i64) / (e * e * e))) as u64 + 1;
        NukcNodeBound { c_exp, d_base: th.kappa2 as u32 + 4, s_max: th.s_max }
    }

    /// True iff `calls <= C^ζ·D^s`, compared exactly. Exponents of 64 or
    /// more exceed every `usize` and hold trivially.
    pub fn holds(&self, calls: usize, zeta: u64, s: u64) -> bool {
        let ce = self.c_exp.saturating_mul(zeta);
        let de = (self.s_max + 1).saturating_mul(s);
        if ce >= 64 || de >= 64 {
            return true;
        }
        let bound = BigUint::from(3u32).pow(ce as u32) * BigUint::from(self.d_base).pow(de as u32);
        BigUint::from(calls) <= bound
    }
}

/// Calls `f` on every label vector over `k` classes for `m` items, by
/// number of nonzero labels, until `f` returns false. Returns false if
/// stopped.
fn for_each_labeling(m: usize, k: u32, f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
    let max_count = if k <= 1 { 0 } else { m };
    for count in 0..=max_count {
        for pos in super::combinations(m, count) {
            let mut digits = vec![1u32; count];
            loop {
                let mut labels = vec![0u32; m];
                for (i, &p) in pos.iter().enumerate() {
                    labels[p] = digits[i];
                }
                if !f(&labels) {
                    return false;
                }
                let mut carried = true;
                let mut i = count;
                while i > 0 {
                    i -= 1;
                    if digits[i] + 1 < k {
                        digits[i] += 1;
                        carried = false;
                        break;
                    }
                    digits[i] = 1;
                }
                if carried {
                    break;
                }
            }
        }
    }
    true
}

/// Exploration state passed by value to each branch.
#[derive(Debug, Clone)]
struct State {
    c: CenterSet,
    d: BTreeSet<(usize, usize)>,
    zeta: u64,
    ys: Vec<PairPoint>,
    adp: BTreeSet<(usize, usize)>,
    /// Separable pairs of earlier light iterations with their iteration.
    sep_log: Vec<((usize, usize), usize)>,
}

type MemoKey = (CenterSet, BTreeSet<(usize, usize)>, Vec<PairPoint>, BTreeSet<(usize, usize)>);

struct Engine<'a> {
    inst: &'a SnukcInstance,
    th: &'a NukcThresholds,
    cfg: &'a NukcExploreConfig,
    bound: NukcNodeBound,
    memo: BTreeMap<MemoKey, u64>,
    out: BTreeSet<CenterSet>,
    res: NukcExploreResult,
    stopped: bool,
}

impl<'a> Engine<'a> {
    fn ball_inside(&self, v: usize, l: usize, vc: &BTreeSet<usize>) -> bool {
        self.inst.space.ball(v, &(&self.th.sigma * self.inst.r(l))).iter().all(|u| vc.contains(u))
    }

    /// `{(u, ℓ') : u ∈ Ball(v, σ(r_ℓ + r_ℓ')), ℓ' <= top}`.
    fn ball_pairs(&self, v: usize, l: usize, top: usize, out: &mut BTreeSet<(usize, usize)>) {
        for lp in 1..=top.min(self.inst.levels()) {
            let rad = &self.th.sigma * (self.inst.r(l) + self.inst.r(lp));
            out.extend(self.inst.space.ball(v, &rad).into_iter().map(|u| (u, lp)));
        }
    }

    fn d_small(&self, a: &[(usize, usize)], out: &mut BTreeSet<(usize, usize)>) {
        for &(v, l) in a {
            self.ball_pairs(v, l, self.th.h_hat, out);
        }
    }

    fn d_sep(&self, a: &[(usize, usize)], out: &mut BTreeSet<(usize, usize)>) {
        for &(v, l) in a {
            let top = if l <= self.th.h_check { self.th.h_check } else { self.th.h_hat.min(l + self.th.kappa) };
            self.ball_pairs(v, l, top, out);
        }
    }

    fn d_thin(&self, a: &[(usize, usize)], out: &mut BTreeSet<(usize, usize)>) {
        for &(v, l) in a {
            let rad = q(4) * &self.th.sigma * self.inst.r(l);
            out.extend(self.inst.space.ball(v, &rad).into_iter().map(|u| (u, l)));
        }
    }

    /// `(v, ℓ)` succeeds `(v', ℓ')` when `ȟ < ℓ' < ℓ − κ` and
    /// `d(v, v') <= σ(r_ℓ' − r_ℓ)`.
    fn is_successor(&self, (v, l): (usize, usize), (vp, lp): (usize, usize)) -> bool {
        self.th.h_check < lp
            && lp + self.th.kappa < l
            && *self.inst.d(v, vp) <= &self.th.sigma * (self.inst.r(lp) - self.inst.r(l))
    }

    fn check_point(&mut self, x: &PairPoint, y: &PairPoint, st: &State, u: &BTreeSet<usize>) {
        let th = self.th;
        let lam = q(th.lambda as i64);
        let low = &th.eps_s / (&lam * q(th.h_hat.max(1) as i64));
        let mid = &th.eps_s / &lam;
        let floors = y.support().into_iter().all(|(v, l)| {
            x.get(v, l).is_positive()
                && if l <= th.h_check {
                    *y.get(v, l) >= low
                } else if l <= th.h_hat {
                    *y.get(v, l) >= mid
                } else {
                    true
                }
        });
        let p = NukcPolytope::new(self.inst, Q::one() + q(7) * &th.eps_s, sparsified_beta(th, self.inst.levels()), u)
            .compatible(&st.c, &st.d);
        self.res.points_checked += 1;
        if !(floors && p.contains(y)) {
            self.res.point_violations += 1;
        }
    }

    /// Records `c` unless it leaves some point uncovered at every dilation.
    fn emit(&mut self, c: CenterSet) {
        if coverage_dilation(self.inst, &c).is_none() {
            return;
        }
        if self.out.len() >= self.cfg.max_solutions && !self.out.contains(&c) {
            self.res.truncated = true;
            self.stopped = true;
            return;
        }
        self.out.insert(c);
    }

    /// Returns the number of calls in this subtree.
    fn node(&mut self, st: State) -> usize {
        if self.stopped {
            return 0;
        }
        if self.res.nodes >= self.cfg.max_nodes {
            self.res.truncated = true;
            self.stopped = true;
            return 0;
        }
        if self.cfg.memo {
            let mut ys = st.ys.clone();
            ys.sort();
            let key = (st.c.clone(), st.d.clone(), ys, st.adp.clone());
            match self.memo.get(&key) {
                Some(&seen) if seen >= st.zeta => return 0,
                _ => {
                    self.memo.insert(key, st.zeta);
                }
            }
        }
        self.res.nodes += 1;
        let mut calls = 1;
        let (inst, th) = (self.inst, self.th);
        let (n, levels) = (inst.n(), inst.levels());
        let vc = covered_points(inst, &st.c, &th.rho);
        let u: BTreeSet<usize> = (0..n).filter(|p| !vc.contains(p)).collect();
        let obj: Vec<((usize, usize), Q)> =
            (1..=th.h_hat).flat_map(|l| (0..n).map(move |v| ((v, l), Q::one()))).collect();
        let p = NukcPolytope::new(inst, Q::one(), uniform_beta(levels, &Q::one()), &u)
            .compatible(&st.c, &st.d)
            .with_objective(obj);
        let Some(x) = solve_vertex_nukc(&p) else { return calls };
        let mut y = match sparsify_nukc(inst, &x, th) {
            Ok(y) => y,
            Err(_) => {
                self.res.point_violations += 1;
                return calls;
            }
        };
        for (v, l) in y.support() {
            if self.ball_inside(v, l, &vc) {
                y.set(v, l, Q::zero());
            }
        }
        self.check_point(&x, &y, &st, &u);
        let s: Vec<(usize, usize)> = y.support().into_iter().filter(|&(_, l)| l <= th.h_hat).collect();
        let fits = s.len() <= self.cfg.max_support;
        if !fits {
            self.res.truncated = true;
        }

        // Light iteration: collect y, then finish or branch on partitions.
        let mut ys = st.ys.clone();
        ys.push(y.clone());
        if ys.len() >= self.cfg.n_mix {
            self.finish(&st, &ys);
        } else {
            let k = th.kappa2 as u32 + 4;
            let mut sub_calls = 0;
            let mut run = |labels: &[u32], eng: &mut Engine| -> bool {
                let mut c2 = st.c.clone();
                let mut d2 = st.d.clone();
                let mut adp = st.adp.clone();
                let mut log = st.sep_log.clone();
                let (mut small, mut sep) = (Vec::new(), Vec::new());
                for (&(v, l), &lab) in s.iter().zip(labels) {
                    match lab {
                        0 => {
                            adp.insert((v, l));
                        }
                        1 => small.push((v, l)),
                        2 => sep.push((v, l)),
                        3 => {}
                        j => {
                            let f = (j - 3) as usize;
                            if f >= l {
                                return true;
                            }
                            c2.insert((v, l - f));
                        }
                    }
                }
                eng.d_small(&small, &mut d2);
                eng.d_sep(&sep, &mut d2);
                for &pair in &sep {
                    if log.iter().any(|&(prev, _)| eng.is_successor(pair, prev)) {
                        eng.res.successors += 1;
                    }
                }
                log.extend(sep.iter().map(|&pair| (pair, st.ys.len())));
                let next = State { c: c2, d: d2, zeta: st.zeta, ys: ys.clone(), adp, sep_log: log };
                sub_calls += eng.node(next);
                !eng.stopped
            };
            if fits {
                for_each_labeling(s.len(), k, &mut |labels| run(labels, self));
            } else {
                run(&vec![0; s.len()], self);
            }
            calls += sub_calls;
        }

        // Heavy iterations, one level at a time.
        let n_q = q(self.cfg.n_mix as i64);
        for l in 1..=th.h_hat {
            if self.stopped {
                break;
            }
            let sl: Vec<(usize, usize)> = s.iter().copied().filter(|&(_, pl)| pl == l).collect();
            if sl.is_empty() || sl.len() as u64 > st.zeta {
                continue;
            }
            if sl.len() > self.cfg.max_support {
                self.res.truncated = true;
                continue;
            }
            let need = &th.eps / &n_q * inst.k(l);
            let rest = st.zeta - sl.len() as u64;
            let mut sub_calls = 0;
            for_each_labeling(sl.len(), 3, &mut |labels| {
                let size = labels.iter().filter(|&&x| x != 0).count();
                if size == 0 || q(size as i64) < need {
                    return true;
                }
                let thin: Vec<(usize, usize)> = sl.iter().zip(labels).filter(|(_, &x)| x == 1).map(|(&p, _)| p).collect();
                let mut d2 = st.d.clone();
                self.d_thin(&thin, &mut d2);
                let mut c2 = st.c.clone();
                c2.extend(sl.iter().zip(labels).filter(|(_, &x)| x == 2).map(|(&p, _)| p));
                let next = State { c: c2, d: d2, zeta: rest, ys: st.ys.clone(), adp: st.adp.clone(), sep_log: st.sep_log.clone() };
                sub_calls += self.node(next);
                !self.stopped
            });
            calls += sub_calls;
        }

        if !self.cfg.memo && !self.res.truncated {
            let s_left = self.cfg.n_mix.saturating_sub(st.ys.len()) as u64;
            self.res.bound_checked += 1;
            if !self.bound.holds(calls, st.zeta, s_left) {
                self.res.bound_violations += 1;
            }
        }
        calls
    }

    /// Cover DP on the bottom levels and small-radii rounding on the top.
    fn finish(&mut self, st: &State, ys: &[PairPoint]) {
        let (inst, th) = (self.inst, self.th);
        let (n, levels) = (inst.n(), inst.levels());
        let vc = covered_points(inst, &st.c, &th.rho);
        let ybar = PairPoint::mix(ys).expect("nonempty");
        let v_dp: BTreeSet<usize> = st.adp.iter().map(|&(v, _)| v).collect();
        let a_final: BTreeSet<(usize, usize)> = st.adp.iter().copied().filter(|&(v, l)| !self.ball_inside(v, l, &vc)).collect();
        let counts = level_counts(levels, &st.c);
        let budgets: Vec<Q> =
            (1..=th.h_hat).map(|l| inst.k(l) - q(counts[l] as i64) + q(2) * &th.eps * inst.k(l)).collect();
        self.res.dp_calls += 1;
        let c_big = match dp_cover(inst, &budgets, &a_final, &(q(4) * &th.sigma), &v_dp) {
            Ok(Some(c)) => c,
            Ok(None) => return,
            Err(_) => {
                self.res.truncated = true;
                return;
            }
        };
        let mut out: CenterSet = st.c.union(&c_big).copied().collect();
        if th.h_hat < levels {
            let top = inst.high(th.h_hat).expect("top levels form an instance");
            let ytop = ybar.slice_levels(th.h_hat, levels);
            let ones = uniform_beta(levels - th.h_hat, &Q::one());
            let need = Q::one() - &th.eps_s;
            let v_small: BTreeSet<usize> = (0..n).filter(|&p| ytop.coverage(&top, p, &ones) >= need).collect();
            let xt = ytop.scaled(&(Q::one() / &need)).capped();
            match round_small_radii(&top, &xt, &Q::one(), &v_small) {
                Ok(Some(cs)) => out.extend(cs.into_iter().map(|(v, l)| (v, l + th.h_hat))),
                _ => return,
            }
        }
        self.emit(out);
    }
}

/// Runs the exploration from `C = D = ∅`, `Y = ∅`, `A_DP = ∅`.
pub fn explore_nukc(inst: &SnukcInstance, th: &NukcThresholds, cfg: &NukcExploreConfig) -> NukcExploreResult {
    let mut engine = Engine {
        inst,
        th,
        cfg,
        bound: NukcNodeBound::new(th, cfg.n_mix),
        memo: BTreeMap::new(),
        out: BTreeSet::new(),
        res: NukcExploreResult { eps_in_range: th.in_guarantee_range(), ..Default::default() },
        stopped: false,
    };
    let root = State {
        c: CenterSet::new(),
        d: BTreeSet::new(),
        zeta: cfg.zeta,
        ys: Vec::new(),
        adp: BTreeSet::new(),
        sep_log: Vec::new(),
    };
    engine.node(root);
    let mut res = engine.res;
    res.solutions = engine.out.into_iter().collect();
    res
}

/// Result of the end-to-end SNUkC solver on the original instance.
#[derive(Debug, Clone)]
pub struct SnukcOutcome {
    pub centers: CenterSet,
    /// Prefix-budget stretch of `centers`.
    pub alpha: Q,
    /// Coverage dilation of `centers`.
    pub beta: Q,
    /// The dilation guess that produced `centers`.
    pub beta_guess: Option<Q>,
    /// True when `α <= 1+14ε` and `β <= max(15+6ε, 16)·guess`.
    pub certified: bool,
    pub truncated: bool,
    /// True when no exploration produced a solution and a single center
    /// was returned instead.
    pub fallback: bool,
    pub dilation_constant: Q,
    pub eps_in_range: bool,
    pub guesses_tried: usize,
    pub nodes: usize,
}

struct Candidate {
    centers: CenterSet,
    alpha: Q,
    beta: Q,
    guess: Q,
}

fn better(a: &Candidate, b: &Candidate, alpha_cap: &Q) -> bool {
    let key = |c: &Candidate| (c.alpha > *alpha_cap, c.beta.clone(), c.alpha.clone());
    key(a) < key(b)
}

/// Guesses the optimal dilation in increasing order over `0` and the
/// candidate ratios, rescales the radii, compresses, explores and lifts.
/// The first guess with an accepted solution wins; without one the best
/// uncertified solution is returned.
pub fn solve_snukc(inst: &SnukcInstance, eps: &Q, limits: &NukcLimits) -> Result<SnukcOutcome> {
    if !eps.is_positive() {
        return Err(Error::ParameterOutOfRange("eps must be positive".into()));
    }
    if inst.budgets().iter().all(|k| k.is_zero()) {
        return Err(Error::NoSolutionFound);
    }
    let alpha_cap = Q::one() + q(14) * eps;
    let rho = q(15) + q(6) * eps;
    let constant = if rho > q(16) { rho } else { q(16) };
    let mut guesses = vec![Q::zero()];
    guesses.extend(beta_candidates(inst));
    let mut best: Option<Candidate> = None;
    let (mut truncated, mut nodes, mut tried) = (false, 0usize, 0usize);
    let mut in_range = *eps <= qf(1, 7);
    for g in guesses {
        tried += 1;
        let scaled = inst.scaled_radii(&g);
        let Some((pushed, pre)) = push_small_first(&scaled) else { continue };
        let (comp, lift) = compress_nukc(&pushed, eps, pushed.levels())?;
        let th = NukcThresholds::new(&comp, eps)?;
        in_range &= th.in_guarantee_range();
        let res = explore_nukc(&comp, &th, &limits.config(&th));
        truncated |= res.truncated;
        nodes += res.nodes;
        let lifter = pre.then(&lift);
        let mut accepted: Option<Candidate> = None;
        for sol in &res.solutions {
            let centers = lifter.lift(sol);
            let (Some(alpha), Some(beta)) = (budget_stretch(inst, &centers, true), coverage_dilation(inst, &centers)) else {
                continue;
            };
            let cand = Candidate { centers, alpha, beta, guess: g.clone() };
            let ok = cand.alpha <= alpha_cap && cand.beta <= &constant * &g;
            if ok && accepted.as_ref().map_or(true, |a| better(&cand, a, &alpha_cap)) {
                accepted = Some(Candidate { centers: cand.centers.clone(), alpha: cand.alpha.clone(), beta: cand.beta.clone(), guess: g.clone() });
            }
            if best.as_ref().map_or(true, |b| better(&cand, b, &alpha_cap)) {
                best = Some(cand);
            }
        }
        if let Some(a) = accepted {
            return Ok(SnukcOutcome {
                centers: a.centers,
                alpha: a.alpha,
                beta: a.beta,
                beta_guess: Some(a.guess),
                certified: true,
                truncated,
                fallback: false,
                dilation_constant: constant,
                eps_in_range: in_range,
                guesses_tried: tried,
                nodes,
            });
        }
    }
    if let Some(b) = best {
        return Ok(SnukcOutcome {
            centers: b.centers,
            alpha: b.alpha,
            beta: b.beta,
            beta_guess: Some(b.guess),
            certified: false,
            truncated,
            fallback: false,
            dilation_constant: constant,
            eps_in_range: in_range,
            guesses_tried: tried,
            nodes,
        });
    }
    // One center of least eccentricity on the first level with a positive
    // prefix budget.
    let level = (1..=inst.levels()).find(|&l| inst.prefix(l).is_positive()).expect("some budget is positive");
    let center = (0..inst.n())
        .min_by(|&a, &b| {
            let ecc = |v: usize| (0..inst.n()).map(|p| inst.d(v, p).clone()).max().unwrap_or_else(Q::zero);
            ecc(a).cmp(&ecc(b))
        })
        .expect("metric is nonempty");
    let centers: CenterSet = [(center, level)].into_iter().collect();
    let beta = coverage_dilation(inst, &centers).ok_or(Error::NoSolutionFound)?;
    let alpha = budget_stretch(inst, &centers, true).ok_or(Error::NoSolutionFound)?;
    Ok(SnukcOutcome {
        centers,
        alpha,
        beta,
        beta_guess: None,
        certified: false,
        truncated,
        fallback: true,
        dilation_constant: constant,
        eps_in_range: in_range,
        guesses_tried: tried,
        nodes,
    })
}

/// Classic NUkC result: the smooth solution and its flattening.
#[derive(Debug, Clone)]
pub struct NukcOutcome {
    pub smooth: SnukcOutcome,
    /// Centers with `|C_ℓ| <= ⌈α k_ℓ⌉` on every level.
    pub centers: CenterSet,
    /// Per-level stretch of `centers`.
    pub alpha: Q,
}

/// Solves the smooth relaxation and moves centers to earlier levels until
/// every level meets `⌈αk_ℓ⌉`. Budgets must be integers.
pub fn solve_nukc(inst: &SnukcInstance, eps: &Q, limits: &NukcLimits) -> Result<NukcOutcome> {
    let k: Vec<u64> = inst
        .budgets()
        .iter()
        .map(|b| if b.is_integer() { b.to_integer().to_u64() } else { None })
        .collect::<Option<Vec<u64>>>()
        .ok_or_else(|| Error::PreconditionViolated("classic budgets must be nonnegative integers".into()))?;
    let smooth = solve_snukc(inst, eps, limits)?;
    let centers = flatten_budgets(&smooth.centers, &k, &smooth.alpha)?;
    let alpha = budget_stretch(inst, &centers, false).ok_or(Error::NoSolutionFound)?;
    Ok(NukcOutcome { smooth, centers, alpha })
}

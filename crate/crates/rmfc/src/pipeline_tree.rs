//! End-to-end solvers: compression, exploration, an exact bottom solve and a
//! rounded top solve, lifted back to the input tree.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::compress_tree::{compress, reduce_to_compressed, CompressedInstance};
use crate::dp_tree::{cmp_stretch, dp_exact};
use crate::error::{Error, Result};
use crate::explore_tree::{explore, gamma_preset, thresholds, ExploreConfig, GammaPreset, PartitionCandidate, Variant};
use crate::lp_tree::{band_instance, layer_heights, round_instance, round_layered, solve_vertex, TreePolytope};
use crate::ratio::{ceil_i64, q, qf, Q};
use crate::tree_core::{
    check_protection, levelize_solution, normalize_targets, stretch_of, ProtectionSet, RmfcInstance, SrmfcInstance,
    Stretch,
};

/// Search limits shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_partitions: usize,
    pub max_support: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 20_000, max_partitions: 5_000, max_support: 8 }
    }
}

impl Limits {
    fn apply(&self, cfg: &mut ExploreConfig) {
        cfg.max_nodes = self.max_nodes;
        cfg.max_partitions = self.max_partitions;
        cfg.max_support = self.max_support;
    }
}

/// Result of a smooth solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrmfcOutcome {
    /// Protecting antichain of the input tree.
    pub solution: ProtectionSet,
    /// Stretch of `solution` on the input instance.
    pub stretch: Q,
    /// Candidate stretch whose compressed instance produced `solution`.
    pub candidate: Option<Q>,
    /// Factor `1 + 17ε` of the guarantee relative to the optimum.
    pub guarantee: Q,
    /// True when some exploration hit a limit.
    pub truncated: bool,
    /// True when ε lies in the range covered by the proven guarantees.
    pub eps_in_range: bool,
    pub nodes: usize,
    pub partitions: usize,
}

/// How the top instance of a partition is rounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TopRoute {
    /// Vertex of the top polytope, then loose rounding.
    Loose,
    /// Point with no mass on the bottom levels, then two-layer rounding.
    Layered,
}

fn stretch_ladder(eps: &Q, cap: &Q) -> Vec<Q> {
    let mut out: Vec<Q> = [q(0), q(1), q(3), q(7)]
        .iter()
        .map(|m| Q::one() + m * eps)
        .filter(|a| a <= cap)
        .collect();
    out.push(cap.clone());
    out.dedup();
    out
}

/// Bottom part: the instance on levels `<= h` for the bottom leaves,
/// solved by the DP at stretch one, then at `1 + 2ε`.
fn solve_bottom(inst: &SrmfcInstance, h: usize, bot: &[usize], eps: &Q) -> Result<Option<ProtectionSet>> {
    let Some(sub) = band_instance(inst, 0, h, Some(bot)) else { return Ok(Some(ProtectionSet::new())) };
    for a in [Q::one(), Q::one() + q(2) * eps] {
        if let Some(r) = dp_exact(&sub.inst.scaled(&a))? {
            return Ok(Some(sub.lift(&r)));
        }
    }
    Ok(None)
}

fn solve_top_loose(inst: &SrmfcInstance, h: usize, top: &[usize], eps: &Q) -> Result<Option<ProtectionSet>> {
    let Some(sub) = band_instance(inst, h, inst.height(), Some(top)) else { return Ok(Some(ProtectionSet::new())) };
    let targets: Vec<usize> = sub.rep.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
    for a in stretch_ladder(eps, &(Q::one() + q(7) * eps)) {
        if let Some(r) = round_instance(&sub.inst, &a, targets.clone())? {
            return Ok(Some(sub.lift(&r)));
        }
    }
    Ok(None)
}

/// Layered top rounding on the instance pruned to the top leaves, with the
/// fractional point kept off `V_{<=h}`.
fn solve_top_layered(inst: &SrmfcInstance, h: usize, top: &[usize], eps: &Q) -> Result<Option<ProtectionSet>> {
    if top.is_empty() {
        return Ok(Some(ProtectionSet::new()));
    }
    let tree = &inst.tree;
    let set: BTreeSet<usize> = top.iter().copied().collect();
    let (pruned, to_old) = normalize_targets(tree, &set)?;
    let budgets = inst.budgets()[..pruned.height()].to_vec();
    let sub = SrmfcInstance::new(pruned, budgets)?;
    let low: Vec<usize> = sub.tree.non_root().filter(|&v| sub.tree.level(v) <= h).collect();
    for a in stretch_ladder(eps, &(q(2) + q(3) * eps)) {
        let p = TreePolytope::new(&sub, a).with_forbidden(low.iter().copied());
        if let Some(y) = solve_vertex(&p) {
            let hk = layer_heights(sub.height(), 2, eps)[2];
            if hk > h {
                // The layers sit above the guessed threshold; fall back to
                // loose rounding of the same point's polytope.
                return solve_top_loose(inst, h, top, eps);
            }
            let r = round_layered(&y, 2, eps, &sub)?;
            return Ok(Some(r.into_iter().map(|v| to_old[v]).collect()));
        }
    }
    Ok(None)
}

/// Combines bottom and top solutions of one partition on `inst`.
fn solve_partition(
    inst: &SrmfcInstance,
    h: usize,
    p: &PartitionCandidate,
    eps: &Q,
    route: TopRoute,
) -> Result<Option<ProtectionSet>> {
    if p.top.iter().any(|&t| inst.tree.level(t) <= h) {
        return Ok(None);
    }
    let Some(mut r) = solve_bottom(inst, h, &p.bot, eps)? else { return Ok(None) };
    let top = match route {
        TopRoute::Loose => solve_top_loose(inst, h, &p.top, eps)?,
        TopRoute::Layered => solve_top_layered(inst, h, &p.top, eps)?,
    };
    let Some(t) = top else { return Ok(None) };
    r.extend(t);
    Ok(check_protection(&inst.tree, &r).then_some(r))
}

struct Best {
    solution: ProtectionSet,
    stretch: Stretch,
    candidate: Option<Q>,
}

fn consider(best: &mut Option<Best>, inst: &SrmfcInstance, r: ProtectionSet, candidate: Option<Q>) {
    let s = stretch_of(inst, &r);
    if matches!(s, Stretch::Unprotected) {
        return;
    }
    let better = match best {
        None => true,
        Some(b) => cmp_stretch(&s, &b.stretch) == Ordering::Less,
    };
    if better {
        *best = Some(Best { solution: r, stretch: s, candidate });
    }
}

/// Runs one exploration on a compressed instance and returns the solutions
/// of all emitted partitions, lifted to the original tree.
fn run_compressed(
    c: &CompressedInstance,
    cfg: &ExploreConfig,
    h: usize,
    route: TopRoute,
    stats: &mut (usize, usize, bool),
) -> Result<Vec<ProtectionSet>> {
    let th = thresholds(&c.eps, &c.inst);
    let res = explore(&c.inst, &th, cfg);
    stats.0 += res.nodes;
    stats.1 += res.partitions.len();
    stats.2 |= res.truncated;
    let mut out = Vec::new();
    for p in &res.partitions {
        if let Some(r) = solve_partition(&c.inst, h, p, &c.eps, route)? {
            out.push(c.lifter.lift(&r));
        }
    }
    Ok(out)
}

/// Smooth solver: tries the candidate stretches in increasing order, runs
/// the efficient exploration on each compressed instance, and keeps the
/// lowest-stretch lifted solution. Stops once the next candidate is not
/// below the best stretch found.
pub fn solve_srmfc(inst: &SrmfcInstance, eps: &Q, limits: &Limits) -> Result<SrmfcOutcome> {
    if !(eps > &Q::zero() && eps < &Q::one()) {
        return Err(Error::ParameterOutOfRange("ε must lie in (0, 1)".into()));
    }
    let guarantee = Q::one() + q(17) * eps;
    let in_range = eps <= &qf(1, 7);
    if inst.tree.leaves().is_empty() {
        return Ok(SrmfcOutcome {
            solution: ProtectionSet::new(),
            stretch: Q::zero(),
            candidate: None,
            guarantee,
            truncated: false,
            eps_in_range: in_range,
            nodes: 0,
            partitions: 0,
        });
    }
    let mut best: Option<Best> = None;
    let mut stats = (0usize, 0usize, false);
    for (alpha, c) in reduce_to_compressed(inst, eps)? {
        if let Some(b) = &best {
            if b.stretch.at_most(&alpha) {
                break;
            }
        }
        let th = thresholds(eps, &c.inst);
        let mut cfg = ExploreConfig::standard(Variant::Efficient, &c.inst, &th);
        limits.apply(&mut cfg);
        for r in run_compressed(&c, &cfg, th.h_hat, TopRoute::Loose, &mut stats)? {
            consider(&mut best, inst, r, Some(alpha.clone()));
        }
    }
    let b = best.ok_or(Error::NoSolutionFound)?;
    Ok(SrmfcOutcome {
        solution: b.solution,
        stretch: b.stretch.finite().cloned().unwrap_or_default(),
        candidate: b.candidate,
        guarantee,
        truncated: stats.2,
        eps_in_range: in_range,
        nodes: stats.0,
        partitions: stats.1,
    })
}

/// Classic solver modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmfcMode {
    /// Smooth solver with ε small enough that the stretch bound stays below two.
    TwoApprox,
    /// Basic exploration at `ȟ` with two-layer rounding of the top.
    Budget4Eps,
    /// Mixing exploration at `ȟ` with two-layer rounding of the top.
    ThreeApprox,
}

impl RmfcMode {
    /// Largest accepted output budget for a guessed budget `b`.
    pub fn target(&self, b: u64, eps: &Q) -> u64 {
        match self {
            RmfcMode::TwoApprox => 2 * b,
            RmfcMode::Budget4Eps => ceil_i64(&((q(4) + eps) * q(b as i64))) as u64,
            RmfcMode::ThreeApprox => 3 * b,
        }
    }
}

/// Result of a classic solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RmfcOutcome {
    /// Protecting set meeting `budget` on every level.
    pub solution: ProtectionSet,
    /// Per-level budget used.
    pub budget: u64,
    /// Guessed optimum at which the mode's target was met.
    pub guess: u64,
    pub truncated: bool,
}

/// Smooth stretch of the best solution for the uniform instance of budget
/// `b` under `mode`, or `None` if no partition succeeded.
fn solve_uniform(
    tree_inst: &SrmfcInstance,
    mode: RmfcMode,
    eps: &Q,
    limits: &Limits,
    truncated: &mut bool,
) -> Result<Option<(ProtectionSet, Q)>> {
    match mode {
        RmfcMode::TwoApprox => {
            let e = if *eps < qf(1, 17) { eps.clone() } else { qf(1, 17) };
            match solve_srmfc(tree_inst, &e, limits) {
                Ok(o) => {
                    *truncated |= o.truncated;
                    Ok(Some((o.solution, o.stretch)))
                }
                Err(Error::NoSolutionFound) => Ok(None),
                Err(e) => Err(e),
            }
        }
        RmfcMode::Budget4Eps | RmfcMode::ThreeApprox => {
            let c = compress(tree_inst, eps)?;
            let h = layer_heights(c.inst.height(), 2, eps)[2];
            let th = thresholds(eps, &c.inst);
            let (variant, preset, n_mix) = match mode {
                RmfcMode::Budget4Eps => (Variant::Basic, GammaPreset::Basic, 1),
                _ => (Variant::Mixing, GammaPreset::Mixing, ceil_i64(&eps.recip()) as usize),
            };
            let mut cfg = ExploreConfig::standard(variant, &c.inst, &th);
            cfg.h = h;
            cfg.n_mix = n_mix;
            cfg.budget = gamma_preset(preset, &c.inst, eps, h, n_mix);
            limits.apply(&mut cfg);
            let mut stats = (0, 0, false);
            let mut best: Option<Best> = None;
            for r in run_compressed(&c, &cfg, h, TopRoute::Layered, &mut stats)? {
                consider(&mut best, tree_inst, r, None);
            }
            *truncated |= stats.2;
            Ok(best.map(|b| (b.solution, b.stretch.finite().cloned().unwrap_or_default())))
        }
    }
}

/// Classic solver: guesses the optimum budget in increasing order, solves
/// the uniform smooth instance, and stops at the first guess whose
/// levelized budget meets the mode's target.
pub fn solve_rmfc(inst: &RmfcInstance, mode: RmfcMode, eps: &Q, limits: &Limits) -> Result<RmfcOutcome> {
    if !(eps > &Q::zero() && eps < &Q::one()) {
        return Err(Error::ParameterOutOfRange("ε must lie in (0, 1)".into()));
    }
    let tree = &inst.tree;
    if tree.leaves().is_empty() {
        return Ok(RmfcOutcome { solution: ProtectionSet::new(), budget: 0, guess: 0, truncated: false });
    }
    let mut truncated = false;
    for b in 1..=tree.vertex_count() as u64 {
        let uni = RmfcInstance { tree: tree.clone(), budget: b }.to_srmfc();
        let Some((r, s)) = solve_uniform(&uni, mode, eps, limits, &mut truncated)? else { continue };
        let used = ceil_i64(&(&s * q(b as i64))).max(1) as u64;
        if used > mode.target(b, eps) {
            continue;
        }
        let level = levelize_solution(tree, &r, b, &s)?;
        return Ok(RmfcOutcome { solution: level, budget: used, guess: b, truncated });
    }
    Err(Error::NoSolutionFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp_tree::exhaustive_exact;
    use crate::gen::{random_int_budgets, random_tree};
    use crate::tree_core::fixtures::*;
    use crate::tree_core::level_counts;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn classic_opt(tree: &crate::tree_core::RootedTree) -> u64 {
        let uni = RmfcInstance { tree: tree.clone(), budget: 1 }.to_srmfc();
        exhaustive_exact(&uni).unwrap().classic_budget as u64
    }

    #[test]
    fn srmfc_path_example() {
        let inst = SrmfcInstance::new(p3(), vec![q(1); 3]).unwrap();
        let o = solve_srmfc(&inst, &qf(1, 2), &Limits::default()).unwrap();
        assert!(check_protection(&inst.tree, &o.solution));
        assert!(o.stretch <= &o.guarantee * qf(1, 3));
        assert_eq!(o.stretch, qf(1, 3));
    }

    #[test]
    fn srmfc_random_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let eps = qf(1, 2);
        for _ in 0..60 {
            let t = random_tree(&mut rng, 10, 4);
            let b = random_int_budgets(&mut rng, t.height(), 2, 0);
            let Ok(inst) = SrmfcInstance::new(t, b) else { continue };
            let ex = exhaustive_exact(&inst).unwrap();
            let Some(opt) = ex.alpha.finite().cloned() else { continue };
            let o = solve_srmfc(&inst, &eps, &Limits::default()).unwrap();
            assert!(check_protection(&inst.tree, &o.solution));
            assert!(o.stretch <= &o.guarantee * &opt, "{} vs {}", o.stretch, opt);
        }
    }

    #[test]
    fn rmfc_examples() {
        let eps = qf(1, 2);
        for mode in [RmfcMode::TwoApprox, RmfcMode::Budget4Eps, RmfcMode::ThreeApprox] {
            let o = solve_rmfc(&RmfcInstance { tree: t1(), budget: 1 }, mode, &eps, &Limits::default()).unwrap();
            assert!(o.budget <= mode.target(1, &eps));
            let o2 = solve_rmfc(&RmfcInstance { tree: t2(), budget: 1 }, mode, &eps, &Limits::default()).unwrap();
            assert!(o2.budget <= mode.target(3, &eps));
            for (t, o) in [(t1(), &o), (t2(), &o2)] {
                assert!(check_protection(&t, &o.solution));
                assert!(level_counts(&t, &o.solution).iter().all(|&c| c as u64 <= o.budget));
            }
        }
        let single = crate::tree_core::build_tree(2, &[(0, 1)], 0).unwrap();
        let o = solve_rmfc(&RmfcInstance { tree: single, budget: 1 }, RmfcMode::TwoApprox, &eps, &Limits::default())
            .unwrap();
        assert_eq!((o.budget, o.solution), (1, [1].into_iter().collect()));
    }

    #[test]
    fn rmfc_random_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let eps = qf(1, 2);
        for _ in 0..25 {
            let t = random_tree(&mut rng, 10, 4);
            let opt = classic_opt(&t);
            let inst = RmfcInstance { tree: t.clone(), budget: 1 };
            for mode in [RmfcMode::TwoApprox, RmfcMode::Budget4Eps, RmfcMode::ThreeApprox] {
                let o = solve_rmfc(&inst, mode, &eps, &Limits::default()).unwrap();
                assert!(check_protection(&t, &o.solution));
                assert!(level_counts(&t, &o.solution).iter().all(|&c| c as u64 <= o.budget));
                assert!(o.budget <= mode.target(opt, &eps), "{mode:?}: {} vs opt {opt}", o.budget);
            }
        }
    }
}

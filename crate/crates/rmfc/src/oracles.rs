//! Analysis-side sets built from a known optimum: core vertices and the
//! thinned core. Used to validate exploration claims.

use std::collections::BTreeSet;

use crate::dp_tree::exhaustive_exact;
use crate::error::{Error, Result};
use crate::explore_tree::{subtree_within, thresholds, ExploreThresholds};
use crate::ratio::{q, Q};
use crate::tree_core::{ProtectionSet, SrmfcInstance};

/// Instance, a fixed 1-feasible optimum in antichain form, and thresholds.
#[derive(Debug, Clone)]
pub struct AnalysisContext {
    pub inst: SrmfcInstance,
    pub opt: ProtectionSet,
    pub th: ExploreThresholds,
}

impl AnalysisContext {
    /// Fixes the lexicographically smallest exhaustive optimum as `OPT`.
    /// Fails unless the instance is 1-feasible.
    pub fn new(inst: &SrmfcInstance, eps: &Q) -> Result<Self> {
        let ex = exhaustive_exact(inst)?;
        if !ex.one_feasible() {
            return Err(Error::PreconditionViolated("instance is not 1-feasible".into()));
        }
        Ok(AnalysisContext { inst: inst.clone(), opt: ex.witness, th: thresholds(eps, inst) })
    }

    /// Context with a caller-chosen optimum.
    pub fn with_opt(inst: &SrmfcInstance, opt: ProtectionSet, eps: &Q) -> Self {
        AnalysisContext { inst: inst.clone(), opt, th: thresholds(eps, inst) }
    }
}

/// `V_core^h = ⋃_{v∈OPT∩V_{<=h}} (P_v \ {v})`.
pub fn core_vertices(ctx: &AnalysisContext, h: usize) -> BTreeSet<usize> {
    let tree = &ctx.inst.tree;
    let mut out = BTreeSet::new();
    for &v in ctx.opt.iter().filter(|&&v| tree.level(v) <= h) {
        out.extend(tree.path(v).into_iter().filter(|&u| u != v));
    }
    out
}

/// True iff `|V_core^h| <= h·B_{<=h}`.
pub fn core_size_ok(ctx: &AnalysisContext, h: usize) -> bool {
    q(core_vertices(ctx, h).len() as i64) <= q(h as i64) * ctx.inst.prefix(h)
}

/// Vertices of `V_core` (threshold `ĥ`) with at least three neighbours in
/// the tree spanned by `V_core` and the root.
pub fn branching_core(ctx: &AnalysisContext) -> BTreeSet<usize> {
    let tree = &ctx.inst.tree;
    let core = core_vertices(ctx, ctx.th.h_hat);
    core.iter()
        .copied()
        .filter(|&v| 1 + tree.children(v).iter().filter(|c| core.contains(c)).count() >= 3)
        .collect()
}

/// The thinned core: core vertices above `ȟ` whose `κ`-truncated subtree
/// meets `OPT ∩ V_{<=ĥ}` or a branching core vertex, together with
/// `V_core^ȟ`, minus `OPT`.
pub fn thinned_core(ctx: &AnalysisContext) -> BTreeSet<usize> {
    let tree = &ctx.inst.tree;
    let th = &ctx.th;
    let core = core_vertices(ctx, th.h_hat);
    let mut marks = branching_core(ctx);
    marks.extend(ctx.opt.iter().copied().filter(|&v| tree.level(v) <= th.h_hat));
    let mut out: BTreeSet<usize> = core
        .iter()
        .copied()
        .filter(|&v| tree.level(v) > th.h_check)
        .filter(|&v| subtree_within(tree, v, th.kappa).iter().any(|u| marks.contains(u)))
        .collect();
    out.extend(core_vertices(ctx, th.h_check));
    out.retain(|v| !ctx.opt.contains(v));
    out
}

/// Size bounds of the thinned core: `(|V_thin ∩ V_{<=ȟ}| <= ȟB_{<=ȟ},
/// |V_thin ∩ V_{>ȟ}| <= 2κB_{<=ĥ})`.
pub fn thinned_core_bounds(ctx: &AnalysisContext) -> (bool, bool) {
    let tree = &ctx.inst.tree;
    let th = &ctx.th;
    let thin = thinned_core(ctx);
    let low = thin.iter().filter(|&&v| tree.level(v) <= th.h_check).count();
    let high = thin.len() - low;
    (
        q(low as i64) <= q(th.h_check as i64) * ctx.inst.prefix(th.h_check),
        q(high as i64) <= q(2 * th.kappa as i64) * ctx.inst.prefix(th.h_hat),
    )
}

//! Down-push, contraction and splitting, and the compression pipeline that
//! turns an instance into a 1-feasible ε-compressed one with a lifter.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{ceil_log, pow, q, Q};
use crate::tree_core::{antichain, ProtectionSet, RootedTree, SrmfcInstance};

/// One recorded transformation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operation {
    /// Budgets multiplied by a factor.
    Rescale { factor: Q },
    /// Budget added to the last level.
    Pad { amount: Q },
    /// `B_{l-1} += B_l`, `B_l = 0`.
    DownPush { level: usize },
    /// `B_{l+1} += B_l`, `B_l = 0`.
    UpPush { level: usize },
    /// Removal of a zero-budget level.
    Contract { level: usize },
    /// Level split with `value` kept on the lower copy.
    Split { level: usize, value: Q },
}

/// A step together with the map from new vertex ids to old vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub op: Operation,
    pub origin: Vec<usize>,
}

/// Replayable transformation log mapping solutions back to the source tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifter {
    pub source: RootedTree,
    pub entries: Vec<LogEntry>,
}

impl Lifter {
    /// Empty log over `source`.
    pub fn identity(source: RootedTree) -> Self {
        Lifter { source, entries: Vec::new() }
    }

    /// Source vertex represented by vertex `v` of the final tree.
    pub fn origin(&self, v: usize) -> usize {
        self.entries.iter().rev().fold(v, |v, e| e.origin[v])
    }

    /// Maps a solution of the final tree to a solution of the source tree.
    pub fn lift(&self, r: &ProtectionSet) -> ProtectionSet {
        let mapped: ProtectionSet = r.iter().map(|&v| self.origin(v)).collect();
        antichain(&self.source, &mapped)
    }

    /// True iff no step changed the tree or the budgets.
    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    fn record(&mut self, op: Operation, origin: Vec<usize>) {
        self.entries.push(LogEntry { op, origin });
    }
}

/// Compressed instance with its solution lifter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedInstance {
    pub inst: SrmfcInstance,
    pub eps: Q,
    pub lifter: Lifter,
}

fn check_level(inst: &SrmfcInstance, l: usize, lo: usize) -> Result<()> {
    if l < lo || l > inst.height() {
        return Err(Error::LevelOutOfRange { level: l, height: inst.height() });
    }
    Ok(())
}

/// Moves the budget of level `l` onto level `l - 1`.
pub fn down_push(inst: &SrmfcInstance, l: usize) -> Result<SrmfcInstance> {
    check_level(inst, l, 2)?;
    let mut b = inst.budgets().to_vec();
    let moved = std::mem::replace(&mut b[l - 1], Q::zero());
    b[l - 2] += moved;
    inst.with_budgets(b)
}

/// Moves the budget of level `l` onto level `l + 1`.
pub fn up_push(inst: &SrmfcInstance, l: usize) -> Result<SrmfcInstance> {
    if l == 0 || l >= inst.height() {
        return Err(Error::LevelOutOfRange { level: l, height: inst.height() });
    }
    let mut b = inst.budgets().to_vec();
    let moved = std::mem::replace(&mut b[l - 1], Q::zero());
    b[l] += moved;
    inst.with_budgets(b)
}

/// Contraction of a zero-budget level.
pub fn contract_zero_level(inst: &SrmfcInstance, l: usize) -> Result<SrmfcInstance> {
    contract_mapped(inst, l).map(|(i, _)| i)
}

/// Contraction returning the new-to-old vertex map as well.
pub fn contract_mapped(inst: &SrmfcInstance, l: usize) -> Result<(SrmfcInstance, Vec<usize>)> {
    check_level(inst, l, 1)?;
    if !inst.budget(l).is_zero() {
        return Err(Error::NonzeroBudget(l));
    }
    let t = &inst.tree;
    let n = t.vertex_count();
    let collapsed: BTreeSet<usize> =
        t.level_vertices(l).iter().filter(|&&v| t.is_leaf(v)).map(|&v| t.parent(v).unwrap()).collect();
    if collapsed.contains(&t.root()) {
        return Err(Error::PreconditionViolated(format!("level {l} has a leaf child of the root")));
    }
    let keep: Vec<bool> = (0..n)
        .map(|w| t.level(w) != l && !t.path(w).iter().skip(1).any(|a| collapsed.contains(a)))
        .collect();
    let origin: Vec<usize> = (0..n).filter(|&w| keep[w]).collect();
    let mut new_id = vec![usize::MAX; n];
    for (i, &w) in origin.iter().enumerate() {
        new_id[w] = i;
    }
    let parents: Vec<Option<usize>> = origin
        .iter()
        .map(|&w| {
            t.parent(w).map(|p| {
                let p = if t.level(w) == l + 1 { t.parent(p).unwrap() } else { p };
                new_id[p]
            })
        })
        .collect();
    let tree = RootedTree::from_parents(parents)?;
    let mut b = inst.budgets().to_vec();
    b.remove(l - 1);
    b.truncate(tree.height());
    Ok((SrmfcInstance::new(tree, b)?, origin))
}

/// Splitting of level `l` with `value` kept on the lower copy.
pub fn split_level(inst: &SrmfcInstance, l: usize, value: &Q) -> Result<SrmfcInstance> {
    split_mapped(inst, l, value).map(|(i, _)| i)
}

/// Splitting returning the new-to-old vertex map as well. Lower copies keep
/// their ids; upper copies are appended.
pub fn split_mapped(inst: &SrmfcInstance, l: usize, value: &Q) -> Result<(SrmfcInstance, Vec<usize>)> {
    check_level(inst, l, 1)?;
    if value.is_negative() || value > inst.budget(l) {
        return Err(Error::BudgetOutOfRange);
    }
    let t = &inst.tree;
    let n = t.vertex_count();
    let level_l = t.level_vertices(l);
    let mut parents: Vec<Option<usize>> = t.parents().to_vec();
    let mut origin: Vec<usize> = (0..n).collect();
    let mut upper = vec![usize::MAX; n];
    for (i, &v) in level_l.iter().enumerate() {
        upper[v] = n + i;
        parents.push(Some(v));
        origin.push(v);
    }
    for w in 0..n {
        if t.level(w) == l + 1 {
            parents[w] = Some(upper[t.parent(w).unwrap()]);
        }
    }
    let tree = RootedTree::from_parents(parents)?;
    let mut b = inst.budgets().to_vec();
    let rest = &b[l - 1] - value;
    b[l - 1] = value.clone();
    b.insert(l, rest);
    Ok((SrmfcInstance::new(tree, b)?, origin))
}

/// Working state of a transformation sequence.
struct Tracked {
    inst: SrmfcInstance,
    lifter: Lifter,
}

impl Tracked {
    fn new(inst: &SrmfcInstance) -> Self {
        Tracked { inst: inst.clone(), lifter: Lifter::identity(inst.tree.clone()) }
    }

    fn ident(&self) -> Vec<usize> {
        (0..self.inst.tree.vertex_count()).collect()
    }

    fn budgets_only(&mut self, op: Operation, next: SrmfcInstance) {
        let id = self.ident();
        self.lifter.record(op, id);
        self.inst = next;
    }

    fn rescale(&mut self, f: &Q) {
        let next = self.inst.scaled(f);
        self.budgets_only(Operation::Rescale { factor: f.clone() }, next);
    }

    fn pad(&mut self, amount: Q) -> Result<()> {
        let mut b = self.inst.budgets().to_vec();
        *b.last_mut().unwrap() += &amount;
        let next = self.inst.with_budgets(b)?;
        self.budgets_only(Operation::Pad { amount }, next);
        Ok(())
    }

    fn down_push(&mut self, l: usize) -> Result<()> {
        let next = down_push(&self.inst, l)?;
        self.budgets_only(Operation::DownPush { level: l }, next);
        Ok(())
    }

    fn up_push(&mut self, l: usize) -> Result<()> {
        let next = up_push(&self.inst, l)?;
        self.budgets_only(Operation::UpPush { level: l }, next);
        Ok(())
    }

    fn contract(&mut self, l: usize) -> Result<()> {
        let (next, origin) = contract_mapped(&self.inst, l)?;
        self.lifter.record(Operation::Contract { level: l }, origin);
        self.inst = next;
        Ok(())
    }

    fn split(&mut self, l: usize, value: Q) -> Result<()> {
        let (next, origin) = split_mapped(&self.inst, l, &value)?;
        self.lifter.record(Operation::Split { level: l, value }, origin);
        self.inst = next;
        Ok(())
    }
}

/// Number of levels `⌈log_{1+ε} ΣB⌉ + 1` of the compressed instance.
pub fn compressed_height(total: &Q, eps: &Q) -> usize {
    (ceil_log(&(Q::one() + eps), total) + 1) as usize
}

/// Smallest level `k` with `B_{<=k} >= target`, if any.
fn crossing(inst: &SrmfcInstance, target: &Q) -> Option<usize> {
    (1..=inst.height()).find(|&k| inst.prefix(k) >= target)
}

fn compress_tracked(tr: &mut Tracked, eps: &Q) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::PreconditionViolated("ε must be positive".into()));
    }
    if *tr.inst.budget(1) < Q::one() {
        return Err(Error::PreconditionViolated("B_1 < 1".into()));
    }
    let base = Q::one() + eps;
    let total = tr.inst.prefix(tr.inst.height()).clone();
    let lc = compressed_height(&total, eps);
    let top = pow(&base, lc as i64 - 1);
    if top > total {
        tr.pad(&top - &total)?;
    }
    for j in (1..lc).rev() {
        let target = pow(&base, j as i64 - 1);
        let k = crossing(&tr.inst, &target).expect("padded total reaches every target");
        if *tr.inst.prefix(k) != target {
            let value = &target - tr.inst.prefix(k - 1);
            tr.split(k, value)?;
        }
    }
    let ks: Vec<usize> = (1..=lc)
        .map(|j| crossing(&tr.inst, &pow(&base, j as i64 - 1)).expect("targets are hit exactly"))
        .collect();
    let mut prev = 0;
    for &k in &ks {
        for i in (prev + 2..=k).rev() {
            tr.down_push(i)?;
        }
        prev = k;
    }
    while let Some(l) = (1..=tr.inst.height()).rev().find(|&l| tr.inst.budget(l).is_zero()) {
        tr.contract(l)?;
    }
    Ok(())
}

/// Compression into an instance with `B'_{<=l} = (1+ε)^{l-1}`.
pub fn compress(inst: &SrmfcInstance, eps: &Q) -> Result<CompressedInstance> {
    let mut tr = Tracked::new(inst);
    compress_tracked(&mut tr, eps)?;
    Ok(CompressedInstance { inst: tr.inst, eps: eps.clone(), lifter: tr.lifter })
}

/// True iff `B_{<=l} = (1+ε)^{l-1}` for every level.
pub fn is_compressed(inst: &SrmfcInstance, eps: &Q) -> bool {
    let base = Q::one() + eps;
    (1..=inst.height()).all(|l| *inst.prefix(l) == pow(&base, l as i64 - 1))
}

/// All `m / B_{<=l}` with `m` in `1..=n` and `B_{<=l} > 0`, sorted and deduplicated.
pub fn alpha_candidates(inst: &SrmfcInstance) -> Vec<Q> {
    let n = inst.tree.vertex_count() as i64;
    let mut out: BTreeSet<Q> = BTreeSet::new();
    for l in 1..=inst.height() {
        let b = inst.prefix(l);
        if b.is_positive() {
            for m in 1..=n {
                out.insert(q(m) / b);
            }
        }
    }
    out.into_iter().collect()
}

/// For each stretch candidate `α`, rescales the budgets to `αB` (so that an
/// `α`-feasible solution becomes 1-feasible), clears a first level
/// with `B_1 < 1` by pushing it up and contracting, and compresses.
/// Candidates that cannot be 1-feasible after scaling (a leaf would have to
/// be fireproofed on a level without budget) are skipped.
pub fn reduce_to_compressed(inst: &SrmfcInstance, eps: &Q) -> Result<Vec<(Q, CompressedInstance)>> {
    if !eps.is_positive() {
        return Err(Error::PreconditionViolated("ε must be positive".into()));
    }
    let mut out = Vec::new();
    'cand: for alpha in alpha_candidates(inst) {
        let mut tr = Tracked::new(inst);
        tr.rescale(&alpha);
        while *tr.inst.budget(1) < Q::one() {
            let t = &tr.inst.tree;
            if t.height() == 1 || t.level_vertices(1).iter().any(|&v| t.is_leaf(v)) {
                continue 'cand;
            }
            tr.up_push(1)?;
            tr.contract(1)?;
        }
        compress_tracked(&mut tr, eps)?;
        out.push((alpha, CompressedInstance { inst: tr.inst, eps: eps.clone(), lifter: tr.lifter }));
    }
    Ok(out)
}

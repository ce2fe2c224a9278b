//! Exact covering of a pair set by centers under prefix budgets.

use std::collections::BTreeSet;

use super::{combinations, floor_prefix_caps, CenterSet, SnukcInstance};
use crate::error::{Error, Result};
use crate::ratio::Q;

/// Largest pair set handled by the bitmask DP.
pub const DP_MAX_PAIRS: usize = 63;
/// Largest candidate set handled by the DP.
pub const DP_MAX_CANDIDATES: usize = 16;

#[derive(Debug, Clone)]
struct State {
    used: usize,
    mask: u64,
    witness: CenterSet,
}

/// Keeps the states not dominated by another state with fewer or equal
/// centers and a superset of covered pairs.
fn prune(mut states: Vec<State>) -> Vec<State> {
    states.sort_by(|a, b| a.used.cmp(&b.used).then(b.mask.count_ones().cmp(&a.mask.count_ones())).then(a.mask.cmp(&b.mask)));
    let mut kept: Vec<State> = Vec::new();
    for s in states {
        if !kept.iter().any(|t| t.used <= s.used && t.mask & s.mask == s.mask) {
            kept.push(s);
        }
    }
    kept
}

/// Finds `C` with centers in `candidates` such that `|C_{<=ℓ}| <= ⌊b_{<=ℓ}⌋`
/// for every level and every `(v, ℓ) ∈ S` has some `(v', ℓ') ∈ C` with
/// `ℓ' <= ℓ` and `d(v, v') <= βr_{ℓ'}`. Levels are processed from 1 upward
/// with the number of centers placed so far as part of the state; states
/// dominated in both count and coverage are dropped. Returns `None` when
/// no such set exists.
pub fn dp_cover(
    inst: &SnukcInstance,
    budgets: &[Q],
    s: &BTreeSet<(usize, usize)>,
    beta: &Q,
    candidates: &BTreeSet<usize>,
) -> Result<Option<CenterSet>> {
    let levels = budgets.len();
    if levels > inst.levels() {
        return Err(Error::PreconditionViolated("more budgets than levels".into()));
    }
    if s.iter().any(|&(v, l)| v >= inst.n() || l == 0 || l > levels) || candidates.iter().any(|&c| c >= inst.n()) {
        return Err(Error::PreconditionViolated("pair or candidate out of range".into()));
    }
    if s.len() > DP_MAX_PAIRS || candidates.len() > DP_MAX_CANDIDATES {
        return Err(Error::ResourceCap(format!(
            "{} pairs and {} candidates exceed the cover DP limits",
            s.len(),
            candidates.len()
        )));
    }
    if s.is_empty() {
        return Ok(Some(CenterSet::new()));
    }
    let Some(caps) = floor_prefix_caps(budgets) else { return Ok(None) };
    let pairs: Vec<(usize, usize)> = s.iter().copied().collect();
    let full = if pairs.len() == 64 { u64::MAX } else { (1u64 << pairs.len()) - 1 };
    let cands: Vec<usize> = candidates.iter().copied().collect();
    let mut states = vec![State { used: 0, mask: 0, witness: CenterSet::new() }];
    let mut prefix_cap = 0usize;
    for l in 1..=levels {
        prefix_cap += caps[l - 1];
        let rad = beta * inst.r(l);
        // Coverage masks of the useful candidates on this level.
        let cov: Vec<(usize, u64)> = cands
            .iter()
            .map(|&c| {
                let m = pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(v, pl))| pl >= l && *inst.d(v, c) <= rad)
                    .fold(0u64, |m, (i, _)| m | 1 << i);
                (c, m)
            })
            .filter(|&(_, m)| m != 0)
            .collect();
        let mut next = Vec::new();
        for st in &states {
            let room = prefix_cap.saturating_sub(st.used).min(cov.len());
            for size in 0..=room {
                for pick in combinations(cov.len(), size) {
                    let mask = pick.iter().fold(st.mask, |m, &i| m | cov[i].1);
                    let mut witness = st.witness.clone();
                    witness.extend(pick.iter().map(|&i| (cov[i].0, l)));
                    next.push(State { used: st.used + size, mask, witness });
                }
            }
        }
        // Pairs of this level must be covered once the level is done.
        let need: u64 = pairs.iter().enumerate().filter(|(_, &(_, pl))| pl == l).fold(0, |m, (i, _)| m | 1 << i);
        next.retain(|st| st.mask & need == need);
        states = prune(next);
        if states.is_empty() {
            return Ok(None);
        }
    }
    Ok(states.into_iter().find(|st| st.mask == full).map(|st| st.witness))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::gen::random_metric_instance;
    use crate::ratio::{q, qf};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pairs(p: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        p.iter().copied().collect()
    }

    fn all(n: usize) -> BTreeSet<usize> {
        (0..n).collect()
    }

    /// Checks the two output properties directly.
    fn valid(inst: &SnukcInstance, b: &[Q], s: &BTreeSet<(usize, usize)>, beta: &Q, c: &CenterSet) -> bool {
        let budget_ok = (1..=b.len()).all(|l| {
            let used = c.iter().filter(|&&(_, cl)| cl <= l).count();
            Q::from_integer((used as i64).into()) <= b[..l].iter().sum::<Q>()
        });
        let cover_ok = s.iter().all(|&(v, l)| c.iter().any(|&(u, cl)| cl <= l && *inst.d(v, u) <= beta * inst.r(cl)));
        budget_ok && cover_ok && c.iter().all(|&(_, l)| l >= 1 && l <= b.len())
    }

    /// Brute force over every set of candidate pairs.
    fn brute(inst: &SnukcInstance, b: &[Q], s: &BTreeSet<(usize, usize)>, beta: &Q, cands: &BTreeSet<usize>) -> bool {
        let all_pairs: Vec<(usize, usize)> = cands.iter().flat_map(|&c| (1..=b.len()).map(move |l| (c, l))).collect();
        (0u64..1 << all_pairs.len()).any(|m| {
            let c: CenterSet = all_pairs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &p)| p).collect();
            valid(inst, b, s, beta, &c)
        })
    }

    #[test]
    fn examples() {
        let m = m1();
        let b = [q(1)];
        assert_eq!(dp_cover(&m, &b, &BTreeSet::new(), &q(1), &all(3)).unwrap(), Some(CenterSet::new()));
        assert_eq!(dp_cover(&m, &b, &pairs(&[(1, 1)]), &q(1), &all(3)).unwrap(), Some(pairs(&[(1, 1)])));
        assert_eq!(dp_cover(&m, &b, &pairs(&[(0, 1), (2, 1)]), &q(1), &all(3)).unwrap(), None);
        // At dilation 2 the middle point covers both.
        assert_eq!(dp_cover(&m, &b, &pairs(&[(0, 1), (2, 1)]), &q(2), &all(3)).unwrap(), Some(pairs(&[(1, 1)])));
        // Fractional budgets are floored.
        assert_eq!(dp_cover(&m, &[qf(1, 2)], &pairs(&[(1, 1)]), &q(1), &all(3)).unwrap(), None);
    }

    #[test]
    fn slack_flows_to_later_levels() {
        // Two far points on level 2; one budget on each level.
        let m = inst(&[0, 100], &[1, 1], &[5, 1]);
        let c = dp_cover(&m, &[q(1), q(1)], &pairs(&[(0, 2), (1, 2)]), &q(1), &all(2)).unwrap().unwrap();
        assert!(valid(&m, &[q(1), q(1)], &pairs(&[(0, 2), (1, 2)]), &q(1), &c));
        // A level-1 pair cannot use a level-2 center.
        assert_eq!(dp_cover(&m, &[q(0), q(2)], &pairs(&[(0, 1)]), &q(1), &all(2)).unwrap(), None);
    }

    #[test]
    fn limits() {
        let m = m1();
        let big: BTreeSet<usize> = (0..17).collect();
        assert!(dp_cover(&m, &[q(1)], &pairs(&[(0, 1)]), &q(1), &big).is_err());
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let mut found = 0;
        for _ in 0..120 {
            let n = rng.gen_range(2..=8);
            let levels = if n > 5 { 1 } else { rng.gen_range(1..=2) };
            let m = random_metric_instance(&mut rng, n, levels);
            let b: Vec<Q> = (0..levels).map(|_| qf(rng.gen_range(0..=5), 2)).collect();
            let s: BTreeSet<(usize, usize)> =
                (0..n).flat_map(|v| (1..=levels).map(move |l| (v, l))).filter(|_| rng.gen_bool(0.3)).collect();
            let cands: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
            let beta = qf(rng.gen_range(1..=4), 2);
            let got = dp_cover(&m, &b, &s, &beta, &cands).unwrap();
            let want = brute(&m, &b, &s, &beta, &cands);
            assert_eq!(got.is_some(), want, "{m:?} {b:?} {s:?} {cands:?}");
            if let Some(c) = got {
                found += 1;
                assert!(valid(&m, &b, &s, &beta, &c));
                assert!(c.iter().all(|(v, _)| cands.contains(v)));
            }
        }
        assert!(found > 20);
    }
}

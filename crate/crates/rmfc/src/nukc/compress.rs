//! Compression of SNUkC instances to geometric radii and prefix budgets.

use num_traits::{One, Signed, Zero};

use super::{CenterSet, SnukcInstance};
use crate::error::{Error, Result};
use crate::ratio::{ceil_log, pow, Q};

/// Maps each compressed level to the original level whose radius it
/// rounds; lifting keeps the point and relabels the level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NukcLifter {
    /// Compressed level − 1 → original level (1-based).
    pub origin: Vec<usize>,
}

impl NukcLifter {
    pub fn identity(levels: usize) -> Self {
        NukcLifter { origin: (1..=levels).collect() }
    }

    pub fn lift(&self, c: &CenterSet) -> CenterSet {
        c.iter().map(|&(v, l)| (v, self.origin[l - 1])).collect()
    }

    /// Composition with a lifter `outer` whose original levels are our
    /// compressed levels.
    pub fn then(&self, outer: &NukcLifter) -> NukcLifter {
        NukcLifter { origin: outer.origin.iter().map(|&l| self.origin[l - 1]).collect() }
    }
}

/// Working copy of the level data.
#[derive(Debug, Clone)]
struct Levels {
    k: Vec<Q>,
    r: Vec<Q>,
    origin: Vec<usize>,
}

impl Levels {
    fn prefix(&self, i: usize) -> Q {
        self.k[..i].iter().sum()
    }

    /// Moves the budget of each run of equal radii onto its first level,
    /// which then lifts to the last original level of the run.
    fn merge_equal_radii(&mut self) {
        let mut i = 0;
        while i < self.k.len() {
            let mut j = i + 1;
            while j < self.k.len() && self.r[j] == self.r[i] {
                let b = std::mem::replace(&mut self.k[j], Q::zero());
                self.k[i] += b;
                j += 1;
            }
            self.origin[i] = self.origin[j - 1];
            i = j;
        }
    }

    /// Deletes zero-budget levels other than the first.
    fn contract_zero(&mut self) {
        let keep: Vec<bool> = (0..self.k.len()).map(|i| i == 0 || !self.k[i].is_zero()).collect();
        let mut it = keep.iter();
        self.k.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        self.r.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        self.origin.retain(|_| *it.next().unwrap());
    }

    /// Splits level `i` (0-based) into budgets `a` and `k_i − a`.
    fn split(&mut self, i: usize, a: Q) {
        let rest = &self.k[i] - &a;
        self.k[i] = a;
        self.k.insert(i + 1, rest);
        self.r.insert(i + 1, self.r[i].clone());
        self.origin.insert(i + 1, self.origin[i]);
    }
}

/// Rounds the nonzero radii of the first `h` levels up to powers of
/// `1+ε`, merges equal radii, pads the last budget to a power of `1+ε`,
/// splits so every power `(1+ε)^{j}` below the total is a prefix budget,
/// down-pushes each group onto its first level, merges equal radii again
/// and contracts zero-budget levels.
pub fn compress_nukc(inst: &SnukcInstance, eps: &Q, h: usize) -> Result<(SnukcInstance, NukcLifter)> {
    if !eps.is_positive() {
        return Err(Error::ParameterOutOfRange("eps must be positive".into()));
    }
    if *inst.k(1) < Q::one() {
        return Err(Error::PreconditionViolated("compression needs k_1 >= 1".into()));
    }
    let base = Q::one() + eps;
    let mut lv = Levels { k: inst.budgets().to_vec(), r: inst.radii().to_vec(), origin: (1..=inst.levels()).collect() };
    for l in 0..h.min(lv.r.len()) {
        if lv.r[l].is_positive() {
            lv.r[l] = pow(&base, ceil_log(&base, &lv.r[l]));
        }
    }
    lv.merge_equal_radii();
    lv.contract_zero();

    let total = lv.prefix(lv.k.len());
    let top = ceil_log(&base, &total);
    let target = pow(&base, top);
    let last = lv.k.len() - 1;
    lv.k[last] += &target - &total;

    // Splits, largest power first, so earlier indices stay valid.
    for j in (0..top).rev() {
        let t = pow(&base, j);
        let i = (1..=lv.k.len()).find(|&i| lv.prefix(i) >= t).expect("total reaches every power");
        let before = lv.prefix(i - 1);
        if lv.prefix(i) > t {
            lv.split(i - 1, &t - &before);
        }
    }
    // Down-push each group (i_{j−1}, i_j] onto its first level.
    let mut start = 0usize;
    for j in 0..=top {
        let t = pow(&base, j);
        let end = (1..=lv.k.len()).find(|&i| lv.prefix(i) == t).expect("split made every power a prefix");
        for i in start + 1..end {
            let b = std::mem::replace(&mut lv.k[i], Q::zero());
            lv.k[start] += b;
        }
        start = end;
    }
    lv.merge_equal_radii();
    lv.contract_zero();
    let out = inst.with_levels(lv.k, lv.r)?;
    Ok((out, NukcLifter { origin: lv.origin }))
}

/// Moves `k_1` onto level 2 and deletes level 1 while `k_1 < 1`. Returns
/// `None` when a single level with `k_1 < 1` remains.
pub fn push_small_first(inst: &SnukcInstance) -> Option<(SnukcInstance, NukcLifter)> {
    let mut k = inst.budgets().to_vec();
    let mut r = inst.radii().to_vec();
    let mut origin: Vec<usize> = (1..=inst.levels()).collect();
    while k[0] < Q::one() {
        if k.len() == 1 {
            return None;
        }
        let b = k.remove(0);
        k[0] += b;
        r.remove(0);
        origin.remove(0);
    }
    Some((inst.with_levels(k, r).expect("push keeps the instance valid"), NukcLifter { origin }))
}

/// Checks the compression guarantees for the first `h` levels: prefix
/// budgets are powers of `1+ε`, the level count is at most
/// `⌈log_{1+ε} Σk⌉ + 1`, and adjacent radii among the first `h` levels
/// differ by a factor of at least `1+ε`.
pub fn is_compressed(inst: &SnukcInstance, eps: &Q, h: usize) -> bool {
    let base = Q::one() + eps;
    let l = inst.levels();
    let total = inst.prefix(l);
    if !total.is_positive() || l as i64 > ceil_log(&base, total) + 1 {
        return false;
    }
    let powers_ok = (1..=l).all(|i| {
        let p = inst.prefix(i);
        p.is_positive() && pow(&base, ceil_log(&base, p)) == *p
    });
    let radii_ok = (1..h.min(l)).all(|i| *inst.r(i) >= &base * inst.r(i + 1) && inst.r(i) != inst.r(i + 1));
    powers_ok && radii_ok
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{budget_stretch, coverage_dilation, exhaustive_nukc, is_feasible};
    use super::*;
    use crate::gen::random_metric_instance;
    use crate::ratio::{q, qf};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn m1_extended_example() {
        let m = inst(&[0, 10, 20], &[1, 1, 1], &[5, 5, 3]);
        let (c, lift) = compress_nukc(&m, &q(1), 3).unwrap();
        // (5,5,3) rounds to (8,8,4); merging gives k = (2,1), then the pad
        // to 4 and the splits settle on prefixes (2, 4).
        assert_eq!(c.radii(), &[q(8), q(4)]);
        assert_eq!(c.budgets(), &[q(2), q(2)]);
        assert_eq!(lift.origin, vec![2, 3]);
        assert!(is_compressed(&c, &q(1), 3));
    }

    #[test]
    fn compressed_instances_are_fixed_points() {
        let m = inst(&[0, 10, 20], &[1, 1, 2], &[8, 4, 2]);
        let (c, lift) = compress_nukc(&m, &q(1), 3).unwrap();
        assert_eq!(c, m);
        assert_eq!(lift, NukcLifter::identity(3));
    }

    #[test]
    fn rejects_small_first_budget() {
        let m = inst(&[0, 10], &[0, 2], &[5, 3]);
        assert!(matches!(compress_nukc(&m, &q(1), 2), Err(Error::PreconditionViolated(_))));
        let (p, lift) = push_small_first(&m).unwrap();
        assert_eq!(p.budgets(), &[q(2)]);
        assert_eq!(lift.origin, vec![2]);
    }

    #[test]
    fn guarantees_and_feasibility_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        for _ in 0..80 {
            let raw = random_metric_instance(&mut rng, 6, 3);
            let Some(opt) = exhaustive_nukc(&raw).unwrap() else { continue };
            let m = raw.scaled_radii(&opt.beta);
            let Some((m, pre)) = push_small_first(&m) else { continue };
            for eps in [qf(1, 4), qf(1, 2), q(1)] {
                let (c, lift) = compress_nukc(&m, &eps, m.levels()).unwrap();
                assert!(is_compressed(&c, &eps, c.levels()), "{c:?}");
                // (1,1)-feasibility survives compression.
                let o = exhaustive_nukc(&c).unwrap().expect("compressed optimum exists");
                assert!(o.beta <= q(1), "compressed optimum {} for {c:?}", o.beta);
                // Lifting loses at most 1+ε in both budget and dilation.
                let orig = pre.then(&lift).lift(&o.witness);
                let a = budget_stretch(&raw, &orig, true).unwrap();
                assert!(a <= Q::one() + &eps, "alpha {a}");
                let b = coverage_dilation(&raw, &orig).unwrap();
                assert!(b <= (Q::one() + &eps) * &opt.beta);
                assert!(is_feasible(&raw, &orig, &a, &b, true));
                checked += 1;
            }
        }
        assert!(checked >= 60, "{checked}");
    }
}

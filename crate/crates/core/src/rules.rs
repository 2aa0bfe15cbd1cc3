//! Ordinal committee rules.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AltIndex, Committee, Election};
use crate::ordering::{majority_order, order_alternatives, order_subset, AlternativeOrder, MajorityOrder, MarginTable};
use crate::scalar::{Scalar, Surd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    PolarK2,
    PolarK3,
    PolarGeneral,
    KExtremes,
    Interior,
    TopOfMajority,
}

impl RuleId {
    pub const ALL: [RuleId; 6] =
        [RuleId::PolarK2, RuleId::PolarK3, RuleId::PolarGeneral, RuleId::KExtremes, RuleId::Interior, RuleId::TopOfMajority];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::PolarK2 => "polar-k2",
            RuleId::PolarK3 => "polar-k3",
            RuleId::PolarGeneral => "polar-general",
            RuleId::KExtremes => "k-extremes",
            RuleId::Interior => "interior",
            RuleId::TopOfMajority => "top-of-majority",
        }
    }

    /// Runs the rule on `e` for committee size `e.committee_size()`.
    pub fn apply(self, e: &Election) -> Result<Committee> {
        match self {
            RuleId::PolarK2 => polar_k2(e),
            RuleId::PolarK3 => polar_k3(e),
            RuleId::PolarGeneral => polar_general(e),
            RuleId::TopOfMajority => top_of_majority(e),
            RuleId::KExtremes => k_extremes(&order_alternatives(e)?, e.committee_size()),
            RuleId::Interior => {
                let order = order_alternatives(e)?;
                let majority = majority_order(e, &order);
                interior_committee(&order, &majority, e.committee_size())
            }
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::ParameterOutOfRange(format!("unknown rule `{s}`")))
    }
}

/// Utilitarian distortion guaranteed by `rule` at committee size `k`, if any.
pub fn rule_bound(rule: RuleId, k: usize) -> Option<Surd> {
    let q = |p: i64, r: i64| Scalar::new(p, r);
    match (rule, k) {
        (RuleId::TopOfMajority, 1) => Some(Surd::rational(Scalar::from_int(3))),
        (RuleId::PolarK2, 2) => Some(Surd::sqrt2(Scalar::one(), Scalar::one())),
        (RuleId::PolarK3, 3) => Some(Surd::rational(q(7, 3))),
        (RuleId::PolarGeneral, 0) => None,
        (RuleId::PolarGeneral, 1) => rule_bound(RuleId::TopOfMajority, 1),
        (RuleId::PolarGeneral, 2 | 4) => rule_bound(RuleId::PolarK2, 2),
        (RuleId::PolarGeneral, k) => {
            let k = k as i64;
            Some(match k % 3 {
                0 => Surd::rational(q(7, 3)),
                1 => Surd::sqrt2(q(7, 3) - q(16, 3 * k), q(4, k)),
                _ => Surd::sqrt2(q(7, 3) - q(8, 3 * k), q(2, k)),
            })
        }
        _ => None,
    }
}

/// One stage of a composition: `reps` runs of `rule`, each of size `size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    pub rule: RuleId,
    pub size: usize,
    pub reps: usize,
}

impl Phase {
    pub fn new(rule: RuleId, size: usize, reps: usize) -> Self {
        Phase { rule, size, reps }
    }
}

/// Runs the phases in order, each run on the alternatives not yet chosen.
pub fn compose(e: &Election, phases: &[Phase]) -> Result<Committee> {
    let k = e.committee_size();
    let total: usize = phases.iter().map(|p| p.size * p.reps).sum();
    if total != k {
        return Err(Error::CommitteeSizeMismatch { expected: k, found: total });
    }
    let bounds: Vec<Option<Surd>> = phases.iter().filter(|p| p.reps > 0).map(|p| rule_bound(p.rule, p.size)).collect();
    for pair in bounds.windows(2) {
        if let (Some(hi), Some(lo)) = (&pair[0], &pair[1]) {
            if hi.cmp_surd(lo) == Ordering::Less {
                return Err(Error::PhaseOrder);
            }
        }
    }
    if e.alternative_count() < k {
        return Err(Error::InsufficientAlternatives { needed: k, available: e.alternative_count() });
    }
    let mut chosen: BTreeSet<String> = BTreeSet::new();
    for phase in phases {
        for _ in 0..phase.reps {
            let rest = e.without(&chosen, phase.size)?;
            let picked = phase.rule.apply(&rest)?;
            chosen.extend(picked.ids().iter().cloned());
        }
    }
    Committee::new(chosen)
}

/// Phase plan used by [`polar_general`].
pub fn polar_phases(k: usize) -> Vec<Phase> {
    let (q, r) = (k / 3, k % 3);
    match (k, r) {
        (1, _) => vec![Phase::new(RuleId::TopOfMajority, 1, 1)],
        (2, _) => vec![Phase::new(RuleId::PolarK2, 2, 1)],
        (4, _) => vec![Phase::new(RuleId::PolarK2, 2, 2)],
        (_, 0) => vec![Phase::new(RuleId::PolarK3, 3, q)],
        (_, 1) => vec![Phase::new(RuleId::PolarK2, 2, 2), Phase::new(RuleId::PolarK3, 3, q - 1)],
        _ => vec![Phase::new(RuleId::PolarK2, 2, 1), Phase::new(RuleId::PolarK3, 3, q)],
    }
}

pub fn polar_general(e: &Election) -> Result<Committee> {
    compose(e, &polar_phases(e.committee_size()))
}

fn top_of_majority(e: &Election) -> Result<Committee> {
    if e.committee_size() != 1 {
        return Err(Error::CommitteeSizeMismatch { expected: 1, found: e.committee_size() });
    }
    let order = order_alternatives(e)?;
    Committee::new([majority_order(e, &order).head()])
}

/// Majority order plus margins, as every polar rule starts.
fn leaders(e: &Election, k: usize) -> Result<MajorityOrder> {
    if e.committee_size() != k {
        return Err(Error::CommitteeSizeMismatch { expected: k, found: e.committee_size() });
    }
    let order = order_alternatives(e)?;
    Ok(majority_order(e, &order))
}

/// Nearest alternative beyond `pivot` as seen from `anchor`.
///
/// Works on `A ∖ {pivot}` after dropping alternatives dominated within it. A
/// neighbour `y` of `anchor` in that order lies past `pivot` exactly when no
/// voter ranks both `anchor` and `y` above `pivot`.
fn flank(e: &Election, margins: &MarginTable, pivot: AltIndex, anchor: AltIndex) -> Result<Option<AltIndex>> {
    let pool: Vec<AltIndex> = (0..e.alternative_count()).filter(|&x| x != pivot).collect();
    let kept = margins.undominated(&pool);
    let order = order_subset(e, &kept)?;
    let Some(at) = order.iter().position(|&x| x == anchor) else {
        return Err(Error::NotLineRealizable(format!("`{}` is dominated once `{}` is removed", e.id(anchor), e.id(pivot))));
    };
    let beyond = |y: AltIndex| (0..e.voter_count()).all(|v| !(e.prefers(v, anchor, pivot) && e.prefers(v, y, pivot)));
    let neighbours = [at.checked_sub(1), Some(at + 1)];
    let found: Vec<AltIndex> =
        neighbours.into_iter().flatten().filter_map(|i| order.get(i).copied()).filter(|&y| beyond(y)).collect();
    match found[..] {
        [] => Ok(None),
        [y] => Ok(Some(y)),
        _ => Err(Error::NotLineRealizable(format!("both neighbours of `{}` lie past `{}`", e.id(anchor), e.id(pivot)))),
    }
}

/// `v ≤ n(√2 − 1)`, i.e. `v ≤ n/(1+√2)`, decided over the integers.
pub fn at_most_silver_share(v: usize, n: usize) -> bool {
    let (v, n) = (v as u128, n as u128);
    v * v + 2 * n * v <= n * n
}

/// `v ≥ n(√2 − 1)`.
pub fn at_least_silver_share(v: usize, n: usize) -> bool {
    let (v, n) = (v as u128, n as u128);
    v * v + 2 * n * v >= n * n
}

pub fn polar_k2(e: &Election) -> Result<Committee> {
    let majority = leaders(e, 2)?;
    let margins = majority.margins();
    let (a, b) = (majority.indices()[0], majority.indices()[1]);
    let n = e.voter_count();
    let pick = match flank(e, margins, a, b)? {
        None => [a, b],
        Some(c) if at_most_silver_share(margins.wins(c, b), n) => [a, b],
        Some(_) if at_least_silver_share(margins.wins(b, a), n) => [a, b],
        Some(c) => [a, c],
    };
    Committee::from_indices(e, &pick)
}

pub fn polar_k3(e: &Election) -> Result<Committee> {
    let majority = leaders(e, 3)?;
    let margins = majority.margins();
    let seq = majority.indices();
    let (a, b1) = (seq[0], seq[1]);
    let third = match (flank(e, margins, a, b1)?, flank(e, margins, b1, a)?) {
        (None, Some(b2)) => b2,
        (Some(c), None) => c,
        (None, None) => seq[2],
        (Some(c), Some(b2)) => {
            if 5 * margins.wins(c, b2) >= 2 * e.voter_count() {
                c
            } else {
                b2
            }
        }
    };
    Committee::from_indices(e, &[a, b1, third])
}

/// The leftmost `⌊k/2⌋` and rightmost `⌈k/2⌉` alternatives of `order`.
pub fn k_extremes(order: &AlternativeOrder, k: usize) -> Result<Committee> {
    let ids = order.ids();
    if ids.len() < k {
        return Err(Error::InsufficientAlternatives { needed: k, available: ids.len() });
    }
    let left = k / 2;
    let right = k - left;
    Committee::new(ids[..left].iter().chain(&ids[ids.len() - right..]).cloned())
}

/// A contiguous window of `k` alternatives avoiding both ends of `order`.
///
/// Prefers windows holding the majority winner, then the smallest sum of
/// majority ranks, then the leftmost.
pub fn interior_committee(order: &AlternativeOrder, majority: &MajorityOrder, k: usize) -> Result<Committee> {
    let m = order.len();
    if k == 0 || k + 1 >= m {
        return Err(Error::CommitteeSizeTooLarge { k, m });
    }
    let ids = order.ids();
    let rank = |id: &String| majority.rank(id).unwrap_or(usize::MAX / (2 * m));
    let head = majority.head();
    let best = (1..m - k)
        .min_by_key(|&start| {
            let window = &ids[start..start + k];
            let has_head = window.iter().any(|id| id == head);
            (!has_head, window.iter().map(rank).sum::<usize>(), start)
        })
        .expect("k + 2 <= m leaves a window");
    Committee::new(ids[best..best + k].iter().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_profile, LineMetric};

    fn ids(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn committee(list: &[&str]) -> Committee {
        Committee::new(list.iter().copied()).unwrap()
    }

    fn placed(alts: &[(&str, Scalar)], groups: &[(usize, Scalar)], k: usize) -> Election {
        let voters: Vec<Scalar> = groups.iter().flat_map(|(c, x)| std::iter::repeat_n(x.clone(), *c)).collect();
        let n = voters.len();
        let d = LineMetric::from_pairs(voters, alts.iter().map(|(id, x)| (id.to_string(), x.clone())));
        let names: Vec<String> = alts.iter().map(|(id, _)| id.to_string()).collect();
        derive_profile(&d, n, &names, k).unwrap()
    }

    fn k2_profile(n1: usize, n2: usize) -> Election {
        let mut rankings = vec![ids(&["a'", "b'", "a", "b"]); n1];
        rankings.extend(vec![ids(&["a", "b", "a'", "b'"]); n2]);
        Election::new(ids(&["a", "b", "a'", "b'"]), 2, rankings).unwrap()
    }

    #[test]
    fn silver_threshold_is_exact() {
        // 12/(1+√2) ≈ 4.97 and 5/(1+√2) ≈ 2.07
        assert!(at_most_silver_share(4, 12));
        assert!(!at_most_silver_share(5, 12));
        assert!(at_most_silver_share(2, 5));
        assert!(!at_most_silver_share(3, 5));
        assert!(at_least_silver_share(5, 12));
        assert!(!at_least_silver_share(0, 12));
    }

    #[test]
    fn polar_k2_unanimous() {
        let e = Election::new(ids(&["a", "b", "c"]), 2, vec![ids(&["a", "b", "c"]); 3]).unwrap();
        assert_eq!(polar_k2(&e).unwrap(), committee(&["a", "b"]));
    }

    #[test]
    fn polar_k2_lower_bound_profile() {
        assert_eq!(polar_k2(&k2_profile(5, 7)).unwrap(), committee(&["a", "a'"]));
    }

    #[test]
    fn polar_k2_keeps_top_two_below_threshold() {
        let e = placed(
            &[("a", Scalar::zero()), ("b", Scalar::one()), ("c", Scalar::from_int(-1))],
            &[(3, Scalar::new(1, 10)), (2, Scalar::new(-9, 10))],
            2,
        );
        assert_eq!(polar_k2(&e).unwrap(), committee(&["a", "b"]));
    }

    #[test]
    fn polar_k2_rejects_other_sizes() {
        let e = k2_profile(1, 1).with_committee_size(3).unwrap();
        assert_eq!(polar_k2(&e).unwrap_err(), Error::CommitteeSizeMismatch { expected: 2, found: 3 });
    }

    fn k3_layout(w: [usize; 3]) -> Election {
        placed(
            &[("c", Scalar::from_int(-2)), ("a", Scalar::zero()), ("b1", Scalar::one()), ("b2", Scalar::from_int(3))],
            &[(w[0], Scalar::new(1, 5)), (w[1], Scalar::new(5, 2)), (w[2], Scalar::new(-3, 2))],
            3,
        )
    }

    #[test]
    fn polar_k3_examples() {
        let e = k3_layout([4, 3, 3]);
        let order = order_alternatives(&e).unwrap();
        assert_eq!(majority_order(&e, &order).ids(), &ids(&["a", "b1", "c", "b2"])[..]);
        assert_eq!(polar_k3(&e).unwrap(), committee(&["a", "b1", "c"]));
        assert_eq!(polar_k3(&k3_layout([2, 7, 1])).unwrap(), committee(&["a", "b1", "b2"]));
    }

    #[test]
    fn polar_k3_unanimous() {
        let e = Election::new(ids(&["a", "b", "c"]), 3, vec![ids(&["a", "b", "c"]); 2]).unwrap();
        assert_eq!(polar_k3(&e).unwrap(), committee(&["a", "b", "c"]));
    }

    #[test]
    fn composition_sizes() {
        let e = k2_profile(5, 7).with_committee_size(4).unwrap();
        assert_eq!(polar_general(&e).unwrap().len(), 4);
        let one = compose(&e.with_committee_size(2).unwrap(), &[Phase::new(RuleId::PolarK2, 2, 0), Phase::new(RuleId::PolarK2, 2, 1)]);
        assert_eq!(one.unwrap(), polar_k2(&k2_profile(5, 7)).unwrap());
        let wrong = compose(&e, &[Phase::new(RuleId::PolarK3, 3, 1), Phase::new(RuleId::TopOfMajority, 1, 1)]);
        assert_eq!(wrong.unwrap_err(), Error::PhaseOrder);
    }

    #[test]
    fn general_phase_plans() {
        assert_eq!(polar_phases(6), vec![Phase::new(RuleId::PolarK3, 3, 2)]);
        assert_eq!(polar_phases(5), vec![Phase::new(RuleId::PolarK2, 2, 1), Phase::new(RuleId::PolarK3, 3, 1)]);
        assert_eq!(polar_phases(7), vec![Phase::new(RuleId::PolarK2, 2, 2), Phase::new(RuleId::PolarK3, 3, 1)]);
        for k in 1..=30 {
            assert_eq!(polar_phases(k).iter().map(|p| p.size * p.reps).sum::<usize>(), k);
        }
    }

    #[test]
    fn general_bounds() {
        let b = |k| rule_bound(RuleId::PolarGeneral, k).unwrap();
        assert_eq!(b(4), Surd::sqrt2(Scalar::one(), Scalar::one()));
        assert_eq!(b(9), Surd::rational(Scalar::new(7, 3)));
        // 7/3 + 2(√2 − 4/3)/5
        assert_eq!(b(5), Surd::sqrt2(Scalar::new(7, 3) - Scalar::new(8, 15), Scalar::new(2, 5)));
        assert_eq!(b(8), Surd::sqrt2(Scalar::new(7, 3) - Scalar::new(1, 3), Scalar::new(1, 4)));
        assert!((b(7).to_f64() - 2.3333333 - 4.0 * (2f64.sqrt() - 4.0 / 3.0) / 7.0).abs() < 1e-6);
    }

    #[test]
    fn general_k_runs_phases_disjointly() {
        let alts: Vec<(String, Scalar)> = (0..9).map(|i| (format!("x{i}"), Scalar::from_int(3 * i))).collect();
        let alt_refs: Vec<(&str, Scalar)> = alts.iter().map(|(id, x)| (id.as_str(), x.clone())).collect();
        let groups: Vec<(usize, Scalar)> = [1, 4, 7, 10, 13].iter().map(|&x| (2, Scalar::from_int(3 * x + 1))).collect();
        for k in 1..=7 {
            let e = placed(&alt_refs, &groups, k);
            let c = polar_general(&e).unwrap();
            assert_eq!(c.len(), k);
        }
    }

    #[test]
    fn extremes() {
        let order = AlternativeOrder::from_ids(["a", "b", "c"]);
        assert_eq!(k_extremes(&order, 2).unwrap(), committee(&["a", "c"]));
        assert_eq!(k_extremes(&order, 3).unwrap(), committee(&["a", "b", "c"]));
        let order = AlternativeOrder::from_ids(["a", "b", "c", "d", "e"]);
        assert_eq!(k_extremes(&order, 3).unwrap(), committee(&["a", "d", "e"]));
        assert!(matches!(k_extremes(&order, 6), Err(Error::InsufficientAlternatives { .. })));
    }

    #[test]
    fn interior_windows() {
        let e = placed(
            &[("a", Scalar::zero()), ("b", Scalar::from_int(2)), ("c", Scalar::from_int(4)), ("d", Scalar::from_int(6))],
            &[(3, Scalar::new(3, 2)), (1, Scalar::new(13, 2)), (1, Scalar::from_int(-1))],
            2,
        );
        let order = order_alternatives(&e).unwrap();
        let majority = majority_order(&e, &order);
        assert_eq!(majority.head(), "b");
        assert_eq!(interior_committee(&order, &majority, 2).unwrap(), committee(&["b", "c"]));
        assert_eq!(interior_committee(&order, &majority, 1).unwrap(), committee(&["b"]));

        let order = AlternativeOrder::from_ids(["a", "b", "c"]);
        assert_eq!(
            interior_committee(&order, &majority, 2).unwrap_err(),
            Error::CommitteeSizeTooLarge { k: 2, m: 3 }
        );
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in RuleId::ALL {
            assert_eq!(rule.name().parse::<RuleId>().unwrap(), rule);
        }
    }
}

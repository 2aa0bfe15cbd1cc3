//! Optimal committees under a fixed metric.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::costs::{alternative_cost, social_cost, Objective};
use crate::error::{Error, Result};
use crate::model::{Committee, Election, LineMetric};
use crate::scalar::Scalar;

/// Committees examined before brute force gives up: `C(20, 10)`.
pub const DEFAULT_BUDGET: u64 = 184_756;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OptMethod {
    Fast,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptResult {
    pub committee: Committee,
    pub cost: Scalar,
    pub method: OptMethod,
}

/// The `k` alternatives of smallest total distance, ties broken by id.
pub fn optimal_utilitarian(e: &Election, d: &LineMetric) -> Result<OptResult> {
    d.covers(e)?;
    let mut costs: Vec<(Scalar, &String)> =
        e.alternatives().iter().map(|id| Ok((alternative_cost(d, id)?, id))).collect::<Result<_>>()?;
    costs.sort();
    costs.truncate(e.committee_size());
    let cost = costs.iter().map(|(c, _)| c).sum();
    let committee = Committee::new(costs.into_iter().map(|(_, id)| id.clone()))?;
    Ok(OptResult { committee, cost, method: OptMethod::Fast })
}

/// `C(m, k)`, saturating at `u64::MAX`.
pub fn binomial(m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exhaustive minimizer; the lexicographically first optimal committee wins.
pub fn optimal_bruteforce(e: &Election, d: &LineMetric, objective: Objective, budget: u64) -> Result<OptResult> {
    d.covers(e)?;
    let k = e.committee_size();
    let mut ids: Vec<String> = e.alternatives().to_vec();
    ids.sort();
    let m = ids.len();
    let required = binomial(m, k);
    if required > budget {
        return Err(Error::BudgetExceeded { limit: budget, required });
    }

    let pick = match IntegerFrame::new(d, &ids)? {
        Some(frame) => {
            let mut per_voter = vec![0i128; d.voter_count()];
            first_minimum(m, k, |pick| frame.cost(pick, objective, &mut per_voter))
        }
        None => first_minimum(m, k, |pick| {
            let committee = Committee::new(pick.iter().map(|&a| ids[a].clone())).expect("distinct ids");
            social_cost(d, &committee, objective).expect("covered metric")
        }),
    };
    let committee = Committee::new(pick.iter().map(|&a| ids[a].clone()))?;
    let cost = social_cost(d, &committee, objective)?;
    Ok(OptResult { committee, cost, method: OptMethod::BruteForce })
}

/// Advances `pick` to the next `k`-subset of `0..m` in lexicographic order.
pub fn next_combination(pick: &mut [usize], m: usize) -> bool {
    let k = pick.len();
    let Some(i) = (0..k).rev().find(|&i| pick[i] < m - k + i) else { return false };
    pick[i] += 1;
    for j in i + 1..k {
        pick[j] = pick[j - 1] + 1;
    }
    true
}

fn first_minimum<K: Ord>(m: usize, k: usize, mut cost: impl FnMut(&[usize]) -> K) -> Vec<usize> {
    let mut pick: Vec<usize> = (0..k).collect();
    let mut best = (cost(&pick), pick.clone());
    while next_combination(&mut pick, m) {
        let c = cost(&pick);
        if c < best.0 {
            best = (c, pick.clone());
        }
    }
    best.1
}

/// Positions rescaled to integers over a common denominator.
struct IntegerFrame {
    dist: Vec<Vec<i128>>,
    alt_cost: Vec<i128>,
}

impl IntegerFrame {
    /// `None` when the rescaled positions do not fit in 64 bits.
    fn new(d: &LineMetric, ids: &[String]) -> Result<Option<Self>> {
        let alts: Vec<&Scalar> = ids.iter().map(|id| d.alternative(id)).collect::<Result<_>>()?;
        let mut lcm = BigInt::one();
        for x in d.voters().iter().chain(alts.iter().copied()) {
            lcm = lcm.lcm(x.denom());
        }
        let scale = |x: &Scalar| (x.numer() * (&lcm / x.denom())).to_i64().map(i128::from);
        let Some(voters) = d.voters().iter().map(scale).collect::<Option<Vec<i128>>>() else { return Ok(None) };
        let Some(alts) = alts.into_iter().map(scale).collect::<Option<Vec<i128>>>() else { return Ok(None) };
        let dist: Vec<Vec<i128>> = alts.iter().map(|a| voters.iter().map(|v| (v - a).abs()).collect()).collect();
        let alt_cost = dist.iter().map(|row| row.iter().sum()).collect();
        Ok(Some(IntegerFrame { dist, alt_cost }))
    }

    fn cost(&self, pick: &[usize], objective: Objective, per_voter: &mut [i128]) -> i128 {
        match objective {
            Objective::UtilitarianAdditive => pick.iter().map(|&a| self.alt_cost[a]).sum(),
            Objective::EgalitarianAdditive => {
                per_voter.iter_mut().for_each(|c| *c = 0);
                for &a in pick {
                    for (c, dist) in per_voter.iter_mut().zip(&self.dist[a]) {
                        *c += dist;
                    }
                }
                per_voter.iter().copied().max().unwrap_or(0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive_profile;

    fn ids(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn three_alt_instance(k: usize) -> (Election, LineMetric) {
        let mut voters = vec![Scalar::new(1, 10); 3];
        voters.extend(vec![Scalar::new(-9, 10); 2]);
        let d = LineMetric::from_pairs(
            voters,
            [("a", Scalar::zero()), ("b", Scalar::one()), ("c", Scalar::from_int(-1))],
        );
        let e = derive_profile(&d, 5, &ids(&["a", "b", "c"]), k).unwrap();
        (e, d)
    }

    #[test]
    fn utilitarian_example() {
        let (e, d) = three_alt_instance(2);
        let fast = optimal_utilitarian(&e, &d).unwrap();
        assert_eq!(fast.committee, Committee::new(["a", "c"]).unwrap());
        assert_eq!(fast.cost, Scalar::new(28, 5));
        let brute = optimal_bruteforce(&e, &d, Objective::UtilitarianAdditive, DEFAULT_BUDGET).unwrap();
        assert_eq!(brute.committee, fast.committee);
        assert_eq!(brute.cost, fast.cost);
    }

    #[test]
    fn full_committee() {
        let (e, d) = three_alt_instance(3);
        let all = Committee::new(["a", "b", "c"]).unwrap();
        assert_eq!(optimal_utilitarian(&e, &d).unwrap().committee, all);
        for objective in [Objective::UtilitarianAdditive, Objective::EgalitarianAdditive] {
            assert_eq!(optimal_bruteforce(&e, &d, objective, DEFAULT_BUDGET).unwrap().committee, all);
        }
    }

    #[test]
    fn egalitarian_k_extremes_instance() {
        let d = LineMetric::from_pairs(
            vec![Scalar::zero(), Scalar::one()],
            [("a", Scalar::from_int(-1)), ("b", Scalar::zero()), ("c", Scalar::one())],
        );
        let e = Election::new(ids(&["a", "b", "c"]), 2, vec![ids(&["b", "a", "c"]), ids(&["c", "b", "a"])]).unwrap();
        let opt = optimal_bruteforce(&e, &d, Objective::EgalitarianAdditive, DEFAULT_BUDGET).unwrap();
        assert_eq!(opt.committee, Committee::new(["b", "c"]).unwrap());
        assert_eq!(opt.cost, Scalar::one());
    }

    #[test]
    fn budget_is_enforced() {
        let (e, d) = three_alt_instance(2);
        let err = optimal_bruteforce(&e, &d, Objective::UtilitarianAdditive, 2).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { limit: 2, required: 3 });
    }

    #[test]
    fn combinations_in_order() {
        let mut pick = vec![0, 1];
        let mut seen = vec![pick.clone()];
        while next_combination(&mut pick, 4) {
            seen.push(pick.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(binomial(20, 10), DEFAULT_BUDGET);
        assert_eq!(binomial(3, 4), 0);
    }
}

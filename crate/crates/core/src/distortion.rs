//! Distortion under a fixed metric and in the worst case over consistent
//! line metrics, plus the focal-point voter transform.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::costs::{social_cost, Objective};
use crate::error::{Error, Result};
use crate::model::{check_consistency, Committee, ConsistencyMode, Election, LineMetric};
use crate::optimal::{binomial, next_combination, optimal_bruteforce, optimal_utilitarian, DEFAULT_BUDGET};
use crate::ordering::{order_alternatives, pairwise_margin};
use crate::scalar::Scalar;
use crate::simplex::{LinearProgram, LpOutcome, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedDistortion {
    pub ratio: Scalar,
    pub chosen: Committee,
    pub chosen_cost: Scalar,
    pub optimal: Committee,
    pub optimal_cost: Scalar,
    pub objective: Objective,
}

/// `SC(S) / min_{S'} SC(S')` for the metric `d`.
pub fn distortion_fixed(e: &Election, d: &LineMetric, s: &Committee, objective: Objective) -> Result<FixedDistortion> {
    d.covers(e)?;
    e.check_committee(s)?;
    let opt = match objective {
        Objective::UtilitarianAdditive => optimal_utilitarian(e, d)?,
        Objective::EgalitarianAdditive => optimal_bruteforce(e, d, objective, DEFAULT_BUDGET)?,
    };
    let chosen_cost = social_cost(d, s, objective)?;
    let ratio = if opt.cost.is_zero() {
        if !chosen_cost.is_zero() {
            return Err(Error::ZeroOptimum);
        }
        Scalar::one()
    } else {
        &chosen_cost / &opt.cost
    };
    Ok(FixedDistortion {
        ratio,
        chosen: s.clone(),
        chosen_cost,
        optimal: opt.committee,
        optimal_cost: opt.cost,
        objective,
    })
}

/// `2n / |V_{a≻b}| − 1`, an upper bound on `SC(a)/SC(b)` under any consistent metric.
pub fn ratio_bound(e: &Election, a: &str, b: &str) -> Result<Scalar> {
    let v = pairwise_margin(e, a, b)?;
    if v == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(Scalar::new(2 * e.voter_count() as i64, v as i64) - Scalar::one())
}

/// Two committees of equal size whose private members sit on opposite sides
/// of their intersection, together with a threshold `τ > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FocalQuery {
    pub s1: Committee,
    pub s2: Committee,
    pub tau: Scalar,
}

/// Indices derived from a [`FocalQuery`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FocalIndices {
    pub k: usize,
    pub t: usize,
    pub r: i64,
    pub j_star: BigInt,
    pub i_star: Option<BigInt>,
    /// `None` stands for `+∞`.
    pub tau_hat: Option<Scalar>,
}

/// Positions of `S2 ∖ C`, `C` and `S1 ∖ C` in the frame where `S2 ∖ C` is on the left.
struct Frame {
    left: Vec<Scalar>,
    common: Vec<Scalar>,
    /// Descending: `right[0]` is the rightmost member.
    right: Vec<Scalar>,
    mirrored: bool,
}

impl Frame {
    fn new(q: &FocalQuery, d: &LineMetric) -> Result<Frame> {
        let k = q.s1.len();
        if q.s2.len() != k {
            return Err(Error::InvalidCommittee(format!("committee sizes differ: {} and {}", k, q.s2.len())));
        }
        if q.s1 == q.s2 {
            return Err(Error::PreconditionViolated("the two committees coincide".into()));
        }
        if q.tau <= Scalar::one() {
            return Err(Error::ParameterOutOfRange(format!("threshold {} must exceed 1", q.tau)));
        }
        let positions = |ids: Vec<String>, negate: bool| -> Result<Vec<Scalar>> {
            ids.iter().map(|id| d.alternative(id).map(|x| if negate { -x } else { x.clone() })).collect()
        };
        for mirrored in [false, true] {
            let mut left = positions(q.s2.difference(&q.s1), mirrored)?;
            let mut common = positions(q.s1.intersection(&q.s2), mirrored)?;
            let mut right = positions(q.s1.difference(&q.s2), mirrored)?;
            left.sort();
            common.sort();
            right.sort_by(|a, b| b.cmp(a));
            let left_max = left.last();
            let right_min = right.last();
            let ok = match (common.first(), common.last()) {
                (Some(lo), Some(hi)) => left_max.is_none_or(|x| x <= lo) && right_min.is_none_or(|x| hi <= x),
                _ => match (left_max, right_min) {
                    (Some(l), Some(r)) => l <= r,
                    _ => true,
                },
            };
            if ok {
                return Ok(Frame { left, common, right, mirrored });
            }
        }
        Err(Error::PreconditionViolated("committees are not consecutive".into()))
    }

    fn k(&self) -> usize {
        self.left.len() + self.common.len()
    }

    fn out(&self, x: &Scalar) -> Scalar {
        if self.mirrored {
            -x
        } else {
            x.clone()
        }
    }
}

impl FocalQuery {
    pub fn new(s1: Committee, s2: Committee, tau: Scalar) -> Self {
        FocalQuery { s1, s2, tau }
    }

    pub fn indices(&self) -> FocalIndices {
        let k = self.s1.len();
        let t = self.s1.intersection(&self.s2).len();
        let tau = &self.tau;
        let one = Scalar::one();
        let ks = Scalar::from(k);
        let r = t as i64 - (k / 2) as i64;
        let j_star = (&ks * (tau - &one) / (Scalar::from_int(2) * tau)).ceil();
        let (i_star, tau_hat) = if r < 0 {
            (None, None)
        } else {
            let rs = Scalar::from_int(r);
            let two = Scalar::from_int(2);
            let denom = &two * (tau - &one);
            if k.is_multiple_of(2) {
                let i = ((&ks - &two * &rs) / &denom).floor();
                let hat = (r > 0).then(|| &ks / (&two * &rs));
                (Some(i), hat)
            } else {
                let i = ((&ks - &two * &rs - tau) / &denom).floor();
                (Some(i), Some(&ks / (&two * &rs + &one)))
            }
        };
        FocalIndices { k, t, r, j_star, i_star, tau_hat }
    }
}

fn pick(list: &[Scalar], index: &BigInt, name: &str) -> Result<Scalar> {
    index
        .to_usize()
        .filter(|&i| i >= 1 && i <= list.len())
        .map(|i| list[i - 1].clone())
        .ok_or_else(|| Error::IndexOutOfRange(format!("{name}_{index} with {} available", list.len())))
}

/// The focal point exactly as the index formulas prescribe.
///
/// For odd `k` with `|C| = ⌈k/2⌉`, and whenever the `c`-index formula lands
/// one slot short of the slope change, this point can lie where moving voters
/// lowers the ratio; [`crossing_point`] is the point that always works.
pub fn focal_point(q: &FocalQuery, d: &LineMetric) -> Result<Scalar> {
    let frame = Frame::new(q, d)?;
    let idx = q.indices();
    let use_b = match (&idx.i_star, &idx.tau_hat) {
        (None, _) => true,
        (Some(_), None) => true,
        (Some(_), Some(hat)) => q.tau <= *hat,
    };
    let x = if use_b {
        pick(&frame.right, &idx.j_star, "b")?
    } else {
        let i = idx.i_star.expect("r >= 0");
        pick(&frame.common, &(BigInt::from(idx.k.div_ceil(2)) + i), "c")?
    };
    Ok(frame.out(&x))
}

/// Where `s2 − τ·s1` changes sign, `s_j` being the slope of a single voter's
/// cost for `S_j` as a function of position.
///
/// Left of this point moving a voter right cannot bring the ratio down to `τ`;
/// right of it, moving left cannot.
pub fn crossing_point(q: &FocalQuery, d: &LineMetric) -> Result<Scalar> {
    let frame = Frame::new(q, d)?;
    let k = Scalar::from(frame.k());
    let two = Scalar::from_int(2);
    let (mut s2, mut s1) = (-&k, -&k);
    let mut members: Vec<(&Scalar, bool, bool)> = Vec::new();
    members.extend(frame.left.iter().map(|x| (x, true, false)));
    members.extend(frame.common.iter().map(|x| (x, true, true)));
    members.extend(frame.right.iter().rev().map(|x| (x, false, true)));
    for (x, in2, in1) in members {
        if in2 {
            s2 += &two;
        }
        if in1 {
            s1 += &two;
        }
        if !(&s2 - &q.tau * &s1).is_positive() {
            return Ok(frame.out(x));
        }
    }
    unreachable!("the slope difference ends at k(1 - τ) < 0")
}

/// Prescribed voter counts at points on the `S2 ∖ C` side of the focal point:
/// `counts[i]` voters must end up at `positions[i]`, cumulatively.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MoveConstraints {
    pub positions: Vec<Scalar>,
    pub cumulative: Vec<usize>,
}

impl MoveConstraints {
    pub fn new(positions: Vec<Scalar>, cumulative: Vec<usize>) -> Self {
        MoveConstraints { positions, cumulative }
    }
}

fn ratio_exceeds(d: &LineMetric, s1: &Committee, s2: &Committee, tau: &Scalar) -> Result<bool> {
    let sc1 = social_cost(d, s1, Objective::UtilitarianAdditive)?;
    let sc2 = social_cost(d, s2, Objective::UtilitarianAdditive)?;
    Ok(sc2 > tau * &sc1)
}

/// Pins `r_i − r_{i−1}` voters at each constraint point and moves every other
/// voter to the crossing point.
///
/// Voters are consumed from the `S2 ∖ C` side outward, so each moves toward the
/// crossing point.
pub fn move_voters(
    e: &Election,
    d: &LineMetric,
    s1: &Committee,
    s2: &Committee,
    tau: &Scalar,
    constraints: &MoveConstraints,
) -> Result<LineMetric> {
    d.covers(e)?;
    for c in [s1, s2] {
        for id in c.ids() {
            e.require_index(id)?;
        }
    }
    let query = FocalQuery::new(s1.clone(), s2.clone(), tau.clone());
    let frame = Frame::new(&query, d)?;
    if !ratio_exceeds(d, s1, s2, tau)? {
        return Err(Error::PreconditionViolated(format!("cost ratio does not exceed {tau}")));
    }
    let target = crossing_point(&query, d)?;
    let sign = |x: &Scalar| frame.out(x);
    let local_target = sign(&target);
    let positions: Vec<Scalar> = constraints.positions.iter().map(sign).collect();
    let cumulative = &constraints.cumulative;
    if positions.len() != cumulative.len() {
        return Err(Error::PreconditionViolated("constraint lists differ in length".into()));
    }
    let voters: Vec<Scalar> = d.voters().iter().map(sign).collect();
    let mut by_position: Vec<usize> = (0..voters.len()).collect();
    by_position.sort_by(|&a, &b| voters[a].cmp(&voters[b]).then(a.cmp(&b)));

    let mut moved = voters.clone();
    let mut next = 0usize;
    let mut previous: (Option<&Scalar>, usize) = (None, 0);
    for (x, &r) in positions.iter().zip(cumulative) {
        if previous.0.is_some_and(|p| p > x) || r < previous.1 || *x > local_target {
            return Err(Error::PreconditionViolated("constraints must be monotone and on the near side".into()));
        }
        if r > voters.len() || voters[by_position[r.max(1) - 1]] > *x && r > 0 {
            return Err(Error::PreconditionViolated(format!("fewer than {r} voters lie at or before {x}")));
        }
        while next < r {
            moved[by_position[next]] = x.clone();
            next += 1;
        }
        previous = (Some(x), r);
    }
    for &v in &by_position[next..] {
        moved[v] = local_target.clone();
    }
    Ok(LineMetric::new(moved.iter().map(sign).collect(), d.alternatives().clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversarialMode {
    /// Enumerates voter gap patterns and solves one linear program per
    /// pattern and rival committee.
    Exact,
    /// Seeded random placements with local improvement; a lower bound.
    Sample { seed: u64 },
}

/// Size caps for exact adversarial search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactCaps {
    pub max_voters: usize,
    pub max_alternatives: usize,
}

impl Default for ExactCaps {
    fn default() -> Self {
        ExactCaps { max_voters: 5, max_alternatives: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversarialResult {
    pub ratio: Scalar,
    pub witness: LineMetric,
    pub optimal: Committee,
    pub mode: AdversarialMode,
    /// Linear programs solved or placements sampled.
    pub evaluated: u64,
}

/// Worst-case distortion of `s` over line metrics weakly consistent with `e`.
pub fn adversarial_distortion(
    e: &Election,
    s: &Committee,
    objective: Objective,
    mode: AdversarialMode,
    budget: u64,
) -> Result<AdversarialResult> {
    adversarial_distortion_capped(e, s, objective, mode, budget, ExactCaps::default())
}

pub fn adversarial_distortion_capped(
    e: &Election,
    s: &Committee,
    objective: Objective,
    mode: AdversarialMode,
    budget: u64,
    caps: ExactCaps,
) -> Result<AdversarialResult> {
    e.check_committee(s)?;
    match mode {
        AdversarialMode::Exact => exact_search(e, s, objective, budget, caps),
        AdversarialMode::Sample { seed } => sample_search(e, s, objective, budget, seed),
    }
}

/// A linear form over the spacing and offset variables.
type Form = Vec<i64>;

struct ExactModel {
    m: usize,
    n: usize,
    /// Position in the recovered order of each alternative of `e`.
    slot: Vec<usize>,
}

impl ExactModel {
    fn vars(&self) -> usize {
        self.m - 1 + self.n
    }

    /// `X_p = y_1 + … + y_p`.
    fn alt(&self, p: usize) -> Form {
        let mut f = vec![0; self.vars()];
        f[..p].iter_mut().for_each(|c| *c = 1);
        f
    }

    /// Voter position when it sits in gap `g` (gap `g` ends at `X_g`).
    fn voter(&self, i: usize, g: usize) -> Form {
        let mut f = if g == 0 { vec![0; self.vars()] } else { self.alt(g - 1) };
        f[self.m - 1 + i] = if g == 0 { -1 } else { 1 };
        f
    }

    fn distance(&self, i: usize, g: usize, p: usize) -> Form {
        let (x, a) = (self.voter(i, g), self.alt(p));
        if p < g {
            x.iter().zip(&a).map(|(x, a)| x - a).collect()
        } else {
            a.iter().zip(&x).map(|(a, x)| a - x).collect()
        }
    }

    fn committee_cost(&self, gaps: &[usize], members: &[usize]) -> Form {
        let mut f = vec![0; self.vars()];
        for (i, &g) in gaps.iter().enumerate() {
            for &p in members {
                for (c, d) in f.iter_mut().zip(self.distance(i, g, p)) {
                    *c += d;
                }
            }
        }
        f
    }

    fn program(&self, e: &Election, gaps: &[usize], chosen: &[usize], rival: &[usize]) -> LinearProgram {
        let scal = |f: Form| f.into_iter().map(Scalar::from_int).collect::<Vec<_>>();
        let mut lp = LinearProgram::new(self.vars());
        for (i, &g) in gaps.iter().enumerate() {
            if (1..self.m).contains(&g) {
                let mut f = vec![0; self.vars()];
                f[self.m - 1 + i] = 1;
                f[g - 1] = -1;
                lp.push(scal(f), Relation::Le, Scalar::zero());
            }
            let ranking = e.ranking(i).as_slice();
            for pair in ranking.windows(2) {
                let (a, b) = (self.slot[pair[0]], self.slot[pair[1]]);
                let f: Form =
                    self.distance(i, g, a).iter().zip(self.distance(i, g, b)).map(|(x, y)| x - y).collect();
                if f.iter().any(|&c| c != 0) {
                    lp.push(scal(f), Relation::Le, Scalar::zero());
                }
            }
        }
        lp.push(scal(self.committee_cost(gaps, rival)), Relation::Eq, Scalar::one());
        lp.objective = scal(self.committee_cost(gaps, chosen));
        lp
    }

    fn witness(&self, e: &Election, gaps: &[usize], point: &[Scalar]) -> LineMetric {
        let eval = |f: &Form| -> Scalar {
            f.iter().zip(point).filter(|(c, _)| **c != 0).map(|(c, x)| &Scalar::from_int(*c) * x).sum()
        };
        let alternatives: BTreeMap<String, Scalar> =
            (0..self.m).map(|a| (e.id(a).to_string(), eval(&self.alt(self.slot[a])))).collect();
        let voters = gaps.iter().enumerate().map(|(i, &g)| eval(&self.voter(i, g))).collect();
        LineMetric::new(voters, alternatives)
    }
}

fn exact_search(e: &Election, s: &Committee, objective: Objective, budget: u64, caps: ExactCaps) -> Result<AdversarialResult> {
    if objective != Objective::UtilitarianAdditive {
        return Err(Error::PreconditionViolated("exact search supports the utilitarian objective only".into()));
    }
    let (n, m, k) = (e.voter_count(), e.alternative_count(), e.committee_size());
    if n > caps.max_voters || m > caps.max_alternatives {
        return Err(Error::PreconditionViolated(format!(
            "exact search is capped at {} voters and {} alternatives",
            caps.max_voters, caps.max_alternatives
        )));
    }
    let order = order_alternatives(e)?;
    if order.len() != m {
        return Err(Error::PreconditionViolated("exact search needs a profile without dominated alternatives".into()));
    }
    let slot: Vec<usize> = (0..m).map(|a| order.position(e.id(a)).expect("all alternatives ordered")).collect();
    let model = ExactModel { m, n, slot };
    let chosen: Vec<usize> = s.ids().iter().map(|id| Ok(model.slot[e.require_index(id)?])).collect::<Result<_>>()?;

    let mut rivals: Vec<Vec<usize>> = Vec::new();
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let mut members = pick.clone();
        members.sort();
        let mut own = chosen.clone();
        own.sort();
        if members != own {
            rivals.push(members);
        }
        if !next_combination(&mut pick, m) {
            break;
        }
    }
    // Each voter sits in one of the two gaps around its top choice.
    let patterns: Vec<Vec<usize>> = (0..1u32 << n)
        .map(|mask| (0..n).map(|i| model.slot[e.ranking(i).top()] + ((mask >> i) & 1) as usize).collect())
        .collect();
    let required = (patterns.len() as u64).saturating_mul(rivals.len() as u64);
    if required > budget {
        return Err(Error::BudgetExceeded { limit: budget, required });
    }
    debug_assert_eq!(rivals.len() as u64 + 1, binomial(m, k));

    let jobs: Vec<(usize, usize)> =
        (0..rivals.len()).flat_map(|r| (0..patterns.len()).map(move |p| (r, p))).collect();
    let outcomes: Vec<LpOutcome> = jobs
        .par_iter()
        .map(|&(r, p)| model.program(e, &patterns[p], &chosen, &rivals[r]).maximize())
        .collect();

    let mut best: Option<(Scalar, usize)> = None;
    for (job, outcome) in outcomes.iter().enumerate() {
        match outcome {
            LpOutcome::Unbounded => return Err(Error::Unbounded),
            LpOutcome::Infeasible => {}
            LpOutcome::Optimal { value, .. } => {
                if best.as_ref().is_none_or(|(b, _)| value > b) {
                    best = Some((value.clone(), job));
                }
            }
        }
    }
    let witness = match best {
        Some((_, job)) => {
            let LpOutcome::Optimal { point, .. } = &outcomes[job] else { unreachable!() };
            model.witness(e, &patterns[jobs[job].1], point)
        }
        None => LineMetric::new(vec![Scalar::zero(); n], e.alternatives().iter().map(|id| (id.clone(), Scalar::zero())).collect()),
    };
    let fixed = distortion_fixed(e, &witness, s, objective).map_err(|err| match err {
        Error::ZeroOptimum => Error::Unbounded,
        other => other,
    })?;
    if let Some((value, _)) = &best {
        debug_assert!(fixed.ratio == *value || (value < &Scalar::one() && fixed.ratio == Scalar::one()));
    }
    Ok(AdversarialResult {
        ratio: fixed.ratio,
        witness,
        optimal: fixed.optimal,
        mode: AdversarialMode::Exact,
        evaluated: required,
    })
}

/// Feasible interval `[lo, hi]` for voter `i` given alternative positions.
fn voter_interval(e: &Election, i: usize, at: &[Scalar]) -> Option<(Option<Scalar>, Option<Scalar>)> {
    let (mut lo, mut hi): (Option<Scalar>, Option<Scalar>) = (None, None);
    for pair in e.ranking(i).as_slice().windows(2) {
        let (a, b) = (&at[pair[0]], &at[pair[1]]);
        let mid = Scalar::midpoint(a, b);
        if a < b {
            hi = Some(hi.map_or(mid.clone(), |h| h.min(mid)));
        } else if a > b {
            lo = Some(lo.map_or(mid.clone(), |l| l.max(mid)));
        }
    }
    match (&lo, &hi) {
        (Some(l), Some(h)) if l > h => None,
        _ => Some((lo, hi)),
    }
}

fn choose_in(rng: &mut ChaCha8Rng, lo: &Option<Scalar>, hi: &Option<Scalar>, choice: u32) -> Scalar {
    let spread = |rng: &mut ChaCha8Rng| Scalar::new(rng.gen_range(0..=16), 4);
    match (lo, hi, choice) {
        (Some(l), _, 0) => l.clone(),
        (_, Some(h), 1) => h.clone(),
        (Some(l), Some(h), _) => l + &((h - l) * Scalar::new(rng.gen_range(0..=8), 8)),
        (Some(l), None, _) => l + &spread(rng),
        (None, Some(h), _) => h - &spread(rng),
        (None, None, _) => spread(rng),
    }
}

fn sample_search(e: &Election, s: &Committee, objective: Objective, budget: u64, seed: u64) -> Result<AdversarialResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = order_alternatives(e)?;
    let (n, m) = (e.voter_count(), e.alternative_count());
    let ordered: Vec<usize> = order.ids().iter().map(|id| e.require_index(id)).collect::<Result<_>>()?;
    let evaluate = |at: &[Scalar], voters: Vec<Scalar>| -> Option<(Scalar, LineMetric, Committee)> {
        let d = LineMetric::new(voters, (0..m).map(|a| (e.id(a).to_string(), at[a].clone())).collect());
        let fixed = distortion_fixed(e, &d, s, objective).ok()?;
        Some((fixed.ratio, d, fixed.optimal))
    };

    let mut best: Option<(Scalar, LineMetric, Committee)> = None;
    for _ in 0..budget {
        let mut at = vec![Scalar::zero(); m];
        let mut x = Scalar::zero();
        for &a in &ordered {
            x += Scalar::new(rng.gen_range(0..=12), 2);
            at[a] = x.clone();
        }
        for a in (0..m).filter(|a| !ordered.contains(a)) {
            at[a] = if rng.gen_bool(0.5) {
                let anchor = ordered[rng.gen_range(0..ordered.len())];
                at[anchor].clone()
            } else {
                Scalar::new(rng.gen_range(-4..=2 * x.floor().to_i64().unwrap_or(0) + 4), 2)
            };
        }
        let Some(intervals) = (0..n).map(|i| voter_interval(e, i, &at)).collect::<Option<Vec<_>>>() else { continue };
        let voters: Vec<Scalar> =
            intervals.iter().map(|(lo, hi)| {
                let choice = rng.gen_range(0..3);
                choose_in(&mut rng, lo, hi, choice)
            }).collect();
        let Some(mut current) = evaluate(&at, voters) else { continue };
        // One pass of coordinate ascent over interval endpoints.
        for (i, (lo, hi)) in intervals.iter().enumerate() {
            for end in [lo, hi].into_iter().flatten() {
                let mut voters = current.1.voters().to_vec();
                voters[i] = end.clone();
                if let Some(candidate) = evaluate(&at, voters) {
                    if candidate.0 > current.0 {
                        current = candidate;
                    }
                }
            }
        }
        if best.as_ref().is_none_or(|b| current.0 > b.0) {
            best = Some(current);
        }
    }
    let (ratio, witness, optimal) =
        best.ok_or_else(|| Error::PreconditionViolated("no weakly consistent placement found within budget".into()))?;
    debug_assert!(check_consistency(e, &witness, ConsistencyMode::Weak).unwrap_or(false));
    Ok(AdversarialResult { ratio, witness, optimal, mode: AdversarialMode::Sample { seed }, evaluated: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive_profile;

    fn ids(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn committee(list: &[&str]) -> Committee {
        Committee::new(list.iter().copied()).unwrap()
    }

    fn three_alt() -> (Election, LineMetric) {
        let mut voters = vec![Scalar::new(1, 10); 3];
        voters.extend(vec![Scalar::new(-9, 10); 2]);
        let d = LineMetric::from_pairs(
            voters,
            [("a", Scalar::zero()), ("b", Scalar::one()), ("c", Scalar::from_int(-1))],
        );
        (derive_profile(&d, 5, &ids(&["a", "b", "c"]), 2).unwrap(), d)
    }

    #[test]
    fn fixed_examples() {
        let (e, d) = three_alt();
        let fd = distortion_fixed(&e, &d, &committee(&["a", "b"]), Objective::UtilitarianAdditive).unwrap();
        assert_eq!(fd.ratio, Scalar::new(43, 28));
        let fd = distortion_fixed(&e, &d, &committee(&["a", "c"]), Objective::UtilitarianAdditive).unwrap();
        assert_eq!(fd.ratio, Scalar::one());

        let d = LineMetric::from_pairs(
            vec![Scalar::zero(), Scalar::one()],
            [("a", Scalar::from_int(-1)), ("b", Scalar::zero()), ("c", Scalar::one())],
        );
        let e = Election::new(ids(&["a", "b", "c"]), 2, vec![ids(&["b", "a", "c"]), ids(&["c", "b", "a"])]).unwrap();
        let fd = distortion_fixed(&e, &d, &committee(&["a", "c"]), Objective::EgalitarianAdditive).unwrap();
        assert_eq!(fd.ratio, Scalar::from_int(2));
    }

    #[test]
    fn zero_optimum() {
        let d = LineMetric::from_pairs(vec![Scalar::zero()], [("a", Scalar::zero()), ("b", Scalar::one())]);
        let e = Election::new(ids(&["a", "b"]), 1, vec![ids(&["a", "b"])]).unwrap();
        assert_eq!(distortion_fixed(&e, &d, &committee(&["b"]), Objective::UtilitarianAdditive).unwrap_err(), Error::ZeroOptimum);
        assert_eq!(distortion_fixed(&e, &d, &committee(&["a"]), Objective::UtilitarianAdditive).unwrap().ratio, Scalar::one());
    }

    #[test]
    fn ratio_bounds() {
        let mut rankings = vec![ids(&["a", "b"]); 6];
        rankings.extend(vec![ids(&["b", "a"]); 4]);
        let e = Election::new(ids(&["a", "b"]), 1, rankings).unwrap();
        assert_eq!(ratio_bound(&e, "a", "b").unwrap(), Scalar::new(7, 3));
        assert_eq!(ratio_bound(&e, "b", "a").unwrap(), Scalar::from_int(4));
        let e = Election::new(ids(&["a", "b"]), 1, vec![ids(&["a", "b"]); 4]).unwrap();
        assert_eq!(ratio_bound(&e, "a", "b").unwrap(), Scalar::one());
        assert_eq!(ratio_bound(&e, "b", "a").unwrap_err(), Error::DivisionByZero);
        let e = Election::new(ids(&["a", "b"]), 1, vec![ids(&["a", "b"]), ids(&["b", "a"])]).unwrap();
        assert_eq!(ratio_bound(&e, "a", "b").unwrap(), Scalar::from_int(3));
    }

    fn line(alts: &[(&str, i64)]) -> LineMetric {
        LineMetric::from_pairs(vec![Scalar::zero()], alts.iter().map(|(id, x)| (id.to_string(), Scalar::from_int(*x))))
    }

    #[test]
    fn focal_disjoint_pair() {
        // S2 = {a1, a2} on the left, S1 = {b2, b1} on the right; τ just above 1 + √2.
        let d = line(&[("a1", 0), ("a2", 1), ("b2", 3), ("b1", 4)]);
        let q = FocalQuery::new(committee(&["b1", "b2"]), committee(&["a1", "a2"]), Scalar::new(169 + 239, 169));
        let idx = q.indices();
        assert_eq!(idx.r, -1);
        assert_eq!(idx.j_star, BigInt::from(1));
        assert_eq!(focal_point(&q, &d).unwrap(), Scalar::from_int(4));
        assert_eq!(crossing_point(&q, &d).unwrap(), Scalar::from_int(4));
    }

    #[test]
    fn focal_even_with_half_overlap() {
        let d = line(&[("a1", 0), ("c1", 2), ("b1", 5)]);
        let q = FocalQuery::new(committee(&["c1", "b1"]), committee(&["a1", "c1"]), Scalar::new(12, 5));
        let idx = q.indices();
        assert_eq!((idx.r, idx.tau_hat.clone()), (0, None));
        assert_eq!(focal_point(&q, &d).unwrap(), Scalar::from_int(5));
    }

    #[test]
    fn focal_odd_branch_and_its_fix() {
        let d = line(&[("a1", 0), ("c1", 1), ("c2", 2), ("b1", 3)]);
        let q = FocalQuery::new(committee(&["c1", "c2", "b1"]), committee(&["a1", "c1", "c2"]), Scalar::new(7, 3));
        let idx = q.indices();
        assert_eq!(idx.r, 1);
        assert_eq!(idx.tau_hat, Some(Scalar::one()));
        assert_eq!(idx.i_star, Some(BigInt::from(-1)));
        assert_eq!(focal_point(&q, &d).unwrap(), Scalar::one());
        // Between c1 and c2 a voter lowers the ratio by stepping toward c1.
        assert_eq!(crossing_point(&q, &d).unwrap(), Scalar::from_int(3));
    }

    #[test]
    fn focal_mirrors_when_s2_is_on_the_right() {
        let d = line(&[("a1", 0), ("a2", 1), ("b2", 3), ("b1", 4)]);
        let q = FocalQuery::new(committee(&["a1", "a2"]), committee(&["b1", "b2"]), Scalar::new(12, 5));
        assert_eq!(focal_point(&q, &d).unwrap(), Scalar::zero());
    }

    #[test]
    fn non_consecutive_committees() {
        let d = line(&[("a", 0), ("b", 1), ("c", 2), ("x", 3)]);
        let q = FocalQuery::new(committee(&["a", "c"]), committee(&["b", "x"]), Scalar::new(3, 2));
        assert!(matches!(focal_point(&q, &d), Err(Error::PreconditionViolated(_))));
    }

    fn k2_d1(n1: usize, n2: usize) -> (Election, LineMetric) {
        let mut rankings = vec![ids(&["a'", "b'", "a", "b"]); n1];
        rankings.extend(vec![ids(&["a", "b", "a'", "b'"]); n2]);
        let e = Election::new(ids(&["a", "b", "a'", "b'"]), 2, rankings).unwrap();
        let mut voters = vec![Scalar::from_int(-1); n1];
        voters.extend(vec![Scalar::zero(); n2]);
        let d = LineMetric::from_pairs(
            voters,
            [("a", Scalar::one()), ("b", Scalar::one()), ("a'", Scalar::from_int(-1)), ("b'", Scalar::from_int(-1))],
        );
        (e, d)
    }

    #[test]
    fn move_voters_examples() {
        let (e, d) = k2_d1(5, 7);
        let (s1, s2) = (committee(&["a'", "b'"]), committee(&["a", "b"]));
        let tau = Scalar::new(12, 5);
        let moved = move_voters(&e, &d, &s1, &s2, &tau, &MoveConstraints::default()).unwrap();
        assert!(ratio_exceeds(&moved, &s1, &s2, &tau).unwrap());

        // Voters already at the crossing point stay put.
        let target = crossing_point(&FocalQuery::new(s1.clone(), s2.clone(), tau.clone()), &d).unwrap();
        let still = LineMetric::new(vec![target; 12], d.alternatives().clone());
        assert_eq!(move_voters(&e, &still, &s1, &s2, &tau, &MoveConstraints::default()).unwrap(), still);

        let demanding = MoveConstraints::new(vec![Scalar::from_int(-2)], vec![1]);
        assert!(matches!(move_voters(&e, &d, &s1, &s2, &tau, &demanding), Err(Error::PreconditionViolated(_))));
        let low_tau = Scalar::from_int(5);
        assert!(matches!(
            move_voters(&e, &d, &s1, &s2, &low_tau, &MoveConstraints::default()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn exact_two_voter_line() {
        let e = Election::new(ids(&["a", "b"]), 1, vec![ids(&["a", "b"]), ids(&["b", "a"])]).unwrap();
        let r = adversarial_distortion(&e, &committee(&["a"]), Objective::UtilitarianAdditive, AdversarialMode::Exact, 1000).unwrap();
        assert_eq!(r.ratio, Scalar::from_int(3));
        assert!(check_consistency(&e, &r.witness, ConsistencyMode::Weak).unwrap());
        let fixed = distortion_fixed(&e, &r.witness, &committee(&["a"]), Objective::UtilitarianAdditive).unwrap();
        assert_eq!(fixed.ratio, r.ratio);
    }

    #[test]
    fn exact_trivial_cases() {
        let e = Election::new(ids(&["a", "b"]), 1, vec![ids(&["a", "b"])]).unwrap();
        let r = adversarial_distortion(&e, &committee(&["a"]), Objective::UtilitarianAdditive, AdversarialMode::Exact, 1000);
        // b is dominated here, which exact mode rejects; the sampler still works.
        assert!(matches!(r, Err(Error::PreconditionViolated(_))));
        let r = adversarial_distortion(&e, &committee(&["a"]), Objective::UtilitarianAdditive, AdversarialMode::Sample { seed: 1 }, 50)
            .unwrap();
        assert_eq!(r.ratio, Scalar::one());

        let e = Election::new(ids(&["a", "b"]), 2, vec![ids(&["a", "b"]), ids(&["b", "a"])]).unwrap();
        let r = adversarial_distortion(&e, &committee(&["a", "b"]), Objective::UtilitarianAdditive, AdversarialMode::Exact, 1000)
            .unwrap();
        assert_eq!(r.ratio, Scalar::one());
    }

    #[test]
    fn exact_respects_budget_and_caps() {
        let e = Election::new(ids(&["a", "b"]), 1, vec![ids(&["a", "b"]), ids(&["b", "a"])]).unwrap();
        let s = committee(&["a"]);
        assert_eq!(
            adversarial_distortion(&e, &s, Objective::UtilitarianAdditive, AdversarialMode::Exact, 2).unwrap_err(),
            Error::BudgetExceeded { limit: 2, required: 4 }
        );
        let caps = ExactCaps { max_voters: 1, max_alternatives: 6 };
        assert!(adversarial_distortion_capped(&e, &s, Objective::UtilitarianAdditive, AdversarialMode::Exact, 100, caps).is_err());
    }

    #[test]
    fn sample_is_below_exact() {
        let e = Election::new(ids(&["a", "b"]), 1, vec![ids(&["a", "b"]), ids(&["b", "a"])]).unwrap();
        let s = committee(&["a"]);
        let sample = adversarial_distortion(&e, &s, Objective::UtilitarianAdditive, AdversarialMode::Sample { seed: 7 }, 200).unwrap();
        assert!(sample.ratio <= Scalar::from_int(3));
        assert!(sample.ratio > Scalar::one());
        assert!(check_consistency(&e, &sample.witness, ConsistencyMode::Weak).unwrap());
    }
}

//! Line structure recovered from rankings alone.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AltIndex, Election};

/// Pairwise counts `|V_{a≻b}|` for every ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginTable {
    n: usize,
    m: usize,
    wins: Vec<u32>,
}

impl MarginTable {
    pub fn new(e: &Election) -> Self {
        let (n, m) = (e.voter_count(), e.alternative_count());
        let mut wins = vec![0u32; m * m];
        for ranking in e.profile() {
            let order = ranking.as_slice();
            for (i, &a) in order.iter().enumerate() {
                for &b in &order[i + 1..] {
                    wins[a * m + b] += 1;
                }
            }
        }
        MarginTable { n, m, wins }
    }

    pub fn voter_count(&self) -> usize {
        self.n
    }

    /// `|V_{a≻b}|`.
    pub fn wins(&self, a: AltIndex, b: AltIndex) -> usize {
        self.wins[a * self.m + b] as usize
    }

    pub fn dominates(&self, a: AltIndex, b: AltIndex) -> bool {
        a != b && self.wins(a, b) == self.n
    }

    /// Members of `pool` not Pareto-dominated by another member of `pool`.
    pub fn undominated(&self, pool: &[AltIndex]) -> Vec<AltIndex> {
        pool.iter().copied().filter(|&b| !pool.iter().any(|&a| self.dominates(a, b))).collect()
    }
}

/// `|V_{a≻b}|` by id.
pub fn pairwise_margin(e: &Election, a: &str, b: &str) -> Result<usize> {
    let (a, b) = (e.require_index(a)?, e.require_index(b)?);
    Ok((0..e.voter_count()).filter(|&v| e.prefers(v, a, b)).count())
}

/// Every alternative of `e` unanimously beaten by some other member of `within`.
pub fn pareto_dominated(e: &Election, within: &BTreeSet<String>) -> Result<BTreeSet<String>> {
    let pool: Vec<AltIndex> = within.iter().map(|id| e.require_index(id)).collect::<Result<_>>()?;
    let margins = MarginTable::new(e);
    Ok((0..e.alternative_count())
        .filter(|&b| pool.iter().any(|&a| margins.dominates(a, b)))
        .map(|b| e.id(b).to_string())
        .collect())
}

/// Left-to-right order of the non-dominated alternatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlternativeOrder {
    ids: Vec<String>,
    /// Whether canonicalization reversed the order as first discovered.
    flipped: bool,
}

impl AlternativeOrder {
    /// Wraps an explicit left-to-right sequence without canonicalizing it.
    pub fn from_ids<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AlternativeOrder { ids: ids.into_iter().map(Into::into).collect(), flipped: false }
    }

    fn canonical(mut ids: Vec<String>) -> Self {
        let flipped = ids.len() > 1 && ids[ids.len() - 1] < ids[0];
        if flipped {
            ids.reverse();
        }
        AlternativeOrder { ids, flipped }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn flipped(&self) -> bool {
        self.flipped
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn reversed(&self) -> AlternativeOrder {
        let mut ids = self.ids.clone();
        ids.reverse();
        AlternativeOrder { ids, flipped: !self.flipped }
    }

    /// Whether `other` is this order or its reversal.
    pub fn same_up_to_reversal(&self, other: &[String]) -> bool {
        self.ids == other || self.ids.iter().rev().eq(other.iter())
    }
}

/// Positional order of `subset`, which must hold no internal domination.
/// Orientation is arbitrary.
pub(crate) fn order_subset(e: &Election, subset: &[AltIndex]) -> Result<Vec<AltIndex>> {
    if subset.len() <= 1 {
        return Ok(subset.to_vec());
    }
    let (a, b) = (subset[0], subset[1]);
    let n = e.voter_count();
    let a_over_b: Vec<usize> = (0..n).filter(|&v| e.prefers(v, a, b)).collect();
    let (right, left): (Vec<AltIndex>, Vec<AltIndex>) = subset
        .iter()
        .copied()
        .partition(|&c| c != a && a_over_b.iter().all(|&v| e.prefers(v, a, c)));

    let top_within = |v: usize| subset.iter().copied().min_by_key(|&x| e.rank(v, x)).expect("non-empty subset");
    let topping = |side: &[AltIndex]| (0..n).find(|&v| side.contains(&top_within(v)));

    let left_voter = topping(&left)
        .ok_or_else(|| Error::NotLineRealizable(format!("no voter tops a member of {{{}}}", names(e, &left))))?;
    let right_voter = topping(&right)
        .ok_or_else(|| Error::NotLineRealizable(format!("no voter tops a member of {{{}}}", names(e, &right))))?;

    let mut left_sorted = left;
    left_sorted.sort_by_key(|&x| std::cmp::Reverse(e.rank(right_voter, x)));
    let mut right_sorted = right;
    right_sorted.sort_by_key(|&x| e.rank(left_voter, x));
    left_sorted.extend(right_sorted);

    let position = position_table(e.alternative_count(), &left_sorted);
    for v in 0..n {
        if !single_peaked(e.ranking(v).iter().filter_map(|x| position[x])) {
            return Err(Error::NotLineRealizable(format!("voter {v} is not single-peaked on the recovered order")));
        }
    }
    Ok(left_sorted)
}

fn names(e: &Election, alts: &[AltIndex]) -> String {
    alts.iter().map(|&a| e.id(a)).collect::<Vec<_>>().join(", ")
}

fn position_table(m: usize, order: &[AltIndex]) -> Vec<Option<usize>> {
    let mut position = vec![None; m];
    for (p, &a) in order.iter().enumerate() {
        position[a] = Some(p);
    }
    position
}

/// Each successive position extends the interval covered so far.
fn single_peaked(mut positions: impl Iterator<Item = usize>) -> bool {
    let Some(first) = positions.next() else { return true };
    let (mut lo, mut hi) = (first, first);
    for p in positions {
        if lo > 0 && p == lo - 1 {
            lo = p;
        } else if p == hi + 1 {
            hi = p;
        } else {
            return false;
        }
    }
    true
}

/// Recovers the order of the non-dominated alternatives, canonically oriented.
pub fn order_alternatives(e: &Election) -> Result<AlternativeOrder> {
    let margins = MarginTable::new(e);
    let all: Vec<AltIndex> = (0..e.alternative_count()).collect();
    let pool = margins.undominated(&all);
    let order = order_subset(e, &pool)?;
    Ok(AlternativeOrder::canonical(order.into_iter().map(|a| e.id(a).to_string()).collect()))
}

/// Hamiltonian path of the tie-broken majority tournament.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityOrder {
    ids: Vec<String>,
    sequence: Vec<AltIndex>,
    margins: MarginTable,
}

impl MajorityOrder {
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn head(&self) -> &str {
        &self.ids[0]
    }

    pub(crate) fn indices(&self) -> &[AltIndex] {
        &self.sequence
    }

    pub fn margins(&self) -> &MarginTable {
        &self.margins
    }

    pub fn rank(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

/// Orders all alternatives along a Hamiltonian path of the majority tournament.
///
/// Strict majorities decide first. A tie between two alternatives of `order`
/// goes to the one further left. Remaining ties follow a reference voter whose
/// ranking agrees with all decisions so far, else alternative id.
pub fn majority_order(e: &Election, order: &AlternativeOrder) -> MajorityOrder {
    let margins = MarginTable::new(e);
    let n = e.voter_count();
    let m = e.alternative_count();
    let slot: Vec<Option<usize>> = (0..m).map(|a| order.position(e.id(a))).collect();

    let strict = |x: AltIndex, y: AltIndex| 2 * margins.wins(x, y) > n;
    let positional = |x: AltIndex, y: AltIndex| match (slot[x], slot[y]) {
        (Some(px), Some(py)) if 2 * margins.wins(x, y) == n => Some(px < py),
        _ => None,
    };
    let agrees = |v: usize, with_positional: bool| {
        (0..m).all(|x| {
            (0..m).all(|y| {
                if x == y || !e.prefers(v, y, x) {
                    return true;
                }
                // v ranks y above x: that must not contradict a decided pair.
                !strict(x, y) && !(with_positional && positional(x, y) == Some(true))
            })
        })
    };
    let reference = (0..n).find(|&v| agrees(v, true)).or_else(|| (0..n).find(|&v| agrees(v, false)));

    let beats = |x: AltIndex, y: AltIndex| {
        let w = 2 * margins.wins(x, y);
        if w != n {
            return w > n;
        }
        if let Some(left) = positional(x, y) {
            return left;
        }
        match reference {
            Some(v) => e.prefers(v, x, y),
            None => e.id(x) < e.id(y),
        }
    };

    let mut path: Vec<AltIndex> = Vec::with_capacity(m);
    for x in 0..m {
        let at = path.iter().position(|&y| beats(x, y)).unwrap_or(path.len());
        path.insert(at, x);
    }
    MajorityOrder { ids: path.iter().map(|&a| e.id(a).to_string()).collect(), sequence: path, margins }
}

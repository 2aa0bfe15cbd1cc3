//! Elections, line metrics and committees.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index of an alternative inside its [`Election`].
pub type AltIndex = usize;

/// A strict ranking, most preferred first, as indices into the election's
/// alternatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ranking(Vec<AltIndex>);

impl Ranking {
    pub fn as_slice(&self) -> &[AltIndex] {
        &self.0
    }

    pub fn top(&self) -> AltIndex {
        self.0[0]
    }

    pub fn iter(&self) -> impl Iterator<Item = AltIndex> + '_ {
        self.0.iter().copied()
    }
}

/// Committee election `(V, A, k, σ)`. Voters are positional indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    alternatives: Vec<String>,
    index: HashMap<String, AltIndex>,
    committee_size: usize,
    profile: Vec<Ranking>,
    // rank_of[voter][alt]: 0 for the top choice.
    rank_of: Vec<Vec<u32>>,
}

/// Checks the raw parts of an election.
pub fn validate_election(alternatives: &[String], committee_size: usize, rankings: &[Vec<String>]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in alternatives {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateAlternativeId(id.clone()));
        }
    }
    let m = alternatives.len();
    if rankings.is_empty() {
        return Err(Error::EmptyElectorate);
    }
    for (voter, ranking) in rankings.iter().enumerate() {
        let mut ranked = BTreeSet::new();
        for id in ranking {
            if !seen.contains(id.as_str()) {
                return Err(Error::UnknownAlternative(id.clone()));
            }
            if !ranked.insert(id.as_str()) {
                return Err(Error::DuplicateAlternativeInRanking { voter, id: id.clone() });
            }
        }
        if ranking.len() != m {
            return Err(Error::RankingSizeMismatch { voter, expected: m, found: ranking.len() });
        }
    }
    if committee_size < 1 || committee_size > m {
        return Err(Error::CommitteeSizeOutOfRange { k: committee_size, m });
    }
    Ok(())
}

impl Election {
    pub fn new(alternatives: Vec<String>, committee_size: usize, rankings: Vec<Vec<String>>) -> Result<Self> {
        validate_election(&alternatives, committee_size, &rankings)?;
        let index: HashMap<String, AltIndex> =
            alternatives.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let profile = rankings
            .iter()
            .map(|r| Ranking(r.iter().map(|id| index[id]).collect()))
            .collect();
        Ok(Self::assemble(alternatives, index, committee_size, profile))
    }

    /// Builds an election from rankings given as alternative indices.
    pub fn from_indices(alternatives: Vec<String>, committee_size: usize, rankings: Vec<Vec<AltIndex>>) -> Result<Self> {
        let m = alternatives.len();
        let named: Vec<Vec<String>> = rankings
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&i| alternatives.get(i).cloned().ok_or_else(|| Error::UnknownAlternative(format!("#{i}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let _ = m;
        Self::new(alternatives, committee_size, named)
    }

    fn assemble(
        alternatives: Vec<String>,
        index: HashMap<String, AltIndex>,
        committee_size: usize,
        profile: Vec<Ranking>,
    ) -> Self {
        let m = alternatives.len();
        let rank_of = profile
            .iter()
            .map(|r: &Ranking| {
                let mut ranks = vec![0u32; m];
                for (pos, &alt) in r.0.iter().enumerate() {
                    ranks[alt] = pos as u32;
                }
                ranks
            })
            .collect();
        Election { alternatives, index, committee_size, profile, rank_of }
    }

    pub fn voter_count(&self) -> usize {
        self.profile.len()
    }

    pub fn alternative_count(&self) -> usize {
        self.alternatives.len()
    }

    pub fn committee_size(&self) -> usize {
        self.committee_size
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn id(&self, alt: AltIndex) -> &str {
        &self.alternatives[alt]
    }

    pub fn index_of(&self, id: &str) -> Option<AltIndex> {
        self.index.get(id).copied()
    }

    pub fn require_index(&self, id: &str) -> Result<AltIndex> {
        self.index_of(id).ok_or_else(|| Error::UnknownAlternative(id.to_string()))
    }

    pub fn profile(&self) -> &[Ranking] {
        &self.profile
    }

    pub fn ranking(&self, voter: usize) -> &Ranking {
        &self.profile[voter]
    }

    pub fn ranking_ids(&self, voter: usize) -> Vec<&str> {
        self.profile[voter].iter().map(|a| self.id(a)).collect()
    }

    /// Position of `alt` in the voter's ranking (0 = top).
    pub fn rank(&self, voter: usize, alt: AltIndex) -> usize {
        self.rank_of[voter][alt] as usize
    }

    /// Whether voter `voter` strictly prefers `a` to `b`.
    pub fn prefers(&self, voter: usize, a: AltIndex, b: AltIndex) -> bool {
        self.rank_of[voter][a] < self.rank_of[voter][b]
    }

    /// The same profile with a different committee size.
    pub fn with_committee_size(&self, k: usize) -> Result<Election> {
        if k < 1 || k > self.alternative_count() {
            return Err(Error::CommitteeSizeOutOfRange { k, m: self.alternative_count() });
        }
        let mut copy = self.clone();
        copy.committee_size = k;
        Ok(copy)
    }

    /// Restricts every ranking to `keep` (in the election's alternative order)
    /// and sets the committee size to `k`.
    pub fn restrict(&self, keep: &BTreeSet<AltIndex>, k: usize) -> Result<Election> {
        let alternatives: Vec<String> = keep.iter().map(|&a| self.alternatives[a].clone()).collect();
        let rankings: Vec<Vec<String>> = self
            .profile
            .iter()
            .map(|r| r.iter().filter(|a| keep.contains(a)).map(|a| self.alternatives[a].clone()).collect())
            .collect();
        Election::new(alternatives, k, rankings)
    }

    /// Removes the given alternatives and asks for a committee of size `k`.
    pub fn without(&self, removed: &BTreeSet<String>, k: usize) -> Result<Election> {
        let keep: BTreeSet<AltIndex> =
            (0..self.alternative_count()).filter(|&a| !removed.contains(&self.alternatives[a])).collect();
        if keep.len() < k {
            return Err(Error::InsufficientAlternatives { needed: k, available: keep.len() });
        }
        self.restrict(&keep, k)
    }

    /// Checks that `committee` has exactly `k` members drawn from `A`.
    pub fn check_committee(&self, committee: &Committee) -> Result<()> {
        for id in committee.ids() {
            self.require_index(id)?;
        }
        if committee.len() != self.committee_size {
            return Err(Error::CommitteeSizeMismatch { expected: self.committee_size, found: committee.len() });
        }
        Ok(())
    }
}

/// A set of alternative ids, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Committee(Vec<String>);

impl Committee {
    pub fn new<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut members: Vec<String> = ids.into_iter().map(Into::into).collect();
        members.sort();
        for pair in members.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidCommittee(format!("`{}` appears twice", pair[0])));
            }
        }
        Ok(Committee(members))
    }

    pub fn from_indices(e: &Election, members: &[AltIndex]) -> Result<Self> {
        Committee::new(members.iter().map(|&a| e.id(a).to_string()))
    }

    pub fn ids(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.binary_search_by(|m| m.as_str().cmp(id)).is_ok()
    }

    pub fn union(&self, other: &Committee) -> Result<Committee> {
        Committee::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn is_disjoint(&self, other: &Committee) -> bool {
        self.0.iter().all(|id| !other.contains(id))
    }

    pub fn intersection(&self, other: &Committee) -> Vec<String> {
        self.0.iter().filter(|id| other.contains(id)).cloned().collect()
    }

    pub fn difference(&self, other: &Committee) -> Vec<String> {
        self.0.iter().filter(|id| !other.contains(id)).cloned().collect()
    }

    pub fn to_set(&self) -> BTreeSet<String> {
        self.0.iter().cloned().collect()
    }
}

impl fmt::Display for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}

/// Positions of voters and alternatives on the real line.
///
/// Alternatives may share a position (the lower-bound constructions stack
/// several alternatives on one point); see [`LineMetric::has_distinct_alternatives`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineMetric {
    voters: Vec<Scalar>,
    alternatives: BTreeMap<String, Scalar>,
}

impl LineMetric {
    pub fn new(voters: Vec<Scalar>, alternatives: BTreeMap<String, Scalar>) -> Self {
        LineMetric { voters, alternatives }
    }

    pub fn from_pairs<I, S>(voters: Vec<Scalar>, alternatives: I) -> Self
    where
        I: IntoIterator<Item = (S, Scalar)>,
        S: Into<String>,
    {
        LineMetric { voters, alternatives: alternatives.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }

    pub fn voter_count(&self) -> usize {
        self.voters.len()
    }

    pub fn voters(&self) -> &[Scalar] {
        &self.voters
    }

    pub fn alternatives(&self) -> &BTreeMap<String, Scalar> {
        &self.alternatives
    }

    pub fn voter(&self, i: usize) -> Result<&Scalar> {
        self.voters.get(i).ok_or_else(|| Error::MissingPosition(format!("voter {i}")))
    }

    pub fn alternative(&self, id: &str) -> Result<&Scalar> {
        self.alternatives.get(id).ok_or_else(|| Error::MissingPosition(format!("alternative `{id}`")))
    }

    pub fn distance(&self, voter: usize, alt: &str) -> Result<Scalar> {
        Ok((self.voter(voter)? - self.alternative(alt)?).abs())
    }

    pub fn set_voter(&mut self, i: usize, position: Scalar) {
        self.voters[i] = position;
    }

    /// Errors unless the metric places exactly the voters `0..n` and every alternative of `e`.
    pub fn covers(&self, e: &Election) -> Result<()> {
        if self.voters.len() < e.voter_count() {
            return Err(Error::MissingPosition(format!("voter {}", self.voters.len())));
        }
        if self.voters.len() > e.voter_count() {
            return Err(Error::PreconditionViolated(format!(
                "metric places {} voters, election has {}",
                self.voters.len(),
                e.voter_count()
            )));
        }
        for id in e.alternatives() {
            self.alternative(id)?;
        }
        Ok(())
    }

    pub fn has_distinct_alternatives(&self) -> bool {
        let positions: BTreeSet<&Scalar> = self.alternatives.values().collect();
        positions.len() == self.alternatives.len()
    }

    /// Mirror image `x ↦ -x`.
    pub fn negated(&self) -> LineMetric {
        LineMetric {
            voters: self.voters.iter().map(|x| -x).collect(),
            alternatives: self.alternatives.iter().map(|(k, x)| (k.clone(), -x)).collect(),
        }
    }

    pub fn shifted(&self, delta: &Scalar) -> LineMetric {
        LineMetric {
            voters: self.voters.iter().map(|x| x + delta).collect(),
            alternatives: self.alternatives.iter().map(|(k, x)| (k.clone(), x + delta)).collect(),
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> LineMetric {
        LineMetric {
            voters: self.voters.iter().map(|x| x * factor).collect(),
            alternatives: self.alternatives.iter().map(|(k, x)| (k.clone(), x * factor)).collect(),
        }
    }

    /// Alternative ids sorted by position, ties by id.
    pub fn positional_order(&self) -> Vec<String> {
        let mut ids: Vec<(&Scalar, &String)> = self.alternatives.iter().map(|(k, v)| (v, k)).collect();
        ids.sort();
        ids.into_iter().map(|(_, k)| k.clone()).collect()
    }

    /// Voter indices sorted by position, ties by index.
    pub fn voters_by_position(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.voters.len()).collect();
        order.sort_by(|&a, &b| self.voters[a].cmp(&self.voters[b]).then(a.cmp(&b)));
        order
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConsistencyMode {
    /// `a ≻ b` requires `d(i,a) < d(i,b)`.
    Strict,
    /// `a ≻ b` requires `d(i,a) <= d(i,b)`.
    Weak,
}

/// Whether every ranked pair of every voter is reproduced by the distances.
pub fn check_consistency(e: &Election, d: &LineMetric, mode: ConsistencyMode) -> Result<bool> {
    d.covers(e)?;
    let positions: Vec<&Scalar> = e.alternatives().iter().map(|id| d.alternative(id)).collect::<Result<_>>()?;
    for voter in 0..e.voter_count() {
        let x = d.voter(voter)?;
        let ranking = e.ranking(voter).as_slice();
        // Checking consecutive ranked pairs suffices: both relations are transitive.
        let dists: Vec<Scalar> = ranking.iter().map(|&a| (x - positions[a]).abs()).collect();
        for pair in dists.windows(2) {
            let ok = match mode {
                ConsistencyMode::Strict => pair[0] < pair[1],
                ConsistencyMode::Weak => pair[0] <= pair[1],
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Builds the strict profile induced by `d` for its first `n` voters.
pub fn derive_profile(d: &LineMetric, n: usize, alternatives: &[String], k: usize) -> Result<Election> {
    if n == 0 {
        return Err(Error::EmptyElectorate);
    }
    let positions: Vec<&Scalar> = alternatives.iter().map(|id| d.alternative(id)).collect::<Result<_>>()?;
    let mut rankings = Vec::with_capacity(n);
    for voter in 0..n {
        let x = d.voter(voter)?;
        let mut keyed: Vec<(Scalar, usize)> =
            positions.iter().enumerate().map(|(i, p)| ((x - *p).abs(), i)).collect();
        keyed.sort();
        for pair in keyed.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::MidpointTie {
                    voter,
                    a: alternatives[pair[0].1].clone(),
                    b: alternatives[pair[1].1].clone(),
                });
            }
        }
        rankings.push(keyed.into_iter().map(|(_, i)| alternatives[i].clone()).collect());
    }
    Election::new(alternatives.to_vec(), k, rankings)
}

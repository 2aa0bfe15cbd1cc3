//! Lower-bound instance families and seeded random line instances.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{derive_profile, Election, LineMetric};
use crate::scalar::{sqrt_convergents, Scalar};

/// One profile with two metrics that are both weakly consistent with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoMetricInstance {
    pub election: Election,
    pub d1: LineMetric,
    pub d2: LineMetric,
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn group_positions(n1: usize, x1: i64, n2: usize, x2: i64) -> Vec<Scalar> {
    let mut v = vec![Scalar::from_int(x1); n1];
    v.extend(vec![Scalar::from_int(x2); n2]);
    v
}

/// Convergent `(p, q)` of `√(num/den)` at the given depth.
fn convergent(num: u64, den: u64, depth: usize) -> (usize, usize) {
    let (p, q) = sqrt_convergents(num, den, depth).pop().expect("depth + 1 convergents");
    let small = |x: BigInt| x.to_usize().expect("convergent fits in usize");
    (small(p), small(q))
}

/// Counts `(n1, n2)` with `n2/n1` a convergent of `√2`.
pub fn k2_counts(depth: usize) -> (usize, usize) {
    let (p, q) = convergent(2, 1, depth);
    (q, p)
}

/// Group `X` (`n1` voters) ranks `a' ≻ b' ≻ a ≻ b`, group `Y` (`n2` voters)
/// ranks `a ≻ b ≻ a' ≻ b'`.
///
/// `a, b` sit at `+1` and `a', b'` at `−1`; `d1` puts `X` at `−1` and `Y` at
/// `0`, `d2` puts `X` at `0` and `Y` at `+1`.
pub fn gen_lb_k2(n1: usize, n2: usize) -> Result<TwoMetricInstance> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::ParameterOutOfRange("both groups need at least one voter".into()));
    }
    let mut rankings = vec![ids(&["a'", "b'", "a", "b"]); n1];
    rankings.extend(vec![ids(&["a", "b", "a'", "b'"]); n2]);
    let election = Election::new(ids(&["a", "b", "a'", "b'"]), 2, rankings)?;
    let alts = [("a", 1), ("b", 1), ("a'", -1), ("b'", -1)].map(|(id, x)| (id, Scalar::from_int(x)));
    Ok(TwoMetricInstance {
        election,
        d1: LineMetric::from_pairs(group_positions(n1, -1, n2, 0), alts.clone()),
        d2: LineMetric::from_pairs(group_positions(n1, 0, n2, 1), alts),
    })
}

/// Two co-located blocks: `S_a` (the first `⌊m/2⌋` ids) at `−1`, `S_b` at `+1`.
/// `n1` voters prefer the `S_a` block, `n2` the `S_b` block.
fn two_blocks(k: usize, m: usize, n1: usize, n2: usize) -> Result<TwoMetricInstance> {
    let width = (m - 1).to_string().len();
    let names: Vec<String> = (0..m).map(|i| format!("x{i:0width$}")).collect();
    let half = m / 2;
    let (sa, sb) = names.split_at(half);
    let left_first: Vec<String> = sa.iter().chain(sb).cloned().collect();
    let right_first: Vec<String> = sb.iter().chain(sa).cloned().collect();
    let mut rankings = vec![left_first; n1];
    rankings.extend(vec![right_first; n2]);
    let election = Election::new(names.clone(), k, rankings)?;
    let alts: Vec<(String, Scalar)> =
        names.iter().enumerate().map(|(i, id)| (id.clone(), Scalar::from_int(if i < half { -1 } else { 1 }))).collect();
    Ok(TwoMetricInstance {
        election,
        d1: LineMetric::from_pairs(group_positions(n1, -1, n2, 0), alts.clone()),
        d2: LineMetric::from_pairs(group_positions(n1, 0, n2, 1), alts),
    })
}

/// Group sizes for the small-`k` family: equal for odd `k`, and
/// `n1/n2 ≈ √((k+2)/k)` for even `k`.
pub fn small_k_counts(k: usize, n: usize) -> Result<(usize, usize)> {
    if k % 2 == 1 {
        if n < 2 || n % 2 == 1 {
            return Err(Error::ParameterOutOfRange(format!("odd k needs an even electorate, got {n}")));
        }
        return Ok((n / 2, n / 2));
    }
    // n1 = n·β/(1+β) with β = √((k+2)/k), i.e. n1 = n(k+2)/2 − √(n²k(k+2))/2 after
    // rationalizing; rounded down and kept inside [1, n−1].
    let nb = BigInt::from(n);
    let kb = BigInt::from(k);
    let root = (&nb * &nb * &kb * (&kb + 2u32)).sqrt();
    let n1 = ((&nb * (&kb + 2u32) - root) / 2u32).to_usize().unwrap_or(0);
    if n1 == 0 || n1 >= n {
        return Err(Error::ParameterOutOfRange(format!("electorate {n} too small for k = {k}")));
    }
    Ok((n1, n - n1))
}

/// Group sizes from the depth-`depth` convergent of `√((k+2)/k)` (even `k`),
/// or two single voters (odd `k`).
pub fn small_k_counts_by_depth(k: usize, depth: usize) -> (usize, usize) {
    if k % 2 == 1 {
        return (1, 1);
    }
    convergent((k + 2) as u64, k as u64, depth)
}

pub fn gen_lb_small_k(k: usize, m: usize, n: usize) -> Result<TwoMetricInstance> {
    let (n1, n2) = small_k_counts(k, n)?;
    gen_lb_small_k_counts(k, m, n1, n2)
}

pub fn gen_lb_small_k_counts(k: usize, m: usize, n1: usize, n2: usize) -> Result<TwoMetricInstance> {
    if k == 0 || 2 * k > m {
        return Err(Error::ParameterOutOfRange(format!("small-k family needs 1 ≤ k ≤ m/2, got k = {k}, m = {m}")));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::ParameterOutOfRange("both groups need at least one voter".into()));
    }
    two_blocks(k, m, n1, n2)
}

pub fn gen_lb_large_k(k: usize, m: usize, n: usize) -> Result<TwoMetricInstance> {
    if m == 0 || m % 2 == 1 || 2 * k < m || k > m {
        return Err(Error::ParameterOutOfRange(format!("large-k family needs even m and m/2 ≤ k ≤ m, got k = {k}, m = {m}")));
    }
    if n == 0 || n % 2 == 1 {
        return Err(Error::ParameterOutOfRange(format!("large-k family needs an even electorate, got {n}")));
    }
    two_blocks(k, m, n / 2, n / 2)
}

/// `⌈k/2⌉` alternatives at each of `−1`, `0` and `+1`, one voter at `0` and one at `+1`.
pub fn gen_lb_k_extremes(k: usize) -> Result<(Election, LineMetric)> {
    if k < 2 {
        return Err(Error::ParameterOutOfRange(format!("k-extremes family needs k ≥ 2, got {k}")));
    }
    let copies = k.div_ceil(2);
    let block = |p: &str| -> Vec<String> { (1..=copies).map(|i| format!("{p}{i}")).collect() };
    let (a, b, c) = (block("a"), block("b"), block("c"));
    let alternatives: Vec<String> = a.iter().chain(&b).chain(&c).cloned().collect();
    let at_zero: Vec<String> = b.iter().chain(&a).chain(&c).cloned().collect();
    let at_one: Vec<String> = c.iter().chain(&b).chain(&a).cloned().collect();
    let election = Election::new(alternatives, k, vec![at_zero, at_one])?;
    let mut alts: Vec<(String, Scalar)> = Vec::new();
    for (list, x) in [(&a, -1), (&b, 0), (&c, 1)] {
        alts.extend(list.iter().map(|id| (id.clone(), Scalar::from_int(x))));
    }
    Ok((election, LineMetric::from_pairs(vec![Scalar::zero(), Scalar::one()], alts)))
}

/// Random line instance with a strictly consistent derived profile.
///
/// Alternatives sit at distinct even integers and voters at half-integers,
/// so no voter is ever equidistant from two alternatives.
pub fn gen_random(n: usize, m: usize, k: usize, seed: u64) -> Result<(Election, LineMetric)> {
    if n == 0 || m == 0 || k == 0 || k > m {
        return Err(Error::ParameterOutOfRange(format!("need n, m ≥ 1 and 1 ≤ k ≤ m, got n = {n}, m = {m}, k = {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 3 * m as i64;
    let mut slots: Vec<i64> = (-span..=span).collect();
    slots.shuffle(&mut rng);
    let positions: Vec<i64> = slots[..m].to_vec();
    let width = (m - 1).to_string().len();
    let names: Vec<String> = (0..m).map(|i| format!("a{i:0width$}")).collect();
    let alts: BTreeSet<(String, Scalar)> =
        names.iter().zip(&positions).map(|(id, &x)| (id.clone(), Scalar::from_int(2 * x))).collect();

    let clustered = rng.gen_bool(0.5);
    let voters: Vec<Scalar> = (0..n)
        .map(|_| {
            let x = if clustered && rng.gen_bool(0.7) {
                2 * positions[rng.gen_range(0..m)] + rng.gen_range(-2..=1)
            } else {
                rng.gen_range(-2 * span - 2..=2 * span + 1)
            };
            Scalar::new(2 * x + 1, 2)
        })
        .collect();
    let d = LineMetric::from_pairs(voters, alts);
    let e = derive_profile(&d, n, &names, k)?;
    Ok((e, d))
}

/// Named generator families with their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundFamily {
    K2Tight { depth: usize },
    SmallK { k: usize, m: usize, depth: usize },
    LargeK { k: usize, m: usize, n: usize },
    KExtremesEgal { k: usize },
    Random { n: usize, m: usize, k: usize, seed: u64 },
}

/// A generated profile together with the metrics that come with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub election: Election,
    pub metrics: Vec<LineMetric>,
}

impl From<TwoMetricInstance> for Generated {
    fn from(t: TwoMetricInstance) -> Self {
        Generated { election: t.election, metrics: vec![t.d1, t.d2] }
    }
}

impl LowerBoundFamily {
    pub fn name(&self) -> &'static str {
        match self {
            LowerBoundFamily::K2Tight { .. } => "k2-tight",
            LowerBoundFamily::SmallK { .. } => "small-k",
            LowerBoundFamily::LargeK { .. } => "large-k",
            LowerBoundFamily::KExtremesEgal { .. } => "k-extremes",
            LowerBoundFamily::Random { .. } => "random",
        }
    }

    pub fn generate(&self) -> Result<Generated> {
        Ok(match *self {
            LowerBoundFamily::K2Tight { depth } => {
                let (n1, n2) = k2_counts(depth);
                gen_lb_k2(n1, n2)?.into()
            }
            LowerBoundFamily::SmallK { k, m, depth } => {
                let (n1, n2) = small_k_counts_by_depth(k, depth);
                gen_lb_small_k_counts(k, m, n1, n2)?.into()
            }
            LowerBoundFamily::LargeK { k, m, n } => gen_lb_large_k(k, m, n)?.into(),
            LowerBoundFamily::KExtremesEgal { k } => {
                let (election, d) = gen_lb_k_extremes(k)?;
                Generated { election, metrics: vec![d] }
            }
            LowerBoundFamily::Random { n, m, k, seed } => {
                let (election, d) = gen_random(n, m, k, seed)?;
                Generated { election, metrics: vec![d] }
            }
        })
    }
}

impl fmt::Display for LowerBoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Family names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    K2Tight,
    SmallK,
    LargeK,
    KExtremes,
    Random,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "k2-tight" => FamilyKind::K2Tight,
            "small-k" => FamilyKind::SmallK,
            "large-k" => FamilyKind::LargeK,
            "k-extremes" => FamilyKind::KExtremes,
            "random" => FamilyKind::Random,
            other => return Err(Error::ParameterOutOfRange(format!("unknown family `{other}`"))),
        })
    }
}

//! Batch experiments behind the `bench` command.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::costs::Objective;
use crate::distortion::distortion_fixed;
use crate::error::{Error, Result};
use crate::generators::{gen_lb_small_k_counts, gen_random, small_k_counts_by_depth};
use crate::model::{Committee, LineMetric};
use crate::rules::{rule_bound, RuleId};
use crate::scalar::{Scalar, Surd};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "POLARLINE_THREADS";

/// Convergent depth used for the even-`k` lower-bound instances.
pub const LOWER_BOUND_DEPTH: usize = 8;

/// A pool sized by [`THREADS_ENV`], or rayon's default when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::ParameterOutOfRange(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| Error::PreconditionViolated(format!("thread pool: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Table1V1,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Table1V1 => "table1-v1",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" | "table1-v1" => Ok(Suite::Table1V1),
            other => Err(Error::ParameterOutOfRange(format!("unknown suite `{other}`"))),
        }
    }
}

/// The rule evaluated for committee size `k`.
pub fn polar_rule(k: usize) -> RuleId {
    match k {
        2 => RuleId::PolarK2,
        3 => RuleId::PolarK3,
        _ => RuleId::PolarGeneral,
    }
}

/// Lower bound for `k < m/2`: `1 + √(1 + 2/k)` for even `k`, `2 + 1/k` for odd `k`.
pub fn small_k_lower_bound(k: usize) -> Surd {
    let k = k as i64;
    if k % 2 == 0 {
        Surd::new(Scalar::one(), Scalar::new(1, k), Scalar::from_int(k * (k + 2)))
    } else {
        Surd::rational(Scalar::from_int(2) + Scalar::new(1, k))
    }
}

/// Utilitarian distortion computed from voter multiplicities per position.
fn grouped_ratio(d: &LineMetric, s: &Committee) -> Result<Scalar> {
    let mut groups: BTreeMap<&Scalar, i64> = BTreeMap::new();
    for x in d.voters() {
        *groups.entry(x).or_default() += 1;
    }
    let cost = |p: &Scalar| -> Scalar { groups.iter().map(|(x, &c)| Scalar::from_int(c) * (*x - p).abs()).sum() };
    let mut all: Vec<Scalar> = d.alternatives().values().map(cost).collect();
    all.sort();
    let optimum: Scalar = all.into_iter().take(s.len()).sum();
    let chosen: Scalar = s.ids().iter().map(|id| d.alternative(id).map(&cost)).sum::<Result<Scalar>>()?;
    if optimum.is_zero() {
        return Err(Error::ZeroOptimum);
    }
    Ok(chosen / optimum)
}

/// `min_S max(dist_{d1}(S), dist_{d2}(S))` on the small-`k` instance with
/// `m = 2k`. Committees only differ by how many members come from each block.
pub fn small_k_achieved(k: usize, depth: usize) -> Result<Scalar> {
    let (n1, n2) = small_k_counts_by_depth(k, depth);
    let t = gen_lb_small_k_counts(k, 2 * k, n1, n2)?;
    let names = t.election.alternatives();
    let mut best: Option<Scalar> = None;
    for r in 0..=k {
        let s = Committee::new(names[..r].iter().chain(&names[k..2 * k - r]).cloned())?;
        let worst = grouped_ratio(&t.d1, &s)?.max(grouped_ratio(&t.d2, &s)?);
        best = Some(best.map_or(worst.clone(), |x| x.min(worst)));
    }
    Ok(best.expect("at least one committee"))
}

/// Instance parameters for the `s`-th random trial at committee size `k`.
pub fn trial_parameters(k: usize, s: u64) -> (usize, usize, u64) {
    let n = 1 + (s % 40) as usize;
    let m = k + 1 + ((s / 40) % 6) as usize;
    (n, m, ((k as u64) << 32) | s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Row {
    pub k: usize,
    pub rule: RuleId,
    pub upper: Surd,
    pub lower: Surd,
    pub lower_achieved: Scalar,
    pub instances: u64,
    pub worst_ratio: Scalar,
    pub violations: u64,
}

/// Upper and lower bounds per `k`, checked against seeded random instances and
/// the lower-bound family.
pub fn run_table1(seeds: u64, ks: impl IntoIterator<Item = usize>) -> Result<Vec<Table1Row>> {
    let pool = thread_pool()?;
    ks.into_iter()
        .map(|k| {
            let rule = polar_rule(k);
            let upper = rule_bound(rule, k).ok_or_else(|| Error::ParameterOutOfRange(format!("no bound for k = {k}")))?;
            let ratios: Vec<Scalar> = pool.install(|| {
                (0..seeds)
                    .into_par_iter()
                    .map(|s| {
                        let (n, m, seed) = trial_parameters(k, s);
                        let (e, d) = gen_random(n, m, k, seed)?;
                        let chosen = rule.apply(&e)?;
                        Ok(distortion_fixed(&e, &d, &chosen, Objective::UtilitarianAdditive)?.ratio)
                    })
                    .collect::<Result<_>>()
            })?;
            let violations = ratios.iter().filter(|r| !upper.ge_scalar(r)).count() as u64;
            Ok(Table1Row {
                k,
                rule,
                lower: small_k_lower_bound(k),
                lower_achieved: small_k_achieved(k, LOWER_BOUND_DEPTH)?,
                upper,
                instances: seeds,
                worst_ratio: ratios.into_iter().max().unwrap_or_else(Scalar::one),
                violations,
            })
        })
        .collect()
}

pub const TABLE1_HEADER: &str =
    "suite,k,rule,upper_exact,upper_decimal,lower_exact,lower_decimal,lower_achieved,instances,worst_ratio,worst_ratio_decimal,violations";

pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from(TABLE1_HEADER);
    out.push('\n');
    let decimal = |s: &Surd| s.enclosure(96).0.to_decimal(crate::io::REPORT_DIGITS);
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            Suite::Table1V1.name(),
            r.k,
            r.rule,
            r.upper,
            decimal(&r.upper),
            r.lower,
            decimal(&r.lower),
            r.lower_achieved,
            r.instances,
            r.worst_ratio,
            r.worst_ratio.to_decimal(crate::io::REPORT_DIGITS),
            r.violations
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bounds_match_family() {
        assert_eq!(small_k_achieved(3, 0).unwrap(), Scalar::new(7, 3));
        let achieved = small_k_achieved(2, LOWER_BOUND_DEPTH).unwrap();
        assert!(small_k_lower_bound(2).ge_scalar(&achieved));
        assert!(achieved.to_f64() > 2.404);
    }

    #[test]
    fn small_table_has_no_violations() {
        let rows = run_table1(30, 2..=4).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.violations == 0));
        let csv = table1_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("table1-v1,2,polar-k2,"));
    }

    #[test]
    fn grouped_ratio_matches_per_voter_costs() {
        for k in [2, 3, 4] {
            let (n1, n2) = small_k_counts_by_depth(k, 3);
            let t = gen_lb_small_k_counts(k, 2 * k, n1, n2).unwrap();
            let names = t.election.alternatives();
            let s = Committee::new(names[1..=k].iter().cloned()).unwrap();
            for d in [&t.d1, &t.d2] {
                let direct = distortion_fixed(&t.election, d, &s, Objective::UtilitarianAdditive).unwrap().ratio;
                assert_eq!(grouped_ratio(d, &s).unwrap(), direct);
            }
        }
    }

    #[test]
    fn suite_names() {
        assert_eq!("table1".parse::<Suite>().unwrap(), Suite::Table1V1);
        assert!("table2".parse::<Suite>().is_err());
    }
}

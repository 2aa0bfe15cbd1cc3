//! Voter costs and social costs under a fixed metric.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Committee, LineMetric};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Sum over voters of the summed distances to the committee.
    UtilitarianAdditive,
    /// Maximum over voters of the summed distances to the committee.
    EgalitarianAdditive,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::UtilitarianAdditive => "utilitarian",
            Objective::EgalitarianAdditive => "egalitarian",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "utilitarian" | "utilitarian-additive" => Ok(Objective::UtilitarianAdditive),
            "egalitarian" | "egalitarian-additive" => Ok(Objective::EgalitarianAdditive),
            other => Err(Error::ParameterOutOfRange(format!("unknown objective `{other}`"))),
        }
    }
}

/// `Σ_{a∈S} |x_i − x_a|`.
pub fn voter_cost(d: &LineMetric, s: &Committee, voter: usize) -> Result<Scalar> {
    let x = d.voter(voter)?;
    s.ids().iter().map(|id| Ok((x - d.alternative(id)?).abs())).sum()
}

pub fn social_cost(d: &LineMetric, s: &Committee, objective: Objective) -> Result<Scalar> {
    let costs = (0..d.voter_count()).map(|i| voter_cost(d, s, i));
    match objective {
        Objective::UtilitarianAdditive => costs.sum(),
        Objective::EgalitarianAdditive => {
            let mut best = Scalar::zero();
            for c in costs {
                best = best.max(c?);
            }
            Ok(best)
        }
    }
}

/// Total distance from every voter to `id`.
pub fn alternative_cost(d: &LineMetric, id: &str) -> Result<Scalar> {
    let x = d.alternative(id)?;
    Ok(d.voters().iter().map(|v| (v - x).abs()).sum())
}

//! Text formats for profiles and metrics, and JSON reports.
//!
//! Profile file:
//!
//! ```text
//! 3 3 2
//! a b c
//! 2: a b c
//! 1: c b a
//! ```
//!
//! The header is `n m k`, then the `m` alternative ids, then `count: ranking`
//! lines whose counts sum to `n`. Blank lines and `#` comments are ignored.
//!
//! Metric file: one record per line, `voter <index> <position>` or
//! `alt <id> <position>`, positions written as `p`, `p/q` or decimals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::model::{Election, LineMetric};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("ranking counts sum to {found}, header declares {expected} voters")]
    CountMismatch { expected: usize, found: usize },
    #[error("line {line}: unknown alternative `{id}`")]
    UnknownAlternative { line: usize, id: String },
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    ParseError::Syntax { line, column, message: message.into() }.into()
}

/// Non-blank, non-comment lines as `(line number, column offset, tokens)`.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<(usize, &str)>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<(usize, &str)> = content
            .split_whitespace()
            .map(|tok| (tok.as_ptr() as usize - raw.as_ptr() as usize + 1, tok))
            .collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn number(line: usize, (column, tok): (usize, &str)) -> Result<usize> {
    tok.parse().map_err(|_| syntax(line, column, format!("expected a non-negative integer, found `{tok}`")))
}

/// A profile file with its ranking groups kept intact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileFile {
    pub committee_size: usize,
    pub alternatives: Vec<String>,
    pub groups: Vec<(usize, Vec<String>)>,
}

impl ProfileFile {
    pub fn parse(text: &str) -> Result<ProfileFile> {
        let mut lines = records(text);
        let (hl, header) = lines.next().ok_or_else(|| syntax(1, 1, "missing `n m k` header"))?;
        if header.len() != 3 {
            return Err(syntax(hl, header.get(3).map_or(1, |t| t.0), "header must be `n m k`"));
        }
        let n = number(hl, header[0])?;
        let m = number(hl, header[1])?;
        let k = number(hl, header[2])?;

        let (al, ids) = lines.next().ok_or_else(|| syntax(hl + 1, 1, "missing alternative ids"))?;
        if ids.len() != m {
            return Err(syntax(al, 1, format!("expected {m} alternative ids, found {}", ids.len())));
        }
        let alternatives: Vec<String> = ids.iter().map(|(_, id)| id.to_string()).collect();
        let known: BTreeSet<&str> = alternatives.iter().map(String::as_str).collect();

        let mut groups = Vec::new();
        for (line, tokens) in lines {
            let (column, first) = tokens[0];
            let Some(count) = first.strip_suffix(':') else {
                return Err(syntax(line, column, "ranking lines start with `count:`"));
            };
            let count = number(line, (column, count))?;
            let mut ranking = Vec::with_capacity(tokens.len() - 1);
            for &(_, id) in &tokens[1..] {
                if !known.contains(id) {
                    return Err(ParseError::UnknownAlternative { line, id: id.to_string() }.into());
                }
                ranking.push(id.to_string());
            }
            groups.push((count, ranking));
        }
        let found: usize = groups.iter().map(|(c, _)| c).sum();
        if found != n {
            return Err(ParseError::CountMismatch { expected: n, found }.into());
        }
        Ok(ProfileFile { committee_size: k, alternatives, groups })
    }

    pub fn voter_count(&self) -> usize {
        self.groups.iter().map(|(c, _)| c).sum()
    }

    pub fn to_election(&self) -> Result<Election> {
        let rankings = self.groups.iter().flat_map(|(c, r)| std::iter::repeat_n(r.clone(), *c)).collect();
        Election::new(self.alternatives.clone(), self.committee_size, rankings)
    }

    /// Groups runs of identical consecutive rankings.
    pub fn from_election(e: &Election) -> ProfileFile {
        let mut groups: Vec<(usize, Vec<String>)> = Vec::new();
        for v in 0..e.voter_count() {
            let ranking: Vec<String> = e.ranking_ids(v).into_iter().map(String::from).collect();
            match groups.last_mut() {
                Some((count, last)) if *last == ranking => *count += 1,
                _ => groups.push((1, ranking)),
            }
        }
        ProfileFile { committee_size: e.committee_size(), alternatives: e.alternatives().to_vec(), groups }
    }
}

impl fmt::Display for ProfileFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.voter_count(), self.alternatives.len(), self.committee_size)?;
        writeln!(f, "{}", self.alternatives.join(" "))?;
        for (count, ranking) in &self.groups {
            writeln!(f, "{count}: {}", ranking.join(" "))?;
        }
        Ok(())
    }
}

pub fn parse_profile(text: &str) -> Result<Election> {
    ProfileFile::parse(text)?.to_election()
}

pub fn write_profile(e: &Election) -> String {
    ProfileFile::from_election(e).to_string()
}

pub fn parse_metric(text: &str) -> Result<LineMetric> {
    let mut voters: BTreeMap<usize, Scalar> = BTreeMap::new();
    let mut alternatives: BTreeMap<String, Scalar> = BTreeMap::new();
    for (line, tokens) in records(text) {
        if tokens.len() != 3 {
            return Err(syntax(line, tokens[0].0, "expected `voter <index> <position>` or `alt <id> <position>`"));
        }
        let (pc, ptok) = tokens[2];
        let position: Scalar = ptok.parse().map_err(|_| syntax(line, pc, format!("bad position `{ptok}`")))?;
        match tokens[0].1 {
            "voter" => {
                let index = number(line, tokens[1])?;
                if voters.insert(index, position).is_some() {
                    return Err(syntax(line, tokens[1].0, format!("voter {index} placed twice")));
                }
            }
            "alt" => {
                let id = tokens[1].1.to_string();
                if alternatives.insert(id.clone(), position).is_some() {
                    return Err(syntax(line, tokens[1].0, format!("alternative `{id}` placed twice")));
                }
            }
            other => return Err(syntax(line, tokens[0].0, format!("unknown record `{other}`"))),
        }
    }
    let n = voters.len();
    if let Some((&last, _)) = voters.last_key_value() {
        if last + 1 != n {
            let missing = (0..n).find(|i| !voters.contains_key(i)).unwrap_or(n);
            return Err(Error::MissingPosition(format!("voter {missing}")));
        }
    }
    Ok(LineMetric::new(voters.into_values().collect(), alternatives))
}

pub fn write_metric(d: &LineMetric) -> String {
    let mut out = String::new();
    for (i, x) in d.voters().iter().enumerate() {
        let _ = writeln!(out, "voter {i} {x}");
    }
    for (id, x) in d.alternatives() {
        let _ = writeln!(out, "alt {id} {x}");
    }
    out
}

/// Significant digits in report decimals.
pub const REPORT_DIGITS: usize = 12;

/// An exact value with its truncated decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactValue {
    pub exact: String,
    pub decimal: String,
}

impl From<&Scalar> for ExactValue {
    fn from(x: &Scalar) -> Self {
        ExactValue { exact: x.to_string(), decimal: x.to_decimal(REPORT_DIGITS) }
    }
}

impl From<&crate::scalar::Surd> for ExactValue {
    fn from(x: &crate::scalar::Surd) -> Self {
        let (lo, _) = x.enclosure(96);
        ExactValue { exact: x.to_string(), decimal: lo.to_decimal(REPORT_DIGITS) }
    }
}

/// Structured result emitted by the command-line tool.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    pub k: usize,
    pub committee: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_committee: Option<Vec<String>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub costs: BTreeMap<String, ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_profile() {
        let e = parse_profile("2 2 1\na b\n1: a b\n1: b a\n").unwrap();
        assert_eq!(e.voter_count(), 2);
        assert_eq!(e.ranking_ids(1), vec!["b", "a"]);
    }

    #[test]
    fn count_mismatch() {
        let err = parse_profile("3 2 1\na b\n1: a b\n1: b a\n").unwrap_err();
        assert_eq!(err, Error::Parse(ParseError::CountMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn unknown_alternative_has_line() {
        let err = parse_profile("1 2 1\na b\n1: a z\n").unwrap_err();
        assert_eq!(err, Error::Parse(ParseError::UnknownAlternative { line: 3, id: "z".into() }));
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_profile("1 2 1\na b\n  one: a b\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse(ParseError::Syntax { line: 3, column: 3, message: "expected a non-negative integer, found `one`".into() })
        );
    }

    #[test]
    fn round_trip_normalizes_whitespace() {
        let text = "# header\n4   2 1\n a  b\n\n3:  a b # comment\n1: b a\n";
        let parsed = ProfileFile::parse(text).unwrap();
        assert_eq!(parsed.to_string(), "4 2 1\na b\n3: a b\n1: b a\n");
        assert_eq!(ProfileFile::parse(&parsed.to_string()).unwrap(), parsed);
        assert_eq!(write_profile(&parsed.to_election().unwrap()), parsed.to_string());
    }

    #[test]
    fn metric_round_trip() {
        let text = "alt a 0\nalt b 1/2\nvoter 1 -3/4\nvoter 0 0.25\n";
        let d = parse_metric(text).unwrap();
        assert_eq!(d.voters(), &[Scalar::new(1, 4), Scalar::new(-3, 4)]);
        assert_eq!(parse_metric(&write_metric(&d)).unwrap(), d);
    }

    #[test]
    fn metric_gaps_and_duplicates() {
        assert!(matches!(parse_metric("voter 1 0\n"), Err(Error::MissingPosition(_))));
        assert!(matches!(parse_metric("alt a 0\nalt a 1\n"), Err(Error::Parse(ParseError::Syntax { line: 2, .. }))));
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polarline::bench::{run_table1, table1_csv, Suite};
use polarline::costs::voter_cost;
use polarline::distortion::{adversarial_distortion, distortion_fixed, AdversarialMode};
use polarline::generators::{FamilyKind, LowerBoundFamily};
use polarline::io::{parse_metric, parse_profile, write_metric, write_profile, ExactValue, Report};
use polarline::optimal::{binomial, optimal_bruteforce, DEFAULT_BUDGET};
use polarline::{majority_order, order_alternatives, rule_bound, Committee, Election, Error, LineMetric, Objective, RuleId, Scalar};

#[derive(Debug, Parser)]
#[command(name = "polarline", version, about = "Committee elections on the line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Choice {
    /// Rule producing the committee.
    #[arg(long)]
    rule: Option<RuleId>,
    /// Explicit committee, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "rule")]
    committee: Option<Vec<String>>,
    /// Override the committee size from the profile.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recovered alternative order and majority order.
    Order {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Run a rule on a profile.
    Elect {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        rule: RuleId,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Distortion of a committee under a given metric.
    Eval {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[command(flatten)]
        choice: Choice,
        #[arg(long, default_value = "utilitarian")]
        objective: Objective,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Worst-case distortion over consistent line metrics.
    Adversary {
        #[arg(long)]
        profile: PathBuf,
        #[command(flatten)]
        choice: Choice,
        #[arg(long, default_value = "utilitarian")]
        objective: Objective,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the witness metric.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated instance as profile and metric files.
    Gen {
        #[arg(long)]
        family: FamilyKind,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Convergent depth for the irrational group ratios.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproducible experiment suites written as CSV.
    Bench {
        #[arg(long, default_value = "table1")]
        suite: Suite,
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn category(&self) -> &'static str {
        match self {
            Failure::Core(e) => e.category(),
            Failure::Io(..) => "io",
            Failure::Verification(_) => "verification",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::BudgetExceeded { .. }) => 4,
            Failure::Core(Error::ParameterOutOfRange(_)) => 2,
            _ => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
            Failure::Verification(m) => m.clone(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load(profile: &Path, k: Option<usize>) -> Outcome<Election> {
    let e = parse_profile(&read(profile)?)?;
    Ok(match k {
        Some(k) => e.with_committee_size(k)?,
        None => e,
    })
}

fn choose(e: &Election, choice: &Choice) -> Outcome<(Option<RuleId>, Committee)> {
    match (&choice.rule, &choice.committee) {
        (Some(rule), _) => Ok((Some(*rule), rule.apply(e)?)),
        (None, Some(ids)) => {
            let s = Committee::new(ids.iter().cloned())?;
            e.check_committee(&s)?;
            Ok((None, s))
        }
        (None, None) => Err(Error::ParameterOutOfRange("pass --rule or --committee".into()).into()),
    }
}

/// Recomputes both costs from per-voter distances and, when affordable, the
/// optimum by enumeration.
fn verify(e: &Election, d: &LineMetric, s: &Committee, objective: Objective, budget: u64) -> Outcome<Scalar> {
    let fixed = distortion_fixed(e, d, s, objective)?;
    let per_voter: Vec<Scalar> = (0..d.voter_count()).map(|v| voter_cost(d, s, v)).collect::<Result<_, _>>()?;
    let chosen = match objective {
        Objective::UtilitarianAdditive => per_voter.into_iter().sum(),
        Objective::EgalitarianAdditive => per_voter.into_iter().max().unwrap_or_else(Scalar::zero),
    };
    if chosen != fixed.chosen_cost {
        return Err(Failure::Verification(format!("committee cost {chosen} disagrees with {}", fixed.chosen_cost)));
    }
    if binomial(e.alternative_count(), e.committee_size()) <= budget {
        let brute = optimal_bruteforce(e, d, objective, budget)?;
        if brute.cost != fixed.optimal_cost {
            return Err(Failure::Verification(format!("optimum {} disagrees with {}", brute.cost, fixed.optimal_cost)));
        }
    }
    Ok(fixed.ratio)
}

fn costs_of(d: &LineMetric, entries: &[(&str, &Committee)], objective: Objective) -> Outcome<BTreeMap<String, ExactValue>> {
    entries
        .iter()
        .map(|(name, s)| Ok((name.to_string(), ExactValue::from(&polarline::social_cost(d, s, objective)?))))
        .collect()
}

fn run(cli: Cli) -> Outcome<String> {
    match cli.command {
        Command::Order { profile } => {
            let e = load(&profile, None)?;
            let order = order_alternatives(&e)?;
            let majority = majority_order(&e, &order);
            let value = serde_json::json!({
                "alternative_order": order.ids(),
                "majority_order": majority.ids(),
                "head": majority.head(),
            });
            Ok(serde_json::to_string_pretty(&value).expect("json"))
        }
        Command::Elect { profile, rule, k } => {
            let e = load(&profile, k)?;
            let s = rule.apply(&e)?;
            let report = Report {
                rule: Some(rule.to_string()),
                k: e.committee_size(),
                committee: s.ids().to_vec(),
                bound: rule_bound(rule, e.committee_size()).as_ref().map(ExactValue::from),
                ..Report::default()
            };
            Ok(report.to_json())
        }
        Command::Eval { profile, metric, choice, objective, budget } => {
            let e = load(&profile, choice.k)?;
            let d = parse_metric(&read(&metric)?)?;
            let (rule, s) = choose(&e, &choice)?;
            let fixed = distortion_fixed(&e, &d, &s, objective)?;
            let ratio = verify(&e, &d, &s, objective, budget)?;
            let bound = match (rule, objective) {
                (Some(r), Objective::UtilitarianAdditive) => rule_bound(r, e.committee_size()),
                _ => None,
            };
            let pass = bound.as_ref().map_or(ratio == Scalar::one(), |b| b.ge_scalar(&ratio));
            let report = Report {
                rule: rule.map(|r| r.to_string()),
                k: e.committee_size(),
                committee: s.ids().to_vec(),
                objective: Some(objective.to_string()),
                optimal_committee: Some(fixed.optimal.ids().to_vec()),
                costs: costs_of(&d, &[("committee", &s), ("optimal", &fixed.optimal)], objective)?,
                ratio: Some(ExactValue::from(&ratio)),
                bound: bound.as_ref().map(ExactValue::from),
                pass: Some(pass),
                ..Report::default()
            };
            Ok(report.to_json())
        }
        Command::Adversary { profile, choice, objective, mode, budget, seed, out } => {
            let e = load(&profile, choice.k)?;
            let (rule, s) = choose(&e, &choice)?;
            let mode = match mode.as_str() {
                "exact" => AdversarialMode::Exact,
                "sample" => AdversarialMode::Sample { seed },
                other => return Err(Error::ParameterOutOfRange(format!("unknown mode `{other}`")).into()),
            };
            let result = adversarial_distortion(&e, &s, objective, mode, budget)?;
            let ratio = verify(&e, &result.witness, &s, objective, DEFAULT_BUDGET)?;
            if ratio != result.ratio {
                return Err(Failure::Verification(format!("witness ratio {ratio} disagrees with {}", result.ratio)));
            }
            if let Some(path) = &out {
                write(path, &write_metric(&result.witness))?;
            }
            let bound = match (rule, objective) {
                (Some(r), Objective::UtilitarianAdditive) => rule_bound(r, e.committee_size()),
                _ => None,
            };
            let report = Report {
                rule: rule.map(|r| r.to_string()),
                k: e.committee_size(),
                committee: s.ids().to_vec(),
                objective: Some(objective.to_string()),
                optimal_committee: Some(result.optimal.ids().to_vec()),
                costs: costs_of(&result.witness, &[("committee", &s), ("optimal", &result.optimal)], objective)?,
                ratio: Some(ExactValue::from(&result.ratio)),
                pass: bound.as_ref().map(|b| b.ge_scalar(&result.ratio)),
                bound: bound.as_ref().map(ExactValue::from),
                mode: Some(match mode {
                    AdversarialMode::Exact => "exact".into(),
                    AdversarialMode::Sample { .. } => "sample".into(),
                }),
                witness: out.map(|p| p.display().to_string()),
            };
            Ok(report.to_json())
        }
        Command::Gen { family, k, m, n, depth, seed, out } => {
            let family = match family {
                FamilyKind::K2Tight => LowerBoundFamily::K2Tight { depth },
                FamilyKind::SmallK => LowerBoundFamily::SmallK { k, m: m.unwrap_or(2 * k), depth },
                FamilyKind::LargeK => LowerBoundFamily::LargeK { k, m: m.unwrap_or(k + k % 2), n },
                FamilyKind::KExtremes => LowerBoundFamily::KExtremesEgal { k },
                FamilyKind::Random => LowerBoundFamily::Random { n, m: m.unwrap_or(k + 2), k, seed },
            };
            let generated = family.generate()?;
            fs::create_dir_all(&out).map_err(|e| Failure::Io(out.clone(), e))?;
            let mut files = vec![out.join("profile.txt")];
            write(&files[0], &write_profile(&generated.election))?;
            for (i, d) in generated.metrics.iter().enumerate() {
                let path = out.join(format!("metric{}.txt", i + 1));
                write(&path, &write_metric(d))?;
                files.push(path);
            }
            let value = serde_json::json!({
                "family": family.name(),
                "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            });
            Ok(serde_json::to_string_pretty(&value).expect("json"))
        }
        Command::Bench { suite, seeds, out } => {
            let Suite::Table1V1 = suite;
            let csv = table1_csv(&run_table1(seeds, 2..=9)?);
            match out {
                Some(path) => {
                    write(&path, &csv)?;
                    Ok(serde_json::json!({ "suite": suite.name(), "csv": path.display().to_string() }).to_string())
                }
                None => Ok(csv.trim_end().to_string()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            let value = serde_json::json!({ "error": failure.category(), "message": failure.message() });
            eprintln!("{value}");
            ExitCode::from(failure.exit_code())
        }
    }
}

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use super::run::{run, RunOptions, Verdict};
use super::suite1::{gen_suite1, SUITE1};
use super::suite2::{gen_suite2, suite2_rows, Pattern};
use super::{with_timeout, CliError};
use crate::automata::{equiv, includes, is_nonempty, Caps, ParametricAutomaton};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Back-reference patterns: emptiness, self-equivalence, inclusion.
    Sra,
    /// Program verification conditions: satisfiability.
    Verif,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sra" => Ok(Suite::Sra),
            "verif" => Ok(Suite::Verif),
            _ => Err(format!("unknown suite `{s}` (expected sra or verif)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Emptiness,
    Equivalence,
    Inclusion,
    Satisfiability,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Emptiness => "emptiness",
            CheckKind::Equivalence => "equivalence",
            CheckKind::Inclusion => "inclusion",
            CheckKind::Satisfiability => "satisfiability",
        })
    }
}

impl FromStr for CheckKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "emptiness" => Ok(CheckKind::Emptiness),
            "equivalence" => Ok(CheckKind::Equivalence),
            "inclusion" => Ok(CheckKind::Inclusion),
            "satisfiability" => Ok(CheckKind::Satisfiability),
            _ => Err(format!("unknown check kind `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchVerdict {
    Sat,
    Unsat,
    Nonempty,
    Empty,
    Holds,
    Witness,
    Resource,
}

impl fmt::Display for BenchVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchVerdict::Sat => "SAT",
            BenchVerdict::Unsat => "UNSAT",
            BenchVerdict::Nonempty => "NONEMPTY",
            BenchVerdict::Empty => "EMPTY",
            BenchVerdict::Holds => "HOLDS",
            BenchVerdict::Witness => "WITNESS",
            BenchVerdict::Resource => "RESOURCE",
        })
    }
}

impl FromStr for BenchVerdict {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "SAT" => BenchVerdict::Sat,
            "UNSAT" => BenchVerdict::Unsat,
            "NONEMPTY" => BenchVerdict::Nonempty,
            "EMPTY" => BenchVerdict::Empty,
            "HOLDS" => BenchVerdict::Holds,
            "WITNESS" => BenchVerdict::Witness,
            "RESOURCE" => BenchVerdict::Resource,
            _ => return Err(format!("unknown verdict `{s}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub id: String,
    pub kind: CheckKind,
    pub verdict: BenchVerdict,
    pub millis: u128,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub repetitions: usize,
    pub timeout: Duration,
    pub caps: Caps,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            repetitions: 1,
            timeout: DEFAULT_TIMEOUT,
            caps: Caps::default(),
        }
    }
}

/// Times `check` `repetitions` times and keeps the median. Errors other
/// than resource exhaustion propagate.
fn measure(
    id: String,
    kind: CheckKind,
    opts: &BenchOptions,
    check: Arc<dyn Fn() -> Result<BenchVerdict, CliError> + Send + Sync>,
) -> Result<BenchRow, CliError> {
    let mut times = Vec::new();
    let mut verdict = BenchVerdict::Resource;
    for _ in 0..opts.repetitions.max(1) {
        let start = Instant::now();
        let c = check.clone();
        let outcome = with_timeout(Some(opts.timeout), move || c()).and_then(|r| r);
        times.push(start.elapsed().as_millis());
        verdict = match outcome {
            Ok(v) => v,
            Err(e) if e.is_resource() => BenchVerdict::Resource,
            Err(e) => return Err(e),
        };
        if verdict == BenchVerdict::Resource {
            break;
        }
    }
    times.sort_unstable();
    Ok(BenchRow {
        id,
        kind,
        verdict,
        millis: times[times.len() / 2],
    })
}

fn pattern_name(p: (Pattern, usize)) -> String {
    format!("{}{}", p.0, p.1)
}

fn inclusion_verdict(holds: bool) -> BenchVerdict {
    if holds {
        BenchVerdict::Holds
    } else {
        BenchVerdict::Witness
    }
}

/// The three checks of one suite-2 row.
pub fn sra_row(
    l1: (Pattern, usize),
    l2: (Pattern, usize),
    opts: &BenchOptions,
) -> Result<Vec<BenchRow>, CliError> {
    let a: Arc<ParametricAutomaton> = Arc::new(gen_suite2(l1.0, l1.1)?);
    let b: Arc<ParametricAutomaton> = Arc::new(gen_suite2(l2.0, l2.1)?);
    let caps = opts.caps;
    let id = format!("{}/{}", pattern_name(l1), pattern_name(l2));
    let (a1, a2, a3, b3) = (a.clone(), a.clone(), a, b);
    Ok(vec![
        measure(
            id.clone(),
            CheckKind::Emptiness,
            opts,
            Arc::new(move || {
                let groups = [("w".to_string(), vec![(*a1).clone()])];
                Ok(if is_nonempty(&groups, &caps)?.is_some() {
                    BenchVerdict::Nonempty
                } else {
                    BenchVerdict::Empty
                })
            }),
        )?,
        measure(
            id.clone(),
            CheckKind::Equivalence,
            opts,
            Arc::new(move || Ok(inclusion_verdict(equiv(&a2, &a2, &caps)?.holds()))),
        )?,
        measure(
            id,
            CheckKind::Inclusion,
            opts,
            Arc::new(move || Ok(inclusion_verdict(includes(&b3, &a3, &caps)?.holds()))),
        )?,
    ])
}

pub fn bench(suite: Suite, opts: &BenchOptions) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    match suite {
        Suite::Sra => {
            for (l1, l2) in suite2_rows() {
                rows.extend(sra_row(l1, l2, opts)?);
            }
        }
        Suite::Verif => {
            for name in SUITE1 {
                let file = Arc::new(gen_suite1(name).expect("known benchmark")?);
                let run_opts = RunOptions {
                    caps: opts.caps,
                    ..RunOptions::default()
                };
                rows.push(measure(
                    name.to_string(),
                    CheckKind::Satisfiability,
                    opts,
                    Arc::new(move || {
                        Ok(match run(&file, &run_opts)?.verdict {
                            Verdict::Sat => BenchVerdict::Sat,
                            Verdict::Unsat => BenchVerdict::Unsat,
                            _ => BenchVerdict::Resource,
                        })
                    }),
                )?);
            }
        }
    }
    Ok(rows)
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let header = ["id", "kind", "verdict", "millis"];
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.id.clone(),
                r.kind.to_string(),
                r.verdict.to_string(),
                r.millis.to_string(),
            ]
        })
        .collect();
    let width = |i: usize| {
        cells
            .iter()
            .map(|c| c[i].len())
            .chain([header[i].len()])
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..4).map(width).collect();
    let line = |c: [&str; 4]| {
        format!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {:>w3$}\n",
            c[0],
            c[1],
            c[2],
            c[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        )
    };
    let mut out = line(header);
    for c in &cells {
        out.push_str(&line([&c[0], &c[1], &c[2], &c[3]]));
    }
    out
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "kind", "verdict", "millis"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.id.clone(),
            r.kind.to_string(),
            r.verdict.to_string(),
            r.millis.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn from_csv(text: &str) -> Result<Vec<BenchRow>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != 4 {
            return Err(format!("expected 4 fields, found {}", rec.len()));
        }
        rows.push(BenchRow {
            id: rec[0].to_string(),
            kind: rec[1].parse()?,
            verdict: rec[2].parse()?,
            millis: rec[3].parse().map_err(|e| format!("{e}"))?,
        });
    }
    Ok(rows)
}

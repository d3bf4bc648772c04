use std::fmt;
use std::time::Duration;

use super::localize::localize_parameters;
use super::problem::{Command, ProblemFile};
use super::{with_timeout, CliError};
use crate::automata::{equiv, includes, is_nonempty, Caps, EmptinessWitness, Inclusion};
use crate::sl::{solve_with, to_ssa, SlModel, SlOutcome, SolveOptions};
use crate::theory::{Guard, Model, Value};
use crate::wordeq::{
    bounded_solve, export_smtlib, reduce, solve_no_reg, Nfa, NoRegOutcome, WordEqInstance,
    WordEqProblem,
};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub caps: Caps,
    pub timeout: Option<Duration>,
    /// Word length bound for `(reduce)`.
    pub bound: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            caps: Caps::default(),
            timeout: None,
            bound: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Nonempty,
    Empty,
    Holds,
    Witness,
    /// The bounded search found nothing and nothing refuted the problem.
    Unknown,
    Exported,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Sat | Verdict::Nonempty | Verdict::Holds | Verdict::Exported => 0,
            Verdict::Unsat | Verdict::Empty | Verdict::Witness => 1,
            Verdict::Unknown => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Nonempty => "nonempty",
            Verdict::Empty => "empty",
            Verdict::Holds => "holds",
            Verdict::Witness => "witness",
            Verdict::Unknown => "unknown",
            Verdict::Exported => "exported",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub verdict: Verdict,
    /// Model, witness or note printed after the verdict line.
    pub detail: String,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.verdict)?;
        f.write_str(&self.detail)
    }
}

fn report(verdict: Verdict, detail: impl Into<String>) -> Report {
    Report {
        verdict,
        detail: detail.into(),
    }
}

fn witness_text(model: &Model, var: &str, word: &[Value]) -> String {
    SlModel {
        params: model.clone(),
        words: [(var.to_string(), word.to_vec())].into(),
    }
    .to_string()
}

fn nfa_is_empty(n: &Nfa) -> bool {
    let mut seen = vec![false; n.states];
    let mut stack = vec![n.initial];
    seen[n.initial] = true;
    while let Some(q) = stack.pop() {
        if n.finals.contains(&q) {
            return false;
        }
        for &(s, _, d) in &n.transitions {
            if s == q && !seen[d] {
                seen[d] = true;
                stack.push(d);
            }
        }
    }
    true
}

fn element_holds(element: &[Guard], m: &Model) -> Result<bool, CliError> {
    for g in element {
        if !g
            .eval(&Value::from_integer(0.into()), m)
            .map_err(crate::wordeq::WordEqError::Theory)?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Type-abstraction reduction with bounded search over every disjunct.
fn solve_reduced(file: &ProblemFile, bound: usize) -> Result<Report, CliError> {
    let mut unknown = false;
    for (sys, element) in file.to_systems()? {
        if sys.regular.is_empty() && sys.lengths.is_empty() {
            match solve_no_reg(sys.theory, &element, &sys.equations, bound)? {
                NoRegOutcome::Sat { params, words } => {
                    return Ok(report(Verdict::Sat, SlModel { params, words }.to_string()))
                }
                NoRegOutcome::Unsat => continue,
                NoRegOutcome::Unknown => {
                    unknown = true;
                    continue;
                }
            }
        }
        let loc = localize_parameters(&sys, &element);
        for inst in reduce(&loc.problem)? {
            let inst = inst?;
            if inst.nfas.iter().any(|(_, n)| nfa_is_empty(n)) {
                continue;
            }
            let limit = 8 * inst.variables().len().max(1);
            let Some(s) = bounded_solve(&inst, bound.min(limit))? else {
                unknown = true;
                continue;
            };
            let (params, words) = inst.lift(&s);
            let (params, mut words) = loc.restore(&params, &words);
            for x in sys.variables() {
                words.entry(x).or_default();
            }
            if !sys.holds(&params, &words)? || !element_holds(&element, &params)? {
                return Err(CliError::Unsupported(
                    "lifted model failed verification".into(),
                ));
            }
            return Ok(report(Verdict::Sat, SlModel { params, words }.to_string()));
        }
    }
    Ok(if unknown {
        report(
            Verdict::Unknown,
            format!("no solution with words of length at most {bound}\n"),
        )
    } else {
        report(Verdict::Unsat, "")
    })
}

/// The first reduced instance of the first disjunct.
pub fn first_instance(file: &ProblemFile) -> Result<WordEqInstance, CliError> {
    let systems = file.to_systems()?;
    let (sys, element): &(WordEqProblem, Vec<Guard>) =
        systems.first().expect("at least one system");
    let loc = localize_parameters(sys, element);
    match reduce(&loc.problem)?.next() {
        Some(inst) => Ok(inst?),
        None => Err(CliError::Unsupported(
            "the reduction produced no instance".into(),
        )),
    }
}

pub fn export(file: &ProblemFile, path: &std::path::Path) -> Result<Report, CliError> {
    let text = export_smtlib(&first_instance(file)?)?;
    std::fs::write(path, text)?;
    Ok(report(Verdict::Exported, format!("{}\n", path.display())))
}

fn run_inner(file: &ProblemFile, opts: &RunOptions) -> Result<Report, CliError> {
    let caps = opts.caps;
    let get = |n: &str| file.automaton(n).expect("validated name");
    let inclusion = |r: Inclusion, var: &str| match r {
        Inclusion::Holds => report(Verdict::Holds, ""),
        Inclusion::Witness { model, word } => {
            report(Verdict::Witness, witness_text(&model, var, &word))
        }
    };
    Ok(match &file.command {
        Command::Sat => {
            let p = to_ssa(&file.to_program()?)?;
            let opts = SolveOptions {
                caps,
                ..SolveOptions::default()
            };
            match solve_with(&p, &opts)?.0 {
                SlOutcome::Sat(m) => report(Verdict::Sat, m.to_string()),
                SlOutcome::Unsat => report(Verdict::Unsat, ""),
            }
        }
        Command::Empty(a) => {
            match is_nonempty(&[("w".to_string(), vec![get(a).clone()])], &caps)? {
                Some(EmptinessWitness { model, words }) => report(
                    Verdict::Nonempty,
                    witness_text(&model, "w", &words.get("w").cloned().unwrap_or_default()),
                ),
                None => report(Verdict::Empty, ""),
            }
        }
        Command::Subset(a, b) => inclusion(includes(get(a), get(b), &caps)?, "w"),
        Command::Equiv(a, b) => inclusion(equiv(get(a), get(b), &caps)?, "w"),
        Command::Reduce => solve_reduced(file, opts.bound)?,
        Command::Export(path) => export(file, path)?,
    })
}

/// Executes the file's command.
pub fn run(file: &ProblemFile, opts: &RunOptions) -> Result<Report, CliError> {
    let (file, opts2) = (file.clone(), opts.clone());
    with_timeout(opts.timeout, move || run_inner(&file, &opts2))?
}

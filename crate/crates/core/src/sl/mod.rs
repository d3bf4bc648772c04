//! Straight-line programs over sequence variables and their decision
//! procedure: eliminate the last assignment by pre-image, branch depth-first
//! over the disjuncts that elimination produces, and finish with one joint
//! emptiness check.

mod solve;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::automata::{AutomataError, ParametricAutomaton, RegularConstraint};
use crate::theory::{linear::value_to_string, Guard, LinExpr, Model, TheoryKind, Value};
use crate::transducers::ParametricTransducer;

pub use solve::{solve, solve_with, Choice, SlOutcome, SolveOptions, Trace, TraceEvent};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Var(String),
    /// A literal sequence; entries are numerals or element constants.
    Seq(Vec<LinExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunApp {
    Concat(Vec<Operand>),
    Transduce(Arc<ParametricTransducer>, String),
    Reverse(String),
}

impl FunApp {
    pub fn args(&self) -> Vec<&String> {
        match self {
            FunApp::Concat(ops) => ops
                .iter()
                .filter_map(|o| match o {
                    Operand::Var(v) => Some(v),
                    Operand::Seq(_) => None,
                })
                .collect(),
            FunApp::Transduce(_, x) | FunApp::Reverse(x) => vec![x],
        }
    }

    fn rename_args(&self, map: &BTreeMap<String, String>) -> FunApp {
        let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            FunApp::Concat(ops) => FunApp::Concat(
                ops.iter()
                    .map(|o| match o {
                        Operand::Var(v) => Operand::Var(r(v)),
                        seq => seq.clone(),
                    })
                    .collect(),
            ),
            FunApp::Transduce(t, x) => FunApp::Transduce(t.clone(), r(x)),
            FunApp::Reverse(x) => FunApp::Reverse(r(x)),
        }
    }
}

/// A positive Boolean combination of regular constraints, kept in DNF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognizableFormula {
    pub disjuncts: Vec<Vec<RegularConstraint>>,
}

impl RecognizableFormula {
    pub fn single(var: &str, automaton: ParametricAutomaton) -> Self {
        RecognizableFormula {
            disjuncts: vec![vec![RegularConstraint {
                var: var.to_string(),
                automaton,
            }]],
        }
    }

    pub fn vars(&self) -> BTreeSet<&String> {
        self.disjuncts.iter().flatten().map(|c| &c.var).collect()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.disjuncts.iter().flatten().any(|c| c.var == var)
    }

    fn rename(&self, map: &BTreeMap<String, String>) -> Self {
        RecognizableFormula {
            disjuncts: self
                .disjuncts
                .iter()
                .map(|d| {
                    d.iter()
                        .map(|c| RegularConstraint {
                            var: map.get(&c.var).cloned().unwrap_or_else(|| c.var.clone()),
                            automaton: c.automaton.clone(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn holds(
        &self,
        m: &Model,
        words: &BTreeMap<String, Vec<Value>>,
    ) -> Result<bool, AutomataError> {
        for d in &self.disjuncts {
            let mut all = true;
            for c in d {
                let w = words.get(&c.var).map(Vec::as_slice).unwrap_or(&[]);
                if !c.automaton.accepts(m, w)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Assign(String, FunApp),
    AssertRegular(RecognizableFormula),
    /// A guard over parameters and element constants only.
    AssertElement(Guard),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlProgram {
    pub theory: TheoryKind,
    pub statements: Vec<Statement>,
    /// SSA name to source name, for variables renamed by [`to_ssa`].
    pub origin: BTreeMap<String, String>,
}

impl SlProgram {
    pub fn new(theory: TheoryKind, statements: Vec<Statement>) -> Self {
        SlProgram {
            theory,
            statements,
            origin: BTreeMap::new(),
        }
    }

    pub fn assigned(&self) -> Vec<&String> {
        self.statements
            .iter()
            .filter_map(|s| match s {
                Statement::Assign(y, _) => Some(y),
                _ => None,
            })
            .collect()
    }

    pub fn is_ssa(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.assigned().into_iter().all(|y| seen.insert(y))
    }

    /// Every sequence variable mentioned anywhere.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for s in &self.statements {
            match s {
                Statement::Assign(y, f) => {
                    out.insert(y.clone());
                    out.extend(f.args().into_iter().cloned());
                }
                Statement::AssertRegular(r) => out.extend(r.vars().into_iter().cloned()),
                Statement::AssertElement(_) => {}
            }
        }
        out
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SlError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("variable `{0}` is read before its first assignment")]
    UseBeforeDefinition(String),
    #[error("program is not in SSA form: `{0}` is assigned twice")]
    NotSsa(String),
    #[error("model replay failed: {0}")]
    Replay(String),
}

/// Renames repeated assignments `Y, Y', Y'', ...` and redirects later reads
/// to the newest version.
pub fn to_ssa(p: &SlProgram) -> Result<SlProgram, SlError> {
    let assigned: BTreeSet<&String> = p.assigned().into_iter().collect();
    let mut taken: BTreeSet<String> = p.variables();
    let mut current: BTreeMap<String, String> = BTreeMap::new();
    let mut defined: BTreeSet<String> = BTreeSet::new();
    let mut origin = p.origin.clone();
    let mut out = Vec::with_capacity(p.statements.len());

    let check_reads = |vars: Vec<&String>, defined: &BTreeSet<String>| -> Result<(), SlError> {
        match vars
            .into_iter()
            .find(|v| assigned.contains(v) && !defined.contains(*v))
        {
            Some(v) => Err(SlError::UseBeforeDefinition(v.clone())),
            None => Ok(()),
        }
    };

    for s in &p.statements {
        match s {
            Statement::Assign(y, f) => {
                check_reads(f.args(), &defined)?;
                let f = f.rename_args(&current);
                let name = if defined.contains(y) {
                    let mut n = format!("{y}'");
                    while taken.contains(&n) {
                        n.push('\'');
                    }
                    taken.insert(n.clone());
                    let root = origin.get(y).cloned().unwrap_or_else(|| y.clone());
                    origin.insert(n.clone(), root);
                    current.insert(y.clone(), n.clone());
                    n
                } else {
                    defined.insert(y.clone());
                    y.clone()
                };
                out.push(Statement::Assign(name, f));
            }
            Statement::AssertRegular(r) => {
                check_reads(r.vars().into_iter().collect(), &defined)?;
                out.push(Statement::AssertRegular(r.rename(&current)));
            }
            Statement::AssertElement(g) => out.push(Statement::AssertElement(g.clone())),
        }
    }
    Ok(SlProgram {
        theory: p.theory,
        statements: out,
        origin,
    })
}

/// `∃Y. A(Y) ∧ Y = X₁⋯Xₖ` as a disjunction over the intermediate states
/// the run of `A` passes at each operand boundary.
pub fn split_concat(
    constraint: &RegularConstraint,
    operands: &[String],
) -> Result<RecognizableFormula, SlError> {
    Ok(RecognizableFormula {
        disjuncts: split_cuts(&constraint.automaton, operands)?
            .into_iter()
            .map(|(_, d)| d)
            .collect(),
    })
}

/// Cut states of one split and the constraints they induce.
pub(crate) type Cut = (Vec<usize>, Vec<RegularConstraint>);

/// Disjuncts of [`split_concat`] paired with their cut states.
pub(crate) fn split_cuts(
    a: &ParametricAutomaton,
    operands: &[String],
) -> Result<Vec<Cut>, SlError> {
    let k = operands.len();
    if k == 0 {
        return Ok(if a.finals.contains(&a.initial) {
            vec![(vec![], vec![])]
        } else {
            vec![]
        });
    }
    let n = a.states.len();
    let mut out = Vec::new();
    let mut cut = vec![0usize; k - 1];
    loop {
        let mut disjunct = Vec::with_capacity(k);
        for (i, x) in operands.iter().enumerate() {
            let start = if i == 0 { a.initial } else { cut[i - 1] };
            let finals = if i + 1 == k {
                a.finals.clone()
            } else {
                [cut[i]].into()
            };
            disjunct.push(RegularConstraint {
                var: x.clone(),
                automaton: a.restrict(start, finals)?,
            });
        }
        out.push((cut.clone(), disjunct));
        // Odometer over (k-1)-tuples, last position fastest.
        let mut i = k - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            cut[i] += 1;
            if cut[i] < n {
                break;
            }
            cut[i] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SlModel {
    pub params: Model,
    pub words: BTreeMap<String, Vec<Value>>,
}

impl fmt::Display for SlModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, w) in &self.words {
            let letters: Vec<String> = w.iter().map(value_to_string).collect();
            writeln!(f, "{x} = [{}]", letters.join(", "))?;
        }
        for (p, v) in &self.params {
            writeln!(f, "{p} = {}", value_to_string(v))?;
        }
        Ok(())
    }
}

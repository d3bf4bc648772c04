use std::collections::BTreeMap;

use super::{
    split_cuts, FunApp, Operand, RecognizableFormula, SlError, SlModel, SlProgram, Statement,
};
use crate::automata::{is_nonempty_with, Caps, ParametricAutomaton, RegularConstraint, Transition};
use crate::theory::{Guard, LinExpr, Model, Value};

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub caps: Caps,
    /// Keep searching after the first model so the trace covers every
    /// branch. The returned model is still the first one found.
    pub explore_all: bool,
}

/// One branching decision on the current search path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Choice {
    /// Disjunct `index` of asserted formula `formula` (statement order).
    Disjunct { formula: usize, index: usize },
    /// Concatenation split of constraint `constraint` on `var`, naming the
    /// states the run crosses between consecutive operands.
    Split {
        var: String,
        constraint: usize,
        cut: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Eliminate { var: String, function: &'static str },
    Refuted { choices: Vec<Choice> },
    Satisfied { choices: Vec<Choice> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn refuted(&self) -> impl Iterator<Item = &Vec<Choice>> {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Refuted { choices } => Some(choices),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlOutcome {
    Sat(SlModel),
    Unsat,
}

#[derive(Clone)]
enum Pending {
    Asserted {
        id: usize,
        formula: RecognizableFormula,
    },
    Split {
        var: String,
        constraint: usize,
        automaton: ParametricAutomaton,
        cuts: Vec<(Vec<usize>, Vec<RegularConstraint>)>,
    },
}

#[derive(Clone, Default)]
struct State {
    regs: Vec<RegularConstraint>,
    pending: Vec<Pending>,
    choices: Vec<Choice>,
    /// Constraints each transduced variable carried when it was eliminated.
    targets: BTreeMap<String, Vec<ParametricAutomaton>>,
}

struct Search<'a> {
    program: &'a SlProgram,
    assignments: Vec<(&'a String, &'a FunApp)>,
    side: Guard,
    opts: &'a SolveOptions,
    trace: Trace,
    found: Option<SlModel>,
}

pub fn solve(p: &SlProgram) -> Result<SlOutcome, SlError> {
    Ok(solve_with(p, &SolveOptions::default())?.0)
}

pub fn solve_with(p: &SlProgram, opts: &SolveOptions) -> Result<(SlOutcome, Trace), SlError> {
    if let Some(y) = first_duplicate(p) {
        return Err(SlError::NotSsa(y));
    }
    let assignments = p
        .statements
        .iter()
        .filter_map(|s| match s {
            Statement::Assign(y, f) => Some((y, f)),
            _ => None,
        })
        .collect();
    let side = Guard::and(
        p.statements
            .iter()
            .filter_map(|s| match s {
                Statement::AssertElement(g) => Some(g.clone()),
                _ => None,
            })
            .collect(),
    );
    let pending = p
        .statements
        .iter()
        .filter_map(|s| match s {
            Statement::AssertRegular(r) => Some(r.clone()),
            _ => None,
        })
        .enumerate()
        .map(|(id, formula)| Pending::Asserted { id, formula })
        .collect();
    let mut search = Search {
        program: p,
        assignments,
        side,
        opts,
        trace: Trace::default(),
        found: None,
    };
    let k = search.assignments.len();
    search.dfs(
        k,
        State {
            pending,
            ..State::default()
        },
    )?;
    let outcome = match search.found {
        Some(m) => SlOutcome::Sat(m),
        None => SlOutcome::Unsat,
    };
    Ok((outcome, search.trace))
}

fn first_duplicate(p: &SlProgram) -> Option<String> {
    let mut seen = std::collections::BTreeSet::new();
    p.assigned().into_iter().find(|y| !seen.insert(*y)).cloned()
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.found.is_some() && !self.opts.explore_all
    }

    /// `k` assignments remain; the next to eliminate is `assignments[k-1]`.
    fn dfs(&mut self, k: usize, mut st: State) -> Result<(), SlError> {
        if self.done() {
            return Ok(());
        }
        let target = k.checked_sub(1).map(|i| self.assignments[i].0.clone());
        let due = st.pending.iter().position(|p| match p {
            Pending::Split { .. } => true,
            Pending::Asserted { formula, .. } => match &target {
                Some(y) => formula.mentions(y),
                None => true,
            },
        });
        if let Some(i) = due {
            let item = st.pending.remove(i);
            return self.branch(k, st, item);
        }
        let Some(y) = target else {
            return self.leaf(st);
        };
        let f = self.assignments[k - 1].1;
        let (mine, rest): (Vec<_>, Vec<_>) = std::mem::take(&mut st.regs)
            .into_iter()
            .partition(|c| c.var == y);
        st.regs = rest;
        let theory = self.program.theory;
        match f {
            FunApp::Transduce(t, x) => {
                self.trace.events.push(TraceEvent::Eliminate {
                    var: y.clone(),
                    function: "transduce",
                });
                let pre = match mine.split_first() {
                    None => t.domain(),
                    Some((first, others)) => {
                        let mut target = first.automaton.clone();
                        for c in others {
                            target = target.product(&c.automaton)?.trim();
                        }
                        t.preimage_with(&target, &self.opts.caps)?.trim()
                    }
                };
                st.regs.push(RegularConstraint {
                    var: x.clone(),
                    automaton: pre,
                });
                st.targets
                    .insert(y.clone(), mine.into_iter().map(|c| c.automaton).collect());
            }
            FunApp::Reverse(x) => {
                self.trace.events.push(TraceEvent::Eliminate {
                    var: y.clone(),
                    function: "reverse",
                });
                for c in mine {
                    st.regs.push(RegularConstraint {
                        var: x.clone(),
                        automaton: c.automaton.reverse(),
                    });
                }
            }
            FunApp::Concat(ops) => {
                self.trace.events.push(TraceEvent::Eliminate {
                    var: y.clone(),
                    function: "concat",
                });
                let names = operand_names(&y, ops);
                for (i, op) in ops.iter().enumerate() {
                    if let Operand::Seq(terms) = op {
                        let chain = literal_chain(theory, terms);
                        st.regs.push(RegularConstraint {
                            var: names[i].clone(),
                            automaton: chain,
                        });
                    }
                }
                for (ci, c) in mine.into_iter().enumerate() {
                    let cuts = split_cuts(&c.automaton, &names)?;
                    st.pending.push(Pending::Split {
                        var: y.clone(),
                        constraint: ci,
                        automaton: c.automaton,
                        cuts,
                    });
                }
            }
        }
        self.dfs(k - 1, st)
    }

    fn branch(&mut self, k: usize, st: State, item: Pending) -> Result<(), SlError> {
        match item {
            Pending::Asserted { id, formula } => {
                for (index, d) in formula.disjuncts.into_iter().enumerate() {
                    if self.done() {
                        break;
                    }
                    let mut next = st.clone();
                    next.regs.extend(d);
                    next.choices.push(Choice::Disjunct { formula: id, index });
                    self.dfs(k, next)?;
                }
            }
            Pending::Split {
                var,
                constraint,
                automaton,
                cuts,
            } => {
                for (cut, d) in cuts {
                    if self.done() {
                        break;
                    }
                    let mut next = st.clone();
                    next.regs.extend(d);
                    next.choices.push(Choice::Split {
                        var: var.clone(),
                        constraint,
                        cut: cut.iter().map(|q| automaton.states[*q].clone()).collect(),
                    });
                    self.dfs(k, next)?;
                }
            }
        }
        Ok(())
    }

    fn leaf(&mut self, st: State) -> Result<(), SlError> {
        let mut groups: BTreeMap<String, Vec<ParametricAutomaton>> = BTreeMap::new();
        for c in &st.regs {
            groups
                .entry(c.var.clone())
                .or_default()
                .push(c.automaton.clone());
        }
        let groups: Vec<(String, Vec<ParametricAutomaton>)> = groups.into_iter().collect();
        let witness = is_nonempty_with(self.program.theory, &groups, &self.side, &self.opts.caps)?;
        let Some(w) = witness else {
            self.trace.events.push(TraceEvent::Refuted {
                choices: st.choices,
            });
            return Ok(());
        };
        self.trace.events.push(TraceEvent::Satisfied {
            choices: st.choices.clone(),
        });
        if self.found.is_none() {
            self.found = Some(self.rebuild(w.model, w.words, &st)?);
        }
        Ok(())
    }

    /// Runs the program forward from the witness words of the free
    /// variables, then replays every statement.
    fn rebuild(
        &self,
        params: Model,
        mut words: BTreeMap<String, Vec<Value>>,
        st: &State,
    ) -> Result<SlModel, SlError> {
        for (y, f) in &self.assignments {
            let value = match f {
                FunApp::Concat(ops) => {
                    let mut out = Vec::new();
                    for op in ops {
                        match op {
                            Operand::Var(x) => {
                                out.extend(words.get(x).cloned().unwrap_or_default())
                            }
                            Operand::Seq(terms) => {
                                for t in terms {
                                    out.push(eval_term(t, &params)?);
                                }
                            }
                        }
                    }
                    out
                }
                FunApp::Reverse(x) => {
                    let mut w = words.get(x).cloned().unwrap_or_default();
                    w.reverse();
                    w
                }
                FunApp::Transduce(t, x) => {
                    let input = words.get(x).cloned().unwrap_or_default();
                    let wanted = st.targets.get(*y).map(Vec::as_slice).unwrap_or(&[]);
                    let mut chosen = None;
                    for o in t.apply(&params, &input)? {
                        let mut ok = true;
                        for a in wanted {
                            ok &= a.accepts(&params, &o)?;
                        }
                        if ok {
                            chosen = Some(o);
                            break;
                        }
                    }
                    chosen.ok_or_else(|| {
                        SlError::Replay(format!("no output of the transducer for `{y}` fits"))
                    })?
                }
            };
            words.insert((*y).clone(), value);
        }
        words.retain(|x, _| !x.contains('#'));
        for x in self.program.variables() {
            words.entry(x).or_default();
        }
        let model = SlModel { params, words };
        replay(self.program, &model)?;
        Ok(model)
    }
}

/// Checks a model against every statement of the program.
pub(crate) fn replay(p: &SlProgram, m: &SlModel) -> Result<(), SlError> {
    let word = |x: &String| m.words.get(x).cloned().unwrap_or_default();
    for s in &p.statements {
        match s {
            Statement::Assign(y, f) => {
                let ok = match f {
                    FunApp::Concat(ops) => {
                        let mut out = Vec::new();
                        for op in ops {
                            match op {
                                Operand::Var(x) => out.extend(word(x)),
                                Operand::Seq(ts) => {
                                    for t in ts {
                                        out.push(eval_term(t, &m.params)?);
                                    }
                                }
                            }
                        }
                        out == word(y)
                    }
                    FunApp::Reverse(x) => word(x).into_iter().rev().collect::<Vec<_>>() == word(y),
                    FunApp::Transduce(t, x) => t.apply(&m.params, &word(x))?.contains(&word(y)),
                };
                if !ok {
                    return Err(SlError::Replay(format!(
                        "assignment to `{y}` does not hold"
                    )));
                }
            }
            Statement::AssertRegular(r) => {
                if !r.holds(&m.params, &m.words)? {
                    return Err(SlError::Replay("a regular assertion fails".into()));
                }
            }
            Statement::AssertElement(g) => {
                let zero = Value::from_integer(0.into());
                if !g
                    .eval(&zero, &m.params)
                    .map_err(crate::automata::AutomataError::from)?
                {
                    return Err(SlError::Replay(format!("element assertion {g} fails")));
                }
            }
        }
    }
    Ok(())
}

fn eval_term(t: &LinExpr, m: &Model) -> Result<Value, SlError> {
    t.eval(m).map_err(|e| SlError::Automata(e.into()))
}

fn operand_names(y: &str, ops: &[Operand]) -> Vec<String> {
    ops.iter()
        .enumerate()
        .map(|(i, o)| match o {
            Operand::Var(x) => x.clone(),
            Operand::Seq(_) => format!("{y}#lit{i}"),
        })
        .collect()
}

/// Accepts exactly the sequence denoted by `terms`.
pub(crate) fn literal_chain(
    theory: crate::theory::TheoryKind,
    terms: &[LinExpr],
) -> ParametricAutomaton {
    let mut params: Vec<String> = Vec::new();
    for t in terms {
        for v in t.vars() {
            if !params.contains(v) {
                params.push(v.clone());
            }
        }
    }
    ParametricAutomaton {
        theory,
        params,
        states: (0..=terms.len()).map(|i| format!("c{i}")).collect(),
        transitions: terms
            .iter()
            .enumerate()
            .map(|(i, t)| Transition {
                src: i,
                guard: Guard::eq(LinExpr::curr(), t.clone()),
                dst: i + 1,
            })
            .collect(),
        initial: 0,
        finals: [terms.len()].into(),
    }
}

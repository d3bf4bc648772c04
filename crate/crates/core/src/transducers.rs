//! Parametric transducers and their pre-image construction.
//!
//! A transition reads one letter, checks its guard, and emits a sequence of
//! terms evaluated with `curr` bound to the letter just read. Transducers
//! are relational: [`ParametricTransducer::apply`] collects the outputs of
//! every accepting run.

use std::collections::{BTreeMap, BTreeSet};

use crate::automata::{
    merge_params, AutomataError, Caps, ParametricAutomaton, StateId, Transition,
};
use crate::theory::{self, Guard, LinExpr, Model, TheoryError, TheoryKind, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtTransition {
    pub src: StateId,
    pub guard: Guard,
    pub output: Vec<LinExpr>,
    pub dst: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricTransducer {
    pub theory: TheoryKind,
    pub params: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<PtTransition>,
    pub initial: StateId,
    pub finals: BTreeSet<StateId>,
}

impl ParametricTransducer {
    pub fn new(
        theory: TheoryKind,
        params: Vec<String>,
        states: Vec<String>,
        transitions: Vec<PtTransition>,
        initial: StateId,
        finals: BTreeSet<StateId>,
    ) -> Result<Self, AutomataError> {
        let t = ParametricTransducer {
            theory,
            params,
            states,
            transitions,
            initial,
            finals,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn from_named(
        theory: TheoryKind,
        params: &[&str],
        states: &[&str],
        transitions: Vec<(&str, Guard, Vec<LinExpr>, &str)>,
        initial: &str,
        finals: &[&str],
    ) -> Result<Self, AutomataError> {
        let idx = |n: &str| {
            states
                .iter()
                .position(|s| *s == n)
                .ok_or_else(|| AutomataError::UnknownState(n.to_string()))
        };
        let transitions = transitions
            .into_iter()
            .map(|(s, guard, output, d)| {
                Ok(PtTransition {
                    src: idx(s)?,
                    guard,
                    output,
                    dst: idx(d)?,
                })
            })
            .collect::<Result<Vec<_>, AutomataError>>()?;
        let finals = finals.iter().map(|f| idx(f)).collect::<Result<_, _>>()?;
        Self::new(
            theory,
            params.iter().map(|p| p.to_string()).collect(),
            states.iter().map(|s| s.to_string()).collect(),
            transitions,
            idx(initial)?,
            finals,
        )
    }

    /// The guard-only automaton underneath (its language is the domain).
    pub fn domain(&self) -> ParametricAutomaton {
        ParametricAutomaton {
            theory: self.theory,
            params: self.params.clone(),
            states: self.states.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    src: t.src,
                    guard: t.guard.clone(),
                    dst: t.dst,
                })
                .collect(),
            initial: self.initial,
            finals: self.finals.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), AutomataError> {
        self.domain().validate()?;
        let declared: BTreeSet<&String> = self.params.iter().collect();
        for t in &self.transitions {
            for term in &t.output {
                check_term(self.theory, term)?;
                if let Some(p) = term
                    .vars()
                    .find(|v| *v != theory::CURR && !declared.contains(v))
                {
                    return Err(AutomataError::UndeclaredParam(p.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, m: &Model, w: &[Value]) -> Result<BTreeSet<Vec<Value>>, AutomataError> {
        if let Some(p) = self.params.iter().find(|p| !m.contains_key(*p)) {
            return Err(TheoryError::UnboundSymbol(p.clone()).into());
        }
        let mut configs: BTreeSet<(StateId, Vec<Value>)> = [(self.initial, vec![])].into();
        for letter in w {
            let mut next = BTreeSet::new();
            for (q, out) in &configs {
                for t in self.transitions.iter().filter(|t| t.src == *q) {
                    if !t.guard.eval(letter, m)? {
                        continue;
                    }
                    let mut o = out.clone();
                    for term in &t.output {
                        o.push(term.eval_at(letter, m)?);
                    }
                    next.insert((t.dst, o));
                }
            }
            configs = next;
        }
        Ok(configs
            .into_iter()
            .filter(|(q, _)| self.finals.contains(q))
            .map(|(_, o)| o)
            .collect())
    }

    pub fn preimage(&self, a: &ParametricAutomaton) -> Result<ParametricAutomaton, AutomataError> {
        self.preimage_with(a, &Caps::default())
    }

    /// The automaton of inputs with some output accepted by `a`, over the
    /// states `T.states × A.states`.
    pub fn preimage_with(
        &self,
        a: &ParametricAutomaton,
        caps: &Caps,
    ) -> Result<ParametricAutomaton, AutomataError> {
        if self.theory != a.theory {
            return Err(TheoryError::TheoryMismatch(format!(
                "{} transducer applied to a {} automaton",
                self.theory, a.theory
            ))
            .into());
        }
        let na = a.states.len();
        let pair = |q: StateId, p: StateId| q * na + p;
        let mut paths = PathMemo {
            a,
            memo: BTreeMap::new(),
            count: 0,
            cap: caps.max_paths,
        };
        let mut transitions = Vec::new();
        for t in &self.transitions {
            for start in 0..na {
                for (guards, end) in paths.get(start, t.output.len())? {
                    let mut parts = vec![t.guard.clone()];
                    parts.extend(guards.iter().zip(&t.output).map(|(g, w)| g.substitute(w)));
                    let guard = Guard::and(parts);
                    if guard == Guard::False || !theory::guard_is_sat(self.theory, &guard)? {
                        continue;
                    }
                    transitions.push(Transition {
                        src: pair(t.src, start),
                        guard,
                        dst: pair(t.dst, end),
                    });
                }
            }
        }
        let mut states = Vec::with_capacity(self.states.len() * na);
        for q in &self.states {
            for p in &a.states {
                states.push(format!("{q}.{p}"));
            }
        }
        let finals = self
            .finals
            .iter()
            .flat_map(|q| a.finals.iter().map(move |p| pair(*q, *p)))
            .collect();
        Ok(ParametricAutomaton {
            theory: self.theory,
            params: merge_params(&self.params, &a.params),
            states,
            transitions,
            initial: pair(self.initial, a.initial),
            finals,
        })
    }
}

type Path = (Vec<Guard>, StateId);

/// Length-`n` paths of an automaton, memoized per start state and length.
struct PathMemo<'a> {
    a: &'a ParametricAutomaton,
    memo: BTreeMap<(StateId, usize), Vec<Path>>,
    count: usize,
    cap: usize,
}

impl PathMemo<'_> {
    fn get(&mut self, start: StateId, n: usize) -> Result<Vec<Path>, AutomataError> {
        if let Some(p) = self.memo.get(&(start, n)) {
            return Ok(p.clone());
        }
        let paths = if n == 0 {
            vec![(vec![], start)]
        } else {
            let mut out = Vec::new();
            for t in self.a.outgoing(start) {
                for (mut rest, end) in self.get(t.dst, n - 1)? {
                    rest.insert(0, t.guard.clone());
                    out.push((rest, end));
                }
            }
            out
        };
        self.count += paths.len();
        if self.count > self.cap {
            return Err(AutomataError::PathBlowup(self.cap));
        }
        self.memo.insert((start, n), paths.clone());
        Ok(paths)
    }
}

fn check_term(theory: TheoryKind, t: &LinExpr) -> Result<(), TheoryError> {
    let ok = match theory {
        TheoryKind::Eq => {
            let cs: Vec<_> = t.coeffs().values().collect();
            match cs.as_slice() {
                [] => true,
                [c] => num_traits::One::is_one(*c) && num_traits::Zero::is_zero(t.constant_term()),
                _ => false,
            }
        }
        TheoryKind::Lra => true,
        TheoryKind::Lia => t.is_integral(),
    };
    if ok {
        Ok(())
    } else {
        Err(TheoryError::TheoryMismatch(format!(
            "output term {t} outside the {theory} signature"
        )))
    }
}

//! Parametric automata: symbolic automata whose guards mention read-only
//! parameters fixed once per run.

mod complement;
mod emptiness;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::theory::{self, Guard, Model, TheoryError, TheoryKind, Value};

pub use emptiness::{equiv, includes, is_nonempty, is_nonempty_with, EmptinessWitness, Inclusion};

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub src: StateId,
    pub guard: Guard,
    pub dst: StateId,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AutomataError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("parameter `{0}` is not declared by the automaton")]
    UndeclaredParam(String),
    #[error("state cap of {0} exceeded")]
    StateBlowup(usize),
    #[error("path cap of {0} exceeded")]
    PathBlowup(usize),
    #[error("{0}")]
    Invalid(String),
}

/// Resource limits for the constructions that can blow up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_states: usize,
    pub max_paths: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_states: 100_000,
            max_paths: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricAutomaton {
    pub theory: TheoryKind,
    pub params: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
    pub initial: StateId,
    pub finals: BTreeSet<StateId>,
}

/// A sequence variable constrained to the language of an automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularConstraint {
    pub var: String,
    pub automaton: ParametricAutomaton,
}

impl ParametricAutomaton {
    /// Validating constructor.
    pub fn new(
        theory: TheoryKind,
        params: Vec<String>,
        states: Vec<String>,
        transitions: Vec<Transition>,
        initial: StateId,
        finals: BTreeSet<StateId>,
    ) -> Result<Self, AutomataError> {
        let a = ParametricAutomaton {
            theory,
            params,
            states,
            transitions,
            initial,
            finals,
        };
        a.validate()?;
        Ok(a)
    }

    /// Builds an automaton from named states.
    pub fn from_named(
        theory: TheoryKind,
        params: &[&str],
        states: &[&str],
        transitions: Vec<(&str, Guard, &str)>,
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
            .map(|(s, g, d)| {
                Ok(Transition {
                    src: idx(s)?,
                    guard: g,
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

    /// One state, initial and final, looping on `true`.
    pub fn universal(theory: TheoryKind) -> Self {
        ParametricAutomaton {
            theory,
            params: vec![],
            states: vec!["u".into()],
            transitions: vec![Transition {
                src: 0,
                guard: Guard::True,
                dst: 0,
            }],
            initial: 0,
            finals: [0].into(),
        }
    }

    /// One non-final state and no transitions.
    pub fn empty(theory: TheoryKind) -> Self {
        ParametricAutomaton {
            theory,
            params: vec![],
            states: vec!["e".into()],
            transitions: vec![],
            initial: 0,
            finals: BTreeSet::new(),
        }
    }

    pub fn validate(&self) -> Result<(), AutomataError> {
        let n = self.states.len();
        if self.initial >= n {
            return Err(AutomataError::Invalid(format!(
                "initial state {} out of range",
                self.initial
            )));
        }
        if let Some(f) = self.finals.iter().find(|f| **f >= n) {
            return Err(AutomataError::Invalid(format!(
                "final state {f} out of range"
            )));
        }
        let declared: BTreeSet<&String> = self.params.iter().collect();
        for t in &self.transitions {
            if t.src >= n || t.dst >= n {
                return Err(AutomataError::Invalid(
                    "transition endpoint out of range".into(),
                ));
            }
            t.guard.check_theory(self.theory)?;
            if let Some(p) = t.guard.params().iter().find(|p| !declared.contains(p)) {
                return Err(AutomataError::UndeclaredParam(p.clone()));
            }
        }
        Ok(())
    }

    pub fn state_id(&self, name: &str) -> Result<StateId, AutomataError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| AutomataError::UnknownState(name.to_string()))
    }

    pub fn outgoing(&self, q: StateId) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.src == q)
    }

    pub fn atoms(&self) -> BTreeSet<theory::Atom> {
        self.transitions
            .iter()
            .flat_map(|t| t.guard.atoms())
            .collect()
    }

    fn check_bound(&self, m: &Model) -> Result<(), AutomataError> {
        match self.params.iter().find(|p| !m.contains_key(*p)) {
            Some(p) => Err(TheoryError::UnboundSymbol(p.clone()).into()),
            None => Ok(()),
        }
    }

    /// Runs over `w` under `m`, tracking the set of reachable states.
    pub fn accepts(&self, m: &Model, w: &[Value]) -> Result<bool, AutomataError> {
        self.check_bound(m)?;
        let mut current: BTreeSet<StateId> = [self.initial].into();
        for letter in w {
            let mut next = BTreeSet::new();
            for t in &self.transitions {
                if current.contains(&t.src) && !next.contains(&t.dst) && t.guard.eval(letter, m)? {
                    next.insert(t.dst);
                }
            }
            if next.is_empty() {
                return Ok(false);
            }
            current = next;
        }
        Ok(current.iter().any(|q| self.finals.contains(q)))
    }

    pub fn restrict(
        &self,
        start: StateId,
        finals: BTreeSet<StateId>,
    ) -> Result<Self, AutomataError> {
        if start >= self.states.len() {
            return Err(AutomataError::UnknownState(start.to_string()));
        }
        if let Some(f) = finals.iter().find(|f| **f >= self.states.len()) {
            return Err(AutomataError::UnknownState(f.to_string()));
        }
        Ok(ParametricAutomaton {
            initial: start,
            finals,
            ..self.clone()
        })
    }

    pub fn restrict_named(&self, start: &str, finals: &[&str]) -> Result<Self, AutomataError> {
        let finals = finals
            .iter()
            .map(|f| self.state_id(f))
            .collect::<Result<_, _>>()?;
        self.restrict(self.state_id(start)?, finals)
    }

    /// Synchronous product; parameters with equal names are shared.
    /// Transitions whose combined guard is unsatisfiable are dropped.
    pub fn product(&self, other: &Self) -> Result<Self, AutomataError> {
        same_theory(self, other)?;
        let nb = other.states.len();
        let pair = |p: StateId, q: StateId| p * nb + q;
        let mut states = Vec::with_capacity(self.states.len() * nb);
        for p in &self.states {
            for q in &other.states {
                states.push(format!("{p}.{q}"));
            }
        }
        let mut transitions = Vec::new();
        for ta in &self.transitions {
            for tb in &other.transitions {
                let guard = Guard::and(vec![ta.guard.clone(), tb.guard.clone()]);
                if guard == Guard::False || !theory::guard_is_sat(self.theory, &guard)? {
                    continue;
                }
                transitions.push(Transition {
                    src: pair(ta.src, tb.src),
                    guard,
                    dst: pair(ta.dst, tb.dst),
                });
            }
        }
        let finals = self
            .finals
            .iter()
            .flat_map(|p| other.finals.iter().map(move |q| pair(*p, *q)))
            .collect();
        Ok(ParametricAutomaton {
            theory: self.theory,
            params: merge_params(&self.params, &other.params),
            states,
            transitions,
            initial: pair(self.initial, other.initial),
            finals,
        })
    }

    /// Disjoint union with a fresh initial state that copies the outgoing
    /// transitions of both initial states.
    pub fn union(&self, other: &Self) -> Result<Self, AutomataError> {
        same_theory(self, other)?;
        let off = self.states.len();
        let init = off + other.states.len();
        let mut states: Vec<String> = self.states.iter().map(|s| format!("l.{s}")).collect();
        states.extend(other.states.iter().map(|s| format!("r.{s}")));
        states.push("init".into());
        let mut transitions: Vec<Transition> = self.transitions.clone();
        transitions.extend(other.transitions.iter().map(|t| Transition {
            src: t.src + off,
            guard: t.guard.clone(),
            dst: t.dst + off,
        }));
        for t in self.outgoing(self.initial) {
            transitions.push(Transition {
                src: init,
                guard: t.guard.clone(),
                dst: t.dst,
            });
        }
        for t in other.outgoing(other.initial) {
            transitions.push(Transition {
                src: init,
                guard: t.guard.clone(),
                dst: t.dst + off,
            });
        }
        let mut finals: BTreeSet<StateId> = self.finals.clone();
        finals.extend(other.finals.iter().map(|f| f + off));
        if self.finals.contains(&self.initial) || other.finals.contains(&other.initial) {
            finals.insert(init);
        }
        Ok(ParametricAutomaton {
            theory: self.theory,
            params: merge_params(&self.params, &other.params),
            states,
            transitions,
            initial: init,
            finals,
        })
    }

    /// Mirror image: flipped transitions, a fresh initial state standing in
    /// for all former finals, and the former initial as the only final.
    pub fn reverse(&self) -> Self {
        let init = self.states.len();
        let mut states = self.states.clone();
        states.push("rev".into());
        let mut transitions: Vec<Transition> = self
            .transitions
            .iter()
            .map(|t| Transition {
                src: t.dst,
                guard: t.guard.clone(),
                dst: t.src,
            })
            .collect();
        for t in &self.transitions {
            if self.finals.contains(&t.dst) {
                transitions.push(Transition {
                    src: init,
                    guard: t.guard.clone(),
                    dst: t.src,
                });
            }
        }
        let mut finals: BTreeSet<StateId> = [self.initial].into();
        if self.finals.contains(&self.initial) {
            finals.insert(init);
        }
        ParametricAutomaton {
            theory: self.theory,
            params: self.params.clone(),
            states,
            transitions,
            initial: init,
            finals,
        }
    }

    pub fn complement(&self) -> Result<Self, AutomataError> {
        complement::complement(self, &Caps::default())
    }

    pub fn complement_with(&self, caps: &Caps) -> Result<Self, AutomataError> {
        complement::complement(self, caps)
    }

    /// Renames parameters; `curr` is untouched.
    pub fn rename_params(&self, map: &dyn Fn(&str) -> String) -> Self {
        let rename = |v: &str| {
            if v == theory::CURR {
                v.to_string()
            } else {
                map(v)
            }
        };
        ParametricAutomaton {
            params: self.params.iter().map(|p| map(p)).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    src: t.src,
                    guard: t.guard.rename(&rename),
                    dst: t.dst,
                })
                .collect(),
            ..self.clone()
        }
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> BTreeSet<StateId> {
        let mut seen: BTreeSet<StateId> = [self.initial].into();
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for t in self.outgoing(q) {
                if seen.insert(t.dst) {
                    stack.push(t.dst);
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub fn coreachable(&self) -> BTreeSet<StateId> {
        let mut seen: BTreeSet<StateId> = self.finals.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for t in &self.transitions {
                if seen.contains(&t.dst) && seen.insert(t.src) {
                    changed = true;
                }
            }
        }
        seen
    }

    /// Drops states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> Self {
        let live: BTreeSet<StateId> = self
            .reachable()
            .intersection(&self.coreachable())
            .copied()
            .chain([self.initial])
            .collect();
        let index: BTreeMap<StateId, StateId> =
            live.iter().enumerate().map(|(i, q)| (*q, i)).collect();
        ParametricAutomaton {
            theory: self.theory,
            params: self.params.clone(),
            states: live.iter().map(|q| self.states[*q].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .filter(|t| index.contains_key(&t.src) && index.contains_key(&t.dst))
                .map(|t| Transition {
                    src: index[&t.src],
                    guard: t.guard.clone(),
                    dst: index[&t.dst],
                })
                .collect(),
            initial: index[&self.initial],
            finals: self
                .finals
                .iter()
                .filter_map(|f| index.get(f).copied())
                .collect(),
        }
    }
}

fn same_theory(a: &ParametricAutomaton, b: &ParametricAutomaton) -> Result<(), AutomataError> {
    if a.theory == b.theory {
        Ok(())
    } else {
        Err(TheoryError::TheoryMismatch(format!(
            "{} automaton combined with {}",
            a.theory, b.theory
        ))
        .into())
    }
}

pub(crate) fn merge_params(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    for p in b {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

impl fmt::Display for ParametricAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "params: {}", self.params.join(" "))?;
        writeln!(f, "init: {}", self.states[self.initial])?;
        let finals: Vec<&str> = self
            .finals
            .iter()
            .map(|q| self.states[*q].as_str())
            .collect();
        writeln!(f, "final: {}", finals.join(" "))?;
        for t in &self.transitions {
            writeln!(
                f,
                "  {} -> {} : {}",
                self.states[t.src], self.states[t.dst], t.guard
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod fixtures;

#[cfg(test)]
mod tests;

#[cfg(test)]
pub(crate) mod props;

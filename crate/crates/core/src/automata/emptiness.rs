use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{AutomataError, Caps, ParametricAutomaton, StateId};
use crate::theory::{self, Conjunction, Guard, LinExpr, Literal, Model, TheoryKind, Value, CURR};

/// Parameter values plus one word per constrained variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptinessWitness {
    pub model: Model,
    pub words: BTreeMap<String, Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    /// A word of the left language outside the right one, with the
    /// parameter values that separate them.
    Witness {
        model: Model,
        word: Vec<Value>,
    },
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }
}

struct Group {
    var: String,
    pa: ParametricAutomaton,
    live: BTreeSet<StateId>,
    /// Outgoing transition indices per state.
    out: Vec<Vec<usize>>,
    dnf: Vec<Vec<Conjunction>>,
}

struct Search<'a> {
    theory: TheoryKind,
    groups: Vec<Group>,
    params: BTreeSet<String>,
    caps: &'a Caps,
    combos: usize,
    lens: Vec<usize>,
}

fn letter_var(group: usize, pos: usize) -> String {
    format!("curr@{group}.{pos}")
}

/// Joint nonemptiness of per-variable intersections, with parameters
/// shared by name across all groups.
pub fn is_nonempty(
    groups: &[(String, Vec<ParametricAutomaton>)],
    caps: &Caps,
) -> Result<Option<EmptinessWitness>, AutomataError> {
    let theory = groups
        .iter()
        .flat_map(|(_, pas)| pas.first())
        .map(|a| a.theory)
        .next()
        .unwrap_or(TheoryKind::Eq);
    is_nonempty_with(theory, groups, &Guard::True, caps)
}

/// As [`is_nonempty`], additionally requiring the parameter constraint
/// `side`.
pub fn is_nonempty_with(
    theory: TheoryKind,
    groups: &[(String, Vec<ParametricAutomaton>)],
    side: &Guard,
    caps: &Caps,
) -> Result<Option<EmptinessWitness>, AutomataError> {
    side.check_theory(theory)?;
    let mut params: BTreeSet<String> = side.params();
    let mut built = Vec::with_capacity(groups.len());
    let mut names = BTreeSet::new();
    for (var, pas) in groups {
        if !names.insert(var.clone()) {
            return Err(AutomataError::Invalid(format!(
                "variable `{var}` heads two groups"
            )));
        }
        let mut pa = ParametricAutomaton::universal(theory);
        for a in pas {
            if a.theory != theory {
                return Err(theory::TheoryError::TheoryMismatch(format!(
                    "{} automaton in a {} problem",
                    a.theory, theory
                ))
                .into());
            }
            pa = pa.product(a)?.trim();
            if pa.states.len() > caps.max_states {
                return Err(AutomataError::StateBlowup(caps.max_states));
            }
        }
        params.extend(pa.params.iter().cloned());
        let live = pa.coreachable();
        let mut out = vec![Vec::new(); pa.states.len()];
        for (i, t) in pa.transitions.iter().enumerate() {
            out[t.src].push(i);
        }
        let dnf = pa.transitions.iter().map(|t| t.guard.to_dnf()).collect();
        built.push(Group {
            var: var.clone(),
            pa,
            live,
            out,
            dnf,
        });
    }

    let mut search = Search {
        theory,
        groups: built,
        params,
        caps,
        combos: 0,
        lens: Vec::new(),
    };
    for side_conj in side.to_dnf() {
        if let Some(w) = search.group(0, side_conj)? {
            debug_assert!(groups.iter().all(|(v, pas)| pas
                .iter()
                .all(|a| a.accepts(&w.model, &w.words[v]).unwrap_or(false))));
            return Ok(Some(w));
        }
    }
    Ok(None)
}

impl Search<'_> {
    fn group(
        &mut self,
        gi: usize,
        acc: Vec<Literal>,
    ) -> Result<Option<EmptinessWitness>, AutomataError> {
        if gi == self.groups.len() {
            return self.finish(&acc);
        }
        if self.groups[gi].live.contains(&self.groups[gi].pa.initial) {
            let mut on_path = vec![false; self.groups[gi].pa.states.len()];
            let init = self.groups[gi].pa.initial;
            on_path[init] = true;
            let mut seen = HashSet::new();
            let mut acc = acc;
            let mut steps = Vec::new();
            self.path(gi, init, &mut on_path, &mut acc, &mut steps, &mut seen)
        } else {
            Ok(None)
        }
    }

    fn path(
        &mut self,
        gi: usize,
        q: StateId,
        on_path: &mut Vec<bool>,
        acc: &mut Vec<Literal>,
        steps: &mut Vec<Conjunction>,
        seen: &mut HashSet<Vec<Conjunction>>,
    ) -> Result<Option<EmptinessWitness>, AutomataError> {
        if self.groups[gi].pa.finals.contains(&q) {
            let mut key = steps.clone();
            key.sort();
            if seen.insert(key) {
                self.combos += 1;
                if self.combos > self.caps.max_paths {
                    return Err(AutomataError::PathBlowup(self.caps.max_paths));
                }
                self.lens.push(steps.len());
                let found = self.group(gi + 1, acc.clone())?;
                self.lens.pop();
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        let pos = steps.len();
        let letter = LinExpr::var(letter_var(gi, pos));
        for ti in self.groups[gi].out[q].clone() {
            let dst = self.groups[gi].pa.transitions[ti].dst;
            if on_path[dst] || !self.groups[gi].live.contains(&dst) {
                continue;
            }
            for conj in self.groups[gi].dnf[ti].clone() {
                let mark = acc.len();
                acc.extend(conj.iter().map(|l| l.substitute(CURR, &letter)));
                if theory::is_sat(self.theory, acc)? {
                    on_path[dst] = true;
                    steps.push(conj);
                    let found = self.path(gi, dst, on_path, acc, steps, seen)?;
                    steps.pop();
                    on_path[dst] = false;
                    if found.is_some() {
                        acc.truncate(mark);
                        return Ok(found);
                    }
                }
                acc.truncate(mark);
            }
        }
        Ok(None)
    }

    fn finish(&mut self, acc: &[Literal]) -> Result<Option<EmptinessWitness>, AutomataError> {
        let mut vars = self.params.clone();
        for (gi, len) in self.lens.iter().enumerate() {
            vars.extend((0..*len).map(|j| letter_var(gi, j)));
        }
        let Some(m) = theory::sat_conjunction(self.theory, acc, &vars)? else {
            return Ok(None);
        };
        let model = self
            .params
            .iter()
            .map(|p| (p.clone(), m[p].clone()))
            .collect();
        let words = self
            .groups
            .iter()
            .zip(&self.lens)
            .enumerate()
            .map(|(gi, (g, len))| {
                (
                    g.var.clone(),
                    (0..*len).map(|j| m[&letter_var(gi, j)].clone()).collect(),
                )
            })
            .collect();
        Ok(Some(EmptinessWitness { model, words }))
    }
}

/// Parameter-synchronized inclusion `L(a) ⊆ L(b)`.
pub fn includes(
    a: &ParametricAutomaton,
    b: &ParametricAutomaton,
    caps: &Caps,
) -> Result<Inclusion, AutomataError> {
    let diff = a.product(&b.complement_with(caps)?)?;
    let groups = vec![("w".to_string(), vec![diff])];
    Ok(
        match is_nonempty_with(a.theory, &groups, &Guard::True, caps)? {
            None => Inclusion::Holds,
            Some(mut w) => Inclusion::Witness {
                model: w.model,
                word: w.words.remove("w").unwrap(),
            },
        },
    )
}

pub fn equiv(
    a: &ParametricAutomaton,
    b: &ParametricAutomaton,
    caps: &Caps,
) -> Result<Inclusion, AutomataError> {
    match includes(a, b, caps)? {
        Inclusion::Holds => includes(b, a, caps),
        w => Ok(w),
    }
}

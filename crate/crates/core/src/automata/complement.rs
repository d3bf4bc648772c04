use std::collections::{BTreeMap, BTreeSet};

use super::{AutomataError, Caps, ParametricAutomaton, StateId, Transition};
use crate::theory::{self, Atom, Guard};

/// Subset construction over minterms, computed locally for the atoms of
/// the transitions leaving each subset. The empty subset is the sink.
pub(super) fn complement(
    a: &ParametricAutomaton,
    caps: &Caps,
) -> Result<ParametricAutomaton, AutomataError> {
    let mut index: BTreeMap<BTreeSet<StateId>, StateId> = BTreeMap::new();
    let mut subsets: Vec<BTreeSet<StateId>> = Vec::new();
    let mut transitions = Vec::new();

    let start: BTreeSet<StateId> = [a.initial].into();
    index.insert(start.clone(), 0);
    subsets.push(start);

    let mut next = 0;
    while next < subsets.len() {
        let current = subsets[next].clone();
        let src = next;
        next += 1;

        let edges: Vec<&Transition> = a
            .transitions
            .iter()
            .filter(|t| current.contains(&t.src))
            .collect();
        let atoms: BTreeSet<Atom> = edges.iter().flat_map(|t| t.guard.atoms()).collect();
        for minterm in theory::minterms(a.theory, atoms.iter())? {
            // The minterm fixes every atom's truth value, so entailment of
            // an edge guard reduces to evaluating it under those signs.
            let sign: BTreeMap<&Atom, bool> =
                minterm.iter().map(|l| (&l.atom, l.positive)).collect();
            let target: BTreeSet<StateId> = edges
                .iter()
                .filter(|t| t.guard.eval_with(&|atom| sign[atom]))
                .map(|t| t.dst)
                .collect();
            let dst = match index.get(&target) {
                Some(d) => *d,
                None => {
                    if subsets.len() >= caps.max_states {
                        return Err(AutomataError::StateBlowup(caps.max_states));
                    }
                    let d = subsets.len();
                    index.insert(target.clone(), d);
                    subsets.push(target);
                    d
                }
            };
            transitions.push(Transition {
                src,
                guard: Guard::from_conjunction(&minterm),
                dst,
            });
        }
    }

    let states = subsets
        .iter()
        .map(|s| {
            let names: Vec<&str> = s.iter().map(|q| a.states[*q].as_str()).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect();
    let finals = subsets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_disjoint(&a.finals))
        .map(|(i, _)| i)
        .collect();
    Ok(ParametricAutomaton {
        theory: a.theory,
        params: a.params.clone(),
        states,
        transitions,
        initial: 0,
        finals,
    })
}

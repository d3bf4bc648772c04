//! Parameter localization.
//!
//! The type reduction treats the parameters of each regular constraint as
//! its own. Parameters that several constraints share, that element guards
//! mention, or that occur in equation constants are therefore moved into
//! the string: a fresh prefix variable `#y` holds one letter per shared
//! parameter, and every constraint that needs them reads that prefix first
//! and binds private copies with `curr = p#tag`.

use std::collections::{BTreeMap, BTreeSet};

use crate::automata::{ParametricAutomaton, RegularConstraint, Transition};
use crate::theory::{self, Guard, LinExpr, Model, Value};
use crate::wordeq::{EquationalConstraint, Sym, WordEqProblem};

pub const PREFIX: &str = "#y";

#[derive(Clone, Debug)]
pub struct Localized {
    pub problem: WordEqProblem,
    /// `#y[j]` carries the value of `shared[j]`.
    pub shared: Vec<String>,
}

impl Localized {
    /// Maps a solution of the localized problem back to the original
    /// parameters and sequence variables.
    pub fn restore(
        &self,
        params: &Model,
        words: &BTreeMap<String, Vec<Value>>,
    ) -> (Model, BTreeMap<String, Vec<Value>>) {
        let mut m: Model = params
            .iter()
            .filter(|(k, _)| !k.contains('#'))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        if let Some(y) = words.get(PREFIX) {
            for (p, v) in self.shared.iter().zip(y) {
                m.insert(p.clone(), v.clone());
            }
        }
        let w = words
            .iter()
            .filter(|(k, _)| !k.starts_with('#'))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        (m, w)
    }
}

fn copy(p: &str, tag: &str) -> String {
    format!("{p}#{tag}")
}

/// Reads the `k` prefix letters, binding `shared[j]#tag` where `used`,
/// then continues as `body` (or accepts when `body` is `None`). `last`
/// is conjoined to the final prefix transition.
fn chain(
    theory: theory::TheoryKind,
    shared: &[String],
    used: &BTreeSet<String>,
    tag: &str,
    last: Guard,
    body: Option<&ParametricAutomaton>,
) -> ParametricAutomaton {
    let k = shared.len();
    let mut params: Vec<String> = shared
        .iter()
        .filter(|p| used.contains(*p))
        .map(|p| copy(p, tag))
        .collect();
    let mut states: Vec<String> = (0..k).map(|j| format!("#c{j}")).collect();
    let mut transitions = Vec::new();
    let (entry, finals) = match body {
        Some(a) => {
            let off = k;
            states.extend(a.states.iter().cloned());
            for p in &a.params {
                if !params.contains(p) {
                    params.push(p.clone());
                }
            }
            transitions.extend(a.transitions.iter().map(|t| Transition {
                src: t.src + off,
                guard: t.guard.clone(),
                dst: t.dst + off,
            }));
            (a.initial + off, a.finals.iter().map(|f| f + off).collect())
        }
        None => {
            states.push(format!("#c{k}"));
            (k, [k].into())
        }
    };
    for (j, p) in shared.iter().enumerate() {
        let mut g = if used.contains(p) {
            Guard::eq(LinExpr::curr(), LinExpr::var(copy(p, tag)))
        } else {
            Guard::True
        };
        if j + 1 == k {
            g = Guard::and(vec![g, last.clone()]);
        }
        let dst = if j + 1 == k { entry } else { j + 1 };
        transitions.push(Transition {
            src: j,
            guard: g,
            dst,
        });
    }
    ParametricAutomaton {
        theory,
        params,
        states,
        transitions,
        initial: 0,
        finals,
    }
}

/// Moves shared parameters into a prefix variable; see the module docs.
/// A problem whose constraints share nothing comes back unchanged.
pub fn localize_parameters(p: &WordEqProblem, element: &[Guard]) -> Localized {
    let seqvars = p.variables();
    let own = |a: &ParametricAutomaton| -> BTreeSet<String> {
        a.params
            .iter()
            .filter(|x| !seqvars.contains(*x))
            .cloned()
            .collect()
    };
    let mut count: BTreeMap<String, usize> = BTreeMap::new();
    for c in &p.regular {
        for x in own(&c.automaton) {
            *count.entry(x).or_default() += 1;
        }
    }
    let mut shared: BTreeSet<String> = count
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|(x, _)| x)
        .collect();
    for g in element {
        shared.extend(g.params());
    }
    let symbolic: Vec<LinExpr> = p
        .constants()
        .into_iter()
        .filter(|c| !c.is_constant())
        .collect();
    for c in &symbolic {
        shared.extend(c.free_vars());
    }
    let shared: Vec<String> = shared.into_iter().collect();

    let mut out = WordEqProblem {
        theory: p.theory,
        equations: Vec::new(),
        regular: Vec::new(),
        lengths: p.lengths.clone(),
    };
    let closed_false = element.iter().any(|g| {
        g.params().is_empty() && g.eval(&Value::from_integer(0.into()), &Model::new()) == Ok(false)
    });
    if shared.is_empty() {
        out.equations = p.equations.clone();
        out.regular = p.regular.clone();
        if closed_false {
            out.regular.push(RegularConstraint {
                var: PREFIX.into(),
                automaton: ParametricAutomaton::empty(p.theory),
            });
        }
        return Localized {
            problem: out,
            shared,
        };
    }
    let none = BTreeSet::new();
    let y = || Sym::Var(PREFIX.into());
    out.regular.push(RegularConstraint {
        var: PREFIX.into(),
        automaton: chain(p.theory, &shared, &none, "any", Guard::True, None),
    });
    if closed_false {
        out.regular.push(RegularConstraint {
            var: PREFIX.into(),
            automaton: ParametricAutomaton::empty(p.theory),
        });
    }

    let const_var = |c: &LinExpr| {
        format!(
            "#k{}",
            symbolic
                .iter()
                .position(|s| s == c)
                .expect("symbolic constant")
        )
    };
    for e in &p.equations {
        let side = |s: &[Sym]| -> Vec<Sym> {
            s.iter()
                .map(|x| match x {
                    Sym::Letter(c) if !c.is_constant() => Sym::Var(const_var(c)),
                    x => x.clone(),
                })
                .collect()
        };
        out.equations
            .push(EquationalConstraint::new(side(&e.left), side(&e.right)));
    }
    for (i, c) in symbolic.iter().enumerate() {
        let tag = format!("k{i}");
        let used = c.free_vars();
        let letter = Guard::eq(
            LinExpr::curr(),
            c.rename(&|x| {
                if used.contains(x) {
                    copy(x, &tag)
                } else {
                    x.to_string()
                }
            }),
        );
        let one = ParametricAutomaton {
            theory: p.theory,
            params: vec![],
            states: vec!["#l0".into(), "#l1".into()],
            transitions: vec![Transition {
                src: 0,
                guard: letter,
                dst: 1,
            }],
            initial: 0,
            finals: [1].into(),
        };
        let z = format!("#zk{i}");
        let mut a = chain(p.theory, &shared, &used, &tag, Guard::True, Some(&one));
        a.params.sort();
        a.params.dedup();
        out.regular.push(RegularConstraint {
            var: z.clone(),
            automaton: a,
        });
        out.equations.push(EquationalConstraint::new(
            vec![Sym::Var(z)],
            vec![y(), Sym::Var(const_var(c))],
        ));
    }

    for (i, c) in p.regular.iter().enumerate() {
        let used: BTreeSet<String> = own(&c.automaton)
            .into_iter()
            .filter(|x| shared.contains(x))
            .collect();
        if used.is_empty() {
            out.regular.push(c.clone());
            continue;
        }
        let tag = format!("r{i}");
        let ren = |x: &str| {
            if used.contains(x) {
                copy(x, &tag)
            } else {
                x.to_string()
            }
        };
        let body = c.automaton.rename_params(&ren);
        let z = format!("#zr{i}");
        out.regular.push(RegularConstraint {
            var: z.clone(),
            automaton: chain(p.theory, &shared, &used, &tag, Guard::True, Some(&body)),
        });
        out.equations.push(EquationalConstraint::new(
            vec![Sym::Var(z)],
            vec![y(), Sym::Var(c.var.clone())],
        ));
    }

    for (i, g) in element.iter().enumerate() {
        let used = g.params();
        if used.is_empty() {
            continue;
        }
        let tag = format!("e{i}");
        let last = g.rename(&|x| copy(x, &tag));
        out.regular.push(RegularConstraint {
            var: PREFIX.into(),
            automaton: chain(p.theory, &shared, &used, &tag, last, None),
        });
    }
    Localized {
        problem: out,
        shared,
    }
}

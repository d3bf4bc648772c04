//! Shared helpers for the integration tests: seeded generators and
//! oracles that re-derive semantics without going through the solver.

#![allow(dead_code)]

pub mod smt;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqsolve::automata::{ParametricAutomaton, Transition};
use seqsolve::sl::{FunApp, Operand, SlModel, SlProgram, Statement};
use seqsolve::theory::linear::int;
use seqsolve::theory::{CmpOp, Guard, LinExpr, Model, TheoryKind, Value};
use seqsolve::transducers::{ParametricTransducer, PtTransition};

pub const THEORIES: [TheoryKind; 3] = [TheoryKind::Eq, TheoryKind::Lra, TheoryKind::Lia];
pub const PARAMS: [&str; 2] = ["p", "r"];

/// Seed from `SEQSOLVE_SEED`, or a fixed default.
pub fn seed() -> u64 {
    std::env::var("SEQSOLVE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x5e9_5017e)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

fn term(rng: &mut ChaCha8Rng) -> LinExpr {
    match rng.gen_range(0..4) {
        0 => LinExpr::var("p"),
        1 => LinExpr::var("r"),
        _ => LinExpr::from_i64(rng.gen_range(0..3)),
    }
}

pub fn random_atom(rng: &mut ChaCha8Rng, theory: TheoryKind) -> Guard {
    let c = LinExpr::curr();
    match theory {
        TheoryKind::Eq => Guard::eq(c, term(rng)),
        TheoryKind::Lra | TheoryKind::Lia => {
            if theory == TheoryKind::Lia && rng.gen_bool(0.2) {
                return Guard::congruence(c, 2, rng.gen_range(0..2));
            }
            let op = *[CmpOp::Eq, CmpOp::Lt, CmpOp::Le, CmpOp::Ne]
                .choose(rng)
                .unwrap();
            Guard::cmp(c, op, term(rng) + LinExpr::from_i64(rng.gen_range(-1..2)))
        }
    }
}

pub fn random_guard(rng: &mut ChaCha8Rng, theory: TheoryKind) -> Guard {
    match rng.gen_range(0..8) {
        0 => Guard::True,
        1..=3 => random_atom(rng, theory),
        4 | 5 => Guard::not(random_atom(rng, theory)),
        6 => Guard::and(vec![random_atom(rng, theory), random_atom(rng, theory)]),
        _ => Guard::or(vec![random_atom(rng, theory), random_atom(rng, theory)]),
    }
}

fn shape(rng: &mut ChaCha8Rng, max_states: usize) -> (usize, Vec<(usize, usize)>, BTreeSet<usize>) {
    let n = rng.gen_range(1..=max_states);
    let edges = (0..rng.gen_range(0..=2 * n))
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    let finals = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    (n, edges, finals)
}

/// A random automaton over parameters `p` and `r`.
pub fn random_automaton(
    rng: &mut ChaCha8Rng,
    theory: TheoryKind,
    max_states: usize,
) -> ParametricAutomaton {
    let (n, edges, finals) = shape(rng, max_states);
    let transitions = edges
        .into_iter()
        .map(|(src, dst)| Transition {
            src,
            guard: random_guard(rng, theory),
            dst,
        })
        .collect();
    ParametricAutomaton::new(
        theory,
        PARAMS.iter().map(|p| p.to_string()).collect(),
        (0..n).map(|i| format!("s{i}")).collect(),
        transitions,
        0,
        finals,
    )
    .expect("well-formed random automaton")
}

fn random_output(rng: &mut ChaCha8Rng, theory: TheoryKind) -> Vec<LinExpr> {
    let c = LinExpr::curr();
    let one = || match theory {
        TheoryKind::Eq => LinExpr::curr(),
        _ => LinExpr::curr() + LinExpr::from_i64(1),
    };
    match rng.gen_range(0..6) {
        0 => vec![],
        1 | 2 => vec![c],
        3 => vec![one()],
        4 => vec![LinExpr::var("p")],
        _ => vec![c, LinExpr::from_i64(rng.gen_range(0..2))],
    }
}

/// A random transducer over parameters `p` and `r`. EQ outputs stay
/// within terms of the equality signature.
pub fn random_transducer(
    rng: &mut ChaCha8Rng,
    theory: TheoryKind,
    max_states: usize,
) -> ParametricTransducer {
    let (n, edges, finals) = shape(rng, max_states);
    let transitions = edges
        .into_iter()
        .map(|(src, dst)| PtTransition {
            src,
            guard: random_guard(rng, theory),
            output: random_output(rng, theory),
            dst,
        })
        .collect();
    ParametricTransducer::new(
        theory,
        PARAMS.iter().map(|p| p.to_string()).collect(),
        (0..n).map(|i| format!("s{i}")).collect(),
        transitions,
        0,
        finals,
    )
    .expect("well-formed random transducer")
}

pub fn letters(theory: TheoryKind) -> Vec<Value> {
    let mut v: Vec<Value> = (-1..=3).map(int).collect();
    if theory == TheoryKind::Lra {
        v.push(Value::new(1.into(), 2.into()));
    }
    v
}

pub fn random_model(rng: &mut ChaCha8Rng, theory: TheoryKind) -> Model {
    let range = if theory == TheoryKind::Eq {
        0..4
    } else {
        -1..3
    };
    PARAMS
        .iter()
        .map(|p| (p.to_string(), int(rng.gen_range(range.clone()))))
        .collect()
}

pub fn random_word(rng: &mut ChaCha8Rng, theory: TheoryKind, max_len: usize) -> Vec<Value> {
    let ls = letters(theory);
    (0..rng.gen_range(0..=max_len))
        .map(|_| ls.choose(rng).unwrap().clone())
        .collect()
}

pub fn all_words(alphabet: &[Value], max_len: usize) -> Vec<Vec<Value>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<Value>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet
                    .iter()
                    .map(move |a| w.iter().cloned().chain([a.clone()]).collect())
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Subset simulation straight from the guards.
pub fn oracle_accepts(a: &ParametricAutomaton, m: &Model, w: &[Value]) -> bool {
    let mut cur: BTreeSet<usize> = [a.initial].into();
    for x in w {
        cur = a
            .transitions
            .iter()
            .filter(|t| cur.contains(&t.src) && t.guard.eval(x, m).expect("total model"))
            .map(|t| t.dst)
            .collect();
    }
    cur.iter().any(|q| a.finals.contains(q))
}

/// Every output of every accepting run.
pub fn oracle_apply(t: &ParametricTransducer, m: &Model, w: &[Value]) -> BTreeSet<Vec<Value>> {
    let mut cur: BTreeSet<(usize, Vec<Value>)> = [(t.initial, vec![])].into();
    for x in w {
        let mut next = BTreeSet::new();
        for (q, out) in &cur {
            for tr in t.transitions.iter().filter(|tr| tr.src == *q) {
                if tr.guard.eval(x, m).expect("total model") {
                    let mut o = out.clone();
                    o.extend(
                        tr.output
                            .iter()
                            .map(|e| e.eval_at(x, m).expect("total model")),
                    );
                    next.insert((tr.dst, o));
                }
            }
        }
        cur = next;
    }
    cur.into_iter()
        .filter(|(q, _)| t.finals.contains(q))
        .map(|(_, o)| o)
        .collect()
}

/// Re-executes `p` on the model: every assignment must reproduce its
/// left-hand side and every assertion must hold.
pub fn replay(p: &SlProgram, model: &SlModel) -> Result<(), String> {
    let m = &model.params;
    let word = |x: &str| model.words.get(x).cloned().unwrap_or_default();
    for s in &p.statements {
        match s {
            Statement::Assign(y, f) => {
                let got = word(y);
                let ok = match f {
                    FunApp::Concat(ops) => {
                        let mut out = Vec::new();
                        for o in ops {
                            match o {
                                Operand::Var(v) => out.extend(word(v)),
                                Operand::Seq(es) => out
                                    .extend(es.iter().map(|e| e.eval(m).expect("ground constant"))),
                            }
                        }
                        out == got
                    }
                    FunApp::Transduce(t, x) => oracle_apply(t, m, &word(x)).contains(&got),
                    FunApp::Reverse(x) => word(x).into_iter().rev().collect::<Vec<_>>() == got,
                };
                if !ok {
                    return Err(format!("assignment to `{y}` does not reproduce {got:?}"));
                }
            }
            Statement::AssertRegular(f) => {
                let holds = f.disjuncts.iter().any(|d| {
                    d.iter()
                        .all(|c| oracle_accepts(&c.automaton, m, &word(&c.var)))
                });
                if !holds {
                    return Err(format!("assertion over {:?} fails", f.vars()));
                }
            }
            Statement::AssertElement(g) => {
                if !g.eval(&int(0), m).map_err(|e| e.to_string())? {
                    return Err(format!("element constraint {g} fails"));
                }
            }
        }
    }
    Ok(())
}

pub fn words_of(pairs: &[(&str, &[i64])]) -> BTreeMap<String, Vec<Value>> {
    pairs
        .iter()
        .map(|(x, w)| (x.to_string(), w.iter().copied().map(int).collect()))
        .collect()
}

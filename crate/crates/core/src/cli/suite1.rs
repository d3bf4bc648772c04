//! Verification conditions of sequence-manipulating programs.
//!
//! * `quicksort`: one disjunct of the element-preservation condition for a
//!   stream-based QuickSort, `left'` and `right'` avoid `k` while
//!   `left' · [l0] · right'` contains it. Satisfiable (with `k = l0`).
//! * `quicksort-vc`: the whole negated condition. Unsatisfiable.
//! * `dijkstra`: inductiveness of "exactly one privileged machine" for
//!   Dijkstra's K-state token ring, with one letter per machine holding its
//!   state in `0..K`. Unsatisfiable.
//! * `bakery-lite`: mutual exclusion for a ticket protocol. A thread is one
//!   letter: `0` idle, `3t+1` waiting with ticket `t >= 1`, `3t+2` critical
//!   with ticket `t`. Unsatisfiable.
//!
//! The inductiveness programs share one shape:
//! `X ∈ Inv; Y := T(X); Y ∈ F; Y ∈ ¬Inv`, where `F` pins the parameters of
//! the complemented invariant to the values the word itself determines, so
//! the per-valuation complement means "outside every instance".

use crate::automata::{AutomataError, ParametricAutomaton};
use crate::sl::Operand;
use crate::theory::{CmpOp, Guard, LinExpr, TheoryKind};
use crate::transducers::ParametricTransducer;

use super::problem::{Command, FileStatement, ProblemFile, Rhs};

/// Token count of the Dijkstra ring.
pub const DIJKSTRA_K: i64 = 4;

pub const SUITE1: [&str; 4] = ["quicksort", "quicksort-vc", "dijkstra", "bakery-lite"];

fn curr() -> LinExpr {
    LinExpr::curr()
}

fn var(x: &str) -> LinExpr {
    LinExpr::var(x)
}

fn num(v: i64) -> LinExpr {
    LinExpr::from_i64(v)
}

fn in1(x: &str, a: &str) -> FileStatement {
    FileStatement::Assert(vec![vec![(x.into(), a.into())]])
}

fn file(
    automata: Vec<(&str, ParametricAutomaton)>,
    transducers: Vec<(&str, ParametricTransducer)>,
    statements: Vec<FileStatement>,
) -> ProblemFile {
    ProblemFile {
        theory: TheoryKind::Lia,
        automata: automata
            .into_iter()
            .map(|(n, a)| (n.to_string(), a))
            .collect(),
        transducers: transducers
            .into_iter()
            .map(|(n, t)| (n.to_string(), t))
            .collect(),
        statements,
        command: Command::Sat,
    }
}

fn avoids_k() -> Result<ParametricAutomaton, AutomataError> {
    ParametricAutomaton::from_named(
        TheoryKind::Lia,
        &["k"],
        &["q0"],
        vec![("q0", Guard::ne(curr(), var("k")), "q0")],
        "q0",
        &["q0"],
    )
}

fn contains_k() -> Result<ParametricAutomaton, AutomataError> {
    ParametricAutomaton::from_named(
        TheoryKind::Lia,
        &["k"],
        &["q0", "q1"],
        vec![
            ("q0", Guard::True, "q0"),
            ("q0", Guard::eq(curr(), var("k")), "q1"),
            ("q1", Guard::True, "q1"),
        ],
        "q0",
        &["q1"],
    )
}

fn filter(keep: Guard, drop: Guard) -> Result<ParametricTransducer, AutomataError> {
    ParametricTransducer::from_named(
        TheoryKind::Lia,
        &["l0"],
        &["t"],
        vec![("t", keep, vec![curr()], "t"), ("t", drop, vec![], "t")],
        "t",
        &["t"],
    )
}

fn quicksort() -> Result<ProblemFile, AutomataError> {
    Ok(file(
        vec![("A0", avoids_k()?), ("A1", contains_k()?)],
        vec![],
        vec![
            in1("left'", "A0"),
            in1("right'", "A0"),
            FileStatement::Assign(
                "res".into(),
                Rhs::Concat(vec![
                    Operand::Var("left'".into()),
                    Operand::Seq(vec![var("l0")]),
                    Operand::Var("right'".into()),
                ]),
            ),
            in1("res", "A1"),
        ],
    ))
}

fn quicksort_vc() -> Result<ProblemFile, AutomataError> {
    let first = ParametricAutomaton::from_named(
        TheoryKind::Lia,
        &["l0"],
        &["s", "t"],
        vec![
            ("s", Guard::eq(curr(), var("l0")), "t"),
            ("t", Guard::True, "t"),
        ],
        "s",
        &["t"],
    )?;
    let below = filter(
        Guard::cmp(curr(), CmpOp::Lt, var("l0")),
        Guard::cmp(curr(), CmpOp::Ge, var("l0")),
    )?;
    let above = filter(
        Guard::cmp(curr(), CmpOp::Ge, var("l0")),
        Guard::cmp(curr(), CmpOp::Lt, var("l0")),
    )?;
    let skip1 = ParametricTransducer::from_named(
        TheoryKind::Lia,
        &[],
        &["s0", "s1"],
        vec![
            ("s0", Guard::True, vec![], "s1"),
            ("s1", Guard::True, vec![curr()], "s1"),
        ],
        "s0",
        &["s1"],
    )?;
    let iff = |a: &str, b: &str| {
        FileStatement::Assert(vec![
            vec![(a.into(), "A1".into()), (b.into(), "A1".into())],
            vec![(a.into(), "A0".into()), (b.into(), "A0".into())],
        ])
    };
    Ok(file(
        vec![("A0", avoids_k()?), ("A1", contains_k()?), ("First", first)],
        vec![("Below", below), ("AtLeast", above), ("Skip1", skip1)],
        vec![
            in1("l", "First"),
            FileStatement::Assign("left".into(), Rhs::Apply("Below".into(), "l".into())),
            FileStatement::Assign("s".into(), Rhs::Apply("Skip1".into(), "l".into())),
            FileStatement::Assign("right".into(), Rhs::Apply("AtLeast".into(), "s".into())),
            FileStatement::Assign(
                "res".into(),
                Rhs::Concat(vec![
                    Operand::Var("left'".into()),
                    Operand::Seq(vec![var("l0")]),
                    Operand::Var("right'".into()),
                ]),
            ),
            iff("left", "left'"),
            iff("right", "right'"),
            FileStatement::Assert(vec![
                vec![("l".into(), "A1".into()), ("res".into(), "A0".into())],
                vec![("l".into(), "A0".into()), ("res".into(), "A1".into())],
            ]),
        ],
    ))
}

/// The first letter is `a` and the last is `b`.
fn ends(a: &str, b: &str) -> Result<ParametricAutomaton, AutomataError> {
    let first = Guard::eq(curr(), var(a));
    let both = Guard::and(vec![first.clone(), Guard::eq(curr(), var(b))]);
    ParametricAutomaton::from_named(
        TheoryKind::Lia,
        &[a, b],
        &["i", "m", "f"],
        vec![
            ("i", both, "f"),
            ("i", first, "m"),
            ("m", Guard::True, "m"),
            ("m", Guard::eq(curr(), var(b)), "f"),
        ],
        "i",
        &["f"],
    )
}

fn token(g: Guard) -> Guard {
    Guard::and(vec![
        g,
        Guard::cmp(curr(), CmpOp::Ge, num(0)),
        Guard::cmp(curr(), CmpOp::Lt, num(DIJKSTRA_K)),
    ])
}

/// `a+` or `a+ b+` with `b != a`: exactly one machine is privileged.
fn dijkstra_inv(a: &str, b: &str) -> Result<ParametricAutomaton, AutomataError> {
    let is_a = token(Guard::eq(curr(), var(a)));
    let is_b = token(Guard::and(vec![
        Guard::eq(curr(), var(b)),
        Guard::ne(var(b), var(a)),
    ]));
    ParametricAutomaton::from_named(
        TheoryKind::Lia,
        &[a, b],
        &["i", "s", "t"],
        vec![
            ("i", is_a.clone(), "s"),
            ("s", is_a, "s"),
            ("s", is_b.clone(), "t"),
            ("t", is_b, "t"),
        ],
        "i",
        &["s", "t"],
    )
}

/// One move of a privileged machine. Machine 0 (privileged when its state
/// equals the last machine's, bound to `l`) increments modulo K; machine
/// `i > 0` (privileged when it differs from its predecessor, bound to `v`)
/// copies the predecessor.
fn dijkstra_step() -> Result<ParametricTransducer, AutomataError> {
    let at_l = Guard::eq(curr(), var("l"));
    let top = num(DIJKSTRA_K - 1);
    let inc = Guard::and(vec![
        at_l.clone(),
        Guard::cmp(curr(), CmpOp::Lt, top.clone()),
    ]);
    let wrap = Guard::and(vec![at_l.clone(), Guard::eq(curr(), top)]);
    let succ = curr() + num(1);
    let at_v = Guard::eq(curr(), var("v"));
    ParametricTransducer::from_named(
        TheoryKind::Lia,
        &["l", "v"],
        &["i", "m", "z", "c", "q", "r"],
        vec![
            ("i", inc.clone(), vec![succ.clone()], "m"),
            ("i", wrap.clone(), vec![num(0)], "m"),
            ("i", inc, vec![succ], "z"),
            ("i", wrap, vec![num(0)], "z"),
            ("m", Guard::True, vec![curr()], "m"),
            ("m", at_l, vec![curr()], "z"),
            ("i", Guard::True, vec![curr()], "c"),
            ("i", at_v.clone(), vec![curr()], "q"),
            ("c", Guard::True, vec![curr()], "c"),
            ("c", at_v.clone(), vec![curr()], "q"),
            ("q", Guard::not(at_v), vec![var("v")], "r"),
            ("r", Guard::True, vec![curr()], "r"),
        ],
        "i",
        &["z", "r"],
    )
}

fn dijkstra() -> Result<ProblemFile, AutomataError> {
    let inv = dijkstra_inv("a", "b")?;
    let not_inv = dijkstra_inv("a2", "b2")?.complement()?;
    Ok(file(
        vec![
            ("Inv", inv),
            ("Ends", ends("a2", "b2")?),
            ("NotInv", not_inv),
        ],
        vec![("Step", dijkstra_step()?)],
        vec![
            in1("X", "Inv"),
            FileStatement::Assign("Y".into(), Rhs::Apply("Step".into(), "X".into())),
            in1("Y", "Ends"),
            in1("Y", "NotInv"),
        ],
    ))
}

fn idle() -> Guard {
    Guard::eq(curr(), num(0))
}

fn waiting() -> Guard {
    Guard::congruence(curr(), 3, 1)
}

fn critical() -> Guard {
    Guard::congruence(curr(), 3, 2)
}

/// `curr >= 3 * g + c`.
fn at_least(g: &str, c: i64) -> Guard {
    Guard::cmp(
        curr(),
        CmpOp::Ge,
        var(g) * &crate::theory::linear::int(3) + num(c),
    )
}

/// At most one critical thread, with ticket `g`; every waiting ticket
/// exceeds `g`.
fn bakery_inv(g: &str) -> Result<ParametricAutomaton, AutomataError> {
    let ticketed = Guard::cmp(curr(), CmpOp::Ge, num(4));
    let other = Guard::or(vec![
        idle(),
        Guard::and(vec![waiting(), ticketed, at_least(g, 4)]),
    ]);
    let crit = Guard::and(vec![
        Guard::eq(curr(), var(g) * &crate::theory::linear::int(3) + num(2)),
        Guard::cmp(var(g), CmpOp::Ge, num(1)),
    ]);
    ParametricAutomaton::from_named(
        TheoryKind::Lia,
        &[g],
        &["n", "c"],
        vec![
            ("n", other.clone(), "n"),
            ("n", crit, "c"),
            ("c", other, "c"),
        ],
        "n",
        &["n", "c"],
    )
}

/// `g` is the ticket of the first critical thread, or 0 without one.
fn bakery_pin(g: &str) -> Result<ParametricAutomaton, AutomataError> {
    let calm = Guard::not(critical());
    let crit = Guard::eq(curr(), var(g) * &crate::theory::linear::int(3) + num(2));
    let none = Guard::and(vec![calm.clone(), Guard::eq(var(g), num(0))]);
    ParametricAutomaton::from_named(
        TheoryKind::Lia,
        &[g],
        &["s", "n", "b", "c"],
        vec![
            ("s", none.clone(), "n"),
            ("n", none, "n"),
            ("s", calm.clone(), "b"),
            ("b", calm, "b"),
            ("s", crit.clone(), "c"),
            ("b", crit, "c"),
            ("c", Guard::True, "c"),
        ],
        "s",
        &["s", "n", "c"],
    )
}

/// Take a ticket one above every ticket in sight (`m` bounds them), enter
/// the critical section with the smallest waiting ticket `v`, or leave it.
fn bakery_step() -> Result<ParametricTransducer, AutomataError> {
    let three = crate::theory::linear::int(3);
    let seen = Guard::and(vec![
        Guard::cmp(curr(), CmpOp::Le, var("m") * &three + num(2)),
        Guard::cmp(var("m"), CmpOp::Ge, num(0)),
    ]);
    let ticket = var("m") * &three + num(4);
    let mine = Guard::eq(curr(), var("v") * &three + num(1));
    let yield_to = Guard::or(vec![idle(), at_least("v", 4)]);
    ParametricTransducer::from_named(
        TheoryKind::Lia,
        &["m", "v"],
        &["i", "a0", "a1", "b0", "b1", "c0", "c1"],
        vec![
            ("i", seen.clone(), vec![curr()], "a0"),
            ("a0", seen.clone(), vec![curr()], "a0"),
            (
                "i",
                Guard::and(vec![idle(), seen.clone()]),
                vec![ticket.clone()],
                "a1",
            ),
            (
                "a0",
                Guard::and(vec![idle(), seen.clone()]),
                vec![ticket],
                "a1",
            ),
            ("a1", seen, vec![curr()], "a1"),
            ("i", yield_to.clone(), vec![curr()], "b0"),
            ("b0", yield_to.clone(), vec![curr()], "b0"),
            ("i", mine.clone(), vec![curr() + num(1)], "b1"),
            ("b0", mine, vec![curr() + num(1)], "b1"),
            ("b1", yield_to, vec![curr()], "b1"),
            ("i", Guard::True, vec![curr()], "c0"),
            ("c0", Guard::True, vec![curr()], "c0"),
            ("i", critical(), vec![num(0)], "c1"),
            ("c0", critical(), vec![num(0)], "c1"),
            ("c1", Guard::True, vec![curr()], "c1"),
        ],
        "i",
        &["a1", "b1", "c1"],
    )
}

fn bakery() -> Result<ProblemFile, AutomataError> {
    Ok(file(
        vec![
            ("Inv", bakery_inv("g")?),
            ("Pin", bakery_pin("g2")?),
            ("NotInv", bakery_inv("g2")?.complement()?),
        ],
        vec![("Step", bakery_step()?)],
        vec![
            in1("X", "Inv"),
            FileStatement::Assign("Y".into(), Rhs::Apply("Step".into(), "X".into())),
            in1("Y", "Pin"),
            in1("Y", "NotInv"),
        ],
    ))
}

/// The named benchmark, or `None` for an unknown name.
pub fn gen_suite1(name: &str) -> Option<Result<ProblemFile, AutomataError>> {
    Some(match name {
        "quicksort" => quicksort(),
        "quicksort-vc" => quicksort_vc(),
        "dijkstra" => dijkstra(),
        "bakery-lite" => bakery(),
        _ => return None,
    })
}

/// Parts exposed for the finite-state cross-checks.
pub mod parts {
    use super::*;

    pub fn dijkstra_invariant() -> ParametricAutomaton {
        dijkstra_inv("a", "b").expect("well-formed")
    }

    pub fn dijkstra_transducer() -> ParametricTransducer {
        dijkstra_step().expect("well-formed")
    }

    pub fn bakery_invariant() -> ParametricAutomaton {
        bakery_inv("g").expect("well-formed")
    }

    pub fn bakery_transducer() -> ParametricTransducer {
        bakery_step().expect("well-formed")
    }
}

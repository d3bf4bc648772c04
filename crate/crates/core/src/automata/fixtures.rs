use crate::theory::{CmpOp, Guard, LinExpr, TheoryKind};

use super::ParametricAutomaton;

pub fn curr() -> LinExpr {
    LinExpr::curr()
}

pub fn var(n: &str) -> LinExpr {
    LinExpr::var(n)
}

/// Sequences repeating one even number.
pub fn even_i_star() -> ParametricAutomaton {
    let g = Guard::and(vec![
        Guard::eq(curr(), var("p")),
        Guard::congruence(curr(), 2, 0),
    ]);
    ParametricAutomaton::from_named(
        TheoryKind::Lia,
        &["p"],
        &["q"],
        vec![("q", g, "q")],
        "q",
        &["q"],
    )
    .unwrap()
}

/// Words avoiding `k`.
pub fn a0(theory: TheoryKind) -> ParametricAutomaton {
    ParametricAutomaton::from_named(
        theory,
        &["k"],
        &["q0"],
        vec![("q0", Guard::ne(curr(), var("k")), "q0")],
        "q0",
        &["q0"],
    )
    .unwrap()
}

/// Words containing `k`.
pub fn a1(theory: TheoryKind) -> ParametricAutomaton {
    ParametricAutomaton::from_named(
        theory,
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
    .unwrap()
}

/// Words whose first letter is `p`.
pub fn first_is(theory: TheoryKind) -> ParametricAutomaton {
    ParametricAutomaton::from_named(
        theory,
        &["p"],
        &["s", "t"],
        vec![
            ("s", Guard::eq(curr(), var("p")), "t"),
            ("t", Guard::True, "t"),
        ],
        "s",
        &["t"],
    )
    .unwrap()
}

pub fn below(p: &str) -> Guard {
    Guard::cmp(curr(), CmpOp::Lt, var(p))
}

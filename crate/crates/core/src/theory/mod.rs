//! Element theories: atoms, guards and conjunction satisfiability.
//!
//! Three theories are supported. `EQ` is an infinite domain with equality
//! only, `LRA` is linear arithmetic over the rationals and `LIA` is linear
//! arithmetic over the integers with congruence atoms. All arithmetic is
//! exact; domain values are [`BigRational`]s (integers for LIA, abstract ids
//! for EQ).

mod atom;
mod eq;
mod fm;
mod guard;
pub mod linear;
#[cfg(test)]
mod props;

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use thiserror::Error;

pub use atom::{Atom, CmpOp, EqTerm, Literal, Rel};
pub use guard::{Conjunction, Guard};
pub use linear::LinExpr;

/// The distinguished symbol for the letter being read.
pub const CURR: &str = "curr";

pub type Value = BigRational;

/// Partial assignment from symbol names to domain values.
pub type Model = BTreeMap<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoryKind {
    Eq,
    Lra,
    Lia,
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoryKind::Eq => "eq",
            TheoryKind::Lra => "lra",
            TheoryKind::Lia => "lia",
        })
    }
}

impl FromStr for TheoryKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eq" => Ok(TheoryKind::Eq),
            "lra" => Ok(TheoryKind::Lra),
            "lia" => Ok(TheoryKind::Lia),
            other => Err(format!("unknown theory `{other}`")),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TheoryError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("theory mismatch: {0}")]
    TheoryMismatch(String),
    #[error("branch-and-bound limit of {0} branchings exceeded")]
    BranchLimit(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct SatOptions {
    /// Maximum number of branch-and-bound branchings per LIA query.
    pub branch_limit: usize,
    /// On exhausting the budget, decide exactly by integer elimination
    /// instead of failing with [`TheoryError::BranchLimit`].
    pub exact_fallback: bool,
}

impl Default for SatOptions {
    fn default() -> Self {
        SatOptions {
            branch_limit: 64,
            exact_fallback: true,
        }
    }
}

pub fn eval_guard(g: &Guard, letter: &Value, m: &Model) -> Result<bool, TheoryError> {
    g.eval(letter, m)
}

pub fn substitute(g: &Guard, t: &LinExpr) -> Guard {
    g.substitute(t)
}

pub fn to_dnf(g: &Guard) -> Vec<Conjunction> {
    g.to_dnf()
}

/// Decides a conjunction of literals and returns a model total on `vars`
/// (plus any other symbol of the literals), or `None` when unsatisfiable.
pub fn sat_conjunction(
    theory: TheoryKind,
    literals: &[Literal],
    vars: &BTreeSet<String>,
) -> Result<Option<Model>, TheoryError> {
    sat_conjunction_with(theory, literals, vars, &SatOptions::default())
}

pub fn sat_conjunction_with(
    theory: TheoryKind,
    literals: &[Literal],
    vars: &BTreeSet<String>,
    opts: &SatOptions,
) -> Result<Option<Model>, TheoryError> {
    for l in literals {
        l.atom.check_theory(theory)?;
    }
    let model = match theory {
        TheoryKind::Eq => eq::solve(literals, vars)?,
        TheoryKind::Lra => fm::solve(literals, vars, false, opts)?,
        TheoryKind::Lia => fm::solve(literals, vars, true, opts)?,
    };
    if let Some(m) = &model {
        debug_assert!(
            literals.iter().all(|l| l.eval(m).unwrap_or(false)),
            "theory model does not satisfy its conjunction"
        );
    }
    Ok(model)
}

/// Satisfiability with every symbol existentially quantified.
pub fn is_sat(theory: TheoryKind, literals: &[Literal]) -> Result<bool, TheoryError> {
    Ok(sat_conjunction(theory, literals, &BTreeSet::new())?.is_some())
}

/// Satisfiability of a guard with `curr` and all parameters existential.
pub fn guard_is_sat(theory: TheoryKind, g: &Guard) -> Result<bool, TheoryError> {
    for conj in g.to_dnf() {
        if is_sat(theory, &conj)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// All satisfiable full sign assignments over `atoms`, in the order of
/// `atoms` with the positive sign first.
pub fn minterms<'a>(
    theory: TheoryKind,
    atoms: impl IntoIterator<Item = &'a Atom>,
) -> Result<Vec<Conjunction>, TheoryError> {
    let mut acc: Vec<Conjunction> = vec![vec![]];
    for a in atoms {
        let mut next = Vec::with_capacity(acc.len() * 2);
        for partial in &acc {
            for positive in [true, false] {
                let mut c = partial.clone();
                c.push(Literal {
                    atom: a.clone(),
                    positive,
                });
                if is_sat(theory, &c)? {
                    next.push(c);
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::linear::int;
    use super::*;

    fn var(n: &str) -> LinExpr {
        LinExpr::var(n)
    }

    fn lit(g: Guard) -> Literal {
        let dnf = g.to_dnf();
        assert_eq!(dnf.len(), 1);
        assert_eq!(dnf[0].len(), 1);
        dnf[0][0].clone()
    }

    fn vars(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn eq_three_element_consistency() {
        let lits = vec![
            lit(Guard::eq(var("x"), var("y"))),
            lit(Guard::ne(var("y"), var("z"))),
        ];
        let m = sat_conjunction(TheoryKind::Eq, &lits, &vars(&["x", "y", "z"]))
            .unwrap()
            .unwrap();
        assert_eq!(m["x"], m["y"]);
        assert_ne!(m["y"], m["z"]);
    }

    #[test]
    fn lia_even_instances_share_value() {
        let c1 = var("c1");
        let c2 = var("c2");
        let lits = vec![
            lit(Guard::eq(c1.clone(), var("p"))),
            lit(Guard::congruence(c1, 2, 0)),
            lit(Guard::eq(c2.clone(), var("p"))),
            lit(Guard::congruence(c2, 2, 0)),
        ];
        let m = sat_conjunction(TheoryKind::Lia, &lits, &vars(&["c1", "c2", "p"]))
            .unwrap()
            .unwrap();
        assert_eq!(m["c1"], m["p"]);
        assert!(m["p"].is_integer());
        assert_eq!(m["p"].to_integer() % 2, 0.into());
    }

    #[test]
    fn lia_empty_interval() {
        let lits = vec![
            lit(Guard::cmp(var("c"), CmpOp::Lt, var("p"))),
            lit(Guard::cmp(var("c"), CmpOp::Gt, var("p"))),
        ];
        assert!(!is_sat(TheoryKind::Lia, &lits).unwrap());
    }

    #[test]
    fn lra_fourier_motzkin_refutation() {
        // 2c <= p, p <= c, c = 1  ==>  2 <= p <= 1
        let lits = vec![
            lit(Guard::cmp(var("c").scale(&int(2)), CmpOp::Le, var("p"))),
            lit(Guard::cmp(var("p"), CmpOp::Le, var("c"))),
            lit(Guard::eq(var("c"), LinExpr::from_i64(1))),
        ];
        assert!(!is_sat(TheoryKind::Lra, &lits).unwrap());
    }

    #[test]
    fn lia_parity_after_substitution() {
        let g = Guard::eq(LinExpr::curr(), LinExpr::from_i64(5));
        let g2 = g.substitute(&LinExpr::curr().scale(&int(2)));
        assert!(!guard_is_sat(TheoryKind::Lia, &g2).unwrap());
        assert!(guard_is_sat(TheoryKind::Lra, &g2).unwrap());
    }

    #[test]
    fn mixed_theories_are_rejected() {
        let lits = vec![lit(Guard::cmp(var("x"), CmpOp::Lt, var("y")))];
        assert!(matches!(
            sat_conjunction(TheoryKind::Eq, &lits, &BTreeSet::new()),
            Err(TheoryError::TheoryMismatch(_))
        ));
        let lits = vec![lit(Guard::congruence(var("x"), 2, 1))];
        assert!(matches!(
            sat_conjunction(TheoryKind::Lra, &lits, &BTreeSet::new()),
            Err(TheoryError::TheoryMismatch(_))
        ));
    }

    #[test]
    fn minterms_complementary_pair() {
        let Guard::Atom(a) = Guard::eq(LinExpr::curr(), var("p")) else {
            unreachable!()
        };
        let ms = minterms(TheoryKind::Eq, [&a]).unwrap();
        assert_eq!(ms.len(), 2);
    }

    #[test]
    fn minterms_drop_contradiction() {
        let Guard::Atom(a) = Guard::cmp(LinExpr::curr(), CmpOp::Lt, LinExpr::zero()) else {
            unreachable!()
        };
        let Guard::Atom(b) = Guard::cmp(LinExpr::curr(), CmpOp::Gt, LinExpr::zero()) else {
            unreachable!()
        };
        let ms = minterms(TheoryKind::Lia, [&a, &b]).unwrap();
        assert_eq!(ms.len(), 3);
    }

    #[test]
    fn minterms_of_nothing() {
        let ms = minterms(TheoryKind::Lia, std::iter::empty()).unwrap();
        assert_eq!(ms, vec![Vec::<Literal>::new()]);
    }

    #[test]
    fn requested_vars_are_assigned() {
        let m = sat_conjunction(TheoryKind::Lra, &[], &vars(&["a", "b"]))
            .unwrap()
            .unwrap();
        assert!(m.contains_key("a") && m.contains_key("b"));
        let m = sat_conjunction(TheoryKind::Eq, &[], &vars(&["a", "b"]))
            .unwrap()
            .unwrap();
        assert_ne!(m["a"], m["b"]);
    }

    #[test]
    fn negated_congruence() {
        let lits = vec![
            Literal::neg(match Guard::congruence(var("x"), 3, 0) {
                Guard::Atom(a) => a,
                _ => unreachable!(),
            }),
            lit(Guard::cmp(var("x"), CmpOp::Ge, LinExpr::from_i64(0))),
            lit(Guard::cmp(var("x"), CmpOp::Le, LinExpr::from_i64(0))),
        ];
        assert!(!is_sat(TheoryKind::Lia, &lits).unwrap());
    }

    #[test]
    fn branch_budget_and_exact_fallback() {
        // An unbounded cone where relaxation-guided branching wanders.
        let e = |cs: [i64; 3], k: i64| {
            let mut e = LinExpr::from_i64(k);
            for (v, c) in ["x", "y", "z"].iter().zip(cs) {
                e.add_term(v, &int(c));
            }
            e
        };
        let lits = vec![
            lit(Guard::congruence(e([2, 1, -2], 0), 3, 2)),
            Literal::neg(Atom::linear(e([1, -2, 1], 3), Rel::Le)),
            lit(Guard::congruence(e([1, 2, -2], 0), 3, 0)),
            Literal::neg(Atom::linear(e([-1, -1, -1], -1), Rel::Le)),
        ];
        let strict = SatOptions {
            branch_limit: 64,
            exact_fallback: false,
        };
        assert_eq!(
            sat_conjunction_with(TheoryKind::Lia, &lits, &BTreeSet::new(), &strict),
            Err(TheoryError::BranchLimit(64))
        );
        let m = sat_conjunction(TheoryKind::Lia, &lits, &BTreeSet::new())
            .unwrap()
            .unwrap();
        assert!(lits.iter().all(|l| l.eval(&m).unwrap()));
    }
}

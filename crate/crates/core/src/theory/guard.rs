use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use super::atom::{Atom, CmpOp, Literal, Rel};
use super::linear::LinExpr;
use super::{Model, TheoryError, TheoryKind, Value, CURR};

/// Boolean combination of theory atoms over `curr` and parameters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    True,
    False,
    Atom(Atom),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

/// A conjunction of literals; a DNF is a `Vec` of these.
pub type Conjunction = Vec<Literal>;

impl Guard {
    pub fn atom(a: Atom) -> Guard {
        Guard::Atom(a)
    }

    pub fn cmp(lhs: LinExpr, op: CmpOp, rhs: LinExpr) -> Guard {
        let d = lhs - rhs;
        match op {
            CmpOp::Eq => Guard::Atom(Atom::linear(d, Rel::Eq)),
            CmpOp::Ne => Guard::Not(Box::new(Guard::Atom(Atom::linear(d, Rel::Eq)))),
            CmpOp::Le => Guard::Atom(Atom::linear(d, Rel::Le)),
            CmpOp::Lt => Guard::Atom(Atom::linear(d, Rel::Lt)),
            CmpOp::Ge => Guard::Atom(Atom::linear(-d, Rel::Le)),
            CmpOp::Gt => Guard::Atom(Atom::linear(-d, Rel::Lt)),
        }
    }

    pub fn eq(lhs: LinExpr, rhs: LinExpr) -> Guard {
        Self::cmp(lhs, CmpOp::Eq, rhs)
    }

    pub fn ne(lhs: LinExpr, rhs: LinExpr) -> Guard {
        Self::cmp(lhs, CmpOp::Ne, rhs)
    }

    pub fn congruence(t: LinExpr, modulus: i64, residue: i64) -> Guard {
        Guard::Atom(Atom::congruence(
            t,
            BigInt::from(modulus),
            BigInt::from(residue),
        ))
    }

    pub fn from_literal(l: &Literal) -> Guard {
        let a = Guard::Atom(l.atom.clone());
        if l.positive {
            a
        } else {
            Guard::Not(Box::new(a))
        }
    }

    pub fn from_conjunction(c: &[Literal]) -> Guard {
        Guard::and(c.iter().map(Guard::from_literal).collect())
    }

    pub fn and(gs: Vec<Guard>) -> Guard {
        let mut out = Vec::new();
        for g in gs {
            match g {
                Guard::True => {}
                Guard::False => return Guard::False,
                Guard::And(inner) => out.extend(inner),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Guard::True,
            1 => out.pop().unwrap(),
            _ => Guard::And(out),
        }
    }

    pub fn or(gs: Vec<Guard>) -> Guard {
        let mut out = Vec::new();
        for g in gs {
            match g {
                Guard::False => {}
                Guard::True => return Guard::True,
                Guard::Or(inner) => out.extend(inner),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Guard::False,
            1 => out.pop().unwrap(),
            _ => Guard::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(g: Guard) -> Guard {
        match g {
            Guard::True => Guard::False,
            Guard::False => Guard::True,
            Guard::Not(inner) => *inner,
            g => Guard::Not(Box::new(g)),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Guard::True | Guard::False => {}
            Guard::Atom(a) => {
                out.insert(a.clone());
            }
            Guard::Not(g) => g.collect_atoms(out),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.collect_atoms(out)),
        }
    }

    /// Symbols other than `curr`.
    pub fn params(&self) -> BTreeSet<String> {
        self.atoms()
            .iter()
            .flat_map(|a| a.free_vars())
            .filter(|v| v != CURR)
            .collect()
    }

    pub fn eval(&self, letter: &Value, model: &Model) -> Result<bool, TheoryError> {
        Ok(match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Atom(a) => a.eval_at(letter, model)?,
            Guard::Not(g) => !g.eval(letter, model)?,
            Guard::And(gs) => {
                for g in gs {
                    if !g.eval(letter, model)? {
                        return Ok(false);
                    }
                }
                true
            }
            Guard::Or(gs) => {
                for g in gs {
                    if g.eval(letter, model)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Evaluates with atom truth values supplied by `truth`.
    pub fn eval_with(&self, truth: &dyn Fn(&Atom) -> bool) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Atom(a) => truth(a),
            Guard::Not(g) => !g.eval_with(truth),
            Guard::And(gs) => gs.iter().all(|g| g.eval_with(truth)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval_with(truth)),
        }
    }

    /// Replaces every occurrence of `curr` by `t`.
    pub fn substitute(&self, t: &LinExpr) -> Guard {
        self.substitute_var(CURR, t)
    }

    pub fn substitute_var(&self, var: &str, t: &LinExpr) -> Guard {
        match self {
            Guard::True => Guard::True,
            Guard::False => Guard::False,
            Guard::Atom(a) => Guard::Atom(a.substitute(var, t)),
            Guard::Not(g) => Guard::not(g.substitute_var(var, t)),
            Guard::And(gs) => Guard::and(gs.iter().map(|g| g.substitute_var(var, t)).collect()),
            Guard::Or(gs) => Guard::or(gs.iter().map(|g| g.substitute_var(var, t)).collect()),
        }
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> String) -> Guard {
        match self {
            Guard::True => Guard::True,
            Guard::False => Guard::False,
            Guard::Atom(a) => Guard::Atom(a.rename(map)),
            Guard::Not(g) => Guard::not(g.rename(map)),
            Guard::And(gs) => Guard::and(gs.iter().map(|g| g.rename(map)).collect()),
            Guard::Or(gs) => Guard::or(gs.iter().map(|g| g.rename(map)).collect()),
        }
    }

    pub fn check_theory(&self, theory: TheoryKind) -> Result<(), TheoryError> {
        self.atoms().iter().try_for_each(|a| a.check_theory(theory))
    }

    /// Disjunctive normal form. Conjunctions that are syntactically
    /// contradictory (complementary literals, false constant atoms) are
    /// dropped; duplicate literals are merged.
    pub fn to_dnf(&self) -> Vec<Conjunction> {
        let raw = self.dnf_polarity(true);
        let mut out: Vec<Conjunction> = Vec::new();
        for conj in raw {
            if let Some(c) = clean_conjunction(conj) {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    fn dnf_polarity(&self, positive: bool) -> Vec<Conjunction> {
        match (self, positive) {
            (Guard::True, true) | (Guard::False, false) => vec![vec![]],
            (Guard::True, false) | (Guard::False, true) => vec![],
            (Guard::Atom(a), p) => vec![vec![Literal {
                atom: a.clone(),
                positive: p,
            }]],
            (Guard::Not(g), p) => g.dnf_polarity(!p),
            (Guard::And(gs), true) | (Guard::Or(gs), false) => {
                let mut acc: Vec<Conjunction> = vec![vec![]];
                for g in gs {
                    let part = g.dnf_polarity(positive);
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for a in &acc {
                        for b in &part {
                            let mut c = a.clone();
                            c.extend(b.iter().cloned());
                            next.push(c);
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
            (Guard::Or(gs), true) | (Guard::And(gs), false) => {
                gs.iter().flat_map(|g| g.dnf_polarity(positive)).collect()
            }
        }
    }
}

fn clean_conjunction(conj: Conjunction) -> Option<Conjunction> {
    let mut set = BTreeSet::new();
    for l in conj {
        match l.constant_value() {
            Some(true) => continue,
            Some(false) => return None,
            None => {}
        }
        if set.contains(&l.negated()) {
            return None;
        }
        set.insert(l);
    }
    Some(set.into_iter().collect())
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::True => write!(f, "true"),
            Guard::False => write!(f, "false"),
            Guard::Atom(a) => write!(f, "{a}"),
            Guard::Not(g) => write!(f, "(not {g})"),
            Guard::And(gs) | Guard::Or(gs) => {
                let op = if matches!(self, Guard::And(_)) {
                    "and"
                } else {
                    "or"
                };
                write!(f, "({op}")?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

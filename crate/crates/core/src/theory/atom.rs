use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::linear::{value_to_string, LinExpr};
use super::{Model, TheoryError, TheoryKind, Value, CURR};

/// Relation of a normalized linear atom `expr REL 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Le,
    Lt,
}

/// Comparison operators accepted by the guard constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// A theory atom in normal form.
///
/// `>`/`>=` are stored flipped, `!=` lives as a negated `Eq` at the guard
/// level, and congruences keep their constant folded into the residue.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Linear {
        expr: LinExpr,
        rel: Rel,
    },
    Congruence {
        expr: LinExpr,
        modulus: BigInt,
        residue: BigInt,
    },
}

/// Atomic term of the equality theory.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EqTerm {
    Var(String),
    Val(Value),
}

impl Atom {
    pub fn linear(expr: LinExpr, rel: Rel) -> Atom {
        let mut expr = expr.scale(&expr.integer_normalizer());
        if rel == Rel::Eq {
            let flip = match expr.leading_coeff() {
                Some(c) => c.is_negative(),
                None => expr.constant_term().is_negative(),
            };
            if flip {
                expr = -expr;
            }
        }
        Atom::Linear { expr, rel }
    }

    /// `expr ≡ residue (mod modulus)`; the modulus must be at least 2.
    pub fn congruence(expr: LinExpr, modulus: BigInt, residue: BigInt) -> Atom {
        let c = expr.constant_term().clone();
        let mut e = expr;
        e = e - LinExpr::constant(c.clone());
        let shifted = BigRational::from_integer(residue) - c;
        // Non-integral constants cannot meet an integer residue; keep them
        // visible so evaluation fails instead of silently rounding.
        if !shifted.is_integer() {
            return Atom::Congruence {
                expr: e + LinExpr::constant(-shifted),
                modulus,
                residue: BigInt::zero(),
            };
        }
        let residue = shifted.to_integer().mod_floor(&modulus);
        Atom::Congruence {
            expr: e,
            modulus,
            residue,
        }
    }

    pub fn expr(&self) -> &LinExpr {
        match self {
            Atom::Linear { expr, .. } | Atom::Congruence { expr, .. } => expr,
        }
    }

    pub fn mentions_curr(&self) -> bool {
        self.expr().mentions(CURR)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.expr().free_vars()
    }

    pub fn eval(&self, model: &Model) -> Result<bool, TheoryError> {
        let v = self.expr().eval(model)?;
        Ok(Self::holds(self, &v))
    }

    pub fn eval_at(&self, letter: &Value, model: &Model) -> Result<bool, TheoryError> {
        let v = self.expr().eval_at(letter, model)?;
        Ok(Self::holds(self, &v))
    }

    fn holds(&self, v: &Value) -> bool {
        match self {
            Atom::Linear { rel, .. } => match rel {
                Rel::Eq => v.is_zero(),
                Rel::Le => !v.is_positive(),
                Rel::Lt => v.is_negative(),
            },
            Atom::Congruence {
                modulus, residue, ..
            } => v.is_integer() && v.to_integer().mod_floor(modulus) == *residue,
        }
    }

    pub fn substitute(&self, var: &str, t: &LinExpr) -> Atom {
        match self {
            Atom::Linear { expr, rel } => Atom::linear(expr.substitute(var, t), *rel),
            Atom::Congruence {
                expr,
                modulus,
                residue,
            } => Atom::congruence(expr.substitute(var, t), modulus.clone(), residue.clone()),
        }
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> String) -> Atom {
        match self {
            Atom::Linear { expr, rel } => Atom::linear(expr.rename(map), *rel),
            Atom::Congruence {
                expr,
                modulus,
                residue,
            } => Atom::congruence(expr.rename(map), modulus.clone(), residue.clone()),
        }
    }

    /// The two sides of an equality-theory atom, if it has that shape.
    pub fn eq_terms(&self) -> Option<(EqTerm, EqTerm)> {
        let Atom::Linear { expr, rel: Rel::Eq } = self else {
            return None;
        };
        let cs: Vec<_> = expr.coeffs().iter().collect();
        let k = expr.constant_term();
        match cs.as_slice() {
            [] => Some((EqTerm::Val(k.clone()), EqTerm::Val(BigRational::zero()))),
            [(x, c)] if c.is_one() => Some((EqTerm::Var((*x).clone()), EqTerm::Val(-k.clone()))),
            [(x, c1), (y, c2)] if c1.is_one() && (-(*c2).clone()).is_one() && k.is_zero() => {
                Some((EqTerm::Var((*x).clone()), EqTerm::Var((*y).clone())))
            }
            _ => None,
        }
    }

    /// Checks that this atom belongs to `theory`'s signature.
    pub fn check_theory(&self, theory: TheoryKind) -> Result<(), TheoryError> {
        match (theory, self) {
            (TheoryKind::Eq, Atom::Linear { rel: Rel::Eq, .. }) if self.eq_terms().is_some() => {
                Ok(())
            }
            (TheoryKind::Eq, _) => Err(TheoryError::TheoryMismatch(format!(
                "atom {self} is not an equality between atomic terms"
            ))),
            (TheoryKind::Lra, Atom::Linear { .. }) => Ok(()),
            (TheoryKind::Lra, Atom::Congruence { .. }) => Err(TheoryError::TheoryMismatch(
                format!("congruence {self} outside integer arithmetic"),
            )),
            (TheoryKind::Lia, a) => {
                if a.expr().is_integral() {
                    Ok(())
                } else {
                    Err(TheoryError::TheoryMismatch(format!(
                        "non-integer coefficient in {self}"
                    )))
                }
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Linear { expr, rel } => {
                // Print as `lhs REL rhs` with the constant moved right.
                let k = expr.constant_term().clone();
                let lhs = expr.clone() - LinExpr::constant(k.clone());
                let op = match rel {
                    Rel::Eq => "=",
                    Rel::Le => "<=",
                    Rel::Lt => "<",
                };
                write!(f, "({} {} {})", op, lhs, value_to_string(&-k))
            }
            Atom::Congruence {
                expr,
                modulus,
                residue,
            } => {
                write!(f, "(mod= {} {} {})", expr, modulus, residue)
            }
        }
    }
}

/// An atom with a polarity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            positive: false,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }

    pub fn eval(&self, model: &Model) -> Result<bool, TheoryError> {
        Ok(self.atom.eval(model)? == self.positive)
    }

    pub fn eval_at(&self, letter: &Value, model: &Model) -> Result<bool, TheoryError> {
        Ok(self.atom.eval_at(letter, model)? == self.positive)
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> String) -> Literal {
        Literal {
            atom: self.atom.rename(map),
            positive: self.positive,
        }
    }

    pub fn substitute(&self, var: &str, t: &LinExpr) -> Literal {
        Literal {
            atom: self.atom.substitute(var, t),
            positive: self.positive,
        }
    }

    /// Truth value when the atom is variable-free.
    pub fn constant_value(&self) -> Option<bool> {
        if self.atom.expr().is_constant() {
            self.atom
                .eval(&Model::new())
                .ok()
                .map(|b| b == self.positive)
        } else {
            None
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Model, TheoryError, Value, CURR};

/// Linear expression `Σ cᵢ·xᵢ + c₀` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is semantic
/// equality of the polynomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinExpr {
    coeffs: BTreeMap<String, BigRational>,
    constant: BigRational,
}

pub fn int(v: i64) -> Value {
    BigRational::from_integer(BigInt::from(v))
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), BigRational::one());
        LinExpr {
            coeffs,
            constant: BigRational::zero(),
        }
    }

    pub fn curr() -> Self {
        Self::var(CURR)
    }

    pub fn constant(v: Value) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: v,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::constant(int(v))
    }

    pub fn coeffs(&self) -> &BTreeMap<String, BigRational> {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &BigRational {
        &self.constant
    }

    pub fn coeff(&self, var: &str) -> BigRational {
        self.coeffs
            .get(var)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.coeffs.contains_key(var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }

    pub fn add_term(&mut self, var: &str, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .coeffs
            .entry(var.to_string())
            .or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(var);
        }
    }

    pub fn scale(&self, k: &BigRational) -> LinExpr {
        if k.is_zero() {
            return LinExpr::zero();
        }
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c * k))
                .collect(),
            constant: &self.constant * k,
        }
    }

    /// Replaces `var` by `replacement`.
    pub fn substitute(&self, var: &str, replacement: &LinExpr) -> LinExpr {
        match self.coeffs.get(var) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(var);
                rest + replacement.scale(c)
            }
        }
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> String) -> LinExpr {
        let mut out = LinExpr::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            out.add_term(&map(v), c);
        }
        out
    }

    pub fn eval(&self, model: &Model) -> Result<Value, TheoryError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let val = model
                .get(v)
                .ok_or_else(|| TheoryError::UnboundSymbol(v.clone()))?;
            acc += c * val;
        }
        Ok(acc)
    }

    /// Evaluates with `curr` bound to `letter`, everything else from `model`.
    pub fn eval_at(&self, letter: &Value, model: &Model) -> Result<Value, TheoryError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let val = if v == CURR {
                letter
            } else {
                model
                    .get(v)
                    .ok_or_else(|| TheoryError::UnboundSymbol(v.clone()))?
            };
            acc += c * val;
        }
        Ok(acc)
    }

    pub fn is_integral(&self) -> bool {
        self.constant.is_integer() && self.coeffs.values().all(|c| c.is_integer())
    }

    /// Smallest positive factor that makes every coefficient an integer
    /// with overall gcd 1.
    pub fn integer_normalizer(&self) -> BigRational {
        let mut lcm = BigInt::one();
        for c in self.coeffs.values().chain(std::iter::once(&self.constant)) {
            lcm = lcm.lcm(c.denom());
        }
        let mut gcd = BigInt::zero();
        for c in self.coeffs.values().chain(std::iter::once(&self.constant)) {
            let n = c.numer() * (&lcm / c.denom());
            gcd = gcd.gcd(&n);
        }
        if gcd.is_zero() {
            return BigRational::one();
        }
        BigRational::new(lcm, gcd)
    }

    /// gcd of the (integer) variable coefficients.
    pub fn coeff_gcd(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            g = g.gcd(c.numer());
        }
        g
    }

    /// Leading (first in name order) coefficient, if any.
    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.values().next()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.coeffs.keys().cloned().collect()
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        for (v, c) in &rhs.coeffs {
            self.add_term(v, c);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self + (-rhs)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scale(&-BigRational::one())
    }
}

impl Mul<&BigRational> for LinExpr {
    type Output = LinExpr;
    fn mul(self, k: &BigRational) -> LinExpr {
        self.scale(k)
    }
}

pub fn fmt_value(v: &Value, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v.is_integer() {
        write!(f, "{}", v.numer())
    } else {
        write!(f, "{}/{}", v.numer(), v.denom())
    }
}

pub fn value_to_string(v: &Value) -> String {
    struct W<'a>(&'a Value);
    impl fmt::Display for W<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            fmt_value(self.0, f)
        }
    }
    W(v).to_string()
}

/// Prints in the s-expression term syntax: `(+ (* 2 curr) p 3)`.
impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (v, c) in &self.coeffs {
            if c.is_one() {
                parts.push(v.clone());
            } else {
                parts.push(format!("(* {} {})", value_to_string(c), v));
            }
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(value_to_string(&self.constant));
        }
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "(+ {})", parts.join(" "))
        }
    }
}

pub fn floor(v: &Value) -> Value {
    BigRational::from_integer(v.floor().to_integer())
}

pub fn ceil(v: &Value) -> Value {
    BigRational::from_integer(v.ceil().to_integer())
}

pub fn is_negative(v: &Value) -> bool {
    v.is_negative()
}

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use super::WordEqError;
use crate::theory::{self, Atom, LinExpr, Literal, Rel, TheoryKind, Value, CURR};

/// The signs of every atom of Φ at one letter, in Φ order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeLetter {
    pub signs: Vec<bool>,
}

impl TypeLetter {
    pub fn literals(&self, atoms: &[Atom]) -> Vec<Literal> {
        atoms
            .iter()
            .zip(&self.signs)
            .map(|(a, s)| Literal {
                atom: a.clone(),
                positive: *s,
            })
            .collect()
    }
}

impl fmt::Display for TypeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            f.write_str(if *s { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Candidate type sets in enumeration order.
pub enum TypeSets {
    /// All subsets of the consistent letters, by size, then
    /// lexicographically with `+` before `-`.
    Subsets {
        letters: Vec<TypeLetter>,
        required: Vec<usize>,
        combo: Vec<usize>,
        exhausted: bool,
    },
    /// One family per feasible ordering of the comparison thresholds.
    Families(std::vec::IntoIter<Vec<TypeLetter>>),
}

/// Streams candidate type sets over `atoms`. Every candidate contains, for
/// each index in `required`, a type where that atom holds.
pub fn enumerate_type_sets(
    theory: TheoryKind,
    atoms: &[Atom],
    required: &[usize],
    cap: usize,
) -> Result<TypeSets, WordEqError> {
    if atoms.len() > cap {
        return Err(WordEqError::TooManyAtoms(atoms.len(), cap));
    }
    if theory == TheoryKind::Lra {
        if let Some(families) = lra_type_families(atoms)? {
            return Ok(TypeSets::Families(families.into_iter()));
        }
    }
    let letters = theory::minterms(theory, atoms)?
        .into_iter()
        .map(|c| TypeLetter {
            signs: c.iter().map(|l| l.positive).collect(),
        })
        .collect();
    Ok(TypeSets::Subsets {
        letters,
        required: required.to_vec(),
        combo: vec![0],
        exhausted: false,
    })
}

fn advance(combo: &mut Vec<usize>, n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    if k == n {
        return false;
    }
    *combo = (0..=k).collect();
    true
}

impl Iterator for TypeSets {
    type Item = Result<Vec<TypeLetter>, WordEqError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            TypeSets::Families(it) => it.next().map(Ok),
            TypeSets::Subsets {
                letters,
                required,
                combo,
                exhausted,
            } => loop {
                if *exhausted || letters.is_empty() {
                    return None;
                }
                let tau: Vec<TypeLetter> = combo.iter().map(|&i| letters[i].clone()).collect();
                *exhausted = !advance(combo, letters.len());
                if required.iter().all(|&r| tau.iter().any(|t| t.signs[r])) {
                    return Some(Ok(tau));
                }
            },
        }
    }
}

/// `(a, θ)` with `atom ≡ a·(curr − θ) rel 0`, or `None` if the atom does
/// not mention `curr`.
fn threshold(atom: &Atom) -> Option<(Value, Rel, LinExpr)> {
    let Atom::Linear { expr, rel } = atom else {
        return None;
    };
    let a = expr.coeff(CURR);
    if a.is_zero() {
        return None;
    }
    let rest = expr.clone() - LinExpr::curr() * &a;
    Some((a.clone(), *rel, rest * &(-a.recip())))
}

/// Ordered partitions of `0..k` into nonempty blocks.
fn weak_orderings(k: usize) -> Vec<Vec<Vec<usize>>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for smaller in weak_orderings(k - 1) {
        let last = k - 1;
        for i in 0..smaller.len() {
            let mut joined = smaller.clone();
            joined[i].push(last);
            out.push(joined);
        }
        for i in 0..=smaller.len() {
            let mut split = smaller.clone();
            split.insert(i, vec![last]);
            out.push(split);
        }
    }
    out
}

/// Type families for LRA atoms that all compare `curr` against a
/// parameter-dependent threshold. For each feasible ordering of the `m`
/// distinct threshold values, the letters below, at and between them give
/// at most `2m + 1` types. Returns `None` if some atom does not mention
/// `curr`.
pub fn lra_type_families(atoms: &[Atom]) -> Result<Option<Vec<Vec<TypeLetter>>>, WordEqError> {
    let mut shape = Vec::with_capacity(atoms.len());
    let mut thresholds: Vec<LinExpr> = Vec::new();
    for atom in atoms {
        let Some((a, rel, theta)) = threshold(atom) else {
            return Ok(None);
        };
        let idx = match thresholds.iter().position(|t| *t == theta) {
            Some(i) => i,
            None => {
                thresholds.push(theta);
                thresholds.len() - 1
            }
        };
        shape.push((a.is_positive(), rel, idx));
    }
    let mut families: Vec<Vec<TypeLetter>> = Vec::new();
    let mut seen = BTreeSet::new();
    for order in weak_orderings(thresholds.len()) {
        let mut lits = Vec::new();
        let mut block = vec![0usize; thresholds.len()];
        for (b, members) in order.iter().enumerate() {
            for &i in members {
                block[i] = b;
            }
            for w in members.windows(2) {
                lits.push(Literal::pos(Atom::linear(
                    thresholds[w[0]].clone() - thresholds[w[1]].clone(),
                    Rel::Eq,
                )));
            }
        }
        for w in order.windows(2) {
            let (lo, hi) = (&thresholds[w[0][0]], &thresholds[w[1][0]]);
            lits.push(Literal::pos(Atom::linear(lo.clone() - hi.clone(), Rel::Lt)));
        }
        if !theory::is_sat(TheoryKind::Lra, &lits)? {
            continue;
        }
        let mut family: Vec<TypeLetter> = Vec::new();
        for region in 0..=2 * order.len() {
            let signs = shape
                .iter()
                .map(|&(positive, rel, i)| {
                    let side = region.cmp(&(2 * block[i] + 1));
                    let side = if positive { side } else { side.reverse() };
                    match rel {
                        Rel::Eq => side == Ordering::Equal,
                        Rel::Le => side != Ordering::Greater,
                        Rel::Lt => side == Ordering::Less,
                    }
                })
                .collect();
            let t = TypeLetter { signs };
            if !family.contains(&t) {
                family.push(t);
            }
        }
        if seen.insert(family.clone()) {
            families.push(family);
        }
    }
    Ok(Some(families))
}

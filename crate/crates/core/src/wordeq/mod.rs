//! Reduction of sequence constraints to word equations over a finite
//! alphabet of letter types.
//!
//! A type is a sign vector over the atom set Φ collected from all guards
//! and equation constants. Guessing the set τ of types that occur in a
//! solution turns every parametric automaton into a classical NFA over τ,
//! and turns the parameters into one satisfiability query over fresh
//! per-type letter variables.

mod bounded;
mod smtlib;
mod types;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::automata::{ParametricAutomaton, RegularConstraint};
use crate::theory::{
    self, Atom, Guard, LinExpr, Literal, Model, Rel, TheoryError, TheoryKind, Value, CURR,
};

pub use bounded::{bounded_solutions, bounded_solve, solve_no_reg, NoRegOutcome, WordSolution};
pub use smtlib::{export_smtlib, parse_letter_map, LETTER_POOL};
pub use types::{enumerate_type_sets, lra_type_families, TypeLetter, TypeSets};

pub const DEFAULT_ATOM_CAP: usize = 16;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WordEqError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("{0} atoms exceed the cap of {1}")]
    TooManyAtoms(usize, usize),
    #[error("atom `{0}` is not in the type atom set")]
    UnknownAtom(String),
    #[error("length bound {0} exceeds the limit {1}")]
    BoundTooLarge(usize, usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0} letters exceed the export pool")]
    AlphabetTooLarge(usize),
    #[error("regular expression exceeds {0} nodes")]
    RegexTooLarge(usize),
}

/// One side entry of an equation: a sequence variable or a single letter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sym {
    Var(String),
    /// A numeral or an element constant.
    Letter(LinExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationalConstraint {
    pub left: Vec<Sym>,
    pub right: Vec<Sym>,
}

impl EquationalConstraint {
    pub fn new(left: Vec<Sym>, right: Vec<Sym>) -> Self {
        EquationalConstraint { left, right }
    }

    fn syms(&self) -> impl Iterator<Item = &Sym> {
        self.left.iter().chain(&self.right)
    }

    pub fn holds(
        &self,
        m: &Model,
        words: &BTreeMap<String, Vec<Value>>,
    ) -> Result<bool, TheoryError> {
        let side = |s: &[Sym]| -> Result<Vec<Value>, TheoryError> {
            let mut out = Vec::new();
            for x in s {
                match x {
                    Sym::Var(v) => out.extend(words.get(v).cloned().unwrap_or_default()),
                    Sym::Letter(c) => out.push(c.eval(m)?),
                }
            }
            Ok(out)
        };
        Ok(side(&self.left)? == side(&self.right)?)
    }
}

/// Equations, regular constraints and linear length constraints. Length
/// constraints are guards whose variables name sequence variables and
/// stand for their lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordEqProblem {
    pub theory: TheoryKind,
    pub equations: Vec<EquationalConstraint>,
    pub regular: Vec<RegularConstraint>,
    pub lengths: Vec<Guard>,
}

impl WordEqProblem {
    pub fn new(theory: TheoryKind) -> Self {
        WordEqProblem {
            theory,
            equations: vec![],
            regular: vec![],
            lengths: vec![],
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in &self.equations {
            for s in e.syms() {
                if let Sym::Var(v) = s {
                    out.insert(v.clone());
                }
            }
        }
        out.extend(self.regular.iter().map(|c| c.var.clone()));
        for g in &self.lengths {
            out.extend(g.params());
        }
        out
    }

    pub fn constants(&self) -> BTreeSet<LinExpr> {
        self.equations
            .iter()
            .flat_map(|e| e.syms())
            .filter_map(|s| match s {
                Sym::Letter(c) => Some(c.clone()),
                Sym::Var(_) => None,
            })
            .collect()
    }

    /// Checks a candidate sequence solution against every constraint.
    pub fn holds(
        &self,
        m: &Model,
        words: &BTreeMap<String, Vec<Value>>,
    ) -> Result<bool, WordEqError> {
        for e in &self.equations {
            if !e.holds(m, words)? {
                return Ok(false);
            }
        }
        for c in &self.regular {
            let w = words.get(&c.var).map(Vec::as_slice).unwrap_or(&[]);
            let ok = c.automaton.accepts(m, w).map_err(|e| match e {
                crate::automata::AutomataError::Theory(t) => WordEqError::Theory(t),
                other => WordEqError::Unsupported(other.to_string()),
            })?;
            if !ok {
                return Ok(false);
            }
        }
        let lens = length_model(words);
        for g in &self.lengths {
            if !g.eval(&Value::from_integer(0.into()), &lens)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn length_model<T>(words: &BTreeMap<String, Vec<T>>) -> Model {
    words
        .iter()
        .map(|(x, w)| (x.clone(), Value::from_integer(w.len().into())))
        .collect()
}

/// The atom `curr = c`.
pub fn singleton_atom(c: &LinExpr) -> Atom {
    Atom::linear(LinExpr::curr() - c.clone(), Rel::Eq)
}

/// Guard atoms of all regular constraints plus `curr = c` for every
/// equation constant `c`, each atom once.
pub fn collect_atoms(p: &WordEqProblem) -> Vec<Atom> {
    let mut out: BTreeSet<Atom> = BTreeSet::new();
    for c in &p.regular {
        out.extend(c.automaton.atoms());
    }
    out.extend(p.constants().iter().map(singleton_atom));
    out.into_iter().collect()
}

/// Name of the letter variable standing for type `i`.
pub fn letter_var(i: usize) -> String {
    format!("a#{i}")
}

/// Every signed atom of every type, with `curr` replaced by that type's
/// letter variable.
pub fn build_param_formula(atoms: &[Atom], tau: &[TypeLetter]) -> Vec<Literal> {
    let mut out = Vec::new();
    for (i, t) in tau.iter().enumerate() {
        let a = LinExpr::var(letter_var(i));
        for (atom, positive) in atoms.iter().zip(&t.signs) {
            out.push(Literal {
                atom: atom.substitute(CURR, &a),
                positive: *positive,
            });
        }
    }
    out
}

/// A classical NFA over letters `0..alphabet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub alphabet: usize,
    pub states: usize,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: BTreeSet<(usize, usize, usize)>,
}

impl Nfa {
    pub fn accepts(&self, w: &[usize]) -> bool {
        let mut cur: BTreeSet<usize> = [self.initial].into();
        for &a in w {
            cur = self
                .transitions
                .iter()
                .filter(|(s, l, _)| *l == a && cur.contains(s))
                .map(|t| t.2)
                .collect();
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|q| self.finals.contains(q))
    }
}

/// Projects `a` onto the type alphabet: `(q, t, q')` is a transition iff
/// some guard from `q` to `q'` holds under the signs of `t`.
pub fn pa_to_nfa(
    a: &ParametricAutomaton,
    atoms: &[Atom],
    tau: &[TypeLetter],
) -> Result<Nfa, WordEqError> {
    let index: BTreeMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    if let Some(missing) = a.atoms().into_iter().find(|x| !index.contains_key(x)) {
        return Err(WordEqError::UnknownAtom(missing.to_string()));
    }
    let mut transitions = BTreeSet::new();
    for tr in &a.transitions {
        for (l, t) in tau.iter().enumerate() {
            if tr.guard.eval_with(&|x| t.signs[index[x]]) {
                transitions.insert((tr.src, l, tr.dst));
            }
        }
    }
    Ok(Nfa {
        alphabet: tau.len(),
        states: a.states.len(),
        initial: a.initial,
        finals: a.finals.clone(),
        transitions,
    })
}

/// A side entry over the type alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WSym {
    Var(String),
    Letter(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordEquation {
    pub left: Vec<WSym>,
    pub right: Vec<WSym>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordEqInstance {
    pub theory: TheoryKind,
    pub atoms: Vec<Atom>,
    pub types: Vec<TypeLetter>,
    pub equations: Vec<WordEquation>,
    pub nfas: Vec<(String, Nfa)>,
    /// Literals over parameters and the letter variables `a#i`.
    pub params: Vec<Literal>,
    pub lengths: Vec<Guard>,
    /// A model of `params`; letter `i` denotes the value of `a#i`.
    pub witness: Model,
}

impl WordEqInstance {
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in &self.equations {
            for s in e.left.iter().chain(&e.right) {
                if let WSym::Var(v) = s {
                    out.insert(v.clone());
                }
            }
        }
        out.extend(self.nfas.iter().map(|(x, _)| x.clone()));
        for g in &self.lengths {
            out.extend(g.params());
        }
        out
    }

    pub fn letter_value(&self, i: usize) -> Value {
        self.witness[&letter_var(i)].clone()
    }

    /// Maps a type-word solution back to parameter values and sequences.
    pub fn lift(&self, s: &WordSolution) -> (Model, BTreeMap<String, Vec<Value>>) {
        let params = self
            .witness
            .iter()
            .filter(|(k, _)| !k.starts_with("a#"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let words = s
            .words
            .iter()
            .map(|(x, w)| (x.clone(), w.iter().map(|&l| self.letter_value(l)).collect()))
            .collect();
        (params, words)
    }
}

impl fmt::Display for WordEqInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &[WSym]| -> String {
            if s.is_empty() {
                return "ε".into();
            }
            s.iter()
                .map(|x| match x {
                    WSym::Var(v) => v.clone(),
                    WSym::Letter(l) => format!("t{l}"),
                })
                .collect::<Vec<_>>()
                .join("·")
        };
        for (i, t) in self.types.iter().enumerate() {
            writeln!(
                f,
                "t{i} = {} ({})",
                t,
                theory::linear::value_to_string(&self.letter_value(i))
            )?;
        }
        for e in &self.equations {
            writeln!(f, "{} = {}", side(&e.left), side(&e.right))?;
        }
        for (x, n) in &self.nfas {
            writeln!(
                f,
                "{x} ∈ NFA({} states, {} transitions)",
                n.states,
                n.transitions.len()
            )?;
        }
        for g in &self.lengths {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ReduceOptions {
    pub atom_cap: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

/// Word-equation instances, one per realizable type set, smallest first.
pub struct Reduction {
    problem: WordEqProblem,
    atoms: Vec<Atom>,
    sets: TypeSets,
}

pub fn reduce(p: &WordEqProblem) -> Result<Reduction, WordEqError> {
    reduce_with(p, &ReduceOptions::default())
}

pub fn reduce_with(p: &WordEqProblem, opts: &ReduceOptions) -> Result<Reduction, WordEqError> {
    let vars = p.variables();
    for c in &p.regular {
        if let Some(x) = c.automaton.params.iter().find(|x| vars.contains(*x)) {
            return Err(WordEqError::Unsupported(format!(
                "guard of `{}` refers to the length of `{x}`",
                c.var
            )));
        }
    }
    let atoms = collect_atoms(p);
    let required: Vec<usize> = p
        .constants()
        .iter()
        .map(|c| {
            atoms
                .iter()
                .position(|a| *a == singleton_atom(c))
                .expect("constant atom collected")
        })
        .collect();
    let sets = enumerate_type_sets(p.theory, &atoms, &required, opts.atom_cap)?;
    Ok(Reduction {
        problem: p.clone(),
        atoms,
        sets,
    })
}

impl Reduction {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn instance(&self, tau: Vec<TypeLetter>) -> Result<Option<WordEqInstance>, WordEqError> {
        let p = &self.problem;
        let params = build_param_formula(&self.atoms, &tau);
        let mut vars: BTreeSet<String> = (0..tau.len()).map(letter_var).collect();
        for l in &params {
            vars.extend(l.atom.free_vars());
        }
        for c in &p.regular {
            vars.extend(c.automaton.params.iter().cloned());
        }
        let Some(witness) = theory::sat_conjunction(p.theory, &params, &vars)? else {
            return Ok(None);
        };
        let letter_of = |c: &LinExpr| -> usize {
            let i = self
                .atoms
                .iter()
                .position(|a| *a == singleton_atom(c))
                .expect("constant atom collected");
            tau.iter()
                .position(|t| t.signs[i])
                .expect("type set covers constants")
        };
        let map_side = |s: &[Sym]| -> Vec<WSym> {
            s.iter()
                .map(|x| match x {
                    Sym::Var(v) => WSym::Var(v.clone()),
                    Sym::Letter(c) => WSym::Letter(letter_of(c)),
                })
                .collect()
        };
        let equations = p
            .equations
            .iter()
            .map(|e| WordEquation {
                left: map_side(&e.left),
                right: map_side(&e.right),
            })
            .collect();
        let mut nfas = Vec::with_capacity(p.regular.len());
        for c in &p.regular {
            nfas.push((c.var.clone(), pa_to_nfa(&c.automaton, &self.atoms, &tau)?));
        }
        Ok(Some(WordEqInstance {
            theory: p.theory,
            atoms: self.atoms.clone(),
            types: tau,
            equations,
            nfas,
            params,
            lengths: p.lengths.clone(),
            witness,
        }))
    }
}

impl Iterator for Reduction {
    type Item = Result<WordEqInstance, WordEqError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let tau = match self.sets.next()? {
                Ok(t) => t,
                Err(e) => return Some(Err(e)),
            };
            match self.instance(tau) {
                Ok(Some(inst)) => return Some(Ok(inst)),
                Ok(None) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

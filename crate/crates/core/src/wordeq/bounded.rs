use std::collections::{BTreeMap, BTreeSet};

use super::{
    length_model, letter_var, singleton_atom, EquationalConstraint, Sym, TypeLetter, WSym,
    WordEqError, WordEqInstance, WordEquation,
};
use crate::theory::{self, Atom, Guard, LinExpr, Literal, Model, Rel, TheoryKind, Value};

/// One word over the type alphabet per variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WordSolution {
    pub words: BTreeMap<String, Vec<usize>>,
}

fn check_bound(inst: &WordEqInstance, bound: usize) -> Result<Vec<String>, WordEqError> {
    let mut order: Vec<String> = Vec::new();
    for e in &inst.equations {
        for s in e.left.iter().chain(&e.right) {
            if let WSym::Var(v) = s {
                if !order.contains(v) {
                    order.push(v.clone());
                }
            }
        }
    }
    for v in inst.variables() {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let limit = 8 * order.len().max(1);
    if bound > limit {
        return Err(WordEqError::BoundTooLarge(bound, limit));
    }
    Ok(order)
}

fn words_up_to(alphabet: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..bound {
        if alphabet == 0 {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * alphabet);
        for w in &layer {
            for a in 0..alphabet {
                let mut w2: Vec<usize> = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Expands a side with unassigned variables as `None` blocks.
fn expand(side: &[WSym], asg: &BTreeMap<String, Vec<usize>>) -> Vec<Option<usize>> {
    let mut out = Vec::new();
    for s in side {
        match s {
            WSym::Letter(l) => out.push(Some(*l)),
            WSym::Var(v) => match asg.get(v) {
                Some(w) => out.extend(w.iter().map(|&l| Some(l))),
                None => out.push(None),
            },
        }
    }
    out
}

/// False if the assigned part already contradicts the equation.
fn consistent(e: &WordEquation, asg: &BTreeMap<String, Vec<usize>>) -> bool {
    let (l, r) = (expand(&e.left, asg), expand(&e.right, asg));
    let (lo, ro) = (l.iter().all(Option::is_some), r.iter().all(Option::is_some));
    if lo && ro {
        return l == r;
    }
    let known = |s: &[Option<usize>]| s.iter().filter(|x| x.is_some()).count();
    if (lo && known(&r) > l.len()) || (ro && known(&l) > r.len()) {
        return false;
    }
    for (a, b) in l.iter().zip(&r) {
        match (a, b) {
            (Some(x), Some(y)) if x != y => return false,
            (Some(_), Some(_)) => {}
            _ => break,
        }
    }
    for (a, b) in l.iter().rev().zip(r.iter().rev()) {
        match (a, b) {
            (Some(x), Some(y)) if x != y => return false,
            (Some(_), Some(_)) => {}
            _ => break,
        }
    }
    true
}

struct Enum<'a> {
    inst: &'a WordEqInstance,
    order: Vec<String>,
    candidates: Vec<Vec<Vec<usize>>>,
    asg: BTreeMap<String, Vec<usize>>,
}

impl Enum<'_> {
    fn run(
        &mut self,
        depth: usize,
        visit: &mut dyn FnMut(WordSolution) -> bool,
    ) -> Result<bool, WordEqError> {
        if depth == self.order.len() {
            if !self.inst.equations.iter().all(|e| consistent(e, &self.asg)) {
                return Ok(true);
            }
            let lens = length_model(&self.asg);
            for g in &self.inst.lengths {
                if !g.eval(&Value::from_integer(0.into()), &lens)? {
                    return Ok(true);
                }
            }
            return Ok(visit(WordSolution {
                words: self.asg.clone(),
            }));
        }
        let var = self.order[depth].clone();
        for i in 0..self.candidates[depth].len() {
            let w = self.candidates[depth][i].clone();
            self.asg.insert(var.clone(), w);
            if self.inst.equations.iter().all(|e| consistent(e, &self.asg))
                && !self.run(depth + 1, visit)?
            {
                self.asg.remove(&var);
                return Ok(false);
            }
        }
        self.asg.remove(&var);
        Ok(true)
    }
}

fn search(
    inst: &WordEqInstance,
    bound: usize,
    visit: &mut dyn FnMut(WordSolution) -> bool,
) -> Result<(), WordEqError> {
    let order = check_bound(inst, bound)?;
    let all = words_up_to(inst.types.len(), bound);
    let candidates = order
        .iter()
        .map(|x| {
            all.iter()
                .filter(|w| {
                    inst.nfas
                        .iter()
                        .filter(|(v, _)| v == x)
                        .all(|(_, n)| n.accepts(w))
                })
                .cloned()
                .collect()
        })
        .collect();
    Enum {
        inst,
        order,
        candidates,
        asg: BTreeMap::new(),
    }
    .run(0, visit)?;
    Ok(())
}

/// The first assignment with every word of length at most `bound`, or
/// `None`. `None` says nothing about longer solutions.
pub fn bounded_solve(
    inst: &WordEqInstance,
    bound: usize,
) -> Result<Option<WordSolution>, WordEqError> {
    let mut found = None;
    search(inst, bound, &mut |s| {
        found = Some(s);
        false
    })?;
    Ok(found)
}

/// Every solution with all words of length at most `bound`.
pub fn bounded_solutions(
    inst: &WordEqInstance,
    bound: usize,
) -> Result<Vec<WordSolution>, WordEqError> {
    let mut out = Vec::new();
    search(inst, bound, &mut |s| {
        out.push(s);
        true
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoRegOutcome {
    Sat {
        params: Model,
        words: BTreeMap<String, Vec<Value>>,
    },
    Unsat,
    /// Some constant partition is feasible, the bounded search found no
    /// solution and the letter-count argument did not refute it.
    Unknown,
}

/// Restricted growth strings: `class[i]` is the block of constant `i`.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            cur.push(b);
            go(n, cur, out);
            cur.pop();
        }
    }
    go(n, &mut cur, &mut out);
    out
}

/// Letter counts must balance on both sides of every equation, per
/// class. Unsatisfiability over the naturals refutes the partition.
fn parikh_refutes(equations: &[WordEquation], classes: usize) -> Result<bool, WordEqError> {
    let vars: BTreeSet<String> = equations
        .iter()
        .flat_map(|e| e.left.iter().chain(&e.right))
        .filter_map(|s| match s {
            WSym::Var(v) => Some(v.clone()),
            WSym::Letter(_) => None,
        })
        .collect();
    let count = |x: &str, c: usize| LinExpr::var(format!("n#{x}#{c}"));
    let mut lits = Vec::new();
    for x in &vars {
        for c in 0..classes {
            lits.push(Literal::pos(Atom::linear(-count(x, c), Rel::Le)));
        }
    }
    for e in equations {
        for c in 0..classes {
            let mut sum = LinExpr::zero();
            for (side, sign) in [(&e.left, 1), (&e.right, -1)] {
                for s in side {
                    sum = sum
                        + match s {
                            WSym::Var(x) => count(x, c) * &Value::from_integer(sign.into()),
                            WSym::Letter(l) if *l == c => LinExpr::from_i64(sign),
                            WSym::Letter(_) => LinExpr::zero(),
                        };
                }
            }
            lits.push(Literal::pos(Atom::linear(sum, Rel::Eq)));
        }
    }
    Ok(!theory::is_sat(TheoryKind::Lia, &lits)?)
}

/// Element and equational constraints without regular constraints: try
/// every partition of the equation constants into equal classes, then
/// solve the equations over one letter per class.
pub fn solve_no_reg(
    theory: TheoryKind,
    element: &[Guard],
    equations: &[EquationalConstraint],
    bound: usize,
) -> Result<NoRegOutcome, WordEqError> {
    let constants: Vec<LinExpr> = equations
        .iter()
        .flat_map(|e| e.left.iter().chain(&e.right))
        .filter_map(|s| match s {
            Sym::Letter(c) => Some(c.clone()),
            Sym::Var(_) => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let phi = Guard::and(element.to_vec()).to_dnf();
    let mut unknown = false;
    for class in partitions(constants.len()) {
        let n_classes = class.iter().max().map_or(0, |m| m + 1);
        let mut psi = Vec::new();
        for i in 0..constants.len() {
            for j in i + 1..constants.len() {
                let eq = Atom::linear(constants[i].clone() - constants[j].clone(), Rel::Eq);
                psi.push(Literal {
                    atom: eq,
                    positive: class[i] == class[j],
                });
            }
        }
        let mut model = None;
        for d in &phi {
            let lits: Vec<Literal> = d.iter().chain(&psi).cloned().collect();
            let vars = lits
                .iter()
                .flat_map(|l| l.atom.free_vars())
                .chain(constants.iter().flat_map(|c| c.free_vars()))
                .collect();
            if let Some(m) = theory::sat_conjunction(theory, &lits, &vars)? {
                model = Some(m);
                break;
            }
        }
        let Some(model) = model else { continue };
        let letter = |c: &LinExpr| {
            class[constants
                .iter()
                .position(|k| k == c)
                .expect("collected constant")]
        };
        let map_side = |s: &[Sym]| -> Vec<WSym> {
            s.iter()
                .map(|x| match x {
                    Sym::Var(v) => WSym::Var(v.clone()),
                    Sym::Letter(c) => WSym::Letter(letter(c)),
                })
                .collect()
        };
        let eqs: Vec<WordEquation> = equations
            .iter()
            .map(|e| WordEquation {
                left: map_side(&e.left),
                right: map_side(&e.right),
            })
            .collect();
        let mut witness = model.clone();
        for b in 0..n_classes {
            let rep = class.iter().position(|&k| k == b).expect("nonempty class");
            witness.insert(letter_var(b), constants[rep].eval(&model)?);
        }
        let inst = WordEqInstance {
            theory,
            atoms: constants.iter().map(singleton_atom).collect(),
            types: (0..n_classes)
                .map(|_| TypeLetter { signs: vec![] })
                .collect(),
            equations: eqs,
            nfas: vec![],
            params: vec![],
            lengths: vec![],
            witness,
        };
        let nvars = inst.variables().len().max(1);
        if let Some(s) = bounded_solve(&inst, bound.min(8 * nvars))? {
            let (params, words) = inst.lift(&s);
            return Ok(NoRegOutcome::Sat { params, words });
        }
        if !parikh_refutes(&inst.equations, n_classes)? {
            unknown = true;
        }
    }
    Ok(if unknown {
        NoRegOutcome::Unknown
    } else {
        NoRegOutcome::Unsat
    })
}

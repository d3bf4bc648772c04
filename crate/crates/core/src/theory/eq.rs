use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::atom::{EqTerm, Literal};
use super::linear::int;
use super::{Model, TheoryError, Value};

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind { parent: Vec::new() }
    }

    fn add(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Congruence closure degenerates to union-find: there are no function
/// symbols. The domain is infinite, so any disequality set that survives
/// the class check is realizable with fresh ids.
pub(super) fn solve(
    literals: &[Literal],
    vars: &BTreeSet<String>,
) -> Result<Option<Model>, TheoryError> {
    let mut uf = UnionFind::new();
    let mut index: BTreeMap<EqTerm, usize> = BTreeMap::new();
    let mut id = |t: EqTerm, uf: &mut UnionFind| *index.entry(t).or_insert_with(|| uf.add());

    let mut diseqs = Vec::new();
    for l in literals {
        let (a, b) = l.atom.eq_terms().ok_or_else(|| {
            TheoryError::TheoryMismatch(format!("{} is not an equality atom", l.atom))
        })?;
        let (ia, ib) = (id(a, &mut uf), id(b, &mut uf));
        if l.positive {
            uf.union(ia, ib);
        } else {
            diseqs.push((ia, ib));
        }
    }
    for v in vars {
        id(EqTerm::Var(v.clone()), &mut uf);
    }
    let terms: Vec<(EqTerm, usize)> = index.iter().map(|(t, i)| (t.clone(), *i)).collect();

    // A class may hold at most one concrete value.
    let mut class_value: BTreeMap<usize, Value> = BTreeMap::new();
    for (t, i) in &terms {
        if let EqTerm::Val(v) = t {
            let r = uf.find(*i);
            match class_value.get(&r) {
                Some(w) if w != v => return Ok(None),
                _ => {
                    class_value.insert(r, v.clone());
                }
            }
        }
    }
    for (a, b) in diseqs {
        if uf.find(a) == uf.find(b) {
            return Ok(None);
        }
    }

    let used: BTreeSet<Value> = class_value.values().cloned().collect();
    let mut next = BigRational::zero();
    let mut fresh = || {
        while used.contains(&next) || next.is_negative() {
            next += int(1);
        }
        let v = next.clone();
        next += int(1);
        v
    };
    let mut model = Model::new();
    for (t, i) in &terms {
        if let EqTerm::Var(name) = t {
            let r = uf.find(*i);
            let v = match class_value.get(&r) {
                Some(v) => v.clone(),
                None => {
                    let v = fresh();
                    class_value.insert(r, v.clone());
                    v
                }
            };
            model.insert(name.clone(), v);
        }
    }
    Ok(Some(model))
}

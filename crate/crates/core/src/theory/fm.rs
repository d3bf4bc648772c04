//! Fourier–Motzkin elimination over exact rationals, with branch-and-bound
//! on top for the integer theory.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::atom::{Atom, Literal, Rel};
use super::linear::{ceil, floor, int, LinExpr};
use super::{Model, SatOptions, TheoryError, Value};

/// `expr REL 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Cons {
    expr: LinExpr,
    rel: Rel,
}

impl Cons {
    fn new(expr: LinExpr, rel: Rel) -> Cons {
        let expr = expr.scale(&expr.integer_normalizer());
        Cons { expr, rel }
    }

    /// `Some(truth)` when the constraint has no variables.
    fn trivial(&self) -> Option<bool> {
        if !self.expr.is_constant() {
            return None;
        }
        let k = self.expr.constant_term();
        Some(match self.rel {
            Rel::Eq => k.is_zero(),
            Rel::Le => !k.is_positive(),
            Rel::Lt => k.is_negative(),
        })
    }
}

struct Search<'a> {
    integer: bool,
    opts: &'a SatOptions,
    branchings: usize,
    fresh: usize,
}

impl Search<'_> {
    fn fresh_var(&mut self) -> String {
        self.fresh += 1;
        format!("#q{}", self.fresh)
    }
}

pub(super) fn solve(
    literals: &[Literal],
    vars: &BTreeSet<String>,
    integer: bool,
    opts: &SatOptions,
) -> Result<Option<Model>, TheoryError> {
    let mut search = Search {
        integer,
        opts,
        branchings: 0,
        fresh: 0,
    };
    let mut base = Vec::new();
    let mut diseqs = Vec::new();
    let mut noncongs = Vec::new();
    for l in literals {
        match (&l.atom, l.positive) {
            (Atom::Linear { expr, rel }, true) => base.push(Cons::new(expr.clone(), *rel)),
            (Atom::Linear { expr, rel: Rel::Eq }, false) => diseqs.push(expr.clone()),
            (Atom::Linear { expr, rel: Rel::Le }, false) => {
                base.push(Cons::new(-expr.clone(), Rel::Lt))
            }
            (Atom::Linear { expr, rel: Rel::Lt }, false) => {
                base.push(Cons::new(-expr.clone(), Rel::Le))
            }
            (
                Atom::Congruence {
                    expr,
                    modulus,
                    residue,
                },
                true,
            ) => {
                let q = search.fresh_var();
                base.push(congruence_cons(expr, modulus, residue, &q));
            }
            (
                Atom::Congruence {
                    expr,
                    modulus,
                    residue,
                },
                false,
            ) => noncongs.push((expr.clone(), modulus.clone(), residue.clone())),
        }
    }
    let found = search.with_disequalities(base, diseqs, noncongs)?;
    Ok(found.map(|mut m| {
        m.retain(|k, _| !k.starts_with('#'));
        for l in literals {
            for v in l.atom.free_vars() {
                m.entry(v).or_insert_with(BigRational::zero);
            }
        }
        for v in vars {
            m.entry(v.clone()).or_insert_with(BigRational::zero);
        }
        m
    }))
}

fn congruence_cons(expr: &LinExpr, modulus: &BigInt, residue: &BigInt, q: &str) -> Cons {
    let m = BigRational::from_integer(modulus.clone());
    let r = BigRational::from_integer(residue.clone());
    Cons::new(
        expr.clone() - LinExpr::constant(r) - LinExpr::var(q).scale(&m),
        Rel::Eq,
    )
}

fn eval_default(e: &LinExpr, m: &Model) -> Value {
    let mut acc = e.constant_term().clone();
    for (v, c) in e.coeffs() {
        if let Some(x) = m.get(v) {
            acc += c * x;
        }
    }
    acc
}

impl Search<'_> {
    /// Disequalities and negated congruences are split lazily: solve
    /// without them, then branch only on the first one the model violates.
    fn with_disequalities(
        &mut self,
        base: Vec<Cons>,
        diseqs: Vec<LinExpr>,
        noncongs: Vec<(LinExpr, BigInt, BigInt)>,
    ) -> Result<Option<Model>, TheoryError> {
        let Some(model) = self.core(base.clone())? else {
            return Ok(None);
        };
        if let Some(pos) = diseqs
            .iter()
            .position(|d| eval_default(d, &model).is_zero())
        {
            let mut rest = diseqs.clone();
            let d = rest.remove(pos);
            for side in [d.clone(), -d] {
                let mut b = base.clone();
                b.push(Cons::new(side, Rel::Lt));
                if let Some(m) = self.with_disequalities(b, rest.clone(), noncongs.clone())? {
                    return Ok(Some(m));
                }
            }
            return Ok(None);
        }
        let violated = noncongs.iter().position(|(e, m, r)| {
            let v = eval_default(e, &model);
            v.is_integer() && v.to_integer().mod_floor(m) == *r
        });
        if let Some(pos) = violated {
            let mut rest = noncongs.clone();
            let (e, m, r) = rest.remove(pos);
            let mut other = BigInt::zero();
            while other < m {
                if other != r {
                    let q = self.fresh_var();
                    let mut b = base.clone();
                    b.push(congruence_cons(&e, &m, &other, &q));
                    if let Some(found) = self.with_disequalities(b, diseqs.clone(), rest.clone())? {
                        return Ok(Some(found));
                    }
                }
                other += 1;
            }
            return Ok(None);
        }
        Ok(Some(model))
    }

    fn core(&mut self, cons: Vec<Cons>) -> Result<Option<Model>, TheoryError> {
        if !self.integer {
            return Ok(solve_rational(cons, false));
        }
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for c in cons {
            match c.rel {
                Rel::Eq => eqs.push(c.expr),
                // Integer coefficients: e < 0 iff e + 1 <= 0.
                Rel::Lt => ineqs.push(c.expr + LinExpr::constant(int(1))),
                Rel::Le => ineqs.push(c.expr),
            }
        }
        let Some(defs) = eliminate_integer_equalities(&mut eqs, &mut ineqs, &mut self.fresh) else {
            return Ok(None);
        };
        let mut tightened = Vec::with_capacity(ineqs.len());
        for e in ineqs {
            let c = tighten(e);
            match c.trivial() {
                Some(true) => {}
                Some(false) => return Ok(None),
                None => tightened.push(c),
            }
        }
        let budget = self.branchings;
        let relaxed = match self.branch_and_bound(tightened.clone()) {
            Err(TheoryError::BranchLimit(_)) if self.opts.exact_fallback => {
                self.branchings = budget;
                omega(
                    tightened.into_iter().map(|c| c.expr).collect(),
                    &mut self.fresh,
                )
            }
            other => other?,
        };
        let Some(mut model) = relaxed else {
            return Ok(None);
        };
        for (x, def) in defs.iter().rev() {
            for v in def.vars() {
                model.entry(v.clone()).or_insert_with(BigRational::zero);
            }
            let v = eval_default(def, &model);
            model.insert(x.clone(), v);
        }
        Ok(Some(model))
    }
}

/// Solves the equalities over the integers by unimodular substitutions
/// (Euclid on the coefficients), rewriting `ineqs` along the way.
/// Returns the definitions in elimination order, or `None` if some
/// equality has no integer solution.
fn eliminate_integer_equalities(
    eqs: &mut Vec<LinExpr>,
    ineqs: &mut [LinExpr],
    fresh: &mut usize,
) -> Option<Vec<(String, LinExpr)>> {
    let mut defs = Vec::new();
    while let Some(e) = eqs.pop() {
        let e = e.scale(&e.integer_normalizer());
        if e.is_constant() {
            if e.constant_term().is_zero() {
                continue;
            }
            return None;
        }
        let g = e.coeff_gcd();
        if !e.constant_term().to_integer().is_multiple_of(&g) {
            return None;
        }
        let (x, a) = e
            .coeffs()
            .iter()
            .min_by_key(|(_, c)| c.abs())
            .map(|(v, c)| (v.clone(), c.clone()))
            .unwrap();
        let def = if a.abs().is_one() {
            // x = -(e - a·x) / a
            let mut rest = e.clone();
            rest.add_term(&x, &-a.clone());
            rest.scale(&-a.recip())
        } else {
            // x = x' - Σ ⌊aᵢ/a⌋·xᵢ - ⌊c/a⌋ turns a·x + Σ aᵢxᵢ + c into
            // a·x' + Σ (aᵢ mod a)·xᵢ + (c mod a).
            *fresh += 1;
            let mut def = LinExpr::var(format!("#q{fresh}"));
            for (v, c) in e.coeffs() {
                if *v != x {
                    def.add_term(v, &-floor(&(c / &a)));
                }
            }
            def - LinExpr::constant(floor(&(e.constant_term() / &a)))
        };
        let rewritten = e.substitute(&x, &def);
        if !a.abs().is_one() {
            eqs.push(rewritten);
        }
        for other in eqs.iter_mut() {
            *other = other.substitute(&x, &def);
        }
        for other in ineqs.iter_mut() {
            *other = other.substitute(&x, &def);
        }
        defs.push((x, def));
    }
    Some(defs)
}

impl Search<'_> {
    fn branch_and_bound(&mut self, cons: Vec<Cons>) -> Result<Option<Model>, TheoryError> {
        let Some(model) = solve_rational(cons.clone(), true) else {
            return Ok(None);
        };
        let fractional = model.iter().find(|(_, v)| !v.is_integer());
        let Some((var, val)) = fractional else {
            return Ok(Some(model));
        };
        self.branchings += 1;
        if self.branchings > self.opts.branch_limit {
            return Err(TheoryError::BranchLimit(self.opts.branch_limit));
        }
        let x = LinExpr::var(var.clone());
        let down = Cons::new(x.clone() - LinExpr::constant(floor(val)), Rel::Le);
        let up = Cons::new(LinExpr::constant(ceil(val)) - x, Rel::Le);
        for extra in [down, up] {
            let mut c = cons.clone();
            c.push(extra);
            if let Some(m) = self.branch_and_bound(c)? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }
}

/// `e <= 0` with integer coefficients divided by their gcd and the
/// constant rounded up.
fn tighten(e: LinExpr) -> Cons {
    let e = e.scale(&e.integer_normalizer());
    let g = e.coeff_gcd();
    if g.is_zero() || g.is_one() {
        return Cons {
            expr: e,
            rel: Rel::Le,
        };
    }
    let g = BigRational::from_integer(g);
    let k = e.constant_term().clone();
    let scaled = (e - LinExpr::constant(k.clone())).scale(&g.recip());
    Cons {
        expr: scaled + LinExpr::constant(ceil(&(k / g))),
        rel: Rel::Le,
    }
}

/// A bound on the eliminated variable: `x >= e` (lower) or `x <= e` (upper).
struct Stage {
    var: String,
    lowers: Vec<(LinExpr, bool)>,
    uppers: Vec<(LinExpr, bool)>,
}

fn insert(set: &mut BTreeSet<Cons>, c: Cons) -> bool {
    match c.trivial() {
        Some(true) => true,
        Some(false) => false,
        None => {
            set.insert(c);
            true
        }
    }
}

/// Rational feasibility with model extraction. With `prefer_int` the
/// back-substitution picks integers whenever the interval allows.
fn solve_rational(cons: Vec<Cons>, prefer_int: bool) -> Option<Model> {
    // Gaussian elimination of equalities.
    let mut defs: Vec<(String, LinExpr)> = Vec::new();
    let mut rest: Vec<Cons> = Vec::new();
    let mut eqs: Vec<Cons> = Vec::new();
    for c in cons {
        match c.trivial() {
            Some(true) => {}
            Some(false) => return None,
            None if c.rel == Rel::Eq => eqs.push(c),
            None => rest.push(c),
        }
    }
    while let Some(e) = eqs.pop() {
        let Some((x, a)) = pick_pivot(&e.expr) else {
            if !e.expr.constant_term().is_zero() {
                return None;
            }
            continue;
        };
        let mut rhs = e.expr.clone();
        rhs.add_term(&x, &-a.clone());
        let def = rhs.scale(&(-a.recip()));
        let subst = |c: Cons| Cons::new(c.expr.substitute(&x, &def), c.rel);
        let mut next_eqs = Vec::with_capacity(eqs.len());
        for c in eqs.drain(..) {
            let c = subst(c);
            match c.trivial() {
                Some(true) => {}
                Some(false) => return None,
                None => next_eqs.push(c),
            }
        }
        eqs = next_eqs;
        rest = rest.into_iter().map(subst).collect();
        defs.push((x, def));
    }

    let mut current: BTreeSet<Cons> = BTreeSet::new();
    for c in rest {
        if !insert(&mut current, c) {
            return None;
        }
    }

    let mut stages: Vec<Stage> = Vec::new();
    loop {
        let mut counts: std::collections::BTreeMap<&String, (usize, usize)> = Default::default();
        for c in &current {
            for (v, a) in c.expr.coeffs() {
                let e = counts.entry(v).or_default();
                if a.is_positive() {
                    e.1 += 1;
                } else {
                    e.0 += 1;
                }
            }
        }
        let Some(var) = counts
            .iter()
            .min_by_key(|(_, (l, u))| (l * u) as i64 - (*l + *u) as i64)
            .map(|(v, _)| (*v).clone())
        else {
            break;
        };
        let mut stage = Stage {
            var: var.clone(),
            lowers: vec![],
            uppers: vec![],
        };
        let mut next = BTreeSet::new();
        for c in std::mem::take(&mut current) {
            let a = c.expr.coeff(&var);
            if a.is_zero() {
                next.insert(c);
                continue;
            }
            let mut r = c.expr.clone();
            r.add_term(&var, &-a.clone());
            // a·x + r REL 0  ⇒  x REL' -r/a
            let bound = r.scale(&(-a.recip()));
            let strict = c.rel == Rel::Lt;
            if a.is_positive() {
                stage.uppers.push((bound, strict));
            } else {
                stage.lowers.push((bound, strict));
            }
        }
        for (l, sl) in &stage.lowers {
            for (u, su) in &stage.uppers {
                let rel = if *sl || *su { Rel::Lt } else { Rel::Le };
                if !insert(&mut next, Cons::new(l.clone() - u.clone(), rel)) {
                    return None;
                }
            }
        }
        current = next;
        stages.push(stage);
    }

    let mut model = Model::new();
    for stage in stages.iter().rev() {
        let lo = tightest(&stage.lowers, &model, true);
        let hi = tightest(&stage.uppers, &model, false);
        model.insert(stage.var.clone(), pick_value(lo, hi, prefer_int));
    }
    for (x, def) in defs.iter().rev() {
        let v = eval_default(def, &model);
        model.insert(x.clone(), v);
    }
    // Variables that cancelled out everywhere.
    for (_, def) in &defs {
        for v in def.vars() {
            model.entry(v.clone()).or_insert_with(BigRational::zero);
        }
    }
    Some(model)
}

fn pick_pivot(e: &LinExpr) -> Option<(String, BigRational)> {
    let unit = e
        .coeffs()
        .iter()
        .find(|(_, c)| c.abs().is_one())
        .or_else(|| e.coeffs().iter().next())?;
    Some((unit.0.clone(), unit.1.clone()))
}

fn tightest(bounds: &[(LinExpr, bool)], m: &Model, lower: bool) -> Option<(Value, bool)> {
    let mut best: Option<(Value, bool)> = None;
    for (e, strict) in bounds {
        let v = eval_default(e, m);
        best = match best {
            None => Some((v, *strict)),
            Some((b, bs)) => {
                let better = if lower { v > b } else { v < b };
                if better {
                    Some((v, *strict))
                } else if v == b {
                    Some((b, bs || *strict))
                } else {
                    Some((b, bs))
                }
            }
        };
    }
    best
}

fn within(v: &Value, lo: &Option<(Value, bool)>, hi: &Option<(Value, bool)>) -> bool {
    let lo_ok = match lo {
        None => true,
        Some((l, s)) => {
            if *s {
                v > l
            } else {
                v >= l
            }
        }
    };
    let hi_ok = match hi {
        None => true,
        Some((h, s)) => {
            if *s {
                v < h
            } else {
                v <= h
            }
        }
    };
    lo_ok && hi_ok
}

fn pick_value(lo: Option<(Value, bool)>, hi: Option<(Value, bool)>, prefer_int: bool) -> Value {
    let zero = BigRational::zero();
    if within(&zero, &lo, &hi) {
        return zero;
    }
    if prefer_int {
        let candidate = match (&lo, &hi) {
            (Some((l, s)), _) => {
                let c = ceil(l);
                if *s && &c == l {
                    c + int(1)
                } else {
                    c
                }
            }
            (None, Some((h, s))) => {
                let c = floor(h);
                if *s && &c == h {
                    c - int(1)
                } else {
                    c
                }
            }
            (None, None) => zero.clone(),
        };
        if within(&candidate, &lo, &hi) {
            return candidate;
        }
    }
    match (lo, hi) {
        (Some((l, _)), Some((h, _))) => {
            if l == h {
                l
            } else {
                (l + h) / int(2)
            }
        }
        (Some((l, _)), None) => l + int(1),
        (None, Some((h, _))) => h - int(1),
        (None, None) => zero,
    }
}

/// Exact integer feasibility of `e <= 0` constraints by Omega-style
/// elimination: exact shadow when a unit coefficient allows it, otherwise
/// dark shadow followed by splinters.
fn omega(ineqs: Vec<LinExpr>, fresh: &mut usize) -> Option<Model> {
    omega_system(Vec::new(), ineqs, fresh)
}

fn omega_system(
    mut eqs: Vec<LinExpr>,
    mut ineqs: Vec<LinExpr>,
    fresh: &mut usize,
) -> Option<Model> {
    let defs = eliminate_integer_equalities(&mut eqs, &mut ineqs, fresh)?;
    let mut set = BTreeSet::new();
    for e in ineqs {
        if !insert(&mut set, tighten(e)) {
            return None;
        }
    }
    let mut model = omega_ineqs(set.into_iter().map(|c| c.expr).collect(), fresh)?;
    for (x, def) in defs.iter().rev() {
        for v in def.vars() {
            model.entry(v.clone()).or_insert_with(BigRational::zero);
        }
        let v = eval_default(def, &model);
        model.insert(x.clone(), v);
    }
    Some(model)
}

fn omega_ineqs(ineqs: Vec<LinExpr>, fresh: &mut usize) -> Option<Model> {
    let vars: BTreeSet<&String> = ineqs.iter().flat_map(|e| e.vars()).collect();
    let score = |x: &String| {
        let (mut lo, mut hi, mut lo_unit, mut hi_unit) = (0usize, 0usize, true, true);
        for e in &ineqs {
            let c = e.coeff(x);
            if c.is_negative() {
                lo += 1;
                lo_unit &= c.abs().is_one();
            } else if c.is_positive() {
                hi += 1;
                hi_unit &= c.abs().is_one();
            }
        }
        (!(lo_unit || hi_unit), lo * hi)
    };
    let Some(x) = vars.iter().min_by_key(|x| score(x)).map(|x| (*x).clone()) else {
        return Some(Model::new());
    };
    let (inexact, _) = score(&x);

    // a·x >= rl for lowers, b·x <= -ru for uppers, read off e = c·x + r.
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    let mut rest = Vec::new();
    for e in &ineqs {
        let c = e.coeff(&x);
        if c.is_zero() {
            rest.push(e.clone());
            continue;
        }
        let mut r = e.clone();
        r.add_term(&x, &-c.clone());
        if c.is_negative() {
            lowers.push((-c, r));
        } else {
            uppers.push((c, r));
        }
    }
    let shadow = |dark: bool| -> Vec<LinExpr> {
        let mut out = rest.clone();
        for (a, rl) in &lowers {
            for (b, ru) in &uppers {
                let mut e = rl.scale(b) + ru.scale(a);
                if dark {
                    let slack = (a - int(1)) * (b - int(1));
                    e = e + LinExpr::constant(slack);
                }
                out.push(e);
            }
        }
        out
    };

    let sub = if !inexact || lowers.is_empty() || uppers.is_empty() {
        omega_system(Vec::new(), shadow(false), fresh)
    } else {
        omega_system(Vec::new(), shadow(true), fresh)
    };
    let Some(mut model) = sub else {
        if !inexact || lowers.is_empty() || uppers.is_empty() {
            return None;
        }
        let b_max = uppers.iter().map(|(b, _)| b.clone()).max().unwrap();
        for (a, rl) in &lowers {
            let top = floor(&((a * &b_max - a - &b_max) / &b_max));
            let mut k = BigRational::zero();
            while k <= top {
                let eq =
                    LinExpr::var(x.as_str()).scale(a) - rl.clone() - LinExpr::constant(k.clone());
                if let Some(m) = omega_system(vec![eq], ineqs.clone(), fresh) {
                    return Some(m);
                }
                k += int(1);
            }
        }
        return None;
    };

    for (_, r) in lowers.iter().chain(&uppers) {
        for v in r.vars() {
            model.entry(v.clone()).or_insert_with(BigRational::zero);
        }
    }
    let lo = lowers
        .iter()
        .map(|(a, rl)| ceil(&(eval_default(rl, &model) / a)))
        .max();
    let hi = uppers
        .iter()
        .map(|(b, ru)| floor(&(-eval_default(ru, &model) / b)))
        .min();
    let zero = BigRational::zero();
    let v = match (lo, hi) {
        (Some(l), Some(h)) => {
            debug_assert!(l <= h);
            if l <= zero && zero <= h {
                zero
            } else if l > zero {
                l
            } else {
                h
            }
        }
        (Some(l), None) => {
            if l > zero {
                l
            } else {
                zero
            }
        }
        (None, Some(h)) => {
            if h < zero {
                h
            } else {
                zero
            }
        }
        (None, None) => zero,
    };
    model.insert(x, v);
    Some(model)
}

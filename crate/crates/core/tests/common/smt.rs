//! A strict SMT-LIB 2.6 reader for the fragment the exporter may emit,
//! with sort checking and an evaluator for checking exported models.
//!
//! Accepted commands: `set-logic`, `set-info`, `declare-const`,
//! `declare-fun` with no arguments, `assert`, `check-sat` and `exit`.
//! `check-sat` must come last and `set-logic` before any declaration.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

const RESERVED: [&str; 13] = [
    "!",
    "_",
    "as",
    "BINARY",
    "DECIMAL",
    "exists",
    "forall",
    "HEXADECIMAL",
    "let",
    "match",
    "NUMERAL",
    "par",
    "STRING",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Numeral(String),
    Decimal(String),
    Str(String),
    Symbol(String),
    Keyword(String),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let simple = |c: char| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c);
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            ';' => {
                while i < cs.len() && cs[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match cs.get(i) {
                        None => return Err("unterminated string literal".into()),
                        Some('"') if cs.get(i + 1) == Some(&'"') => {
                            s.push('"');
                            i += 2;
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some(&ch) if (' '..='~').contains(&ch) || "\t\n\r".contains(ch) => {
                            s.push(ch);
                            i += 1;
                        }
                        Some(ch) => return Err(format!("character {ch:?} in string literal")),
                    }
                }
                out.push(Tok::Str(s));
            }
            '|' => {
                let start = i + 1;
                i = start;
                while i < cs.len() && cs[i] != '|' {
                    if cs[i] == '\\' {
                        return Err("backslash in quoted symbol".into());
                    }
                    i += 1;
                }
                if i == cs.len() {
                    return Err("unterminated quoted symbol".into());
                }
                out.push(Tok::Symbol(cs[start..i].iter().collect()));
                i += 1;
            }
            ':' => {
                let start = i + 1;
                i = start;
                while i < cs.len() && simple(cs[i]) {
                    i += 1;
                }
                if i == start {
                    return Err("empty keyword".into());
                }
                out.push(Tok::Keyword(cs[start..i].iter().collect()));
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let whole: String = cs[start..i].iter().collect();
                if whole.len() > 1 && whole.starts_with('0') {
                    return Err(format!("numeral `{whole}` has a leading zero"));
                }
                if cs.get(i) == Some(&'.') {
                    i += 1;
                    let frac = i;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == frac {
                        return Err(format!("decimal `{whole}.` has no fraction digits"));
                    }
                    out.push(Tok::Decimal(cs[start..i].iter().collect()));
                } else {
                    out.push(Tok::Numeral(whole));
                }
                if i < cs.len() && simple(cs[i]) {
                    return Err("literal runs into a symbol".into());
                }
            }
            c if simple(c) => {
                let start = i;
                while i < cs.len() && simple(cs[i]) {
                    i += 1;
                }
                let s: String = cs[start..i].iter().collect();
                if RESERVED.contains(&s.as_str()) {
                    return Err(format!("reserved word `{s}` used as a symbol"));
                }
                out.push(Tok::Symbol(s));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sx {
    Tok(Tok),
    List(Vec<Sx>),
}

fn read(toks: &[Tok]) -> Result<Vec<Sx>, String> {
    let mut stack: Vec<Vec<Sx>> = vec![vec![]];
    for t in toks {
        match t {
            Tok::Open => stack.push(vec![]),
            Tok::Close => {
                let l = stack.pop().expect("stack never empty");
                stack.last_mut().ok_or("unbalanced `)`")?.push(Sx::List(l));
            }
            t => stack
                .last_mut()
                .expect("stack never empty")
                .push(Sx::Tok(t.clone())),
        }
    }
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Int,
    Real,
    String,
    RegLan,
}

/// A well-sorted term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Num(BigRational, Sort),
    Str(String),
    Const(String, Sort),
    App(String, Vec<Term>, Sort),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Num(_, s) | Term::Const(_, s) | Term::App(_, _, s) => *s,
            Term::Str(_) => Sort::String,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Script {
    pub logic: Option<String>,
    pub consts: BTreeMap<String, Sort>,
    pub asserts: Vec<Term>,
}

fn sort_of(s: &Sx) -> Result<Sort, String> {
    match s {
        Sx::Tok(Tok::Symbol(n)) => match n.as_str() {
            "Bool" => Ok(Sort::Bool),
            "Int" => Ok(Sort::Int),
            "Real" => Ok(Sort::Real),
            "String" => Ok(Sort::String),
            "RegLan" => Ok(Sort::RegLan),
            _ => Err(format!("unknown sort `{n}`")),
        },
        _ => Err(format!("malformed sort {s:?}")),
    }
}

fn parse_decimal(d: &str) -> BigRational {
    let (w, f) = d.split_once('.').expect("decimal has a dot");
    let num: num_bigint::BigInt = format!("{w}{f}").parse().unwrap();
    let den = num_bigint::BigInt::from(10).pow(f.len() as u32);
    BigRational::new(num, den)
}

fn term(s: &Sx, consts: &BTreeMap<String, Sort>) -> Result<Term, String> {
    use Sort::*;
    match s {
        Sx::Tok(Tok::Numeral(n)) => Ok(Term::Num(
            BigRational::from_integer(n.parse().unwrap()),
            Int,
        )),
        Sx::Tok(Tok::Decimal(d)) => Ok(Term::Num(parse_decimal(d), Real)),
        Sx::Tok(Tok::Str(v)) => Ok(Term::Str(v.clone())),
        Sx::Tok(Tok::Symbol(n)) => match n.as_str() {
            "true" | "false" => Ok(Term::App(n.clone(), vec![], Bool)),
            "re.none" | "re.all" | "re.allchar" => Ok(Term::App(n.clone(), vec![], RegLan)),
            _ => consts
                .get(n)
                .map(|s| Term::Const(n.clone(), *s))
                .ok_or_else(|| format!("undeclared symbol `{n}`")),
        },
        Sx::Tok(t) => Err(format!("unexpected token {t:?} in term")),
        Sx::List(items) => {
            let Some(Sx::Tok(Tok::Symbol(f))) = items.first() else {
                return Err(format!("application needs a function symbol: {s:?}"));
            };
            let args: Vec<Term> = items[1..]
                .iter()
                .map(|a| term(a, consts))
                .collect::<Result<_, _>>()?;
            let sorts: Vec<Sort> = args.iter().map(Term::sort).collect();
            let all = |want: Sort| sorts.iter().all(|s| *s == want);
            let same = sorts.windows(2).all(|w| w[0] == w[1]);
            let numeric = same && matches!(sorts.first(), Some(Int | Real));
            let n = args.len();
            let result = match f.as_str() {
                "not" if n == 1 && all(Bool) => Bool,
                "and" | "or" | "=>" | "xor" if n >= 2 && all(Bool) => Bool,
                "=" | "distinct" if n >= 2 && same => Bool,
                "ite" if n == 3 && sorts[0] == Bool && sorts[1] == sorts[2] => sorts[1],
                "+" | "*" if n >= 2 && numeric => sorts[0],
                "-" if n >= 1 && numeric => sorts[0],
                "/" if n >= 2 && all(Real) => Real,
                "div" | "mod" if n == 2 && all(Int) => Int,
                "abs" if n == 1 && all(Int) => Int,
                "<=" | "<" | ">=" | ">" if n >= 2 && numeric => Bool,
                "str.++" if n >= 2 && all(String) => String,
                "str.len" if n == 1 && all(String) => Int,
                "str.in_re" if n == 2 && sorts == [String, RegLan] => Bool,
                "str.to_re" if n == 1 && all(String) => RegLan,
                "re.*" | "re.+" | "re.opt" if n == 1 && all(RegLan) => RegLan,
                "re.union" | "re.++" | "re.inter" if n >= 2 && all(RegLan) => RegLan,
                _ => return Err(format!("ill-sorted application of `{f}` to {sorts:?}")),
            };
            Ok(Term::App(f.clone(), args, result))
        }
    }
}

/// Parses and sort-checks a script.
pub fn check(text: &str) -> Result<Script, String> {
    let forms = read(&tokenize(text)?)?;
    let mut script = Script::default();
    let mut done = false;
    for f in &forms {
        if done {
            return Err("command after check-sat".into());
        }
        let Sx::List(items) = f else {
            return Err(format!("top-level atom {f:?}"));
        };
        let Some(Sx::Tok(Tok::Symbol(cmd))) = items.first() else {
            return Err("command without a name".into());
        };
        let args = &items[1..];
        match (cmd.as_str(), args) {
            ("set-logic", [Sx::Tok(Tok::Symbol(l))]) => {
                if script.logic.is_some() || !script.consts.is_empty() || !script.asserts.is_empty()
                {
                    return Err("set-logic must come first".into());
                }
                script.logic = Some(l.clone());
            }
            ("set-info", [Sx::Tok(Tok::Keyword(_)), ..]) => {}
            ("declare-const", [Sx::Tok(Tok::Symbol(n)), sort]) => script.declare(n, sort)?,
            ("declare-fun", [Sx::Tok(Tok::Symbol(n)), Sx::List(domain), sort])
                if domain.is_empty() =>
            {
                script.declare(n, sort)?
            }
            ("assert", [t]) => {
                let t = term(t, &script.consts)?;
                if t.sort() != Sort::Bool {
                    return Err(format!("assertion of sort {:?}", t.sort()));
                }
                script.asserts.push(t);
            }
            ("check-sat", []) => done = true,
            ("exit", []) => {}
            _ => return Err(format!("malformed or unsupported command `{cmd}`")),
        }
    }
    if !done {
        return Err("missing check-sat".into());
    }
    Ok(script)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Val {
    Bool(bool),
    Num(BigRational),
    Str(Vec<char>),
    Re(Re),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Re {
    None,
    All,
    AllChar,
    Lit(Vec<char>),
    Star(Box<Re>),
    Union(Vec<Re>),
    Concat(Vec<Re>),
    Inter(Vec<Re>),
}

impl Re {
    /// End positions of matches of `self` in `s` starting at `i`.
    fn ends(&self, s: &[char], i: usize) -> BTreeSet<usize> {
        match self {
            Re::None => BTreeSet::new(),
            Re::All => (i..=s.len()).collect(),
            Re::AllChar => {
                if i < s.len() {
                    [i + 1].into()
                } else {
                    BTreeSet::new()
                }
            }
            Re::Lit(l) => {
                if s[i..].starts_with(l) {
                    [i + l.len()].into()
                } else {
                    BTreeSet::new()
                }
            }
            Re::Star(r) => {
                let mut seen: BTreeSet<usize> = [i].into();
                let mut frontier = vec![i];
                while let Some(j) = frontier.pop() {
                    for k in r.ends(s, j) {
                        if seen.insert(k) {
                            frontier.push(k);
                        }
                    }
                }
                seen
            }
            Re::Union(rs) => rs.iter().flat_map(|r| r.ends(s, i)).collect(),
            Re::Concat(rs) => rs.iter().fold([i].into(), |cur: BTreeSet<usize>, r| {
                cur.iter().flat_map(|&j| r.ends(s, j)).collect()
            }),
            Re::Inter(rs) => {
                let mut it = rs.iter().map(|r| r.ends(s, i));
                let first = it.next().unwrap_or_default();
                it.fold(first, |a, b| a.intersection(&b).copied().collect())
            }
        }
    }

    pub fn matches(&self, s: &[char]) -> bool {
        self.ends(s, 0).contains(&s.len())
    }
}

fn eval(t: &Term, env: &BTreeMap<String, Val>) -> Val {
    let num = |v: &Val| match v {
        Val::Num(n) => n.clone(),
        _ => panic!("expected a number"),
    };
    let boolean = |v: &Val| matches!(v, Val::Bool(true));
    let text = |v: &Val| match v {
        Val::Str(s) => s.clone(),
        _ => panic!("expected a string"),
    };
    let re = |v: Val| match v {
        Val::Re(r) => r,
        _ => panic!("expected a regular expression"),
    };
    match t {
        Term::Num(n, _) => Val::Num(n.clone()),
        Term::Str(s) => Val::Str(s.chars().collect()),
        Term::Const(n, _) => env
            .get(n)
            .cloned()
            .unwrap_or_else(|| panic!("no value for `{n}`")),
        Term::App(f, args, _) => {
            let vs: Vec<Val> = args.iter().map(|a| eval(a, env)).collect();
            let ns = || vs.iter().map(num).collect::<Vec<_>>();
            let chain = |cmp: &dyn Fn(&BigRational, &BigRational) -> bool| {
                Val::Bool(ns().windows(2).all(|w| cmp(&w[0], &w[1])))
            };
            match f.as_str() {
                "true" => Val::Bool(true),
                "false" => Val::Bool(false),
                "not" => Val::Bool(!boolean(&vs[0])),
                "and" => Val::Bool(vs.iter().all(boolean)),
                "or" => Val::Bool(vs.iter().any(boolean)),
                "=>" => {
                    Val::Bool(vs.iter().rev().skip(1).all(boolean) <= boolean(vs.last().unwrap()))
                }
                "xor" => Val::Bool(vs.iter().filter(|v| boolean(v)).count() % 2 == 1),
                "=" => Val::Bool(vs.windows(2).all(|w| w[0] == w[1])),
                "distinct" => {
                    Val::Bool((0..vs.len()).all(|i| (i + 1..vs.len()).all(|j| vs[i] != vs[j])))
                }
                "ite" => {
                    if boolean(&vs[0]) {
                        vs[1].clone()
                    } else {
                        vs[2].clone()
                    }
                }
                "+" => Val::Num(ns().into_iter().fold(BigRational::zero(), |a, b| a + b)),
                "*" => Val::Num(ns().into_iter().reduce(|a, b| a * b).unwrap()),
                "-" if vs.len() == 1 => Val::Num(-num(&vs[0])),
                "-" => Val::Num(ns().into_iter().reduce(|a, b| a - b).unwrap()),
                "/" => Val::Num(ns().into_iter().reduce(|a, b| a / b).unwrap()),
                "mod" | "div" => {
                    let (a, m) = (num(&vs[0]).to_integer(), num(&vs[1]).to_integer());
                    // Euclidean: 0 <= a mod m < |m|.
                    let r = a.mod_floor(&m.abs());
                    let q = (&a - &r) / &m;
                    Val::Num(BigRational::from_integer(if f == "mod" { r } else { q }))
                }
                "abs" => Val::Num(num(&vs[0]).abs()),
                "<=" => chain(&|a, b| a <= b),
                "<" => chain(&|a, b| a < b),
                ">=" => chain(&|a, b| a >= b),
                ">" => chain(&|a, b| a > b),
                "str.++" => Val::Str(vs.iter().flat_map(text).collect()),
                "str.len" => Val::Num(BigRational::from_integer(text(&vs[0]).len().into())),
                "str.in_re" => {
                    let s = text(&vs[0]);
                    Val::Bool(re(vs[1].clone()).matches(&s))
                }
                "str.to_re" => Val::Re(Re::Lit(text(&vs[0]))),
                "re.none" => Val::Re(Re::None),
                "re.all" => Val::Re(Re::All),
                "re.allchar" => Val::Re(Re::AllChar),
                "re.*" => Val::Re(Re::Star(Box::new(re(vs[0].clone())))),
                "re.+" => {
                    let r = re(vs[0].clone());
                    Val::Re(Re::Concat(vec![r.clone(), Re::Star(Box::new(r))]))
                }
                "re.opt" => Val::Re(Re::Union(vec![Re::Lit(vec![]), re(vs[0].clone())])),
                "re.union" => Val::Re(Re::Union(vs.into_iter().map(re).collect())),
                "re.++" => Val::Re(Re::Concat(vs.into_iter().map(re).collect())),
                "re.inter" => Val::Re(Re::Inter(vs.into_iter().map(re).collect())),
                _ => unreachable!("sort checking admits only known functions"),
            }
        }
    }
}

impl Script {
    fn declare(&mut self, n: &str, sort: &Sx) -> Result<(), String> {
        if self.logic.is_none() {
            return Err("declaration before set-logic".into());
        }
        if self.consts.insert(n.to_string(), sort_of(sort)?).is_some() {
            return Err(format!("`{n}` declared twice"));
        }
        Ok(())
    }

    /// Whether every assertion holds under `env`, which must give a value
    /// to every declared constant.
    pub fn holds(&self, env: &BTreeMap<String, Val>) -> bool {
        for (n, s) in &self.consts {
            let v = env.get(n).unwrap_or_else(|| panic!("no value for `{n}`"));
            let ok = match (s, v) {
                (Sort::Int, Val::Num(x)) => x.is_integer(),
                (Sort::Real, Val::Num(_))
                | (Sort::String, Val::Str(_))
                | (Sort::Bool, Val::Bool(_)) => true,
                _ => false,
            };
            assert!(ok, "value of `{n}` does not have sort {s:?}");
        }
        self.asserts.iter().all(|t| eval(t, env) == Val::Bool(true))
    }

    /// Every string literal character used in the script.
    pub fn string_chars(&self) -> BTreeSet<char> {
        fn walk(t: &Term, out: &mut BTreeSet<char>) {
            match t {
                Term::Str(s) => out.extend(s.chars()),
                Term::App(_, args, _) => args.iter().for_each(|a| walk(a, out)),
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        self.asserts.iter().for_each(|t| walk(t, &mut out));
        out
    }
}

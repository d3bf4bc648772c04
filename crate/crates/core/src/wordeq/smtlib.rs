use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_traits::{One, Signed, Zero};

use super::{Nfa, WSym, WordEqError, WordEqInstance};
use crate::theory::{Atom, Guard, LinExpr, Literal, Rel, TheoryKind, Value};

/// Characters assigned to type letters, in order.
pub const LETTER_POOL: &str = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-";

const REGEX_CAP: usize = 10_000;

const RESERVED: [&str; 12] = [
    "par",
    "NUMERAL",
    "DECIMAL",
    "STRING",
    "BINARY",
    "HEXADECIMAL",
    "_",
    "!",
    "as",
    "let",
    "exists",
    "forall",
];

fn symbol(name: &str) -> String {
    let ok_char = |c: char| c.is_ascii_alphanumeric() || "~!$%^&*_+=<>.?/-".contains(c);
    let simple = !name.is_empty()
        && name.chars().all(ok_char)
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && !RESERVED.contains(&name)
        && name != "match";
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn numeral(v: &Value, real: bool) -> String {
    let abs = v.abs();
    let body = if abs.is_integer() {
        if real {
            format!("{}.0", abs.numer())
        } else {
            abs.numer().to_string()
        }
    } else {
        format!("(/ {}.0 {}.0)", abs.numer(), abs.denom())
    };
    if v.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn linear(e: &LinExpr, real: bool, var: &dyn Fn(&str) -> String) -> String {
    let mut terms: Vec<String> = e
        .coeffs()
        .iter()
        .map(|(x, c)| {
            if c.is_one() {
                var(x)
            } else {
                format!("(* {} {})", numeral(c, real), var(x))
            }
        })
        .collect();
    if !e.constant_term().is_zero() || terms.is_empty() {
        terms.push(numeral(e.constant_term(), real));
    }
    if terms.len() == 1 {
        terms.pop().expect("one term")
    } else {
        format!("(+ {})", terms.join(" "))
    }
}

fn atom(a: &Atom, real: bool, var: &dyn Fn(&str) -> String) -> String {
    let zero = numeral(&Value::zero(), real);
    match a {
        Atom::Linear { expr, rel } => {
            let op = match rel {
                Rel::Eq => "=",
                Rel::Le => "<=",
                Rel::Lt => "<",
            };
            format!("({op} {} {zero})", linear(expr, real, var))
        }
        Atom::Congruence {
            expr,
            modulus,
            residue,
        } => {
            format!("(= (mod {} {modulus}) {residue})", linear(expr, false, var))
        }
    }
}

fn literal(l: &Literal, real: bool, var: &dyn Fn(&str) -> String) -> String {
    let a = atom(&l.atom, real, var);
    if l.positive {
        a
    } else {
        format!("(not {a})")
    }
}

fn guard(g: &Guard, var: &dyn Fn(&str) -> String) -> String {
    let nary = |op: &str, gs: &[Guard], unit: &str| match gs.len() {
        0 => unit.to_string(),
        1 => guard(&gs[0], var),
        _ => format!(
            "({op} {})",
            gs.iter()
                .map(|g| guard(g, var))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    };
    match g {
        Guard::True => "true".into(),
        Guard::False => "false".into(),
        Guard::Atom(a) => atom(a, false, var),
        Guard::Not(h) => format!("(not {})", guard(h, var)),
        Guard::And(gs) => nary("and", gs, "true"),
        Guard::Or(gs) => nary("or", gs, "false"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Re {
    Eps,
    Lit(char),
    Union(Vec<Re>),
    Concat(Vec<Re>),
    Star(Box<Re>),
}

impl Re {
    fn size(&self) -> usize {
        match self {
            Re::Eps | Re::Lit(_) => 1,
            Re::Union(v) | Re::Concat(v) => 1 + v.iter().map(Re::size).sum::<usize>(),
            Re::Star(r) => 1 + r.size(),
        }
    }

    fn union(a: Re, b: Re) -> Re {
        let mut parts: BTreeSet<Re> = BTreeSet::new();
        for r in [a, b] {
            match r {
                Re::Union(v) => parts.extend(v),
                r => {
                    parts.insert(r);
                }
            }
        }
        if parts.len() == 1 {
            parts.into_iter().next().expect("one part")
        } else {
            Re::Union(parts.into_iter().collect())
        }
    }

    fn concat(parts: Vec<Re>) -> Re {
        let mut out = Vec::new();
        for r in parts {
            match r {
                Re::Eps => {}
                Re::Concat(v) => out.extend(v),
                r => out.push(r),
            }
        }
        match out.len() {
            0 => Re::Eps,
            1 => out.pop().expect("one part"),
            _ => Re::Concat(out),
        }
    }

    fn star(r: Re) -> Re {
        match r {
            Re::Eps => Re::Eps,
            s @ Re::Star(_) => s,
            r => Re::Star(Box::new(r)),
        }
    }

    fn print(&self, out: &mut String) {
        match self {
            Re::Eps => out.push_str("(str.to_re \"\")"),
            Re::Lit(c) => {
                let _ = write!(out, "(str.to_re \"{c}\")");
            }
            Re::Union(v) | Re::Concat(v) => {
                out.push_str(if matches!(self, Re::Union(_)) {
                    "(re.union"
                } else {
                    "(re.++"
                });
                for r in v {
                    out.push(' ');
                    r.print(out);
                }
                out.push(')');
            }
            Re::Star(r) => {
                out.push_str("(re.* ");
                r.print(out);
                out.push(')');
            }
        }
    }
}

/// State elimination; `None` is the empty language.
fn nfa_regex(n: &Nfa, letters: &[char]) -> Result<Option<Re>, WordEqError> {
    let (start, end) = (n.states, n.states + 1);
    let mut edges: BTreeMap<(usize, usize), Re> = BTreeMap::new();
    let add = |edges: &mut BTreeMap<(usize, usize), Re>, k: (usize, usize), r: Re| {
        let r = match edges.remove(&k) {
            Some(old) => Re::union(old, r),
            None => r,
        };
        edges.insert(k, r);
    };
    add(&mut edges, (start, n.initial), Re::Eps);
    for &f in &n.finals {
        add(&mut edges, (f, end), Re::Eps);
    }
    for &(s, l, d) in &n.transitions {
        add(&mut edges, (s, d), Re::Lit(letters[l]));
    }
    for k in 0..n.states {
        let self_loop = edges.remove(&(k, k)).map(Re::star);
        let ins: Vec<(usize, Re)> = edges
            .iter()
            .filter(|((_, d), _)| *d == k)
            .map(|((s, _), r)| (*s, r.clone()))
            .collect();
        let outs: Vec<(usize, Re)> = edges
            .iter()
            .filter(|((s, _), _)| *s == k)
            .map(|((_, d), r)| (*d, r.clone()))
            .collect();
        edges.retain(|(s, d), _| *s != k && *d != k);
        for (i, rin) in &ins {
            for (j, rout) in &outs {
                let mid = self_loop.clone().unwrap_or(Re::Eps);
                let r = Re::concat(vec![rin.clone(), mid, rout.clone()]);
                if r.size() > REGEX_CAP {
                    return Err(WordEqError::RegexTooLarge(REGEX_CAP));
                }
                add(&mut edges, (*i, *j), r);
            }
        }
    }
    Ok(edges.remove(&(start, end)))
}

/// SMT-LIB 2.6 text over the strings theory. Type letter `i` becomes the
/// one-character string `LETTER_POOL[i]`; the assignment is recorded in
/// the first line.
pub fn export_smtlib(inst: &WordEqInstance) -> Result<String, WordEqError> {
    let letters: Vec<char> = LETTER_POOL.chars().collect();
    if inst.types.len() > letters.len() {
        return Err(WordEqError::AlphabetTooLarge(inst.types.len()));
    }
    let real = inst.theory == TheoryKind::Lra;
    let sort = if real { "Real" } else { "Int" };
    let mut out = String::from("; letter-map:");
    for (i, c) in letters.iter().take(inst.types.len()).enumerate() {
        let _ = write!(out, " t{i}={c}");
    }
    out.push_str("\n(set-logic ALL)\n");

    let strings = inst.variables();
    for x in &strings {
        let _ = writeln!(out, "(declare-const {} String)", symbol(x));
    }
    let numeric: BTreeSet<String> = inst
        .params
        .iter()
        .flat_map(|l| l.atom.free_vars())
        .collect();
    for p in &numeric {
        let _ = writeln!(out, "(declare-const {} {sort})", symbol(p));
    }

    let side = |s: &[WSym]| -> String {
        let parts: Vec<String> = s
            .iter()
            .map(|x| match x {
                WSym::Var(v) => symbol(v),
                WSym::Letter(l) => format!("\"{}\"", letters[*l]),
            })
            .collect();
        match parts.len() {
            0 => "\"\"".into(),
            1 => parts[0].clone(),
            _ => format!("(str.++ {})", parts.join(" ")),
        }
    };
    for e in &inst.equations {
        let _ = writeln!(out, "(assert (= {} {}))", side(&e.left), side(&e.right));
    }
    for (x, n) in &inst.nfas {
        let mut re = String::new();
        match nfa_regex(n, &letters)? {
            Some(r) => r.print(&mut re),
            None => re.push_str("re.none"),
        }
        let _ = writeln!(out, "(assert (str.in_re {} {re}))", symbol(x));
    }
    let len_var = |x: &str| format!("(str.len {})", symbol(x));
    for g in &inst.lengths {
        let _ = writeln!(out, "(assert {})", guard(g, &len_var));
    }
    let plain = |x: &str| symbol(x);
    for l in &inst.params {
        let _ = writeln!(out, "(assert {})", literal(l, real, &plain));
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

/// Reads the `; letter-map:` header back into type index to character.
pub fn parse_letter_map(text: &str) -> Option<BTreeMap<usize, char>> {
    let line = text.lines().next()?.strip_prefix("; letter-map:")?;
    let mut out = BTreeMap::new();
    for item in line.split_whitespace() {
        let (t, c) = item.split_once('=')?;
        let idx: usize = t.strip_prefix('t')?.parse().ok()?;
        let mut chars = c.chars();
        let ch = chars.next()?;
        if chars.next().is_some() {
            return None;
        }
        out.insert(idx, ch);
    }
    Some(out)
}

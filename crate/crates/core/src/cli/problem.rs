use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;

use super::sexp::{read_all, Pos, Sexp, SyntaxError};
use crate::automata::{ParametricAutomaton, RegularConstraint, Transition};
use crate::sl::{FunApp, Operand, RecognizableFormula, SlProgram, Statement};
use crate::theory::{Atom, CmpOp, Guard, LinExpr, TheoryKind, Value, CURR};
use crate::transducers::{ParametricTransducer, PtTransition};
use crate::wordeq::{EquationalConstraint, Sym, WordEqProblem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs {
    Concat(Vec<Operand>),
    Apply(String, String),
    Reverse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FileStatement {
    Assign(String, Rhs),
    /// DNF of `(variable, automaton name)` memberships.
    Assert(Vec<Vec<(String, String)>>),
    AssertElem(Guard),
    AssertEq(Vec<Operand>, Vec<Operand>),
    /// A guard whose variables are sequence names standing for lengths.
    AssertLen(Guard),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Sat,
    Empty(String),
    Subset(String, String),
    Equiv(String, String),
    Reduce,
    Export(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub theory: TheoryKind,
    pub automata: Vec<(String, ParametricAutomaton)>,
    pub transducers: Vec<(String, ParametricTransducer)>,
    pub statements: Vec<FileStatement>,
    pub command: Command,
}

/// The program or constraint system a file cannot be turned into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unsupported(pub String);

impl ProblemFile {
    pub fn automaton(&self, name: &str) -> Option<&ParametricAutomaton> {
        self.automata
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| a)
    }

    pub fn transducer(&self, name: &str) -> Option<&ParametricTransducer> {
        self.transducers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    fn membership(&self, var: &str, name: &str) -> RegularConstraint {
        RegularConstraint {
            var: var.to_string(),
            automaton: self.automaton(name).expect("validated name").clone(),
        }
    }

    /// The straight-line program behind `(check sat)`.
    pub fn to_program(&self) -> Result<SlProgram, Unsupported> {
        let mut statements = Vec::new();
        let transducers: BTreeMap<&str, Arc<ParametricTransducer>> = self
            .transducers
            .iter()
            .map(|(n, t)| (n.as_str(), Arc::new(t.clone())))
            .collect();
        for s in &self.statements {
            statements.push(match s {
                FileStatement::Assign(y, Rhs::Concat(ops)) => {
                    Statement::Assign(y.clone(), FunApp::Concat(ops.clone()))
                }
                FileStatement::Assign(y, Rhs::Apply(t, x)) => Statement::Assign(
                    y.clone(),
                    FunApp::Transduce(transducers[t.as_str()].clone(), x.clone()),
                ),
                FileStatement::Assign(y, Rhs::Reverse(x)) => {
                    Statement::Assign(y.clone(), FunApp::Reverse(x.clone()))
                }
                FileStatement::Assert(dnf) => Statement::AssertRegular(RecognizableFormula {
                    disjuncts: dnf
                        .iter()
                        .map(|d| d.iter().map(|(x, n)| self.membership(x, n)).collect())
                        .collect(),
                }),
                FileStatement::AssertElem(g) => Statement::AssertElement(g.clone()),
                FileStatement::AssertEq(..) => {
                    return Err(Unsupported(
                        "assert-eq needs (reduce); it is outside the straight-line fragment".into(),
                    ))
                }
                FileStatement::AssertLen(..) => {
                    return Err(Unsupported(
                        "assert-len needs (reduce); it is outside the straight-line fragment"
                            .into(),
                    ))
                }
            });
        }
        Ok(SlProgram::new(self.theory, statements))
    }

    /// One constraint system per choice of disjunct in every `assert`,
    /// each paired with its element guards. Concatenations become
    /// equations.
    pub fn to_systems(&self) -> Result<Vec<(WordEqProblem, Vec<Guard>)>, Unsupported> {
        let mut base = WordEqProblem::new(self.theory);
        let mut element = Vec::new();
        let mut choices: Vec<Vec<Vec<RegularConstraint>>> = Vec::new();
        let side = |ops: &[Operand]| -> Vec<Sym> {
            ops.iter()
                .flat_map(|o| match o {
                    Operand::Var(v) => vec![Sym::Var(v.clone())],
                    Operand::Seq(ts) => ts.iter().cloned().map(Sym::Letter).collect(),
                })
                .collect()
        };
        for s in &self.statements {
            match s {
                FileStatement::Assign(y, Rhs::Concat(ops)) => base.equations.push(
                    EquationalConstraint::new(vec![Sym::Var(y.clone())], side(ops)),
                ),
                FileStatement::Assign(_, Rhs::Apply(..))
                | FileStatement::Assign(_, Rhs::Reverse(_)) => {
                    return Err(Unsupported(
                        "(reduce) handles concatenation only; use (check sat)".into(),
                    ))
                }
                FileStatement::Assert(dnf) => choices.push(
                    dnf.iter()
                        .map(|d| d.iter().map(|(x, n)| self.membership(x, n)).collect())
                        .collect(),
                ),
                FileStatement::AssertElem(g) => element.push(g.clone()),
                FileStatement::AssertEq(l, r) => base
                    .equations
                    .push(EquationalConstraint::new(side(l), side(r))),
                FileStatement::AssertLen(g) => base.lengths.push(g.clone()),
            }
        }
        let mut out = vec![(base, element)];
        for alts in choices {
            let mut next = Vec::new();
            for (p, e) in &out {
                for d in &alts {
                    let mut q = p.clone();
                    q.regular.extend(d.iter().cloned());
                    next.push((q, e.clone()));
                }
            }
            out = next;
        }
        Ok(out)
    }
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError {
        pos,
        message: message.into(),
    })
}

fn symbol(s: &Sexp, what: &str) -> Result<String, SyntaxError> {
    match s.atom() {
        Some(a) if !is_number(a) => Ok(a.to_string()),
        _ => err(s.pos(), format!("expected {what}")),
    }
}

fn is_number(a: &str) -> bool {
    let body = a.strip_prefix('-').unwrap_or(a);
    body.starts_with(|c: char| c.is_ascii_digit())
}

fn number(s: &Sexp) -> Result<Value, SyntaxError> {
    match s.atom() {
        Some(a) if is_number(a) => a
            .parse::<Value>()
            .or_else(|_| err(s.pos(), format!("malformed number `{a}`"))),
        _ => err(s.pos(), "expected a number"),
    }
}

fn integer(s: &Sexp) -> Result<BigInt, SyntaxError> {
    let v = number(s)?;
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        err(s.pos(), "expected an integer")
    }
}

/// `(head arg...)` with the arity checked.
fn form<'a>(
    s: &'a Sexp,
    head: &str,
    min: usize,
    max: Option<usize>,
) -> Result<&'a [Sexp], SyntaxError> {
    let Some(items) = s.list() else {
        return err(s.pos(), format!("expected ({head} ...)"));
    };
    if s.head() != Some(head) {
        return err(s.pos(), format!("expected ({head} ...)"));
    }
    let args = &items[1..];
    if args.len() < min || max.is_some_and(|m| args.len() > m) {
        return err(s.pos(), format!("wrong number of arguments to `{head}`"));
    }
    Ok(args)
}

fn symbols(args: &[Sexp], what: &str) -> Result<Vec<String>, SyntaxError> {
    args.iter().map(|a| symbol(a, what)).collect()
}

pub fn parse_term(s: &Sexp) -> Result<LinExpr, SyntaxError> {
    if let Some(a) = s.atom() {
        return if is_number(a) {
            Ok(LinExpr::constant(number(s)?))
        } else {
            Ok(LinExpr::var(a))
        };
    }
    let items = s.list().expect("list");
    let Some(head) = s.head() else {
        return err(s.pos(), "expected a term");
    };
    let args: Vec<LinExpr> = items[1..]
        .iter()
        .map(parse_term)
        .collect::<Result<_, _>>()?;
    match head {
        "+" => Ok(args.into_iter().fold(LinExpr::zero(), |a, b| a + b)),
        "-" if args.len() == 1 => Ok(-args[0].clone()),
        "-" if !args.is_empty() => Ok(args[1..]
            .iter()
            .cloned()
            .fold(args[0].clone(), |a, b| a - b)),
        "*" if !args.is_empty() => {
            let mut coeff = Value::from_integer(1.into());
            let mut body: Option<LinExpr> = None;
            for t in args {
                if t.is_constant() {
                    coeff *= t.constant_term();
                } else if body.is_none() {
                    body = Some(t);
                } else {
                    return err(s.pos(), "nonlinear product");
                }
            }
            Ok(body.unwrap_or_else(|| LinExpr::from_i64(1)) * &coeff)
        }
        _ => err(s.pos(), format!("unknown term operator `{head}`")),
    }
}

pub fn parse_guard(s: &Sexp) -> Result<Guard, SyntaxError> {
    match s.atom() {
        Some("true") => return Ok(Guard::True),
        Some("false") => return Ok(Guard::False),
        Some(_) => return err(s.pos(), "expected a guard"),
        None => {}
    }
    let Some(head) = s.head() else {
        return err(s.pos(), "expected a guard");
    };
    let args = &s.list().expect("list")[1..];
    let cmp = |op: CmpOp| -> Result<Guard, SyntaxError> {
        if args.len() != 2 {
            return err(s.pos(), format!("`{head}` takes two terms"));
        }
        Ok(Guard::cmp(parse_term(&args[0])?, op, parse_term(&args[1])?))
    };
    match head {
        "and" => Ok(Guard::and(
            args.iter().map(parse_guard).collect::<Result<_, _>>()?,
        )),
        "or" => Ok(Guard::or(
            args.iter().map(parse_guard).collect::<Result<_, _>>()?,
        )),
        "not" => {
            let [g] = args else {
                return err(s.pos(), "`not` takes one guard");
            };
            Ok(Guard::not(parse_guard(g)?))
        }
        "=" => cmp(CmpOp::Eq),
        "!=" | "distinct" => cmp(CmpOp::Ne),
        "<" => cmp(CmpOp::Lt),
        "<=" => cmp(CmpOp::Le),
        ">" => cmp(CmpOp::Gt),
        ">=" => cmp(CmpOp::Ge),
        "mod=" => {
            let [t, m, r] = args else {
                return err(s.pos(), "`mod=` takes a term, a modulus and a residue");
            };
            let modulus = integer(m)?;
            if modulus < BigInt::from(2) {
                return err(m.pos(), "modulus must be at least 2");
            }
            Ok(Guard::Atom(Atom::congruence(
                parse_term(t)?,
                modulus,
                integer(r)?,
            )))
        }
        _ => err(s.pos(), format!("unknown guard operator `{head}`")),
    }
}

struct Machine {
    params: Vec<String>,
    states: Vec<String>,
    initial: usize,
    finals: BTreeSet<usize>,
    trans: Vec<(usize, Guard, Option<Vec<LinExpr>>, usize)>,
}

fn parse_machine(args: &[Sexp], transducer: bool) -> Result<Machine, SyntaxError> {
    let mut params = None;
    let mut states: Option<Vec<String>> = None;
    let (mut init, mut fin, mut trans) = (None, None, Vec::new());
    for a in args {
        match a.head() {
            Some("params") => params = Some(symbols(form(a, "params", 0, None)?, "a parameter")?),
            Some("states") => states = Some(symbols(form(a, "states", 1, None)?, "a state")?),
            Some("init") => init = Some(&form(a, "init", 1, Some(1))?[0]),
            Some("final") => fin = Some(form(a, "final", 0, None)?),
            Some("trans") => trans.push(a),
            _ => return err(a.pos(), "expected params, states, init, final or trans"),
        }
    }
    let Some(states) = states else {
        return err(
            args.first().map_or(Pos { line: 0, col: 0 }, Sexp::pos),
            "missing (states ...)",
        );
    };
    let idx = |s: &Sexp| -> Result<usize, SyntaxError> {
        let n = symbol(s, "a state")?;
        states
            .iter()
            .position(|q| *q == n)
            .map_or_else(|| err(s.pos(), format!("unknown state `{n}`")), Ok)
    };
    let Some(init) = init else {
        return err(args[0].pos(), "missing (init q)");
    };
    let initial = idx(init)?;
    let finals = fin
        .unwrap_or(&[])
        .iter()
        .map(idx)
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for t in trans {
        let parts = form(t, "trans", 3, Some(if transducer { 4 } else { 3 }))?;
        let guard = parse_guard(&parts[2])?;
        let output = if transducer {
            let Some(o) = parts.get(3) else {
                return err(t.pos(), "missing (out TERM...)");
            };
            Some(
                form(o, "out", 0, None)?
                    .iter()
                    .map(parse_term)
                    .collect::<Result<_, _>>()?,
            )
        } else {
            None
        };
        out.push((idx(&parts[0])?, guard, output, idx(&parts[1])?));
    }
    Ok(Machine {
        params: params.unwrap_or_default(),
        states,
        initial,
        finals,
        trans: out,
    })
}

fn parse_operand(s: &Sexp) -> Result<Operand, SyntaxError> {
    if s.atom().is_some() {
        return Ok(Operand::Var(symbol(s, "a variable")?));
    }
    let terms: Vec<LinExpr> = form(s, "seq", 0, None)?
        .iter()
        .map(parse_term)
        .collect::<Result<_, _>>()?;
    if terms.iter().any(|t| t.mentions(CURR)) {
        return err(s.pos(), "`curr` cannot appear in a literal sequence");
    }
    Ok(Operand::Seq(terms))
}

fn parse_membership(s: &Sexp) -> Result<(String, String), SyntaxError> {
    let args = form(s, "in", 2, Some(2))?;
    Ok((
        symbol(&args[0], "a variable")?,
        symbol(&args[1], "an automaton name")?,
    ))
}

fn parse_formula(s: &Sexp) -> Result<Vec<Vec<(String, String)>>, SyntaxError> {
    let conj = |s: &Sexp| -> Result<Vec<(String, String)>, SyntaxError> {
        match s.head() {
            Some("and") => form(s, "and", 1, None)?
                .iter()
                .map(parse_membership)
                .collect(),
            _ => Ok(vec![parse_membership(s)?]),
        }
    };
    match s.head() {
        Some("or") => form(s, "or", 1, None)?.iter().map(conj).collect(),
        _ => Ok(vec![conj(s)?]),
    }
}

fn parse_command(s: &Sexp) -> Result<Command, SyntaxError> {
    match s.head() {
        Some("check") => {
            let args = form(s, "check", 1, Some(3))?;
            let kind = symbol(&args[0], "a check kind")?;
            let names = symbols(&args[1..], "an automaton name")?;
            match (kind.as_str(), names.as_slice()) {
                ("sat", []) => Ok(Command::Sat),
                ("empty", [a]) => Ok(Command::Empty(a.clone())),
                ("subset", [a, b]) => Ok(Command::Subset(a.clone(), b.clone())),
                ("equiv", [a, b]) => Ok(Command::Equiv(a.clone(), b.clone())),
                ("sat" | "empty" | "subset" | "equiv", _) => err(
                    s.pos(),
                    format!("wrong number of arguments to `check {kind}`"),
                ),
                _ => err(args[0].pos(), format!("unknown check `{kind}`")),
            }
        }
        Some("solve") => form(s, "solve", 0, Some(0)).map(|_| Command::Sat),
        Some("reduce") => form(s, "reduce", 0, Some(0)).map(|_| Command::Reduce),
        Some("export") => {
            let args = form(s, "export", 1, Some(1))?;
            let path = args[0].atom().ok_or(SyntaxError {
                pos: args[0].pos(),
                message: "expected a path".into(),
            })?;
            Ok(Command::Export(PathBuf::from(path.trim_matches('"'))))
        }
        _ => err(s.pos(), "expected a command"),
    }
}

pub fn parse(text: &str) -> Result<ProblemFile, SyntaxError> {
    let forms = read_all(text)?;
    let mut theory = None;
    let mut automata = Vec::new();
    let mut transducers = Vec::new();
    let mut statements = Vec::new();
    let mut command = None;
    let mut names: BTreeMap<String, Pos> = BTreeMap::new();
    let mut refs: Vec<(String, Pos, bool)> = Vec::new();

    for f in &forms {
        let declare =
            |names: &mut BTreeMap<String, Pos>, s: &Sexp| -> Result<String, SyntaxError> {
                let n = symbol(s, "a name")?;
                if let Some(first) = names.insert(n.clone(), s.pos()) {
                    return err(
                        s.pos(),
                        format!("duplicate name `{n}` (first declared at {first})"),
                    );
                }
                Ok(n)
            };
        match f.head() {
            Some("theory") => {
                let args = form(f, "theory", 1, Some(1))?;
                if theory.is_some() {
                    return err(f.pos(), "duplicate theory declaration");
                }
                let t = symbol(&args[0], "a theory")?;
                theory = Some(t.parse::<TheoryKind>().or_else(|m| err(args[0].pos(), m))?);
            }
            Some(h @ ("automaton" | "transducer")) => {
                let Some(theory) = theory else {
                    return err(f.pos(), "(theory ...) must come first");
                };
                let args = form(f, h, 1, None)?;
                let name = declare(&mut names, &args[0])?;
                let m = parse_machine(&args[1..], h == "transducer")?;
                let bad = |e: crate::automata::AutomataError| SyntaxError {
                    pos: f.pos(),
                    message: e.to_string(),
                };
                if h == "automaton" {
                    let transitions = m
                        .trans
                        .into_iter()
                        .map(|(src, guard, _, dst)| Transition { src, guard, dst })
                        .collect();
                    let a = ParametricAutomaton::new(
                        theory,
                        m.params,
                        m.states,
                        transitions,
                        m.initial,
                        m.finals,
                    )
                    .map_err(bad)?;
                    automata.push((name, a));
                } else {
                    let transitions = m
                        .trans
                        .into_iter()
                        .map(|(src, guard, out, dst)| PtTransition {
                            src,
                            guard,
                            output: out.unwrap_or_default(),
                            dst,
                        })
                        .collect();
                    let t = ParametricTransducer::new(
                        theory,
                        m.params,
                        m.states,
                        transitions,
                        m.initial,
                        m.finals,
                    )
                    .map_err(bad)?;
                    transducers.push((name, t));
                }
            }
            Some("assign") => {
                let args = form(f, "assign", 2, Some(2))?;
                let y = symbol(&args[0], "a variable")?;
                let rhs = match args[1].head() {
                    Some("concat") => Rhs::Concat(
                        form(&args[1], "concat", 1, None)?
                            .iter()
                            .map(parse_operand)
                            .collect::<Result<_, _>>()?,
                    ),
                    Some("apply") => {
                        let a = form(&args[1], "apply", 2, Some(2))?;
                        let t = symbol(&a[0], "a transducer name")?;
                        refs.push((t.clone(), a[0].pos(), true));
                        Rhs::Apply(t, symbol(&a[1], "a variable")?)
                    }
                    Some("reverse") => Rhs::Reverse(symbol(
                        &form(&args[1], "reverse", 1, Some(1))?[0],
                        "a variable",
                    )?),
                    _ => return err(args[1].pos(), "expected concat, apply or reverse"),
                };
                statements.push(FileStatement::Assign(y, rhs));
            }
            Some("assert") => {
                let args = form(f, "assert", 1, Some(1))?;
                let dnf = parse_formula(&args[0])?;
                for d in &dnf {
                    refs.extend(d.iter().map(|(_, n)| (n.clone(), args[0].pos(), false)));
                }
                statements.push(FileStatement::Assert(dnf));
            }
            Some("assert-elem") => {
                let g = parse_guard(&form(f, "assert-elem", 1, Some(1))?[0])?;
                if g.params().contains(CURR) {
                    return err(f.pos(), "`curr` cannot appear in an element constraint");
                }
                if let Some(t) = theory {
                    g.check_theory(t).or_else(|e| err(f.pos(), e.to_string()))?;
                }
                statements.push(FileStatement::AssertElem(g));
            }
            Some("assert-len") => {
                let g = parse_guard(&form(f, "assert-len", 1, Some(1))?[0])?;
                if g.params().contains(CURR) {
                    return err(f.pos(), "`curr` cannot appear in a length constraint");
                }
                if let Some(t) = Some(TheoryKind::Lia) {
                    g.check_theory(t).or_else(|e| err(f.pos(), e.to_string()))?;
                }
                statements.push(FileStatement::AssertLen(g));
            }
            Some("assert-eq") => {
                let args = form(f, "assert-eq", 2, Some(2))?;
                let side = |s: &Sexp| -> Result<Vec<Operand>, SyntaxError> {
                    match s.list() {
                        Some(items) => items.iter().map(parse_operand).collect(),
                        None => err(s.pos(), "expected a list of operands"),
                    }
                };
                statements.push(FileStatement::AssertEq(side(&args[0])?, side(&args[1])?));
            }
            Some("check" | "solve" | "reduce" | "export") => {
                if command.is_some() {
                    return err(f.pos(), "only one command is allowed");
                }
                let c = parse_command(f)?;
                match &c {
                    Command::Empty(a) => refs.push((a.clone(), f.pos(), false)),
                    Command::Subset(a, b) | Command::Equiv(a, b) => {
                        refs.push((a.clone(), f.pos(), false));
                        refs.push((b.clone(), f.pos(), false));
                    }
                    _ => {}
                }
                command = Some(c);
            }
            _ => return err(f.pos(), "expected a declaration, statement or command"),
        }
    }
    let Some(theory) = theory else {
        return err(Pos { line: 1, col: 1 }, "missing (theory ...)");
    };
    for (n, pos, is_transducer) in refs {
        let found = if is_transducer {
            transducers.iter().any(|(m, _)| *m == n)
        } else {
            automata.iter().any(|(m, _)| *m == n)
        };
        if !found {
            let kind = if is_transducer {
                "transducer"
            } else {
                "automaton"
            };
            return err(pos, format!("undefined {kind} `{n}`"));
        }
    }
    let end = text.lines().count().max(1);
    let Some(command) = command else {
        return err(Pos { line: end, col: 1 }, "missing command");
    };
    Ok(ProblemFile {
        theory,
        automata,
        transducers,
        statements,
        command,
    })
}

fn print_operands(out: &mut String, ops: &[Operand]) {
    for (i, o) in ops.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        match o {
            Operand::Var(v) => out.push_str(v),
            Operand::Seq(ts) => {
                out.push_str("(seq");
                for t in ts {
                    let _ = write!(out, " {t}");
                }
                out.push(')');
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn print_machine(
    out: &mut String,
    kind: &str,
    name: &str,
    params: &[String],
    states: &[String],
    initial: usize,
    finals: &BTreeSet<usize>,
    trans: Vec<String>,
) {
    let _ = writeln!(out, "({kind} {name}");
    let _ = writeln!(out, "  (params {})", params.join(" "));
    let _ = writeln!(out, "  (states {})", states.join(" "));
    let _ = writeln!(out, "  (init {})", states[initial]);
    let fs: Vec<&str> = finals.iter().map(|&f| states[f].as_str()).collect();
    let _ = write!(out, "  (final {})", fs.join(" "));
    for t in trans {
        let _ = write!(out, "\n  {t}");
    }
    out.push_str(")\n");
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = format!("(theory {})\n", self.theory);
        for (name, a) in &self.automata {
            let trans = a
                .transitions
                .iter()
                .map(|t| {
                    format!(
                        "(trans {} {} {})",
                        a.states[t.src], a.states[t.dst], t.guard
                    )
                })
                .collect();
            print_machine(
                &mut out,
                "automaton",
                name,
                &a.params,
                &a.states,
                a.initial,
                &a.finals,
                trans,
            );
        }
        for (name, t) in &self.transducers {
            let trans = t
                .transitions
                .iter()
                .map(|x| {
                    let outs: Vec<String> = x.output.iter().map(ToString::to_string).collect();
                    format!(
                        "(trans {} {} {} (out {}))",
                        t.states[x.src],
                        t.states[x.dst],
                        x.guard,
                        outs.join(" ")
                    )
                })
                .collect();
            print_machine(
                &mut out,
                "transducer",
                name,
                &t.params,
                &t.states,
                t.initial,
                &t.finals,
                trans,
            );
        }
        for s in &self.statements {
            match s {
                FileStatement::Assign(y, rhs) => {
                    let _ = write!(out, "(assign {y} ");
                    match rhs {
                        Rhs::Concat(ops) => {
                            out.push_str("(concat ");
                            print_operands(&mut out, ops);
                            out.push(')');
                        }
                        Rhs::Apply(t, x) => {
                            let _ = write!(out, "(apply {t} {x})");
                        }
                        Rhs::Reverse(x) => {
                            let _ = write!(out, "(reverse {x})");
                        }
                    }
                    out.push_str(")\n");
                }
                FileStatement::Assert(dnf) => {
                    let conj: Vec<String> = dnf
                        .iter()
                        .map(|d| {
                            let ins: Vec<String> =
                                d.iter().map(|(x, n)| format!("(in {x} {n})")).collect();
                            if ins.len() == 1 {
                                ins[0].clone()
                            } else {
                                format!("(and {})", ins.join(" "))
                            }
                        })
                        .collect();
                    let body = if conj.len() == 1 {
                        conj[0].clone()
                    } else {
                        format!("(or {})", conj.join(" "))
                    };
                    let _ = writeln!(out, "(assert {body})");
                }
                FileStatement::AssertElem(g) => {
                    let _ = writeln!(out, "(assert-elem {g})");
                }
                FileStatement::AssertLen(g) => {
                    let _ = writeln!(out, "(assert-len {g})");
                }
                FileStatement::AssertEq(l, r) => {
                    out.push_str("(assert-eq (");
                    print_operands(&mut out, l);
                    out.push_str(") (");
                    print_operands(&mut out, r);
                    out.push_str("))\n");
                }
            }
        }
        match &self.command {
            Command::Sat => out.push_str("(check sat)\n"),
            Command::Empty(a) => {
                let _ = writeln!(out, "(check empty {a})");
            }
            Command::Subset(a, b) => {
                let _ = writeln!(out, "(check subset {a} {b})");
            }
            Command::Equiv(a, b) => {
                let _ = writeln!(out, "(check equiv {a} {b})");
            }
            Command::Reduce => out.push_str("(reduce)\n"),
            Command::Export(p) => {
                let _ = writeln!(out, "(export {})", p.display());
            }
        }
        f.write_str(&out)
    }
}

//! Back-reference patterns in the style of the RegExLib product-code and
//! IP-address benchmarks.
//!
//! Letters are integers. Digits are `0..=9`; the separators are negative:
//! [`SEP`] between the fields of a product record, [`REC`] between the two
//! records or addresses, and [`DOT`] between octets.
//!
//! * `PrC-n`: `code SEP lot SEP payload REC code SEP lot SEP payload` with
//!   an `n`-digit code and lot and a one-letter payload. The two codes agree
//!   digit by digit through parameters `p1..pn`.
//! * `PrCL-n`: as `PrC-n`, and the lots also agree through `q1..qn`.
//! * `IP-n`: two dotted quads of three-digit octets (`d d d DOT` four times,
//!   minus the last dot) joined by `REC`. The first `n` digit positions of
//!   both addresses agree through `p1..pn`.

use std::fmt;

use crate::automata::{AutomataError, ParametricAutomaton, Transition};
use crate::theory::{CmpOp, Guard, LinExpr, TheoryKind};

pub const SEP: i64 = -1;
pub const REC: i64 = -2;
pub const DOT: i64 = -3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    PrC,
    PrCL,
    Ip,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::PrC => "PrC",
            Pattern::PrCL => "PrCL",
            Pattern::Ip => "IP",
        })
    }
}

/// One position of the fixed word shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    /// A digit, optionally tied to a parameter.
    Digit(Option<String>),
    Letter(i64),
    Any,
}

pub fn shape(kind: Pattern, n: usize) -> Vec<Slot> {
    let tied = |prefix: &str, i: usize| Slot::Digit(Some(format!("{prefix}{i}")));
    match kind {
        Pattern::PrC | Pattern::PrCL => {
            let record = || {
                let mut r: Vec<Slot> = (1..=n).map(|i| tied("p", i)).collect();
                r.push(Slot::Letter(SEP));
                r.extend((1..=n).map(|i| {
                    if kind == Pattern::PrCL {
                        tied("q", i)
                    } else {
                        Slot::Digit(None)
                    }
                }));
                r.push(Slot::Letter(SEP));
                r.push(Slot::Any);
                r
            };
            let mut w = record();
            w.push(Slot::Letter(REC));
            w.extend(record());
            w
        }
        Pattern::Ip => {
            let address = || {
                let mut a = Vec::new();
                for octet in 0..4 {
                    if octet > 0 {
                        a.push(Slot::Letter(DOT));
                    }
                    for d in 0..3 {
                        let pos = 3 * octet + d + 1;
                        a.push(if pos <= n {
                            tied("p", pos)
                        } else {
                            Slot::Digit(None)
                        });
                    }
                }
                a
            };
            let mut w = address();
            w.push(Slot::Letter(REC));
            w.extend(address());
            w
        }
    }
}

fn digit() -> Guard {
    Guard::and(vec![
        Guard::cmp(LinExpr::curr(), CmpOp::Ge, LinExpr::from_i64(0)),
        Guard::cmp(LinExpr::curr(), CmpOp::Le, LinExpr::from_i64(9)),
    ])
}

/// The automaton for `kind` at size `n`, `1 <= n <= 9`.
pub fn gen_suite2(kind: Pattern, n: usize) -> Result<ParametricAutomaton, AutomataError> {
    if !(1..=9).contains(&n) {
        return Err(AutomataError::Invalid(format!("size {n} is outside 1..=9")));
    }
    let slots = shape(kind, n);
    let mut params: Vec<String> = Vec::new();
    let mut transitions = Vec::with_capacity(slots.len());
    for (i, s) in slots.iter().enumerate() {
        let guard = match s {
            Slot::Digit(None) => digit(),
            Slot::Digit(Some(p)) => {
                if !params.contains(p) {
                    params.push(p.clone());
                }
                Guard::and(vec![
                    Guard::eq(LinExpr::curr(), LinExpr::var(p.as_str())),
                    digit(),
                ])
            }
            Slot::Letter(c) => Guard::eq(LinExpr::curr(), LinExpr::from_i64(*c)),
            Slot::Any => Guard::True,
        };
        transitions.push(Transition {
            src: i,
            guard,
            dst: i + 1,
        });
    }
    params.sort_by_key(|p| (p.chars().next(), p[1..].parse::<usize>().unwrap_or(0)));
    let states = (0..=slots.len()).map(|i| format!("s{i}")).collect();
    ParametricAutomaton::new(
        TheoryKind::Lia,
        params,
        states,
        transitions,
        0,
        [slots.len()].into(),
    )
}

/// The twelve `(L1, L2)` rows: product codes against code-and-lot in both
/// directions, then IP addresses pinned at growing prefixes.
pub fn suite2_rows() -> Vec<((Pattern, usize), (Pattern, usize))> {
    let mut rows = Vec::new();
    for n in [2, 3, 4, 6] {
        rows.push(((Pattern::PrC, n), (Pattern::PrCL, n)));
    }
    for n in [2, 3, 4, 6] {
        rows.push(((Pattern::PrCL, n), (Pattern::PrC, n)));
    }
    for (a, b) in [(2, 3), (3, 4), (4, 6), (6, 9)] {
        rows.push(((Pattern::Ip, a), (Pattern::Ip, b)));
    }
    rows
}

use proptest::prelude::*;

use super::*;
use crate::theory::linear::int;
use crate::theory::{CmpOp, LinExpr};

fn atom(theory: TheoryKind) -> BoxedStrategy<Guard> {
    let c = LinExpr::curr;
    let term = prop_oneof![
        Just(LinExpr::var("p")),
        Just(LinExpr::var("r")),
        (0..3i64).prop_map(LinExpr::from_i64),
    ];
    match theory {
        TheoryKind::Eq => term.prop_map(move |t| Guard::eq(c(), t)).boxed(),
        TheoryKind::Lra | TheoryKind::Lia => {
            let cmp = (term, 0..3usize, 0..3i64).prop_map(move |(t, op, off)| {
                let op = [CmpOp::Eq, CmpOp::Lt, CmpOp::Le][op];
                Guard::cmp(c(), op, t + LinExpr::from_i64(off - 1))
            });
            if theory == TheoryKind::Lia {
                prop_oneof![3 => cmp, 1 => (0..2i64).prop_map(move |r| Guard::congruence(c(), 2, r))].boxed()
            } else {
                cmp.boxed()
            }
        }
    }
}

fn guard(theory: TheoryKind) -> BoxedStrategy<Guard> {
    prop_oneof![
        1 => Just(Guard::True),
        3 => atom(theory),
        2 => atom(theory).prop_map(Guard::not),
        2 => (atom(theory), atom(theory)).prop_map(|(a, b)| Guard::and(vec![a, b])),
        1 => (atom(theory), atom(theory)).prop_map(|(a, b)| Guard::or(vec![a, b])),
    ]
    .boxed()
}

pub(crate) fn automaton(
    theory: TheoryKind,
    max_states: usize,
) -> BoxedStrategy<ParametricAutomaton> {
    (1..=max_states)
        .prop_flat_map(move |n| {
            let trans = proptest::collection::vec((0..n, guard(theory), 0..n), 0..=2 * n);
            let finals = proptest::collection::btree_set(0..n, 0..=n);
            (Just(n), trans, finals)
        })
        .prop_map(move |(n, trans, finals)| ParametricAutomaton {
            theory,
            params: vec!["p".into(), "r".into()],
            states: (0..n).map(|i| format!("s{i}")).collect(),
            transitions: trans
                .into_iter()
                .map(|(src, guard, dst)| Transition { src, guard, dst })
                .collect(),
            initial: 0,
            finals,
        })
        .boxed()
}

fn letters(theory: TheoryKind) -> Vec<Value> {
    let mut v: Vec<Value> = (-2..=3).map(int).collect();
    if theory == TheoryKind::Lra {
        v.push(int(1) / int(2));
    }
    v
}

fn params(theory: TheoryKind) -> impl Strategy<Value = Model> {
    let range = if theory == TheoryKind::Eq {
        0..4i64
    } else {
        -1..3i64
    };
    (range.clone(), range)
        .prop_map(|(p, r)| [("p".to_string(), int(p)), ("r".to_string(), int(r))].into())
}

fn word(theory: TheoryKind) -> impl Strategy<Value = Vec<Value>> {
    proptest::collection::vec(proptest::sample::select(letters(theory)), 0..=4)
}

fn all_words(alphabet: &[Value], max_len: usize) -> Vec<Vec<Value>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut w2: Vec<Value> = w.clone();
                w2.push(a.clone());
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn boolean_laws(
    theory: TheoryKind,
    a: &ParametricAutomaton,
    b: &ParametricAutomaton,
    m: &Model,
    w: &[Value],
) -> Result<(), TestCaseError> {
    let (ia, ib) = (a.accepts(m, w).unwrap(), b.accepts(m, w).unwrap());
    prop_assert_eq!(
        a.product(b).unwrap().accepts(m, w).unwrap(),
        ia && ib,
        "product, {}",
        theory
    );
    prop_assert_eq!(
        a.union(b).unwrap().accepts(m, w).unwrap(),
        ia || ib,
        "union"
    );
    prop_assert_eq!(
        a.complement().unwrap().accepts(m, w).unwrap(),
        !ia,
        "complement"
    );
    let rev: Vec<Value> = w.iter().rev().cloned().collect();
    prop_assert_eq!(a.reverse().accepts(m, &rev).unwrap(), ia, "reverse");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn boolean_laws_eq(a in automaton(TheoryKind::Eq, 3), b in automaton(TheoryKind::Eq, 3),
                       m in params(TheoryKind::Eq), w in word(TheoryKind::Eq)) {
        boolean_laws(TheoryKind::Eq, &a, &b, &m, &w)?;
    }

    #[test]
    fn boolean_laws_lia(a in automaton(TheoryKind::Lia, 3), b in automaton(TheoryKind::Lia, 3),
                        m in params(TheoryKind::Lia), w in word(TheoryKind::Lia)) {
        boolean_laws(TheoryKind::Lia, &a, &b, &m, &w)?;
    }

    #[test]
    fn boolean_laws_lra(a in automaton(TheoryKind::Lra, 3), b in automaton(TheoryKind::Lra, 3),
                        m in params(TheoryKind::Lra), w in word(TheoryKind::Lra)) {
        boolean_laws(TheoryKind::Lra, &a, &b, &m, &w)?;
    }

    #[test]
    fn nonemptiness_against_brute_force(a in automaton(TheoryKind::Lia, 3), b in automaton(TheoryKind::Lia, 2)) {
        let groups = vec![("X".to_string(), vec![a.clone(), b.clone()])];
        let found = is_nonempty(&groups, &Caps::default()).unwrap();
        if let Some(w) = &found {
            prop_assert!(a.accepts(&w.model, &w.words["X"]).unwrap());
            prop_assert!(b.accepts(&w.model, &w.words["X"]).unwrap());
        }
        let alphabet: Vec<Value> = (-2..=3).map(int).collect();
        let words = all_words(&alphabet, 3);
        let brute = (-1..3).any(|p| (-1..3).any(|r| {
            let m: Model = [("p".to_string(), int(p)), ("r".to_string(), int(r))].into();
            words.iter().any(|w| a.accepts(&m, w).unwrap() && b.accepts(&m, w).unwrap())
        }));
        if brute {
            prop_assert!(found.is_some());
        }
    }

    #[test]
    fn inclusion_is_sound_on_samples(a in automaton(TheoryKind::Eq, 2), b in automaton(TheoryKind::Eq, 2),
                                     m in params(TheoryKind::Eq), w in word(TheoryKind::Eq)) {
        match includes(&a, &b, &Caps::default()).unwrap() {
            Inclusion::Holds => {
                if a.accepts(&m, &w).unwrap() {
                    prop_assert!(b.accepts(&m, &w).unwrap());
                }
            }
            Inclusion::Witness { model, word } => {
                prop_assert!(a.accepts(&model, &word).unwrap());
                prop_assert!(!b.accepts(&model, &word).unwrap());
            }
        }
    }
}

use std::collections::BTreeSet;

use proptest::prelude::*;

use super::linear::int;
use super::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn lin_expr(
    vars: &'static [&'static str],
    coef: i64,
    konst: i64,
) -> impl Strategy<Value = LinExpr> {
    (
        proptest::collection::vec(-coef..=coef, vars.len()),
        -konst..=konst,
    )
        .prop_map(move |(cs, k)| {
            let mut e = LinExpr::from_i64(k);
            for (v, c) in vars.iter().zip(cs) {
                e.add_term(v, &int(c));
            }
            e
        })
}

fn lia_literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        (lin_expr(&VARS, 2, 3), 0..3usize, any::<bool>()).prop_map(|(e, r, pos)| {
            let rel = [Rel::Eq, Rel::Le, Rel::Lt][r];
            Literal {
                atom: Atom::linear(e, rel),
                positive: pos,
            }
        }),
        (lin_expr(&VARS, 2, 3), 2..4i64, 0..3i64, any::<bool>()).prop_map(|(e, m, r, pos)| {
            Literal {
                atom: Atom::congruence(e, m.into(), (r % m).into()),
                positive: pos,
            }
        }),
    ]
}

fn eq_literal() -> impl Strategy<Value = Literal> {
    let term = prop_oneof![
        (0..4usize).prop_map(|i| LinExpr::var(["a", "b", "c", "d"][i])),
        (0..2i64).prop_map(LinExpr::from_i64),
    ];
    (term.clone(), term, any::<bool>()).prop_map(|(l, r, pos)| Literal {
        atom: Atom::linear(l - r, Rel::Eq),
        positive: pos,
    })
}

fn all_vars(lits: &[Literal]) -> Vec<String> {
    let s: BTreeSet<String> = lits.iter().flat_map(|l| l.atom.free_vars()).collect();
    s.into_iter().collect()
}

/// Searches `[-r, r]^k` for a model of `lits`.
fn brute(lits: &[Literal], vars: &[String], r: i64) -> bool {
    let k = vars.len();
    let width = (2 * r + 1) as usize;
    let total = width.pow(k as u32);
    (0..total).any(|mut code| {
        let mut m = Model::new();
        for v in vars {
            m.insert(v.clone(), int((code % width) as i64 - r));
            code /= width;
        }
        lits.iter().all(|l| l.eval(&m).unwrap())
    })
}

fn guard_over_curr_p() -> impl Strategy<Value = Guard> {
    let atom =
        prop_oneof![
            (lin_expr(&["curr", "p"], 2, 3), 0..3usize).prop_map(|(e, r)| {
                Guard::Atom(Atom::linear(e, [Rel::Eq, Rel::Le, Rel::Lt][r]))
            }),
            (lin_expr(&["curr", "p"], 2, 3), 2..4i64)
                .prop_map(|(e, m)| Guard::Atom(Atom::congruence(e, m.into(), 1.into()))),
        ];
    atom.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Guard::not),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Guard::and),
            proptest::collection::vec(inner, 1..3).prop_map(Guard::or),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lia_sound_and_complete_on_small_boxes(lits in proptest::collection::vec(lia_literal(), 1..5)) {
        let vars = all_vars(&lits);
        let names: BTreeSet<String> = vars.iter().cloned().collect();
        match sat_conjunction(TheoryKind::Lia, &lits, &names) {
            Ok(Some(m)) => {
                for l in &lits {
                    prop_assert!(l.eval(&m).unwrap(), "model {:?} violates {}", m, l);
                }
                prop_assert!(m.values().all(|v| v.is_integer()));
            }
            Ok(None) => prop_assert!(!brute(&lits, &vars, 8), "missed a model of {:?}", lits),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn lra_models_satisfy(lits in proptest::collection::vec(lia_literal(), 1..5)) {
        let lits: Vec<Literal> =
            lits.into_iter().filter(|l| matches!(l.atom, Atom::Linear { .. })).collect();
        let vars = all_vars(&lits);
        let names: BTreeSet<String> = vars.iter().cloned().collect();
        let res = sat_conjunction(TheoryKind::Lra, &lits, &names).unwrap();
        match res {
            Some(m) => {
                for l in &lits {
                    prop_assert!(l.eval(&m).unwrap());
                }
            }
            // Integer points are rational points.
            None => prop_assert!(!brute(&lits, &vars, 4)),
        }
    }

    #[test]
    fn eq_agrees_with_brute_force(lits in proptest::collection::vec(eq_literal(), 1..6)) {
        let vars = all_vars(&lits);
        let names: BTreeSet<String> = vars.iter().cloned().collect();
        let res = sat_conjunction(TheoryKind::Eq, &lits, &names).unwrap();
        // Ids 0..=k+1 cover both constants and every class pattern.
        let r = vars.len() as i64 + 2;
        let found = brute(&lits, &vars, r);
        prop_assert_eq!(res.is_some(), found);
        if let Some(m) = res {
            for l in &lits {
                prop_assert!(l.eval(&m).unwrap());
            }
        }
    }

    #[test]
    fn substitute_commutes_with_eval(
        g in guard_over_curr_p(),
        t in lin_expr(&["curr", "p"], 2, 3),
        d in -5i64..5,
        p in -5i64..5,
    ) {
        let mut m = Model::new();
        m.insert("p".into(), int(p));
        let tv = t.eval_at(&int(d), &m).unwrap();
        prop_assert_eq!(
            g.substitute(&t).eval(&int(d), &m).unwrap(),
            g.eval(&tv, &m).unwrap()
        );
    }

    #[test]
    fn dnf_is_equivalent(g in guard_over_curr_p(), d in -5i64..5, p in -5i64..5) {
        let mut m = Model::new();
        m.insert("p".into(), int(p));
        let via_dnf = g
            .to_dnf()
            .iter()
            .any(|c| c.iter().all(|l| l.eval_at(&int(d), &m).unwrap()));
        prop_assert_eq!(via_dnf, g.eval(&int(d), &m).unwrap());
    }

    #[test]
    fn minterms_partition_letters(g in guard_over_curr_p(), d in -5i64..5, p in -5i64..5) {
        let atoms: Vec<Atom> = g.atoms().into_iter().take(3).collect();
        let ms = minterms(TheoryKind::Lia, atoms.iter()).unwrap();
        let mut m = Model::new();
        m.insert("p".into(), int(p));
        let actual: Vec<Literal> = atoms
            .iter()
            .map(|a| Literal { atom: a.clone(), positive: a.eval_at(&int(d), &m).unwrap() })
            .collect();
        let holding: Vec<&Conjunction> = ms
            .iter()
            .filter(|c| c.iter().all(|l| l.eval_at(&int(d), &m).unwrap()))
            .collect();
        prop_assert_eq!(holding.len(), 1);
        prop_assert_eq!(holding[0], &actual);
    }
}

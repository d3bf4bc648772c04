use super::fixtures::*;
use super::*;
use crate::theory::linear::int;
use crate::theory::LinExpr;

fn model(pairs: &[(&str, i64)]) -> Model {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), int(*v)))
        .collect()
}

fn word(vs: &[i64]) -> Vec<Value> {
    vs.iter().map(|v| int(*v)).collect()
}

#[test]
fn even_membership() {
    let a = even_i_star();
    let m = model(&[("p", 4)]);
    assert!(a.accepts(&m, &word(&[4, 4])).unwrap());
    assert!(a.accepts(&m, &[]).unwrap());
    assert!(!a.accepts(&m, &word(&[4, 5])).unwrap());
}

#[test]
fn membership_needs_parameters() {
    let err = even_i_star()
        .accepts(&Model::new(), &word(&[4]))
        .unwrap_err();
    assert_eq!(
        err,
        AutomataError::Theory(TheoryError::UnboundSymbol("p".into()))
    );
}

#[test]
fn product_of_a0_and_a1_is_empty() {
    let p = a0(TheoryKind::Eq).product(&a1(TheoryKind::Eq)).unwrap();
    let groups = vec![("X".to_string(), vec![p])];
    assert_eq!(is_nonempty(&groups, &Caps::default()).unwrap(), None);
}

#[test]
fn product_theory_mismatch() {
    let err = a0(TheoryKind::Eq)
        .product(&a1(TheoryKind::Lia))
        .unwrap_err();
    assert!(matches!(
        err,
        AutomataError::Theory(TheoryError::TheoryMismatch(_))
    ));
}

#[test]
fn union_with_itself_and_empty() {
    let a = a1(TheoryKind::Eq);
    let u = a.union(&a).unwrap();
    let e = a
        .union(&ParametricAutomaton::empty(TheoryKind::Eq))
        .unwrap();
    let m = model(&[("k", 3)]);
    for w in [vec![], vec![3], vec![1, 2], vec![1, 3, 1]] {
        let w = word(&w);
        let expect = a.accepts(&m, &w).unwrap();
        assert_eq!(u.accepts(&m, &w).unwrap(), expect);
        assert_eq!(e.accepts(&m, &w).unwrap(), expect);
    }
}

#[test]
fn complement_of_universal_is_empty() {
    let c = ParametricAutomaton::universal(TheoryKind::Lia)
        .complement()
        .unwrap();
    let groups = vec![("X".to_string(), vec![c])];
    assert_eq!(is_nonempty(&groups, &Caps::default()).unwrap(), None);
}

#[test]
fn complement_of_a1_matches_a0() {
    let c = a1(TheoryKind::Eq).complement().unwrap();
    let a = a0(TheoryKind::Eq);
    for k in 0..3 {
        let m = model(&[("k", k)]);
        for w in [vec![], vec![0], vec![1, 2], vec![2, 2, 0], vec![1, 1, 1]] {
            let w = word(&w);
            assert_eq!(c.accepts(&m, &w).unwrap(), a.accepts(&m, &w).unwrap());
        }
    }
}

#[test]
fn complement_state_cap() {
    let caps = Caps {
        max_states: 1,
        max_paths: 10,
    };
    let err = a1(TheoryKind::Eq).complement_with(&caps).unwrap_err();
    assert_eq!(err, AutomataError::StateBlowup(1));
}

#[test]
fn restrict_identity_and_sections() {
    let a = a1(TheoryKind::Eq);
    assert_eq!(a.restrict(a.initial, a.finals.clone()).unwrap(), a);
    let m = model(&[("k", 7)]);
    let to_q1 = a.restrict_named("q0", &["q1"]).unwrap();
    assert!(to_q1.accepts(&m, &word(&[1, 7])).unwrap());
    assert!(!to_q1.accepts(&m, &word(&[1, 2])).unwrap());
    let back = a.restrict_named("q1", &["q0"]).unwrap();
    let groups = vec![("X".to_string(), vec![back])];
    assert_eq!(is_nonempty(&groups, &Caps::default()).unwrap(), None);
    assert!(matches!(
        a.restrict_named("q9", &[]),
        Err(AutomataError::UnknownState(_))
    ));
}

#[test]
fn reverse_moves_first_to_last() {
    let r = first_is(TheoryKind::Eq).reverse();
    let m = model(&[("p", 5)]);
    assert!(r.accepts(&m, &word(&[1, 2, 5])).unwrap());
    assert!(!r.accepts(&m, &word(&[5, 2, 1])).unwrap());
    let rr = r.reverse();
    for w in [vec![5], vec![5, 1], vec![1, 5], vec![]] {
        let w = word(&w);
        assert_eq!(
            rr.accepts(&m, &w).unwrap(),
            first_is(TheoryKind::Eq).accepts(&m, &w).unwrap()
        );
    }
    let e = ParametricAutomaton::empty(TheoryKind::Eq).reverse();
    assert_eq!(
        is_nonempty(&[("X".to_string(), vec![e])], &Caps::default()).unwrap(),
        None
    );
}

#[test]
fn even_is_nonempty() {
    let w = is_nonempty(&[("X".to_string(), vec![even_i_star()])], &Caps::default())
        .unwrap()
        .unwrap();
    assert!(w.model["p"].to_integer() % 2 == 0.into());
    assert!(even_i_star().accepts(&w.model, &w.words["X"]).unwrap());
}

#[test]
fn a0_against_a1_section_is_empty() {
    let sec = a1(TheoryKind::Eq).restrict_named("q0", &["q1"]).unwrap();
    let groups = vec![("X".to_string(), vec![a0(TheoryKind::Eq), sec])];
    assert_eq!(is_nonempty(&groups, &Caps::default()).unwrap(), None);
}

#[test]
fn shared_parameter_across_groups() {
    let groups = vec![
        ("X".to_string(), vec![a1(TheoryKind::Eq)]),
        ("Y".to_string(), vec![a0(TheoryKind::Eq)]),
    ];
    let w = is_nonempty(&groups, &Caps::default()).unwrap().unwrap();
    let k = &w.model["k"];
    assert!(w.words["X"].contains(k));
    assert!(!w.words["Y"].contains(k));
    assert!(a1(TheoryKind::Eq).accepts(&w.model, &w.words["X"]).unwrap());
}

#[test]
fn side_constraint_restricts_parameters() {
    let side = Guard::eq(var("p"), LinExpr::from_i64(3));
    let groups = vec![("X".to_string(), vec![even_i_star()])];
    let w = is_nonempty_with(TheoryKind::Lia, &groups, &side, &Caps::default())
        .unwrap()
        .unwrap();
    // p = 3 is odd, so only the empty word is left.
    assert_eq!(w.words["X"], Vec::<Value>::new());
    assert_eq!(w.model["p"], int(3));
}

#[test]
fn inclusion_basics() {
    let caps = Caps::default();
    let a = a0(TheoryKind::Eq);
    assert!(includes(&a, &a, &caps).unwrap().holds());
    assert!(
        includes(&a, &ParametricAutomaton::universal(TheoryKind::Eq), &caps)
            .unwrap()
            .holds()
    );
    let cc = a.complement().unwrap().complement().unwrap();
    assert!(equiv(&a, &cc, &caps).unwrap().holds());
    match equiv(&a0(TheoryKind::Eq), &a1(TheoryKind::Eq), &caps).unwrap() {
        Inclusion::Witness { model, word } => {
            let in0 = a0(TheoryKind::Eq).accepts(&model, &word).unwrap();
            let in1 = a1(TheoryKind::Eq).accepts(&model, &word).unwrap();
            assert_ne!(in0, in1);
        }
        Inclusion::Holds => panic!("A0 and A1 differ"),
    }
}

#[test]
fn path_cap_fires() {
    let caps = Caps {
        max_states: 100,
        max_paths: 0,
    };
    let err = is_nonempty(&[("X".to_string(), vec![even_i_star()])], &caps).unwrap_err();
    assert_eq!(err, AutomataError::PathBlowup(0));
}

#[test]
fn witness_words_are_keyed_by_variable() {
    let groups = vec![("Z".to_string(), vec![first_is(TheoryKind::Lra)])];
    let w = is_nonempty(&groups, &Caps::default()).unwrap().unwrap();
    let keys: Vec<&String> = w.words.keys().collect();
    assert_eq!(keys, vec!["Z"]);
}

//! End-to-end checks of the parse -> ground -> translate -> solve ->
//! transitions -> compose pipeline over the bundled corpus.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use bc_mas::compose::{
    check_conflict_preservation, check_covered_law_sufficiency, compose_stage, covered_laws,
    is_covered, potential_conflicts, AbKeying, CheckOptions, MasSpec,
};
use bc_mas::manifest::{load_description, load_manifest, load_mas};
use bc_mas::model::{ActionDescription, Atom, Literal};
use bc_mas::parser::{parse, parse_ground_atoms, parse_ground_literals, pretty_print};
use bc_mas::transition::{
    export_json, import_json, state_from_positives, transitions, CompoundAction, State,
    Transition, TransitionOracle,
};
use bc_mas::translate::{expected_rule_count, translate};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn sumo_single() -> ActionDescription {
    load_description(&corpus("sumo_single.bc")).unwrap().0
}

fn state_of(desc: &ActionDescription, positives: &str) -> State {
    let lits = parse_ground_literals(positives).unwrap();
    state_from_positives(&desc.signature, &lits).unwrap()
}

fn action_of(names: &str) -> CompoundAction {
    if names.is_empty() {
        CompoundAction::empty()
    } else {
        CompoundAction::from_atoms(parse_ground_atoms(names).unwrap())
    }
}

#[test]
fn corpus_files_parse_and_round_trip() {
    for name in [
        "sumo_single.bc",
        "sumo_a.bc",
        "sumo_b.bc",
        "sumo_conflict.bc",
        "sumo_resolution.bc",
        "table_left.bc",
        "table_right.bc",
        "table_conflict.bc",
        "table_resolution.bc",
        "empty.bc",
    ] {
        let text = std::fs::read_to_string(corpus(name)).unwrap();
        let spec = parse(&text).unwrap_or_else(|e| panic!("{}: {}", name, e));
        let printed = pretty_print(&spec);
        let reparsed = parse(&printed).unwrap_or_else(|e| panic!("{} reparse: {}", name, e));
        assert_eq!(spec, reparsed, "{} round trip", name);
    }
}

#[test]
fn corpus_files_validate_cleanly() {
    for name in ["sumo_single.bc", "sumo_a.bc", "table_left.bc"] {
        let desc = load_description(&corpus(name)).unwrap().0;
        let errors: Vec<_> = desc.validate().into_iter().filter(|d| d.is_error()).collect();
        assert!(errors.is_empty(), "{}: {:?}", name, errors);
    }
}

#[test]
fn single_sumo_rule_counts_follow_the_formula() {
    let desc = sumo_single();
    for l in 0..=2 {
        let p = translate(&desc, l as i64).unwrap();
        assert_eq!(p.rules.len(), expected_rule_count(&desc, l));
    }
}

#[test]
fn single_sumo_has_the_three_listed_states() {
    let desc = sumo_single();
    let states = bc_mas::transition::states(&desc).unwrap();
    let expected: BTreeSet<State> = [
        state_of(&desc, "at(a,1)"),
        state_of(&desc, "at(a,2)"),
        state_of(&desc, "out(a)"),
    ]
    .into_iter()
    .collect();
    assert_eq!(states, expected);
}

#[test]
fn single_sumo_has_the_four_moves_plus_idle_loops() {
    let desc = sumo_single();
    let ts = transitions(&desc).unwrap();
    let s1 = state_of(&desc, "at(a,1)");
    let s2 = state_of(&desc, "at(a,2)");
    let s3 = state_of(&desc, "out(a)");
    let mut expected = BTreeSet::new();
    for (from, act, to) in [
        (&s1, "goRight(a)", &s2),
        (&s2, "goLeft(a)", &s1),
        (&s1, "goLeft(a)", &s3),
        (&s2, "goRight(a)", &s3),
    ] {
        expected.insert(Transition {
            from: from.clone(),
            action: action_of(act),
            to: to.clone(),
        });
    }
    for s in [&s1, &s2, &s3] {
        expected.insert(Transition {
            from: s.clone(),
            action: CompoundAction::empty(),
            to: s.clone(),
        });
    }
    assert_eq!(ts.transitions, expected);
}

#[test]
fn single_sumo_transition_json_round_trips() {
    let desc = sumo_single();
    let ts = transitions(&desc).unwrap();
    let back = import_json(&export_json(&ts)).unwrap();
    assert_eq!(back, ts);
}

fn fig1_states(u: &ActionDescription) -> Vec<State> {
    // both-in-ring states of the figure, a left of b
    vec![
        state_of(u, "at(a,1),at(b,4)"), // s1
        state_of(u, "at(a,2),at(b,3)"), // s2
        state_of(u, "at(a,1),at(b,3)"), // s3
        state_of(u, "at(a,2),at(b,4)"), // s4
        state_of(u, "at(a,1),at(b,2)"), // s5
        state_of(u, "at(a,3),at(b,4)"), // s6
    ]
}

#[test]
fn two_sumo_union_has_21_states_without_positive_abnormalities() {
    let mas = load_mas(&load_manifest(&corpus("sumo_union.toml")).unwrap()).unwrap();
    let union = compose_stage(&mas, false, AbKeying::default()).unwrap();
    let oracle = TransitionOracle::new(&union);
    let states = oracle.states().unwrap();
    assert_eq!(states.len(), 21);
    for s in &states {
        assert!(
            s.positive_ab_atoms(&union.signature).is_empty(),
            "state {} holds an abnormality",
            s
        );
    }
    for s in fig1_states(&union) {
        assert!(states.contains(&s), "missing figure state {}", s);
    }
}

#[test]
fn two_sumo_union_contains_the_twenty_drawn_edges() {
    let mas = load_mas(&load_manifest(&corpus("sumo_union.toml")).unwrap()).unwrap();
    let union = compose_stage(&mas, false, AbKeying::default()).unwrap();
    let ts = transitions(&union).unwrap();
    let s = fig1_states(&union);
    let (s1, s2, s3, s4, s5, s6) = (&s[0], &s[1], &s[2], &s[3], &s[4], &s[5]);
    let edges = [
        (s1, "goLeft(b)", s3),
        (s3, "goRight(b)", s1),
        (s1, "goRight(a)", s4),
        (s4, "goLeft(a)", s1),
        (s1, "goRight(a),goLeft(b)", s2),
        (s2, "goLeft(a),goRight(b)", s1),
        (s2, "goLeft(a)", s3),
        (s3, "goRight(a)", s2),
        (s2, "goRight(b)", s4),
        (s4, "goLeft(b)", s2),
        (s3, "goRight(a),goRight(b)", s4),
        (s4, "goLeft(a),goLeft(b)", s3),
        (s3, "goLeft(b)", s5),
        (s5, "goRight(b)", s3),
        (s5, "goRight(a),goRight(b)", s2),
        (s2, "goLeft(a),goLeft(b)", s5),
        (s6, "goLeft(a),goLeft(b)", s2),
        (s2, "goRight(a),goRight(b)", s6),
        (s4, "goRight(a)", s6),
        (s6, "goLeft(a)", s4),
    ];
    assert_eq!(edges.len(), 20);
    for (from, act, to) in edges {
        let t = Transition {
            from: from.clone(),
            action: action_of(act),
            to: to.clone(),
        };
        assert!(ts.transitions.contains(&t), "missing edge {} --{}--> {}", from, action_of(act), to);
    }
    // the ruled-out pass-through move
    let passing = Transition {
        from: state_of(&union, "at(a,2),at(b,3)"),
        action: action_of("goRight(a),goLeft(b)"),
        to: state_of(&union, "at(a,3),at(b,2)"),
    };
    assert!(!ts.transitions.contains(&passing));
    assert!(!ts
        .transitions
        .iter()
        .any(|t| t.from == passing.from && t.action == passing.action));
}

#[test]
fn two_sumo_union_mirror_symmetry() {
    // renaming a<->b, slot k -> 5-k, goLeft <-> goRight maps T onto itself
    let mas = load_mas(&load_manifest(&corpus("sumo_union.toml")).unwrap()).unwrap();
    let union = compose_stage(&mas, false, AbKeying::default()).unwrap();
    let ts = transitions(&union).unwrap();

    fn mirror_term(t: &bc_mas::model::Term) -> bc_mas::model::Term {
        use bc_mas::model::Term;
        match t {
            Term::Int(k) => Term::Int(5 - k),
            Term::Name(n) if n == "a" => Term::Name("b".into()),
            Term::Name(n) if n == "b" => Term::Name("a".into()),
            Term::Name(n) => Term::Name(n.clone()),
            Term::App(f, args) => {
                let (f, args) = mirror_app(f, args);
                Term::App(f, args)
            }
            Term::Neg(inner) => Term::Neg(Box::new(mirror_term(inner))),
        }
    }
    fn mirror_app(f: &str, args: &[bc_mas::model::Term]) -> (String, Vec<bc_mas::model::Term>) {
        let name = match f {
            "goLeft" => "goRight".to_string(),
            "goRight" => "goLeft".to_string(),
            other => other.to_string(),
        };
        (name, args.iter().map(mirror_term).collect())
    }
    fn mirror_atom(a: &Atom) -> Atom {
        let (functor, args) = mirror_app(&a.functor, &a.args);
        Atom::new(functor, args)
    }
    fn mirror_state(s: &State) -> State {
        State::new(
            s.literals
                .iter()
                .map(|l| Literal {
                    atom: mirror_atom(&l.atom),
                    positive: l.positive,
                })
                .collect(),
        )
    }

    for t in &ts.transitions {
        let mirrored = Transition {
            from: mirror_state(&t.from),
            action: CompoundAction::from_atoms(t.action.0.iter().map(mirror_atom)),
            to: mirror_state(&t.to),
        };
        assert!(
            ts.transitions.contains(&mirrored),
            "mirror of {} --{}--> {} missing",
            t.from,
            t.action,
            t.to
        );
    }
}

#[test]
fn two_sumo_conflict_catalogue_matches_the_figure() {
    let mas = load_mas(&load_manifest(&corpus("sumo_union.toml")).unwrap()).unwrap();
    let union = compose_stage(&mas, false, AbKeying::default()).unwrap();
    let report = potential_conflicts(&union, None).unwrap();
    let s = fig1_states(&union);
    let head_on = action_of("goRight(a),goLeft(b)");
    // conflict at s2..s6, transition at s1
    assert!(!report.contains(&s[0], &head_on));
    for state in &s[1..] {
        assert!(report.contains(state, &head_on), "expected conflict at {}", state);
    }
    for single in ["goRight(a)", "goLeft(b)"] {
        let c = action_of(single);
        for (i, state) in s.iter().enumerate() {
            let expected = matches!(i, 1 | 4 | 5); // s2, s5, s6
            assert_eq!(
                report.contains(state, &c),
                expected,
                "{} at {}",
                c,
                state
            );
        }
    }
    // every state keeps its idle self-loop
    for (_, conflicts) in &report.per_state {
        assert!(!conflicts.contains(&CompoundAction::empty()));
    }
}

#[test]
fn covered_laws_at_s4_match_the_running_example() {
    let mas = load_mas(&load_manifest(&corpus("sumo_union.toml")).unwrap()).unwrap();
    let union = compose_stage(&mas, false, AbKeying::default()).unwrap();
    let s4 = state_of(&union, "at(a,2),at(b,4)");
    let c = action_of("goRight(a),goLeft(b)");
    let covered = covered_laws(&union, &c, &s4);
    let texts: BTreeSet<String> = covered.iter().map(|l| l.to_string()).collect();
    // movement effects of the two performed actions
    assert!(texts.contains("at(a,3) after goRight(a), at(a,2)."));
    assert!(texts.contains("at(b,3) after goLeft(b), at(b,4)."));
    // inertia of the source positions
    assert!(texts.contains("at(a,2) after at(a,2) ifcons at(a,2)."));
    assert!(texts.contains("at(b,4) after at(b,4) ifcons at(b,4)."));
    // nothing covered mentions actions outside the compound action
    for law in &covered {
        assert!(is_covered(law, &c, &s4, &union.signature));
        for lit in &law.after {
            if union.signature.is_action(&lit.atom) && lit.positive {
                assert!(c.contains(&lit.atom), "{} not performed", lit.atom);
            }
        }
    }
}

#[test]
fn global_sumo_resolves_the_bounce_conflict_at_s4() {
    let mas = load_mas(&load_manifest(&corpus("sumo_global.toml")).unwrap()).unwrap();
    let union = compose_stage(&mas, false, AbKeying::default()).unwrap();
    let global = compose_stage(&mas, true, AbKeying::default()).unwrap();
    let oracle = TransitionOracle::new(&global);

    // the source: s4 extended with all abnormality fluents negative
    let s4 = state_of(&global, "at(a,2),at(b,4)");
    let c = action_of("goRight(a),goLeft(b)");
    assert!(oracle.contains_state(&s4).unwrap());
    // successor s7: bounce back, both movement abnormalities hold
    let s7 = state_of(&global, "at(a,2),at(b,4),ab'(at(a,3)),ab'(at(b,3))");
    assert!(oracle.has_transition(&s4, &c, &s7).unwrap());

    // it is the only successor under this compound action
    let succ = oracle.successors(&s4, &c).unwrap();
    assert_eq!(succ, vec![s7.clone()]);
    let positive_ab = s7.positive_ab_atoms(&global.signature);
    let expected: Vec<Atom> = parse_ground_atoms("ab'(at(a,3)),ab'(at(b,3))").unwrap();
    assert_eq!(positive_ab, expected);

    // and the pair is no longer a conflict, while it was one in the union
    let union_oracle = TransitionOracle::new(&union);
    let s4_union = state_of(&union, "at(a,2),at(b,4)");
    assert!(!union_oracle.has_any_successor(&s4_union, &c).unwrap());
    assert!(oracle.has_any_successor(&s4, &c).unwrap());
}

#[test]
fn global_sumo_admits_superfluous_abnormality_states() {
    let mas = load_mas(&load_manifest(&corpus("sumo_global.toml")).unwrap()).unwrap();
    let global = compose_stage(&mas, true, AbKeying::default()).unwrap();
    let oracle = TransitionOracle::new(&global);
    let odd = state_of(&global, "at(a,1),at(b,4),ab'(at(a,3))");
    assert!(oracle.contains_state(&odd).unwrap());
    assert_eq!(
        odd.positive_ab_atoms(&global.signature),
        parse_ground_atoms("ab'(at(a,3))").unwrap()
    );
}

#[test]
fn push_moves_the_neighbour_and_leaves_no_abnormality() {
    let mas = load_mas(&load_manifest(&corpus("sumo_global.toml")).unwrap()).unwrap();
    let global = compose_stage(&mas, true, AbKeying::default()).unwrap();
    let oracle = TransitionOracle::new(&global);
    let s2 = state_of(&global, "at(a,2),at(b,3)");
    let c = action_of("goRight(a)");
    let succ = oracle.successors(&s2, &c).unwrap();
    assert_eq!(succ.len(), 1);
    let to = &succ[0];
    assert!(to.contains(&parse_ground_literals("at(a,3)").unwrap()[0]));
    assert!(to.contains(&parse_ground_literals("at(b,4)").unwrap()[0]));
    assert!(to.positive_ab_atoms(&global.signature).is_empty());
}

#[test]
fn resist_keeps_both_sumos_in_place() {
    let mas = load_mas(&load_manifest(&corpus("sumo_global.toml")).unwrap()).unwrap();
    let global = compose_stage(&mas, true, AbKeying::default()).unwrap();
    let oracle = TransitionOracle::new(&global);
    let s2 = state_of(&global, "at(a,2),at(b,3)");
    let c = action_of("goRight(a),goLeft(b)");
    let succ = oracle.successors(&s2, &c).unwrap();
    assert_eq!(succ.len(), 1);
    let to = &succ[0];
    assert!(to.contains(&parse_ground_literals("at(a,2)").unwrap()[0]));
    assert!(to.contains(&parse_ground_literals("at(b,3)").unwrap()[0]));
}

#[test]
fn table_agent_alone_has_two_states_and_three_transitions() {
    let desc = load_description(&corpus("table_left.bc")).unwrap().0;
    let ts = transitions(&desc).unwrap();
    let onfloor = state_of(&desc, "table(onfloor)");
    let leftup = state_of(&desc, "table(leftup)");
    let expected_states: BTreeSet<State> = [onfloor.clone(), leftup.clone()].into_iter().collect();
    assert_eq!(ts.states, expected_states);
    let mut expected = BTreeSet::new();
    expected.insert(Transition {
        from: onfloor.clone(),
        action: CompoundAction::empty(),
        to: onfloor.clone(),
    });
    expected.insert(Transition {
        from: leftup.clone(),
        action: CompoundAction::empty(),
        to: leftup.clone(),
    });
    expected.insert(Transition {
        from: onfloor.clone(),
        action: action_of("lift_l"),
        to: leftup.clone(),
    });
    assert_eq!(ts.transitions, expected);
}

#[test]
fn table_union_covers_the_lifted_state_via_defeated_impossible_laws() {
    let mas = load_mas(&load_manifest(&corpus("table_union.toml")).unwrap()).unwrap();
    let union = compose_stage(&mas, false, AbKeying::default()).unwrap();
    let ts = transitions(&union).unwrap();
    assert_eq!(ts.states.len(), 4);
    assert_eq!(ts.transitions.len(), 6);
    let ab_l = parse_ground_atoms("ab(imp(l))").unwrap().remove(0);
    let ab_r = parse_ground_atoms("ab(imp(r))").unwrap().remove(0);
    for s in &ts.states {
        let abs = s.positive_ab_atoms(&union.signature);
        assert!(abs.contains(&ab_l), "{} misses ab(imp(l))", s);
        assert!(abs.contains(&ab_r), "{} misses ab(imp(r))", s);
    }
    // the two lift transitions
    let onfloor = state_of(&union, "table(onfloor),ab(imp(l)),ab(imp(r))");
    let leftup = state_of(&union, "table(leftup),ab(imp(l)),ab(imp(r))");
    let rightup = state_of(&union, "table(rightup),ab(imp(l)),ab(imp(r))");
    assert!(ts.transitions.contains(&Transition {
        from: onfloor.clone(),
        action: action_of("lift_l"),
        to: leftup
    }));
    assert!(ts.transitions.contains(&Transition {
        from: onfloor.clone(),
        action: action_of("lift_r"),
        to: rightup
    }));
    // simultaneous lifting is a potential conflict of the union
    let report = potential_conflicts(&union, None).unwrap();
    assert!(report.contains(&onfloor, &action_of("lift_l,lift_r")));
}

#[test]
fn table_resolution_reaches_the_lifted_state() {
    let mas = load_mas(&load_manifest(&corpus("table_global.toml")).unwrap()).unwrap();
    let global = compose_stage(&mas, true, AbKeying::default()).unwrap();
    let oracle = TransitionOracle::new(&global);
    let onfloor = state_of(&global, "table(onfloor),ab(imp(l)),ab(imp(r))");
    let c = action_of("lift_l,lift_r");
    let succ = oracle.successors(&onfloor, &c).unwrap();
    assert_eq!(succ.len(), 1);
    let lifted_lit = &parse_ground_literals("table(lifted)").unwrap()[0];
    assert!(succ[0].contains(lifted_lit));
}

#[test]
fn lemma_suites_hold_on_the_small_corpus() {
    let opts = CheckOptions::default();
    for desc in [
        load_description(&corpus("sumo_single.bc")).unwrap().0,
        load_description(&corpus("table_left.bc")).unwrap().0,
    ] {
        let r1 = check_conflict_preservation(&desc, &opts).unwrap();
        assert!(r1.holds(), "{}", r1);
        assert!(r1.cases > 0);
        let r2 = check_covered_law_sufficiency(&desc, &opts).unwrap();
        assert!(r2.holds(), "{}", r2);
        assert!(r2.cases > 0);
    }
}

#[test]
fn lemma_one_is_trivial_without_dynamic_laws() {
    let desc = bc_mas::grounder::ground(
        &parse("sort s = {x}. fluent p(s) : regular. action go(s).\ndefault p(x). default -p(x).")
            .unwrap(),
    )
    .unwrap()
    .0;
    let report = check_conflict_preservation(&desc, &CheckOptions::default()).unwrap();
    assert!(report.holds());
}

#[test]
fn auto_resolve_builds_a_verified_bounce_resolution() {
    let mas = load_mas(&load_manifest(&corpus("sumo_union.toml")).unwrap()).unwrap();
    let union = compose_stage(&mas, false, AbKeying::default()).unwrap();
    let s4 = state_of(&union, "at(a,2),at(b,4)");
    let c = action_of("goRight(a),goLeft(b)");
    let res = bc_mas::compose::auto_resolve(&union, &c, &s4, &s4, &CheckOptions::default())
        .unwrap_or_else(|e| panic!("resolution failed: {}", e));
    // defeaters for every covered law, plus causes for the target literals
    assert!(!res.laws.is_empty());
    for law in &res.laws {
        assert!(is_covered(law, &c, &s4, &union.signature));
    }
    // the verified successor keeps the source positions
    let to = &res.verified.to;
    assert!(to.contains(&parse_ground_literals("at(a,2)").unwrap()[0]));
    assert!(to.contains(&parse_ground_literals("at(b,4)").unwrap()[0]));
    // d lists one positive literal per defeated law head, negatives elsewhere
    assert!(res.d.iter().any(|l| l.positive));
    assert!(res.d.iter().any(|l| !l.positive));
    // rendered laws parse back as a resolution component
    let rendered = res.render_bc();
    assert!(rendered.contains("after"));
}

#[test]
fn auto_resolve_without_covered_laws_yields_only_causing_laws() {
    // no laws at all: time-1 values are underivable, so every compound
    // action is a potential conflict at every state
    let desc = bc_mas::grounder::ground(
        &parse("sort s = {x}. fluent p(s) : regular. action go(s) agent g.").unwrap(),
    )
    .unwrap()
    .0;
    let s = state_of(&desc, "p(x)");
    let target = state_of(&desc, "");
    let c = action_of("go(x)");
    // sanity: the conflict is real (nothing derives any fluent at time 1)
    let oracle = TransitionOracle::new(&desc);
    assert!(!oracle.has_any_successor(&s, &c).unwrap());
    let res = bc_mas::compose::auto_resolve(&desc, &c, &s, &target, &CheckOptions::default())
        .unwrap();
    assert!(res.laws.iter().all(|l| l.head.atom.functor != "ab'"));
    assert!(res.d.is_empty()); // no dynamic laws, so no abnormality fluents
    assert_eq!(res.verified.to, target);
}

#[test]
fn auto_resolve_rejects_non_conflicts() {
    let desc = sumo_single();
    let s1 = state_of(&desc, "at(a,1)");
    let c = action_of("goRight(a)");
    let err =
        bc_mas::compose::auto_resolve(&desc, &c, &s1, &s1, &CheckOptions::default()).unwrap_err();
    assert!(err.to_string().contains("not a potential conflict"));
}

#[test]
fn compose_rejects_unknown_abnormality_references() {
    let conflict = bc_mas::grounder::ground(
        &parse("sort s = {x}. fluent p(s) : regular.\nab(ghost).").unwrap(),
    )
    .unwrap()
    .0;
    let agent = bc_mas::grounder::ground(
        &parse("sort s = {x}. fluent p(s) : regular. action go(s) agent g.\ninertial p(x).")
            .unwrap(),
    )
    .unwrap()
    .0;
    let mut mas = MasSpec::default();
    mas.agents.insert("g".into(), agent);
    mas.conflict = Some(conflict);
    let err = compose_stage(&mas, false, AbKeying::default()).unwrap_err();
    assert!(err.to_string().contains("ab(ghost)"));
}

use islkit_core::canon::{cano, is_canonical};
use islkit_core::entail::{entails, entails_oracle};
use islkit_core::parse::{parse_assertion, parse_command};
use islkit_core::proof::{check, parse_derivation, print_derivation};
use islkit_core::semantics::{brute_wpo_over, enum_states, models, satisfies, DomainSpec};
use islkit_core::wpo::{synthesize, wpo, WpoConfig};
use islkit_core::*;
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(&VARS[..]).prop_map(Var::new)
}

fn term_over(names: Vec<&'static str>) -> impl Strategy<Value = Term> {
    prop_oneof![
        1 => Just(Term::Null),
        3 => prop::sample::select(names).prop_map(Term::var),
    ]
}

fn pure_over(names: Vec<&'static str>) -> impl Strategy<Value = PureAtom> {
    (term_over(names.clone()), term_over(names), any::<bool>()).prop_map(|(a, b, eq)| {
        if eq {
            PureAtom::eq(a, b)
        } else {
            PureAtom::neq(a, b)
        }
    })
}

fn heap_over(names: Vec<&'static str>) -> impl Strategy<Value = SymbolicHeap> {
    let n = names.len();
    (
        prop::collection::vec(pure_over(names.clone()), 0..3),
        prop::sample::subsequence(names.clone(), 0..=n.min(2)),
        prop::collection::vec((any::<bool>(), term_over(names)), 2),
    )
        .prop_map(|(pure, sources, targets)| {
            let mut h = SymbolicHeap::from_pure(pure);
            for (src, (pts, t)) in sources.into_iter().zip(targets) {
                h.push_spatial(if pts {
                    SpatialAtom::PointsTo(Var::new(src), t)
                } else {
                    SpatialAtom::NegPoints(Var::new(src))
                });
            }
            h
        })
}

fn heap() -> impl Strategy<Value = SymbolicHeap> {
    heap_over(VARS.to_vec())
}

fn quantified() -> impl Strategy<Value = QuantifiedHeap> {
    prop_oneof![
        heap().prop_map(QuantifiedHeap::unquantified),
        heap_over(vec!["x", "y", "a"]).prop_map(|h| QuantifiedHeap::new(vec![Var::new("a")], h)),
    ]
}

fn assertion() -> impl Strategy<Value = Assertion> {
    prop::collection::vec(quantified(), 1..3).prop_map(Assertion::new)
}

fn atomic() -> impl Strategy<Value = Command> {
    prop_oneof![
        Just(Command::Skip),
        Just(Command::Error),
        (var(), term_over(VARS.to_vec())).prop_map(|(x, t)| Command::Assign(x, t)),
        var().prop_map(Command::Havoc),
        pure_over(VARS.to_vec()).prop_map(|a| Command::Assume(SymbolicHeap::from_pure([a]))),
        var().prop_map(Command::Alloc),
        var().prop_map(Command::Free),
        (var(), var()).prop_map(|(x, y)| Command::Load(x, y)),
        (var(), term_over(VARS.to_vec())).prop_map(|(x, t)| Command::Store(x, t)),
    ]
}

/// Loop-free core commands.
fn command() -> impl Strategy<Value = Command> {
    atomic().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Command::seq(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Command::choice(a, b)),
            (var(), inner).prop_map(|(x, c)| Command::local(x, c)),
        ]
    })
}

fn exit() -> impl Strategy<Value = ExitCondition> {
    prop_oneof![Just(ExitCondition::Ok), Just(ExitCondition::Er)]
}

fn small() -> DomainSpec {
    DomainSpec::new(3, 2)
}

fn all_vars() -> VarSet {
    VARS.iter().map(|v| Var::new(v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn substitution_lemma(h in heap(), x in var(), t in term_over(VARS.to_vec())) {
        let dom = small();
        if let Ok(ht) = h.subst(&x, &t) {
            let ht: Assertion = ht.into();
            let h: Assertion = h.into();
            for s in enum_states(&dom, &all_vars()) {
                let mut moved = s.clone();
                let v = s.store.eval(&t);
                moved.store.set(&x, v);
                prop_assert_eq!(satisfies(&dom, &s, &ht), satisfies(&dom, &moved, &h));
            }
        }
    }

    #[test]
    fn renaming_binders_keeps_models(q in quantified()) {
        let renamed = QuantifiedHeap::new(
            q.binders.iter().map(|_| Var::new("b")).collect(),
            q.binders.iter().fold(q.body.clone(), |h, a| h.swap(a, &Var::new("b"))),
        );
        prop_assert!(q.alpha_eq(&renamed));
        let dom = small();
        let a: Assertion = q.into();
        let b: Assertion = renamed.into();
        prop_assert_eq!(models(&dom, &a, &all_vars()), models(&dom, &b, &all_vars()));
    }

    #[test]
    fn assertions_round_trip(a in assertion()) {
        let printed = a.to_string();
        prop_assert_eq!(parse_assertion(&printed).unwrap(), a);
    }

    #[test]
    fn commands_round_trip(c in command()) {
        let printed = c.to_string();
        prop_assert_eq!(parse_command(&printed).unwrap(), c);
    }

    #[test]
    fn cano_is_equivalent_and_canonical(p in assertion(), c in command()) {
        let cp = cano(&p, &c).unwrap();
        let cfv = c.fv();
        for d in &cp.disjuncts {
            let mut vars = d.body.fv();
            vars.extend(cfv.iter().cloned());
            prop_assert!(is_canonical(&d.body, &vars), "{}", d);
        }
        let dom = small();
        for s in enum_states(&dom, &all_vars()) {
            prop_assert_eq!(satisfies(&dom, &s, &p), satisfies(&dom, &s, &cp));
        }
    }

    #[test]
    fn wpo_denotes_reachable_states(p in assertion(), c in command(), e in exit()) {
        let dom = small();
        let w = wpo(&p, &c, e, &WpoConfig::default()).unwrap();
        let mut vars = all_vars();
        vars.extend(p.fv());
        if let Ok(brute) = brute_wpo_over(&dom, &p, &c, e, 2, &vars, Default::default()) {
            prop_assert_eq!(models(&dom, &w.post, &vars), brute);
        }
    }

    #[test]
    fn entailment_is_sound(p in assertion(), q in assertion()) {
        if entails(&p, &q).holds() {
            prop_assert!(entails_oracle(&p, &q, &DomainSpec::new(4, 3)));
        }
    }

    #[test]
    fn synthesized_derivations_check_and_round_trip(p in assertion(), c in command(), e in exit()) {
        let (_, d) = synthesize(&p, &c, e, &WpoConfig::default()).unwrap();
        prop_assert!(check(&d).is_ok(), "{}", check(&d).unwrap_err());
        let text = print_derivation(&d);
        prop_assert_eq!(parse_derivation(&text).unwrap(), d);
    }
}

//! Property tests over seeded random models and formulas.

use std::collections::BTreeMap;

use genkripke::construct::{complete_to_constant_domain_with, unravel_strict, DEFAULT_CHOICE_BUDGET};
use genkripke::search::{random_formula, random_model, Shape};
use genkripke::semantics::{assignments_over, eval_formula, Evaluator, KripkeModel};
use genkripke::syntax::{parse_formula, Connective, Formula, Signature};
use genkripke::truthfun::{TruthFunction, TruthVector, BUILTIN_NAMES};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn connectives() -> Vec<Connective> {
    BUILTIN_NAMES.iter().map(|n| Connective::builtin(n).unwrap()).collect()
}

fn preds() -> BTreeMap<String, usize> {
    [("p", 1), ("q", 1), ("r", 0)].iter().map(|&(n, a)| (n.to_string(), a)).collect()
}

fn sample(seed: u64, shape: Shape) -> (KripkeModel, Vec<Formula>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = random_model(&mut rng, &preds(), 4, 2, shape);
    let conns = connectives();
    let fs = (0..8).map(|_| random_formula(&mut rng, &conns, 3)).collect();
    (k, fs)
}

fn vector(len: usize) -> impl Strategy<Value = TruthVector> {
    prop::collection::vec(any::<bool>(), len).prop_map(TruthVector::new)
}

fn function(arity: usize) -> impl Strategy<Value = TruthFunction> {
    prop::collection::vec(any::<bool>(), 1 << arity)
        .prop_map(move |t| TruthFunction::new(arity, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn meet_is_greatest_lower_bound(a in vector(4), b in vector(4), c in vector(4)) {
        let m = a.meet(&b).unwrap();
        prop_assert_eq!(&m, &b.meet(&a).unwrap());
        prop_assert!(m.leq(&a).unwrap() && m.leq(&b).unwrap());
        if c.leq(&a).unwrap() && c.leq(&b).unwrap() {
            prop_assert!(c.leq(&m).unwrap());
        }
        prop_assert_eq!(a.meet(&a).unwrap(), a.clone());
    }

    #[test]
    fn witness_is_lex_least_counterexample(f in function(3)) {
        match f.supermultiplicativity_witness() {
            None => prop_assert!(f.is_supermultiplicative()),
            Some((a, b)) => {
                prop_assert!(f.eval(&a).unwrap() && f.eval(&b).unwrap());
                prop_assert!(!f.eval(&a.meet(&b).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn pairwise_closure_implies_wider_closure(f in function(4)) {
        let sm = f.is_supermultiplicative();
        prop_assert_eq!(f.nary_meet_closure(2), sm);
        if sm {
            prop_assert!(f.nary_meet_closure(3) && f.nary_meet_closure(4));
        }
    }

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>()) {
        let mut sig = Signature::with_builtins();
        for (p, a) in preds() {
            sig.add_predicate(&p, a).unwrap();
        }
        let (_, fs) = sample(seed, Shape::Tree);
        for phi in fs {
            let back = parse_formula(&phi.to_string(), &sig).unwrap();
            prop_assert_eq!(back, phi);
        }
    }

    #[test]
    fn truth_persists_upward(seed in any::<u64>()) {
        let (k, fs) = sample(seed, Shape::AnyPreorder);
        for phi in &fs {
            let free = phi.free_vars();
            for w in k.worlds() {
                for rho in assignments_over(&k, w, &free) {
                    if eval_formula(&k, w, &rho, phi).unwrap() {
                        for v in k.successors(w) {
                            prop_assert!(eval_formula(&k, v, &rho, phi).unwrap(), "{} at {}", phi, k.world_name(v));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn memoized_and_direct_evaluation_agree(seed in any::<u64>()) {
        let (k, fs) = sample(seed, Shape::Poset);
        let mut ev = Evaluator::new(&k);
        for phi in &fs {
            let free = phi.free_vars();
            for w in k.worlds() {
                for rho in assignments_over(&k, w, &free) {
                    prop_assert_eq!(ev.eval(w, &rho, phi).unwrap(), eval_formula(&k, w, &rho, phi).unwrap());
                }
            }
        }
    }

    #[test]
    fn unraveling_preserves_values(seed in any::<u64>()) {
        let (k, fs) = sample(seed, Shape::Poset);
        for w in k.worlds() {
            let t = unravel_strict(&k, w).unwrap();
            let tm = t.model();
            for phi in &fs {
                let free = phi.free_vars();
                for node in tm.worlds() {
                    let orig = t.last_map().expect("unraveled")[node.0];
                    for rho in assignments_over(tm, node, &free) {
                        prop_assert_eq!(eval_formula(tm, node, &rho, phi).unwrap(), eval_formula(&k, orig, &rho, phi).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn completion_is_a_constant_domain_model(seed in any::<u64>()) {
        let (k, _) = sample(seed, Shape::Tree);
        let t = unravel_strict(&k, genkripke::semantics::WorldId(0)).unwrap();
        let c = complete_to_constant_domain_with(&t, &preds(), DEFAULT_CHOICE_BUDGET).unwrap();
        prop_assert!(c.model.validate().is_empty());
        prop_assert!(c.model.is_constant_domain());
        prop_assert_eq!(c.model.world_count(), t.node_count());
    }
}

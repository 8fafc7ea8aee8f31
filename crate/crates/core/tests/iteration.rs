mod common;

use common::*;
use pbc_core::iteration::combinators::{self, cycle, cycle_back, unzip, zip};
use pbc_core::iteration::instantiate_object;
use pbc_core::ratio::{self, ratio};
use pbc_core::syntax::laws_at;
use pbc_core::{compose_maps, denote, instantiate, newton_bound_check, star_equiv_bounded, tensor_maps, typecheck, Object, StarVerdict, Term, TupleSpec};
use proptest::prelude::*;

const K_TEST: usize = 6;

fn equal_up_to(f: &Term, g: &Term, k: usize) {
    assert_eq!(star_equiv_bounded(f, g, k).unwrap(), StarVerdict::EqualUpTo(k), "{f}\n  vs\n{g}");
}

fn random_step(r: &mut impl rand::Rng) -> Term {
    random_circuit(r, 2, 2, 4, 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn instantiation_is_functorial(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = star_endo(random_prob(&mut r), random_step(&mut r));
        let g = star_endo(random_prob(&mut r), random_step(&mut r));
        for k in 0..=4 {
            let (fk, gk) = (denote(&instantiate(k, &f).unwrap()).unwrap(), denote(&instantiate(k, &g).unwrap()).unwrap());
            prop_assert_eq!(denote(&instantiate(k, &f.clone().seq(g.clone())).unwrap()).unwrap(), compose_maps(&fk, &gk).unwrap());
            prop_assert_eq!(denote(&instantiate(k, &f.clone().par(g.clone())).unwrap()).unwrap(), tensor_maps(&fk, &gk).unwrap());
        }
    }

    #[test]
    fn tau_laws_hold_for_random_bodies(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (random_step(&mut r), random_step(&mut r));
        for (name, lhs, rhs) in tau_laws(&f, &g) {
            let v = star_equiv_bounded(&lhs, &rhs, 4).unwrap();
            prop_assert_eq!(v, StarVerdict::EqualUpTo(4), "{}", name);
        }
    }
}

#[test]
fn tau_laws_to_k_test() {
    let f = Term::swap(b(), b()).seq(combinators::and().par(Term::coin(ratio(1, 3))));
    let f = f.seq(Term::copy(b()).par(Term::discard(b())));
    let g = Term::id(b()).par(Term::coin(ratio(2, 5))).par(Term::id(b()));
    let g = g.seq(Term::phi(b())).seq(Term::copy(b()));
    for (name, lhs, rhs) in tau_laws(&f, &g) {
        assert_eq!(star_equiv_bounded(&lhs, &rhs, K_TEST).unwrap(), StarVerdict::EqualUpTo(K_TEST), "{name}");
    }
}

#[test]
fn zip_and_cycle_are_invertible() {
    let bb = b();
    let b2 = Object::bools(2);
    for (a, c) in [(&bb, &bb), (&b2, &bb)] {
        let zu = zip(a, c).seq(unzip(a, c));
        equal_up_to(&zu, &Term::id(a.star().tensor(&c.star())), K_TEST);
    }
    let cc = cycle_back(&bb).seq(cycle(&bb));
    equal_up_to(&cc, &Term::id(bb.tensor(&bb.star())), K_TEST);
}

#[test]
fn star_laws_hold_at_star_objects() {
    for a in [b().star(), b().star().tensor(&b())] {
        for law in laws_at(&a) {
            // the widest laws are capped at 16 instantiated input wires
            let dom = typecheck(&law.lhs).unwrap().domain;
            let k = (0..=K_TEST).rev().find(|&k| instantiate_object(k, &dom).wires().unwrap() <= 16).unwrap();
            equal_up_to(&law.lhs, &law.rhs, k);
        }
    }
}

#[test]
fn bounded_check_finds_counterexamples() {
    let spec = TupleSpec::new(Object::unit(), vec![b()], vec![b()]);
    let v = star_equiv_bounded(&Term::tau_star(spec, combinators::not()), &Term::id(b().star()), K_TEST).unwrap();
    assert_eq!(v, StarVerdict::Counterexample { k: 1, input: "0".parse().unwrap() });
}

#[test]
fn instantiate_replaces_stars() {
    let o = Object::bools(2).star().tensor(&b()).star();
    assert_eq!(instantiate_object(2, &o), Object::bools(10));
    assert_eq!(instantiate_object(0, &o), Object::unit());
    let t = instantiate(3, &Term::copy(b().star())).unwrap();
    assert!(t.is_star_free());
    assert_eq!(denote(&t).unwrap(), denote(&Term::copy(Object::bools(3))).unwrap());
}

#[test]
fn newton_exact_instances() {
    let spec_del = TupleSpec::new(b(), vec![b()], vec![]);
    let rep = newton_bound_check(&Term::discard(b()), &Term::discard(b()), &combinators::and(), &spec_del, K_TEST).unwrap();
    assert!(rep.rows.iter().all(|r| r.premise == ratio::zero() && r.conclusion == ratio::zero()));

    let noisy = Term::id(b()).par(Term::coin(ratio(1, 3))).seq(combinators::xor());
    let spec = TupleSpec::new(b(), vec![b()], vec![b()]);
    let h = Term::swap(b(), b()).seq(combinators::not().par(noisy));
    let rep = newton_bound_check(&Term::discard(b()), &combinators::not(), &h, &spec, K_TEST).unwrap();
    assert!(rep.rows.iter().all(|r| r.premise == ratio::zero() && r.conclusion == ratio::zero()));
}

mod common;

use common::*;
use pbc_core::ratio::ratio;
use pbc_core::semantics::denote_structural;
use pbc_core::{decide_equal, denote, nf_to_term, normalize, synthesize_from_map, StochMap, Term, WeightedTree};
use proptest::prelude::*;

#[test]
fn all_deterministic_binary_maps() {
    let terms: Vec<Term> = (0..16).map(det_b2_to_b).collect();
    for (i, t) in terms.iter().enumerate() {
        let table = StochMap::deterministic(2, 1, |x| u64::from(i as u8 >> x & 1)).unwrap();
        assert_eq!(denote(t).unwrap(), table, "table {i}");
        let nf_term = nf_to_term(&synthesize_from_map(&table));
        assert!(decide_equal(t, &nf_term).unwrap());
        for (j, u) in terms.iter().enumerate() {
            assert_eq!(decide_equal(t, u).unwrap(), i == j, "{i} vs {j}");
        }
    }
}

#[test]
fn canonicity_on_random_circuits() {
    let pairs = canonicity_pairs(2024, 300);
    let mut equal = 0;
    for (f, g) in &pairs {
        let oracle = denote_structural(f).unwrap() == denote_structural(g).unwrap();
        assert_eq!(decide_equal(f, g).unwrap(), oracle, "{f}\n  vs\n{g}");
        equal += usize::from(oracle);
    }
    assert!(equal >= 100 && equal < pairs.len(), "{equal} equal pairs");
}

#[test]
fn type_mismatch_is_an_error() {
    assert!(decide_equal(&Term::id(b()), &Term::discard(b())).is_err());
}

#[test]
fn printer_golden() {
    let t = Term::id(b()).par(Term::coin(ratio(1, 4))).seq(pbc_core::iteration::combinators::xor());
    let nf = normalize(&t).unwrap();
    assert_eq!(nf.to_string(), "x1=1:\n  1/4:|0> else |1>\nx1=0:\n  3/4:|0> else |1>\n");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trees_are_valid_and_faithful(seed in any::<u64>()) {
        let mut r = rng(seed);
        let len = random_arity(&mut r, 4);
        let d = random_distribution(&mut r, len);
        let t = WeightedTree::from_distribution(&d);
        prop_assert!(t.is_valid());
        prop_assert_eq!(t.to_distribution(), d);
    }

    #[test]
    fn normal_form_is_a_fixpoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, c) = (random_arity(&mut r, 3), random_arity(&mut r, 3));
        let f = random_circuit(&mut r, a, c, 4, 12);
        let nf = normalize(&f).unwrap();
        prop_assert_eq!(nf.to_map(), denote(&f).unwrap());
        prop_assert_eq!(normalize(&nf_to_term(&nf)).unwrap(), nf);
    }
}

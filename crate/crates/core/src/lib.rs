//! Probabilistic Boolean circuits with parametric iteration: syntax,
//! exact semantics, normal forms, distance proofs and asymptotic series.

pub mod asymptotics;
pub mod iteration;
pub mod normalform;
pub mod proofs;
pub mod ratio;
pub mod semantics;
pub mod syntax;

pub use asymptotics::{distance_series, lemma_demo, negligibility_report, newton_bound_check, DecayReport, DecaySeries, Lemma, Verdict};
pub use iteration::{combinator, instantiate, star_equiv_bounded, tau_k_expand, StarVerdict};
pub use normalform::{decide_equal, nf_to_term, normalize, synthesize_from_map, NormalForm, WeightedTree};
pub use proofs::{check_derivation, synthesize_tight_derivation, Derivation, Rule};
pub use ratio::Rational;
pub use semantics::{apply_map, compose_maps, denote, hom_distance, tensor_maps, tv_distance, BitString, Distribution, StochMap};
pub use syntax::{axiom_corpus, parse_object, parse_program, parse_term, typecheck, Object, Term, TupleSpec};

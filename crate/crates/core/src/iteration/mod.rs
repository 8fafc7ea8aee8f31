//! Parametric iteration: finite unrolling `τ^k`, the instantiation functors
//! `S_k`, bounded ★-equivalence and the combinator library.

pub mod combinators;
pub mod wiring;

use thiserror::Error;

use crate::semantics::{denote, BitString, SemanticsError};
use crate::syntax::{typecheck, Atom, Generator, Object, Term, TypeError, TypeJudgement};

pub use crate::syntax::TupleSpec;
pub use combinators::{combinator, CombinatorError, Param};
use wiring::{pop_k, push_k, tuple_power, whisker};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IterationError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("the two terms have different types: {left} vs {right}")]
    TypeMismatch {
        left: TypeJudgement,
        right: TypeJudgement,
    },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Result of a bounded ★-equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarVerdict {
    /// All instantiations `S_0 … S_k` agree.
    EqualUpTo(usize),
    /// The first instantiation and input row at which the denotations differ.
    Counterexample { k: usize, input: BitString },
}

/// `τ^k_{S,Ā,B̄}(f) : S ⊗ Ā·k → B̄·k ⊗ S`.
pub fn tau_k_expand(k: usize, spec: &TupleSpec, body: &Term) -> Result<Term, IterationError> {
    let want = spec.body_type();
    let got = typecheck(body)?;
    if got != want {
        let (node, expected, actual) = if got.domain != want.domain {
            ("iter body domain", want.domain, got.domain)
        } else {
            ("iter body codomain", want.codomain, got.codomain)
        };
        return Err(TypeError::Mismatch { node, expected, actual }.into());
    }
    Ok(unroll(k, spec, body))
}

fn unroll(k: usize, spec: &TupleSpec, body: &Term) -> Term {
    let s = &spec.state;
    let ins1 = Object::concat(&spec.inputs);
    let outs1 = Object::concat(&spec.outputs);
    let mut acc = Term::id(s.clone());
    for j in 0..k {
        let ins_j = tuple_power(&spec.inputs, j);
        let mut steps = Vec::new();
        if !ins1.is_unit() {
            steps.push(whisker(s, pop_k(&spec.inputs, j), &Object::unit()));
        }
        steps.push(whisker(&Object::unit(), body.clone(), &ins_j));
        if j > 0 {
            steps.push(whisker(&outs1, acc, &Object::unit()));
        }
        if !outs1.is_unit() {
            steps.push(whisker(&Object::unit(), push_k(&spec.outputs, j), s));
        }
        acc = Term::seq_all(steps).expect("at least the body step");
    }
    acc
}

/// `S_k` on objects: every star becomes the k-th power.
pub fn instantiate_object(k: usize, o: &Object) -> Object {
    let parts: Vec<Object> = o
        .atoms()
        .iter()
        .map(|a| match a {
            Atom::Bool => Object::bool(),
            Atom::Star(inner) => instantiate_object(k, inner).pow(k),
        })
        .collect();
    Object::concat(&parts)
}

/// `S_k` on terms. The result is star-free.
pub fn instantiate(k: usize, t: &Term) -> Result<Term, IterationError> {
    typecheck(t)?;
    Ok(inst(k, t))
}

fn inst(k: usize, t: &Term) -> Term {
    let o = |x: &Object| instantiate_object(k, x);
    match t {
        Term::Id(a) => Term::id(o(a)),
        Term::Swap(a, b) => Term::swap(o(a), o(b)),
        Term::Gen(g) => match g {
            Generator::Coin(_) => t.clone(),
            Generator::Copy(a) if !a.is_star_free() => inst(k, &combinators::copy_at(a)),
            Generator::Discard(a) if !a.is_star_free() => inst(k, &combinators::discard_at(a)),
            Generator::Phi(a) if !a.is_star_free() => inst(k, &combinators::phi_at(a)),
            _ => t.clone(),
        },
        Term::Seq(f, g) => inst(k, f).seq(inst(k, g)),
        Term::Par(f, g) => inst(k, f).par(inst(k, g)),
        Term::TauStar { spec, body } => {
            let spec_k = TupleSpec::new(
                o(&spec.state),
                spec.inputs.iter().map(o).collect(),
                spec.outputs.iter().map(o).collect(),
            );
            unroll(k, &spec_k, &inst(k, body))
        }
    }
}

/// Checks `S_k(f) = S_k(g)` exactly for every `k ≤ k_max`.
pub fn star_equiv_bounded(f: &Term, g: &Term, k_max: usize) -> Result<StarVerdict, IterationError> {
    let (jf, jg) = (typecheck(f)?, typecheck(g)?);
    if jf != jg {
        return Err(IterationError::TypeMismatch { left: jf, right: jg });
    }
    for k in 0..=k_max {
        let mf = denote(&inst(k, f))?;
        let mg = denote(&inst(k, g))?;
        if let Some(i) = mf.rows().iter().zip(mg.rows()).position(|(a, b)| a != b) {
            return Ok(StarVerdict::Counterexample {
                k,
                input: BitString::new(mf.in_arity(), i as u64),
            });
        }
    }
    Ok(StarVerdict::EqualUpTo(k_max))
}

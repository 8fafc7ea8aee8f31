//! Equational laws of Markov categories with probabilistic choice, as pairs
//! of closed terms. Object-indexed laws are instantiated at `B` and `B^2`.

use super::{Object, Term};
use crate::iteration::combinators::{not, phi_p_at, xor};
use crate::iteration::wiring::permute_blocks;
use crate::ratio::{self, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

fn ax(name: impl Into<String>, lhs: Term, rhs: Term) -> Axiom {
    Axiom {
        name: name.into(),
        lhs,
        rhs,
    }
}

fn b() -> Object {
    Object::bool()
}

fn id(a: &Object) -> Term {
    Term::id(a.clone())
}

fn weighted(a: &Object, p: Rational) -> Term {
    phi_p_at(a, p)
}

/// A stochastic endomorphism of `B`: xor with a 1/3-coin.
fn noisy() -> Term {
    id(&b()).par(Term::coin(ratio(1, 3))).seq(xor())
}

/// Stochastic and deterministic endomorphisms of `a`.
fn endos(a: &Object) -> Vec<(&'static str, Term)> {
    if a.len() == 1 {
        vec![("not", not()), ("noisy", noisy())]
    } else {
        vec![("not", not().par(noisy())), ("swap", Term::swap(b(), b()))]
    }
}

/// The object-indexed laws that make sense at any object, stars included.
pub fn laws_at(a: &Object) -> Vec<Axiom> {
    let tag = |n: &str| format!("{n}@{a}");
    let copy = || Term::copy(a.clone());
    let del = || Term::discard(a.clone());
    let phi = || Term::phi(a.clone());
    let mut out = vec![
        ax(tag("copy-un"), copy().seq(del().par(id(a))), id(a)),
        ax(tag("copy-un-r"), copy().seq(id(a).par(del())), id(a)),
        ax(tag("copy-co"), copy().seq(Term::swap(a.clone(), a.clone())), copy()),
        ax(tag("copy-as"), copy().seq(copy().par(id(a))), copy().seq(id(a).par(copy()))),
        ax(
            tag("del-nat-phi"),
            phi().seq(del()),
            Term::discard(Object::concat([a, &b(), a])),
        ),
        ax(
            tag("phi-1"),
            id(a).par(Term::bit(true)).par(id(a)).seq(phi()),
            id(a).par(del()),
        ),
        ax(
            tag("phi-0"),
            id(a).par(Term::bit(false)).par(id(a)).seq(phi()),
            del().par(id(a)),
        ),
        ax(
            tag("phi-co"),
            permute_blocks(&[a.clone(), b(), a.clone()], &[2, 1, 0])
                .seq(id(a).par(not()).par(id(a)))
                .seq(phi()),
            phi(),
        ),
        ax(tag("phi-id"), copy().seq(weighted(a, ratio(2, 5))), id(a)),
        ax(
            tag("phi-same"),
            copy().par(id(&b())).seq(id(a).par(Term::swap(a.clone(), b()))).seq(phi()),
            id(a).par(Term::discard(b())),
        ),
        ax(
            tag("phi-sym"),
            Term::swap(a.clone(), a.clone()).seq(weighted(a, ratio(2, 7))),
            weighted(a, ratio(5, 7)),
        ),
        ax(
            tag("phi-det"),
            phi().seq(copy()),
            copy()
                .par(Term::copy(b()))
                .par(copy())
                .seq(permute_blocks(
                    &[a.clone(), a.clone(), b(), b(), a.clone(), a.clone()],
                    &[0, 2, 4, 1, 3, 5],
                ))
                .seq(phi().par(phi())),
        ),
        ax(
            tag("phi-distr"),
            id(a)
                .par(Term::copy(b()))
                .par(id(a))
                .par(id(a))
                .seq(permute_blocks(&[a.clone(), b(), b(), a.clone(), a.clone()], &[0, 1, 3, 2, 4]))
                .seq(phi().par(id(&b())).par(id(a)))
                .seq(phi()),
            id(a).par(id(&b())).par(del()).par(id(a)).seq(phi()),
        ),
    ];
    // (x +_a y) +_b z = x +_d (y +_c z) with d = ab, c = (1-a)b/(1-ab)
    let (pa, pb) = (ratio(1, 2), ratio(2, 3));
    let d = &pa * &pb;
    let c = (ratio::one() - &pa) * &pb / (ratio::one() - &d);
    out.push(ax(
        tag("phi-as"),
        weighted(a, pa).par(id(a)).seq(weighted(a, pb)),
        id(a).par(weighted(a, c)).seq(weighted(a, d)),
    ));
    // φ is natural for copy too, landing in φ at A ⊗ A
    let aa = a.tensor(a);
    out.push(ax(
        tag("phi-nat-copy"),
        phi().seq(copy()),
        copy().par(id(&b())).par(copy()).seq(Term::phi(aa)),
    ));
    out
}

fn indexed(a: &Object) -> Vec<Axiom> {
    let del = || Term::discard(a.clone());
    let phi = || Term::phi(a.clone());
    let mut out = laws_at(a);
    for (fname, f) in endos(a) {
        out.push(ax(
            format!("phi-nat-{fname}@{a}"),
            phi().seq(f.clone()),
            f.clone().par(id(&b())).par(f.clone()).seq(phi()),
        ));
        out.push(ax(
            format!("del-nat-{fname}@{a}"),
            f.clone().seq(del()),
            del(),
        ));
    }
    // case split of a map out of B
    let f_b: Vec<(&str, Term)> = if a.len() == 1 {
        vec![("not", not()), ("noisy", noisy())]
    } else {
        vec![("copy", Term::copy(b())), ("noisy-pair", noisy().par(Term::coin(ratio(1, 4))))]
    };
    for (fname, f) in f_b {
        out.push(ax(
            format!("b-split-{fname}@{a}"),
            f.clone(),
            Term::bit(true)
                .seq(f.clone())
                .par(id(&b()))
                .par(Term::bit(false).seq(f))
                .seq(phi()),
        ));
    }
    out
}

/// Every law as a pair of closed, well-typed terms with equal types.
pub fn axiom_corpus() -> Vec<Axiom> {
    let b2 = Object::bools(2);
    let bb = b();
    let mut out = vec![
        ax("1-det", Term::bit(true).seq(Term::copy(b())), Term::bit(true).par(Term::bit(true))),
        ax("0-det", Term::bit(false).seq(Term::copy(b())), Term::bit(false).par(Term::bit(false))),
        ax("coin-del", Term::coin(ratio(1, 3)).seq(Term::discard(b())), id(&Object::unit())),
        ax("phi-unit", Term::phi(Object::unit()), Term::discard(b())),
        ax("phi-B", Term::bit(true).par(id(&b())).par(Term::bit(false)).seq(Term::phi(b())), id(&b())),
        ax(
            "copy-tensor@B^2",
            Term::copy(b2.clone()),
            Term::copy(bb.clone())
                .par(Term::copy(bb.clone()))
                .seq(id(&bb).par(Term::swap(bb.clone(), bb.clone())).par(id(&bb))),
        ),
        ax("del-tensor@B^2", Term::discard(b2.clone()), Term::discard(bb.clone()).par(Term::discard(bb.clone()))),
        ax(
            "phi-tensor@B^2",
            Term::phi(b2.clone()),
            id(&b2)
                .par(Term::copy(bb.clone()))
                .par(id(&b2))
                .seq(permute_blocks(&[bb.clone(), bb.clone(), bb.clone(), bb.clone(), bb.clone(), bb.clone()], &[0, 2, 4, 1, 3, 5]))
                .seq(Term::phi(bb.clone()).par(Term::phi(bb.clone()))),
        ),
    ];
    out.extend(indexed(&bb));
    out.extend(indexed(&b2));
    out
}

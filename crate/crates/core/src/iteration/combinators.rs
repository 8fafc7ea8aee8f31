//! Library of derived circuits, addressable by name from circuit files.

use thiserror::Error;

use super::wiring::permute_blocks;
use crate::ratio::{self, Rational};
use crate::syntax::{Atom, Object, Term, TupleSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Param {
    Object(Object),
    Prob(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatorError {
    #[error("unknown combinator `{0}`")]
    Unknown(String),
    #[error("bad parameters for `{name}`: {msg}")]
    BadParams { name: String, msg: String },
}

/// Every name accepted by [`combinator`].
pub const NAMES: &[&str] = &[
    "and",
    "not",
    "xor",
    "eq_bit",
    "otp_lhs",
    "otp_rhs",
    "xor_star",
    "otp_star_lhs",
    "otp_star_rhs",
    "iter_coin",
    "zip",
    "unzip",
    "push",
    "pop",
    "cycle",
    "cycle_back",
    "copy_at",
    "discard_at",
    "phi_at",
    "phi_p_at",
    "all_1",
    "all_1_rhs",
    "eq_star",
    "keyguess_lhs",
    "keyguess_rhs",
    "vn_lhs",
    "vn_rhs",
];

pub fn is_known(name: &str) -> bool {
    NAMES.contains(&name)
}

/// Builds a library circuit. Objects default to `B` where one is expected;
/// `all_1` without a probability is the plain `B^* → B` test.
pub fn combinator(name: &str, params: &[Param]) -> Result<Term, CombinatorError> {
    let bad = |msg: &str| CombinatorError::BadParams {
        name: name.to_string(),
        msg: msg.to_string(),
    };
    let mut objs = Vec::new();
    let mut probs = Vec::new();
    for p in params {
        match p {
            Param::Object(o) => objs.push(o.clone()),
            Param::Prob(r) => probs.push(r.clone()),
        }
    }
    if probs.len() > 1 {
        return Err(bad("at most one probability"));
    }
    let prob = probs.pop();
    if let Some(p) = &prob {
        if !ratio::is_probability(p) {
            return Err(bad("probability outside [0,1]"));
        }
    }
    let (n_obj, needs_p) = match name {
        "and" | "not" | "xor" | "eq_bit" | "otp_lhs" | "otp_rhs" | "xor_star" | "otp_star_lhs" | "otp_star_rhs"
        | "eq_star" | "keyguess_lhs" | "keyguess_rhs" => (0, Some(false)),
        "iter_coin" | "all_1_rhs" | "vn_lhs" | "vn_rhs" => (0, Some(true)),
        "all_1" => (0, None),
        "zip" | "unzip" => (2, Some(false)),
        "push" | "pop" | "cycle" | "cycle_back" | "copy_at" | "discard_at" | "phi_at" => (1, Some(false)),
        "phi_p_at" => (1, Some(true)),
        other => return Err(CombinatorError::Unknown(other.to_string())),
    };
    if objs.len() > n_obj {
        return Err(bad(&format!("expected at most {n_obj} object parameter(s)")));
    }
    match (needs_p, &prob) {
        (Some(true), None) => return Err(bad("a probability `(p)` is required")),
        (Some(false), Some(_)) => return Err(bad("takes no probability")),
        _ => {}
    }
    let obj = |i: usize| objs.get(i).cloned().unwrap_or_else(Object::bool);
    let p = || prob.clone().expect("checked above");
    Ok(match name {
        "and" => and(),
        "not" => not(),
        "xor" => xor(),
        "eq_bit" => eq_bit(),
        "otp_lhs" => otp_lhs(),
        "otp_rhs" => otp_rhs(),
        "xor_star" => xor_star(),
        "otp_star_lhs" => otp_star_lhs(),
        "otp_star_rhs" => otp_star_rhs(),
        "iter_coin" => iter_coin(p()),
        "zip" => zip(&obj(0), &obj(1)),
        "unzip" => unzip(&obj(0), &obj(1)),
        "push" => push(&obj(0)),
        "pop" => pop(&obj(0)),
        "cycle" => cycle(&obj(0)),
        "cycle_back" => cycle_back(&obj(0)),
        "copy_at" => copy_at(&obj(0)),
        "discard_at" => discard_at(&obj(0)),
        "phi_at" => phi_at(&obj(0)),
        "phi_p_at" => phi_p_at(&obj(0), p()),
        "all_1" => match prob {
            Some(p) => all_1_lhs(p),
            None => all_1(),
        },
        "all_1_rhs" => all_1_rhs(p()),
        "eq_star" => eq_star(),
        "keyguess_lhs" => keyguess_lhs(),
        "keyguess_rhs" => keyguess_rhs(),
        "vn_lhs" => vn_lhs(p()),
        "vn_rhs" => vn_rhs(p()),
        _ => unreachable!(),
    })
}

fn b() -> Object {
    Object::bool()
}

fn bs() -> Object {
    Object::bool().star()
}

fn idb() -> Term {
    Term::id(b())
}

/// `B ⊗ B → B`.
pub fn and() -> Term {
    Term::swap(b(), b())
        .seq(idb().par(idb()).par(Term::bit(false)))
        .seq(Term::phi(b()))
}

/// `B → B`.
pub fn not() -> Term {
    Term::bit(false).par(idb()).par(Term::bit(true)).seq(Term::phi(b()))
}

/// `B ⊗ B → B`: `x ? ¬y : y`.
pub fn xor() -> Term {
    idb()
        .par(Term::copy(b()))
        .seq(Term::swap(b(), b()).par(idb()))
        .seq(not().par(idb()).par(idb()))
        .seq(Term::phi(b()))
}

/// Bit equality `B ⊗ B → B`.
pub fn eq_bit() -> Term {
    xor().seq(not())
}

/// One-time pad, `B → B ⊗ B`: outputs the ciphertext and the decrypted message.
pub fn otp_lhs() -> Term {
    idb()
        .par(Term::coin(ratio::ratio(1, 2)))
        .seq(idb().par(Term::copy(b())))
        .seq(xor().par(idb()))
        .seq(Term::copy(b()).par(idb()))
        .seq(idb().par(xor()))
}

/// A fresh fair coin next to the untouched message.
pub fn otp_rhs() -> Term {
    Term::coin(ratio::ratio(1, 2)).par(idb())
}

/// `I → B^*`, a tuple of independent `p`-coins.
pub fn iter_coin(p: Rational) -> Term {
    Term::tau_star(TupleSpec::new(Object::unit(), vec![], vec![b()]), Term::coin(p))
}

/// Pointwise xor `B^* ⊗ B^* → B^*`.
pub fn xor_star() -> Term {
    Term::tau_star(TupleSpec::new(Object::unit(), vec![b(), b()], vec![b()]), xor())
}

/// One-time pad on a tuple of bits with a tuple key.
pub fn otp_star_lhs() -> Term {
    Term::id(bs())
        .par(iter_coin(ratio::ratio(1, 2)))
        .seq(Term::id(bs()).par(copy_at(&bs())))
        .seq(xor_star().par(Term::id(bs())))
        .seq(copy_at(&bs()).par(Term::id(bs())))
        .seq(Term::id(bs()).par(xor_star()))
}

pub fn otp_star_rhs() -> Term {
    iter_coin(ratio::ratio(1, 2)).par(Term::id(bs()))
}

/// `A^* ⊗ B^* → (A ⊗ B)^*`.
pub fn zip(a: &Object, b: &Object) -> Term {
    let ab = a.tensor(b);
    Term::tau_star(TupleSpec::new(Object::unit(), vec![a.clone(), b.clone()], vec![ab.clone()]), Term::id(ab))
}

/// `(A ⊗ B)^* → A^* ⊗ B^*`.
pub fn unzip(a: &Object, b: &Object) -> Term {
    let ab = a.tensor(b);
    Term::tau_star(TupleSpec::new(Object::unit(), vec![ab.clone()], vec![a.clone(), b.clone()]), Term::id(ab))
}

/// `A ⊗ A^* → A^* ⊗ A`: prepends an element and emits the last one.
pub fn push(a: &Object) -> Term {
    Term::tau_star(TupleSpec::new(a.clone(), vec![a.clone()], vec![a.clone()]), Term::id(a.tensor(a)))
}

/// `A ⊗ A^* → A ⊗ A^*`, a rotation of the `k+1` elements.
pub fn cycle(a: &Object) -> Term {
    push(a).seq(Term::swap(a.star(), a.clone()))
}

/// `cycle` iterated once per tuple element.
pub fn cycle_back(a: &Object) -> Term {
    let s = a.tensor(&a.star());
    Term::tau_star(TupleSpec::new(s, vec![], vec![]), cycle(a))
}

/// `A^* ⊗ A → A ⊗ A^*`.
pub fn pop(a: &Object) -> Term {
    Term::swap(a.star(), a.clone()).seq(cycle_back(a))
}

/// Copy at any object, with stars expanded into iterations.
pub fn copy_at(a: &Object) -> Term {
    if a.is_star_free() {
        return Term::copy(a.clone());
    }
    match a.atoms() {
        [Atom::Star(x)] => Term::tau_star(TupleSpec::new(Object::unit(), vec![x.clone()], vec![x.clone(), x.clone()]), copy_at(x)),
        _ => {
            let (x, y) = a.split_first().expect("nonempty");
            copy_at(&x)
                .par(copy_at(&y))
                .seq(Term::id(x.clone()).par(Term::swap(x.clone(), y.clone())).par(Term::id(y)))
        }
    }
}

/// Discard at any object.
pub fn discard_at(a: &Object) -> Term {
    if a.is_star_free() {
        return Term::discard(a.clone());
    }
    match a.atoms() {
        [Atom::Star(x)] => Term::tau_star(TupleSpec::new(Object::unit(), vec![x.clone()], vec![]), discard_at(x)),
        _ => {
            let (x, y) = a.split_first().expect("nonempty");
            discard_at(&x).par(discard_at(&y))
        }
    }
}

/// The if-gate `A ⊗ B ⊗ A → A` at any object; a single condition bit is
/// shared by every component.
pub fn phi_at(a: &Object) -> Term {
    if a.is_star_free() {
        return Term::phi(a.clone());
    }
    match a.atoms() {
        [Atom::Star(x)] => {
            let xs = a.clone();
            // state B, one element of each branch per step
            let step = Term::copy(b())
                .par(Term::id(x.clone()))
                .par(Term::id(x.clone()))
                .seq(Term::swap(b(), Object::concat([&b(), x, x])))
                .seq(Term::swap(b(), x.clone()).par(Term::id(x.clone())).par(idb()))
                .seq(phi_at(x).par(idb()));
            Term::swap(xs.clone(), b())
                .par(Term::id(xs.clone()))
                .seq(Term::tau_star(TupleSpec::new(b(), vec![x.clone(), x.clone()], vec![x.clone()]), step))
                .seq(Term::id(xs).par(Term::discard(b())))
        }
        _ => {
            let (x, y) = a.split_first().expect("nonempty");
            let blocks = [x.clone(), y.clone(), b(), b(), x.clone(), y.clone()];
            Term::id(a.clone())
                .par(Term::copy(b()))
                .par(Term::id(a.clone()))
                .seq(permute_blocks(&blocks, &[0, 2, 4, 1, 3, 5]))
                .seq(phi_at(&x).par(phi_at(&y)))
        }
    }
}

/// Weighted choice `φ^p = (id ⊗ ⟨p⟩ ⊗ id) ; φ`, type `A ⊗ A → A`.
pub fn phi_p_at(a: &Object, p: Rational) -> Term {
    Term::id(a.clone())
        .par(Term::coin(p))
        .par(Term::id(a.clone()))
        .seq(phi_at(a))
}

/// `B^* → B`, true iff every element is 1.
pub fn all_1() -> Term {
    Term::bit(true)
        .par(Term::id(bs()))
        .seq(Term::tau_star(TupleSpec::new(b(), vec![b()], vec![]), and()))
}

/// `I → B^* ⊗ B`: a tuple of `p`-coins next to its all-1 test.
pub fn all_1_lhs(p: Rational) -> Term {
    iter_coin(p)
        .seq(copy_at(&bs()))
        .seq(Term::id(bs()).par(all_1()))
}

/// The same tuple next to a constant 0.
pub fn all_1_rhs(p: Rational) -> Term {
    iter_coin(p).par(Term::bit(false))
}

/// Tuple equality `B^* ⊗ B^* → B`.
pub fn eq_star() -> Term {
    let step = idb().par(eq_bit()).seq(and());
    Term::bit(true)
        .par(Term::id(bs()))
        .par(Term::id(bs()))
        .seq(Term::tau_star(TupleSpec::new(b(), vec![b(), b()], vec![]), step))
}

/// `B^* → B^* ⊗ B`: a uniform key and whether the guess matches it.
pub fn keyguess_lhs() -> Term {
    iter_coin(ratio::ratio(1, 2))
        .par(Term::id(bs()))
        .seq(copy_at(&bs()).par(Term::id(bs())))
        .seq(Term::id(bs()).par(eq_star()))
}

/// The guess ignored: a uniform key and a constant 0.
pub fn keyguess_rhs() -> Term {
    discard_at(&bs()).seq(iter_coin(ratio::ratio(1, 2)).par(Term::bit(false)))
}

/// `B → B`: each step flips the state with probability `p`.
pub fn vn_lhs(p: Rational) -> Term {
    let step = Term::copy(b())
        .seq(not().par(Term::coin(p)).par(idb()))
        .seq(Term::phi(b()));
    Term::tau_star(TupleSpec::new(b(), vec![], vec![]), step)
}

/// The same process started from the negated state.
pub fn vn_rhs(p: Rational) -> Term {
    not().seq(vn_lhs(p))
}

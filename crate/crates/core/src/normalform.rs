//! Canonical normal forms: a case split on the input bits (last bit first)
//! with right-nested weighted trees over sorted outcomes at the leaves.

use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::iteration::combinators::phi_p_at;
use crate::ratio::{self, Rational};
use crate::semantics::{denote, BitString, Distribution, SemanticsError, StochMap};
use crate::syntax::{typecheck, Object, Term, TypeError, TypeJudgement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("the two terms have different types: {left} vs {right}")]
    TypeMismatch {
        left: TypeJudgement,
        right: TypeJudgement,
    },
}

/// `Node(p, x, rest)` denotes `p·|x⟩ + (1−p)·rest`; heads increase along the spine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WeightedTree {
    Leaf(BitString),
    Node {
        p: Rational,
        head: BitString,
        rest: Box<WeightedTree>,
    },
}

impl WeightedTree {
    pub fn from_distribution(d: &Distribution) -> WeightedTree {
        let entries: Vec<(u64, &Rational)> = d.iter().collect();
        let (last, init) = entries.split_last().expect("distribution has support");
        let mut tree = WeightedTree::Leaf(BitString::new(d.len(), last.0));
        let mut remaining = last.1.clone();
        for (x, p) in init.iter().rev() {
            remaining += *p;
            tree = WeightedTree::Node {
                p: *p / &remaining,
                head: BitString::new(d.len(), *x),
                rest: Box::new(tree),
            };
        }
        tree
    }

    pub fn to_distribution(&self) -> Distribution {
        let mut entries = Vec::new();
        let mut mass = ratio::one();
        let mut t = self;
        let len = loop {
            match t {
                WeightedTree::Leaf(x) => {
                    entries.push((x.bits, mass));
                    break x.len;
                }
                WeightedTree::Node { p, head, rest } => {
                    entries.push((head.bits, &mass * p));
                    mass *= ratio::one() - p;
                    t = rest;
                }
            }
        };
        Distribution::from_entries(len, entries)
    }

    pub fn width(&self) -> usize {
        match self {
            WeightedTree::Leaf(x) | WeightedTree::Node { head: x, .. } => x.len,
        }
    }

    /// Spine strictly increasing and every weight in (0,1).
    pub fn is_valid(&self) -> bool {
        let mut prev: Option<u64> = None;
        let mut t = self;
        loop {
            let x = match t {
                WeightedTree::Leaf(x) => x,
                WeightedTree::Node { head, .. } => head,
            };
            if prev.is_some_and(|p| p >= x.bits) {
                return false;
            }
            prev = Some(x.bits);
            match t {
                WeightedTree::Leaf(_) => return true,
                WeightedTree::Node { p, rest, .. } => {
                    if *p <= ratio::zero() || p.is_one() || *p > ratio::one() {
                        return false;
                    }
                    t = rest;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormalForm {
    Tree(WeightedTree),
    /// Split on the last input bit.
    Case {
        on_1: Box<NormalForm>,
        on_0: Box<NormalForm>,
    },
}

impl NormalForm {
    pub fn in_arity(&self) -> usize {
        match self {
            NormalForm::Tree(_) => 0,
            NormalForm::Case { on_1, .. } => on_1.in_arity() + 1,
        }
    }

    pub fn out_arity(&self) -> usize {
        match self {
            NormalForm::Tree(t) => t.width(),
            NormalForm::Case { on_1, .. } => on_1.out_arity(),
        }
    }

    /// The stochastic map this normal form denotes.
    pub fn to_map(&self) -> StochMap {
        fn rows(n: &NormalForm, out: &mut Vec<Distribution>) {
            match n {
                NormalForm::Tree(t) => out.push(t.to_distribution()),
                NormalForm::Case { on_1, on_0 } => {
                    let (mut r1, mut r0) = (Vec::new(), Vec::new());
                    rows(on_1, &mut r1);
                    rows(on_0, &mut r0);
                    for (a, b) in r0.into_iter().zip(r1) {
                        out.push(a);
                        out.push(b);
                    }
                }
            }
        }
        let mut out = Vec::new();
        rows(self, &mut out);
        StochMap::new(self.in_arity(), self.out_arity(), out).expect("arities are consistent")
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            NormalForm::Tree(t) => writeln!(f, "{pad}{}", TreeDisplay(t)),
            NormalForm::Case { on_1, on_0 } => {
                let wire = self.in_arity();
                writeln!(f, "{pad}x{wire}=1:")?;
                on_1.write(f, depth + 1)?;
                writeln!(f, "{pad}x{wire}=0:")?;
                on_0.write(f, depth + 1)
            }
        }
    }
}

struct TreeDisplay<'a>(&'a WeightedTree);

impl fmt::Display for TreeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            WeightedTree::Leaf(x) => write!(f, "|{x}>"),
            WeightedTree::Node { p, head, rest } => {
                write!(f, "{}:|{head}> else {}", ratio::fmt_exact(p), TreeDisplay(rest))
            }
        }
    }
}

/// Indented case tree, one leaf per line.
impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

pub fn synthesize_from_map(f: &StochMap) -> NormalForm {
    if f.in_arity() == 0 {
        return NormalForm::Tree(WeightedTree::from_distribution(f.row(0)));
    }
    let (on_1, on_0) = rayon::join(
        || synthesize_from_map(&f.split_last(true)),
        || synthesize_from_map(&f.split_last(false)),
    );
    NormalForm::Case {
        on_1: Box::new(on_1),
        on_0: Box::new(on_0),
    }
}

pub fn normalize(t: &Term) -> Result<NormalForm, NormalFormError> {
    Ok(synthesize_from_map(&denote(t)?))
}

/// `⟨b_1⟩ ⊗ … ⊗ ⟨b_n⟩`.
pub fn constant_term(x: &BitString) -> Term {
    if x.len == 0 {
        return Term::id(Object::unit());
    }
    Term::par_all(x.to_vec().into_iter().map(Term::bit))
}

pub fn tree_to_term(t: &WeightedTree) -> Term {
    match t {
        WeightedTree::Leaf(x) => constant_term(x),
        WeightedTree::Node { p, head, rest } => constant_term(head)
            .par(tree_to_term(rest))
            .seq(phi_p_at(&Object::bools(head.len), p.clone())),
    }
}

/// The case-split circuit `(copy ⊗ id);(id ⊗ swap);(f1 ⊗ id ⊗ f0);φ`.
pub fn case_term(k: usize, m: usize, f1: Term, f0: Term) -> Term {
    let bk = Object::bools(k);
    let b = Object::bool();
    let prefix = Term::copy(bk.clone())
        .par(Term::id(b.clone()))
        .seq(Term::id(bk.clone()).par(Term::swap(bk, b.clone())));
    prefix.seq(f1.par(Term::id(b)).par(f0).seq(Term::phi(Object::bools(m))))
}

pub fn nf_to_term(n: &NormalForm) -> Term {
    match n {
        NormalForm::Tree(t) => tree_to_term(t),
        NormalForm::Case { on_1, on_0 } => case_term(n.in_arity() - 1, n.out_arity(), nf_to_term(on_1), nf_to_term(on_0)),
    }
}

/// Exact equality of two star-free terms of the same type.
pub fn decide_equal(f: &Term, g: &Term) -> Result<bool, NormalFormError> {
    let (jf, jg) = (typecheck(f)?, typecheck(g)?);
    if jf != jg {
        return Err(NormalFormError::TypeMismatch { left: jf, right: jg });
    }
    Ok(normalize(f)? == normalize(g)?)
}

//! Objects, terms and typing for circuits with parametric iteration.
//!
//! Objects are flat words over the Boolean atom and star-tuples; the unit
//! object is the empty word. Terms are built from four generators (copy,
//! discard, weighted coin, if-gate) closed under sequential composition,
//! tensor, symmetry and `iter`, the star-iteration of a stateful one-step
//! body.

mod axioms;
mod parser;
mod pretty;

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ratio::{self, Rational};

pub use axioms::{axiom_corpus, laws_at, Axiom};
pub use parser::{parse_object, parse_program, parse_term, ParseError, Program};

/// A single letter of an object word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Bool,
    Star(Object),
}

/// A normalized object: a flat word of atoms. Construct through the
/// provided methods so `Star(I)` never appears.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Object {
    word: Vec<Atom>,
}

impl Object {
    pub fn unit() -> Self {
        Object { word: Vec::new() }
    }

    pub fn bool() -> Self {
        Object { word: vec![Atom::Bool] }
    }

    /// `B^n`.
    pub fn bools(n: usize) -> Self {
        Object { word: vec![Atom::Bool; n] }
    }

    /// Builds an object from atoms, dropping any star of the unit.
    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let word = atoms
            .into_iter()
            .filter_map(|a| match a {
                Atom::Bool => Some(Atom::Bool),
                Atom::Star(inner) => {
                    let inner = inner.normalized();
                    (!inner.is_unit()).then_some(Atom::Star(inner))
                }
            })
            .collect();
        Object { word }
    }

    fn normalized(self) -> Self {
        Object::from_atoms(self.word)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.word
    }

    /// Number of atoms, i.e. wires before instantiation.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.word.is_empty()
    }

    /// `A^★`; the star of the unit is the unit.
    pub fn star(&self) -> Self {
        if self.is_unit() {
            Object::unit()
        } else {
            Object {
                word: vec![Atom::Star(self.clone())],
            }
        }
    }

    pub fn tensor(&self, other: &Object) -> Self {
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        Object { word }
    }

    /// `A^n` with respect to the tensor.
    pub fn pow(&self, n: usize) -> Self {
        let mut word = Vec::with_capacity(self.word.len() * n);
        for _ in 0..n {
            word.extend(self.word.iter().cloned());
        }
        Object { word }
    }

    pub fn concat<'a>(objs: impl IntoIterator<Item = &'a Object>) -> Self {
        let mut word = Vec::new();
        for o in objs {
            word.extend(o.word.iter().cloned());
        }
        Object { word }
    }

    pub fn is_star_free(&self) -> bool {
        self.word.iter().all(|a| matches!(a, Atom::Bool))
    }

    /// Number of Boolean wires, if the object is star-free.
    pub fn wires(&self) -> Option<usize> {
        self.is_star_free().then_some(self.word.len())
    }

    /// Splits off the first atom: `A = [a] ⊗ rest`.
    pub fn split_first(&self) -> Option<(Object, Object)> {
        let (first, rest) = self.word.split_first()?;
        Some((
            Object {
                word: vec![first.clone()],
            },
            Object {
                word: rest.to_vec(),
            },
        ))
    }
}

/// Un-normalized object syntax, as written in source text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectExpr {
    Unit,
    Bool,
    Tensor(Box<ObjectExpr>, Box<ObjectExpr>),
    Power(Box<ObjectExpr>, usize),
    Star(Box<ObjectExpr>),
}

impl ObjectExpr {
    pub fn normalize(&self) -> Object {
        match self {
            ObjectExpr::Unit => Object::unit(),
            ObjectExpr::Bool => Object::bool(),
            ObjectExpr::Tensor(a, b) => a.normalize().tensor(&b.normalize()),
            ObjectExpr::Power(a, n) => a.normalize().pow(*n),
            ObjectExpr::Star(a) => a.normalize().star(),
        }
    }
}

/// Flattens an object expression into its word form.
pub fn object_normalize(o: &ObjectExpr) -> Object {
    o.normalize()
}

/// The four generators of a Markov category with probabilistic choice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `A → A ⊗ A`
    Copy(Object),
    /// `A → I`
    Discard(Object),
    /// `I → B`, yields 1 with probability `p`.
    Coin(Rational),
    /// `A ⊗ B ⊗ A → A`, picks the left branch when the condition is 1.
    Phi(Object),
}

/// Annotation of a star-iteration: state object and the tuple lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleSpec {
    pub state: Object,
    pub inputs: Vec<Object>,
    pub outputs: Vec<Object>,
}

impl TupleSpec {
    pub fn new(state: Object, inputs: Vec<Object>, outputs: Vec<Object>) -> Self {
        TupleSpec {
            state,
            inputs,
            outputs,
        }
    }

    /// `S ⊗ Ā·1 → B̄·1 ⊗ S`, the required type of the body.
    pub fn body_type(&self) -> TypeJudgement {
        TypeJudgement {
            domain: self.state.tensor(&Object::concat(&self.inputs)),
            codomain: Object::concat(&self.outputs).tensor(&self.state),
        }
    }

    /// `S ⊗ Ā·★ → B̄·★ ⊗ S`.
    pub fn iterated_type(&self) -> TypeJudgement {
        let ins: Vec<Object> = self.inputs.iter().map(Object::star).collect();
        let outs: Vec<Object> = self.outputs.iter().map(Object::star).collect();
        TypeJudgement {
            domain: self.state.tensor(&Object::concat(&ins)),
            codomain: Object::concat(&outs).tensor(&self.state),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Id(Object),
    Gen(Generator),
    Swap(Object, Object),
    Seq(Box<Term>, Box<Term>),
    Par(Box<Term>, Box<Term>),
    TauStar { spec: TupleSpec, body: Box<Term> },
}

impl Term {
    pub fn id(o: Object) -> Term {
        Term::Id(o)
    }

    pub fn swap(a: Object, b: Object) -> Term {
        Term::Swap(a, b)
    }

    pub fn copy(at: Object) -> Term {
        Term::Gen(Generator::Copy(at))
    }

    pub fn discard(at: Object) -> Term {
        Term::Gen(Generator::Discard(at))
    }

    pub fn coin(p: Rational) -> Term {
        Term::Gen(Generator::Coin(p))
    }

    /// The deterministic constant `⟨b⟩`.
    pub fn bit(b: bool) -> Term {
        Term::coin(if b { ratio::one() } else { ratio::zero() })
    }

    pub fn phi(at: Object) -> Term {
        Term::Gen(Generator::Phi(at))
    }

    pub fn seq(self, next: Term) -> Term {
        Term::Seq(Box::new(self), Box::new(next))
    }

    pub fn par(self, other: Term) -> Term {
        Term::Par(Box::new(self), Box::new(other))
    }

    pub fn tau_star(spec: TupleSpec, body: Term) -> Term {
        Term::TauStar {
            spec,
            body: Box::new(body),
        }
    }

    /// Left-nested sequential composite of a nonempty list.
    pub fn seq_all(terms: impl IntoIterator<Item = Term>) -> Option<Term> {
        terms.into_iter().reduce(Term::seq)
    }

    /// Left-nested tensor of a list; the empty tensor is `id<I>`.
    pub fn par_all(terms: impl IntoIterator<Item = Term>) -> Term {
        terms
            .into_iter()
            .reduce(Term::par)
            .unwrap_or(Term::Id(Object::unit()))
    }

    /// True if no `iter` node and no star object occurs anywhere.
    pub fn is_star_free(&self) -> bool {
        match self {
            Term::Id(o) => o.is_star_free(),
            Term::Gen(g) => match g {
                Generator::Copy(o) | Generator::Discard(o) | Generator::Phi(o) => o.is_star_free(),
                Generator::Coin(_) => true,
            },
            Term::Swap(a, b) => a.is_star_free() && b.is_star_free(),
            Term::Seq(f, g) | Term::Par(f, g) => f.is_star_free() && g.is_star_free(),
            Term::TauStar { .. } => false,
        }
    }

    /// Count of generator occurrences.
    pub fn generator_count(&self) -> usize {
        match self {
            Term::Id(_) | Term::Swap(..) => 0,
            Term::Gen(_) => 1,
            Term::Seq(f, g) | Term::Par(f, g) => f.generator_count() + g.generator_count(),
            Term::TauStar { body, .. } => body.generator_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeJudgement {
    pub domain: Object,
    pub codomain: Object,
}

impl fmt::Display for TypeJudgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.domain, self.codomain)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("type mismatch in {node}: expected {expected}, found {actual}")]
    Mismatch {
        node: &'static str,
        expected: Object,
        actual: Object,
    },
    #[error("coin probability {0} is outside [0,1]")]
    BadProbability(String),
}

/// Shape of a term node with its children's judgements already computed.
pub(crate) enum NodeShape<'a> {
    Id(&'a Object),
    Gen(&'a Generator),
    Swap(&'a Object, &'a Object),
    Seq(&'a TypeJudgement, &'a TypeJudgement),
    Par(&'a TypeJudgement, &'a TypeJudgement),
    TauStar(&'a TupleSpec, &'a TypeJudgement),
}

/// The typing rule for one node.
pub(crate) fn judge(node: NodeShape<'_>) -> Result<TypeJudgement, TypeError> {
    let tj = |domain: Object, codomain: Object| TypeJudgement { domain, codomain };
    Ok(match node {
        NodeShape::Id(a) => tj(a.clone(), a.clone()),
        NodeShape::Gen(g) => match g {
            Generator::Copy(a) => tj(a.clone(), a.tensor(a)),
            Generator::Discard(a) => tj(a.clone(), Object::unit()),
            Generator::Coin(p) => {
                if !ratio::is_probability(p) {
                    return Err(TypeError::BadProbability(ratio::fmt_exact(p)));
                }
                tj(Object::unit(), Object::bool())
            }
            Generator::Phi(a) => tj(a.tensor(&Object::bool()).tensor(a), a.clone()),
        },
        NodeShape::Swap(a, b) => tj(a.tensor(b), b.tensor(a)),
        NodeShape::Seq(f, g) => {
            if f.codomain != g.domain {
                return Err(TypeError::Mismatch {
                    node: "sequential composition",
                    expected: f.codomain.clone(),
                    actual: g.domain.clone(),
                });
            }
            tj(f.domain.clone(), g.codomain.clone())
        }
        NodeShape::Par(f, g) => tj(f.domain.tensor(&g.domain), f.codomain.tensor(&g.codomain)),
        NodeShape::TauStar(spec, body) => {
            let want = spec.body_type();
            if body.domain != want.domain {
                return Err(TypeError::Mismatch {
                    node: "iter body domain",
                    expected: want.domain,
                    actual: body.domain.clone(),
                });
            }
            if body.codomain != want.codomain {
                return Err(TypeError::Mismatch {
                    node: "iter body codomain",
                    expected: want.codomain,
                    actual: body.codomain.clone(),
                });
            }
            spec.iterated_type()
        }
    })
}

/// Computes the unique `(domain, codomain)` of a term, or the first type error.
pub fn typecheck(t: &Term) -> Result<TypeJudgement, TypeError> {
    match t {
        Term::Id(a) => judge(NodeShape::Id(a)),
        Term::Gen(g) => judge(NodeShape::Gen(g)),
        Term::Swap(a, b) => judge(NodeShape::Swap(a, b)),
        Term::Seq(f, g) => {
            let (jf, jg) = (typecheck(f)?, typecheck(g)?);
            judge(NodeShape::Seq(&jf, &jg))
        }
        Term::Par(f, g) => {
            let (jf, jg) = (typecheck(f)?, typecheck(g)?);
            judge(NodeShape::Par(&jf, &jg))
        }
        Term::TauStar { spec, body } => {
            let jb = typecheck(body)?;
            judge(NodeShape::TauStar(spec, &jb))
        }
    }
}

/// Convenience: is `p` a degenerate (0 or 1) coin weight.
pub(crate) fn is_dirac_weight(p: &Rational) -> Option<bool> {
    if p.is_zero() {
        Some(false)
    } else if p.is_one() {
        Some(true)
    } else {
        None
    }
}

//! Quantitative equational proofs: derivations of `f ≡_δ g`, a checker, and
//! a synthesizer producing derivations whose bound is the exact distance.

use std::fmt::{self, Write};

use num_traits::Zero;
use thiserror::Error;

use crate::iteration::combinators::phi_p_at;
use crate::normalform::{self, case_term, nf_to_term, normalize, tree_to_term, NormalForm, NormalFormError, WeightedTree};
use crate::ratio::{self, Rational};
use crate::semantics::{overlap, Distribution};
use crate::syntax::{typecheck, Generator, Object, Term, TypeJudgement};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `f ≡_0 g` for `f` and `g` equal in the theory.
    Refl,
    /// `f ≡_1 g`.
    Top,
    Sym,
    /// `f ≡_δ g`, `g ≡_γ h` gives `f ≡_{δ+γ} h`; the middle terms need only be equal.
    Triangle,
    Weaken,
    /// `f ≡_δ g` gives `f;h ≡_δ g;h`.
    SeqLeft,
    /// `f ≡_δ g` gives `h;f ≡_δ h;g`.
    SeqRight,
    /// `f ≡_δ g` gives `f⊗h ≡_δ g⊗h`.
    ParLeft,
    /// `f ≡_δ g` gives `h⊗f ≡_δ h⊗g`.
    ParRight,
    /// `f ≡_δ g`, `f' ≡_δ g'` gives `(f⊗id⊗f');φ ≡_δ (g⊗id⊗g');φ`.
    PhiCase,
    /// `f ≡_δ g`, `f' ≡_γ g'` gives `(f⊗f');φ^p ≡_{pδ+(1−p)γ} (g⊗g');φ^p`.
    PhiMix(Rational),
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::PhiMix(p) => write!(f, "PhiMix({})", ratio::fmt_exact(p)),
            other => write!(f, "{other:?}"),
        }
    }
}

/// A proof of `lhs ≡_bound rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub lhs: Term,
    pub rhs: Term,
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("{rule}: {msg}")]
    Malformed { rule: String, msg: String },
    #[error("{rule}: bound {found} does not match the rule, expected {expected}")]
    BoundMismatch {
        rule: String,
        expected: String,
        found: String,
    },
    #[error("{rule}: endpoint types differ ({left} vs {right})")]
    EndpointTypes {
        rule: String,
        left: TypeJudgement,
        right: TypeJudgement,
    },
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
}

impl Derivation {
    fn node(rule: Rule, premises: Vec<Derivation>, lhs: Term, rhs: Term, bound: Rational) -> Self {
        Derivation {
            rule,
            premises,
            lhs,
            rhs,
            bound,
        }
    }

    pub fn refl(lhs: Term, rhs: Term) -> Self {
        Self::node(Rule::Refl, vec![], lhs, rhs, ratio::zero())
    }

    pub fn top(lhs: Term, rhs: Term) -> Self {
        Self::node(Rule::Top, vec![], lhs, rhs, ratio::one())
    }

    pub fn sym(d: Derivation) -> Self {
        let (l, r, b) = (d.rhs.clone(), d.lhs.clone(), d.bound.clone());
        Self::node(Rule::Sym, vec![d], l, r, b)
    }

    pub fn triangle(d: Derivation, e: Derivation) -> Self {
        let (l, r, b) = (d.lhs.clone(), e.rhs.clone(), &d.bound + &e.bound);
        Self::node(Rule::Triangle, vec![d, e], l, r, b)
    }

    pub fn weaken(d: Derivation, bound: Rational) -> Self {
        let (l, r) = (d.lhs.clone(), d.rhs.clone());
        Self::node(Rule::Weaken, vec![d], l, r, bound)
    }

    pub fn seq_left(d: Derivation, h: Term) -> Self {
        let (l, r, b) = (d.lhs.clone().seq(h.clone()), d.rhs.clone().seq(h), d.bound.clone());
        Self::node(Rule::SeqLeft, vec![d], l, r, b)
    }

    pub fn seq_right(h: Term, d: Derivation) -> Self {
        let (l, r, b) = (h.clone().seq(d.lhs.clone()), h.seq(d.rhs.clone()), d.bound.clone());
        Self::node(Rule::SeqRight, vec![d], l, r, b)
    }

    pub fn par_left(d: Derivation, h: Term) -> Self {
        let (l, r, b) = (d.lhs.clone().par(h.clone()), d.rhs.clone().par(h), d.bound.clone());
        Self::node(Rule::ParLeft, vec![d], l, r, b)
    }

    pub fn par_right(h: Term, d: Derivation) -> Self {
        let (l, r, b) = (h.clone().par(d.lhs.clone()), h.par(d.rhs.clone()), d.bound.clone());
        Self::node(Rule::ParRight, vec![d], l, r, b)
    }

    /// Both premises must carry the same bound; use [`Derivation::weaken`] first.
    pub fn phi_case(d: Derivation, e: Derivation, at: Object) -> Self {
        let b = Term::id(Object::bool());
        let phi = Term::phi(at);
        let l = d.lhs.clone().par(b.clone()).par(e.lhs.clone()).seq(phi.clone());
        let r = d.rhs.clone().par(b).par(e.rhs.clone()).seq(phi);
        let bound = d.bound.clone();
        Self::node(Rule::PhiCase, vec![d, e], l, r, bound)
    }

    pub fn phi_mix(p: Rational, d: Derivation, e: Derivation, at: Object) -> Self {
        let w = phi_p_at(&at, p.clone());
        let l = d.lhs.clone().par(e.lhs.clone()).seq(w.clone());
        let r = d.rhs.clone().par(e.rhs.clone()).seq(w);
        let bound = &p * &d.bound + (ratio::one() - &p) * &e.bound;
        Self::node(Rule::PhiMix(p), vec![d, e], l, r, bound)
    }

    /// Indented trace, one rule per line with its bound.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_text(&mut s, 0);
        s
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let _ = writeln!(out, "{}{} {}", "  ".repeat(depth), self.rule, ratio::fmt_exact(&self.bound));
        for p in &self.premises {
            p.write_text(out, depth + 1);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn malformed<T>(rule: &Rule, msg: impl Into<String>) -> Result<T, ProofError> {
    Err(ProofError::Malformed {
        rule: rule.to_string(),
        msg: msg.into(),
    })
}

fn same(rule: &Rule, a: &Term, b: &Term, what: &str) -> Result<(), ProofError> {
    if a == b {
        Ok(())
    } else {
        malformed(rule, format!("{what} does not match the premise"))
    }
}

fn premises<const N: usize>(d: &Derivation) -> Result<&[Derivation; N], ProofError> {
    d.premises
        .as_slice()
        .try_into()
        .or_else(|_| malformed(&d.rule, format!("expected {N} premise(s), found {}", d.premises.len())))
}

fn seq_parts(t: &Term) -> Option<(&Term, &Term)> {
    match t {
        Term::Seq(a, b) => Some((a, b)),
        _ => None,
    }
}

fn par_parts(t: &Term) -> Option<(&Term, &Term)> {
    match t {
        Term::Par(a, b) => Some((a, b)),
        _ => None,
    }
}

/// Splits `x ⊗ id_B ⊗ y` in either bracketing.
fn three_parts(t: &Term) -> Option<(&Term, &Term)> {
    let b = Term::id(Object::bool());
    let (l, r) = par_parts(t)?;
    if let Some((x, mid)) = par_parts(l) {
        if *mid == b {
            return Some((x, r));
        }
    }
    if let Some((mid, y)) = par_parts(r) {
        if *mid == b {
            return Some((l, y));
        }
    }
    None
}

/// Validates every node and returns the root bound.
pub fn check_derivation(d: &Derivation) -> Result<Rational, ProofError> {
    for p in &d.premises {
        check_derivation(p)?;
    }
    let rule = &d.rule;
    let (jl, jr) = (
        typecheck(&d.lhs).map_err(NormalFormError::from)?,
        typecheck(&d.rhs).map_err(NormalFormError::from)?,
    );
    if jl != jr {
        return Err(ProofError::EndpointTypes {
            rule: rule.to_string(),
            left: jl,
            right: jr,
        });
    }
    let expected: Rational = match rule {
        Rule::Refl => {
            premises::<0>(d)?;
            if !normalform::decide_equal(&d.lhs, &d.rhs)? {
                return malformed(rule, "endpoints are not equal");
            }
            ratio::zero()
        }
        Rule::Top => {
            premises::<0>(d)?;
            ratio::one()
        }
        Rule::Sym => {
            let [p] = premises::<1>(d)?;
            same(rule, &d.lhs, &p.rhs, "left endpoint")?;
            same(rule, &d.rhs, &p.lhs, "right endpoint")?;
            p.bound.clone()
        }
        Rule::Triangle => {
            let [p, q] = premises::<2>(d)?;
            same(rule, &d.lhs, &p.lhs, "left endpoint")?;
            same(rule, &d.rhs, &q.rhs, "right endpoint")?;
            if !normalform::decide_equal(&p.rhs, &q.lhs)? {
                return malformed(rule, "middle terms are not equal");
            }
            &p.bound + &q.bound
        }
        Rule::Weaken => {
            let [p] = premises::<1>(d)?;
            same(rule, &d.lhs, &p.lhs, "left endpoint")?;
            same(rule, &d.rhs, &p.rhs, "right endpoint")?;
            if d.bound < p.bound {
                return malformed(rule, "cannot strengthen a bound");
            }
            d.bound.clone()
        }
        Rule::SeqLeft | Rule::SeqRight | Rule::ParLeft | Rule::ParRight => {
            let [p] = premises::<1>(d)?;
            let split = if matches!(rule, Rule::SeqLeft | Rule::SeqRight) {
                seq_parts
            } else {
                par_parts
            };
            let (Some((l1, l2)), Some((r1, r2))) = (split(&d.lhs), split(&d.rhs)) else {
                return malformed(rule, "endpoints do not have the composite shape");
            };
            let left = matches!(rule, Rule::SeqLeft | Rule::ParLeft);
            let (fl, fr, hl, hr) = if left { (l1, r1, l2, r2) } else { (l2, r2, l1, r1) };
            same(rule, fl, &p.lhs, "varying left factor")?;
            same(rule, fr, &p.rhs, "varying right factor")?;
            same(rule, hl, hr, "fixed factor")?;
            p.bound.clone()
        }
        Rule::PhiCase => {
            let [p, q] = premises::<2>(d)?;
            let shape = |t| {
                let (body, phi) = seq_parts(t)?;
                matches!(phi, Term::Gen(Generator::Phi(_))).then_some(())?;
                three_parts(body).map(|(x, y)| (x, y, phi))
            };
            let (Some((fl, gl, phl)), Some((fr, gr, phr))) = (shape(&d.lhs), shape(&d.rhs)) else {
                return malformed(rule, "endpoints are not if-gates over a case split");
            };
            same(rule, phl, phr, "gate")?;
            same(rule, fl, &p.lhs, "first branch")?;
            same(rule, fr, &p.rhs, "first branch")?;
            same(rule, gl, &q.lhs, "second branch")?;
            same(rule, gr, &q.rhs, "second branch")?;
            if p.bound != q.bound {
                return malformed(rule, "premises must share one bound");
            }
            p.bound.clone()
        }
        Rule::PhiMix(w) => {
            let [p, q] = premises::<2>(d)?;
            if !ratio::is_probability(w) {
                return malformed(rule, "weight outside [0,1]");
            }
            let at = typecheck(&p.lhs).map_err(NormalFormError::from)?.codomain;
            let gate = phi_p_at(&at, w.clone());
            for (t, a, b) in [(&d.lhs, &p.lhs, &q.lhs), (&d.rhs, &p.rhs, &q.rhs)] {
                let Some((body, g)) = seq_parts(t) else {
                    return malformed(rule, "endpoint is not a weighted choice");
                };
                let Some((x, y)) = par_parts(body) else {
                    return malformed(rule, "endpoint is not a weighted choice");
                };
                same(rule, g, &gate, "weighted gate")?;
                same(rule, x, a, "first branch")?;
                same(rule, y, b, "second branch")?;
            }
            w * &p.bound + (ratio::one() - w) * &q.bound
        }
    };
    let ok = match rule {
        Rule::Weaken => true,
        _ => d.bound == expected,
    };
    if !ok {
        return Err(ProofError::BoundMismatch {
            rule: rule.to_string(),
            expected: ratio::fmt_exact(&expected),
            found: ratio::fmt_exact(&d.bound),
        });
    }
    Ok(d.bound.clone())
}

/// A derivation of `f ≡_δ g` with `δ` the exact hom distance.
pub fn synthesize_tight_derivation(f: &Term, g: &Term) -> Result<Derivation, ProofError> {
    let (jf, jg) = (
        typecheck(f).map_err(NormalFormError::from)?,
        typecheck(g).map_err(NormalFormError::from)?,
    );
    if jf != jg {
        return Err(NormalFormError::TypeMismatch { left: jf, right: jg }.into());
    }
    let (nf, ng) = (normalize(f)?, normalize(g)?);
    if nf == ng {
        return Ok(Derivation::refl(f.clone(), g.clone()));
    }
    let core = between(&nf, &ng);
    let into = Derivation::refl(f.clone(), core.lhs.clone());
    let out = Derivation::refl(core.rhs.clone(), g.clone());
    Ok(Derivation::triangle(into, Derivation::triangle(core, out)))
}

/// Derivation between the terms of two normal forms of equal shape.
fn between(n: &NormalForm, m: &NormalForm) -> Derivation {
    match (n, m) {
        (NormalForm::Tree(s), NormalForm::Tree(t)) => trees(s, t),
        (NormalForm::Case { on_1: a1, on_0: a0 }, NormalForm::Case { on_1: b1, on_0: b0 }) => {
            let (d1, d0) = (between(a1, b1), between(a0, b0));
            let delta = ratio::max(&d1.bound, &d0.bound);
            let lift = |d: Derivation| if d.bound == delta { d } else { Derivation::weaken(d, delta.clone()) };
            let (d1, d0) = (lift(d1), lift(d0));
            let out = Object::bools(n.out_arity());
            let k = n.in_arity() - 1;
            let case = Derivation::phi_case(d1, d0, out.clone());
            let lhs = nf_to_term(n);
            let prefix = match &lhs {
                Term::Seq(prefix, _) => (**prefix).clone(),
                _ => unreachable!("case terms are sequential"),
            };
            debug_assert_eq!(lhs, case_term(k, out.len(), case.premises[0].lhs.clone(), case.premises[1].lhs.clone()));
            Derivation::seq_right(prefix, case)
        }
        _ => unreachable!("normal forms of equal type have equal shape"),
    }
}

/// Splits `v` and `w` through their common part:
/// `v = c·M + (1−c)·V'`, `w = c·M + (1−c)·W'` with disjoint `V'`, `W'`.
fn trees(s: &WeightedTree, t: &WeightedTree) -> Derivation {
    let (ts, tt) = (tree_to_term(s), tree_to_term(t));
    if s == t {
        return Derivation::refl(ts, tt);
    }
    let (v, w) = (s.to_distribution(), t.to_distribution());
    let c = overlap(&v, &w);
    if c.is_zero() {
        return Derivation::top(ts, tt);
    }
    let len = v.len();
    let common = Distribution::from_entries(
        len,
        v.iter().filter_map(|(k, p)| {
            let q = w.prob(k);
            (!q.is_zero()).then(|| (k, ratio::min(p, &q) / &c))
        }),
    );
    let rest = |x: &Distribution, y: &Distribution| {
        Distribution::from_entries(
            len,
            x.iter().map(|(k, p)| (k, (p - ratio::min(p, &y.prob(k))) / (ratio::one() - &c))),
        )
    };
    let (vr, wr) = (rest(&v, &w), rest(&w, &v));
    let mterm = tree_to_term(&WeightedTree::from_distribution(&common));
    let mix = Derivation::phi_mix(
        c,
        Derivation::refl(mterm.clone(), mterm),
        Derivation::top(
            tree_to_term(&WeightedTree::from_distribution(&vr)),
            tree_to_term(&WeightedTree::from_distribution(&wr)),
        ),
        Object::bools(len),
    );
    let into = Derivation::refl(ts, mix.lhs.clone());
    let out = Derivation::refl(mix.rhs.clone(), tt);
    Derivation::triangle(into, Derivation::triangle(mix, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::combinators;
    use crate::ratio::ratio;
    use crate::semantics::{denote, hom_distance};

    fn dist(f: &Term, g: &Term) -> Rational {
        hom_distance(&denote(f).unwrap(), &denote(g).unwrap()).unwrap()
    }

    #[test]
    fn refl_and_top() {
        let one = Term::bit(true);
        assert_eq!(check_derivation(&Derivation::refl(one.clone(), one.clone())).unwrap(), ratio::zero());
        let top = Derivation::top(one.clone(), Term::bit(false));
        assert_eq!(check_derivation(&top).unwrap(), ratio::one());
        assert!(check_derivation(&Derivation::refl(one, Term::bit(false))).is_err());
    }

    #[test]
    fn phi_mix_example() {
        let p = ratio(1, 3);
        let d = Derivation::phi_mix(
            p.clone(),
            Derivation::top(Term::bit(true), Term::bit(false)),
            Derivation::refl(Term::bit(false), Term::bit(false)),
            Object::bool(),
        );
        assert_eq!(check_derivation(&d).unwrap(), p);
        assert!(dist(&d.lhs, &d.rhs) <= p);
    }

    #[test]
    fn tampered_bounds_are_rejected() {
        let mut d = Derivation::triangle(
            Derivation::top(Term::bit(true), Term::bit(false)),
            Derivation::refl(Term::bit(false), Term::bit(false)),
        );
        d.bound = ratio(1, 2);
        assert!(matches!(check_derivation(&d), Err(ProofError::BoundMismatch { .. })));
        let w = Derivation::weaken(Derivation::top(Term::bit(true), Term::bit(false)), ratio(1, 2));
        assert!(check_derivation(&w).is_err());
    }

    #[test]
    fn tight_examples() {
        let f = Term::id(Object::bool());
        let d = synthesize_tight_derivation(&f, &f).unwrap();
        assert_eq!(d.rule, Rule::Refl);
        assert_eq!(check_derivation(&d).unwrap(), ratio::zero());

        let (a, b) = (Term::coin(ratio(3, 4)), Term::coin(ratio(1, 4)));
        let d = synthesize_tight_derivation(&a, &b).unwrap();
        assert_eq!(check_derivation(&d).unwrap(), ratio(1, 2));

        let d = synthesize_tight_derivation(&combinators::otp_lhs(), &combinators::otp_rhs()).unwrap();
        assert_eq!(check_derivation(&d).unwrap(), ratio::zero());
    }

    #[test]
    fn shared_mass_split_is_tight() {
        // v = 1/2|100> + 1/2|011>, w = 1/2|100> + 1/2|101>
        let b = Object::bool();
        let v = Term::coin(ratio(1, 2))
            .seq(Term::copy(b.clone()))
            .seq(Term::copy(b.clone()).par(Term::id(b.clone())))
            .seq(Term::id(b).par(combinators::not()).par(combinators::not()));
        let w = Term::bit(true).par(Term::bit(false)).par(Term::coin(ratio(1, 2)));
        assert_eq!(dist(&v, &w), ratio(1, 2));
        let d = synthesize_tight_derivation(&v, &w).unwrap();
        assert_eq!(check_derivation(&d).unwrap(), ratio(1, 2));
    }

    #[test]
    fn case_split_bound_is_the_max_over_rows() {
        let b = Object::bool();
        let f = Term::id(b.clone());
        let g = Term::copy(b.clone()).seq(Term::id(b.clone()).par(Term::coin(ratio(1, 3))).par(Term::id(b.clone())).seq(Term::phi(b)));
        let d = synthesize_tight_derivation(&f, &g).unwrap();
        assert_eq!(check_derivation(&d).unwrap(), ratio::zero());
        let h = combinators::not();
        let d = synthesize_tight_derivation(&f, &h).unwrap();
        assert_eq!(check_derivation(&d).unwrap(), ratio::one());
        assert!(d.to_text().starts_with("Triangle 1/1\n  Refl 0/1\n"));
    }
}

//! Exact distance series `d_k = d(S_k f, S_k g)`, polynomially scaled
//! negligibility evidence, Newton's-cradle bound checks and lemma demos.

use std::fmt::{self, Write};
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::iteration::{combinators, instantiate, IterationError, TupleSpec};
use crate::normalform::{decide_equal, NormalFormError};
use crate::ratio::{self, Rational};
use crate::semantics::{denote, hom_distance, SemanticsError};
use crate::syntax::{typecheck, Object, Term, TypeError, TypeJudgement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Iteration(#[from] IterationError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error("the two terms have different types: {left} vs {right}")]
    TypeMismatch {
        left: TypeJudgement,
        right: TypeJudgement,
    },
    #[error("newton check: {0}")]
    Schema(String),
    #[error("unknown lemma `{0}` (expected otp, all1, keyguess or vonneumann)")]
    UnknownLemma(String),
    #[error("empty k range")]
    EmptyRange,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecaySeries {
    pub pairs: Vec<(usize, Rational)>,
    pub f_label: String,
    pub g_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithNegligible,
    NotDecreasing,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ConsistentWithNegligible => "ConsistentWithNegligible",
            Verdict::NotDecreasing => "NotDecreasing",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub series: DecaySeries,
    pub exponent_a: u32,
    pub scaled: Vec<(usize, Rational)>,
    /// Least-squares slope of `ln d_k` against `k`; approximate.
    pub fitted_rate: Option<f64>,
    pub verdict: Verdict,
    /// `(ε, N)`: every sampled `k ≥ N` has `k^a·d_k < ε`.
    pub threshold_witness: Option<(Rational, usize)>,
}

impl DecayReport {
    /// CSV rows `k,d_num,d_den,scaled_num,scaled_den` then footer lines.
    pub fn to_csv(&self, decimal: bool) -> String {
        let mut s = String::from("k,d_num,d_den,scaled_num,scaled_den");
        s.push_str(if decimal { ",d_decimal\n" } else { "\n" });
        for ((k, d), (_, sc)) in self.series.pairs.iter().zip(&self.scaled) {
            let _ = write!(s, "{k},{},{},{},{}", d.numer(), d.denom(), sc.numer(), sc.denom());
            if decimal {
                let _ = write!(s, ",{:.6}", ratio::to_f64(d));
            }
            s.push('\n');
        }
        let _ = writeln!(s, "verdict={}", self.verdict);
        match &self.threshold_witness {
            Some((_, n)) => {
                let _ = writeln!(s, "witness_N={n}");
            }
            None => s.push_str("witness_N=none\n"),
        }
        match self.fitted_rate {
            Some(r) => {
                let _ = writeln!(s, "fitted_rate={r:.6}");
            }
            None => s.push_str("fitted_rate=none\n"),
        }
        s
    }
}

fn check_same_type(f: &Term, g: &Term) -> Result<(), AsymptoticsError> {
    let (jf, jg) = (typecheck(f)?, typecheck(g)?);
    if jf != jg {
        return Err(AsymptoticsError::TypeMismatch { left: jf, right: jg });
    }
    Ok(())
}

/// `d(S_k f, S_k g)` at one `k`.
pub fn distance_at(f: &Term, g: &Term, k: usize) -> Result<Rational, AsymptoticsError> {
    let mf = denote(&instantiate(k, f)?)?;
    let mg = denote(&instantiate(k, g)?)?;
    Ok(hom_distance(&mf, &mg)?)
}

pub fn distance_series(f: &Term, g: &Term, k_min: usize, k_max: usize) -> Result<DecaySeries, AsymptoticsError> {
    check_same_type(f, g)?;
    if k_min > k_max {
        return Err(AsymptoticsError::EmptyRange);
    }
    let pairs = (k_min..=k_max)
        .into_par_iter()
        .map(|k| distance_at(f, g, k).map(|d| (k, d)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DecaySeries {
        pairs,
        f_label: f.to_string(),
        g_label: g.to_string(),
    })
}

fn fitted_rate(pairs: &[(usize, Rational)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(_, d)| d.is_positive())
        .map(|(k, d)| (*k as f64, ratio::to_f64(d).ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Bounded evidence for `k^a·d_k → 0`; never a proof of the limit.
pub fn negligibility_report(series: &DecaySeries, a: u32, epsilon: &Rational) -> DecayReport {
    let scaled: Vec<(usize, Rational)> = series
        .pairs
        .iter()
        .map(|(k, d)| (*k, ratio::pow(&ratio::int(*k as i64), a) * d))
        .collect();
    let values: Vec<&Rational> = scaled.iter().map(|(_, s)| s).collect();
    let verdict = if values.iter().all(|v| v.is_zero()) {
        Verdict::ConsistentWithNegligible
    } else {
        let tail = &values[values.len() - values.len().div_ceil(2)..];
        let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
        match (decreasing, values.last() < values.first()) {
            (true, true) => Verdict::ConsistentWithNegligible,
            (true, false) => Verdict::Inconclusive,
            (false, _) => Verdict::NotDecreasing,
        }
    };
    let mut witness = None;
    for (k, v) in scaled.iter().rev() {
        if v < epsilon {
            witness = Some(*k);
        } else {
            break;
        }
    }
    DecayReport {
        series: series.clone(),
        exponent_a: a,
        scaled,
        fitted_rate: fitted_rate(&series.pairs),
        verdict,
        threshold_witness: witness.map(|n| (epsilon.clone(), n)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonRow {
    pub k: usize,
    /// Distance between the two one-step composites at instantiation `k`.
    pub premise: Rational,
    /// Distance between the two iterated composites.
    pub conclusion: Rational,
    /// `conclusion ≤ k · premise`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonReport {
    pub rows: Vec<NewtonRow>,
}

impl NewtonReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// For `f : S → Z`, `g : Z ⊗ Ā → B̄ ⊗ Z` and `h : S ⊗ Ā → B̄ ⊗ S` (with `S, Ā, B̄`
/// from `spec`), compares the premise `(f ⊗ id);g` vs `h;(id ⊗ f)` with the
/// conclusion `(f ⊗ id);τ(g)` vs `τ(h);(id ⊗ f)` for `k = 0..=k_max`.
pub fn newton_bound_check(f: &Term, g: &Term, h: &Term, spec: &TupleSpec, k_max: usize) -> Result<NewtonReport, AsymptoticsError> {
    let jf = typecheck(f)?;
    if jf.domain != spec.state {
        return Err(AsymptoticsError::Schema(format!("f must start at the state {}, found {}", spec.state, jf.domain)));
    }
    let z = jf.codomain;
    let spec_g = TupleSpec::new(z.clone(), spec.inputs.clone(), spec.outputs.clone());
    for (name, t, s) in [("g", g, &spec_g), ("h", h, spec)] {
        let j = typecheck(t)?;
        if j != s.body_type() {
            return Err(AsymptoticsError::Schema(format!("{name} has type {j}, expected {}", s.body_type())));
        }
    }
    let ins1 = Object::concat(&spec.inputs);
    let outs1 = Object::concat(&spec.outputs);
    let ins_star = Object::concat(spec.inputs.iter().map(Object::star).collect::<Vec<_>>().iter());
    let outs_star = Object::concat(spec.outputs.iter().map(Object::star).collect::<Vec<_>>().iter());
    let pl = f.clone().par(Term::id(ins1)).seq(g.clone());
    let pr = h.clone().seq(Term::id(outs1).par(f.clone()));
    let cl = f.clone().par(Term::id(ins_star)).seq(Term::tau_star(spec_g, g.clone()));
    let cr = Term::tau_star(spec.clone(), h.clone()).seq(Term::id(outs_star).par(f.clone()));
    let rows = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let premise = distance_at(&pl, &pr, k)?;
            let conclusion = distance_at(&cl, &cr, k)?;
            let holds = conclusion <= ratio::int(k as i64) * &premise;
            Ok(NewtonRow {
                k,
                premise,
                conclusion,
                holds,
            })
        })
        .collect::<Result<Vec<_>, AsymptoticsError>>()?;
    Ok(NewtonReport { rows })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lemma {
    Otp,
    All1(Rational),
    KeyGuess,
    VonNeumann(Rational),
}

impl Lemma {
    /// Parses `otp`, `all1`, `keyguess` or `vonneumann`; `p` defaults to 1/2 and 3/4.
    pub fn from_name(name: &str, p: Option<Rational>) -> Result<Lemma, AsymptoticsError> {
        Ok(match name {
            "otp" => Lemma::Otp,
            "all1" | "all_1" | "all-1" => Lemma::All1(p.unwrap_or_else(|| ratio::ratio(1, 2))),
            "keyguess" | "key-guess" => Lemma::KeyGuess,
            "vonneumann" | "vn" | "von-neumann" => Lemma::VonNeumann(p.unwrap_or_else(|| ratio::ratio(3, 4))),
            other => return Err(AsymptoticsError::UnknownLemma(other.to_string())),
        })
    }

    /// The two sides compared by the lemma.
    pub fn sides(&self) -> (Term, Term) {
        match self {
            Lemma::Otp => (combinators::otp_star_lhs(), combinators::otp_star_rhs()),
            Lemma::All1(p) => (combinators::all_1_lhs(p.clone()), combinators::all_1_rhs(p.clone())),
            Lemma::KeyGuess => (combinators::keyguess_lhs(), combinators::keyguess_rhs()),
            Lemma::VonNeumann(p) => (combinators::vn_lhs(p.clone()), combinators::vn_rhs(p.clone())),
        }
    }

    /// Closed form at `k` and whether it is an exact value (else an upper bound).
    pub fn closed_form(&self, k: usize) -> (Rational, bool) {
        let k = k as u32;
        match self {
            Lemma::Otp => (ratio::zero(), true),
            Lemma::All1(p) => (ratio::pow(p, k), false),
            Lemma::KeyGuess => (ratio::pow(&ratio::ratio(1, 2), k), false),
            Lemma::VonNeumann(p) => (ratio::pow(&(ratio::int(2) * p - ratio::one()).abs(), k), true),
        }
    }
}

impl FromStr for Lemma {
    type Err = AsymptoticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lemma::from_name(s, None)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub report: DecayReport,
    /// `(k, closed form, holds)` with `holds` meaning `d_k = cf` or `d_k ≤ cf`.
    pub closed_form: Vec<(usize, Rational, bool)>,
    /// For the one-time pad: exact equality of the single-bit circuits.
    pub base_equal: Option<bool>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.closed_form.iter().all(|c| c.2) && self.base_equal != Some(false)
    }
}

pub fn lemma_demo(lemma: &Lemma, k_min: usize, k_max: usize, a: u32, epsilon: &Rational) -> Result<LemmaReport, AsymptoticsError> {
    let (f, g) = lemma.sides();
    let series = distance_series(&f, &g, k_min, k_max)?;
    let closed_form = series
        .pairs
        .iter()
        .map(|(k, d)| {
            let (cf, exact) = lemma.closed_form(*k);
            let holds = if exact { *d == cf } else { *d <= cf };
            (*k, cf, holds)
        })
        .collect();
    let base_equal = match lemma {
        Lemma::Otp => Some(decide_equal(&combinators::otp_lhs(), &combinators::otp_rhs())?),
        _ => None,
    };
    Ok(LemmaReport {
        lemma: lemma.clone(),
        report: negligibility_report(&series, a, epsilon),
        closed_form,
        base_equal,
    })
}

//! Exact semantics of star-free terms as stochastic maps between Boolean powers.
//!
//! Bit order: wire 1 is the most significant bit of a bitstring key.

mod netlist;
mod structural;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ratio::{self, Rational};
use crate::syntax::{Term, TypeError};

pub use structural::denote_structural;

/// Default limit on input wires of a dense map.
pub const DEFAULT_MAX_WIRES: usize = 20;
const WARN_WIRES: usize = 14;
/// Output keys are packed into a `u64`.
pub const MAX_OUT_WIRES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("term contains a star object or iter node; instantiate it first")]
    StarFound,
    #[error("{wires} input wires exceed the limit of {limit} (set PBC_MAX_WIRES to raise it)")]
    ArityGuard { wires: usize, limit: usize },
    #[error("{0} output wires exceed the limit of 64")]
    OutputTooWide(usize),
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("bitstring `{0}` is malformed")]
    BadBits(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// The active input-wire limit: `PBC_MAX_WIRES` if set, else 20.
pub fn max_wires() -> usize {
    std::env::var("PBC_MAX_WIRES")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_WIRES)
}

pub(crate) fn guard(inputs: usize, outputs: usize) -> Result<(), SemanticsError> {
    let limit = max_wires();
    if inputs > limit {
        return Err(SemanticsError::ArityGuard { wires: inputs, limit });
    }
    if outputs > MAX_OUT_WIRES {
        return Err(SemanticsError::OutputTooWide(outputs));
    }
    if inputs >= WARN_WIRES {
        log::warn!("dense map over {inputs} input wires ({} rows)", 1u64 << inputs);
    }
    Ok(())
}

/// A bitstring of `len` bits, most significant bit first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    pub len: usize,
    pub bits: u64,
}

impl BitString {
    pub fn new(len: usize, bits: u64) -> Self {
        debug_assert!(len == 64 || bits >> len == 0);
        BitString { len, bits }
    }

    pub fn empty() -> Self {
        BitString { len: 0, bits: 0 }
    }

    /// Bit `i`, counting wires from 0 at the left.
    pub fn bit(&self, i: usize) -> bool {
        (self.bits >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn to_vec(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let v = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        BitString::new(bits.len(), v)
    }
}

pub(crate) fn fmt_bits(len: usize, bits: u64) -> String {
    if len == 0 {
        return "-".into();
    }
    (0..len)
        .map(|i| if (bits >> (len - 1 - i)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_bits(self.len, self.bits))
    }
}

impl FromStr for BitString {
    type Err = SemanticsError;

    /// Accepts `0`/`1` characters; `-` or the empty string is the empty bitstring.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(BitString::empty());
        }
        if s.len() > 64 {
            return Err(SemanticsError::BadBits(s.to_string()));
        }
        let mut v = 0u64;
        for c in s.chars() {
            v = (v << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(SemanticsError::BadBits(s.to_string())),
                };
        }
        Ok(BitString::new(s.len(), v))
    }
}

/// A finitely supported distribution on `B^len`. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    len: usize,
    support: BTreeMap<u64, Rational>,
}

impl Distribution {
    pub fn dirac(len: usize, bits: u64) -> Self {
        let mut support = BTreeMap::new();
        support.insert(bits, ratio::one());
        Distribution { len, support }
    }

    /// Builds a distribution, dropping zero entries. Panics in debug builds
    /// when the mass is not exactly one.
    pub fn from_entries(len: usize, entries: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut support: BTreeMap<u64, Rational> = BTreeMap::new();
        for (k, p) in entries {
            if p.is_zero() {
                continue;
            }
            *support.entry(k).or_insert_with(ratio::zero) += p;
        }
        support.retain(|_, p| !p.is_zero());
        let d = Distribution { len, support };
        debug_assert!(d.mass().is_one(), "distribution mass {} != 1", d.mass());
        d
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn prob(&self, bits: u64) -> Rational {
        self.support.get(&bits).cloned().unwrap_or_else(ratio::zero)
    }

    /// Support entries in ascending key order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.support.iter().map(|(k, p)| (*k, p))
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn mass(&self) -> Rational {
        self.support.values().fold(ratio::zero(), |a, p| a + p)
    }

    pub fn is_dirac(&self) -> Option<u64> {
        if self.support.len() == 1 {
            self.support.keys().next().copied()
        } else {
            None
        }
    }
}

/// A stochastic map `B^in → B^out`, one row per input in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochMap {
    in_arity: usize,
    out_arity: usize,
    rows: Vec<Distribution>,
}

impl StochMap {
    pub fn new(in_arity: usize, out_arity: usize, rows: Vec<Distribution>) -> Result<Self, SemanticsError> {
        guard(in_arity, out_arity)?;
        if rows.len() != 1usize << in_arity {
            return Err(SemanticsError::ArityMismatch {
                left: rows.len(),
                right: 1usize << in_arity,
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len != out_arity) {
            return Err(SemanticsError::ArityMismatch {
                left: r.len,
                right: out_arity,
            });
        }
        Ok(StochMap {
            in_arity,
            out_arity,
            rows,
        })
    }

    /// The deterministic map induced by `f` on bitstring keys.
    pub fn deterministic(in_arity: usize, out_arity: usize, f: impl Fn(u64) -> u64) -> Result<Self, SemanticsError> {
        guard(in_arity, out_arity)?;
        let rows = (0..1u64 << in_arity)
            .map(|a| Distribution::dirac(out_arity, f(a)))
            .collect();
        Ok(StochMap {
            in_arity,
            out_arity,
            rows,
        })
    }

    pub fn identity(n: usize) -> Result<Self, SemanticsError> {
        StochMap::deterministic(n, n, |a| a)
    }

    pub fn in_arity(&self) -> usize {
        self.in_arity
    }

    pub fn out_arity(&self) -> usize {
        self.out_arity
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }

    pub fn row(&self, input: u64) -> &Distribution {
        &self.rows[input as usize]
    }

    /// Restriction to inputs whose last bit is `last`; used by the case split.
    pub fn split_last(&self, last: bool) -> StochMap {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & 1 == 1) == last)
            .map(|(_, r)| r.clone())
            .collect();
        StochMap {
            in_arity: self.in_arity - 1,
            out_arity: self.out_arity,
            rows,
        }
    }

    /// TSV serialization: header, then one line per support entry sorted by
    /// input and output.
    pub fn to_tsv(&self) -> String {
        self.to_tsv_with(false)
    }

    /// As [`StochMap::to_tsv`], optionally with an extra rounded column.
    pub fn to_tsv_with(&self, decimal: bool) -> String {
        let mut s = String::from(if decimal { "in\tout\tprob\tdecimal\n" } else { "in\tout\tprob\n" });
        for (a, row) in self.rows.iter().enumerate() {
            for (b, p) in row.iter() {
                s.push_str(&fmt_bits(self.in_arity, a as u64));
                s.push('\t');
                s.push_str(&fmt_bits(self.out_arity, b));
                s.push('\t');
                s.push_str(&ratio::fmt_exact(p));
                if decimal {
                    s.push_str(&format!("\t{:.6}", ratio::to_f64(p)));
                }
                s.push('\n');
            }
        }
        s
    }
}

/// Denotation of a star-free term, computed through a compiled netlist.
pub fn denote(t: &Term) -> Result<StochMap, SemanticsError> {
    if !t.is_star_free() {
        return Err(SemanticsError::StarFound);
    }
    let ty = crate::syntax::typecheck(t)?;
    let (n, m) = (ty.domain.len(), ty.codomain.len());
    guard(n, m)?;
    netlist::Netlist::compile(t, n).evaluate(n, m).map_or_else(|| denote_structural(t), Ok)
}

/// `(f;g)(c|a) = Σ_b f(b|a)·g(c|b)`.
pub fn compose_maps(f: &StochMap, g: &StochMap) -> Result<StochMap, SemanticsError> {
    if f.out_arity != g.in_arity {
        return Err(SemanticsError::ArityMismatch {
            left: f.out_arity,
            right: g.in_arity,
        });
    }
    let rows = f
        .rows
        .iter()
        .map(|row| {
            let mut acc: BTreeMap<u64, Rational> = BTreeMap::new();
            for (b, p) in row.iter() {
                for (c, q) in g.row(b).iter() {
                    *acc.entry(c).or_insert_with(ratio::zero) += p * q;
                }
            }
            Distribution::from_entries(g.out_arity, acc)
        })
        .collect();
    Ok(StochMap {
        in_arity: f.in_arity,
        out_arity: g.out_arity,
        rows,
    })
}

/// `(f⊗g)(b,d | a,c) = f(b|a)·g(d|c)`.
pub fn tensor_maps(f: &StochMap, g: &StochMap) -> Result<StochMap, SemanticsError> {
    let (n, m) = (f.in_arity + g.in_arity, f.out_arity + g.out_arity);
    guard(n, m)?;
    let mut rows = Vec::with_capacity(1usize << n);
    for rf in &f.rows {
        for rg in &g.rows {
            rows.push(product(rf, rg));
        }
    }
    Ok(StochMap {
        in_arity: n,
        out_arity: m,
        rows,
    })
}

/// Product distribution `v ⊗ w`.
pub fn product(v: &Distribution, w: &Distribution) -> Distribution {
    let mut support = BTreeMap::new();
    for (b, p) in v.iter() {
        for (d, q) in w.iter() {
            support.insert((b << w.len) | d, p * q);
        }
    }
    Distribution {
        len: v.len + w.len,
        support,
    }
}

/// Total variation distance `Σ|v−w|/2`; checked against `1 − Σ min(v,w)` in debug builds.
pub fn tv_distance(v: &Distribution, w: &Distribution) -> Result<Rational, SemanticsError> {
    if v.len != w.len {
        return Err(SemanticsError::ArityMismatch {
            left: v.len,
            right: w.len,
        });
    }
    let d = tv_half_l1(v, w);
    debug_assert_eq!(d, tv_overlap(v, w));
    Ok(d)
}

pub fn tv_half_l1(v: &Distribution, w: &Distribution) -> Rational {
    let mut sum = ratio::zero();
    for (k, p) in v.iter() {
        sum += (p - w.prob(k)).abs();
    }
    for (k, q) in w.iter() {
        if !v.support.contains_key(&k) {
            sum += q;
        }
    }
    sum / ratio::int(2)
}

/// `1 − Σ_a min(v(a), w(a))`.
pub fn tv_overlap(v: &Distribution, w: &Distribution) -> Rational {
    ratio::one() - overlap(v, w)
}

pub fn overlap(v: &Distribution, w: &Distribution) -> Rational {
    v.iter()
        .filter_map(|(k, p)| w.support.get(&k).map(|q| ratio::min(p, q)))
        .fold(ratio::zero(), |a, m| a + m)
}

/// `max_a tv(f(a), g(a))`.
pub fn hom_distance(f: &StochMap, g: &StochMap) -> Result<Rational, SemanticsError> {
    if f.in_arity != g.in_arity || f.out_arity != g.out_arity {
        return Err(SemanticsError::ArityMismatch {
            left: f.in_arity + f.out_arity,
            right: g.in_arity + g.out_arity,
        });
    }
    let mut best = ratio::zero();
    for (v, w) in f.rows.iter().zip(&g.rows) {
        let d = tv_distance(v, w)?;
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

pub fn apply_map(f: &StochMap, input: &BitString) -> Result<Distribution, SemanticsError> {
    if input.len != f.in_arity {
        return Err(SemanticsError::ArityMismatch {
            left: input.len,
            right: f.in_arity,
        });
    }
    Ok(f.row(input.bits).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::combinators;
    use crate::ratio::ratio;
    use crate::syntax::{Object, Term};

    fn half() -> Rational {
        ratio(1, 2)
    }

    fn coin_dist(p: Rational) -> Distribution {
        Distribution::from_entries(1, [(1, p.clone()), (0, ratio::one() - p)])
    }

    #[test]
    fn fair_coin() {
        let m = denote(&Term::coin(half())).unwrap();
        assert_eq!(m.rows().len(), 1);
        assert_eq!(m.row(0), &coin_dist(half()));
    }

    #[test]
    fn identity_is_dirac() {
        let m = denote(&Term::id(Object::bool())).unwrap();
        assert_eq!(m, StochMap::identity(1).unwrap());
    }

    #[test]
    fn xor_truth_table() {
        let m = denote(&combinators::xor()).unwrap();
        for a in 0..4u64 {
            let want = (a >> 1) ^ (a & 1);
            assert_eq!(m.row(a).is_dirac(), Some(want), "input {a:02b}");
        }
    }

    #[test]
    fn compose_coin_copy() {
        let f = denote(&Term::coin(half())).unwrap();
        let g = denote(&Term::copy(Object::bool())).unwrap();
        let h = compose_maps(&f, &g).unwrap();
        assert_eq!(h.row(0), &Distribution::from_entries(2, [(0b11, half()), (0b00, half())]));
        assert_eq!(compose_maps(&f, &StochMap::identity(1).unwrap()).unwrap(), f);
        let del = denote(&Term::discard(Object::bool())).unwrap();
        let one = denote(&Term::bit(true)).unwrap();
        assert_eq!(compose_maps(&one, &del).unwrap(), StochMap::identity(0).unwrap());
        assert!(compose_maps(&f, &f).is_err());
    }

    #[test]
    fn tensors() {
        let one = denote(&Term::bit(true)).unwrap();
        let zero = denote(&Term::bit(false)).unwrap();
        assert_eq!(tensor_maps(&one, &zero).unwrap().row(0).is_dirac(), Some(0b10));
        let unit = StochMap::identity(0).unwrap();
        assert_eq!(tensor_maps(&one, &unit).unwrap(), one);
        let c = denote(&Term::coin(half())).unwrap();
        let cc = tensor_maps(&c, &c).unwrap();
        for k in 0..4 {
            assert_eq!(cc.row(0).prob(k), ratio(1, 4));
        }
    }

    #[test]
    fn tv_examples() {
        let one = Distribution::dirac(1, 1);
        let zero = Distribution::dirac(1, 0);
        assert_eq!(tv_distance(&one, &zero).unwrap(), ratio::one());
        assert_eq!(tv_distance(&one, &one).unwrap(), ratio::zero());
        assert_eq!(tv_distance(&coin_dist(ratio(3, 4)), &coin_dist(ratio(1, 4))).unwrap(), half());
        assert!(tv_distance(&one, &Distribution::dirac(2, 0)).is_err());
    }

    #[test]
    fn hom_distance_examples() {
        let one = denote(&Term::bit(true)).unwrap();
        let zero = denote(&Term::bit(false)).unwrap();
        let c = denote(&Term::coin(half())).unwrap();
        assert_eq!(hom_distance(&one, &one).unwrap(), ratio::zero());
        assert_eq!(hom_distance(&one, &zero).unwrap(), ratio::one());
        assert_eq!(hom_distance(&c, &one).unwrap(), half());
    }

    #[test]
    fn apply_examples() {
        let id = StochMap::identity(1).unwrap();
        let one: BitString = "1".parse().unwrap();
        assert_eq!(apply_map(&id, &one).unwrap(), Distribution::dirac(1, 1));
        let and = denote(&combinators::and()).unwrap();
        assert_eq!(apply_map(&and, &"10".parse().unwrap()).unwrap(), Distribution::dirac(1, 0));
        let otp = denote(&combinators::otp_lhs()).unwrap();
        let row = apply_map(&otp, &"0".parse().unwrap()).unwrap();
        assert_eq!(row, Distribution::from_entries(2, [(0b00, half()), (0b10, half())]));
        assert!(apply_map(&id, &BitString::empty()).is_err());
    }

    #[test]
    fn tsv_format() {
        let m = denote(&Term::coin(half())).unwrap();
        assert_eq!(m.to_tsv(), "in\tout\tprob\n-\t0\t1/2\n-\t1\t1/2\n");
        let one = denote(&Term::bit(true).seq(Term::discard(Object::bool()))).unwrap();
        assert_eq!(one.to_tsv(), "in\tout\tprob\n-\t-\t1/1\n");
    }

    #[test]
    fn netlist_matches_structural_on_library() {
        for t in [
            combinators::xor(),
            combinators::and(),
            combinators::not(),
            combinators::eq_bit(),
            combinators::otp_lhs(),
            combinators::otp_rhs(),
        ] {
            assert_eq!(denote(&t).unwrap(), denote_structural(&t).unwrap());
        }
    }

    #[test]
    fn star_terms_are_rejected() {
        let t = Term::id(Object::bool().star());
        assert_eq!(denote(&t), Err(SemanticsError::StarFound));
    }
}

//! Compiles a star-free term into a Boolean netlist over independent coins,
//! then evaluates it row by row with bit-sliced enumeration of the coins
//! that reach an output.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::{Distribution, StochMap};
use crate::ratio::Rational;
use crate::syntax::{is_dirac_weight, Generator, Term};

/// Above this many live coins the structural route is used instead.
const MAX_COINS: usize = 22;

type Sig = usize;

#[derive(Debug, Clone)]
enum Node {
    Input(usize),
    Const(bool),
    Coin(Rational),
    Mux { cond: Sig, hi: Sig, lo: Sig },
}

#[derive(Debug, Default)]
pub(super) struct Netlist {
    nodes: Vec<Node>,
    outputs: Vec<Sig>,
}

impl Netlist {
    pub(super) fn compile(t: &Term, inputs: usize) -> Netlist {
        let mut net = Netlist::default();
        let ins: Vec<Sig> = (0..inputs).map(|i| net.push(Node::Input(i))).collect();
        let (used, outs) = net.go(t, &ins);
        debug_assert_eq!(used, inputs);
        net.outputs = outs;
        net
    }

    fn push(&mut self, n: Node) -> Sig {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn konst(&mut self, b: bool) -> Sig {
        self.push(Node::Const(b))
    }

    fn mux(&mut self, cond: Sig, hi: Sig, lo: Sig) -> Sig {
        if hi == lo {
            return hi;
        }
        match self.nodes[cond] {
            Node::Const(true) => hi,
            Node::Const(false) => lo,
            _ => self.push(Node::Mux { cond, hi, lo }),
        }
    }

    /// Returns how many of `ins` the term consumed and its output signals.
    fn go(&mut self, t: &Term, ins: &[Sig]) -> (usize, Vec<Sig>) {
        match t {
            Term::Id(o) => (o.len(), ins[..o.len()].to_vec()),
            Term::Swap(a, b) => {
                let (na, nb) = (a.len(), b.len());
                let mut out = ins[na..na + nb].to_vec();
                out.extend_from_slice(&ins[..na]);
                (na + nb, out)
            }
            Term::Gen(Generator::Copy(o)) => {
                let x = &ins[..o.len()];
                (o.len(), [x, x].concat())
            }
            Term::Gen(Generator::Discard(o)) => (o.len(), Vec::new()),
            Term::Gen(Generator::Coin(p)) => {
                let s = match is_dirac_weight(p) {
                    Some(b) => self.konst(b),
                    None => self.push(Node::Coin(p.clone())),
                };
                (0, vec![s])
            }
            Term::Gen(Generator::Phi(o)) => {
                let n = o.len();
                let cond = ins[n];
                let out = (0..n).map(|i| self.mux(cond, ins[i], ins[n + 1 + i])).collect();
                (2 * n + 1, out)
            }
            Term::Seq(f, g) => {
                let (used, mid) = self.go(f, ins);
                let (took, out) = self.go(g, &mid);
                debug_assert_eq!(took, mid.len());
                (used, out)
            }
            Term::Par(f, g) => {
                let (u1, mut o1) = self.go(f, ins);
                let (u2, o2) = self.go(g, &ins[u1..]);
                o1.extend(o2);
                (u1 + u2, o1)
            }
            Term::TauStar { .. } => unreachable!("netlist compilation requires a star-free term"),
        }
    }

    /// Exact evaluation; `None` when too many coins are live.
    pub(super) fn evaluate(&self, n: usize, m: usize) -> Option<StochMap> {
        let mut live = vec![false; self.nodes.len()];
        for &o in &self.outputs {
            live[o] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if live[i] {
                if let Node::Mux { cond, hi, lo } = self.nodes[i] {
                    live[cond] = true;
                    live[hi] = true;
                    live[lo] = true;
                }
            }
        }
        let mut coin_index = vec![usize::MAX; self.nodes.len()];
        let mut coins = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if let (true, Node::Coin(p)) = (live[i], node) {
                coin_index[i] = coins.len();
                coins.push(p.clone());
            }
        }
        if coins.len() > MAX_COINS {
            return None;
        }
        let c = coins.len();
        let assignments = 1usize << c;
        let words = assignments.div_ceil(64);
        let weights = Weights::new(&coins);
        // patterns[j]: bitset of assignments in which coin j is 1
        let patterns: Vec<Vec<u64>> = (0..c)
            .map(|j| {
                let mut w = vec![0u64; words];
                for a in 0..assignments {
                    if (a >> j) & 1 == 1 {
                        w[a / 64] |= 1 << (a % 64);
                    }
                }
                w
            })
            .collect();
        let order: Vec<usize> = (0..self.nodes.len()).filter(|&i| live[i]).collect();

        let rows: Vec<Distribution> = (0..1u64 << n)
            .into_par_iter()
            .map(|row| {
                let mut val: Vec<Vec<u64>> = vec![Vec::new(); self.nodes.len()];
                for &i in &order {
                    val[i] = match &self.nodes[i] {
                        Node::Input(k) => vec![if (row >> (n - 1 - k)) & 1 == 1 { !0 } else { 0 }; words],
                        Node::Const(b) => vec![if *b { !0 } else { 0 }; words],
                        Node::Coin(_) => patterns[coin_index[i]].clone(),
                        Node::Mux { cond, hi, lo } => (0..words)
                            .map(|w| (val[*cond][w] & val[*hi][w]) | (!val[*cond][w] & val[*lo][w]))
                            .collect(),
                    };
                }
                let outs: Vec<&Vec<u64>> = self.outputs.iter().map(|&o| &val[o]).collect();
                let key = |a: usize| {
                    outs.iter()
                        .fold(0u64, |acc, v| (acc << 1) | ((v[a / 64] >> (a % 64)) & 1))
                };
                weights.distribution(m, assignments, key)
            })
            .collect();
        StochMap::new(n, m, rows).ok()
    }
}

/// Assignment weights as integer numerators over the common denominator
/// `D = Π den_i`.
enum Weights {
    Small { num: Vec<u128>, den: u128 },
    Big { num: Vec<BigInt>, den: BigInt },
}

impl Weights {
    fn new(coins: &[Rational]) -> Weights {
        let mut num = vec![BigInt::from(1)];
        let mut den = BigInt::from(1);
        for p in coins {
            let (pn, pd) = (p.numer().clone(), p.denom().clone());
            let qn = &pd - &pn;
            // coin j is bit j of the assignment index
            let mut next = Vec::with_capacity(num.len() * 2);
            next.extend(num.iter().map(|w| w * &qn));
            next.extend(num.iter().map(|w| w * &pn));
            num = next;
            den *= pd;
        }
        match (den.to_u128(), num.iter().map(|w| w.to_u128()).collect::<Option<Vec<_>>>()) {
            (Some(d), Some(n)) if d < (1u128 << 120) => Weights::Small { num: n, den: d },
            _ => Weights::Big { num, den },
        }
    }

    fn distribution(&self, m: usize, assignments: usize, key: impl Fn(usize) -> u64) -> Distribution {
        match self {
            Weights::Small { num, den } => {
                let mut acc: HashMap<u64, u128> = HashMap::new();
                for (a, w) in num.iter().enumerate().take(assignments) {
                    if *w != 0 {
                        *acc.entry(key(a)).or_insert(0) += w;
                    }
                }
                let d = BigInt::from(*den);
                Distribution::from_entries(m, acc.into_iter().map(|(k, w)| (k, Rational::new(BigInt::from(w), d.clone()))))
            }
            Weights::Big { num, den } => {
                let mut acc: HashMap<u64, BigInt> = HashMap::new();
                for (a, w) in num.iter().enumerate().take(assignments) {
                    if !w.is_zero() {
                        *acc.entry(key(a)).or_insert_with(BigInt::zero) += w;
                    }
                }
                Distribution::from_entries(m, acc.into_iter().map(|(k, w)| (k, Rational::new(w, den.clone()))))
            }
        }
    }
}

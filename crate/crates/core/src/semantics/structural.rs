//! Direct structural recursion through `compose_maps` and `tensor_maps`.
//! Slower than the netlist route and used as its cross-check.

use super::{compose_maps, tensor_maps, Distribution, SemanticsError, StochMap};
use crate::ratio;
use crate::syntax::{Generator, Term};

fn mask(n: usize) -> u64 {
    if n == 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

pub fn denote_structural(t: &Term) -> Result<StochMap, SemanticsError> {
    match t {
        Term::Id(o) => StochMap::identity(o.wires().ok_or(SemanticsError::StarFound)?),
        Term::Swap(a, b) => {
            let na = a.wires().ok_or(SemanticsError::StarFound)?;
            let nb = b.wires().ok_or(SemanticsError::StarFound)?;
            StochMap::deterministic(na + nb, na + nb, |x| ((x & mask(nb)) << na) | (x >> nb))
        }
        Term::Gen(g) => match g {
            Generator::Copy(o) => {
                let n = o.wires().ok_or(SemanticsError::StarFound)?;
                StochMap::deterministic(n, 2 * n, |x| (x << n) | x)
            }
            Generator::Discard(o) => {
                let n = o.wires().ok_or(SemanticsError::StarFound)?;
                StochMap::deterministic(n, 0, |_| 0)
            }
            Generator::Coin(p) => {
                if !ratio::is_probability(p) {
                    return Err(crate::syntax::TypeError::BadProbability(ratio::fmt_exact(p)).into());
                }
                let row = Distribution::from_entries(1, [(1, p.clone()), (0, ratio::one() - p)]);
                StochMap::new(0, 1, vec![row])
            }
            Generator::Phi(o) => {
                let n = o.wires().ok_or(SemanticsError::StarFound)?;
                StochMap::deterministic(2 * n + 1, n, |x| {
                    let a = x >> (n + 1);
                    let c = (x >> n) & 1;
                    let b = x & mask(n);
                    if c == 1 {
                        a
                    } else {
                        b
                    }
                })
            }
        },
        Term::Seq(f, g) => compose_maps(&denote_structural(f)?, &denote_structural(g)?),
        Term::Par(f, g) => tensor_maps(&denote_structural(f)?, &denote_structural(g)?),
        Term::TauStar { .. } => Err(SemanticsError::StarFound),
    }
}

//! Permutation terms built from symmetries, and the push/pop tuple wirings.

use crate::syntax::{Object, Term};

/// `id_a ⊗ t ⊗ id_c`, omitting unit identities.
pub fn whisker(a: &Object, t: Term, c: &Object) -> Term {
    let mut out = t;
    if !a.is_unit() {
        out = Term::id(a.clone()).par(out);
    }
    if !c.is_unit() {
        out = out.par(Term::id(c.clone()));
    }
    out
}

/// Rearranges a tensor of blocks: output position `j` carries input block
/// `order[j]`. Each step moves one block forward past a contiguous run.
pub fn permute_blocks(blocks: &[Object], order: &[usize]) -> Term {
    assert_eq!(blocks.len(), order.len(), "permutation size");
    let mut cur: Vec<usize> = (0..blocks.len()).collect();
    let mut steps = Vec::new();
    let cat = |ix: &[usize]| Object::concat(ix.iter().map(|&i| &blocks[i]));
    for (j, &want) in order.iter().enumerate() {
        let pos = cur.iter().position(|&b| b == want).expect("order is a permutation");
        if pos > j {
            let run = cat(&cur[j..pos]);
            let blk = &blocks[want];
            if !run.is_unit() && !blk.is_unit() {
                steps.push(whisker(&cat(&cur[..j]), Term::swap(run, blk.clone()), &cat(&cur[pos + 1..])));
            }
            cur.remove(pos);
            cur.insert(j, want);
        }
    }
    Term::seq_all(steps).unwrap_or_else(|| Term::id(Object::concat(blocks)))
}

/// `Ā·k = A_1^k ⊗ … ⊗ A_n^k`.
pub fn tuple_power(objs: &[Object], k: usize) -> Object {
    let parts: Vec<Object> = objs.iter().map(|o| o.pow(k)).collect();
    Object::concat(&parts)
}

/// `pop^k : Ā·(k+1) → Ā·1 ⊗ Ā·k`, taking the first element of every tuple.
pub fn pop_k(objs: &[Object], k: usize) -> Term {
    let n = objs.len();
    let blocks: Vec<Object> = objs.iter().flat_map(|o| std::iter::repeat_n(o.clone(), k + 1)).collect();
    let mut order: Vec<usize> = (0..n).map(|i| i * (k + 1)).collect();
    for i in 0..n {
        order.extend((1..=k).map(|r| i * (k + 1) + r));
    }
    permute_blocks(&blocks, &order)
}

/// `push^k : B̄·1 ⊗ B̄·k → B̄·(k+1)`, prepending to every tuple.
pub fn push_k(objs: &[Object], k: usize) -> Term {
    let n = objs.len();
    let mut blocks: Vec<Object> = objs.to_vec();
    for o in objs {
        blocks.extend(std::iter::repeat_n(o.clone(), k));
    }
    let mut order = Vec::with_capacity(n * (k + 1));
    for i in 0..n {
        order.push(i);
        order.extend((0..k).map(|r| n + i * k + r));
    }
    permute_blocks(&blocks, &order)
}

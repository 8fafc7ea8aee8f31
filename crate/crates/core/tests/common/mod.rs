#![allow(dead_code)]

use pbc_core::iteration::combinators;
use pbc_core::iteration::wiring::whisker;
use pbc_core::ratio::{self, ratio};
use pbc_core::semantics::Distribution;
use pbc_core::{synthesize_tight_derivation, Derivation, Object, Rational, Term};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn b() -> Object {
    Object::bool()
}

/// A probability with denominator at most 8.
pub fn random_prob(r: &mut impl Rng) -> Rational {
    let den = r.gen_range(1..=8);
    ratio(r.gen_range(0..=den), den)
}

fn layer(i: usize, gen: Term, rest: usize) -> Term {
    whisker(&Object::bools(i), gen, &Object::bools(rest))
}

/// One random layer on `w` wires, returning the new width.
fn step(r: &mut impl Rng, w: usize, max_w: usize) -> (Term, usize) {
    loop {
        match r.gen_range(0..7) {
            0 if w < max_w && w > 0 => {
                let i = r.gen_range(0..w);
                return (layer(i, Term::copy(b()), w - i - 1), w + 1);
            }
            1 if w > 0 => {
                let i = r.gen_range(0..w);
                return (layer(i, Term::discard(b()), w - i - 1), w - 1);
            }
            2 if w < max_w => {
                let i = r.gen_range(0..=w);
                return (layer(i, Term::coin(random_prob(r)), w - i), w + 1);
            }
            3 if w >= 3 => {
                let i = r.gen_range(0..=w - 3);
                return (layer(i, Term::phi(b()), w - i - 3), w - 2);
            }
            4 if w >= 2 => {
                let i = r.gen_range(0..w - 1);
                return (layer(i, Term::swap(b(), b()), w - i - 2), w);
            }
            5 if w >= 1 => {
                let i = r.gen_range(0..w);
                return (layer(i, combinators::not(), w - i - 1), w);
            }
            6 if w >= 2 => {
                let i = r.gen_range(0..w - 1);
                let g = if r.gen_bool(0.5) { combinators::and() } else { combinators::xor() };
                return (layer(i, g, w - i - 2), w - 1);
            }
            _ => {}
        }
    }
}

/// A random well-typed star-free circuit `B^n_in → B^n_out` on at most
/// `max_w` wires with at most `max_gens` generators.
pub fn random_circuit(r: &mut impl Rng, n_in: usize, n_out: usize, max_w: usize, max_gens: usize) -> Term {
    loop {
        let mut t = Term::id(Object::bools(n_in));
        let mut w = n_in;
        for _ in 0..r.gen_range(0..=5) {
            let (l, nw) = step(r, w, max_w);
            t = t.seq(l);
            w = nw;
        }
        while w > n_out {
            let i = r.gen_range(0..w);
            t = t.seq(layer(i, Term::discard(b()), w - i - 1));
            w -= 1;
        }
        while w < n_out {
            let i = r.gen_range(0..=w);
            t = t.seq(layer(i, Term::coin(random_prob(r)), w - i));
            w += 1;
        }
        if t.generator_count() <= max_gens {
            return t;
        }
    }
}

pub fn random_arity(r: &mut impl Rng, max: usize) -> usize {
    r.gen_range(0..=max)
}

/// A random distribution on `len ≤ 4` bits with small rational weights.
pub fn random_distribution(r: &mut impl Rng, len: usize) -> Distribution {
    let n = 1u64 << len;
    loop {
        let weights: Vec<i64> = (0..n).map(|_| if r.gen_bool(0.5) { r.gen_range(0..9) } else { 0 }).collect();
        let total: i64 = weights.iter().sum();
        if total > 0 {
            return Distribution::from_entries(len, weights.iter().enumerate().map(|(k, w)| (k as u64, ratio(*w, total))));
        }
    }
}

pub fn half() -> Rational {
    ratio(1, 2)
}

pub fn one() -> Rational {
    ratio::one()
}

/// Both sides of the four τ-laws for bodies `f : S ⊗ A → B ⊗ S` and
/// `g : T ⊗ B → C ⊗ T` (τ-comp) or `g : T ⊗ C → D ⊗ T` (τ-mono), all on `B`.
pub fn tau_laws(f: &Term, g: &Term) -> Vec<(&'static str, Term, Term)> {
    use pbc_core::iteration::wiring::permute_blocks;
    use pbc_core::TupleSpec;
    let bs = b().star();
    let step = |body: &Term| Term::tau_star(TupleSpec::new(b(), vec![b()], vec![b()]), body.clone());
    let comp_body = Term::id(b()).par(f.clone()).seq(g.clone().par(Term::id(b())));
    let comp_lhs = Term::id(b()).par(step(f)).seq(step(g).par(Term::id(b())));
    let comp_rhs = Term::tau_star(TupleSpec::new(Object::bools(2), vec![b()], vec![b()]), comp_body);
    let four = [b(), b(), b(), b()];
    let mono_body = permute_blocks(&four, &[0, 2, 1, 3]).seq(f.clone().par(g.clone())).seq(permute_blocks(&four, &[0, 2, 1, 3]));
    let mono_rhs = Term::tau_star(TupleSpec::new(Object::bools(2), vec![b(), b()], vec![b(), b()]), mono_body);
    let mono_lhs = permute_blocks(&[b(), b(), bs.clone(), bs.clone()], &[0, 2, 1, 3])
        .seq(step(f).par(step(g)))
        .seq(permute_blocks(&[bs.clone(), b(), bs.clone(), b()], &[0, 2, 1, 3]));
    vec![
        ("tau-id", Term::tau_star(TupleSpec::new(Object::unit(), vec![b()], vec![b()]), Term::id(b())), Term::id(bs.clone())),
        ("tau-id-state", Term::tau_star(TupleSpec::new(b(), vec![], vec![]), Term::id(b())), Term::id(b())),
        (
            "tau-swap",
            Term::tau_star(TupleSpec::new(Object::unit(), vec![b(), b()], vec![b(), b()]), Term::swap(b(), b())),
            Term::swap(bs.clone(), bs.clone()),
        ),
        ("tau-comp", comp_lhs, comp_rhs),
        ("tau-mono", mono_lhs, mono_rhs),
    ]
}

/// A star-level endomorphism of `B^*`: a one-bit-state iteration of `body`
/// started from a coin and discarded at the end.
pub fn star_endo(init: Rational, body: Term) -> Term {
    use pbc_core::TupleSpec;
    Term::coin(init)
        .par(Term::id(b().star()))
        .seq(Term::tau_star(TupleSpec::new(b(), vec![b()], vec![b()]), body))
        .seq(Term::id(b().star()).par(Term::discard(b())))
}

/// The deterministic map `B^2 → B` with truth table bit `2·x1 + x2` of
/// `table`, built as a case split on `x1` over endomaps of `x2`.
pub fn det_b2_to_b(table: u8) -> Term {
    let endo = |on0: bool, on1: bool| match (on0, on1) {
        (false, true) => Term::id(b()),
        (true, false) => combinators::not(),
        (c, _) => Term::discard(b()).seq(Term::bit(c)),
    };
    let bit = |i: u8| table >> i & 1 == 1;
    let g1 = endo(bit(2), bit(3));
    let g0 = endo(bit(0), bit(1));
    Term::swap(b(), b())
        .seq(Term::copy(b()).par(Term::id(b())))
        .seq(Term::id(b()).par(Term::swap(b(), b())))
        .seq(g1.par(Term::id(b())).par(g0))
        .seq(Term::phi(b()))
}

/// Pairs of same-typed random circuits on at most 3 wires; about half are
/// rewritten copies of one circuit, so equal and unequal pairs both occur.
pub fn canonicity_pairs(seed: u64, n: usize) -> Vec<(Term, Term)> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let (a, c) = (random_arity(&mut r, 3), random_arity(&mut r, 3));
            // the rewrite adds two generators
            let f = random_circuit(&mut r, a, c, 3, if i % 2 == 0 { 8 } else { 10 });
            let g = if i % 2 == 0 {
                let pad = Term::copy(b()).seq(Term::discard(b()).par(Term::id(b())));
                match c {
                    0 => f.clone().seq(Term::id(Object::unit())),
                    _ => f.clone().seq(whisker(&Object::unit(), pad, &Object::bools(c - 1))),
                }
            } else {
                random_circuit(&mut r, a, c, 3, 10)
            };
            (f, g)
        })
        .collect()
}

fn circuit(r: &mut impl Rng, n: usize, m: usize) -> Term {
    random_circuit(r, n, m, 3, 6)
}

/// A random derivation of some `B^n → B^m` judgement.
pub fn derivation(r: &mut impl Rng, depth: usize, n: usize, m: usize) -> Derivation {
    let leaf = depth == 0 || r.gen_bool(0.25);
    if leaf {
        let f = circuit(r, n, m);
        return match r.gen_range(0..3) {
            0 => Derivation::top(f, circuit(r, n, m)),
            1 => Derivation::refl(f.clone(), f.seq(Term::id(Object::bools(m)))),
            _ => synthesize_tight_derivation(&f, &circuit(r, n, m)).unwrap(),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..9) {
        0 => Derivation::sym(derivation(r, d, n, m)),
        1 => {
            let first = derivation(r, d, n, m);
            let next = synthesize_tight_derivation(&first.rhs, &circuit(r, n, m)).unwrap();
            Derivation::triangle(first, next)
        }
        2 => {
            let p = derivation(r, d, n, m);
            let extra = random_prob(r);
            let b = &p.bound + extra;
            Derivation::weaken(p, b)
        }
        3 if m <= 2 => {
            let l = r.gen_range(0..=2);
            Derivation::seq_left(derivation(r, d, n, l.max(1)), circuit(r, l.max(1), m))
        }
        4 => {
            let l = r.gen_range(0..=2);
            Derivation::seq_right(circuit(r, n, l), derivation(r, d, l, m))
        }
        5 if n >= 1 && m >= 1 => {
            let (n1, m1) = (r.gen_range(0..=n), r.gen_range(0..=m));
            if r.gen_bool(0.5) {
                Derivation::par_left(derivation(r, d, n1, m1), circuit(r, n - n1, m - m1))
            } else {
                Derivation::par_right(circuit(r, n1, m1), derivation(r, d, n - n1, m - m1))
            }
        }
        6 if n >= 1 => {
            let n1 = r.gen_range(0..n);
            let (p, q) = (derivation(r, d, n1, m), derivation(r, d, n - 1 - n1, m));
            let top = ratio::max(&p.bound, &q.bound);
            Derivation::phi_case(Derivation::weaken(p, top.clone()), Derivation::weaken(q, top), Object::bools(m))
        }
        7 => {
            let n1 = r.gen_range(0..=n);
            let (p, q) = (derivation(r, d, n1, m), derivation(r, d, n - n1, m));
            Derivation::phi_mix(random_prob(r), p, q, Object::bools(m))
        }
        _ => derivation(r, d, n, m),
    }
}

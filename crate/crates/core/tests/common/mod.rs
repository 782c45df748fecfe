#![allow(dead_code)]

use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_toeplitz::algebra::monomials_up_to;
use twisted_toeplitz::{AlgebraElement, Context, PhaseExponent, Scalar, ThetaMatrix};

/// `c · e^{2πi k/d}` with small integers.
pub fn coefficient(c: i64, k: i64, d: i64) -> Scalar {
    Scalar::from_integer(c).mul_phase(&PhaseExponent::Rational(Rational64::new(k, d)))
}

/// An element of `ctx` from (word index, integer, phase numerator) triples
/// over words of length at most `max_len`.
pub fn element(ctx: &Context, max_len: u32, terms: &[(usize, i64, i64)]) -> AlgebraElement {
    let words = monomials_up_to(ctx.size(), max_len);
    AlgebraElement::from_terms(
        ctx,
        terms
            .iter()
            .map(|&(w, c, k)| (words[w % words.len()].clone(), coefficient(c, k, 6))),
    )
    .unwrap()
}

pub fn terms(max: usize) -> impl Strategy<Value = Vec<(usize, i64, i64)>> {
    prop::collection::vec((0usize..10_000, -3i64..=3, 0i64..6), 1..=max)
}

/// A random element drawn from a seeded generator, for non-proptest sweeps.
pub fn seeded_element(ctx: &Context, max_len: u32, max_terms: usize, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let n = rng.gen_range(1..=max_terms);
    let t: Vec<(usize, i64, i64)> = (0..n)
        .map(|_| (rng.gen_range(0..10_000), rng.gen_range(-3..=3), rng.gen_range(0..6)))
        .collect();
    element(ctx, max_len, &t)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn twists(size: usize, count: u64) -> Vec<ThetaMatrix> {
    let mut v = vec![ThetaMatrix::zero(size)];
    v.extend((0..count).map(|s| ThetaMatrix::random_rational(size, 100 + s, 7).unwrap()));
    v
}

mod common;

use std::sync::Arc;

use common::{element, terms};
use proptest::prelude::*;
use twisted_toeplitz::gauge::{degree_decompose, invariant_expectation, kappa_gen_map};
use twisted_toeplitz::quotient::{glue, sigma_i, sphere_reduce, MultipullbackTuple};
use twisted_toeplitz::{
    cocycle_phase, h_tail, pullback_hom, AlgebraElement, Context, MultiIndex, PhaseExponent, ThetaMatrix,
};

fn theta(size: usize, seed: u64) -> ThetaMatrix {
    if seed == 0 {
        ThetaMatrix::zero(size)
    } else {
        ThetaMatrix::random_rational(size, seed, 6).unwrap()
    }
}

fn index(v: Vec<u32>) -> MultiIndex {
    MultiIndex::from(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cocycle_is_bilinear(seed in 0u64..40, a in prop::collection::vec(0u32..4, 3), b in prop::collection::vec(0u32..4, 3), c in prop::collection::vec(0u32..4, 3)) {
        let t = theta(3, seed);
        let ab: Vec<u32> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = cocycle_phase(&t, &index(ab), &index(c.clone())).unwrap();
        let rhs = cocycle_phase(&t, &index(a), &index(c.clone())).unwrap() + cocycle_phase(&t, &index(b), &index(c)).unwrap();
        prop_assert!(lhs.same_scalar(&rhs));
    }

    #[test]
    fn cocycle_identity(seed in 0u64..40, l in prop::collection::vec(0u32..4, 3), m in prop::collection::vec(0u32..4, 3), n in prop::collection::vec(0u32..4, 3)) {
        let t = theta(3, seed);
        let add = |x: &[u32], y: &[u32]| index(x.iter().zip(y).map(|(a, b)| a + b).collect());
        let c = |x: &MultiIndex, y: &MultiIndex| cocycle_phase(&t, x, y).unwrap();
        let (li, mi, ni) = (index(l.clone()), index(m.clone()), index(n.clone()));
        let lhs: PhaseExponent = c(&mi, &ni) + c(&li, &add(&m, &n));
        let rhs = c(&li, &mi) + c(&add(&l, &m), &ni);
        prop_assert!(lhs.same_scalar(&rhs));
    }

    #[test]
    fn multiplication_is_associative(seed in 0u64..40, x in terms(8), y in terms(8), z in terms(8)) {
        let ctx = Context::toeplitz(theta(3, seed));
        let (x, y, z) = (element(&ctx, 2, &x), element(&ctx, 2, &y), element(&ctx, 2, &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn star_is_an_antihomomorphism(seed in 0u64..40, x in terms(6), y in terms(6)) {
        let ctx = Context::toeplitz(theta(3, seed));
        let (x, y) = (element(&ctx, 3, &x), element(&ctx, 3, &y));
        prop_assert_eq!((&x * &y).star(), &y.star() * &x.star());
        prop_assert_eq!(x.star().star(), x);
    }

    #[test]
    fn words_multiply_to_single_words(seed in 0u64..40, a in 0usize..10_000, b in 0usize..10_000) {
        let ctx = Context::toeplitz(theta(4, seed));
        let x = element(&ctx, 3, &[(a, 1, 0)]);
        let y = element(&ctx, 3, &[(b, 1, 0)]);
        let p = &x * &y;
        prop_assert_eq!(p.len(), 1);
        let c = p.terms().values().next().unwrap();
        prop_assert!((c.magnitude() - 1.0).abs() < 1e-12 && c.is_exact());
    }

    #[test]
    fn sigma_is_a_star_homomorphism(seed in 0u64..40, i in 0usize..3, x in terms(5), y in terms(5)) {
        let ctx = Context::toeplitz(theta(3, seed));
        let (x, y) = (element(&ctx, 3, &x), element(&ctx, 3, &y));
        let s = |v: &AlgebraElement| sigma_i(v, i).unwrap();
        prop_assert_eq!(s(&(&x * &y)), &s(&x) * &s(&y));
        prop_assert_eq!(s(&x.star()), s(&x).star());
    }

    #[test]
    fn sphere_reduce_is_idempotent_and_multiplicative(seed in 0u64..40, x in terms(5), y in terms(5)) {
        let ctx = Context::toeplitz(theta(3, seed));
        let (x, y) = (element(&ctx, 3, &x), element(&ctx, 3, &y));
        let rx = sphere_reduce(&x).unwrap();
        prop_assert_eq!(sphere_reduce(&rx).unwrap(), rx.clone());
        let ry = sphere_reduce(&y).unwrap();
        prop_assert_eq!(sphere_reduce(&(&x * &y)).unwrap(), &rx * &ry);
    }

    #[test]
    fn glue_inverts_the_quotient_maps(seed in 0u64..40, x in terms(4)) {
        let ctx = Context::toeplitz(theta(3, seed));
        let a = element(&ctx, 3, &x);
        let t = MultipullbackTuple::from_toeplitz(&a).unwrap();
        let g = glue(&t).unwrap();
        let diff = &g - &a;
        for i in 0..3 {
            prop_assert!(sigma_i(&diff, i).unwrap().is_zero());
        }
    }

    #[test]
    fn degree_decomposition_is_direct(seed in 0u64..40, x in terms(8)) {
        let ctx = Context::toeplitz(theta(3, seed));
        let x = element(&ctx, 3, &x);
        let parts = degree_decompose(&x);
        let mut sum = AlgebraElement::zero(&ctx);
        for w in parts.windows(2) {
            prop_assert!(w[0].degree < w[1].degree);
        }
        for p in &parts {
            prop_assert!(p.element.is_homogeneous(p.degree));
            sum = &sum + &p.element;
        }
        prop_assert_eq!(sum, x.clone());
        let e = invariant_expectation(&x);
        prop_assert_eq!(invariant_expectation(&e), e.clone());
        prop_assert!(e.is_homogeneous(0));
        prop_assert!(invariant_expectation(&AlgebraElement::one(&ctx)).is_one());
    }

    #[test]
    fn kappa_moves_total_degree_into_slot(seed in 0u64..40, i in 0usize..3, x in terms(4)) {
        let t = Arc::new(theta(3, seed));
        let ctx = Context::b_i(t, i).unwrap();
        let x = element(&ctx, 3, &x);
        for d in degree_decompose(&x) {
            let image = kappa_gen_map(i, &d.element).unwrap();
            prop_assert!(image.terms().keys().all(|m| m.slot_degree(i) == d.degree));
        }
    }

    #[test]
    fn pullback_respects_star_and_degree(x in terms(5)) {
        let ctx = Context::sphere(ThetaMatrix::zero(3));
        let x = element(&ctx, 3, &x);
        let fx = pullback_hom(&x).unwrap();
        prop_assert_eq!(pullback_hom(&x.star()).unwrap(), fx.star());
        for d in degree_decompose(&x) {
            prop_assert!(pullback_hom(&d.element).unwrap().is_homogeneous(d.degree));
        }
    }

    #[test]
    fn pullback_is_multiplicative_on_first_two_generators(x in terms(5), y in terms(5)) {
        // words in s_0 and s_1 only: f restricts to the identity there
        let ctx = Context::sphere(ThetaMatrix::zero(3));
        let keep = |v: AlgebraElement| {
            let t: Vec<_> = v.terms().iter().filter(|(m, _)| m.p[2] == 0 && m.q[2] == 0).map(|(m, c)| (m.clone(), c.clone())).collect();
            AlgebraElement::from_terms(&ctx, t).unwrap()
        };
        let (x, y) = (keep(element(&ctx, 3, &x)), keep(element(&ctx, 3, &y)));
        let f = |v: &AlgebraElement| pullback_hom(v).unwrap();
        prop_assert_eq!(f(&(&x * &y)), &f(&x) * &f(&y));
    }
}

#[test]
fn kappa_matrix_round_trips() {
    for size in 2..=5 {
        for seed in 0..4 {
            let t = theta(size, seed);
            for i in 0..size {
                assert_eq!(t.kappa(i).unwrap().kappa_inv(i).unwrap(), t);
                assert_eq!(t.kappa_inv(i).unwrap().kappa(i).unwrap(), t);
            }
        }
    }
}

#[test]
fn h_partition_of_unity() {
    for n_big in 1..=3usize {
        for seed in 0..3 {
            let t = theta(n_big + 1, seed);
            let ctx = Context::sphere(t.clone());
            let mut sum = AlgebraElement::zero(&ctx);
            for k in 0..=n_big {
                let s = AlgebraElement::generator(&ctx, k).unwrap();
                sum = &sum + &(&(&s * &s.star()) * &h_tail(k, n_big, &t).unwrap());
            }
            assert!(sum.is_one(), "N={n_big} seed={seed}: {sum}");
        }
    }
}

#[test]
fn twisted_commutation_relations() {
    for size in 2..=4 {
        for seed in 0..4 {
            let t = theta(size, seed);
            let ctx = Context::toeplitz(t.clone());
            for i in 0..size {
                for j in 0..size {
                    if i == j {
                        continue;
                    }
                    let (si, sj) = (
                        AlgebraElement::generator(&ctx, i).unwrap(),
                        AlgebraElement::generator(&ctx, j).unwrap(),
                    );
                    let ph = twisted_toeplitz::Scalar::phase(t.entry(i, j));
                    assert_eq!(&si * &sj, (&sj * &si).scale(&ph));
                    assert_eq!(&si * &sj.star(), (&sj.star() * &si).scale(&ph.conj()));
                }
            }
        }
    }
}

use std::sync::Arc;

use twisted_toeplitz::algebra::AlgebraElement;
use twisted_toeplitz::gauge::{kappa_lemma_checks, psi_contexts, psi_images, relation_failures};
use twisted_toeplitz::ThetaMatrix;

fn thetas(n: usize) -> Vec<Arc<ThetaMatrix>> {
    let mut v = vec![Arc::new(ThetaMatrix::zero(n))];
    for seed in 1..4 {
        v.push(Arc::new(ThetaMatrix::random_rational(n, seed, 7).unwrap()));
    }
    v
}

#[test]
fn kappa_six_checks() {
    for n in 2..5 {
        for theta in thetas(n) {
            for i in 0..n {
                for (name, ok) in kappa_lemma_checks(&theta, i).unwrap() {
                    assert!(ok, "{name} failed for i = {i}, {theta}");
                }
            }
        }
    }
}

#[test]
fn psi_images_satisfy_source_relations() {
    for n in 2..5 {
        for theta in thetas(n) {
            for i in 0..n {
                for j in i + 1..n {
                    let (src, _) = psi_contexts(&theta, i, j).unwrap();
                    let bad = relation_failures(&src, &psi_images(&theta, i, j).unwrap()).unwrap();
                    assert!(bad.is_empty(), "{bad:?} for ({i},{j}) {theta}");
                }
            }
        }
    }
}

// Sending v_{i+1} to v_j itself (rather than its adjoint) is only a
// homomorphism when the twist vanishes.
#[test]
fn unstarred_first_case_breaks_twisted_relations() {
    for n in 3..5 {
        for theta in thetas(n) {
            for i in 0..n {
                for j in i + 1..n {
                    let (src, tgt) = psi_contexts(&theta, i, j).unwrap();
                    let mut imgs = psi_images(&theta, i, j).unwrap();
                    imgs[i] = AlgebraElement::generator(&tgt, j - 1).unwrap();
                    let bad = relation_failures(&src, &imgs).unwrap();
                    assert_eq!(bad.is_empty(), theta.is_zero(), "({i},{j}) {theta}");
                }
            }
        }
    }
}

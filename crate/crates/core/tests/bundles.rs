use std::time::Instant;

use twisted_toeplitz::bundles::{connection_report, ElementMatrix};
use twisted_toeplitz::{
    chern_galois_projector, pullback_projector, strong_connection, verify_connection, AlgebraElement, Context,
    ThetaMatrix,
};

fn thetas(n: usize) -> Vec<ThetaMatrix> {
    let mut v = vec![ThetaMatrix::zero(n)];
    for seed in 0..2 {
        v.push(ThetaMatrix::random_rational(n, seed, 5).unwrap());
    }
    v
}

#[test]
fn connections_are_strong() {
    for n_big in 1..=3usize {
        for theta in thetas(n_big + 1) {
            for n in -4i64..=4 {
                if n_big == 3 && n < -3 {
                    continue;
                }
                let t = Instant::now();
                let l = strong_connection(n, n_big, &theta).unwrap();
                let (m, bideg) = connection_report(&l, n);
                assert!(bideg, "N={n_big} n={n} {theta}");
                assert!(m.is_one(), "N={n_big} n={n} {theta}: m(l) = {m}");
                eprintln!("N={n_big} n={n} summands={} {:?}", l.len(), t.elapsed());
            }
        }
    }
}

#[test]
fn projectors_are_idempotent() {
    for n_big in 1..=2usize {
        for theta in thetas(n_big + 1) {
            for n in -3i64..=3 {
                let t = Instant::now();
                let e = chern_galois_projector(n, n_big, &theta).unwrap();
                assert!(e.is_idempotent(), "N={n_big} n={n} {theta}");
                assert!(e.entries_degree_zero());
                eprintln!("E N={n_big} n={n} size={} {:?}", e.size(), t.elapsed());
            }
        }
    }
}

#[test]
fn pullback_conjugacy() {
    for n_big in 1..=3usize {
        let theta = ThetaMatrix::zero(n_big + 1);
        for n in -3i64..=3 {
            let t = Instant::now();
            let e = chern_galois_projector(n, n_big, &theta).unwrap();
            let (ep, es, w) = pullback_projector(&e).unwrap();
            assert!(w.verified, "N={n_big} n={n}");
            assert_eq!(w.matches_entrywise_image, n_big == 1 || n >= 0, "N={n_big} n={n}");
            assert!(w.gamma_beta.is_one());
            assert!(ep.is_idempotent());
            assert!(es.is_idempotent());
            let padded = ep.matrix.pad_to(es.size());
            assert_eq!(w.g.multiply(&padded).unwrap().multiply(&w.g_inv).unwrap(), es.matrix);
            let ctx = es.context().clone();
            assert_eq!(w.g.multiply(&w.g_inv).unwrap(), ElementMatrix::identity(&ctx, es.size()));
            eprintln!("f N={n_big} n={n} {} -> {} {:?}", e.size(), ep.size(), t.elapsed());
        }
    }
}

#[test]
fn twisted_pullback_is_rejected() {
    let theta = ThetaMatrix::random_rational(3, 4, 7).unwrap();
    let e = chern_galois_projector(-1, 2, &theta).unwrap();
    assert!(pullback_projector(&e).is_err());
    let ctx = Context::sphere(theta);
    assert!(verify_connection(&strong_connection(-2, 2, ctx.theta()).unwrap(), -2));
    assert!(!AlgebraElement::generator(&ctx, 0).unwrap().is_one());
}

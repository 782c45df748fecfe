use num_complex::Complex64;
use proptest::prelude::*;
use twisted_toeplitz::algebra::monomials_up_to;
use twisted_toeplitz::bundles::ProjectorMatrix;
use twisted_toeplitz::{
    chern_galois_projector, class_invariant, compact_matrix_unit, fock_generator, relation_residual, represent,
    AlgebraElement, Context, Monomial, MultiIndex, Scalar, ThetaMatrix,
};

type Dense = Vec<Vec<Complex64>>;

fn zero(n: usize) -> Dense {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = zero(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn dagger(a: &Dense) -> Dense {
    let n = a.len();
    let mut c = zero(n);
    for i in 0..n {
        for j in 0..n {
            c[j][i] = a[i][j].conj();
        }
    }
    c
}

/// Dense shifts on `{0..=M}^2`, built directly from the matrix formula.
fn dense_shifts(theta01: f64, m: usize) -> (Dense, Dense) {
    let r = m + 1;
    let idx = |a: usize, b: usize| a * r + b;
    let (mut s0, mut s1) = (zero(r * r), zero(r * r));
    for a in 0..r {
        for b in 0..r {
            if a < m {
                s0[idx(a + 1, b)][idx(a, b)] = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta01 * b as f64);
            }
            if b < m {
                s1[idx(a, b + 1)][idx(a, b)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    (s0, s1)
}

fn dense_word(s: &[Dense; 2], w: &Monomial) -> Dense {
    let n = s[0].len();
    let mut acc = zero(n);
    for (i, row) in acc.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    for slot in 0..2 {
        for _ in 0..w.p[slot] {
            acc = mul(&acc, &s[slot]);
        }
    }
    for slot in (0..2).rev() {
        for _ in 0..w.q[slot] {
            acc = mul(&acc, &dagger(&s[slot]));
        }
    }
    acc
}

/// Trace over `{|μ| = M}` of the diagonal blocks of `E` represented densely.
fn oracle_level_trace(e: &ProjectorMatrix, theta01: f64, m: usize) -> f64 {
    let (s0, s1) = dense_shifts(theta01, m);
    let s = [s0, s1];
    let r = m + 1;
    let mut t = Complex64::new(0.0, 0.0);
    for k in 0..e.size() {
        for (w, c) in e.entry(k, k).terms() {
            let d = dense_word(&s, w);
            for a in 0..=m {
                let j = a * r + (m - a);
                t += c.to_complex() * d[j][j];
            }
        }
    }
    assert!(t.im.abs() < 1e-9);
    t.re
}

#[test]
fn oracle_fixes_rank_one_charges() {
    // Finite differences of the level traces give the rank and the charge
    // without reference to the library's invariant code.
    let theta = ThetaMatrix::zero(2);
    for n in -3i64..=3 {
        let e = chern_galois_projector(n, 1, &theta).unwrap();
        let (t8, t7) = (oracle_level_trace(&e, 0.0, 8), oracle_level_trace(&e, 0.0, 7));
        let d = t8 - t7;
        let c = t8 - d * 9.0;
        assert!((d - 1.0).abs() < 1e-9, "n={n} d={d}");
        assert!((c + n as f64).abs() < 1e-9, "n={n} c={c}");
    }
}

#[test]
fn class_invariants_match_frozen_values() {
    let expected: [(i64, i64, i64); 7] = [(-3, 1, 3), (-2, 1, 2), (-1, 1, 1), (0, 1, 0), (1, 1, -1), (2, 1, -2), (3, 1, -3)];
    let theta = ThetaMatrix::zero(2);
    for (n, d, c) in expected {
        let e = chern_galois_projector(n, 1, &theta).unwrap();
        let inv = class_invariant(&e, &[8, 16, 24]).unwrap();
        assert_eq!((inv.dimension_class, inv.compact_charge), (d, c), "n={n}");
        assert!(inv.residual < 1e-10);
        assert_eq!(inv.truncations_used, vec![8, 16, 24]);
    }
}

#[test]
fn twisted_and_higher_rank_charges() {
    let theta = ThetaMatrix::random_rational(2, 5, 7).unwrap();
    let t01 = theta.entry(0, 1).to_f64();
    for n in [-2i64, 1, 2] {
        let e = chern_galois_projector(n, 1, &theta).unwrap();
        let inv = class_invariant(&e, &[8, 12]).unwrap();
        assert_eq!(inv.compact_charge, -n);
        let t = oracle_level_trace(&e, t01, 10) - oracle_level_trace(&e, t01, 9);
        assert!((t - inv.dimension_class as f64).abs() < 1e-9);
    }
    let theta3 = ThetaMatrix::random_rational(3, 2, 5).unwrap();
    for n in [-2i64, -1, 1, 2] {
        let e = chern_galois_projector(n, 2, &theta3).unwrap();
        let inv = class_invariant(&e, &[8, 10]).unwrap();
        assert_eq!((inv.dimension_class, inv.compact_charge), (1, -n));
    }
}

#[test]
fn residual_contract() {
    for n_big in 0..=2usize {
        let zero = relation_residual(n_big, &ThetaMatrix::zero(n_big + 1), 8).unwrap();
        assert!(zero <= 1e-12);
        for seed in 0..2 {
            let theta = ThetaMatrix::random_rational(n_big + 1, seed, 9).unwrap();
            assert!(relation_residual(n_big, &theta, 8).unwrap() <= 1e-10);
        }
    }
    assert!(relation_residual(1, &ThetaMatrix::zero(2), 2).is_err());
}

#[test]
fn boundary_defect_is_order_one() {
    let theta = ThetaMatrix::from_rational(2, &[(0, 1, num_rational::Rational64::new(1, 4))]).unwrap();
    let s1 = fock_generator(1, 6, &theta).unwrap();
    let one = twisted_toeplitz::SparseOperator::identity(s1.basis());
    let iso = s1.adjoint().multiply(&s1).add_scaled(Complex64::new(-1.0, 0.0), &one);
    assert!((iso.norm_bound() - 1.0).abs() < 1e-12);
    assert_eq!(iso.restrict_columns(|mu| mu[1] < 6).max_abs(), 0.0);
}

#[test]
fn matrix_units_act_on_vacuum_translates() {
    let theta = ThetaMatrix::random_rational(3, 4, 6).unwrap();
    let m = 5;
    for p in monomials_up_to(3, 2).into_iter().filter(|w| w.q.total() == 0) {
        for q in monomials_up_to(3, 2).into_iter().filter(|w| w.q.total() == 0) {
            let x = compact_matrix_unit(&p.p, &q.p, &theta).unwrap();
            let op = represent(&x, m).unwrap();
            let b = op.basis();
            for j in 0..b.dim() {
                let col = op.column(j);
                if b.multi_index(j) == q.p.0 {
                    assert_eq!(col.len(), 1);
                    assert_eq!(col[0].0, b.index(&p.p));
                    assert!((col[0].1.norm() - 1.0).abs() < 1e-12);
                } else {
                    assert!(col.iter().all(|(_, a)| a.norm() < 1e-12));
                }
            }
        }
    }
}

#[test]
fn ideal_elements_have_finite_support() {
    // Elements of the ideal act only on levels bounded by their word length.
    let theta = ThetaMatrix::random_rational(3, 7, 5).unwrap();
    let p = MultiIndex::from(vec![1, 0, 1]);
    let q = MultiIndex::from(vec![0, 2, 0]);
    let x = compact_matrix_unit(&p, &q, &theta).unwrap();
    let op = represent(&x, 6).unwrap();
    let b = op.basis();
    for j in 0..b.dim() {
        let mu = b.multi_index(j);
        if mu.iter().sum::<u32>() != 2 {
            assert!(op.column(j).iter().all(|(_, a)| a.norm() < 1e-12));
        }
    }
}

fn element(theta: &ThetaMatrix, terms: &[(usize, i64)]) -> AlgebraElement {
    let words = monomials_up_to(theta.size(), 2);
    let ctx = Context::toeplitz(theta.clone());
    AlgebraElement::from_terms(&ctx, terms.iter().map(|&(w, c)| (words[w % words.len()].clone(), Scalar::from_integer(c))))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn representation_is_multiplicative(
        seed in 0u64..50,
        xs in prop::collection::vec((0usize..200, -3i64..=3), 1..=6),
        ys in prop::collection::vec((0usize..200, -3i64..=3), 1..=6),
    ) {
        let theta = ThetaMatrix::random_rational(3, seed, 6).unwrap();
        let (x, y) = (element(&theta, &xs), element(&theta, &ys));
        let m = 7;
        let lhs = represent(&(&x * &y), m).unwrap();
        let rhs = represent(&x, m).unwrap().multiply(&represent(&y, m).unwrap());
        let diff = lhs.add_scaled(Complex64::new(-1.0, 0.0), &rhs);
        let interior = diff.restrict_columns(|mu| mu.iter().all(|&a| a + 4 <= m));
        prop_assert!(interior.max_abs() <= 1e-10);
    }

    #[test]
    fn representation_respects_adjoint(seed in 0u64..50, xs in prop::collection::vec((0usize..200, -3i64..=3), 1..=6)) {
        let theta = ThetaMatrix::random_rational(2, seed, 8).unwrap();
        let x = element(&theta, &xs);
        let a = represent(&x.star(), 6).unwrap();
        let b = represent(&x, 6).unwrap().adjoint();
        let diff = a.add_scaled(Complex64::new(-1.0, 0.0), &b);
        let interior = diff.restrict_columns(|mu| mu.iter().all(|&v| v + 2 <= 6));
        prop_assert!(interior.max_abs() <= 1e-12);
    }
}

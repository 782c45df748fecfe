//! The U(1) grading, and the gauge isomorphisms relating the slot quotients
//! to the fixed-point algebras.

use std::sync::Arc;

use crate::algebra::{extend_hom, AlgebraElement, AlgebraKind, Context};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::twist::ThetaMatrix;

/// The part of an element of a fixed U(1) degree.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedComponent {
    pub degree: i64,
    pub element: AlgebraElement,
}

/// Splits `x` by `|p| - |q|`, degrees ascending.
pub fn degree_decompose(x: &AlgebraElement) -> Vec<GradedComponent> {
    let mut degrees: Vec<i64> = x.terms().keys().map(|m| m.degree()).collect();
    degrees.sort_unstable();
    degrees.dedup();
    degrees
        .into_iter()
        .map(|d| GradedComponent {
            degree: d,
            element: x.degree_part(d),
        })
        .collect()
}

/// Average over the gauge action: the degree-zero part.
pub fn invariant_expectation(x: &AlgebraElement) -> AlgebraElement {
    x.degree_part(0)
}

fn expect_ctx(x: &AlgebraElement, want: &Context) -> Result<()> {
    if x.context() == want {
        Ok(())
    } else {
        Err(Error::WrongContext {
            expected: want.to_string(),
            found: x.context().to_string(),
        })
    }
}

fn gens(ctx: &Context) -> Vec<AlgebraElement> {
    (0..ctx.size())
        .map(|k| AlgebraElement::generator(ctx, k).expect("in range"))
        .collect()
}

/// Images of the generators of `B_i^θ` under `κ_i`, in `B_i^{κ_i(θ)}`:
/// `w_k ↦ w_k w_i` for `k != i`, `w_i ↦ w_i`.
pub fn kappa_images(theta: &Arc<ThetaMatrix>, i: usize) -> Result<Vec<AlgebraElement>> {
    let target = Context::b_i(theta.kappa(i)?, i)?;
    let w = gens(&target);
    Ok((0..theta.size())
        .map(|k| if k == i { w[i].clone() } else { &w[k] * &w[i] })
        .collect())
}

/// Images of the generators of `B_i^{κ_i(θ)}` under `κ_i^{-1}`, in `B_i^θ`:
/// `w_k ↦ w_k w_i^*` for `k != i`, `w_i ↦ w_i`.
pub fn kappa_inv_images(theta: &Arc<ThetaMatrix>, i: usize) -> Result<Vec<AlgebraElement>> {
    let target = Context::b_i(theta.clone(), i)?;
    let w = gens(&target);
    Ok((0..theta.size())
        .map(|k| if k == i { w[i].clone() } else { &w[k] * &w[i].star() })
        .collect())
}

/// `κ_i : B_i^θ → B_i^{κ_i(θ)}`.
pub fn kappa_gen_map(i: usize, x: &AlgebraElement) -> Result<AlgebraElement> {
    let theta = x.context().theta_arc().clone();
    expect_ctx(x, &Context::b_i(theta.clone(), i)?)?;
    let images = kappa_images(&theta, i)?;
    let target = images[0].context().clone();
    extend_hom(x, &images, &target)
}

/// `κ_i^{-1} : B_i^{κ_i(θ)} → B_i^θ`, where `θ` is recovered from the twist
/// `κ_i(θ)` of `x`.
pub fn kappa_gen_inv(i: usize, x: &AlgebraElement) -> Result<AlgebraElement> {
    let kt = x.context().theta_arc().clone();
    expect_ctx(x, &Context::b_i(kt.clone(), i)?)?;
    let theta = Arc::new(kt.kappa_inv(i)?);
    let images = kappa_inv_images(&theta, i)?;
    let target = images[0].context().clone();
    extend_hom(x, &images, &target)
}

/// Slot of `B_i` carrying the generator at position `pos` of `A_i`.
fn fixed_point_slot(i: usize, pos: usize) -> usize {
    if pos < i {
        pos
    } else {
        pos + 1
    }
}

/// `φ_i : A_i → B_i^{κ_i(θ)}`, `v_k ↦ w_{k-1}` for `k <= i` and `w_k` for
/// `k > i`. `x` must live in `A_i` for the ambient twist `θ`.
pub fn phi_iso(i: usize, x: &AlgebraElement) -> Result<AlgebraElement> {
    let fp = x
        .context()
        .fixed_point_data()
        .filter(|fp| fp.i == i && x.context().is_toeplitz())
        .ok_or_else(|| Error::WrongContext {
            expected: format!("the fixed-point algebra A_{i}"),
            found: x.context().to_string(),
        })?;
    let target = Context::b_i(fp.ambient.kappa(i)?, i)?;
    let w = gens(&target);
    let images: Vec<AlgebraElement> = (0..x.context().size()).map(|p| w[fixed_point_slot(i, p)].clone()).collect();
    extend_hom(x, &images, &target)
}

/// `φ_i^{-1}` on the elements of `B_i^{κ_i(θ)}` without slot-`i` letters
/// (the invariants of the slot-`i` gauge action). `ambient` is `θ`.
pub fn phi_iso_inv(i: usize, ambient: &Arc<ThetaMatrix>, y: &AlgebraElement) -> Result<AlgebraElement> {
    expect_ctx(y, &Context::b_i(ambient.kappa(i)?, i)?)?;
    if y.terms().keys().any(|m| m.p[i] != 0 || m.q[i] != 0) {
        return Err(Error::NotInvariant { slot: i });
    }
    let target = Context::fixed_point(ambient.clone(), i)?;
    let v = gens(&target);
    let images: Vec<AlgebraElement> = (0..y.context().size())
        .map(|k| match k.cmp(&i) {
            std::cmp::Ordering::Less => v[k].clone(),
            std::cmp::Ordering::Greater => v[k - 1].clone(),
            // never reached: no word of y has slot-i letters
            std::cmp::Ordering::Equal => AlgebraElement::one(&target),
        })
        .collect();
    extend_hom(y, &images, &target)
}

/// `A_{i;j}` (for `i < j`: `A_i` with `v_j` unitary) and `A_{j;i}` (`A_j`
/// with `v_{i+1}` unitary).
pub fn psi_contexts(theta: &Arc<ThetaMatrix>, i: usize, j: usize) -> Result<(Context, Context)> {
    if i >= j {
        return Err(Error::Precondition(format!("psi needs i < j, got i = {i}, j = {j}")));
    }
    if j >= theta.size() {
        return Err(Error::IndexOutOfRange {
            index: j,
            bound: theta.size(),
        });
    }
    let source = Context::fixed_point_quotient(theta.clone(), j, Some(i + 1))?;
    let target = Context::fixed_point_quotient(theta.clone(), i, Some(j))?;
    Ok((source, target))
}

/// Images of `v_1^{j;i}, …, v_N^{j;i}` under `ψ_ij`, in `A_{i;j}`.
///
/// `v_{i+1} ↦ (v_j)^*`; `v_k ↦ v_k v_j^*` for `k > j` or `k < i + 1`;
/// `v_k ↦ v_{k-1} v_j^*` for `i + 1 < k <= j` (labels from 1).
pub fn psi_images(theta: &Arc<ThetaMatrix>, i: usize, j: usize) -> Result<Vec<AlgebraElement>> {
    let (source, target) = psi_contexts(theta, i, j)?;
    let v = gens(&target);
    let vj_star = v[j - 1].star();
    Ok((1..=source.size())
        .map(|k| {
            if k == i + 1 {
                vj_star.clone()
            } else if k > j || k < i + 1 {
                &v[k - 1] * &vj_star
            } else {
                &v[k - 2] * &vj_star
            }
        })
        .collect())
}

/// `ψ_ij : A_{j;i} → A_{i;j}`.
pub fn psi_map(i: usize, j: usize, x: &AlgebraElement) -> Result<AlgebraElement> {
    let fp = x.context().fixed_point_data().ok_or_else(|| Error::WrongContext {
        expected: format!("A_{{{j};{i}}}"),
        found: x.context().to_string(),
    })?;
    let theta = fp.ambient.clone();
    let (source, target) = psi_contexts(&theta, i, j)?;
    expect_ctx(x, &source)?;
    let images = psi_images(&theta, i, j)?;
    extend_hom(x, &images, &target)
}

/// One defining relation of a twisted Toeplitz algebra or slot quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    Isometry(usize),
    Unitary(usize),
    Commutation(usize, usize),
    StarCommutation(usize, usize),
}

/// Relations of `source` violated by the proposed generator images: every
/// image is an isometry, the images of unitary slots are unitary, and
/// `x_a x_b = e^{2πiθ_ab} x_b x_a`, `x_a x_b^* = e^{-2πiθ_ab} x_b^* x_a`
/// for `θ` the twist of `source`.
pub fn relation_failures(source: &Context, images: &[AlgebraElement]) -> Result<Vec<Relation>> {
    if images.len() != source.size() {
        return Err(Error::DimensionMismatch {
            expected: source.size(),
            found: images.len(),
        });
    }
    let theta = source.theta();
    let mut bad = Vec::new();
    for (a, x) in images.iter().enumerate() {
        if !(&x.star() * x).is_one() {
            bad.push(Relation::Isometry(a));
        }
        if source.unitary_slots().contains(&a) && !(x * &x.star()).is_one() {
            bad.push(Relation::Unitary(a));
        }
        for (b, y) in images.iter().enumerate() {
            if a == b {
                continue;
            }
            let t = Scalar::phase(theta.entry(a, b));
            if (x * y) != (y * x).scale(&t) {
                bad.push(Relation::Commutation(a, b));
            }
            if (x * &y.star()) != (&y.star() * x).scale(&t.conj()) {
                bad.push(Relation::StarCommutation(a, b));
            }
        }
    }
    Ok(bad)
}

/// The six checks of the proof that `κ_i` and `κ_i^{-1}` are well defined:
/// isometry (and unitarity of slot `i`), commutation and star-commutation
/// relations of the images, for the map and for its inverse.
pub fn kappa_lemma_checks(theta: &Arc<ThetaMatrix>, i: usize) -> Result<[(&'static str, bool); 6]> {
    let src = Context::b_i(theta.clone(), i)?;
    let fwd = relation_failures(&src, &kappa_images(theta, i)?)?;
    let ksrc = Context::b_i(theta.kappa(i)?, i)?;
    let inv = relation_failures(&ksrc, &kappa_inv_images(theta, i)?)?;
    let none = |v: &[Relation], f: fn(&Relation) -> bool| !v.iter().any(f);
    let iso = |r: &Relation| matches!(r, Relation::Isometry(_) | Relation::Unitary(_));
    let com = |r: &Relation| matches!(r, Relation::Commutation(..));
    let star = |r: &Relation| matches!(r, Relation::StarCommutation(..));
    Ok([
        ("kappa isometries", none(&fwd, iso)),
        ("kappa commutation", none(&fwd, com)),
        ("kappa star commutation", none(&fwd, star)),
        ("kappa inverse isometries", none(&inv, iso)),
        ("kappa inverse commutation", none(&inv, com)),
        ("kappa inverse star commutation", none(&inv, star)),
    ])
}

/// The quotient `A_i → A_{i;label}` applied to an element of `A_i`.
pub fn fixed_point_quotient_map(x: &AlgebraElement, label: usize) -> Result<AlgebraElement> {
    let fp = x.context().fixed_point_data().ok_or_else(|| Error::WrongContext {
        expected: "a fixed-point algebra".into(),
        found: x.context().to_string(),
    })?;
    if !x.context().is_toeplitz() {
        return Err(Error::WrongContext {
            expected: format!("A_{}", fp.i),
            found: x.context().to_string(),
        });
    }
    let target = Context::fixed_point_quotient(fp.ambient.clone(), fp.i, Some(label))?;
    debug_assert!(matches!(target.kind(), AlgebraKind::Quotient(_)));
    Ok(x.reduce_into(&target))
}

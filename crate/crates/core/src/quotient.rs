//! The quotients `B_i`, `B_ij` and the sphere quotient; multipullback
//! tuples, gluing, and the cocycle condition.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{monomials_up_to, reduce_unitary, AlgebraElement, AlgebraKind, Context, Monomial};
use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::scalar::Scalar;
use crate::twist::ThetaMatrix;

/// Default cap on the number of candidate words in [`glue`].
pub const DEFAULT_GLUE_SUPPORT: usize = 200_000;

/// Maps `x` into the quotient where the slots of `x`'s context plus `extra`
/// are unitary.
fn make_unitary(x: &AlgebraElement, extra: &[usize]) -> Result<AlgebraElement> {
    let ctx = x.context();
    let mut slots: Vec<usize> = match ctx.kind() {
        AlgebraKind::Toeplitz => Vec::new(),
        AlgebraKind::Quotient(s) => s.clone(),
        AlgebraKind::Sphere => {
            return Err(Error::WrongContext {
                expected: "a Toeplitz algebra or one of its slot quotients".into(),
                found: ctx.to_string(),
            })
        }
    };
    for &e in extra {
        if e >= ctx.size() {
            return Err(Error::IndexOutOfRange {
                index: e,
                bound: ctx.size(),
            });
        }
        if !slots.contains(&e) {
            slots.push(e);
        }
    }
    slots.sort_unstable();
    let target = ctx.with_kind(AlgebraKind::Quotient(slots))?;
    Ok(x.reduce_into(&target))
}

fn expect_kind(x: &AlgebraElement, kind: &AlgebraKind) -> Result<()> {
    if x.context().kind() == kind {
        Ok(())
    } else {
        Err(Error::WrongContext {
            expected: format!("{kind:?}"),
            found: x.context().to_string(),
        })
    }
}

/// The quotient map `σ_i : T → B_i`.
pub fn sigma_i(x: &AlgebraElement, i: usize) -> Result<AlgebraElement> {
    expect_kind(x, &AlgebraKind::Toeplitz)?;
    make_unitary(x, &[i])
}

/// The quotient map `π^i_j : B_i → B_ij`.
pub fn pi_i_j(b: &AlgebraElement, i: usize, j: usize) -> Result<AlgebraElement> {
    if i == j {
        return Err(Error::EqualIndices(i));
    }
    expect_kind(b, &AlgebraKind::Quotient(vec![i]))?;
    make_unitary(b, &[j])
}

/// Further quotient of a slot quotient (or of `T`) making `extra` unitary.
pub fn unitarize(x: &AlgebraElement, extra: &[usize]) -> Result<AlgebraElement> {
    make_unitary(x, extra)
}

/// Normal form modulo the sphere relation `∏_i (1 - s_i s_i^*) = 0`.
pub fn sphere_reduce(x: &AlgebraElement) -> Result<AlgebraElement> {
    match x.context().kind() {
        AlgebraKind::Sphere => Ok(x.clone()),
        AlgebraKind::Toeplitz => {
            let target = x.context().with_kind(AlgebraKind::Sphere)?;
            Ok(x.reduce_into(&target))
        }
        AlgebraKind::Quotient(_) => Err(Error::WrongContext {
            expected: "the Toeplitz algebra".into(),
            found: x.context().to_string(),
        }),
    }
}

/// The element of `T` with the same words as `x` (a section of the quotient
/// map for sphere and slot-quotient elements).
pub fn toeplitz_lift(x: &AlgebraElement) -> AlgebraElement {
    let ctx = x.context().with_kind(AlgebraKind::Toeplitz).expect("toeplitz context");
    x.relabel(&ctx)
}

/// A tuple `(b_0, …, b_N)` with `b_i ∈ B_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipullbackTuple {
    theta: Arc<ThetaMatrix>,
    components: Vec<AlgebraElement>,
}

impl MultipullbackTuple {
    pub fn new(theta: impl Into<Arc<ThetaMatrix>>, components: Vec<AlgebraElement>) -> Result<Self> {
        let theta = theta.into();
        if components.len() != theta.size() {
            return Err(Error::DimensionMismatch {
                expected: theta.size(),
                found: components.len(),
            });
        }
        for (i, b) in components.iter().enumerate() {
            let want = Context::b_i(theta.clone(), i)?;
            if b.context() != &want {
                return Err(Error::WrongContext {
                    expected: want.to_string(),
                    found: b.context().to_string(),
                });
            }
        }
        Ok(MultipullbackTuple { theta, components })
    }

    /// `(σ_0(a), …, σ_N(a))`.
    pub fn from_toeplitz(a: &AlgebraElement) -> Result<Self> {
        expect_kind(a, &AlgebraKind::Toeplitz)?;
        let comps = (0..a.context().size())
            .map(|i| sigma_i(a, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultipullbackTuple {
            theta: a.context().theta_arc().clone(),
            components: comps,
        })
    }

    /// The distinguished generator `𝐬_i = (w_i, …, w_i)`.
    pub fn generator(theta: impl Into<Arc<ThetaMatrix>>, i: usize) -> Result<Self> {
        let theta = theta.into();
        let w = AlgebraElement::generator(&Context::toeplitz(theta.clone()), i)?;
        MultipullbackTuple::from_toeplitz(&w)
    }

    pub fn theta(&self) -> &ThetaMatrix {
        &self.theta
    }

    pub fn theta_arc(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn components(&self) -> &[AlgebraElement] {
        &self.components
    }

    /// The first pair `(i, j)` with `π^i_j(b_i) != π^j_i(b_j)`.
    pub fn first_incompatibility(&self) -> Option<(usize, usize)> {
        let n = self.components.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        pairs.into_iter().find(|&(i, j)| {
            let a = pi_i_j(&self.components[i], i, j).expect("component context");
            let b = pi_i_j(&self.components[j], j, i).expect("component context");
            a != b
        })
    }
}

/// Whether all pairwise compatibility equations hold.
pub fn is_compatible(t: &MultipullbackTuple) -> bool {
    t.first_incompatibility().is_none()
}

/// `m` with the slots in `mask` made unitary.
fn reduce_slots(theta: &ThetaMatrix, m: &Monomial, mask: u64) -> (Monomial, crate::twist::PhaseExponent) {
    let slots: Vec<usize> = (0..m.len()).filter(|&s| mask & (1 << s) != 0).collect();
    reduce_unitary(theta, m, &slots)
}

/// A preimage `a ∈ T` of a compatible tuple, `σ_i(a) = b_i` for all `i`.
///
/// The unknowns are the coefficients of the words obtained from the words of
/// each `b_i` by cancelling `w w^*` pairs in any set of further slots; on
/// this support the system is always solvable, and it is solved exactly (or
/// by elimination with a residual check for float twists).
pub fn glue(t: &MultipullbackTuple) -> Result<AlgebraElement> {
    glue_with_bound(t, DEFAULT_GLUE_SUPPORT)
}

pub fn glue_with_bound(t: &MultipullbackTuple, max_support: usize) -> Result<AlgebraElement> {
    if let Some((i, j)) = t.first_incompatibility() {
        return Err(Error::IncompatibleTuple { i, j });
    }
    let theta = t.theta();
    let n = theta.size();
    let full = (1u64 << n) - 1;
    let mut candidates: std::collections::BTreeSet<Monomial> = std::collections::BTreeSet::new();
    for (i, b) in t.components().iter().enumerate() {
        let others = full & !(1 << i);
        for m in b.terms().keys() {
            // every subset of the other slots
            let mut sub = others;
            loop {
                candidates.insert(reduce_slots(theta, m, sub).0);
                if candidates.len() > max_support {
                    return Err(Error::SupportOverflow {
                        size: candidates.len(),
                        bound: max_support,
                    });
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & others;
            }
        }
    }
    let candidates: Vec<Monomial> = candidates.into_iter().collect();

    // One equation per (component, word of B_i) pair.
    let mut rows: BTreeMap<(usize, Monomial), BTreeMap<usize, Scalar>> = BTreeMap::new();
    for (k, c) in candidates.iter().enumerate() {
        for i in 0..n {
            let (r, phase) = reduce_unitary(theta, c, &[i]);
            rows.entry((i, r)).or_default().insert(k, Scalar::phase(phase));
        }
    }
    // Every word of every b_i is among the candidates, so each has a row.
    let mut ech: Echelon<usize> = Echelon::new();
    for ((i, r), row) in rows {
        let rhs = t.components()[i].coefficient(&r);
        ech.insert_equation(row, rhs);
    }
    let Some(solution) = ech.solve() else {
        return Err(Error::Unsolvable { residual: f64::INFINITY });
    };
    let ctx = Context::toeplitz(t.theta_arc().clone());
    let a = AlgebraElement::from_terms(
        &ctx,
        solution.into_iter().map(|(k, c)| (candidates[k].clone(), c)),
    )?;
    let mut residual: f64 = 0.0;
    for (i, b) in t.components().iter().enumerate() {
        let d = &sigma_i(&a, i)? - b;
        residual = residual.max(d.max_abs());
        if theta.mode() == crate::twist::TwistMode::Rational && !d.is_zero() {
            return Err(Error::Unsolvable { residual });
        }
    }
    if residual > 1e-10 {
        return Err(Error::Unsolvable { residual });
    }
    Ok(a)
}

/// A preimage given in closed form by inclusion-exclusion over the nonempty
/// slot sets `S`: `a = Σ_S (-1)^{|S|+1} β_S`, where `β_S` is `b_s` (any
/// `s ∈ S`) with all slots of `S` made unitary, read back in `T`.
/// Compatibility makes `β_S` independent of the choice of `s`.
pub fn glue_closed_form(t: &MultipullbackTuple) -> Result<AlgebraElement> {
    if let Some((i, j)) = t.first_incompatibility() {
        return Err(Error::IncompatibleTuple { i, j });
    }
    let n = t.theta().size();
    let ctx = Context::toeplitz(t.theta_arc().clone());
    let mut a = AlgebraElement::zero(&ctx);
    for mask in 1u64..(1 << n) {
        let s = mask.trailing_zeros() as usize;
        let others: Vec<usize> = (0..n).filter(|&k| k != s && mask & (1 << k) != 0).collect();
        let beta = toeplitz_lift(&unitarize(&t.components()[s], &others)?);
        a = if mask.count_ones() % 2 == 1 { &a + &beta } else { &a - &beta };
    }
    Ok(a)
}

/// One failed check of the cocycle condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CocycleFailure {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// 1 for the kernel-image equality, 2 for the coherence of the induced
    /// isomorphisms.
    pub condition: u8,
    pub witness: Monomial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CocycleReport {
    pub passed: bool,
    pub checked_degree: u32,
    pub failures: Vec<CocycleFailure>,
}

/// Spanning set of `π^i_j(ker π^i_k)` from words of length `<= d`:
/// the images of `m - π^i_k(m)` for words `m` of `B_i`.
fn kernel_image(theta: &Arc<ThetaMatrix>, i: usize, j: usize, k: usize, words: &[Monomial]) -> Result<Vec<(Monomial, AlgebraElement)>> {
    let bi = Context::b_i(theta.clone(), i)?;
    let mut out = Vec::new();
    for m in words.iter().filter(|m| bi.is_canonical(m)) {
        let x = AlgebraElement::monomial(&bi, m.clone(), Scalar::one());
        let down = unitarize(&x, &[k])?.relabel(&bi);
        let d = &x - &down;
        if d.is_zero() {
            continue;
        }
        out.push((m.clone(), pi_i_j(&d, i, j)?));
    }
    Ok(out)
}

fn check_triple(theta: &Arc<ThetaMatrix>, (i, j, k): (usize, usize, usize), words: &[Monomial]) -> Result<Vec<CocycleFailure>> {
    let mut failures = Vec::new();
    let fail = |condition, witness: &Monomial| CocycleFailure {
        i,
        j,
        k,
        condition,
        witness: witness.clone(),
    };

    // (1) π^i_j(ker π^i_k) = π^j_i(ker π^j_k) inside B_ij.
    let left = kernel_image(theta, i, j, k, words)?;
    let right = kernel_image(theta, j, i, k, words)?;
    let span = |gens: &[(Monomial, AlgebraElement)]| {
        let mut e: Echelon<Monomial> = Echelon::new();
        for (_, g) in gens {
            e.insert(g.terms().clone());
        }
        e
    };
    let (el, er) = (span(&left), span(&right));
    if let Some((m, _)) = left.iter().find(|(_, g)| !er.contains(g.terms())) {
        failures.push(fail(1, m));
    }
    if let Some((m, _)) = right.iter().find(|(_, g)| !el.contains(g.terms())) {
        failures.push(fail(1, m));
    }

    // (2) φ^{ik}_j = φ^{ij}_k ∘ φ^{jk}_i on A^k_{ij}, all quotients of the
    // form B_abc being realized by the normal form with slots a, b, c unitary.
    let bk = Context::b_i(theta.clone(), k)?;
    let bj = Context::b_i(theta.clone(), j)?;
    for m in words.iter().filter(|m| bk.is_canonical(m)) {
        let x = AlgebraElement::monomial(&bk, m.clone(), Scalar::one());
        // direct: through B_ik
        let direct = unitarize(&pi_i_j(&x, k, i)?, &[j])?;
        // composite: through B_jk, then a representative in B_j, through B_ij
        let step = unitarize(&pi_i_j(&x, k, j)?, &[i])?;
        let rep = step.relabel(&bj);
        let composite = unitarize(&pi_i_j(&rep, j, i)?, &[k])?;
        if direct != composite {
            failures.push(fail(2, m));
            break;
        }
    }
    Ok(failures)
}

/// Checks both parts of the cocycle condition for the maps `π^i_j` on all
/// words of length at most `degree_bound`.
pub fn cocycle_check(theta: &ThetaMatrix, degree_bound: u32) -> CocycleReport {
    let theta = Arc::new(theta.clone());
    let n = theta.size();
    let words = monomials_up_to(n, degree_bound);
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .filter(|&(i, j, k)| i != j && j != k && i != k)
        .collect();
    let mut failures: Vec<CocycleFailure> = triples
        .par_iter()
        .map(|&t| check_triple(&theta, t, &words).expect("contexts are valid"))
        .flatten()
        .collect();
    failures.sort_by_key(|f| (f.i, f.j, f.k, f.condition));
    CocycleReport {
        passed: failures.is_empty(),
        checked_degree: degree_bound,
        failures,
    }
}

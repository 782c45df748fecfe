//! Strong connections on the quantum sphere, the projectors of the
//! associated line bundles, and their pullback along `f : S^{2N+1} → S^3`.

use std::sync::Arc;

use crate::algebra::{extend_hom, AlgebraElement, Context};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::twist::ThetaMatrix;

/// A finite sum of elementary tensors of sphere elements.
///
/// Kept in a normal form: every left factor has leading coefficient one
/// (with the scalar moved to the right factor), equal left factors are
/// merged, zero summands dropped, and summands sorted by left factor.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement {
    ctx: Context,
    summands: Vec<(AlgebraElement, AlgebraElement)>,
}

/// Writes `x = c · y` with the leading coefficient of `y` equal to one.
pub fn normalize_left(x: &AlgebraElement) -> Option<(AlgebraElement, Scalar)> {
    let (_, lead) = x.terms().iter().next()?;
    let inv = lead.inv()?;
    Some((x.scale(&inv), lead.clone()))
}

fn left_key(x: &AlgebraElement) -> Vec<crate::algebra::Monomial> {
    x.terms().keys().cloned().collect()
}

impl TensorElement {
    pub fn new(ctx: &Context, pairs: impl IntoIterator<Item = (AlgebraElement, AlgebraElement)>) -> Result<Self> {
        let mut groups: Vec<(AlgebraElement, AlgebraElement)> = Vec::new();
        for (a, r) in pairs {
            for f in [&a, &r] {
                if f.context() != ctx {
                    return Err(Error::WrongContext {
                        expected: ctx.to_string(),
                        found: f.context().to_string(),
                    });
                }
            }
            let Some((na, c)) = normalize_left(&a) else { continue };
            let r = r.scale(&c);
            match groups.iter_mut().find(|(g, _)| *g == na) {
                Some((_, acc)) => *acc = &*acc + &r,
                None => groups.push((na, r)),
            }
        }
        groups.retain(|(_, r)| !r.is_zero());
        groups.sort_by_key(|(a, _)| left_key(a));
        Ok(TensorElement {
            ctx: ctx.clone(),
            summands: groups,
        })
    }

    /// `1 ⊗ 1`.
    pub fn unit(ctx: &Context) -> Self {
        TensorElement {
            ctx: ctx.clone(),
            summands: vec![(AlgebraElement::one(ctx), AlgebraElement::one(ctx))],
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn summands(&self) -> &[(AlgebraElement, AlgebraElement)] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// `Σ a_l r_l`.
    pub fn multiply_out(&self) -> AlgebraElement {
        let mut acc = AlgebraElement::zero(&self.ctx);
        for (a, r) in &self.summands {
            acc = &acc + &(a * r);
        }
        acc
    }

    /// `(x ⊗ 1) t (1 ⊗ y)`.
    pub fn sandwich(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<TensorElement> {
        let pairs = self
            .summands
            .iter()
            .map(|(a, r)| Ok((x.multiply(a)?, r.multiply(y)?)))
            .collect::<Result<Vec<_>>>()?;
        TensorElement::new(&self.ctx, pairs)
    }

    /// Sum of two tensors.
    pub fn sum(&self, other: &TensorElement) -> Result<TensorElement> {
        TensorElement::new(&self.ctx, self.summands.iter().chain(other.summands.iter()).cloned())
    }
}

fn sphere_gens(ctx: &Context) -> Vec<AlgebraElement> {
    (0..ctx.size())
        .map(|k| AlgebraElement::generator(ctx, k).expect("in range"))
        .collect()
}

fn check_size(n_big: usize, theta: &ThetaMatrix) -> Result<()> {
    if theta.size() != n_big + 1 {
        return Err(Error::DimensionMismatch {
            expected: n_big + 1,
            found: theta.size(),
        });
    }
    Ok(())
}

/// `H_i = ∏_{j > i} (1 - s_j s_j^*)` in the sphere algebra.
pub fn h_tail(i: usize, n_big: usize, theta: &ThetaMatrix) -> Result<AlgebraElement> {
    check_size(n_big, theta)?;
    if i > n_big {
        return Err(Error::IndexOutOfRange { index: i, bound: n_big + 1 });
    }
    let ctx = Context::sphere(theta.clone());
    Ok(h_tail_in(&ctx, i))
}

fn h_tail_in(ctx: &Context, i: usize) -> AlgebraElement {
    let s = sphere_gens(ctx);
    let one = AlgebraElement::one(ctx);
    let mut h = one.clone();
    for sj in &s[i + 1..] {
        h = &h * &(&one - &(sj * &sj.star()));
    }
    h
}

/// The strong connection `ℓ(u^n)`: `s_0^{*n} ⊗ s_0^n` for `n >= 0`, and for
/// `n < 0` the recursion `ℓ(u^{m-1}) = Σ_k (s_k ⊗ 1) ℓ(u^m) (1 ⊗ s_k^* H_k)`
/// started at `ℓ(1) = 1 ⊗ 1`.
pub fn strong_connection(n: i64, n_big: usize, theta: &ThetaMatrix) -> Result<TensorElement> {
    check_size(n_big, theta)?;
    let ctx = Context::sphere(theta.clone());
    strong_connection_in(&ctx, n)
}

pub(crate) fn strong_connection_in(ctx: &Context, n: i64) -> Result<TensorElement> {
    let s = sphere_gens(ctx);
    if n >= 0 {
        let e = n as u32;
        return TensorElement::new(ctx, [(s[0].star().pow(e), s[0].pow(e))]);
    }
    let right: Vec<AlgebraElement> = (0..ctx.size()).map(|k| &s[k].star() * &h_tail_in(ctx, k)).collect();
    let mut l = TensorElement::unit(ctx);
    for _ in 0..(-n) {
        let mut pairs = Vec::new();
        for (k, sk) in s.iter().enumerate() {
            for (a, r) in l.summands() {
                pairs.push((sk * a, r * &right[k]));
            }
        }
        l = TensorElement::new(ctx, pairs)?;
    }
    Ok(l)
}

/// `m(ℓ)` and whether the left factors have degree `-n` and the right
/// factors degree `n`.
pub fn connection_report(l: &TensorElement, n: i64) -> (AlgebraElement, bool) {
    let bidegree = l
        .summands()
        .iter()
        .all(|(a, r)| a.is_homogeneous(-n) && r.is_homogeneous(n));
    (l.multiply_out(), bidegree)
}

/// `m(ℓ) = 1` exactly and the bidegree is `(-n, n)`.
pub fn verify_connection(l: &TensorElement, n: i64) -> bool {
    let (m, bidegree) = connection_report(l, n);
    bidegree && m.is_one()
}

/// A rectangular matrix over one algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementMatrix {
    ctx: Context,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<AlgebraElement>>,
}

impl ElementMatrix {
    pub fn from_rows(ctx: &Context, entries: Vec<Vec<AlgebraElement>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        for row in &entries {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            if let Some(bad) = row.iter().find(|x| x.context() != ctx) {
                return Err(Error::WrongContext {
                    expected: ctx.to_string(),
                    found: bad.context().to_string(),
                });
            }
        }
        Ok(ElementMatrix {
            ctx: ctx.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(ctx: &Context, rows: usize, cols: usize) -> Self {
        ElementMatrix {
            ctx: ctx.clone(),
            rows,
            cols,
            entries: vec![vec![AlgebraElement::zero(ctx); cols]; rows],
        }
    }

    pub fn identity(ctx: &Context, n: usize) -> Self {
        let mut m = ElementMatrix::zeros(ctx, n, n);
        for i in 0..n {
            m.entries[i][i] = AlgebraElement::one(ctx);
        }
        m
    }

    pub fn from_scalars(ctx: &Context, s: &[Vec<Scalar>]) -> Self {
        let entries = s
            .iter()
            .map(|row| row.iter().map(|c| AlgebraElement::scalar(ctx, c.clone())).collect())
            .collect();
        ElementMatrix::from_rows(ctx, entries).expect("rectangular")
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Vec<AlgebraElement>] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &AlgebraElement {
        &self.entries[r][c]
    }

    pub fn multiply(&self, other: &ElementMatrix) -> Result<ElementMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = ElementMatrix::zeros(&self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = AlgebraElement::zero(&self.ctx);
                for k in 0..self.cols {
                    let (a, b) = (&self.entries[i][k], &other.entries[k][j]);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &a.multiply(b)?;
                    }
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// `self ⊕ 0` padded to `n × n`.
    pub fn pad_to(&self, n: usize) -> ElementMatrix {
        let mut out = ElementMatrix::zeros(&self.ctx, n, n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i][j] = self.entries[i][j].clone();
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&AlgebraElement) -> Result<AlgebraElement>, ctx: &Context) -> Result<ElementMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        ElementMatrix::from_rows(ctx, entries)
    }
}

/// The idempotent `E^n_{kl} = r_k a_l` of the line bundle of winding `n`,
/// with the connection data `γ = (a_l)`, `β = (r_l)` it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorMatrix {
    pub n: i64,
    pub matrix: ElementMatrix,
    pub gamma: Vec<AlgebraElement>,
    pub beta: Vec<AlgebraElement>,
}

impl ProjectorMatrix {
    /// `β^T γ` from the summands `a_l ⊗ r_l` of a connection.
    pub fn from_connection(n: i64, l: &TensorElement) -> Result<Self> {
        let gamma: Vec<AlgebraElement> = l.summands().iter().map(|(a, _)| a.clone()).collect();
        let beta: Vec<AlgebraElement> = l.summands().iter().map(|(_, r)| r.clone()).collect();
        let entries = beta
            .iter()
            .map(|r| gamma.iter().map(|a| r.multiply(a)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectorMatrix {
            n,
            matrix: ElementMatrix::from_rows(l.context(), entries)?,
            gamma,
            beta,
        })
    }

    /// A matrix without recorded connection data.
    pub fn from_matrix(n: i64, matrix: ElementMatrix) -> Self {
        ProjectorMatrix {
            n,
            matrix,
            gamma: Vec::new(),
            beta: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn context(&self) -> &Context {
        self.matrix.context()
    }

    pub fn entry(&self, k: usize, l: usize) -> &AlgebraElement {
        self.matrix.get(k, l)
    }

    pub fn is_idempotent(&self) -> bool {
        self.matrix.multiply(&self.matrix).is_ok_and(|sq| sq == self.matrix)
    }

    pub fn entries_degree_zero(&self) -> bool {
        self.matrix
            .entries()
            .iter()
            .flatten()
            .all(|x| x.is_homogeneous(0))
    }
}

/// `E^n` for the sphere with `N + 1` generators.
pub fn chern_galois_projector(n: i64, n_big: usize, theta: &ThetaMatrix) -> Result<ProjectorMatrix> {
    let l = strong_connection(n, n_big, theta)?;
    ProjectorMatrix::from_connection(n, &l)
}

/// The morphism `f : C(S^{2N+1}) → C(S^3)` (untwisted), `s_0 ↦ s_0`,
/// `s_j ↦ s_1` for `j >= 1`. Toeplitz inputs are read as words in the
/// generators.
pub fn pullback_hom(x: &AlgebraElement) -> Result<AlgebraElement> {
    let ctx = x.context();
    if !(ctx.is_sphere() || ctx.is_toeplitz()) || ctx.fixed_point_data().is_some() {
        return Err(Error::WrongContext {
            expected: "a sphere algebra".into(),
            found: ctx.to_string(),
        });
    }
    if !ctx.theta().is_zero() {
        return Err(Error::NonzeroTwist);
    }
    let target = Context::sphere(Arc::new(ThetaMatrix::zero(2)));
    let t = sphere_gens(&target);
    let images: Vec<AlgebraElement> = (0..ctx.size())
        .map(|j| if j == 0 { t[0].clone() } else { t[1].clone() })
        .collect();
    extend_hom(x, &images, &target)
}

/// Matrices `G`, `G^{-1}` with `G (E' ⊕ 0) G^{-1} = E''`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugationWitness {
    pub g: ElementMatrix,
    pub g_inv: ElementMatrix,
    /// `γ' β'^T`, which must be `1`.
    pub gamma_beta: AlgebraElement,
    pub verified: bool,
    /// Whether `E'' = (f(r_k) f(a_l))` agrees with `f` applied entrywise to
    /// `E`. This needs `f` to be multiplicative on the products `r_k a_l`,
    /// which fails once `N >= 2` and `n < 0`: `f` sends the relation
    /// `s_1 s_2^* = s_2^* s_1` to `s_1 s_1^* = 1`.
    pub matches_entrywise_image: bool,
}

fn invert_scalar_matrix(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * p);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Pushes `E = E^n` forward along `f`. Returns `E'`, the projector of the
/// pushed-forward connection `(f ⊗ f) ∘ ℓ`; `E'' = f(β)^T f(γ)`; and the
/// witness of the conjugacy `E'' ~ E' ⊕ 0`.
pub fn pullback_projector(e: &ProjectorMatrix) -> Result<(ProjectorMatrix, ProjectorMatrix, ConjugationWitness)> {
    if e.gamma.len() != e.size() || e.beta.len() != e.size() {
        return Err(Error::Precondition("projector carries no connection data".into()));
    }
    let f_gamma = e.gamma.iter().map(pullback_hom).collect::<Result<Vec<_>>>()?;
    let f_beta = e.beta.iter().map(pullback_hom).collect::<Result<Vec<_>>>()?;
    let target = f_gamma
        .first()
        .map(|x| x.context().clone())
        .unwrap_or_else(|| Context::sphere(Arc::new(ThetaMatrix::zero(2))));
    let m = e.size();

    // f(a_l) = c_l γ'_{k(l)}: group the images by normalized left factor.
    let mut gamma_p: Vec<AlgebraElement> = Vec::new();
    let mut c = Vec::new(); // (k, l, c_kl)
    for (l, fa) in f_gamma.iter().enumerate() {
        if let Some((na, s)) = normalize_left(fa) {
            let k = match gamma_p.iter().position(|g| *g == na) {
                Some(k) => k,
                None => {
                    gamma_p.push(na);
                    gamma_p.len() - 1
                }
            };
            c.push((k, l, s));
        }
    }
    let mp = gamma_p.len();
    let mut c_mat = vec![vec![Scalar::zero(); m]; mp];
    for (k, l, s) in &c {
        c_mat[*k][*l] = s.clone();
    }
    // β' = C f(β)
    let beta_p: Vec<AlgebraElement> = (0..mp)
        .map(|k| {
            let mut acc = AlgebraElement::zero(&target);
            for l in 0..m {
                if !c_mat[k][l].is_zero() {
                    acc = &acc + &f_beta[l].scale(&c_mat[k][l]);
                }
            }
            acc
        })
        .collect();
    let e_prime_entries = beta_p
        .iter()
        .map(|r| gamma_p.iter().map(|a| r.multiply(a)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let e_prime = ProjectorMatrix {
        n: e.n,
        matrix: ElementMatrix::from_rows(&target, e_prime_entries)?,
        gamma: gamma_p.clone(),
        beta: beta_p.clone(),
    };
    let e_second_entries = f_beta
        .iter()
        .map(|r| f_gamma.iter().map(|a| r.multiply(a)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let e_second = ProjectorMatrix {
        n: e.n,
        matrix: ElementMatrix::from_rows(&target, e_second_entries)?,
        gamma: f_gamma.clone(),
        beta: f_beta.clone(),
    };

    // Q: first rows C, then unit rows on the columns not used as pivots.
    let pivots: Vec<usize> = (0..mp)
        .map(|k| (0..m).find(|&l| !c_mat[k][l].is_zero()).expect("nonzero row"))
        .collect();
    let mut q = c_mat.clone();
    let rest: Vec<usize> = (0..m).filter(|l| !pivots.contains(l)).collect();
    for &l in &rest {
        q.push((0..m).map(|j| if j == l { Scalar::one() } else { Scalar::zero() }).collect());
    }
    let q_inv = invert_scalar_matrix(&q).ok_or_else(|| Error::Precondition("basis change is singular".into()))?;
    // Q f(β) = (β', ρ); L = [[1, 0], [-ρ γ', 1]] clears the block ρ γ'.
    let rho: Vec<AlgebraElement> = rest.iter().map(|&l| f_beta[l].clone()).collect();
    let mut lower = ElementMatrix::identity(&target, m);
    let mut lower_inv = ElementMatrix::identity(&target, m);
    for (r, rho_r) in rho.iter().enumerate() {
        for (k, g) in gamma_p.iter().enumerate() {
            let x = rho_r.multiply(g)?;
            lower_inv.entries[mp + r][k] = x.clone();
            lower.entries[mp + r][k] = -&x;
        }
    }
    let q_m = ElementMatrix::from_scalars(&target, &q);
    let q_inv_m = ElementMatrix::from_scalars(&target, &q_inv);
    // G E'' G^{-1} = E' ⊕ 0 for G = L Q; the witness records the inverse pair.
    let forward = lower.multiply(&q_m)?;
    let backward = q_inv_m.multiply(&lower_inv)?;
    let mut gamma_beta = AlgebraElement::zero(&target);
    for (g, b) in gamma_p.iter().zip(&beta_p) {
        gamma_beta = &gamma_beta + &g.multiply(b)?;
    }
    let padded = e_prime.matrix.pad_to(m);
    let conj = backward.multiply(&padded)?.multiply(&forward)?;
    let verified = conj == e_second.matrix
        && backward.multiply(&forward)? == ElementMatrix::identity(&target, m)
        && gamma_beta.is_one();
    let matches_entrywise_image = e.matrix.map(pullback_hom, &target)? == e_second.matrix;
    Ok((
        e_prime,
        e_second,
        ConjugationWitness {
            g: backward,
            g_inv: forward,
            gamma_beta,
            verified,
            matches_entrywise_image,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ctx: &Context, k: usize) -> AlgebraElement {
        AlgebraElement::generator(ctx, k).unwrap()
    }

    #[test]
    fn h_tail_examples() {
        let theta = ThetaMatrix::zero(2);
        assert!(h_tail(1, 1, &theta).unwrap().is_one());
        let ctx = Context::sphere(theta.clone());
        let expect = &AlgebraElement::one(&ctx) - &(&s(&ctx, 1) * &s(&ctx, 1).star());
        assert_eq!(h_tail(0, 1, &theta).unwrap(), expect);
        assert!(h_tail(2, 1, &theta).is_err());
        assert!(h_tail(0, 2, &theta).is_err());
    }

    #[test]
    fn connection_closed_forms() {
        let theta = ThetaMatrix::zero(2);
        let ctx = Context::sphere(theta.clone());
        let l2 = strong_connection(2, 1, &theta).unwrap();
        assert_eq!(l2.summands(), &[(s(&ctx, 0).star().pow(2), s(&ctx, 0).pow(2))]);
        assert_eq!(strong_connection(0, 1, &theta).unwrap(), TensorElement::unit(&ctx));
        let lm1 = strong_connection(-1, 1, &theta).unwrap();
        let h0 = h_tail(0, 1, &theta).unwrap();
        let expect = TensorElement::new(
            &ctx,
            [(s(&ctx, 0), &s(&ctx, 0).star() * &h0), (s(&ctx, 1), s(&ctx, 1).star())],
        )
        .unwrap();
        assert_eq!(lm1, expect);
    }

    #[test]
    fn verify_rejects_bad_tensor() {
        let ctx = Context::sphere(ThetaMatrix::zero(2));
        assert!(verify_connection(&TensorElement::unit(&ctx), 0));
        let bad = TensorElement::new(&ctx, [(s(&ctx, 0).star(), s(&ctx, 1))]).unwrap();
        assert!(!verify_connection(&bad, 1));
    }

    #[test]
    fn small_projectors() {
        let theta = ThetaMatrix::zero(2);
        let ctx = Context::sphere(theta.clone());
        let e1 = chern_galois_projector(1, 1, &theta).unwrap();
        assert_eq!(e1.size(), 1);
        assert_eq!(e1.entry(0, 0), &(&s(&ctx, 0) * &s(&ctx, 0).star()));
        let e0 = chern_galois_projector(0, 1, &theta).unwrap();
        assert!(e0.size() == 1 && e0.entry(0, 0).is_one());
        let em1 = chern_galois_projector(-1, 1, &theta).unwrap();
        let one = AlgebraElement::one(&ctx);
        let expect = vec![
            vec![&one - &(&s(&ctx, 1) * &s(&ctx, 1).star()), AlgebraElement::zero(&ctx)],
            vec![&s(&ctx, 1).star() * &s(&ctx, 0), one.clone()],
        ];
        assert_eq!(em1.matrix, ElementMatrix::from_rows(&ctx, expect).unwrap());
        assert!(em1.is_idempotent());
    }

    #[test]
    fn pullback_hom_examples() {
        let theta = ThetaMatrix::zero(3);
        let ctx = Context::sphere(theta.clone());
        let x = &s(&ctx, 2) * &s(&ctx, 1).star();
        let tgt = Context::sphere(ThetaMatrix::zero(2));
        assert_eq!(pullback_hom(&x).unwrap(), &s(&tgt, 1) * &s(&tgt, 1).star());
        assert!(pullback_hom(&AlgebraElement::one(&ctx)).unwrap().is_one());
        let twisted = Context::sphere(ThetaMatrix::random_rational(3, 1, 5).unwrap());
        assert_eq!(pullback_hom(&s(&twisted, 0)).unwrap_err(), Error::NonzeroTwist);
    }

    #[test]
    fn pullback_of_rank_one() {
        let e = chern_galois_projector(1, 2, &ThetaMatrix::zero(3)).unwrap();
        let (ep, es, w) = pullback_projector(&e).unwrap();
        assert!(w.verified && w.matches_entrywise_image);
        assert_eq!(ep.matrix, es.matrix);
    }

    #[test]
    fn pullback_hom_breaks_star_commutation() {
        let ctx = Context::sphere(ThetaMatrix::zero(3));
        let x = &s(&ctx, 2).star() * &s(&ctx, 1);
        let lhs = pullback_hom(&x).unwrap();
        let rhs = &pullback_hom(&s(&ctx, 2).star()).unwrap() * &pullback_hom(&s(&ctx, 1)).unwrap();
        assert!(!lhs.is_one() && rhs.is_one());
        let e = chern_galois_projector(-1, 2, &ThetaMatrix::zero(3)).unwrap();
        let (_, _, w) = pullback_projector(&e).unwrap();
        assert!(w.verified && !w.matches_entrywise_image);
    }

    #[test]
    fn pullback_of_sphere_defect() {
        let defect = crate::sphere_defect(&ThetaMatrix::zero(3));
        assert!(!defect.is_zero());
        assert!(pullback_hom(&defect).unwrap().is_zero());
    }
}

//! Truncated Fock representations of the twisted Toeplitz algebra on
//! `ℓ²(ℕ^{N+1})` and numerical invariants of line-bundle projectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Monomial};
use crate::bundles::ProjectorMatrix;
use crate::error::{Error, Result};
use crate::twist::{ThetaMatrix, TwistMode};

/// Default cap on the dimension of any assembled operator.
pub const DEFAULT_MAX_DIM: usize = 100_000;

/// Tolerance for invariants before rounding to integers.
pub const INVARIANT_TOL: f64 = 1e-6;

/// The dimension cap, read from `NCG_MAX_DIM` when set.
pub fn max_dim() -> usize {
    std::env::var("NCG_MAX_DIM")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

fn check_envelope(dim: usize) -> Result<()> {
    let max = max_dim();
    if dim > max {
        return Err(Error::Envelope { dim, max });
    }
    Ok(())
}

/// Mixed-radix indexing of `{μ : μ_i ≤ M}`, slot 0 most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockBasis {
    pub slots: usize,
    pub cutoff: u32,
}

impl FockBasis {
    pub fn dim(&self) -> usize {
        (self.cutoff as usize + 1).pow(self.slots as u32)
    }

    pub fn index(&self, mu: &[u32]) -> usize {
        let r = self.cutoff as usize + 1;
        mu.iter().fold(0, |acc, &m| acc * r + m as usize)
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<u32> {
        let r = self.cutoff as usize + 1;
        let mut mu = vec![0u32; self.slots];
        for m in mu.iter_mut().rev() {
            *m = (idx % r) as u32;
            idx /= r;
        }
        mu
    }
}

/// A complex matrix on the truncated Fock space, stored by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    basis: FockBasis,
    cols: Vec<Vec<(usize, Complex64)>>,
}

fn push_entry(col: &mut Vec<(usize, Complex64)>, row: usize, v: Complex64) {
    match col.iter_mut().find(|(r, _)| *r == row) {
        Some((_, e)) => *e += v,
        None => col.push((row, v)),
    }
}

impl SparseOperator {
    pub fn zero(basis: FockBasis) -> Self {
        SparseOperator {
            basis,
            cols: vec![Vec::new(); basis.dim()],
        }
    }

    pub fn identity(basis: FockBasis) -> Self {
        SparseOperator {
            basis,
            cols: (0..basis.dim()).map(|j| vec![(j, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn truncation(&self) -> u32 {
        self.basis.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.cols[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| *v)
    }

    pub fn column(&self, col: usize) -> &[(usize, Complex64)] {
        &self.cols[col]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (j, col) in self.cols.iter().enumerate() {
            if v[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(r, a) in col {
                out[r] += a * v[j];
            }
        }
        out
    }

    /// `self · other`.
    pub fn multiply(&self, other: &SparseOperator) -> SparseOperator {
        let cols = other
            .cols
            .par_iter()
            .map(|col| {
                let mut acc = Vec::new();
                for &(k, b) in col {
                    for &(r, a) in &self.cols[k] {
                        push_entry(&mut acc, r, a * b);
                    }
                }
                acc
            })
            .collect();
        SparseOperator { basis: self.basis, cols }
    }

    pub fn adjoint(&self) -> SparseOperator {
        let mut cols = vec![Vec::new(); self.dim()];
        for (j, col) in self.cols.iter().enumerate() {
            for &(r, a) in col {
                cols[r].push((j, a.conj()));
            }
        }
        SparseOperator { basis: self.basis, cols }
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: Complex64, other: &SparseOperator) -> SparseOperator {
        let mut out = self.clone();
        for (j, col) in other.cols.iter().enumerate() {
            for &(r, a) in col {
                push_entry(&mut out.cols[j], r, c * a);
            }
        }
        out
    }

    /// Keeps only the columns of basis vectors satisfying `keep`.
    pub fn restrict_columns(&self, keep: impl Fn(&[u32]) -> bool) -> SparseOperator {
        let cols = self
            .cols
            .iter()
            .enumerate()
            .map(|(j, col)| if keep(&self.basis.multi_index(j)) { col.clone() } else { Vec::new() })
            .collect();
        SparseOperator { basis: self.basis, cols }
    }

    /// Schur bound `sqrt(max row sum · max column sum)` on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0f64; self.dim()];
        let mut max_col = 0.0f64;
        for col in &self.cols {
            let mut s = 0.0;
            for &(r, a) in col {
                s += a.norm();
                rows[r] += a.norm();
            }
            max_col = max_col.max(s);
        }
        let max_row = rows.into_iter().fold(0.0, f64::max);
        (max_row * max_col).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.cols.iter().flatten().map(|(_, a)| a.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|j| self.get(j, j)).sum()
    }
}

fn check_slot_count(theta: &ThetaMatrix, i: usize) -> Result<()> {
    if i >= theta.size() {
        return Err(Error::IndexOutOfRange {
            index: i,
            bound: theta.size(),
        });
    }
    Ok(())
}

/// The exponent `Σ_{j > i} θ_ij μ_j` of the phase picked up by `s_i` at `e_μ`.
fn shift_phase(theta: &ThetaMatrix, i: usize, mu: &[u32]) -> f64 {
    ((i + 1)..mu.len())
        .map(|j| theta.entry(i, j).to_f64() * mu[j] as f64)
        .sum()
}

fn cis(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// `π(s_i) e_μ = exp(2πi Σ_{j>i} θ_ij μ_j) e_{μ+δ_i}`, cut off at `M`.
pub fn fock_generator(i: usize, m: u32, theta: &ThetaMatrix) -> Result<SparseOperator> {
    check_slot_count(theta, i)?;
    if m < 1 {
        return Err(Error::Precondition("truncation must be at least 1".into()));
    }
    let basis = FockBasis {
        slots: theta.size(),
        cutoff: m,
    };
    check_envelope(basis.dim())?;
    let cols = (0..basis.dim())
        .map(|j| {
            let mut mu = basis.multi_index(j);
            if mu[i] == m {
                return Vec::new();
            }
            let ph = cis(shift_phase(theta, i, &mu));
            mu[i] += 1;
            vec![(basis.index(&mu), ph)]
        })
        .collect();
    Ok(SparseOperator { basis, cols })
}

/// Applies the letters of `W_p W_q^*` (rightmost first) to `e_μ`, with the
/// hard cutoff at every step.
fn apply_word(theta: &ThetaMatrix, m: &Monomial, cutoff: u32, mu: &mut [u32]) -> Option<Complex64> {
    let n = mu.len();
    let mut t = 0.0;
    for i in 0..n {
        for _ in 0..m.q[i] {
            if mu[i] == 0 {
                return None;
            }
            mu[i] -= 1;
            t -= shift_phase(theta, i, mu);
        }
    }
    for i in (0..n).rev() {
        for _ in 0..m.p[i] {
            if mu[i] == cutoff {
                return None;
            }
            t += shift_phase(theta, i, mu);
            mu[i] += 1;
        }
    }
    Some(cis(t))
}

fn check_representable(x: &AlgebraElement) -> Result<()> {
    let ctx = x.context();
    if !(ctx.is_toeplitz() || ctx.is_sphere()) || ctx.fixed_point_data().is_some() {
        return Err(Error::WrongContext {
            expected: "a Toeplitz or sphere algebra".into(),
            found: ctx.to_string(),
        });
    }
    Ok(())
}

/// `π(x)` at truncation `M`. Sphere elements are represented through the
/// Toeplitz lift given by their normal-form words.
pub fn represent(x: &AlgebraElement, m: u32) -> Result<SparseOperator> {
    check_representable(x)?;
    let theta = x.context().theta();
    let basis = FockBasis {
        slots: theta.size(),
        cutoff: m,
    };
    check_envelope(basis.dim())?;
    let terms: Vec<(&Monomial, Complex64)> = x.terms().iter().map(|(w, c)| (w, c.to_complex())).collect();
    let cols = (0..basis.dim())
        .into_par_iter()
        .map(|j| {
            let mut col = Vec::new();
            let start = basis.multi_index(j);
            for (w, c) in &terms {
                let mut mu = start.clone();
                if let Some(ph) = apply_word(theta, w, m, &mut mu) {
                    push_entry(&mut col, basis.index(&mu), c * ph);
                }
            }
            col.retain(|(_, a)| a.norm() > 0.0);
            col
        })
        .collect();
    Ok(SparseOperator { basis, cols })
}

/// Largest Schur-bound defect of the isometry and (star-)commutation
/// relations on vectors supported in `{μ : μ_i ≤ M - 2}`.
pub fn relation_residual(n_big: usize, theta: &ThetaMatrix, m: u32) -> Result<f64> {
    if theta.size() != n_big + 1 {
        return Err(Error::DimensionMismatch {
            expected: n_big + 1,
            found: theta.size(),
        });
    }
    if m < 3 {
        return Err(Error::Precondition("relation residual needs M >= 3".into()));
    }
    let gens = (0..=n_big)
        .map(|i| fock_generator(i, m, theta))
        .collect::<Result<Vec<_>>>()?;
    let adj: Vec<SparseOperator> = gens.iter().map(SparseOperator::adjoint).collect();
    let basis = gens[0].basis();
    let interior = |mu: &[u32]| mu.iter().all(|&x| x + 2 <= m);
    let one = SparseOperator::identity(basis);
    let mut defects = Vec::new();
    for i in 0..=n_big {
        defects.push(adj[i].multiply(&gens[i]).add_scaled(-Complex64::new(1.0, 0.0), &one));
        for j in 0..=n_big {
            if i == j {
                continue;
            }
            let ph = cis(theta.entry(i, j).to_f64());
            defects.push(gens[i].multiply(&gens[j]).add_scaled(-ph, &gens[j].multiply(&gens[i])));
            defects.push(gens[i].multiply(&adj[j]).add_scaled(-ph.conj(), &adj[j].multiply(&gens[i])));
        }
    }
    Ok(defects
        .par_iter()
        .map(|d| d.restrict_columns(interior).norm_bound())
        .reduce(|| 0.0, f64::max))
}

/// Integer data attached to a projector over the sphere.
///
/// `dimension_class` is the trace of `E` under the state sending a normal
/// word `W_p W_q^*` to `δ_{pq}`. `compact_charge` is the `(N-1)`-th
/// backward difference in `M` of `Tr(π(E)|_{H_M}) − dimension_class ·
/// dim H_M`, where `H_M` is spanned by the `e_μ` with `|μ| = M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassInvariant {
    pub dimension_class: i64,
    pub compact_charge: i64,
    pub truncations_used: Vec<u32>,
    pub residual: f64,
}

fn level_basis(slots: usize, level: u32) -> Vec<Vec<u32>> {
    fn rec(slots: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == slots {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(slots, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(slots, level, &mut Vec::with_capacity(slots), &mut out);
    out
}

/// The state `W_p W_q^* ↦ δ_{pq}` summed over the diagonal of `E`.
pub fn dimension_class(e: &ProjectorMatrix) -> Result<i64> {
    let mut total = num_complex::Complex64::new(0.0, 0.0);
    let mut exact = crate::scalar::Scalar::zero();
    for k in 0..e.size() {
        for (w, c) in e.entry(k, k).terms() {
            if w.p == w.q {
                exact = &exact + c;
                total += c.to_complex();
            }
        }
    }
    match exact.as_integer() {
        Some(d) => Ok(d),
        None => {
            let r = total.re.round();
            if (total - Complex64::new(r, 0.0)).norm() < INVARIANT_TOL && !exact.is_exact() {
                Ok(r as i64)
            } else {
                Err(Error::Precondition(format!("non-integral dimension class {total}")))
            }
        }
    }
}

/// Trace of the compression of `π(E)` to `H_M` and the max-entry defect of
/// its idempotency there.
fn level_block(e: &ProjectorMatrix, level: u32, with_residual: bool) -> Result<(Complex64, f64)> {
    let theta = e.context().theta();
    let slots = theta.size();
    let basis = level_basis(slots, level);
    let size = e.size();
    check_envelope(basis.len() * size)?;
    let index: std::collections::HashMap<&[u32], usize> =
        basis.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
    // block[(k, l)] as columns over H_M
    let mut blocks: Vec<Vec<Vec<(usize, Complex64)>>> = Vec::with_capacity(size * size);
    for k in 0..size {
        for l in 0..size {
            let x = e.entry(k, l);
            let terms: Vec<(&Monomial, Complex64)> = x.terms().iter().map(|(w, c)| (w, c.to_complex())).collect();
            let cols = basis
                .iter()
                .map(|start| {
                    let mut col = Vec::new();
                    for (w, c) in &terms {
                        let mut mu = start.clone();
                        if let Some(ph) = apply_word(theta, w, level, &mut mu) {
                            push_entry(&mut col, index[mu.as_slice()], c * ph);
                        }
                    }
                    col
                })
                .collect();
            blocks.push(cols);
        }
    }
    let mut trace = Complex64::new(0.0, 0.0);
    for k in 0..size {
        for (j, col) in blocks[k * size + k].iter().enumerate() {
            for &(r, a) in col {
                if r == j {
                    trace += a;
                }
            }
        }
    }
    if !with_residual {
        return Ok((trace, 0.0));
    }
    let mut residual = 0.0f64;
    for k in 0..size {
        for l in 0..size {
            for j in 0..basis.len() {
                let mut acc: Vec<(usize, Complex64)> = Vec::new();
                for mid in 0..size {
                    for &(t, b) in &blocks[mid * size + l][j] {
                        for &(r, a) in &blocks[k * size + mid][t] {
                            push_entry(&mut acc, r, a * b);
                        }
                    }
                }
                for &(r, a) in &blocks[k * size + l][j] {
                    push_entry(&mut acc, r, -a);
                }
                residual = acc.iter().map(|(_, a)| a.norm()).fold(residual, f64::max);
            }
        }
    }
    Ok((trace, residual))
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `Δ^{N-1}` of the level-trace defect at `M`, before rounding, and the
/// idempotency defect at level `M`.
fn raw_charge(e: &ProjectorMatrix, m: u32, d: i64) -> Result<(f64, f64)> {
    let n_big = e.context().theta().size() as u64 - 1;
    let (_, residual) = level_block(e, m, true)?;
    let order = n_big.saturating_sub(1);
    let mut acc = 0.0;
    for t in 0..=order {
        let level = m - t as u32;
        let (tr, _) = level_block(e, level, false)?;
        if tr.im.abs() > INVARIANT_TOL {
            return Err(Error::Precondition(format!("complex level trace {tr} at M = {level}")));
        }
        let dim = binomial(level as u64 + n_big, n_big) as f64;
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(order, t) as f64 * (tr.re - d as f64 * dim);
    }
    Ok((acc, residual))
}

/// Computes the class invariant of `E` at every truncation in `truncations`
/// and checks that the charge does not depend on it.
pub fn class_invariant(e: &ProjectorMatrix, truncations: &[u32]) -> Result<ClassInvariant> {
    let ctx = e.context();
    if !ctx.is_sphere() || ctx.fixed_point_data().is_some() {
        return Err(Error::WrongContext {
            expected: "a sphere algebra".into(),
            found: ctx.to_string(),
        });
    }
    if ctx.theta().mode() != TwistMode::Rational {
        return Err(Error::Precondition("class invariant needs a rational twist".into()));
    }
    if truncations.is_empty() || truncations.iter().any(|&m| m < 8) {
        return Err(Error::Precondition("truncations must be non-empty and at least 8".into()));
    }
    let d = dimension_class(e)?;
    let values = truncations
        .par_iter()
        .map(|&m| raw_charge(e, m, d))
        .collect::<Result<Vec<_>>>()?;
    let charges: Vec<f64> = values.iter().map(|v| v.0).collect();
    let residual = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let first = charges[0];
    if charges.iter().any(|c| (c - first).abs() > INVARIANT_TOL) || (first - first.round()).abs() > INVARIANT_TOL {
        return Err(Error::UnstableInvariant { values: charges });
    }
    Ok(ClassInvariant {
        dimension_class: d,
        compact_charge: first.round() as i64,
        truncations_used: truncations.to_vec(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{sphere_defect, Context};
    use crate::bundles::chern_galois_projector;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn one_slot_shift() {
        let s = fock_generator(0, 4, &ThetaMatrix::zero(1)).unwrap();
        for j in 0..4 {
            assert_eq!(s.get(j + 1, j), c(1.0));
        }
        assert!(s.column(4).is_empty());
        assert_eq!(s.nnz(), 4);
    }

    #[test]
    fn twisted_phase_on_slot_zero() {
        let theta = ThetaMatrix::random_rational(2, 3, 7).unwrap();
        let s0 = fock_generator(0, 5, &theta).unwrap();
        let b = s0.basis();
        let t = theta.entry(0, 1).to_f64();
        for mu1 in 0..=5u32 {
            let v = s0.get(b.index(&[2, mu1]), b.index(&[1, mu1]));
            assert!((v - cis(t * mu1 as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn isometry_off_top_layer() {
        let theta = ThetaMatrix::random_rational(3, 1, 5).unwrap();
        let s1 = fock_generator(1, 4, &theta).unwrap();
        let p = s1.adjoint().multiply(&s1);
        let b = p.basis();
        for j in 0..b.dim() {
            let mu = b.multi_index(j);
            let expect = if mu[1] < 4 { c(1.0) } else { c(0.0) };
            assert!((p.get(j, j) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn defect_is_vacuum_projection() {
        for theta in [ThetaMatrix::zero(3), ThetaMatrix::random_rational(3, 9, 11).unwrap()] {
            let r = represent(&sphere_defect(&theta), 4).unwrap();
            assert_eq!(r.nnz(), 1);
            assert!((r.get(0, 0) - c(1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn represent_rejects_quotients() {
        let ctx = Context::b_i(ThetaMatrix::zero(2), 0).unwrap();
        assert!(represent(&AlgebraElement::one(&ctx), 4).is_err());
    }

    #[test]
    fn level_basis_sizes() {
        assert_eq!(level_basis(1, 5), vec![vec![5]]);
        assert_eq!(level_basis(2, 3).len(), 4);
        assert_eq!(level_basis(3, 4).len(), 15);
    }

    #[test]
    fn rank_one_invariants() {
        let theta = ThetaMatrix::zero(2);
        let e = chern_galois_projector(1, 1, &theta).unwrap();
        let inv = class_invariant(&e, &[8, 12]).unwrap();
        assert_eq!((inv.dimension_class, inv.compact_charge), (1, -1));
        let e0 = chern_galois_projector(0, 1, &theta).unwrap();
        let inv0 = class_invariant(&e0, &[8]).unwrap();
        assert_eq!((inv0.dimension_class, inv0.compact_charge), (1, 0));
        assert!(class_invariant(&e0, &[4]).is_err());
    }

    #[test]
    fn envelope_is_enforced() {
        let theta = ThetaMatrix::zero(4);
        match fock_generator(0, 30, &theta) {
            Err(Error::Envelope { dim, .. }) => assert_eq!(dim, 31usize.pow(4)),
            other => panic!("{other:?}"),
        }
    }
}

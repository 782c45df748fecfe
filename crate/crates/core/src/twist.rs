//! Twist matrices and exact phase bookkeeping.
//!
//! Every unimodular scalar in the algebra is carried as an exponent `t` of
//! `e^{2πi t}`. In rational mode the exponents are exact fractions, so long
//! rewriting chains never accumulate drift; in float mode they are doubles
//! compared modulo one with a fixed tolerance.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance for comparing float-mode phase exponents modulo one.
pub const FLOAT_PHASE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwistMode {
    Rational,
    Float,
}

/// Exponent `t` of the unimodular scalar `e^{2πi t}`.
#[derive(Clone, Copy, Debug)]
pub enum PhaseExponent {
    Rational(Rational64),
    Float(f64),
}

impl PhaseExponent {
    pub fn zero(mode: TwistMode) -> Self {
        match mode {
            TwistMode::Rational => PhaseExponent::Rational(Rational64::zero()),
            TwistMode::Float => PhaseExponent::Float(0.0),
        }
    }

    pub fn mode(&self) -> TwistMode {
        match self {
            PhaseExponent::Rational(_) => TwistMode::Rational,
            PhaseExponent::Float(_) => TwistMode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            PhaseExponent::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            PhaseExponent::Float(x) => *x,
        }
    }

    /// Representative in `[0, 1)`; the represented scalar is unchanged.
    pub fn reduced(&self) -> Self {
        match self {
            PhaseExponent::Rational(r) => {
                let num = r.numer().mod_floor(r.denom());
                PhaseExponent::Rational(Rational64::new(num, *r.denom()))
            }
            PhaseExponent::Float(x) => {
                let mut y = x - x.floor();
                if y >= 1.0 {
                    y -= 1.0;
                }
                PhaseExponent::Float(y)
            }
        }
    }

    /// True when `e^{2πi t} == 1`.
    pub fn is_trivial(&self) -> bool {
        match self.reduced() {
            PhaseExponent::Rational(r) => r.is_zero(),
            PhaseExponent::Float(y) => y < FLOAT_PHASE_TOL || 1.0 - y < FLOAT_PHASE_TOL,
        }
    }

    /// True when both exponents represent the same unimodular scalar.
    pub fn same_scalar(&self, other: &Self) -> bool {
        (*self - *other).is_trivial()
    }

    pub fn half(&self) -> Self {
        match self {
            PhaseExponent::Rational(r) => PhaseExponent::Rational(r / 2),
            PhaseExponent::Float(x) => PhaseExponent::Float(x / 2.0),
        }
    }
}

impl Add for PhaseExponent {
    type Output = PhaseExponent;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (PhaseExponent::Rational(a), PhaseExponent::Rational(b)) => PhaseExponent::Rational(a + b),
            (a, b) => PhaseExponent::Float(a.to_f64() + b.to_f64()),
        }
    }
}

impl Sub for PhaseExponent {
    type Output = PhaseExponent;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PhaseExponent {
    type Output = PhaseExponent;
    fn neg(self) -> Self {
        match self {
            PhaseExponent::Rational(a) => PhaseExponent::Rational(-a),
            PhaseExponent::Float(x) => PhaseExponent::Float(-x),
        }
    }
}

impl Mul<i64> for PhaseExponent {
    type Output = PhaseExponent;
    fn mul(self, k: i64) -> Self {
        match self {
            PhaseExponent::Rational(a) => PhaseExponent::Rational(a * k),
            PhaseExponent::Float(x) => PhaseExponent::Float(x * k as f64),
        }
    }
}

impl fmt::Display for PhaseExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseExponent::Rational(r) => write!(f, "{r}"),
            PhaseExponent::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Exponent vector in `ℕ^{N+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = 1;
        MultiIndex(v)
    }

    /// `|μ| = Σ μ_i`.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn as_signed(&self) -> Vec<i64> {
        self.0.iter().map(|&x| x as i64).collect()
    }
}

impl Deref for MultiIndex {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Upper {
    Rational(Vec<Rational64>),
    Float(Vec<f64>),
}

/// Antisymmetric `(N+1)×(N+1)` twist matrix.
///
/// Only the strict upper triangle is stored, so antisymmetry and the zero
/// diagonal hold by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMatrix {
    size: usize,
    upper: Upper,
}

fn upper_index(size: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < size);
    j * size - j * (j + 1) / 2 + (k - j - 1)
}

impl ThetaMatrix {
    pub fn zero(size: usize) -> Self {
        let len = size * size.saturating_sub(1) / 2;
        ThetaMatrix {
            size,
            upper: Upper::Rational(vec![Rational64::zero(); len]),
        }
    }

    pub fn zero_float(size: usize) -> Self {
        let len = size * size.saturating_sub(1) / 2;
        ThetaMatrix {
            size,
            upper: Upper::Float(vec![0.0; len]),
        }
    }

    /// Builds a rational-mode matrix from `(j, k, θ_jk)` with `j != k`.
    /// Unlisted entries are zero; an entry given with `j > k` sets `θ_kj = -value`.
    pub fn from_rational(size: usize, entries: &[(usize, usize, Rational64)]) -> Result<Self> {
        let mut theta = ThetaMatrix::zero(size);
        for &(j, k, v) in entries {
            theta.set(j, k, PhaseExponent::Rational(v))?;
        }
        Ok(theta)
    }

    pub fn from_float(size: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut theta = ThetaMatrix::zero_float(size);
        for &(j, k, v) in entries {
            if !v.is_finite() {
                return Err(Error::InvalidTheta(format!("entry ({j},{k}) is not finite")));
            }
            theta.set(j, k, PhaseExponent::Float(v))?;
        }
        Ok(theta)
    }

    /// Builds a matrix in `mode` whose upper entries are `f(j, k)` for `j < k`.
    pub fn from_fn(
        size: usize,
        mode: TwistMode,
        mut f: impl FnMut(usize, usize) -> PhaseExponent,
    ) -> Self {
        let mut theta = match mode {
            TwistMode::Rational => ThetaMatrix::zero(size),
            TwistMode::Float => ThetaMatrix::zero_float(size),
        };
        for j in 0..size {
            for k in j + 1..size {
                let v = f(j, k);
                theta.set(j, k, v).expect("indices in range");
            }
        }
        theta
    }

    /// Preset with upper entries `a/den`, `a` uniform in `0..den`, from a
    /// seeded ChaCha stream.
    pub fn random_rational(size: usize, seed: u64, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::InvalidTheta(format!("denominator must be positive, got {den}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(ThetaMatrix::from_fn(size, TwistMode::Rational, |_, _| {
            PhaseExponent::Rational(Rational64::new(rng.gen_range(0..den), den))
        }))
    }

    fn set(&mut self, j: usize, k: usize, v: PhaseExponent) -> Result<()> {
        if j >= self.size {
            return Err(Error::IndexOutOfRange { index: j, bound: self.size });
        }
        if k >= self.size {
            return Err(Error::IndexOutOfRange { index: k, bound: self.size });
        }
        if j == k {
            if v.to_f64() != 0.0 {
                return Err(Error::InvalidTheta(format!("diagonal entry ({j},{j}) must be zero")));
            }
            return Ok(());
        }
        let (a, b, v) = if j < k { (j, k, v) } else { (k, j, -v) };
        let idx = upper_index(self.size, a, b);
        match (&mut self.upper, v) {
            (Upper::Rational(u), PhaseExponent::Rational(r)) => u[idx] = r,
            (Upper::Float(u), v) => u[idx] = v.to_f64(),
            (Upper::Rational(_), PhaseExponent::Float(_)) => {
                return Err(Error::InvalidTheta("float entry in a rational-mode matrix".into()))
            }
        }
        Ok(())
    }

    /// Number of generators `N + 1`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mode(&self) -> TwistMode {
        match self.upper {
            Upper::Rational(_) => TwistMode::Rational,
            Upper::Float(_) => TwistMode::Float,
        }
    }

    /// `θ_jk`, unreduced.
    pub fn entry(&self, j: usize, k: usize) -> PhaseExponent {
        assert!(j < self.size && k < self.size, "theta index out of range");
        if j == k {
            return PhaseExponent::zero(self.mode());
        }
        let (a, b, sign) = if j < k { (j, k, 1) } else { (k, j, -1) };
        let idx = upper_index(self.size, a, b);
        match &self.upper {
            Upper::Rational(u) => PhaseExponent::Rational(u[idx] * sign),
            Upper::Float(u) => PhaseExponent::Float(u[idx] * sign as f64),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.upper {
            Upper::Rational(u) => u.iter().all(|r| r.is_zero()),
            Upper::Float(u) => u.iter().all(|&x| x == 0.0),
        }
    }

    /// Least common denominator of the entries (rational mode only). All
    /// phases produced by the monomial calculus are multiples of `1/D`.
    pub fn denominator(&self) -> Option<u64> {
        match &self.upper {
            Upper::Rational(u) => Some(u.iter().fold(1u64, |acc, r| acc.lcm(&(*r.denom() as u64)))),
            Upper::Float(_) => None,
        }
    }

    /// Upper-triangle entries `(j, k, θ_jk)` with `j < k`, row-major.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, PhaseExponent)> + '_ {
        (0..self.size).flat_map(move |j| (j + 1..self.size).map(move |k| (j, k, self.entry(j, k))))
    }

    /// `aᵀ θ b`.
    pub fn bilinear(&self, a: &[i64], b: &[i64]) -> PhaseExponent {
        let mut acc = PhaseExponent::zero(self.mode());
        for j in 0..self.size {
            if a[j] == 0 {
                continue;
            }
            for k in 0..self.size {
                if j != k && b[k] != 0 {
                    acc = acc + self.entry(j, k) * (a[j] * b[k]);
                }
            }
        }
        acc
    }

    /// `Σ_{k>j} a_k b_j θ_kj`: the phase picked up when every slot-`j`
    /// factor of a word of charge `b` is moved left past the slot-`k`
    /// factors (`k > j`) of a word of charge `a`.
    pub fn crossing_form(&self, a: &[i64], b: &[i64]) -> PhaseExponent {
        let mut acc = PhaseExponent::zero(self.mode());
        for k in 0..self.size {
            if a[k] == 0 {
                continue;
            }
            for j in 0..k {
                if b[j] != 0 {
                    acc = acc + self.entry(k, j) * (a[k] * b[j]);
                }
            }
        }
        acc
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.size {
            Err(Error::IndexOutOfRange { index: i, bound: self.size })
        } else {
            Ok(())
        }
    }

    /// `κ_i(θ)`: `θ_ij + θ_jk + θ_ki` off row/column `i`, `θ_ij` on it.
    pub fn kappa(&self, i: usize) -> Result<ThetaMatrix> {
        self.check_index(i)?;
        Ok(ThetaMatrix::from_fn(self.size, self.mode(), |j, k| {
            if j == i || k == i {
                self.entry(j, k)
            } else {
                self.entry(i, j) + self.entry(j, k) + self.entry(k, i)
            }
        }))
    }

    /// `κ_i^{-1}(θ)`: `-θ_ij + θ_jk - θ_ki` off row/column `i`, `θ_ik` on it.
    pub fn kappa_inv(&self, i: usize) -> Result<ThetaMatrix> {
        self.check_index(i)?;
        Ok(ThetaMatrix::from_fn(self.size, self.mode(), |j, k| {
            if j == i || k == i {
                self.entry(j, k)
            } else {
                -self.entry(i, j) + self.entry(j, k) - self.entry(k, i)
            }
        }))
    }

    /// The matrix with row and column `i` removed, remaining indices
    /// renumbered in order.
    pub fn without_index(&self, i: usize) -> Result<ThetaMatrix> {
        self.check_index(i)?;
        let keep: Vec<usize> = (0..self.size).filter(|&x| x != i).collect();
        Ok(ThetaMatrix::from_fn(self.size - 1, self.mode(), |j, k| {
            self.entry(keep[j], keep[k])
        }))
    }
}

impl fmt::Display for ThetaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "θ[{}](", self.size)?;
        let mut first = true;
        for (j, k, v) in self.upper_entries() {
            if v.to_f64() == 0.0 {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{j}{k}:{v}")?;
        }
        write!(f, ")")
    }
}

/// Exponent of the 2-cocycle `c(μ, ν) = e^{πi μᵀθν}`, i.e. `μᵀθν / 2`.
pub fn cocycle_phase(theta: &ThetaMatrix, mu: &MultiIndex, nu: &MultiIndex) -> Result<PhaseExponent> {
    for idx in [mu, nu] {
        if idx.len() != theta.size() {
            return Err(Error::DimensionMismatch {
                expected: theta.size(),
                found: idx.len(),
            });
        }
    }
    Ok(theta.bilinear(&mu.as_signed(), &nu.as_signed()).half())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn abc(a: Rational64, b: Rational64, c: Rational64) -> ThetaMatrix {
        ThetaMatrix::from_rational(3, &[(0, 1, a), (0, 2, b), (1, 2, c)]).unwrap()
    }

    fn rat(p: PhaseExponent) -> Rational64 {
        match p {
            PhaseExponent::Rational(r) => r,
            PhaseExponent::Float(_) => panic!("expected rational"),
        }
    }

    #[test]
    fn antisymmetric_by_construction() {
        let t = abc(r(1, 3), r(2, 5), r(-1, 7));
        for j in 0..3 {
            assert!(rat(t.entry(j, j)).is_zero());
            for k in 0..3 {
                assert_eq!(rat(t.entry(j, k)), -rat(t.entry(k, j)));
            }
        }
        let flipped = ThetaMatrix::from_rational(3, &[(1, 0, r(1, 3))]).unwrap();
        assert_eq!(rat(flipped.entry(0, 1)), r(-1, 3));
    }

    #[test]
    fn nonzero_diagonal_rejected() {
        assert!(ThetaMatrix::from_rational(2, &[(1, 1, r(1, 2))]).is_err());
        assert!(ThetaMatrix::from_rational(2, &[(0, 2, r(1, 2))]).is_err());
    }

    #[test]
    fn cocycle_of_zero_matrix_is_trivial() {
        let t = ThetaMatrix::zero(3);
        let mu = MultiIndex(vec![1, 2, 0]);
        let nu = MultiIndex(vec![0, 3, 1]);
        assert!(cocycle_phase(&t, &mu, &nu).unwrap().is_trivial());
    }

    #[test]
    fn cocycle_on_unit_vectors_is_half_entry() {
        let t = abc(r(1, 3), r(2, 5), r(1, 7));
        for j in 0..3 {
            for k in 0..3 {
                let c = cocycle_phase(&t, &MultiIndex::unit(3, j), &MultiIndex::unit(3, k)).unwrap();
                assert_eq!(rat(c), rat(t.entry(j, k)) / 2);
            }
        }
    }

    #[test]
    fn cocycle_dimension_mismatch() {
        let t = ThetaMatrix::zero(3);
        let err = cocycle_phase(&t, &MultiIndex::zeros(2), &MultiIndex::zeros(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn kappa_zero_is_zero() {
        let t = ThetaMatrix::zero(4);
        for i in 0..4 {
            assert!(t.kappa(i).unwrap().is_zero());
            assert!(t.kappa_inv(i).unwrap().is_zero());
        }
    }

    #[test]
    fn kappa_entry_formula() {
        let (a, b, c) = (r(1, 3), r(2, 5), r(1, 7));
        let t = abc(a, b, c);
        assert_eq!(rat(t.kappa(0).unwrap().entry(1, 2)), a + c - b);
        assert_eq!(rat(t.kappa_inv(0).unwrap().entry(1, 2)), -a + c + b);
        // row i is untouched
        assert_eq!(rat(t.kappa(0).unwrap().entry(0, 2)), b);
        assert_eq!(rat(t.kappa_inv(0).unwrap().entry(0, 1)), a);
    }

    #[test]
    fn kappa_round_trip() {
        let t = ThetaMatrix::random_rational(4, 9, 11).unwrap();
        for i in 0..4 {
            assert_eq!(t.kappa(i).unwrap().kappa_inv(i).unwrap(), t);
            assert_eq!(t.kappa_inv(i).unwrap().kappa(i).unwrap(), t);
        }
    }

    #[test]
    fn kappa_index_out_of_range() {
        let t = ThetaMatrix::zero(3);
        assert_eq!(t.kappa(3).unwrap_err(), Error::IndexOutOfRange { index: 3, bound: 3 });
        assert!(t.kappa_inv(7).is_err());
    }

    #[test]
    fn reduction_mod_one() {
        let p = PhaseExponent::Rational(r(-7, 3));
        assert_eq!(rat(p.reduced()), r(2, 3));
        assert!(PhaseExponent::Rational(r(5, 1)).is_trivial());
        assert!(PhaseExponent::Float(2.0 - 1e-14).is_trivial());
        assert!(!PhaseExponent::Float(0.25).is_trivial());
    }

    #[test]
    fn denominator_lcm() {
        let t = abc(r(1, 4), r(1, 6), r(0, 1));
        assert_eq!(t.denominator(), Some(12));
        assert_eq!(ThetaMatrix::zero(3).denominator(), Some(1));
        assert_eq!(ThetaMatrix::zero_float(3).denominator(), None);
    }

    #[test]
    fn crossing_form_relates_to_bilinear() {
        let t = ThetaMatrix::random_rational(4, 3, 7).unwrap();
        let a = [1, -2, 0, 3];
        let b = [2, 1, -1, 0];
        let lhs = t.crossing_form(&a, &b) - t.crossing_form(&b, &a);
        assert_eq!(rat(lhs), rat(t.bilinear(&a, &b)));
    }

    #[test]
    fn without_index_renumbers() {
        let t = abc(r(1, 3), r(2, 5), r(1, 7));
        let s = t.without_index(1).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(rat(s.entry(0, 1)), r(2, 5));
    }
}

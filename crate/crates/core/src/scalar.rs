//! Coefficients: exact elements of a cyclotomic field, or complex doubles.
//!
//! With a rational twist every phase is a root of unity, so all
//! coefficients that arise (sums of phases, and quotients of those from the
//! linear solves) live in `Q(ζ_D)`. Storing them exactly in the power basis
//! `1, ζ, …, ζ^{φ(D)-1}` makes equality decidable, which the idempotency and
//! gluing checks rely on.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::twist::PhaseExponent;

/// Float coefficients below this modulus are dropped.
pub const FLOAT_PRUNE_TOL: f64 = 1e-14;
/// Float coefficients closer than this are considered equal.
pub const FLOAT_EQ_TOL: f64 = 1e-12;

/// Reduction data for `Q(ζ_D)`: row `k` holds `ζ^k` in the power basis.
struct FieldTable {
    degree: usize,
    powers: Vec<Vec<i64>>,
    units: Vec<u32>,
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, low degree first.
fn cyclotomic_poly(n: u32) -> Vec<i64> {
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        // den is monic
        let c = rem[k + dd];
        quot[k] = c;
        for (t, &dc) in den.iter().enumerate() {
            rem[k + t] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn build_table(order: u32) -> FieldTable {
    let phi = cyclotomic_poly(order);
    let degree = phi.len() - 1;
    let mut powers = Vec::with_capacity(order as usize);
    let mut cur = vec![0i64; degree];
    cur[0] = 1;
    for _ in 0..order {
        powers.push(cur.clone());
        // multiply by ζ and reduce with ζ^degree = -Σ phi_k ζ^k
        let top = cur[degree - 1];
        for k in (1..degree).rev() {
            cur[k] = cur[k - 1] - top * phi[k];
        }
        cur[0] = -top * phi[0];
    }
    let units = (1..=order.max(1)).filter(|a| a.gcd(&order) == 1).map(|a| a % order.max(1)).collect();
    FieldTable {
        degree,
        powers,
        units,
    }
}

fn table(order: u32) -> Arc<FieldTable> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<FieldTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("field table cache poisoned");
    guard.entry(order).or_insert_with(|| Arc::new(build_table(order))).clone()
}

/// Element of `Q(ζ_order)` in the power basis.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Cyclotomic::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Cyclotomic {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Cyclotomic::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `e^{2πi t}` for rational `t`.
    pub fn root_of_unity(t: Rational64) -> Self {
        let order = *t.denom() as u32;
        let k = t.numer().mod_floor(t.denom()) as u32;
        Cyclotomic::power(order, k, BigRational::one())
    }

    /// `c · ζ_order^k`.
    pub fn power(order: u32, k: u32, c: BigRational) -> Self {
        let tab = table(order);
        let row = &tab.powers[(k % order) as usize];
        let coeffs = row.iter().map(|&v| &c * BigInt::from(v)).collect();
        Cyclotomic { order, coeffs }.normalized()
    }

    /// Drops to `Q` when the value is rational, so rational values have a
    /// single representation.
    fn normalized(self) -> Cyclotomic {
        if self.order > 1 && self.coeffs[1..].iter().all(|c| c.is_zero()) {
            let mut coeffs = self.coeffs;
            coeffs.truncate(1);
            Cyclotomic { order: 1, coeffs }
        } else {
            self
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses `self` in `Q(ζ_order)`, `order` a multiple of `self.order`.
    fn lift(&self, order: u32) -> Cyclotomic {
        if order == self.order {
            return self.clone();
        }
        debug_assert_eq!(order % self.order, 0);
        let step = order / self.order;
        let tab = table(order);
        let mut coeffs = vec![BigRational::zero(); tab.degree];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            add_row(&mut coeffs, &tab.powers[k * step as usize % order as usize], c);
        }
        Cyclotomic { order, coeffs }
    }

    fn common(a: &Cyclotomic, b: &Cyclotomic) -> (Cyclotomic, Cyclotomic) {
        let order = a.order.lcm(&b.order);
        (a.lift(order), b.lift(order))
    }

    /// Image under `ζ ↦ ζ^a`.
    fn galois(&self, a: u32) -> Cyclotomic {
        let tab = table(self.order);
        let mut coeffs = vec![BigRational::zero(); tab.degree];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (k as u64 * a as u64 % self.order as u64) as usize;
            add_row(&mut coeffs, &tab.powers[e], c);
        }
        Cyclotomic {
            order: self.order,
            coeffs,
        }
    }

    pub fn conj(&self) -> Cyclotomic {
        if self.order <= 2 {
            return self.clone();
        }
        self.galois(self.order - 1)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Cyclotomic> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Cyclotomic::from_rational(r.recip()));
        }
        let tab = table(self.order);
        let mut cofactor = Cyclotomic::one().lift(self.order);
        for &a in &tab.units {
            if a != 1 {
                cofactor = &cofactor * &self.galois(a);
            }
        }
        let norm = (self * &cofactor)
            .as_rational()
            .expect("norm of a cyclotomic integer combination is rational");
        Some(cofactor.scale(&norm.recip()))
    }

    /// `self · e^{2πi t}`.
    pub fn mul_root(&self, t: Rational64) -> Cyclotomic {
        let d = *t.denom() as u32;
        let k = t.numer().mod_floor(t.denom()) as u32;
        if k == 0 {
            return self.clone();
        }
        let order = self.order.lcm(&d);
        let tab = table(order);
        let step = (order / self.order) as usize;
        let shift = (k * (order / d)) as usize;
        let mut coeffs = vec![BigRational::zero(); tab.degree];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                add_row(&mut coeffs, &tab.powers[(j * step + shift) % order as usize], c);
            }
        }
        Cyclotomic { order, coeffs }.normalized()
    }

    pub fn scale(&self, r: &BigRational) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
        .normalized()
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            z += Complex64::from_polar(v, TAU * k as f64 / self.order as f64);
        }
        z
    }

    /// Nonzero `(k, c)` with `self = Σ c ζ^k`, `k < φ(order)`.
    pub fn nonzero_powers(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u32, c))
    }
}

fn add_row(acc: &mut [BigRational], row: &[i64], c: &BigRational) {
    for (a, &v) in acc.iter_mut().zip(row) {
        match v {
            0 => {}
            1 => *a += c,
            -1 => *a -= c,
            _ => *a += c * BigInt::from(v),
        }
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Cyclotomic::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        if self.order == rhs.order {
            return Cyclotomic {
                order: self.order,
                coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
            }
            .normalized();
        }
        let (a, b) = Cyclotomic::common(self, rhs);
        &a + &b
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        if self.order == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.order == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        if self.order != rhs.order {
            let (a, b) = Cyclotomic::common(self, rhs);
            return &a * &b;
        }
        let tab = table(self.order);
        let mut coeffs = vec![BigRational::zero(); tab.degree];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                add_row(&mut coeffs, &tab.powers[(i + j) % self.order as usize], &(a * b));
            }
        }
        Cyclotomic {
            order: self.order,
            coeffs,
        }
        .normalized()
    }
}

/// A coefficient of an algebra element.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Cyclotomic),
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Cyclotomic::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Cyclotomic::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::Exact(Cyclotomic::from_integer(n))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(Cyclotomic::from_rational(r))
    }

    /// `e^{2πi t}`, exact for a rational exponent.
    pub fn phase(t: PhaseExponent) -> Self {
        match t {
            PhaseExponent::Rational(r) => Scalar::Exact(Cyclotomic::root_of_unity(r)),
            PhaseExponent::Float(x) => Scalar::Float(Complex64::from_polar(1.0, TAU * x)),
        }
    }

    /// `self · e^{2πi t}`.
    pub fn mul_phase(&self, t: &PhaseExponent) -> Scalar {
        match (self, t) {
            (Scalar::Exact(c), PhaseExponent::Rational(r)) => Scalar::Exact(c.mul_root(*r)),
            _ => Scalar::Float(self.to_complex() * Complex64::from_polar(1.0, TAU * t.to_f64())),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(z) => z.norm() < FLOAT_PRUNE_TOL,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.as_rational().is_some_and(|r| r.is_one()),
            Scalar::Float(z) => (z - 1.0).norm() < FLOAT_EQ_TOL,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => c.to_complex(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(c) => c.inv().map(Scalar::Exact),
            Scalar::Float(z) if z.norm() < FLOAT_PRUNE_TOL => None,
            Scalar::Float(z) => Some(Scalar::Float(z.inv())),
        }
    }

    /// Modulus of a float coefficient, or an upper-bound-free magnitude
    /// estimate for exact ones (used only for pivot choice).
    pub fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    /// The value as an integer when it is one.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Scalar::Exact(c) => c
                .as_rational()
                .filter(|r| r.is_integer())
                .and_then(|r| r.to_integer().to_i64()),
            Scalar::Float(z) => {
                let r = z.re.round();
                if (z - r).norm() < FLOAT_EQ_TOL {
                    Some(r as i64)
                } else {
                    None
                }
            }
        }
    }

    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        (self.to_complex() - other.to_complex()).norm() <= tol
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.approx_eq(other, FLOAT_EQ_TOL),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Float(self.to_complex() + rhs.to_complex()),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Float(self.to_complex() - rhs.to_complex()),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Float(self.to_complex() * rhs.to_complex()),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Scalar, Add add, Sub sub, Mul mul);
forward_owned!(Cyclotomic, Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => {
                if let Some(r) = c.as_rational() {
                    return write!(f, "{r}");
                }
                let mut first = true;
                write!(f, "(")?;
                for (k, a) in c.nonzero_powers() {
                    if !first {
                        write!(f, "{}", if a.is_negative() { " - " } else { " + " })?;
                    } else if a.is_negative() {
                        write!(f, "-")?;
                    }
                    first = false;
                    let a = a.abs();
                    match (k, a.is_one()) {
                        (0, _) => write!(f, "{a}")?,
                        (_, true) => write!(f, "z{}^{k}", c.order())?,
                        _ => write!(f, "{a}·z{}^{k}", c.order())?,
                    }
                }
                write!(f, ")")
            }
            Scalar::Float(z) => {
                if z.im.abs() < FLOAT_EQ_TOL {
                    write!(f, "{}", z.re)
                } else {
                    write!(f, "({}{:+}i)", z.re, z.im)
                }
            }
        }
    }
}

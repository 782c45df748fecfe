//! Monomial calculus for the twisted Toeplitz algebra and its quotients.
//!
//! A basis word is stored by its exponents `(p, q)` and always means the
//! canonical word `W_p W_q^*`, creations ascending and annihilations
//! descending. Internally products are computed in *slot form*
//! `∏_i w_i^{p_i} w_i^{*q_i}`, where multiplication is a single pass: the
//! letters of each slot meet only each other, and every crossing of letters
//! from different slots contributes an exactly known phase.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::twist::{MultiIndex, PhaseExponent, ThetaMatrix};

/// The canonical word `W_p W_q^*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Monomial {
    pub p: MultiIndex,
    pub q: MultiIndex,
}

impl Monomial {
    pub fn new(p: impl Into<MultiIndex>, q: impl Into<MultiIndex>) -> Self {
        let (p, q) = (p.into(), q.into());
        assert_eq!(p.len(), q.len(), "monomial exponents must have equal length");
        Monomial { p, q }
    }

    pub fn unit(len: usize) -> Self {
        Monomial::new(MultiIndex::zeros(len), MultiIndex::zeros(len))
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.p.iter().chain(self.q.iter()).all(|&x| x == 0)
    }

    /// `|p| - |q|`, the U(1) degree.
    pub fn degree(&self) -> i64 {
        self.p.total() as i64 - self.q.total() as i64
    }

    /// `|p| + |q|`, the word length.
    pub fn length(&self) -> u64 {
        self.p.total() + self.q.total()
    }

    /// `p_i - q_i`.
    pub fn slot_degree(&self, i: usize) -> i64 {
        self.p[i] as i64 - self.q[i] as i64
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial {
            p: self.q.clone(),
            q: self.p.clone(),
        }
    }

    /// Letters of the canonical word, left to right, as `(slot, starred)`.
    pub fn letters(&self) -> Vec<(usize, bool)> {
        let mut out = Vec::with_capacity(self.length() as usize);
        for (i, &e) in self.p.iter().enumerate() {
            out.extend(std::iter::repeat_n((i, false), e as usize));
        }
        for (i, &e) in self.q.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n((i, true), e as usize));
        }
        out
    }

    fn charge(&self) -> Vec<i64> {
        self.p.iter().zip(self.q.iter()).map(|(&a, &b)| a as i64 - b as i64).collect()
    }

    fn neg_charge(&self) -> Vec<i64> {
        self.p.iter().zip(self.q.iter()).map(|(&a, &b)| b as i64 - a as i64).collect()
    }
}

/// All words on `n` generators with `|p| + |q| <= max_len`, in monomial order.
pub fn monomials_up_to(n: usize, max_len: u32) -> Vec<Monomial> {
    fn compositions(slots: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for x in 0..=total {
            prefix.push(x);
            compositions(slots - 1, total - x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for len in 0..=max_len {
        let mut exps = Vec::new();
        compositions(2 * n, len, &mut Vec::new(), &mut exps);
        out.extend(exps.into_iter().map(|e| Monomial::new(e[..n].to_vec(), e[n..].to_vec())));
    }
    out.sort();
    out
}

fn revlex(a: &[u32], b: &[u32]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length()
            .cmp(&other.length())
            .then_with(|| revlex(&self.p, &other.p))
            .then_with(|| revlex(&self.q, &other.q))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Phase relating the canonical word to the slot-form word:
/// `W_p W_q^* = e^{2πi t} ∏_i w_i^{p_i} w_i^{*q_i}`.
pub(crate) fn slot_phase(theta: &ThetaMatrix, m: &Monomial) -> PhaseExponent {
    let q: Vec<i64> = m.q.as_signed();
    theta.crossing_form(&m.neg_charge(), &q)
}

/// Product of two canonical words in the full Toeplitz algebra:
/// a single canonical word and its phase.
pub(crate) fn monomial_product(theta: &ThetaMatrix, a: &Monomial, b: &Monomial) -> (Monomial, PhaseExponent) {
    let n = a.len();
    let mut p = Vec::with_capacity(n);
    let mut t = Vec::with_capacity(n);
    for i in 0..n {
        let m = a.q[i].min(b.p[i]);
        p.push(a.p[i] + b.p[i] - m);
        t.push(b.q[i] + a.q[i] - m);
    }
    let out = Monomial::new(p, t);
    let phase = slot_phase(theta, a) + slot_phase(theta, b) + theta.crossing_form(&a.charge(), &b.charge())
        - slot_phase(theta, &out);
    (out, phase)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    /// The full twisted Toeplitz algebra.
    Toeplitz,
    /// Quotient in which the generators of the listed slots are unitary
    /// (sorted, distinct). One slot is `B_i`, two are `B_ij`.
    Quotient(Vec<usize>),
    /// Quotient by the ideal generated by `∏_i (1 - w_i w_i^*)`.
    Sphere,
}

/// Marks an algebra as a fixed-point algebra `A_i` (or a quotient of one):
/// generators are labelled `v_1 … v_N`, and the twist of the context is
/// `κ_i(θ)` with row and column `i` removed.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub i: usize,
    pub ambient: Arc<ThetaMatrix>,
}

/// The algebra an element lives in.
#[derive(Clone, Debug)]
pub struct Context {
    kind: AlgebraKind,
    theta: Arc<ThetaMatrix>,
    fixed_point: Option<FixedPoint>,
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && (Arc::ptr_eq(&self.theta, &other.theta) || self.theta == other.theta)
            && self.fixed_point == other.fixed_point
    }
}

impl Context {
    pub fn new(kind: AlgebraKind, theta: impl Into<Arc<ThetaMatrix>>) -> Result<Self> {
        let theta = theta.into();
        if let AlgebraKind::Quotient(slots) = &kind {
            for w in slots.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::Precondition("unitary slots must be sorted and distinct".into()));
                }
            }
            if let Some(&s) = slots.iter().find(|&&s| s >= theta.size()) {
                return Err(Error::IndexOutOfRange {
                    index: s,
                    bound: theta.size(),
                });
            }
        }
        Ok(Context {
            kind,
            theta,
            fixed_point: None,
        })
    }

    pub fn toeplitz(theta: impl Into<Arc<ThetaMatrix>>) -> Self {
        Context::new(AlgebraKind::Toeplitz, theta).expect("toeplitz context")
    }

    pub fn sphere(theta: impl Into<Arc<ThetaMatrix>>) -> Self {
        Context::new(AlgebraKind::Sphere, theta).expect("sphere context")
    }

    /// Quotient with the given slots unitary; order does not matter.
    pub fn quotient(theta: impl Into<Arc<ThetaMatrix>>, slots: &[usize]) -> Result<Self> {
        let mut s = slots.to_vec();
        s.sort_unstable();
        for w in s.windows(2) {
            if w[0] == w[1] {
                return Err(Error::EqualIndices(w[0]));
            }
        }
        if s.is_empty() {
            return Context::new(AlgebraKind::Toeplitz, theta);
        }
        Context::new(AlgebraKind::Quotient(s), theta)
    }

    /// `B_i`: slot `i` unitary.
    pub fn b_i(theta: impl Into<Arc<ThetaMatrix>>, i: usize) -> Result<Self> {
        Context::quotient(theta, &[i])
    }

    /// `B_ij`: slots `i` and `j` unitary.
    pub fn b_ij(theta: impl Into<Arc<ThetaMatrix>>, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::EqualIndices(i));
        }
        Context::quotient(theta, &[i, j])
    }

    /// The fixed-point algebra `A_i`, a Toeplitz algebra on `N` generators.
    pub fn fixed_point(ambient: impl Into<Arc<ThetaMatrix>>, i: usize) -> Result<Self> {
        Context::fixed_point_quotient(ambient, i, None)
    }

    /// `A_i` with generator `v_label` unitary (`label` in `1..=N`), or `A_i`
    /// itself for `None`.
    pub fn fixed_point_quotient(
        ambient: impl Into<Arc<ThetaMatrix>>,
        i: usize,
        label: Option<usize>,
    ) -> Result<Self> {
        let ambient = ambient.into();
        let reduced = Arc::new(ambient.kappa(i)?.without_index(i)?);
        let kind = match label {
            None => AlgebraKind::Toeplitz,
            Some(l) if l >= 1 && l <= reduced.size() => AlgebraKind::Quotient(vec![l - 1]),
            Some(l) => {
                return Err(Error::IndexOutOfRange {
                    index: l,
                    bound: reduced.size() + 1,
                })
            }
        };
        let mut ctx = Context::new(kind, reduced)?;
        ctx.fixed_point = Some(FixedPoint { i, ambient });
        Ok(ctx)
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn theta(&self) -> &ThetaMatrix {
        &self.theta
    }

    pub fn theta_arc(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn fixed_point_data(&self) -> Option<&FixedPoint> {
        self.fixed_point.as_ref()
    }

    /// Number of generators.
    pub fn size(&self) -> usize {
        self.theta.size()
    }

    pub fn unitary_slots(&self) -> &[usize] {
        match &self.kind {
            AlgebraKind::Quotient(s) => s,
            _ => &[],
        }
    }

    pub fn is_sphere(&self) -> bool {
        self.kind == AlgebraKind::Sphere
    }

    pub fn is_toeplitz(&self) -> bool {
        self.kind == AlgebraKind::Toeplitz
    }

    /// Same twist and labelling, different quotient.
    pub fn with_kind(&self, kind: AlgebraKind) -> Result<Context> {
        let mut ctx = Context::new(kind, self.theta.clone())?;
        ctx.fixed_point = self.fixed_point.clone();
        Ok(ctx)
    }

    /// Whether `m` is in normal form here.
    pub fn is_canonical(&self, m: &Monomial) -> bool {
        if m.len() != self.size() {
            return false;
        }
        match &self.kind {
            AlgebraKind::Toeplitz => true,
            AlgebraKind::Quotient(slots) => slots.iter().all(|&s| m.p[s].min(m.q[s]) == 0),
            AlgebraKind::Sphere => !is_interior(m),
        }
    }

    /// Adds `c · e^{2πi phase} · W_p W_q^*` (a Toeplitz word) to `acc`,
    /// rewritten into the normal form of this context.
    pub(crate) fn accumulate(
        &self,
        acc: &mut BTreeMap<Monomial, Scalar>,
        m: Monomial,
        phase: PhaseExponent,
        c: &Scalar,
    ) {
        match &self.kind {
            AlgebraKind::Toeplitz => add_term(acc, m, c.mul_phase(&phase)),
            AlgebraKind::Quotient(slots) => {
                let (r, extra) = reduce_unitary(&self.theta, &m, slots);
                add_term(acc, r, c.mul_phase(&(phase + extra)));
            }
            AlgebraKind::Sphere => {
                if !is_interior(&m) {
                    add_term(acc, m, c.mul_phase(&phase));
                    return;
                }
                let base = phase + slot_phase(&self.theta, &m);
                for (r, k) in sphere_slot_normal_form(&m.p, &m.q).iter() {
                    let t = base - slot_phase(&self.theta, r);
                    add_term(acc, r.clone(), &c.mul_phase(&t) * &Scalar::from_integer(*k));
                }
            }
        }
    }

    fn label(&self, i: usize) -> String {
        match (&self.fixed_point, &self.kind) {
            (Some(_), _) => format!("v{}", i + 1),
            (None, AlgebraKind::Sphere) => format!("s{i}"),
            (None, _) => format!("w{i}"),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match &self.kind {
            AlgebraKind::Toeplitz => "T".to_string(),
            AlgebraKind::Sphere => "S".to_string(),
            AlgebraKind::Quotient(s) => {
                let idx: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                format!("B[{}]", idx.join(","))
            }
        };
        match &self.fixed_point {
            Some(fp) => write!(f, "A{}:{}{}", fp.i, base, self.theta),
            None => write!(f, "{}{}", base, self.theta),
        }
    }
}

fn add_term(acc: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get() + &c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Every slot carries at least one creation and one annihilation.
fn is_interior(m: &Monomial) -> bool {
    m.p.iter().zip(m.q.iter()).all(|(&a, &b)| a >= 1 && b >= 1)
}

/// Cancels `w w^*` pairs in unitary slots; returns the reduced word and the
/// phase such that `W_p W_q^* = e^{2πi t} W_p' W_q'^*` in the quotient.
pub(crate) fn reduce_unitary(theta: &ThetaMatrix, m: &Monomial, slots: &[usize]) -> (Monomial, PhaseExponent) {
    if slots.iter().all(|&s| m.p[s].min(m.q[s]) == 0) {
        return (m.clone(), PhaseExponent::zero(theta.mode()));
    }
    let mut r = m.clone();
    for &s in slots {
        let k = r.p[s].min(r.q[s]);
        r.p.0[s] -= k;
        r.q.0[s] -= k;
    }
    let phase = slot_phase(theta, m) - slot_phase(theta, &r);
    (r, phase)
}

type SlotForm = Rc<Vec<(Monomial, i64)>>;

thread_local! {
    static SPHERE_NF: RefCell<HashMap<Monomial, SlotForm>> = RefCell::new(HashMap::new());
}

/// Normal form of the slot-form word `∏_i w_i^{p_i} w_i^{*q_i}` modulo the
/// sphere relation, as an integer combination of slot-form words with no
/// interior word. Independent of the twist: each factor `1 - w_i w_i^*`
/// commutes exactly with the letters of the other slots.
fn sphere_slot_normal_form(p: &MultiIndex, q: &MultiIndex) -> SlotForm {
    let key = Monomial::new(p.clone(), q.clone());
    if let Some(hit) = SPHERE_NF.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let n = p.len();
    // ∏_i w_i^{p_i-1}(1 - w_i w_i^*)w_i^{*(q_i-1)} lies in the ideal; its
    // expansion expresses the full word through words with some slot lowered.
    let lead_sign: i64 = if n.is_multiple_of(2) { -1 } else { 1 };
    let mut acc: HashMap<Monomial, i64> = HashMap::new();
    for mask in 0u64..(1u64 << n) - 1 {
        let kept = mask.count_ones() as usize;
        let sign = lead_sign * if kept.is_multiple_of(2) { 1 } else { -1 };
        let mut lp = p.clone();
        let mut lq = q.clone();
        for i in 0..n {
            if mask & (1 << i) == 0 {
                lp.0[i] -= 1;
                lq.0[i] -= 1;
            }
        }
        let m = Monomial::new(lp, lq);
        if is_interior(&m) {
            for (r, k) in sphere_slot_normal_form(&m.p, &m.q).iter() {
                *acc.entry(r.clone()).or_insert(0) += sign * k;
            }
        } else {
            *acc.entry(m).or_insert(0) += sign;
        }
    }
    let mut out: Vec<(Monomial, i64)> = acc.into_iter().filter(|(_, k)| *k != 0).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    let out = Rc::new(out);
    SPHERE_NF.with(|c| c.borrow_mut().insert(key, out.clone()));
    out
}

/// A finite linear combination of canonical words in a given algebra.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    ctx: Context,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

impl AlgebraElement {
    pub fn zero(ctx: &Context) -> Self {
        AlgebraElement {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Context) -> Self {
        AlgebraElement::scalar(ctx, Scalar::one())
    }

    pub fn scalar(ctx: &Context, c: Scalar) -> Self {
        AlgebraElement::monomial(ctx, Monomial::unit(ctx.size()), c)
    }

    /// `c · W_p W_q^*`, rewritten into the normal form of `ctx`.
    pub fn monomial(ctx: &Context, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.len(), ctx.size(), "monomial length does not match context");
        let mut terms = BTreeMap::new();
        ctx.accumulate(&mut terms, m, PhaseExponent::zero(ctx.theta().mode()), &c);
        AlgebraElement { ctx: ctx.clone(), terms }
    }

    /// Sums `c · W_p W_q^*`, rewriting each word into normal form.
    pub fn from_terms(ctx: &Context, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Result<Self> {
        let mut acc = BTreeMap::new();
        let zero = PhaseExponent::zero(ctx.theta().mode());
        for (m, c) in terms {
            if m.len() != ctx.size() {
                return Err(Error::DimensionMismatch {
                    expected: ctx.size(),
                    found: m.len(),
                });
            }
            ctx.accumulate(&mut acc, m, zero, &c);
        }
        Ok(AlgebraElement { ctx: ctx.clone(), terms: acc })
    }

    /// The generator `w_i` (label `i + 1` in a fixed-point algebra).
    pub fn generator(ctx: &Context, i: usize) -> Result<Self> {
        if i >= ctx.size() {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: ctx.size(),
            });
        }
        let n = ctx.size();
        Ok(AlgebraElement::monomial(
            ctx,
            Monomial::new(MultiIndex::unit(n, i), MultiIndex::zeros(n)),
            Scalar::one(),
        ))
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Scalar> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// True for `c · 1`.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().expect("one term");
                m.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_scalar().is_some_and(|c| c.is_one())
    }

    /// Every word has U(1) degree `d`.
    pub fn is_homogeneous(&self, d: i64) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// The common degree of all words, if there is one (zero counts as
    /// homogeneous of every degree and returns `None`).
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    fn check_same(&self, other: &AlgebraElement) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.ctx.to_string(),
                right: other.ctx.to_string(),
            })
        }
    }

    pub fn checked_add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(AlgebraElement {
            ctx: self.ctx.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.checked_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> AlgebraElement {
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        let mut terms = BTreeMap::new();
        for (m, a) in &self.terms {
            add_term(&mut terms, m.clone(), a * c);
        }
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Product in the algebra of the operands.
    pub fn multiply(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        let theta = self.ctx.theta();
        let mut acc = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (m, phase) = monomial_product(theta, a, b);
                self.ctx.accumulate(&mut acc, m, phase, &(ca * cb));
            }
        }
        Ok(AlgebraElement {
            ctx: self.ctx.clone(),
            terms: acc,
        })
    }

    pub fn pow(&self, e: u32) -> AlgebraElement {
        let mut acc = AlgebraElement::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The involution: `(c W_p W_q^*)^* = c̄ W_q W_p^*`.
    pub fn star(&self) -> AlgebraElement {
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.adjoint(), c.conj())).collect(),
        }
    }

    /// Reinterprets the words of `self` in `target` (same number of
    /// generators), rewriting into its normal form. This is the quotient map
    /// when `target` is a quotient of the algebra of `self`.
    pub(crate) fn reduce_into(&self, target: &Context) -> AlgebraElement {
        let zero = PhaseExponent::zero(target.theta().mode());
        let mut acc = BTreeMap::new();
        for (m, c) in &self.terms {
            target.accumulate(&mut acc, m.clone(), zero, c);
        }
        AlgebraElement {
            ctx: target.clone(),
            terms: acc,
        }
    }

    /// Same words and coefficients, relabelled as an element of `target`.
    /// Only meaningful when both contexts share normal forms.
    pub(crate) fn relabel(&self, target: &Context) -> AlgebraElement {
        AlgebraElement {
            ctx: target.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Terms of U(1) degree `d`.
    pub fn degree_part(&self, d: i64) -> AlgebraElement {
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficient-wise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &AlgebraElement, tol: f64) -> bool {
        if self.ctx != other.ctx {
            return false;
        }
        let zero = Scalar::zero();
        let keys: std::collections::BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|m| {
            let a = self.terms.get(m).unwrap_or(&zero);
            let b = other.terms.get(m).unwrap_or(&zero);
            a.approx_eq(b, tol)
        })
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}

/// Extends an assignment of generator images to a homomorphism on words:
/// `W_p W_q^*` goes to the corresponding product of images and their
/// adjoints, multiplied out in `target`. Linear in the coefficients.
pub fn extend_hom(x: &AlgebraElement, images: &[AlgebraElement], target: &Context) -> Result<AlgebraElement> {
    if images.len() != x.context().size() {
        return Err(Error::DimensionMismatch {
            expected: x.context().size(),
            found: images.len(),
        });
    }
    if let Some(bad) = images.iter().find(|im| im.context() != target) {
        return Err(Error::WrongContext {
            expected: target.to_string(),
            found: bad.context().to_string(),
        });
    }
    let stars: Vec<AlgebraElement> = images.iter().map(|im| im.star()).collect();
    let mut cache: HashMap<(usize, bool, u32), AlgebraElement> = HashMap::new();
    let mut power = |k: usize, star: bool, e: u32| -> AlgebraElement {
        cache
            .entry((k, star, e))
            .or_insert_with(|| if star { stars[k].pow(e) } else { images[k].pow(e) })
            .clone()
    };
    let mut out = AlgebraElement::zero(target);
    for (m, c) in x.terms() {
        let mut word = AlgebraElement::scalar(target, c.clone());
        for (k, &e) in m.p.iter().enumerate() {
            if e > 0 {
                word = word.multiply(&power(k, false, e))?;
            }
        }
        for (k, &e) in m.q.iter().enumerate().rev() {
            if e > 0 {
                word = word.multiply(&power(k, true, e))?;
            }
        }
        out = out.checked_add(&word)?;
    }
    Ok(out)
}

/// `R = ∏_i (1 - w_i w_i^*)` expanded in the Toeplitz algebra.
pub fn sphere_defect(theta: &ThetaMatrix) -> AlgebraElement {
    let ctx = Context::toeplitz(theta.clone());
    let n = theta.size();
    let terms = (0u64..1 << n).map(|mask| {
        let ones: Vec<u32> = (0..n).map(|i| ((mask >> i) & 1) as u32).collect();
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        (Monomial::new(ones.clone(), ones), Scalar::from_integer(sign))
    });
    AlgebraElement::from_terms(&ctx, terms).expect("lengths match")
}

/// The matrix unit `W_p R W_q^*` of the compact ideal, in the Toeplitz algebra.
pub fn compact_matrix_unit(p: &MultiIndex, q: &MultiIndex, theta: &ThetaMatrix) -> Result<AlgebraElement> {
    for idx in [p, q] {
        if idx.len() != theta.size() {
            return Err(Error::DimensionMismatch {
                expected: theta.size(),
                found: idx.len(),
            });
        }
    }
    let ctx = Context::toeplitz(theta.clone());
    let n = theta.size();
    let left = AlgebraElement::monomial(&ctx, Monomial::new(p.clone(), MultiIndex::zeros(n)), Scalar::one());
    let right = AlgebraElement::monomial(&ctx, Monomial::new(MultiIndex::zeros(n), q.clone()), Scalar::one());
    let r = sphere_defect(theta).relabel(&ctx);
    Ok(&(&left * &r) * &right)
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    /// Panics if the contexts differ; see [`AlgebraElement::checked_add`].
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.checked_add(rhs).expect("context mismatch in addition")
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.checked_sub(rhs).expect("context mismatch in subtraction")
    }
}

impl<'a> Mul<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    /// Panics if the contexts differ; see [`AlgebraElement::multiply`].
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.multiply(rhs).expect("context mismatch in multiplication")
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.neg_ref()
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        &self + &rhs
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl Mul for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: AlgebraElement) -> AlgebraElement {
        &self * &rhs
    }
}

fn write_word(f: &mut fmt::Formatter<'_>, ctx: &Context, m: &Monomial) -> fmt::Result {
    if m.is_unit() {
        return write!(f, "1");
    }
    let mut parts = Vec::new();
    for (i, &e) in m.p.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(ctx.label(i)),
            _ => parts.push(format!("{}^{e}", ctx.label(i))),
        }
    }
    for (i, &e) in m.q.iter().enumerate().rev() {
        match e {
            0 => {}
            1 => parts.push(format!("{}*", ctx.label(i))),
            _ => parts.push(format!("{}*^{e}", ctx.label(i))),
        }
    }
    write!(f, "{}", parts.join(" "))
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.as_integer().is_some_and(|k| k < 0);
            let mag = if neg { -c } else { c.clone() };
            if idx > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if mag.is_one() {
                write_word(f, &self.ctx, m)?;
            } else if m.is_unit() {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag} ")?;
                write_word(f, &self.ctx, m)?;
            }
        }
        Ok(())
    }
}

//! JSON encodings of twists, elements, tuples, tensors and projectors.
//!
//! Exact coefficients are written once per nonzero power `ζ_D^k` of their
//! power-basis expansion, with the amplitude as an exact `"amp"` string next
//! to the floating `re`/`im` preview. Decoders report the path of the
//! offending field.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraKind, Context, Monomial};
use crate::bundles::{ElementMatrix, ProjectorMatrix, TensorElement};
use crate::error::{Error, Result};
use crate::quotient::MultipullbackTuple;
use crate::scalar::{Cyclotomic, Scalar};
use crate::twist::{MultiIndex, PhaseExponent, ThetaMatrix, TwistMode};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaWire {
    n: usize,
    mode: String,
    upper: Vec<Vec<serde_json::Number>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixedPointWire {
    i: usize,
    ambient: ThetaWire,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextWire {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    unitary: Vec<usize>,
    theta: ThetaWire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fixed_point: Option<FixedPointWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermWire {
    p: Vec<u32>,
    q: Vec<u32>,
    re: f64,
    im: f64,
    phase_num: i64,
    phase_den: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amp: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementWire {
    context: ContextWire,
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleWire {
    theta: ThetaWire,
    components: Vec<ElementWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummandWire {
    left: ElementWire,
    right: ElementWire,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorWire {
    context: ContextWire,
    summands: Vec<SummandWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectorWire {
    n: i64,
    size: usize,
    context: ContextWire,
    entries: Vec<Vec<ElementWire>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    gamma: Vec<ElementWire>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    beta: Vec<ElementWire>,
}

fn parse<T: DeserializeOwned>(s: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(s);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(path, e.into_inner().to_string())
    })
}

fn render<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("wire types serialize")
}

fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() || prefix == "." {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

// Twist matrices.

fn theta_wire(theta: &ThetaMatrix) -> ThetaWire {
    let upper = theta
        .upper_entries()
        .map(|(j, k, v)| match v {
            PhaseExponent::Rational(r) => vec![j.into(), k.into(), (*r.numer()).into(), (*r.denom()).into()],
            PhaseExponent::Float(x) => vec![
                j.into(),
                k.into(),
                serde_json::Number::from_f64(x).unwrap_or_else(|| 0.into()),
            ],
        })
        .collect();
    ThetaWire {
        n: theta.size(),
        mode: match theta.mode() {
            TwistMode::Rational => "rational",
            TwistMode::Float => "float",
        }
        .into(),
        upper,
    }
}

fn index_field(x: &serde_json::Number, path: &str) -> Result<usize> {
    x.as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::schema(path, "expected a non-negative integer index"))
}

fn theta_from_wire(w: &ThetaWire, path: &str) -> Result<ThetaMatrix> {
    let mode = match w.mode.as_str() {
        "rational" => TwistMode::Rational,
        "float" => TwistMode::Float,
        other => return Err(Error::schema(join(path, "mode"), format!("unknown mode `{other}`"))),
    };
    let mut rational = Vec::new();
    let mut float = Vec::new();
    for (idx, row) in w.upper.iter().enumerate() {
        let at = join(path, &format!("upper[{idx}]"));
        let want = if mode == TwistMode::Rational { 4 } else { 3 };
        if row.len() != want {
            return Err(Error::schema(at, format!("expected {want} numbers, found {}", row.len())));
        }
        let j = index_field(&row[0], &format!("{at}[0]"))?;
        let k = index_field(&row[1], &format!("{at}[1]"))?;
        if j >= w.n || k >= w.n {
            return Err(Error::schema(at, format!("index out of range for n = {}", w.n)));
        }
        if j == k {
            return Err(Error::schema(at, "diagonal entries are not stored"));
        }
        if mode == TwistMode::Rational {
            let num = row[2]
                .as_i64()
                .ok_or_else(|| Error::schema(format!("{at}[2]"), "expected an integer numerator"))?;
            let den = row[3]
                .as_i64()
                .ok_or_else(|| Error::schema(format!("{at}[3]"), "expected an integer denominator"))?;
            if den == 0 {
                return Err(Error::schema(format!("{at}[3]"), "denominator must be nonzero"));
            }
            rational.push((j, k, Rational64::new(num, den)));
        } else {
            let x = row[2]
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::schema(format!("{at}[2]"), "expected a finite number"))?;
            float.push((j, k, x));
        }
    }
    let theta = match mode {
        TwistMode::Rational => ThetaMatrix::from_rational(w.n, &rational),
        TwistMode::Float => ThetaMatrix::from_float(w.n, &float),
    };
    theta.map_err(|e| Error::schema(join(path, "upper"), e.to_string()))
}

pub fn theta_to_string(theta: &ThetaMatrix) -> String {
    render(&theta_wire(theta))
}

pub fn theta_from_str(s: &str) -> Result<ThetaMatrix> {
    theta_from_wire(&parse::<ThetaWire>(s)?, "")
}

// Contexts and elements.

fn context_wire(ctx: &Context) -> ContextWire {
    let (kind, unitary) = match ctx.kind() {
        AlgebraKind::Toeplitz => ("toeplitz", Vec::new()),
        AlgebraKind::Sphere => ("sphere", Vec::new()),
        AlgebraKind::Quotient(s) => ("quotient", s.clone()),
    };
    ContextWire {
        kind: kind.into(),
        unitary,
        theta: theta_wire(ctx.theta()),
        fixed_point: ctx.fixed_point_data().map(|fp| FixedPointWire {
            i: fp.i,
            ambient: theta_wire(&fp.ambient),
        }),
    }
}

fn context_from_wire(w: &ContextWire, path: &str) -> Result<Context> {
    let theta = theta_from_wire(&w.theta, &join(path, "theta"))?;
    let kind = match w.kind.as_str() {
        "toeplitz" | "sphere" if !w.unitary.is_empty() => {
            return Err(Error::schema(join(path, "unitary"), "only quotient contexts list unitary slots"))
        }
        "toeplitz" => AlgebraKind::Toeplitz,
        "sphere" => AlgebraKind::Sphere,
        "quotient" if w.unitary.is_empty() => {
            return Err(Error::schema(join(path, "unitary"), "quotient needs at least one unitary slot"))
        }
        "quotient" => AlgebraKind::Quotient(w.unitary.clone()),
        other => return Err(Error::schema(join(path, "kind"), format!("unknown kind `{other}`"))),
    };
    let ctx = match &w.fixed_point {
        None => Context::new(kind, theta),
        Some(fp) => {
            let fp_path = join(path, "fixed_point");
            let ambient = theta_from_wire(&fp.ambient, &join(&fp_path, "ambient"))?;
            let base = Context::fixed_point(ambient, fp.i).map_err(|e| Error::schema(&fp_path, e.to_string()))?;
            if *base.theta() != theta {
                return Err(Error::schema(
                    join(path, "theta"),
                    "twist does not match the fixed-point data",
                ));
            }
            base.with_kind(kind)
        }
    };
    ctx.map_err(|e| Error::schema(path, e.to_string()))
}

fn term_wires(m: &Monomial, c: &Scalar, out: &mut Vec<TermWire>) {
    match c {
        Scalar::Exact(z) => {
            let d = z.order();
            for (k, a) in z.nonzero_powers() {
                let t = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
                let amp = a.to_f64().unwrap_or(f64::NAN);
                out.push(TermWire {
                    p: m.p.0.clone(),
                    q: m.q.0.clone(),
                    re: amp * t.cos(),
                    im: amp * t.sin(),
                    phase_num: k as i64,
                    phase_den: d as i64,
                    amp: Some(a.to_string()),
                });
            }
        }
        Scalar::Float(z) => out.push(TermWire {
            p: m.p.0.clone(),
            q: m.q.0.clone(),
            re: z.re,
            im: z.im,
            phase_num: 0,
            phase_den: 1,
            amp: None,
        }),
    }
}

fn element_wire(x: &AlgebraElement) -> ElementWire {
    let mut terms = Vec::new();
    for (m, c) in x.terms() {
        term_wires(m, c, &mut terms);
    }
    ElementWire {
        context: context_wire(x.context()),
        terms,
    }
}

fn parse_amp(s: &str, path: &str) -> Result<BigRational> {
    let bad = || Error::schema(path, format!("`{s}` is not an exact rational"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::schema(path, "amplitude denominator must be nonzero"));
    }
    Ok(BigRational::new(num, den))
}

fn term_scalar(t: &TermWire, mode: TwistMode, path: &str) -> Result<Scalar> {
    if t.phase_den == 0 {
        return Err(Error::schema(join(path, "phase_den"), "denominator must be nonzero"));
    }
    if !(t.re.is_finite() && t.im.is_finite()) {
        return Err(Error::schema(path, "coefficient must be finite"));
    }
    match (mode, &t.amp) {
        (TwistMode::Rational, Some(a)) => {
            let amp = parse_amp(a, &join(path, "amp"))?;
            let phase = Rational64::new(t.phase_num, t.phase_den);
            let order = u32::try_from(*phase.denom())
                .map_err(|_| Error::schema(join(path, "phase_den"), "phase denominator too large"))?;
            let k = phase.numer().rem_euclid(*phase.denom()) as u32;
            Ok(Scalar::Exact(Cyclotomic::power(order, k, amp)))
        }
        (TwistMode::Rational, None) if t.phase_num.rem_euclid(t.phase_den) == 0 && t.im == 0.0 => {
            // unannotated real coefficients are read as their exact binary value
            BigRational::from_float(t.re)
                .map(|r| Scalar::Exact(Cyclotomic::from_rational(r)))
                .ok_or_else(|| Error::schema(join(path, "re"), "not representable"))
        }
        (TwistMode::Rational, None) => Err(Error::schema(
            join(path, "amp"),
            "exact coefficients with a phase need an `amp` field",
        )),
        (TwistMode::Float, _) => Ok(Scalar::Float(num_complex::Complex64::new(t.re, t.im))),
    }
}

fn element_from_wire(w: &ElementWire, path: &str) -> Result<AlgebraElement> {
    let ctx = context_from_wire(&w.context, &join(path, "context"))?;
    element_in(&ctx, w, path)
}

fn element_in(ctx: &Context, w: &ElementWire, path: &str) -> Result<AlgebraElement> {
    let mode = ctx.theta().mode();
    let mut terms = Vec::with_capacity(w.terms.len());
    for (idx, t) in w.terms.iter().enumerate() {
        let at = join(path, &format!("terms[{idx}]"));
        if t.p.len() != ctx.size() || t.q.len() != ctx.size() {
            return Err(Error::schema(
                at,
                format!("exponent vectors must have length {}", ctx.size()),
            ));
        }
        let c = term_scalar(t, mode, &at)?;
        terms.push((Monomial::new(MultiIndex::from(t.p.clone()), MultiIndex::from(t.q.clone())), c));
    }
    AlgebraElement::from_terms(ctx, terms).map_err(|e| Error::schema(path, e.to_string()))
}

fn element_in_checked(ctx: &Context, w: &ElementWire, path: &str) -> Result<AlgebraElement> {
    let own = context_from_wire(&w.context, &join(path, "context"))?;
    if own != *ctx {
        return Err(Error::schema(join(path, "context"), "element lives in a different algebra"));
    }
    element_in(ctx, w, path)
}

pub fn element_to_string(x: &AlgebraElement) -> String {
    render(&element_wire(x))
}

pub fn element_to_value(x: &AlgebraElement) -> serde_json::Value {
    serde_json::to_value(element_wire(x)).expect("wire types serialize")
}

pub fn element_from_str(s: &str) -> Result<AlgebraElement> {
    element_from_wire(&parse::<ElementWire>(s)?, "")
}

// Tuples.

pub fn tuple_to_string(t: &MultipullbackTuple) -> String {
    render(&TupleWire {
        theta: theta_wire(t.theta()),
        components: t.components().iter().map(element_wire).collect(),
    })
}

pub fn tuple_from_str(s: &str) -> Result<MultipullbackTuple> {
    let w: TupleWire = parse(s)?;
    let theta = Arc::new(theta_from_wire(&w.theta, "theta")?);
    let components = w
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let path = format!("components[{i}]");
            let ctx = Context::b_i(theta.clone(), i).map_err(|e| Error::schema(&path, e.to_string()))?;
            element_in_checked(&ctx, c, &path)
        })
        .collect::<Result<Vec<_>>>()?;
    MultipullbackTuple::new(theta, components).map_err(|e| Error::schema("components", e.to_string()))
}

// Tensors.

fn tensor_wire(t: &TensorElement) -> TensorWire {
    TensorWire {
        context: context_wire(t.context()),
        summands: t
            .summands()
            .iter()
            .map(|(a, r)| SummandWire {
                left: element_wire(a),
                right: element_wire(r),
            })
            .collect(),
    }
}

pub fn tensor_to_string(t: &TensorElement) -> String {
    render(&tensor_wire(t))
}

pub fn tensor_to_value(t: &TensorElement) -> serde_json::Value {
    serde_json::to_value(tensor_wire(t)).expect("wire types serialize")
}

pub fn tensor_from_str(s: &str) -> Result<TensorElement> {
    let w: TensorWire = parse(s)?;
    let ctx = context_from_wire(&w.context, "context")?;
    let pairs = w
        .summands
        .iter()
        .enumerate()
        .map(|(i, sw)| {
            let at = format!("summands[{i}]");
            Ok((
                element_in_checked(&ctx, &sw.left, &join(&at, "left"))?,
                element_in_checked(&ctx, &sw.right, &join(&at, "right"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    TensorElement::new(&ctx, pairs).map_err(|e| Error::schema("summands", e.to_string()))
}

// Projectors.

fn projector_wire(e: &ProjectorMatrix) -> ProjectorWire {
    ProjectorWire {
        n: e.n,
        size: e.size(),
        context: context_wire(e.context()),
        entries: e
            .matrix
            .entries()
            .iter()
            .map(|row| row.iter().map(element_wire).collect())
            .collect(),
        gamma: e.gamma.iter().map(element_wire).collect(),
        beta: e.beta.iter().map(element_wire).collect(),
    }
}

pub fn projector_to_string(e: &ProjectorMatrix) -> String {
    render(&projector_wire(e))
}

pub fn projector_to_value(e: &ProjectorMatrix) -> serde_json::Value {
    serde_json::to_value(projector_wire(e)).expect("wire types serialize")
}

pub fn projector_from_str(s: &str) -> Result<ProjectorMatrix> {
    let w: ProjectorWire = parse(s)?;
    let ctx = context_from_wire(&w.context, "context")?;
    if w.entries.len() != w.size {
        return Err(Error::schema("entries", format!("expected {} rows, found {}", w.size, w.entries.len())));
    }
    let mut rows = Vec::with_capacity(w.size);
    for (k, row) in w.entries.iter().enumerate() {
        if row.len() != w.size {
            return Err(Error::schema(
                format!("entries[{k}]"),
                format!("expected {} columns, found {}", w.size, row.len()),
            ));
        }
        rows.push(
            row.iter()
                .enumerate()
                .map(|(l, x)| element_in_checked(&ctx, x, &format!("entries[{k}][{l}]")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let vector = |v: &[ElementWire], name: &str| -> Result<Vec<AlgebraElement>> {
        if !v.is_empty() && v.len() != w.size {
            return Err(Error::schema(name, format!("expected {} elements, found {}", w.size, v.len())));
        }
        v.iter()
            .enumerate()
            .map(|(i, x)| element_in_checked(&ctx, x, &format!("{name}[{i}]")))
            .collect()
    };
    let gamma = vector(&w.gamma, "gamma")?;
    let beta = vector(&w.beta, "beta")?;
    if gamma.is_empty() != beta.is_empty() {
        return Err(Error::schema("beta", "gamma and beta must be given together"));
    }
    Ok(ProjectorMatrix {
        n: w.n,
        matrix: ElementMatrix::from_rows(&ctx, rows).map_err(|e| Error::schema("entries", e.to_string()))?,
        gamma,
        beta,
    })
}

//! JSON schemas for the wire formats and their conversions to the core
//! types.
//!
//! Inner functions are encoded as
//!
//! ```json
//! {"constant":{"re":1.0,"im":0.0},"zeros":[{"re":0.5,"im":0.0,"mult":2}]}
//! ```
//!
//! or, for a composition `u ∘ B`, `{"compose":{"u":{...},"B":{...}}}`.
//! Polynomials are coefficient arrays ascending by degree; matrices are
//! row-major arrays of `{re, im}` entries.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use ttored_core::blaschke::{BlaschkeProduct, InnerFunction, PsiFactor};
use ttored_core::charfn::{BiInnerReport, CharFnMethod, CharFnSample};
use ttored_core::matrix::CMatrix;
use ttored_core::poly::ComplexPolynomial;
use ttored_core::reduce::{ReducibilityReport, ReducibilityWitness, Verdict};
use ttored_core::{Complex64, Error as CoreError};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComplexDto {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexDto {
    fn from(z: Complex64) -> Self {
        ComplexDto { re: z.re, im: z.im }
    }
}

impl From<ComplexDto> for Complex64 {
    fn from(d: ComplexDto) -> Self {
        Complex64::new(d.re, d.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroDto {
    pub re: f64,
    pub im: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub mult: usize,
}

fn one() -> usize {
    1
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_one(m: &usize) -> bool {
    *m == 1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlaschkeDto {
    pub constant: ComplexDto,
    pub zeros: Vec<ZeroDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComposeDto {
    pub u: BlaschkeDto,
    #[serde(rename = "B")]
    pub b: BlaschkeDto,
}

/// An inner function: either a plain Blaschke product or `u ∘ B`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InnerFunctionDto {
    Composed { compose: ComposeDto },
    Atomic(BlaschkeDto),
}

/// Either an inner-function spec or `{"power": N}` for `B = z^N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BSpec {
    Power { power: usize },
    Inner(InnerFunctionDto),
}

pub fn blaschke_from_dto(dto: &BlaschkeDto) -> Result<BlaschkeProduct, CoreError> {
    let mut zeros = Vec::new();
    for z in &dto.zeros {
        for _ in 0..z.mult.max(1) {
            zeros.push(Complex64::new(z.re, z.im));
        }
    }
    BlaschkeProduct::new(Complex64::new(dto.constant.re, dto.constant.im), zeros)
}

pub fn inner_from_dto(dto: &InnerFunctionDto) -> Result<InnerFunction, CoreError> {
    match dto {
        InnerFunctionDto::Atomic(b) => Ok(InnerFunction::atomic(blaschke_from_dto(b)?)),
        InnerFunctionDto::Composed { compose } => Ok(ttored_core::blaschke::compose(
            blaschke_from_dto(&compose.u)?,
            blaschke_from_dto(&compose.b)?,
        )),
    }
}

/// Sort by `(re, im)` and group exactly-equal values into multiplicity
/// entries.
pub fn group_zeros(zs: &[Complex64]) -> Vec<ZeroDto> {
    let mut zeros: Vec<Complex64> = zs.to_vec();
    zeros.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite by construction")
    });
    let mut grouped: Vec<ZeroDto> = Vec::new();
    for z in zeros {
        if let Some(last) = grouped.last_mut() {
            if last.re.to_bits() == z.re.to_bits() && last.im.to_bits() == z.im.to_bits() {
                last.mult += 1;
                continue;
            }
        }
        grouped.push(ZeroDto {
            re: z.re,
            im: z.im,
            mult: 1,
        });
    }
    grouped
}

/// Canonical DTO: zeros sorted and grouped into multiplicity entries.
pub fn dto_from_blaschke(b: &BlaschkeProduct) -> BlaschkeDto {
    BlaschkeDto {
        constant: b.constant().into(),
        zeros: group_zeros(b.zeros()),
    }
}

pub fn dto_from_inner(f: &InnerFunction) -> InnerFunctionDto {
    match f {
        InnerFunction::Atomic(b) => InnerFunctionDto::Atomic(dto_from_blaschke(b)),
        InnerFunction::Composed { outer, inner } => InnerFunctionDto::Composed {
            compose: ComposeDto {
                u: dto_from_blaschke(outer),
                b: dto_from_blaschke(inner),
            },
        },
    }
}

pub fn poly_from_dto(coeffs: &[ComplexDto]) -> ComplexPolynomial {
    ComplexPolynomial::new(coeffs.iter().map(|&c| c.into()).collect())
}

pub fn dto_from_poly(p: &ComplexPolynomial) -> Vec<ComplexDto> {
    p.coeffs().iter().map(|&c| c.into()).collect()
}

pub fn complex_value(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

/// Row-major matrix encoding: `{"k": n, "entries": [{re, im}, ...]}`.
pub fn matrix_value(m: &CMatrix) -> Value {
    let entries: Vec<Value> = m.data().iter().map(|&z| complex_value(z)).collect();
    json!({"k": m.rows(), "entries": entries})
}

pub fn blaschke_value(b: &BlaschkeProduct) -> Value {
    serde_json::to_value(dto_from_blaschke(b)).expect("blaschke serializes")
}

fn witness_value(w: &ReducibilityWitness) -> Value {
    json!({
        "u": blaschke_value(&w.u),
        "b1": blaschke_value(&w.b1),
        "b2": blaschke_value(&w.b2),
        "h1": serde_json::to_value(dto_from_poly(&w.h1)).expect("poly serializes"),
        "h2": serde_json::to_value(dto_from_poly(&w.h2)).expect("poly serializes"),
        "residual": w.residual,
    })
}

fn psi_value(p: &PsiFactor) -> Value {
    json!({
        "alpha": complex_value(p.alpha),
        "indices": p.indices,
        "n": p.n,
    })
}

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Reducible => "reducible",
        Verdict::Irreducible => "irreducible",
        Verdict::UndecidedNumeric => "undecided-numeric",
    }
}

pub fn report_value(r: &ReducibilityReport) -> Value {
    let groups: Vec<Value> = r
        .groups
        .iter()
        .map(|g| {
            let members =
                serde_json::to_value(dto_from_blaschke(
                    &BlaschkeProduct::with_margin(Complex64::new(1.0, 0.0), g.members.clone(), 0.0)
                        .expect("members are disc-interior"),
                ).zeros)
                .expect("members serialize");
            json!({
                "beta": complex_value(g.beta),
                "members": members,
                "k": g.k,
                "completion_cost": g.completion_cost,
                "discard_cost": g.discard_cost,
            })
        })
        .collect();
    json!({
        "verdict": verdict_str(r.verdict),
        "witness": r.witness.as_ref().map(witness_value),
        "groups": groups,
        "criterion": {
            "sum_of_mins": r.criterion.sum_of_mins,
            "budget": r.criterion.budget,
            "total_cost": r.criterion.total_cost,
            "margin": r.criterion.margin,
        },
        "psi_factors": r.psi_factors.as_ref().map(|ps| {
            ps.iter().map(psi_value).collect::<Vec<_>>()
        }),
        "gu_condition": r.gu_condition,
    })
}

/// Characteristic-function sample with the basis ordering that makes the
/// matrix reproducible.
pub fn charfn_value(s: &CharFnSample, basis: Option<(&[Complex64], usize)>) -> Value {
    let method = match s.method {
        CharFnMethod::Quadrature => "quadrature",
        CharFnMethod::Polyphase => "polyphase",
    };
    let basis_value = match basis {
        Some((zeros, grid_m)) => {
            let ordered: Vec<Value> = zeros.iter().map(|&z| complex_value(z)).collect();
            json!({"ordered_zeros": ordered, "grid_m": grid_m})
        }
        None => json!({
            "ordered_zeros": (0..s.matrix.dim()).map(|_| complex_value(Complex64::new(0.0, 0.0))).collect::<Vec<_>>(),
            "grid_m": Value::Null,
        }),
    };
    json!({
        "lambda": complex_value(s.lam),
        "method": method,
        "matrix": matrix_value(&s.matrix.entries),
        "basis": basis_value,
    })
}

pub fn bi_inner_value(r: &BiInnerReport) -> Value {
    let samples: Vec<Value> = r
        .samples
        .iter()
        .map(|s| {
            json!({
                "lambda": complex_value(s.lam),
                "sigma_min": s.sigma_min,
                "sigma_max": s.sigma_max,
            })
        })
        .collect();
    json!({
        "samples": samples,
        "max_unit_deviation": r.max_unit_deviation,
    })
}

/// Pretty JSON with sorted keys (serde_json maps are BTree-backed) and a
/// trailing newline; byte-identical for identical values.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

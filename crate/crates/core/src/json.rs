//! JSON interchange formats for fields, functions, verdicts and recipes.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::constructions::ConstructionRecipe;
use crate::derivative::GapnVerdict;
use crate::field::{field_from_spec, Field, FieldElem, FieldError, FieldSpec};
use crate::poly::{PolyError, SparsePoly};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: u64,
    pub coeff: Vec<i64>,
}

/// `{"field": {...}, "terms": [{"exp": .., "coeff": [..]}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub field: FieldSpec,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub is_gapn: bool,
    pub worst_fiber: u64,
    pub witness: Option<WitnessJson>,
}

pub fn elem_json(k: &Field, y: FieldElem) -> Vec<u32> {
    k.coeffs(y)
}

pub fn function_json(f: &SparsePoly) -> FunctionJson {
    let k = f.field();
    FunctionJson {
        field: k.spec(),
        terms: f
            .terms()
            .iter()
            .map(|&(exp, c)| TermJson {
                exp,
                coeff: k.coeffs(c).into_iter().map(i64::from).collect(),
            })
            .collect(),
    }
}

/// Reads a function, constructing its field under the given table cap.
pub fn function_from_json(fj: &FunctionJson, cap: u64) -> Result<SparsePoly, JsonError> {
    let k = field_from_spec(&fj.field, cap)?;
    function_in_field(&k, &fj.terms)
}

pub fn function_in_field(k: &Field, terms: &[TermJson]) -> Result<SparsePoly, JsonError> {
    let terms = terms
        .iter()
        .map(|t| Ok((t.exp, k.from_coeffs(&t.coeff)?)))
        .collect::<Result<Vec<_>, FieldError>>()?;
    Ok(SparsePoly::new(k, terms)?)
}

pub fn parse_function(text: &str, cap: u64) -> Result<SparsePoly, JsonError> {
    let fj: FunctionJson = serde_json::from_str(text)?;
    function_from_json(&fj, cap)
}

pub fn verdict_json(k: &Field, v: &GapnVerdict) -> VerdictJson {
    VerdictJson {
        is_gapn: v.is_gapn,
        worst_fiber: v.worst_fiber,
        witness: v.witness.as_ref().map(|w| WitnessJson {
            a: k.coeffs(w.a),
            b: k.coeffs(w.b),
        }),
    }
}

/// `{"family": .., "p": .., "params": {...}, "degree": ..}`.
pub fn recipe_json(r: &ConstructionRecipe) -> Value {
    let k = r.result.field();
    let mut params = Map::new();
    let p = &r.params;
    for (name, val) in [("k", p.k), ("l", p.l), ("h", p.h)] {
        if let Some(v) = val {
            params.insert(name.into(), json!(v));
        }
    }
    if let Some(n) = p.big_n {
        params.insert("N".into(), json!(n));
    }
    for (name, val) in [("u", p.u), ("v", p.v)] {
        if let Some(y) = val {
            params.insert(name.into(), json!(k.coeffs(y)));
        }
    }
    json!({
        "family": r.family.as_str(),
        "p": r.p,
        "params": params,
        "degree": r.claimed_degree,
    })
}

/// Field description for `field-info`: the field JSON plus the primitive
/// element and the size of the subgroup of `(p-1)`-th powers.
pub fn field_info_json(k: &Field) -> Value {
    let spec = k.spec();
    json!({
        "p": spec.p,
        "n": spec.n,
        "modulus": spec.modulus,
        "q": k.order(),
        "primitive_element": k.coeffs(k.generator()),
        "subgroup_p_minus_1_size": k.subgroup(k.p() as u64 - 1).len(),
    })
}

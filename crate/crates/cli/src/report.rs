//! JSON shapes shared by the command line and the HTTP API, so that both
//! surfaces print the same thing for the same engine call.

use serde::{Deserialize, Serialize};

use lambda_sseq::ss::{DiscrepancyKind, PageClass, Propagation, SignMode, SsError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub sphere: u32,
    pub page: u32,
    pub k: usize,
    pub m: u32,
    pub representative: String,
}

impl From<&PageClass> for ClassReport {
    fn from(c: &PageClass) -> Self {
        ClassReport {
            sphere: c.sphere,
            page: c.page,
            k: c.bidegree.k,
            m: c.bidegree.m,
            representative: c.representative.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductReport {
    pub a: ClassReport,
    pub b: ClassReport,
    pub product: ClassReport,
    pub first_term: String,
    pub middle_term: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub product: ClassReport,
    pub value: String,
    pub intrinsic: String,
    pub kind: DiscrepancyKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub sphere: u32,
    pub page: u32,
    pub mode: SignMode,
    pub revision: u64,
    pub products: Vec<ProductReport>,
    pub discrepancies: Vec<DiscrepancyReport>,
    pub added: Vec<u64>,
    pub skipped: Vec<String>,
}

impl PropagationReport {
    pub fn new(p: &Propagation, revision: u64) -> Self {
        PropagationReport {
            sphere: p.sphere,
            page: p.page,
            mode: p.mode,
            revision,
            products: p
                .values
                .iter()
                .map(|v| ProductReport {
                    a: (&v.a).into(),
                    b: (&v.b).into(),
                    product: (&v.product).into(),
                    first_term: v.first_term.to_string(),
                    middle_term: v.middle_term.to_string(),
                    value: v.value.to_string(),
                })
                .collect(),
            discrepancies: p
                .discrepancies
                .iter()
                .map(|d| DiscrepancyReport {
                    product: (&d.value.product).into(),
                    value: d.value.value.to_string(),
                    intrinsic: d.intrinsic.to_string(),
                    kind: d.kind,
                })
                .collect(),
            added: p.added.clone(),
            skipped: p.skipped.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionCreated {
    pub id: u64,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

/// Name of the engine error variant, as it appears in error payloads.
pub fn error_kind(e: &SsError) -> &'static str {
    match e {
        SsError::BidegreeMismatch(_) => "BidegreeMismatch",
        SsError::DSquaredViolation(_) => "DSquaredViolation",
        SsError::UnknownClass(_) => "UnknownClass",
        SsError::IncompleteDifferential(_) => "IncompleteDifferential",
        SsError::ConflictingAssertion(_) => "ConflictingAssertion",
        SsError::PropagationConflict(_) => "PropagationConflict",
        SsError::NotComposable(_) => "NotComposable",
        SsError::NotACycle(_) => "NotACycle",
        SsError::UnknownAssertion(_) => "UnknownAssertion",
        SsError::BadSphere(_) => "BadSphere",
        SsError::BadPage(_) => "BadPage",
        SsError::Lambda(_) => "LambdaError",
        SsError::Linalg(_) => "LinalgError",
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

//! Spectral-sequence pages `E^r(S^n, F_p)`.
//!
//! Page 1 is the lambda algebra with `d^1 = ∂`. Higher differentials are
//! not computable from `E^1`, so they come from a ledger of assertions;
//! whatever the ledger leaves open is assumed zero and recorded.

mod engine;
mod page;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lambda::LambdaError;
use crate::linalg::LinalgError;

pub use engine::{
    Discrepancy, DiscrepancyKind, LeibnizValue, PageClass, Propagation, Session,
};
pub use page::{AssumedZero, Cell, PageState};

/// Rectangle of the chart that is computed: homotopy degree `m ≤ max_m`
/// and length `k ≤ max_length`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub max_m: u32,
    pub max_length: usize,
}

/// A chart position `(k, m)` over a sphere: length and homotopy degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub k: usize,
    pub m: u32,
}

impl Bidegree {
    pub fn new(k: usize, m: u32) -> Self {
        Bidegree { k, m }
    }

    /// Where `d^r` lands, if anywhere.
    pub fn target(self, r: u32) -> Option<Bidegree> {
        Some(Bidegree::new(self.k + r as usize, self.m.checked_sub(1)?))
    }

    /// Where `d^r` into this bidegree starts.
    pub fn source(self, r: u32) -> Option<Bidegree> {
        Some(Bidegree::new(self.k.checked_sub(r as usize)?, self.m + 1))
    }
}

impl std::fmt::Display for Bidegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(k={}, m={})", self.k, self.m)
    }
}

/// Sign used for the term `a ⊙ d^r σb` when propagating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMode {
    /// `(−1)^{l+t}` on `d^r a ⊙ b`, no sign on `a ⊙ d^r σb`.
    Paper,
    /// No sign on `d^r a ⊙ b`, `(−1)^{deg a}` on `a ⊙ d^r σb`; agrees with
    /// the derivation rule for `∂`.
    #[default]
    Derivation,
}

impl std::str::FromStr for SignMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(SignMode::Paper),
            "derivation" => Ok(SignMode::Derivation),
            _ => Err(format!("unknown sign mode `{s}` (expected paper or derivation)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `d^1 = ∂`, computed rather than asserted.
    Intrinsic,
    User,
    Leibniz,
    AssumedZero,
}

/// One ledger entry: `d^page(source) = target` over `S^sphere`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assertion {
    pub id: u64,
    pub page: u32,
    pub sphere: u32,
    pub source_bidegree: Bidegree,
    pub source: crate::Element,
    pub target: crate::Element,
    pub provenance: Provenance,
    pub note: String,
    /// Tombstone; deleted entries stay in the ledger.
    pub deleted: bool,
}

impl Assertion {
    pub fn target_bidegree(&self) -> Bidegree {
        self.source_bidegree
            .target(self.page)
            .expect("validated assertions have m ≥ 1")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SsError {
    #[error("bidegree mismatch: {0}")]
    BidegreeMismatch(String),
    #[error("d∘d ≠ 0: {0}")]
    DSquaredViolation(String),
    #[error("unknown class: {0}")]
    UnknownClass(String),
    #[error("incomplete differential: {0}")]
    IncompleteDifferential(String),
    #[error("conflicting assertions: {0}")]
    ConflictingAssertion(String),
    #[error("propagation conflict: {0}")]
    PropagationConflict(String),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("unknown assertion id {0}")]
    UnknownAssertion(u64),
    #[error("sphere S^{0} is not available (need n ≥ 2)")]
    BadSphere(u32),
    #[error("page must be at least 1, got {0}")]
    BadPage(u32),
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

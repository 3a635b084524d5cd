//! The session file: a single human-editable JSON document holding the
//! prime, bounds, sign mode and assertion ledger.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lambda::{Element, LambdaError};
use crate::prime::PrimeContext;
use crate::ss::{Assertion, Bidegree, Bounds, Provenance, Session, SignMode, SsError};

pub const SESSION_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("session JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported session version {0} (expected {SESSION_VERSION})")]
    Version(u32),
    #[error("session I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error(transparent)]
    Ss(#[from] SsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionFile {
    pub version: u32,
    pub prime: u32,
    pub spheres: Vec<u32>,
    pub bounds: Bounds,
    pub sign_mode: SignMode,
    #[serde(default)]
    pub revision: u64,
    #[serde(default)]
    pub assertions: Vec<AssertionRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionRecord {
    pub id: u64,
    pub page: u32,
    pub sphere: u32,
    pub k: usize,
    pub m: u32,
    pub source: String,
    pub target: String,
    pub provenance: Provenance,
    #[serde(default)]
    pub note: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub deleted: bool,
}

impl SessionFile {
    pub fn new(prime: u32, spheres: Vec<u32>, bounds: Bounds, sign_mode: SignMode) -> Self {
        SessionFile {
            version: SESSION_VERSION,
            prime,
            spheres,
            bounds,
            sign_mode,
            revision: 0,
            assertions: Vec::new(),
        }
    }

    pub fn from_session(s: &Session) -> Self {
        SessionFile {
            version: SESSION_VERSION,
            prime: s.ctx().p(),
            spheres: s.spheres().to_vec(),
            bounds: s.bounds(),
            sign_mode: s.sign_mode(),
            revision: s.revision(),
            assertions: s.ledger().iter().map(AssertionRecord::from_assertion).collect(),
        }
    }

    /// Build the engine session; the ledger is revalidated.
    pub fn to_session(&self) -> Result<Session, SessionError> {
        if self.version != SESSION_VERSION {
            return Err(SessionError::Version(self.version));
        }
        let ctx = PrimeContext::new(self.prime)?;
        let mut ledger = Vec::with_capacity(self.assertions.len());
        for a in &self.assertions {
            ledger.push(Assertion {
                id: a.id,
                page: a.page,
                sphere: a.sphere,
                source_bidegree: Bidegree::new(a.k, a.m),
                source: Element::parse(&a.source, &ctx)?,
                target: Element::parse(&a.target, &ctx)?,
                provenance: a.provenance,
                note: a.note.clone(),
                deleted: a.deleted,
            });
        }
        for a in &ledger {
            if let (Some(k), Some(d)) = (a.source.length(), a.source.degree()) {
                if Bidegree::new(k, a.sphere + d) != a.source_bidegree {
                    return Err(SsError::BidegreeMismatch(format!(
                        "assertion {} is recorded at {} but its source lies at (k={k}, m={})",
                        a.id,
                        a.source_bidegree,
                        a.sphere + d
                    ))
                    .into());
                }
            }
        }
        Ok(Session::from_parts(
            &ctx,
            self.spheres.clone(),
            self.bounds,
            self.sign_mode,
            ledger,
            self.revision,
        )?)
    }

    pub fn parse(text: &str) -> Result<Self, SessionError> {
        let probe: serde_json::Value = serde_json::from_str(text)?;
        if let Some(v) = probe.get("version").and_then(|v| v.as_u64()) {
            if v != SESSION_VERSION as u64 {
                return Err(SessionError::Version(v as u32));
            }
        }
        Ok(serde_json::from_value(probe)?)
    }

    /// Canonical text: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("session serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, SessionError> {
        SessionFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), SessionError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

impl AssertionRecord {
    fn from_assertion(a: &Assertion) -> Self {
        AssertionRecord {
            id: a.id,
            page: a.page,
            sphere: a.sphere,
            k: a.source_bidegree.k,
            m: a.source_bidegree.m,
            source: a.source.to_string(),
            target: a.target.to_string(),
            provenance: a.provenance,
            note: a.note.clone(),
            deleted: a.deleted,
        }
    }
}

/// Load and build a session in one step.
pub fn load_session(path: &Path) -> Result<Session, SessionError> {
    SessionFile::load(path)?.to_session()
}

pub fn save_session(s: &Session, path: &Path) -> Result<(), SessionError> {
    SessionFile::from_session(s).save(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let ctx = PrimeContext::new(3).unwrap();
        let mut s = Session::new(&ctx, vec![2, 3], Bounds { max_m: 12, max_length: 5 }, SignMode::Derivation);
        let l1 = Element::parse("l1", &ctx).unwrap();
        let id = s.assert_differential(2, 2, &l1, &Element::zero(&ctx), "d2 on l1").unwrap();
        s.assert_differential(3, 2, &l1, &Element::zero(&ctx), "").unwrap();
        s.delete_assertion(id).unwrap();
        let first = SessionFile::from_session(&s).to_json();
        let loaded = SessionFile::parse(&first).unwrap().to_session().unwrap();
        let second = SessionFile::from_session(&loaded).to_json();
        assert_eq!(first, second);
    }

    #[test]
    fn rejects_unknown_version_and_fields() {
        let f = SessionFile::new(3, vec![2], Bounds { max_m: 8, max_length: 3 }, SignMode::Paper);
        let text = f.to_json().replace("\"version\": 1", "\"version\": 7");
        assert!(matches!(SessionFile::parse(&text), Err(SessionError::Version(7))));
        let text = f.to_json().replacen('{', "{\n  \"extra\": 1,", 1);
        assert!(SessionFile::parse(&text).is_err());
    }

    #[test]
    fn rejects_bad_prime() {
        let f = SessionFile::new(4, vec![2], Bounds { max_m: 8, max_length: 3 }, SignMode::Paper);
        assert!(f.to_session().is_err());
    }
}

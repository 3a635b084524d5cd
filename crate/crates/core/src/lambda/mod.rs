//! The mod-p lambda algebra `Λ` for an odd prime `p`.
//!
//! `Λ` is generated by `λ_i` (`i ≥ 1`, degree `2(p-1)i - 1`) and `μ_j`
//! (`j ≥ 0`, degree `2(p-1)j`) subject to quadratic relations that rewrite
//! every inadmissible adjacent pair. Admissible monomials form a basis, and
//! every [`Element`] is stored in that basis.

mod differential;
mod element;
mod monomial;
mod relations;
mod straighten;

use std::fmt;

use thiserror::Error;

pub use differential::{d_element, d_element_with, d_generator, d_word, DerivationSign};
pub use element::Element;
pub use monomial::{FormalSum, Monomial};
pub use relations::{
    bound_n, bound_n_prime, coeff_a, coeff_b, is_admissible, is_admissible_pair, rewrite_pair,
};
pub(crate) use relations::RewriteMemo;
pub use straighten::{multiply, normalize, normalize_with, Strategy, DEFAULT_FUEL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LambdaError {
    #[error("p = {0} is not an odd prime")]
    InvalidPrime(u32),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("pair {0} {1} is admissible and has no relation to apply")]
    AdmissiblePair(Generator, Generator),
    #[error("straightening exceeded its budget of {0} pair rewrites")]
    FuelExhausted(u64),
    #[error("monomial {0} is not admissible")]
    NotAdmissible(Monomial),
    #[error("binomial upper index is negative (k={k}, j={j})")]
    NegativeUpperIndex { k: i64, j: i64 },
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("{0} is not a member of {1}")]
    NotMember(String, String),
    #[error("not composable: {0}")]
    NotComposable(String),
}

/// Which family a generator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    Lambda,
    Mu,
}

/// A single letter `λ_i` or `μ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub kind: GenKind,
    pub index: u32,
}

impl Generator {
    pub fn lambda(index: u32) -> Result<Self, LambdaError> {
        if index == 0 {
            return Err(LambdaError::InvalidGenerator("λ_0 does not exist".into()));
        }
        Ok(Generator {
            kind: GenKind::Lambda,
            index,
        })
    }

    pub fn mu(index: u32) -> Self {
        Generator {
            kind: GenKind::Mu,
            index,
        }
    }

    /// Internal constructor for indices already known to be valid.
    #[inline]
    pub(crate) fn new_unchecked(kind: GenKind, index: u32) -> Self {
        debug_assert!(kind == GenKind::Mu || index >= 1);
        Generator { kind, index }
    }

    #[inline]
    pub fn is_lambda(&self) -> bool {
        self.kind == GenKind::Lambda
    }

    /// Internal degree `2(p-1)i - 1` for `λ_i`, `2(p-1)j` for `μ_j`.
    #[inline]
    pub fn degree(&self, p: u32) -> u32 {
        let base = 2 * (p - 1) * self.index;
        match self.kind {
            GenKind::Lambda => base - 1,
            GenKind::Mu => base,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GenKind::Lambda => write!(f, "l{}", self.index),
            GenKind::Mu => write!(f, "m{}", self.index),
        }
    }
}

//! Desk-scale simplicial oracle: finite simplicial sets, the free group and
//! linearization monads, Kleisli composition and suspension, Lie powers,
//! and homotopy of simplicial modules. Used to check the lambda algebra
//! against honest simplicial computations.

pub mod checks;
pub mod homology;
pub mod lie;
pub mod monad;
pub mod sset;

use thiserror::Error;

pub use checks::{
    lemma_checks, vanishing_check, verify_iso_dims, IsoReport, IsoRow, LemmaReport, LemmaResult, VanishingReport,
    VanishingRow,
};
pub use homology::{
    boundary_formula_check, moore_homology, smith_invariants, AbelianGroup, CoordinateSubmodule, SimplicialModule,
};
pub use lie::{lie_power_basis, restricted_dimension, witt_dimension, LieComplex};
pub use monad::{kleisli, s_map, tau, FreeGroup, LinearFp, Monad, MonadTag};
pub use sset::{FiniteSimplicialSet, DEFAULT_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Lambda(#[from] crate::lambda::LambdaError),
}

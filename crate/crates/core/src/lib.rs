//! Computational engine for the mod-p lambda algebra and the p-lower central
//! series spectral sequence of spheres.
//!
//! The crate is organised bottom-up:
//!
//! - [`prime`]: scalar arithmetic in `F_p` and Lucas binomials.
//! - [`lambda`]: generators, admissible monomials, straightening and the
//!   differential of the lambda algebra.
//! - [`unstable`]: the unstable subalgebras `Λ(n)`, the ideals `Λλ(n)` and
//!   sphere-tagged elements with suspension and composition.
//! - [`linalg`]: sparse exact linear algebra over `F_p`.
//! - [`ss`]: spectral-sequence pages, asserted higher differentials and
//!   Leibniz propagation.
//! - [`oracle`]: finite simplicial sets and modules, monads, Lie powers and
//!   Moore homology, used as an independent check on the algebra.
//! - [`session`] and [`chart`]: the persisted session file and chart export.

pub mod chart;
pub mod lambda;
pub mod linalg;
pub mod oracle;
pub mod prime;
pub mod session;
pub mod ss;
pub mod unstable;

pub use lambda::{Element, GenKind, Generator, LambdaError, Monomial};
pub use prime::PrimeContext;

//! Sectional K-curvature of statistical structures.
//!
//! A statistical structure on an inner-product space is a pair `(g, K)` where
//! `K` is a symmetric (1,2)-tensor whose lowered form `C(X,Y,Z) = g(X,K(Y,Z))`
//! is totally symmetric. The crate covers the algebra of `C`, `K` and `[K,K]`,
//! maximization of `Phi(X) = C(X,X,X)` on the unit sphere, the adapted-basis
//! decomposition of constant-curvature structures, executable characterization
//! and rigidity checks, and finite-difference verification of the connection
//! identities on coordinate charts.

pub mod adapted;
pub mod cli;
pub mod error;
pub mod families;
pub mod identities;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod phi;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{Metric, Plane, StatStructure, SymCubic};

//! Exact p-local computations with Brown-Peterson operations.
//!
//! The crate computes the right unit `η_R` on `BP_*` with Hazewinkel
//! generators, the coefficient actions of stable operations, realizations of
//! elementary matrices, commutants of truncated operation families, and the
//! congruence lattice of Adams-operation windows on the Adams summand.

pub mod centre;
pub mod config;
pub mod dvr;
pub mod error;
pub mod hopf;
pub mod ktheory;
pub mod monomial;
pub mod ops;
pub mod poly;
pub mod report;
pub mod suites;

pub use dvr::{DvrLattice, PAdicScalar, Prime, RatMatrix, Valuation};
pub use error::{Error, Result};
pub use hopf::EtaRTable;
pub use monomial::ExponentSeq;
pub use poly::GradedPoly;

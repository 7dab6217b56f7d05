//! Exact algebra of CCR-preserving deformation maps on polynomials.
//!
//! Scalars are exact rationals. Operators are expressions in the coordinate
//! `x`, the derivative `d` and diagonal functions of the degree operator,
//! evaluated by their action on monomials.

pub mod dsl;
pub mod hahn;
pub mod maps;
pub mod opcore;
pub mod poly;
pub mod qnum;
pub mod rational;

pub use maps::{DeformMap, MapError, MapSpec, Series};
pub use opcore::{apply, LinOp, OpError, OpExpr, Spectral};
pub use poly::{Basis, Poly, Truncation};
pub use qnum::QContext;
pub use rational::Rational;

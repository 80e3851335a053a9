//! A workbench for finite semisimple spherical tensor categories.
//!
//! The crate builds concrete categories from finite-dimensional Hopf algebras,
//! constructs and verifies Frobenius algebras inside them, realizes the
//! two-object bicategory (Morita context) attached to a canonical Frobenius
//! algebra, reconstructs Hopf algebras from irreducible depth-two contexts,
//! and evaluates state-sum invariants of closed oriented 3-manifolds from
//! skeletal category data or directly over a Morita context.

pub mod scalar;
pub mod mat;
pub mod alg;
pub mod groups;
pub mod hopf;
pub mod repcat;
pub mod frobenius;
pub mod morita;
pub mod skeletal;
pub mod bicolored;
pub mod statesum;
pub mod report;
pub mod fixtures;

pub use scalar::{Rat, Scalar, Tol, C64};

//! Cut finite element solver for the Oseen equations with general Navier
//! (slip) boundary conditions imposed weakly by a Nitsche-type method.
//!
//! The discretization uses equal-order continuous `Q1`/`Q2` elements on a
//! rotated structured background mesh. Stability on cut elements comes from
//! continuous interior penalty (CIP) and ghost-penalty facet terms. The
//! [`verification`] module carries a manufactured box-flow solution and the
//! error norms used by the convergence studies in [`harness`].

// index loops mirror the element matrix notation; negated float comparisons reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cut_geometry;
pub mod error;
pub mod fem_basis;
pub mod harness;
pub mod linear_solver;
pub mod mesh;
pub mod quadrature;
pub mod sparse;
pub mod verification;

pub use error::{Error, Result};

pub type Point = nalgebra::Vector2<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;

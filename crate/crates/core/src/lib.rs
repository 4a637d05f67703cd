//! Orbits of subspaces under linear operators on R^N.
//!
//! The crate builds operators from real Jordan data, computes the relative
//! size lower bounds for `n`-supercyclicity, reduces subspace bases against a
//! Jordan structure, checks the exact combinatorial identities behind the
//! growth estimates, and measures empirically how densely the orbit
//! `{T^k(M)}` of a subspace fills R^N or the Grassmannian.

// `!(x <= tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod delta;
pub mod error;
pub mod jordan;
mod linalg;
pub mod matrix;
pub mod orbit;
pub mod par;
pub mod recipes;
pub mod reduction;
pub mod sampling;
pub mod subspace;

pub use error::{Error, Result};

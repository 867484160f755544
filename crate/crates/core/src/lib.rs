//! Cheeger-type certificates for the spectral gap of `H = L_q + W`.
//!
//! The crate decomposes a matrix into a weighted (possibly signed) graph
//! Laplacian plus a diagonal potential, computes ground-state-weighted Cheeger
//! constants, and checks the inequalities that sandwich the gap between
//! functions of that constant. A small adiabatic-evolution simulator uses the
//! same estimates to adapt a schedule.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baa;
pub mod bounds;
pub mod cheeger;
pub mod error;
pub mod graph;
pub mod io;
pub mod routing;
pub mod spectral;
pub mod stoquastic;

pub use error::{Error, Result};
pub use graph::{DiagonalPotential, HamiltonianDecomposition, LaplacianKind, SignedWeightedGraph};
pub use spectral::{EigenSystem, GroundState};

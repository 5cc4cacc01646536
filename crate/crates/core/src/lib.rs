//! A workbench for modular invariant theory over finite fields.
//!
//! For a finite group `G <= GL_d(F_q)` acting on `R = F_q[x_0, ..., x_{d-1}]`
//! the crate computes, one graded piece at a time:
//!
//! * the invariant ring `S = R^G` and the Dickson classes ([`invariants`]),
//! * Steenrod reduced powers `P^i` on `R` and `S` ([`steenrod`]),
//! * group cohomology `H^i(G, R)` with its `S`-module structure and the
//!   operators `Q^m = P^m o -` on cochains ([`cohomology`]),
//! * windowed annihilator certificates for the top Dickson class
//!   ([`annihilators`]),
//! * Koszul homology, colon quotients and depth bounds ([`homology`]),
//! * annihilators of graded local cohomology through `Ext` over a
//!   polynomial subalgebra generated by an hsop ([`localcoh`]).
//!
//! Everything is exact; a "window" always means a finite range of internal
//! degrees, and certificates say nothing about degrees outside it.

pub mod annihilators;
pub mod cohomology;
pub mod error;
pub mod exactalg;
pub mod group;
pub mod homology;
pub mod invariants;
pub mod localcoh;
pub mod polyring;
pub mod steenrod;

pub use error::{Error, Result};
pub use exactalg::{FieldSpec, Scalar};
pub use group::{GroupContext, MatrixGroup};
pub use polyring::{GradedBasis, Monomial, PolyRing, Polynomial};

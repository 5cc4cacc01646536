//! Exact arithmetic in `F_{p^r}` and exact linear algebra.

mod field;
mod matrix;
mod sparse;

pub use field::{shipped_modulus, shipped_table, FieldSpec, Scalar, MAX_ORDER};
pub use matrix::{quotient_basis, reduce, Matrix, QuotientBasis, Reduction};
pub use sparse::{canonical_basis, kernel_of_columns, Echelon, Insert, SparseMatrix, SparseVec, Subquotient};

/// `field_make` under its contract name.
pub fn field_make(p: u32, r: u32, modulus: Option<&[u32]>) -> crate::Result<FieldSpec> {
    FieldSpec::new(p, r, modulus)
}

//! JSON report assembly. Maps are key-sorted, so identical inputs give identical bytes.

use modinv::exactalg::{FieldSpec, SparseMatrix, SparseVec};
use modinv::Polynomial;
use serde_json::{json, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const MONOMIAL_ORDER: &str = "grlex";

pub fn envelope(command: &str, inputs: Value, status: &str, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "monomial_order": MONOMIAL_ORDER,
        "command": command,
        "inputs": inputs,
        "status": status,
        "result": result,
    })
}

pub fn error(command: &str, e: &CliError) -> Value {
    envelope(command, Value::Null, "error", json!({ "kind": e.kind, "message": e.message, "exit_code": e.code }))
}

pub fn poly(f: &Polynomial) -> Value {
    Value::String(f.to_string())
}

pub fn polys<'a>(fs: impl IntoIterator<Item = &'a Polynomial>) -> Value {
    Value::Array(fs.into_iter().map(poly).collect())
}

/// `[[index, "value"], ...]` with values in the field's text form.
pub fn sparse(field: &FieldSpec, v: &SparseVec) -> Value {
    Value::Array(v.entries().iter().map(|&(i, c)| json!([i, field.format(c)])).collect())
}

pub fn matrix(field: &FieldSpec, m: &SparseMatrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "columns": m.columns().iter().map(|c| sparse(field, c)).collect::<Vec<_>>(),
    })
}

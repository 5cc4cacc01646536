//! Problem definitions read from JSON.

use std::path::Path;
use std::sync::Arc;

use modinv::exactalg::{FieldSpec, Matrix, Scalar};
use modinv::group::{GroupContext, MatrixGroup};
use modinv::{PolyRing, Polynomial};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A matrix entry: an integer reduced into the prime field, or low-to-high
/// coefficients in `t` for extension fields.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Coeffs(Vec<u32>),
}

/// Optional defaults for command parameters; command-line flags win.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Windows {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_power: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ext_window: Option<(i64, i64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub p: u32,
    #[serde(default = "one")]
    pub r: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    pub d: usize,
    /// Row-major `d*d` entry lists.
    pub generators: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hsop: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<Windows>,
}

fn one() -> u32 {
    1
}

/// A parsed and validated problem.
pub struct Problem {
    pub spec: ProblemSpec,
    pub group: Arc<MatrixGroup>,
}

impl Problem {
    pub fn ring(&self) -> &PolyRing {
        self.group.ring()
    }

    pub fn windows(&self) -> Windows {
        self.spec.windows.clone().unwrap_or_default()
    }

    pub fn parse_poly(&self, what: &str, text: &str) -> Result<Polynomial, CliError> {
        self.ring().parse(text).map_err(|e| CliError::input(format!("{what}: {e}")))
    }

    /// The hsop from `file` if given, else from the spec.
    pub fn hsop(&self, file: Option<&Path>) -> Result<Option<Vec<Polynomial>>, CliError> {
        let texts = match file {
            Some(path) => Some(read_hsop_file(path)?),
            None => self.spec.hsop.clone(),
        };
        texts
            .map(|ts| ts.iter().enumerate().map(|(k, t)| self.parse_poly(&format!("hsop[{k}]"), t)).collect())
            .transpose()
    }
}

pub fn load(path: &Path) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let spec: ProblemSpec =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    build(spec)
}

pub fn build(spec: ProblemSpec) -> Result<Problem, CliError> {
    if spec.d == 0 {
        return Err(CliError::input("d: must be at least 1"));
    }
    let field = FieldSpec::new(spec.p, spec.r, spec.modulus.as_deref()).map_err(|e| CliError::input(format!("field: {e}")))?;
    let ctx = GroupContext::new(field.clone(), spec.d).map_err(|e| CliError::input(format!("d: {e}")))?;
    let mut mats = Vec::with_capacity(spec.generators.len());
    for (k, entries) in spec.generators.iter().enumerate() {
        let d = spec.d;
        if entries.len() != d * d {
            return Err(CliError::input(format!(
                "generators[{k}]: expected {} row-major entries, found {}",
                d * d,
                entries.len()
            )));
        }
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let row = (0..d)
                .map(|j| scalar(&field, &entries[i * d + j]).map_err(|e| CliError::input(format!("generators[{k}][{}]: {e}", i * d + j))))
                .collect::<Result<Vec<Scalar>, _>>()?;
            rows.push(row);
        }
        mats.push(Matrix::from_rows(&rows).map_err(|e| CliError::input(format!("generators[{k}]: {e}")))?);
    }
    let group = MatrixGroup::close_generators(&ctx, &mats).map_err(CliError::from)?;
    Ok(Problem { spec, group: Arc::new(group) })
}

fn scalar(field: &FieldSpec, e: &Entry) -> modinv::Result<Scalar> {
    match e {
        Entry::Int(v) => Ok(field.from_int(*v)),
        Entry::Coeffs(c) => field.from_coeffs(c),
    }
}

/// A JSON array of strings, or one polynomial per line (`#` starts a comment).
pub fn read_hsop_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())));
    }
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

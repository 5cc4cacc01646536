//! Exponent ledger file: the `a_j` found by `verify-loc`, read by `verify-corollaries`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::spec::{Entry, ProblemSpec};
use crate::CliError;

pub const LEDGER_KIND: &str = "exponent-ledger";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupKey {
    pub p: u32,
    pub r: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    pub d: usize,
    pub generators: Vec<Vec<Entry>>,
}

impl GroupKey {
    pub fn of(spec: &ProblemSpec) -> GroupKey {
        GroupKey { p: spec.p, r: spec.r, modulus: spec.modulus.clone(), d: spec.d, generators: spec.generators.clone() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LedgerEntry {
    pub a: usize,
    /// `certificate` or `cm-short-circuit`.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ext_window: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_window: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Ledger {
    pub schema_version: u32,
    pub kind: String,
    pub group: GroupKey,
    /// Polynomial text of the element whose powers were certified.
    pub element: String,
    pub exponents: BTreeMap<usize, LedgerEntry>,
}

impl Ledger {
    pub fn new(spec: &ProblemSpec, element: String) -> Ledger {
        Ledger {
            schema_version: crate::report::SCHEMA_VERSION,
            kind: LEDGER_KIND.into(),
            group: GroupKey::of(spec),
            element,
            exponents: BTreeMap::new(),
        }
    }

    pub fn read(path: &Path) -> Result<Ledger, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("ledger {}: {e}", path.display())))?;
        let ledger: Ledger =
            serde_json::from_str(&text).map_err(|e| CliError::input(format!("ledger {}: {e}", path.display())))?;
        if ledger.kind != LEDGER_KIND {
            return Err(CliError::input(format!("ledger {}: kind is {:?}", path.display(), ledger.kind)));
        }
        Ok(ledger)
    }

    /// Read the ledger at `path` if present, checking that it belongs to this problem.
    pub fn open_or_new(path: &Path, spec: &ProblemSpec, element: &str) -> Result<Ledger, CliError> {
        if !path.exists() {
            return Ok(Ledger::new(spec, element.to_string()));
        }
        let ledger = Ledger::read(path)?;
        ledger.check(spec, element)?;
        Ok(ledger)
    }

    pub fn check(&self, spec: &ProblemSpec, element: &str) -> Result<(), CliError> {
        if self.group != GroupKey::of(spec) {
            return Err(CliError::input("ledger was written for a different group"));
        }
        if self.element != element {
            return Err(CliError::input(format!("ledger certifies {}, not {element}", self.element)));
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("ledger serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::input(format!("ledger {}: {e}", path.display())))
    }
}

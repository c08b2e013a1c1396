//! JSON container for a measured two-qubit density matrix.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nmr_discord::matcore::validate_density;
use nmr_discord::{ComplexMatrix, DensityMatrix};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    /// Sample name, tau, units and anything else worth keeping.
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix, metadata: BTreeMap<String, serde_json::Value>) -> Self {
        let m = rho.matrix();
        Self { dims: m.dim(), re: m.real_parts(), im: m.imag_parts(), metadata }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| anyhow!("at '{}': {}", e.path(), e.inner()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("invalid state file {}", path.display()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks the shape field by field, then validates the matrix as a state.
    pub fn decode(&self, tol: f64) -> Result<DensityMatrix> {
        if self.dims != 4 {
            bail!("dims: expected 4, found {}", self.dims);
        }
        for (name, rows) in [("re", &self.re), ("im", &self.im)] {
            if rows.len() != 4 {
                bail!("{name}: expected 4 rows, found {}", rows.len());
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != 4 {
                    bail!("{name}[{i}]: expected 4 entries, found {}", row.len());
                }
                if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                    bail!("{name}[{i}][{j}]: entry is not finite");
                }
            }
        }
        let m = ComplexMatrix::from_parts(&self.re, &self.im)?;
        Ok(validate_density(m, tol)?)
    }
}

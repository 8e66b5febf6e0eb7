//! Scenario files.
//!
//! ```json
//! {
//!   "sector": {"kind": "bosonic", "modes": 2, "particles": 4},
//!   "extension": {"type": "gate", "spec": {"terms": [...]}, "time": 1.0471975511965976},
//!   "options": {"oracle": true, "tolerance": 1e-8, "max_power": 3}
//! }
//! ```
//!
//! Gates come either from `spec` and `time` as `exp(−i·time·H)` or from a
//! `matrix_file` path, resolved against the scenario's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use unikit_core::{build_operator, matexp, Extension, HamiltonianSpec, Scenario, ScenarioOptions, SectorDescriptor, C64};

use crate::{matrix_file, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionKind {
    Hamiltonian,
    Gate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSpec {
    #[serde(rename = "type")]
    pub kind: ExtensionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<HamiltonianSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
    #[serde(default)]
    pub hermitize: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    #[serde(default)]
    pub oracle: bool,
    /// Zero threshold; the nonzero threshold is 100 times larger.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_power: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub sector: SectorDescriptor,
    pub extension: ExtensionSpec,
    #[serde(default)]
    pub options: FileOptions,
}

/// Command-line overrides applied on top of the file's options.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub oracle: bool,
    pub tolerance: Option<f64>,
    pub max_power: Option<usize>,
    pub max_rounds: Option<usize>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Scenario(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    pub fn options(&self, overrides: &Overrides) -> Result<ScenarioOptions> {
        let mut options = ScenarioOptions::default();
        options.oracle = self.options.oracle || overrides.oracle;
        if let Some(tol) = overrides.tolerance.or(self.options.tolerance) {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Scenario(format!("tolerance must be a positive number, got {tol}")));
            }
            options.zero_tol = tol;
            options.nonzero_tol = 100.0 * tol;
        }
        if let Some(p) = overrides.max_power.or(self.options.max_power) {
            options.max_power = p;
        }
        if let Some(r) = overrides.max_rounds {
            options.max_rounds = r;
        }
        Ok(options)
    }

    /// Builds the extension operator; `base` resolves relative matrix paths.
    pub fn extension(&self, base: &Path) -> Result<Extension> {
        let ext = &self.extension;
        let desc = &self.sector;
        let invalid = |msg: &str| Err(CliError::Scenario(msg.to_string()));
        match ext.kind {
            ExtensionKind::Hamiltonian => {
                if ext.matrix_file.is_some() || ext.time.is_some() {
                    return invalid("hamiltonian extensions take `spec` only (no `matrix_file` or `time`)");
                }
                let Some(spec) = &ext.spec else { return invalid("hamiltonian extensions require `spec`") };
                Ok(Extension::Hamiltonian(build_operator(spec, desc, ext.hermitize)?.into_matrix()))
            }
            ExtensionKind::Gate => match (&ext.spec, &ext.matrix_file) {
                (Some(spec), None) => {
                    let Some(t) = ext.time.filter(|t| t.is_finite()) else {
                        return invalid("gate extensions built from `spec` require a finite `time`");
                    };
                    let h = build_operator(spec, desc, ext.hermitize)?.into_matrix();
                    Ok(Extension::Gate(matexp(&(h * C64::new(0.0, -t)))?))
                }
                (None, Some(path)) => {
                    if ext.time.is_some() || ext.hermitize {
                        return invalid("`time` and `hermitize` do not apply to `matrix_file` gates");
                    }
                    Ok(Extension::Gate(matrix_file::read(&base.join(path))?))
                }
                _ => invalid("gate extensions need exactly one of `spec` or `matrix_file`"),
            },
        }
    }

    pub fn scenario(&self, base: &Path, overrides: &Overrides) -> Result<Scenario> {
        let family = unikit_core::Family::for_kind(self.sector.kind());
        Ok(Scenario::new(family, self.sector, self.extension(base)?, self.options(overrides)?)?)
    }
}

/// Reads a scenario file and builds the scenario it describes.
pub fn load(path: &Path, overrides: &Overrides) -> Result<(ScenarioFile, Scenario)> {
    let file = ScenarioFile::read(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let scenario = file.scenario(base, overrides)?;
    Ok((file, scenario))
}

//! What a run was asked to do, recorded next to its outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::{output_path, write_text};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Role to paths, e.g. `"catalog" -> ["data/catalog.json"]`.
    pub inputs: BTreeMap<String, Vec<PathBuf>>,
    pub out: PathBuf,
    /// Flag values that change results (modes, policy, state, sizes).
    pub options: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, out: &Path) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            out: out.to_path_buf(),
            options: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, role: &str, path: &Path) -> &mut Self {
        self.inputs
            .entry(role.to_string())
            .or_default()
            .push(path.to_path_buf());
        self
    }

    pub fn option(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.options.insert(key.to_string(), value.to_string());
        self
    }

    /// Every input exists and the output directory can be created.
    pub fn check(&self) -> CliResult<()> {
        for (role, paths) in &self.inputs {
            for p in paths {
                if !p.exists() {
                    return Err(CliError::Input(format!(
                        "{role} file {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        output_path(&self.out, "manifest.json").map(|_| ())
    }

    pub fn write(&self) -> CliResult<()> {
        let path = output_path(&self.out, "manifest.json")?;
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_text(&path, &(text + "\n"))
    }
}

pub mod fit;
pub mod predict;
pub mod project;
pub mod roofline;
pub mod validate;

use std::path::PathBuf;

use clap::ValueEnum;
use roofcast_core::{load_catalog_file, Catalog, DwarfModel};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        self != Format::Svg
    }

    pub fn svg(self) -> bool {
        self != Format::Csv
    }
}

/// The common flags.
pub struct Ctx {
    pub catalog: Option<PathBuf>,
    pub models: Vec<PathBuf>,
    pub out: PathBuf,
    pub format: Format,
}

impl Ctx {
    pub fn catalog(&self) -> CliResult<Catalog> {
        let path = self
            .catalog
            .as_ref()
            .ok_or_else(|| CliError::Input("--catalog is required".into()))?;
        Ok(load_catalog_file(path)?)
    }

    pub fn dwarf_model(&self) -> CliResult<DwarfModel> {
        match self.models.as_slice() {
            [path] => Ok(DwarfModel::from_path(path)?),
            [] => Err(CliError::Input("--model is required".into())),
            _ => Err(CliError::Input("expected a single --model".into())),
        }
    }
}

//! JSON form of a [`DwarfModel`].

use std::path::Path;

use serde::Deserialize;

use super::{
    DwarfLoop, DwarfModel, LoopCoefficients, LoopKind, LoopSpec, ProblemCase, ScalingRule,
    DEFAULT_SPECTRAL_FACTOR,
};
use crate::energy::EnergyCoefficients;
use crate::error::{from_json_str, Error, Result};
use crate::scalar::Scalar;

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct ModelFile<T> {
    name: String,
    #[serde(default)]
    description: Option<String>,
    problem: ProblemFile<T>,
    loops: Vec<LoopFile<T>>,
    #[serde(default)]
    energy: Option<EnergyCoefficients<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct ProblemFile<T> {
    nsmax: u64,
    gridn: u64,
    pts: u64,
    iter: u64,
    fields: u64,
    #[serde(default)]
    spectral_factor: Option<T>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct LoopFile<T> {
    name: String,
    kind: LoopKind,
    scaling: ScalingRule,
    #[serde(default)]
    w_per_iter: Option<T>,
    #[serde(default)]
    q_per_iter: Option<T>,
    #[serde(default)]
    intensity: Option<T>,
    coeffs: LoopCoefficients<T>,
}

impl<T: Scalar> DwarfModel<T> {
    /// Parses and validates a dwarf model document.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile<T> = from_json_str(text)?;
        let model = DwarfModel {
            name: f.name,
            description: f.description,
            problem: ProblemCase {
                nsmax: f.problem.nsmax,
                gridn: f.problem.gridn,
                pts: f.problem.pts,
                iterations: f.problem.iter,
                fields: f.problem.fields,
                spectral_factor: f
                    .problem
                    .spectral_factor
                    .unwrap_or_else(|| T::lit(DEFAULT_SPECTRAL_FACTOR)),
            },
            loops: f
                .loops
                .into_iter()
                .map(|l| DwarfLoop {
                    spec: LoopSpec {
                        name: l.name,
                        kind: l.kind,
                        scaling: l.scaling,
                        w_per_iter: l.w_per_iter,
                        q_per_iter: l.q_per_iter,
                        intensity: l.intensity,
                    },
                    coeffs: l.coeffs,
                })
                .collect(),
            energy: f.energy,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }
}

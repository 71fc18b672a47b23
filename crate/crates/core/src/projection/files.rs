//! JSON forms of workflows and sweep grids.

use std::path::Path;

use serde::Deserialize;

use super::{ConfigPoint, CpuDevice, Device, DwarfBinding, GpuDevice};
use crate::catalog::{CpuState, Frequency};
use crate::error::{from_json_str, Error, Result};
use crate::multinode::{CommPattern, CommShape};
use crate::scalar::Scalar;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct CommFile<T> {
    t_single_s_per_byte: T,
    q_in: T,
    q_out: T,
    iterations: u64,
    shape: CommShape,
}

#[derive(Deserialize)]
#[serde(
    bound = "T: Scalar",
    tag = "kind",
    rename_all = "lowercase",
    deny_unknown_fields
)]
enum DeviceFile<T> {
    Cpu {
        spec: String,
        state: CpuState<T>,
        #[serde(default = "one")]
        nodes: u32,
        #[serde(default)]
        energy_bench: Option<String>,
        #[serde(default)]
        comm: Option<CommFile<T>>,
    },
    Gpu {
        spec: String,
        n: T,
        host_idle_w: T,
        #[serde(default)]
        s_fraction: Option<T>,
    },
}

fn one() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct BindingFile<T> {
    dwarf: String,
    device: DeviceFile<T>,
    #[serde(default = "one_call")]
    calls_per_timestep: u64,
}

fn one_call() -> u64 {
    1
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct WorkflowFile<T> {
    name: String,
    timesteps: u64,
    overlap: bool,
    bindings: Vec<BindingFile<T>>,
}

/// Dwarfs bound to devices, run for a number of timesteps either serially
/// or simultaneously.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowSpec<T> {
    pub name: String,
    pub timesteps: u64,
    pub overlap: bool,
    pub bindings: Vec<DwarfBinding<T>>,
}

impl<T: Scalar> WorkflowSpec<T> {
    /// ```
    /// use roofcast_core::projection::WorkflowSpec;
    /// let w: WorkflowSpec<f64> = WorkflowSpec::from_json(r#"{"name": "sh", "timesteps": 1, "overlap": false,
    ///   "bindings": [{"dwarf": "sh_tco639", "device": {"kind": "cpu", "spec": "Xeon E5-2697v3",
    ///                 "state": {"freq": 2.6, "cores": 14}, "nodes": 4}}]}"#).unwrap();
    /// assert_eq!(w.bindings[0].label(), "sh_tco639@Xeon E5-2697v3");
    /// ```
    pub fn from_json(text: &str) -> Result<Self> {
        let f: WorkflowFile<T> = from_json_str(text)?;
        let bindings = f
            .bindings
            .into_iter()
            .map(|b| DwarfBinding {
                dwarf: b.dwarf,
                calls_per_timestep: b.calls_per_timestep,
                device: match b.device {
                    DeviceFile::Cpu {
                        spec,
                        state,
                        nodes,
                        energy_bench,
                        comm,
                    } => Device::Cpu(CpuDevice {
                        spec,
                        state,
                        nodes,
                        energy_bench,
                        comm: comm.map(|c| CommPattern {
                            t_single: c.t_single_s_per_byte,
                            q_in: c.q_in,
                            q_out: c.q_out,
                            iterations: c.iterations,
                            shape: c.shape,
                        }),
                    }),
                    DeviceFile::Gpu {
                        spec,
                        n,
                        host_idle_w,
                        s_fraction,
                    } => Device::Gpu(GpuDevice {
                        spec,
                        n,
                        host_idle_w,
                        s_fraction,
                    }),
                },
            })
            .collect();
        let w = WorkflowSpec {
            name: f.name,
            timesteps: f.timesteps,
            overlap: f.overlap,
            bindings,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read(path.as_ref())?)
    }

    pub fn validate(&self) -> Result<()> {
        let subject = format!("workflow `{}`", self.name);
        if self.bindings.is_empty() {
            return Err(Error::validation(subject, "no bindings"));
        }
        if self.timesteps == 0 {
            return Err(Error::validation(subject, "timesteps must be >= 1"));
        }
        for b in &self.bindings {
            let at = format!("{subject} binding `{}`", b.label());
            if b.calls_per_timestep == 0 {
                return Err(Error::validation(at, "calls_per_timestep must be >= 1"));
            }
            match &b.device {
                Device::Cpu(c) if c.nodes == 0 => {
                    return Err(Error::validation(at, "nodes must be >= 1"));
                }
                Device::Gpu(g) if !(g.n >= T::zero()) || !(g.host_idle_w >= T::zero()) => {
                    return Err(Error::validation(at, "n and host_idle_w must be >= 0"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Values to sweep. An absent list keeps each binding's own value.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct SweepGrid<T> {
    #[serde(default)]
    pub cpus: Option<Vec<String>>,
    #[serde(default)]
    pub gpus: Option<Vec<String>>,
    #[serde(default)]
    pub nodes: Option<Vec<u32>>,
    #[serde(default)]
    pub frequencies: Option<Vec<Frequency<T>>>,
    #[serde(default)]
    pub cores: Option<Vec<u32>>,
}

fn axis<V: Clone>(values: &Option<Vec<V>>) -> Vec<Option<V>> {
    match values {
        Some(v) => v.iter().cloned().map(Some).collect(),
        None => vec![None],
    }
}

impl<T: Scalar> SweepGrid<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let g: SweepGrid<T> = from_json_str(text)?;
        let lists = [
            ("cpus", g.cpus.as_ref().map(Vec::len)),
            ("gpus", g.gpus.as_ref().map(Vec::len)),
            ("nodes", g.nodes.as_ref().map(Vec::len)),
            ("frequencies", g.frequencies.as_ref().map(Vec::len)),
            ("cores", g.cores.as_ref().map(Vec::len)),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, len)| *len == Some(0)) {
            return Err(Error::validation(
                "sweep grid",
                format!("`{name}` is an empty list"),
            ));
        }
        Ok(g)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read(path.as_ref())?)
    }

    /// Cartesian product, cpus outermost and cores innermost.
    ///
    /// ```
    /// use roofcast_core::projection::SweepGrid;
    /// let g: SweepGrid<f64> = SweepGrid::from_json(r#"{"nodes": [1, 2, 4, 8], "frequencies": [2.0, 2.6]}"#).unwrap();
    /// let points = g.points();
    /// assert_eq!(points.len(), 8);
    /// assert_eq!((points[1].nodes, points[1].grid_index), (Some(1), 1));
    /// ```
    pub fn points(&self) -> Vec<ConfigPoint<T>> {
        let mut out = Vec::new();
        for cpu in axis(&self.cpus) {
            for gpu in axis(&self.gpus) {
                for nodes in axis(&self.nodes) {
                    for frequency in axis(&self.frequencies) {
                        for cores in axis(&self.cores) {
                            out.push(ConfigPoint {
                                grid_index: out.len(),
                                nodes,
                                cores,
                                frequency,
                                cpu: cpu.clone(),
                                gpu: gpu.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

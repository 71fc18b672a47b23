//! Time and energy projection for HPC kernels on CPUs, GPUs and clusters.
//!
//! Everything is generic over a [`Scalar`] (`f32` or `f64`); the `f64`
//! aliases at the crate root cover the common case.

// `!(x > 0)` style checks are deliberate: they reject NaN with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cpu;
pub mod energy;
pub mod error;
pub mod gpu;
pub mod lsq;
pub mod metrics;
pub mod multinode;
pub mod projection;
pub mod scalar;

pub use catalog::{
    cpu_peak_performance, gpu_peaks, load_catalog, load_catalog_file, lookup_state, BenchPower,
    CpuState, Frequency, GpuPeaks, Microarchitecture, StateValues,
};
pub use cpu::{
    dwarf_time, dwarf_time_with_loads, estimate_q, estimate_w, fit_compute_coefficients,
    fit_memory_coefficients, loop_time, roofline_series, t_flop, t_mop, Bound, LoopKind,
    ScalingRule,
};
pub use energy::{
    energy_gpu, energy_multinode, energy_single, fit_dram_coefficients, fit_pkg_coefficients,
    modeled_power, workflow_energy_no_overlap, workflow_energy_overlap, EnergyMode,
};
pub use error::{Error, Result};
pub use gpu::{
    adjust_ge_fermi, derive_characteristics, predict_dwarf, predict_kernel, roofline_point,
    GpuTimeBreakdown, RooflinePoint,
};
pub use metrics::{quality_metrics, relative_difference, square_error, QualityMetrics};
pub use multinode::{comm_time, multinode_time, partition, CommMode, CommShape};
pub use projection::{best_by, pareto_front, Policy};
pub use scalar::{lit, Scalar};

pub type Catalog = catalog::Catalog<f64>;
pub type CpuSpec = catalog::CpuSpec<f64>;
pub type GpuSpec = catalog::GpuSpec<f64>;
pub type EnergyBench = catalog::EnergyBench<f64>;
pub type GpuPowerSpec = catalog::GpuPowerSpec<f64>;
pub type GpuKernelCounters = gpu::GpuKernelCounters<f64>;
pub type KernelCharacteristics = gpu::KernelCharacteristics<f64>;
pub type KernelSet = gpu::KernelSet<f64>;
pub type DwarfModel = cpu::DwarfModel<f64>;
pub type LoopCoefficients = cpu::LoopCoefficients<f64>;
pub type EnergyCoefficients = energy::EnergyCoefficients<f64>;
pub type EnergyBreakdown = energy::EnergyBreakdown<f64>;
pub type CommPattern = multinode::CommPattern<f64>;
pub type MultinodeScenario = multinode::MultinodeScenario<f64>;
pub type WorkflowSpec = projection::WorkflowSpec<f64>;
pub type SweepGrid = projection::SweepGrid<f64>;
pub type ConfigPoint = projection::ConfigPoint<f64>;
pub type ProjectionResult = projection::ProjectionResult<f64>;
pub type DwarfLibrary = projection::DwarfLibrary<f64>;

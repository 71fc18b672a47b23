//! Workflows of dwarfs bound to CPU nodes or GPUs, configuration sweeps, and
//! (time-to-solution, energy-to-solution) selection.

mod files;

pub use files::{SweepGrid, WorkflowSpec};

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::catalog::{Catalog, CpuState, Frequency};
use crate::cpu::{Bound, DwarfModel};
use crate::energy::{
    dwarf_energy, energy_gpu, energy_multinode, workflow_energy_no_overlap,
    workflow_energy_overlap, EnergyMode, PowerDraw, WorkflowEnergyInputs,
};
use crate::error::{Error, Result};
use crate::gpu::KernelSet;
use crate::multinode::{self, CommMode, CommPattern};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CpuDevice<T> {
    pub spec: String,
    pub state: CpuState<T>,
    pub nodes: u32,
    /// Bench whose readings price this binding; defaults to one taken on `spec`.
    pub energy_bench: Option<String>,
    pub comm: Option<CommPattern<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpuDevice<T> {
    pub spec: String,
    /// Domain size.
    pub n: T,
    /// PKG idle draw of the host CPU, W.
    pub host_idle_w: T,
    /// Overrides the power spec's fraction of the limit.
    pub s_fraction: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Device<T> {
    Cpu(CpuDevice<T>),
    Gpu(GpuDevice<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwarfBinding<T> {
    pub dwarf: String,
    pub device: Device<T>,
    pub calls_per_timestep: u64,
}

impl<T> DwarfBinding<T> {
    /// `dwarf@spec`, used in error messages and reports.
    pub fn label(&self) -> String {
        let spec = match &self.device {
            Device::Cpu(c) => &c.spec,
            Device::Gpu(g) => &g.spec,
        };
        format!("{}@{}", self.dwarf, spec)
    }
}

/// Dwarf models available to a workflow, by name.
#[derive(Debug, Clone, PartialEq)]
pub struct DwarfLibrary<T> {
    pub cpu: BTreeMap<String, DwarfModel<T>>,
    pub gpu: BTreeMap<String, KernelSet<T>>,
}

impl<T> Default for DwarfLibrary<T> {
    fn default() -> Self {
        DwarfLibrary {
            cpu: BTreeMap::new(),
            gpu: BTreeMap::new(),
        }
    }
}

impl<T: Scalar> DwarfLibrary<T> {
    pub fn with_cpu(mut self, model: DwarfModel<T>) -> Self {
        self.cpu.insert(model.name.clone(), model);
        self
    }

    pub fn with_gpu(mut self, set: KernelSet<T>) -> Self {
        self.gpu.insert(set.name.clone(), set);
        self
    }
}

/// One point of a sweep. `None` keeps each binding's own value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigPoint<T> {
    pub grid_index: usize,
    pub nodes: Option<u32>,
    pub cores: Option<u32>,
    pub frequency: Option<Frequency<T>>,
    pub cpu: Option<String>,
    pub gpu: Option<String>,
}

impl<T> ConfigPoint<T> {
    /// The point that changes nothing.
    pub fn unchanged() -> Self {
        ConfigPoint {
            grid_index: 0,
            nodes: None,
            cores: None,
            frequency: None,
            cpu: None,
            gpu: None,
        }
    }
}

/// Semantics-changing choices; there are no defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionOptions {
    pub comm_mode: CommMode,
    pub energy_mode: EnergyMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingResult<T> {
    /// `dwarf@device` with the device this configuration actually used.
    pub label: String,
    /// Seconds over all timesteps and calls.
    pub time_s: T,
    pub energy_j: T,
    /// Draw while this binding waits on the others, W.
    pub idle_w: T,
    /// `None` for GPU bindings.
    pub bound: Option<Bound>,
    /// The energy bench was taken on a different machine.
    pub cross_machine: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult<T> {
    /// The grid point with unset fields filled from the first matching binding.
    pub config: ConfigPoint<T>,
    pub tts: T,
    pub ets: T,
    pub bindings: Vec<BindingResult<T>>,
}

impl<T> ProjectionResult<T> {
    pub fn cross_machine(&self) -> bool {
        self.bindings.iter().any(|b| b.cross_machine)
    }
}

fn in_binding(label: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| {
        if e.is_configuration() {
            let message = match e {
                Error::Configuration { message, .. } => message,
                other => other.to_string(),
            };
            Error::config(label, message)
        } else {
            e
        }
    }
}

fn project_cpu<T: Scalar>(
    binding: &DwarfBinding<T>,
    dev: &CpuDevice<T>,
    config: &ConfigPoint<T>,
    catalog: &Catalog<T>,
    library: &DwarfLibrary<T>,
    options: &ProjectionOptions,
) -> Result<BindingResult<T>> {
    let label = binding.label();
    let model = library
        .cpu
        .get(&binding.dwarf)
        .ok_or_else(|| Error::Unknown {
            kind: "cpu dwarf",
            name: binding.dwarf.clone(),
        })?;
    let cpu_name = config.cpu.as_deref().unwrap_or(&dev.spec);
    let cpu = catalog.cpu(cpu_name)?;
    let state = CpuState {
        frequency: config.frequency.unwrap_or(dev.state.frequency),
        cores: config.cores.unwrap_or(dev.state.cores),
    };
    let nodes = config.nodes.unwrap_or(dev.nodes);
    let comm = dev.comm.unwrap_or_else(CommPattern::none);
    let run = multinode::evaluate(model, cpu, state, nodes, &comm, options.comm_mode)?;

    let bench = match &dev.energy_bench {
        Some(name) => catalog.energy_bench(name)?,
        None => catalog.energy_bench_for_cpu(cpu_name).ok_or_else(|| {
            Error::config(
                &label,
                format!("no energy bench recorded on `{cpu_name}`; name one with energy_bench"),
            )
        })?,
    };
    let power = PowerDraw::from_bench(bench, &state, model.energy.as_ref())?;
    let per_node: Vec<_> = run
        .nodes
        .iter()
        .map(|n| dwarf_energy(&n.compute, &power, options.energy_mode))
        .collect();
    let repeats = T::from_count(binding.calls_per_timestep);
    Ok(BindingResult {
        label: format!("{}@{cpu_name}", binding.dwarf),
        time_s: run.total * repeats,
        energy_j: energy_multinode(&per_node)? * repeats,
        idle_w: T::from_count(u64::from(nodes)) * power.idle_w(),
        bound: run.nodes.first().map(|n| n.compute.bound()),
        cross_machine: bench.cpu.as_deref() != Some(cpu_name),
    })
}

fn project_gpu<T: Scalar>(
    binding: &DwarfBinding<T>,
    dev: &GpuDevice<T>,
    config: &ConfigPoint<T>,
    catalog: &Catalog<T>,
    library: &DwarfLibrary<T>,
) -> Result<BindingResult<T>> {
    let label = binding.label();
    let set = library
        .gpu
        .get(&binding.dwarf)
        .ok_or_else(|| Error::Unknown {
            kind: "gpu dwarf",
            name: binding.dwarf.clone(),
        })?;
    let gpu_name = config.gpu.as_deref().unwrap_or(&dev.spec);
    let gpu = catalog.gpu(gpu_name)?;
    if let Some(max) = gpu.max_domain_points {
        if dev.n > max {
            return Err(Error::config(
                label,
                format!(
                    "domain of {} points exceeds `{gpu_name}` capacity of {max}",
                    dev.n
                ),
            ));
        }
    }
    let (_, per_call) = set.predict(gpu, dev.n)?;
    let power = catalog.gpu_power(gpu_name)?;
    let s = dev
        .s_fraction
        .or(power.s_fraction)
        .ok_or_else(|| Error::config(&label, format!("no s_fraction for `{gpu_name}`")))?;
    let time_s = per_call * T::from_count(binding.calls_per_timestep);
    Ok(BindingResult {
        label: format!("{}@{gpu_name}", binding.dwarf),
        time_s,
        energy_j: energy_gpu(time_s, dev.host_idle_w, s, power.power_limit_w)?,
        idle_w: dev.host_idle_w + power.idle_w.unwrap_or_else(T::zero),
        bound: None,
        cross_machine: false,
    })
}

/// Time and energy of `workflow` at one configuration.
///
/// Bindings fold left to right: serial runs charge each side's idle draw for
/// the other's duration, overlapped runs charge the earlier finisher for the gap.
pub fn project_config<T: Scalar>(
    workflow: &WorkflowSpec<T>,
    config: &ConfigPoint<T>,
    catalog: &Catalog<T>,
    library: &DwarfLibrary<T>,
    options: &ProjectionOptions,
) -> Result<ProjectionResult<T>> {
    workflow.validate()?;
    let steps = T::from_count(workflow.timesteps);
    let mut bindings = Vec::with_capacity(workflow.bindings.len());
    for b in &workflow.bindings {
        let label = b.label();
        let mut r = match &b.device {
            Device::Cpu(dev) => project_cpu(b, dev, config, catalog, library, options),
            Device::Gpu(dev) => project_gpu(b, dev, config, catalog, library),
        }
        .map_err(in_binding(&label))?;
        r.time_s = r.time_s * steps;
        r.energy_j = r.energy_j * steps;
        bindings.push(r);
    }
    let (mut t, mut e, mut c) = (bindings[0].time_s, bindings[0].energy_j, bindings[0].idle_w);
    for b in &bindings[1..] {
        let inputs = WorkflowEnergyInputs {
            e1: e,
            e2: b.energy_j,
            t1: t,
            t2: b.time_s,
            e1_const: c,
            e2_const: b.idle_w,
        };
        if workflow.overlap {
            e = workflow_energy_overlap(&inputs);
            t = t.max(b.time_s);
        } else {
            e = workflow_energy_no_overlap(&inputs);
            t = t + b.time_s;
        }
        c = c + b.idle_w;
    }
    Ok(ProjectionResult {
        config: resolve(config, workflow),
        tts: t,
        ets: e,
        bindings,
    })
}

fn resolve<T: Scalar>(config: &ConfigPoint<T>, workflow: &WorkflowSpec<T>) -> ConfigPoint<T> {
    let cpu = workflow.bindings.iter().find_map(|b| match &b.device {
        Device::Cpu(c) => Some(c),
        Device::Gpu(_) => None,
    });
    let gpu = workflow.bindings.iter().find_map(|b| match &b.device {
        Device::Gpu(g) => Some(g),
        Device::Cpu(_) => None,
    });
    ConfigPoint {
        grid_index: config.grid_index,
        nodes: config.nodes.or(cpu.map(|c| c.nodes)),
        cores: config.cores.or(cpu.map(|c| c.state.cores)),
        frequency: config.frequency.or(cpu.map(|c| c.state.frequency)),
        cpu: config.cpu.clone().or(cpu.map(|c| c.spec.clone())),
        gpu: config.gpu.clone().or(gpu.map(|g| g.spec.clone())),
    }
}

/// A configuration that could not be projected, kept for the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejected<T> {
    pub config: ConfigPoint<T>,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome<T> {
    /// In grid order.
    pub results: Vec<ProjectionResult<T>>,
    pub rejected: Vec<Rejected<T>>,
}

/// Projects every grid point concurrently; output keeps grid order.
pub fn sweep<T: Scalar>(
    workflow: &WorkflowSpec<T>,
    grid: &[ConfigPoint<T>],
    catalog: &Catalog<T>,
    library: &DwarfLibrary<T>,
    options: &ProjectionOptions,
) -> Result<SweepOutcome<T>> {
    if grid.is_empty() {
        return Err(Error::domain("sweep grid is empty"));
    }
    workflow.validate()?;
    let outcomes: Vec<_> = grid
        .par_iter()
        .map(|p| project_config(workflow, p, catalog, library, options))
        .collect();
    let mut results = Vec::new();
    let mut rejected = Vec::new();
    for (p, o) in grid.iter().zip(outcomes) {
        match o {
            Ok(r) => results.push(r),
            Err(error) => rejected.push(Rejected {
                config: p.clone(),
                error,
            }),
        }
    }
    Ok(SweepOutcome { results, rejected })
}

/// `a` is at least as good in both and strictly better in one.
fn dominates<T: Scalar>(a: (T, T), b: (T, T)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Indices of points no other point dominates, sorted by the first
/// coordinate (stable, so ties keep input order).
///
/// ```
/// use roofcast_core::projection::pareto_indices;
/// assert_eq!(pareto_indices(&[(12.0, 90.0), (10.0, 100.0), (12.0, 110.0)]), vec![1, 0]);
/// ```
pub fn pareto_indices<T: Scalar>(points: &[(T, T)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .0
            .partial_cmp(&points[b].0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                points[a]
                    .1
                    .partial_cmp(&points[b].1)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    let mut front: Vec<usize> = Vec::new();
    for &i in &order {
        if !front.iter().any(|&f| dominates(points[f], points[i])) {
            front.push(i);
        }
    }
    front.sort_by(|&a, &b| {
        points[a]
            .0
            .partial_cmp(&points[b].0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    front
}

/// Results not dominated in (tts, ets), fastest first.
pub fn pareto_front<T: Scalar>(results: &[ProjectionResult<T>]) -> Vec<&ProjectionResult<T>> {
    let points: Vec<_> = results.iter().map(|r| (r.tts, r.ets)).collect();
    pareto_indices(&points)
        .into_iter()
        .map(|i| &results[i])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    MinTts,
    MinEts,
    /// Fastest, then cheapest.
    LexTtsEts,
    /// Cheapest, then fastest.
    LexEtsTts,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::MinTts => "min-tts",
            Policy::MinEts => "min-ets",
            Policy::LexTtsEts => "lex-tts-ets",
            Policy::LexEtsTts => "lex-ets-tts",
        }
    }
}

/// Winner under `policy`; remaining ties go to the lowest grid index.
pub fn best_by<T: Scalar>(
    results: &[ProjectionResult<T>],
    policy: Policy,
) -> Result<&ProjectionResult<T>> {
    use std::cmp::Ordering;
    let cmp = |a: T, b: T| a.partial_cmp(&b).unwrap_or(Ordering::Equal);
    let key = |a: &ProjectionResult<T>, b: &ProjectionResult<T>| -> Ordering {
        let primary = match policy {
            Policy::MinTts => cmp(a.tts, b.tts),
            Policy::MinEts => cmp(a.ets, b.ets),
            Policy::LexTtsEts => cmp(a.tts, b.tts).then(cmp(a.ets, b.ets)),
            Policy::LexEtsTts => cmp(a.ets, b.ets).then(cmp(a.tts, b.tts)),
        };
        primary.then(a.config.grid_index.cmp(&b.config.grid_index))
    };
    results
        .iter()
        .min_by(|a, b| key(a, b))
        .ok_or_else(|| Error::domain("no results to choose from"))
}

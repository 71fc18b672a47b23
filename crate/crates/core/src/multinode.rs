//! Equal partitioning of a dwarf over nodes, a per-byte communication term,
//! and the slowest-node reduction.

use std::path::Path;

use num_traits::PrimInt;
use serde::Deserialize;

use crate::catalog::{Catalog, CpuSpec, CpuState};
use crate::cpu::{dwarf_time_with_loads, DwarfModel, DwarfTime, LoopLoad};
use crate::error::{from_json_str, Error, Result};
use crate::scalar::Scalar;

/// `n` equal shares of `(w, q)`.
///
/// ```
/// let shares = roofcast_core::multinode::partition(8.70736e12_f64, 1.04509e14, 2).unwrap();
/// assert_eq!(shares[1].w, 4.35368e12);
/// ```
pub fn partition<T: Scalar>(w: T, q: T, n: u32) -> Result<Vec<LoopLoad<T>>> {
    if n == 0 {
        return Err(Error::domain("cannot partition over zero nodes"));
    }
    let k = T::from_count(u64::from(n));
    Ok(vec![LoopLoad { w: w / k, q: q / k }; n as usize])
}

/// Integer shares of `total` that sum to it exactly; the remainder goes one
/// unit each to the lowest indices.
///
/// ```
/// use roofcast_core::multinode::partition_integral;
/// assert_eq!(partition_integral(10u64, 4).unwrap(), vec![3, 3, 2, 2]);
/// ```
pub fn partition_integral<I: PrimInt>(total: I, n: u32) -> Result<Vec<I>> {
    if n == 0 {
        return Err(Error::domain("cannot partition over zero nodes"));
    }
    let k = I::from(n).ok_or_else(|| Error::domain("node count does not fit the integer type"))?;
    let (base, rem) = (total / k, total % k);
    let rem = rem.to_u64().unwrap_or(0);
    Ok((0..u64::from(n))
        .map(|i| if i < rem { base + I::one() } else { base })
        .collect())
}

/// Descriptive tag of the exchange; only `None` changes the arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommShape {
    AllToAll,
    OneToAll,
    AllToOne,
    Halo,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommPattern<T> {
    /// Seconds per byte sent or received.
    pub t_single: T,
    /// Bytes received per iteration.
    pub q_in: T,
    /// Bytes sent per iteration.
    pub q_out: T,
    pub iterations: u64,
    pub shape: CommShape,
}

impl<T: Scalar> CommPattern<T> {
    pub fn none() -> Self {
        CommPattern {
            t_single: T::zero(),
            q_in: T::zero(),
            q_out: T::zero(),
            iterations: 0,
            shape: CommShape::None,
        }
    }

    fn validate(&self) -> Result<()> {
        if [self.t_single, self.q_in, self.q_out]
            .iter()
            .any(|v| !(*v >= T::zero()) || !v.is_finite())
        {
            return Err(Error::validation(
                "communication pattern",
                "values must be finite and >= 0",
            ));
        }
        Ok(())
    }
}

/// `t_single * (q_in + q_out) * iterations`, zero for [`CommShape::None`].
///
/// ```
/// use roofcast_core::multinode::{comm_time, CommPattern, CommShape};
/// let p = CommPattern { t_single: 1e-9_f64, q_in: 1e6, q_out: 1e6, iterations: 100, shape: CommShape::Halo };
/// assert!((comm_time(&p) - 0.2).abs() < 1e-15);
/// ```
pub fn comm_time<T: Scalar>(pattern: &CommPattern<T>) -> T {
    if pattern.shape == CommShape::None {
        return T::zero();
    }
    pattern.t_single * (pattern.q_in + pattern.q_out) * T::from_count(pattern.iterations)
}

/// Whether communication hides behind computation or adds to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommMode {
    Overlap,
    Additive,
}

impl CommMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CommMode::Overlap => "overlap",
            CommMode::Additive => "additive",
        }
    }
}

/// One node's CPU, state and per-loop share of the dwarf.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAssignment<'a, T> {
    pub node_index: usize,
    pub cpu: &'a CpuSpec<T>,
    pub state: CpuState<T>,
    pub loads: Vec<LoopLoad<T>>,
}

impl<T: Scalar> NodeAssignment<'_, T> {
    /// FLOP assigned to this node.
    pub fn w(&self) -> T {
        self.loads.iter().map(|l| l.w).sum()
    }

    /// Bytes assigned to this node.
    pub fn q(&self) -> T {
        self.loads.iter().map(|l| l.q).sum()
    }
}

/// Splits every loop of `model` equally over `nodes` identical nodes.
pub fn assign<'a, T: Scalar>(
    model: &DwarfModel<T>,
    cpu: &'a CpuSpec<T>,
    state: CpuState<T>,
    nodes: u32,
) -> Result<Vec<NodeAssignment<'a, T>>> {
    let per_loop = model
        .loads()?
        .into_iter()
        .map(|l| partition(l.w, l.q, nodes))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..nodes as usize)
        .map(|i| NodeAssignment {
            node_index: i,
            cpu,
            state,
            loads: per_loop.iter().map(|shares| shares[i]).collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeTime<T> {
    pub node_index: usize,
    pub compute: DwarfTime<T>,
    /// Communication seconds actually charged (zero in overlap mode).
    pub comm_s: T,
    pub total: T,
}

/// Dwarf time on the node's share plus, in additive mode, the comm term.
pub fn node_time<T: Scalar>(
    assignment: &NodeAssignment<'_, T>,
    model: &DwarfModel<T>,
    comm: &CommPattern<T>,
    mode: CommMode,
) -> Result<NodeTime<T>> {
    comm.validate()?;
    let values = assignment.cpu.lookup_state(&assignment.state)?;
    let compute = dwarf_time_with_loads(model, &assignment.loads, values)?;
    let comm_s = match mode {
        CommMode::Overlap => T::zero(),
        CommMode::Additive => comm_time(comm),
    };
    Ok(NodeTime {
        node_index: assignment.node_index,
        total: compute.total + comm_s,
        compute,
        comm_s,
    })
}

/// Time of the slowest node.
///
/// ```
/// assert_eq!(roofcast_core::multinode::multinode_time(&[3.0_f64, 4.0, 5.0]).unwrap(), 5.0);
/// ```
pub fn multinode_time<T: Scalar>(node_times: &[T]) -> Result<T> {
    node_times
        .iter()
        .copied()
        .reduce(T::max)
        .ok_or_else(|| Error::domain("no node times to reduce"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultinodeResult<T> {
    pub nodes: Vec<NodeTime<T>>,
    pub total: T,
}

/// Equal split over `nodes` identical nodes, each evaluated concurrently.
pub fn evaluate<T: Scalar>(
    model: &DwarfModel<T>,
    cpu: &CpuSpec<T>,
    state: CpuState<T>,
    nodes: u32,
    comm: &CommPattern<T>,
    mode: CommMode,
) -> Result<MultinodeResult<T>> {
    use rayon::prelude::*;
    let nodes = assign(model, cpu, state, nodes)?
        .par_iter()
        .map(|a| node_time(a, model, comm, mode))
        .collect::<Result<Vec<_>>>()?;
    let total = multinode_time(&nodes.iter().map(|n| n.total).collect::<Vec<_>>())?;
    Ok(MultinodeResult { nodes, total })
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct CommFile<T> {
    mode: CommMode,
    #[serde(default)]
    t_single_s_per_byte: Option<T>,
    #[serde(default)]
    q_in: Option<T>,
    #[serde(default)]
    q_out: Option<T>,
    #[serde(default)]
    iterations: Option<u64>,
    shape: CommShape,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct ScenarioFile<T> {
    dwarf: String,
    nodes: u32,
    cpu: String,
    state: CpuState<T>,
    comm: CommFile<T>,
}

/// A multinode run: which dwarf, on how many nodes of which CPU state, and
/// how communication is charged.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinodeScenario<T> {
    pub dwarf: String,
    pub nodes: u32,
    pub cpu: String,
    pub state: CpuState<T>,
    pub comm: CommPattern<T>,
    pub mode: CommMode,
}

impl<T: Scalar> MultinodeScenario<T> {
    /// ```
    /// use roofcast_core::multinode::{CommMode, MultinodeScenario};
    /// let s: MultinodeScenario<f64> = MultinodeScenario::from_json(r#"{"dwarf": "sh", "nodes": 4,
    ///     "cpu": "Xeon", "state": {"freq": 2.6, "cores": 14},
    ///     "comm": {"mode": "overlap", "shape": "none"}}"#).unwrap();
    /// assert_eq!((s.nodes, s.mode), (4, CommMode::Overlap));
    /// ```
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ScenarioFile<T> = from_json_str(text)?;
        if f.nodes == 0 {
            return Err(Error::validation(
                "multinode scenario",
                "nodes must be >= 1",
            ));
        }
        let needs = f.comm.shape != CommShape::None;
        let field = |v: Option<T>, name: &str| -> Result<T> {
            match (v, needs) {
                (Some(v), _) => Ok(v),
                (None, false) => Ok(T::zero()),
                (None, true) => Err(Error::parse(
                    format!("comm.{name}"),
                    "required unless shape is `none`",
                )),
            }
        };
        let comm = CommPattern {
            t_single: field(f.comm.t_single_s_per_byte, "t_single_s_per_byte")?,
            q_in: field(f.comm.q_in, "q_in")?,
            q_out: field(f.comm.q_out, "q_out")?,
            iterations: match (f.comm.iterations, needs) {
                (Some(i), _) => i,
                (None, false) => 0,
                (None, true) => {
                    return Err(Error::parse(
                        "comm.iterations",
                        "required unless shape is `none`",
                    ))
                }
            },
            shape: f.comm.shape,
        };
        comm.validate()?;
        Ok(MultinodeScenario {
            dwarf: f.dwarf,
            nodes: f.nodes,
            cpu: f.cpu,
            state: f.state,
            comm,
            mode: f.comm.mode,
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Runs the scenario; `model` must be the dwarf the scenario names.
    pub fn evaluate(
        &self,
        model: &DwarfModel<T>,
        catalog: &Catalog<T>,
    ) -> Result<MultinodeResult<T>> {
        if model.name != self.dwarf {
            return Err(Error::Unknown {
                kind: "dwarf",
                name: self.dwarf.clone(),
            });
        }
        let cpu = catalog.cpu(&self.cpu)?;
        evaluate(model, cpu, self.state, self.nodes, &self.comm, self.mode)
    }
}

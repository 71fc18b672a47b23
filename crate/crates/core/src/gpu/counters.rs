//! CSV ingestion of exported profiler counters, one row per (kernel, device, N).

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::{derive_characteristics, GpuKernelCounters, KernelSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Header names, matching the profiler's own counter names.
pub const COUNTER_COLUMNS: [&str; 20] = [
    "Kernel",
    "Device",
    "Duration(s)",
    "Control Flow Instructions",
    "Bit Convert Instructions",
    "Misc Instructions",
    "Load/Store Instructions",
    "Integer Instructions",
    "FP Instructions(Single)",
    "FP Instructions(Double)",
    "Instructions Executed",
    "Active Cycles",
    "Executed IPC",
    "Requested Global Load Throughput(bytes/sec)",
    "Requested Global Store Throughput(bytes/sec)",
    "Requested Non Coherent Global Load Throughput(bytes/sec)",
    "Global Load Throughput(bytes/sec)",
    "Global Store Throughput(bytes/sec)",
    "Non Coherent Global Memory Load Throughput(bytes/sec)",
    "Size of computational domain",
];

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct Row<T> {
    #[serde(rename = "Kernel")]
    kernel: String,
    #[serde(rename = "Device")]
    device: String,
    #[serde(rename = "Duration(s)")]
    duration_s: T,
    #[serde(rename = "Control Flow Instructions")]
    i_cf: T,
    #[serde(rename = "Bit Convert Instructions")]
    i_bc: T,
    #[serde(rename = "Misc Instructions")]
    i_m: T,
    #[serde(rename = "Load/Store Instructions")]
    i_t: T,
    #[serde(rename = "Integer Instructions")]
    i_i: T,
    #[serde(rename = "FP Instructions(Single)")]
    i_f: T,
    #[serde(rename = "FP Instructions(Double)")]
    i_d: T,
    #[serde(rename = "Instructions Executed")]
    i_e: T,
    #[serde(rename = "Active Cycles")]
    active_cycles: T,
    #[serde(rename = "Executed IPC")]
    ipc_e: T,
    #[serde(rename = "Requested Global Load Throughput(bytes/sec)")]
    g_rl: T,
    #[serde(rename = "Requested Global Store Throughput(bytes/sec)")]
    g_rs: T,
    #[serde(rename = "Requested Non Coherent Global Load Throughput(bytes/sec)")]
    g_rlnc: T,
    #[serde(rename = "Global Load Throughput(bytes/sec)")]
    g_l: T,
    #[serde(rename = "Global Store Throughput(bytes/sec)")]
    g_s: T,
    #[serde(rename = "Non Coherent Global Memory Load Throughput(bytes/sec)")]
    g_lnc: T,
    #[serde(rename = "Size of computational domain")]
    n: T,
}

/// Parses a counters CSV. Errors carry the 1-based line number.
pub fn read_counters<T: Scalar, R: Read>(reader: R) -> Result<Vec<GpuKernelCounters<T>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse("header", e.to_string()))?
        .clone();
    for col in COUNTER_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::parse("header", format!("missing column `{col}`")));
        }
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize::<Row<T>>() {
        let r = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(format!("line {line}"), e.to_string())
        })?;
        out.push(GpuKernelCounters {
            kernel: r.kernel,
            device: r.device,
            duration_s: r.duration_s,
            i_cf: r.i_cf,
            i_bc: r.i_bc,
            i_m: r.i_m,
            i_t: r.i_t,
            i_i: r.i_i,
            i_f: r.i_f,
            i_d: r.i_d,
            i_e: r.i_e,
            active_cycles: r.active_cycles,
            ipc_e: r.ipc_e,
            g_rl: r.g_rl,
            g_rs: r.g_rs,
            g_rlnc: r.g_rlnc,
            g_l: r.g_l,
            g_s: r.g_s,
            g_lnc: r.g_lnc,
            n: r.n,
        });
    }
    Ok(out)
}

pub fn read_counters_file<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<GpuKernelCounters<T>>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_counters(file)
}

/// Groups samples by kernel and derives each kernel's characteristics.
pub fn characterize<T: Scalar>(
    name: impl Into<String>,
    samples: &[GpuKernelCounters<T>],
) -> Result<KernelSet<T>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut groups: BTreeMap<&str, Vec<GpuKernelCounters<T>>> = BTreeMap::new();
    for s in samples {
        groups.entry(&s.kernel).or_default().push(s.clone());
    }
    let kernels = groups
        .into_iter()
        .map(|(k, group)| Ok((k.to_string(), derive_characteristics(&group)?)))
        .collect::<Result<_>>()?;
    Ok(KernelSet {
        name: name.into(),
        description: None,
        kernels,
    })
}

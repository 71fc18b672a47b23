//! GPU kernel time model: profiler counters in, device-neutral kernel
//! characteristics out, and a seven-term time breakdown on any target device.

mod counters;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use counters::{characterize, read_counters, read_counters_file, COUNTER_COLUMNS};

use crate::catalog::{GpuSpec, Microarchitecture};
use crate::error::{from_json_str, Error, Result};
use crate::scalar::Scalar;

/// One profiler run of one kernel on one device. Instruction counts are summed
/// over all threads; throughputs are in B/s.
#[derive(Debug, Clone, PartialEq)]
pub struct GpuKernelCounters<T> {
    pub kernel: String,
    pub device: String,
    pub duration_s: T,
    pub i_cf: T,
    pub i_bc: T,
    pub i_m: T,
    pub i_t: T,
    pub i_i: T,
    pub i_f: T,
    pub i_d: T,
    /// Executed instructions, counted per warp.
    pub i_e: T,
    /// Carried for completeness; the time model does not use it.
    pub active_cycles: T,
    pub ipc_e: T,
    pub g_rl: T,
    pub g_rs: T,
    pub g_rlnc: T,
    pub g_l: T,
    pub g_s: T,
    pub g_lnc: T,
    /// Domain size (product of dimensions).
    pub n: T,
}

/// Size-normalised, device-averaged kernel characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct KernelCharacteristics<T> {
    pub p_i: T,
    pub p_m: T,
    pub p_cfl: T,
    pub g_e: T,
    /// Requested bytes per domain point.
    pub g_r_n: T,
    pub i_i_n: T,
    pub i_f_n: T,
    pub i_d_n: T,
    /// Executed warp instructions per domain point.
    pub i_e_n: T,
    pub ipc_e: T,
}

impl<T: Scalar> KernelCharacteristics<T> {
    pub fn validate(&self, name: &str) -> Result<()> {
        let subject = format!("kernel `{name}`");
        let fields = [
            ("p_i", self.p_i),
            ("p_m", self.p_m),
            ("p_cfl", self.p_cfl),
            ("g_e", self.g_e),
            ("g_r_n", self.g_r_n),
            ("i_i_n", self.i_i_n),
            ("i_f_n", self.i_f_n),
            ("i_d_n", self.i_d_n),
            ("i_e_n", self.i_e_n),
            ("ipc_e", self.ipc_e),
        ];
        for (field, v) in fields {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::validation(
                    &subject,
                    format!("{field} must be finite and >= 0"),
                ));
            }
        }
        let slack = T::lit(1e-9);
        if self.p_i + self.p_m + self.p_cfl > T::one() + slack {
            return Err(Error::validation(&subject, "p_i + p_m + p_cfl exceeds 1"));
        }
        if !(self.g_e > T::zero()) || self.g_e > T::one() + slack {
            return Err(Error::validation(&subject, "g_e must lie in (0, 1]"));
        }
        Ok(())
    }
}

fn mean<T: Scalar>(xs: impl Iterator<Item = T>) -> T {
    let mut n = 0u64;
    let mut s = T::zero();
    for x in xs {
        s = s + x;
        n += 1;
    }
    s / T::from_count(n)
}

/// Averages per-device characteristics of one kernel measured at one domain size.
pub fn derive_characteristics<T: Scalar>(
    samples: &[GpuKernelCounters<T>],
) -> Result<KernelCharacteristics<T>> {
    let first = samples
        .first()
        .ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
    let kernel = first.kernel.as_str();
    let inconsistent = |message: String| Error::InconsistentCounters {
        kernel: kernel.to_string(),
        message,
    };
    struct PerDevice<T> {
        p_i: T,
        p_m: T,
        p_cfl: T,
        g_e: T,
        g_r: T,
    }
    let mut per = Vec::with_capacity(samples.len());
    for s in samples {
        if s.kernel != first.kernel {
            return Err(inconsistent(format!("sample for `{}` mixed in", s.kernel)));
        }
        if s.n != first.n {
            return Err(inconsistent(format!(
                "domain size {} on `{}` differs from {}",
                s.n, s.device, first.n
            )));
        }
        let values = [
            s.duration_s,
            s.i_cf,
            s.i_bc,
            s.i_m,
            s.i_t,
            s.i_i,
            s.i_f,
            s.i_d,
            s.i_e,
            s.active_cycles,
            s.ipc_e,
            s.g_rl,
            s.g_rs,
            s.g_rlnc,
            s.g_l,
            s.g_s,
            s.g_lnc,
        ];
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(inconsistent(format!(
                "negative or non-finite counter on `{}`",
                s.device
            )));
        }
        if !(s.n > T::zero()) {
            return Err(inconsistent("domain size must be positive".into()));
        }
        if s.i_e == T::zero() {
            return Err(Error::DegenerateKernel(kernel.to_string()));
        }
        let slots = s.i_e * T::lit(32.0);
        let executed = s.i_cf + s.i_m + s.i_t + s.i_f + s.i_d + s.i_bc + s.i_i;
        let p_e = executed / slots;
        if p_e > T::one() {
            return Err(inconsistent(format!(
                "thread instructions exceed 32 x executed warp instructions on `{}`",
                s.device
            )));
        }
        let requested = s.g_rl + s.g_rs + s.g_rlnc;
        let achieved = s.g_l + s.g_s + s.g_lnc;
        let g_e = if achieved == T::zero() {
            if requested > T::zero() {
                return Err(inconsistent(format!(
                    "zero achieved throughput with nonzero requested on `{}`",
                    s.device
                )));
            }
            T::one()
        } else {
            if requested > achieved {
                return Err(inconsistent(format!(
                    "requested throughput exceeds achieved on `{}`",
                    s.device
                )));
            }
            requested / achieved
        };
        per.push(PerDevice {
            p_i: T::one() - p_e,
            p_m: s.i_m / slots,
            p_cfl: s.i_cf / slots,
            g_e,
            g_r: requested * s.duration_s,
        });
    }
    let n = first.n;
    Ok(KernelCharacteristics {
        p_i: mean(per.iter().map(|d| d.p_i)),
        p_m: mean(per.iter().map(|d| d.p_m)),
        p_cfl: mean(per.iter().map(|d| d.p_cfl)),
        g_e: mean(per.iter().map(|d| d.g_e)),
        g_r_n: mean(per.iter().map(|d| d.g_r)) / n,
        i_i_n: mean(samples.iter().map(|s| s.i_i)) / n,
        i_f_n: mean(samples.iter().map(|s| s.i_f)) / n,
        i_d_n: mean(samples.iter().map(|s| s.i_d)) / n,
        i_e_n: mean(samples.iter().map(|s| s.i_e)) / n,
        ipc_e: mean(samples.iter().map(|s| s.ipc_e)),
    })
}

/// Lowers memory efficiency on Fermi parts: a quarter below 40%, two thirds from 40% up.
///
/// ```
/// use roofcast_core::{adjust_ge_fermi, Microarchitecture};
/// assert_eq!(adjust_ge_fermi(0.30_f64, Microarchitecture::Fermi), 0.075);
/// assert_eq!(adjust_ge_fermi(0.30_f64, Microarchitecture::Maxwell), 0.30);
/// ```
pub fn adjust_ge_fermi<T: Scalar>(g_e: T, arch: Microarchitecture) -> T {
    match arch {
        Microarchitecture::Fermi if g_e < T::lit(0.4) => g_e / T::lit(4.0),
        Microarchitecture::Fermi => g_e * T::lit(2.0) / T::lit(3.0),
        _ => g_e,
    }
}

/// Seven-term time breakdown of one kernel run, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpuTimeBreakdown<T> {
    pub t_i: T,
    pub t_m: T,
    pub t_cfl: T,
    pub t_cf: T,
    pub t_cd: T,
    pub t_ci: T,
    pub t_t: T,
    pub t_sim: T,
}

impl<T: Scalar> GpuTimeBreakdown<T> {
    fn from_components(c: [T; 7]) -> Self {
        GpuTimeBreakdown {
            t_i: c[0],
            t_m: c[1],
            t_cfl: c[2],
            t_cf: c[3],
            t_cd: c[4],
            t_ci: c[5],
            t_t: c[6],
            t_sim: c.iter().copied().sum(),
        }
    }

    /// `[t_i, t_m, t_cfl, t_cf, t_cd, t_ci, t_t]`; `t_sim` is their sum in this order.
    pub fn components(&self) -> [T; 7] {
        [
            self.t_i, self.t_m, self.t_cfl, self.t_cf, self.t_cd, self.t_ci, self.t_t,
        ]
    }

    pub fn compute(&self) -> T {
        self.t_cf + self.t_cd + self.t_ci
    }

    /// Inactive, misc and control-flow issue time.
    pub fn issue(&self) -> T {
        self.t_i + self.t_m + self.t_cfl
    }
}

/// Time of one kernel over `n` domain points on `gpu`.
pub fn predict_kernel<T: Scalar>(
    chars: &KernelCharacteristics<T>,
    gpu: &GpuSpec<T>,
    n: T,
) -> Result<GpuTimeBreakdown<T>> {
    if !(n >= T::zero()) {
        return Err(Error::domain(format!("domain size {n} is negative")));
    }
    if chars.ipc_e == T::zero() {
        return Err(Error::domain("ipc_e is zero"));
    }
    let g_e = adjust_ge_fermi(chars.g_e, gpu.microarchitecture);
    if g_e == T::zero() {
        return Err(Error::domain("g_e is zero"));
    }
    let peaks = gpu.peaks();
    let two = T::lit(2.0);
    let issue_rate = chars.ipc_e * gpu.gpu_clock_hz * T::from_count(u64::from(gpu.sm_count));
    // every term is (per-point constant * n) / device rate, so scaling n by a
    // power of two scales each term exactly
    let issue = |share: T| share * chars.i_e_n * n / issue_rate;
    Ok(GpuTimeBreakdown::from_components([
        issue(chars.p_i),
        issue(chars.p_m),
        issue(chars.p_cfl),
        chars.i_f_n * two * n / peaks.single,
        chars.i_d_n * two * n / peaks.double,
        chars.i_i_n * n / peaks.int,
        chars.g_r_n * n / (gpu.bandwidth_bps * g_e),
    ]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwarfPrediction<T> {
    pub kernels: Vec<GpuTimeBreakdown<T>>,
    pub total: T,
}

/// Sums per-kernel predictions.
pub fn predict_dwarf<T: Scalar>(
    kernels: &[KernelCharacteristics<T>],
    gpu: &GpuSpec<T>,
    n: T,
) -> Result<DwarfPrediction<T>> {
    if kernels.is_empty() {
        return Err(Error::domain("dwarf has no kernels"));
    }
    let kernels = kernels
        .iter()
        .map(|k| predict_kernel(k, gpu, n))
        .collect::<Result<Vec<_>>>()?;
    let total = kernels.iter().map(|k| k.t_sim).sum();
    Ok(DwarfPrediction { kernels, total })
}

/// `(kernel name, breakdown)` pairs.
pub type NamedBreakdowns<'a, T> = Vec<(&'a str, GpuTimeBreakdown<T>)>;

/// Kernel characteristics of one dwarf, keyed by kernel name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct KernelSet<T> {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub kernels: BTreeMap<String, KernelCharacteristics<T>>,
}

impl<T: Scalar> KernelSet<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let set: KernelSet<T> = from_json_str(text)?;
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kernels.is_empty() {
            return Err(Error::validation(
                format!("kernel set `{}`", self.name),
                "no kernels",
            ));
        }
        self.kernels
            .iter()
            .try_for_each(|(name, k)| k.validate(name))
    }

    /// Per-kernel breakdowns in name order plus the total.
    pub fn predict(&self, gpu: &GpuSpec<T>, n: T) -> Result<(NamedBreakdowns<'_, T>, T)> {
        let chars: Vec<_> = self.kernels.values().copied().collect();
        let p = predict_dwarf(&chars, gpu, n)?;
        let named = self
            .kernels
            .keys()
            .map(String::as_str)
            .zip(p.kernels)
            .collect();
        Ok((named, p.total))
    }
}

/// A point on a roofline plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RooflinePoint<T> {
    /// FLOP per byte.
    pub intensity: T,
    /// FLOP/s.
    pub performance: T,
}

/// `(W/Q, W/T)`; zero work maps to the origin.
pub fn roofline_point<T: Scalar>(w: T, q: T, t: T) -> Result<RooflinePoint<T>> {
    if w == T::zero() {
        return Ok(RooflinePoint {
            intensity: T::zero(),
            performance: T::zero(),
        });
    }
    if q == T::zero() || t == T::zero() {
        return Err(Error::domain(
            "roofline point needs nonzero traffic and time",
        ));
    }
    Ok(RooflinePoint {
        intensity: w / q,
        performance: w / t,
    })
}

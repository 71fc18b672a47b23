//! Single-node loop model: W and Q estimation, per-loop Tflop/Tmop, the
//! max(compute, memory) rule, and cache-aware roofline ceilings.

mod fit;
mod model_file;

pub use fit::{fit_compute_coefficients, fit_memory_coefficients, ComputeFit, MemoryFit};

use serde::Deserialize;

use crate::catalog::{CpuSpec, CpuState, StateValues};
use crate::energy::EnergyCoefficients;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default weight of the triangular spectral truncation in the W rule.
pub const DEFAULT_SPECTRAL_FACTOR: f64 = 0.833;

/// Problem dimensions of a dwarf run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemCase<T> {
    pub nsmax: u64,
    pub gridn: u64,
    pub pts: u64,
    pub iterations: u64,
    pub fields: u64,
    /// Multiplier of the spectral rule, 0.833 unless overridden.
    pub spectral_factor: T,
}

impl<T: Scalar> ProblemCase<T> {
    pub fn new(nsmax: u64, gridn: u64, pts: u64, iterations: u64, fields: u64) -> Self {
        ProblemCase {
            nsmax,
            gridn,
            pts,
            iterations,
            fields,
            spectral_factor: T::lit(DEFAULT_SPECTRAL_FACTOR),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    ComputeAndMemory,
    MemoryOnly,
}

/// How per-iteration quantities scale with the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingRule {
    /// `nsmax^2 * gridn * factor * iter * fields * per_iter`
    Spectral,
    /// `pts * iter * fields * per_iter`
    Gridpoint,
    /// The per-iteration value is already the total.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec<T> {
    pub name: String,
    pub kind: LoopKind,
    pub scaling: ScalingRule,
    /// FLOP per iteration.
    pub w_per_iter: Option<T>,
    /// Bytes per iteration.
    pub q_per_iter: Option<T>,
    /// FLOP per byte.
    pub intensity: Option<T>,
}

/// Fitted memory-path weights (L1, L2, L3, DRAM) and compute fraction.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct LoopCoefficients<T> {
    pub v: T,
    pub x: T,
    pub y: T,
    pub z: T,
    #[serde(default)]
    pub u: Option<T>,
    /// Affine intercept in GFLOP/s.
    #[serde(default)]
    pub s: Option<T>,
}

impl<T: Scalar> LoopCoefficients<T> {
    pub fn memory(v: T, x: T, y: T, z: T) -> Self {
        LoopCoefficients {
            v,
            x,
            y,
            z,
            u: None,
            s: None,
        }
    }

    pub fn with_compute(mut self, u: T) -> Self {
        self.u = Some(u);
        self
    }

    fn validate(&self, subject: &str) -> Result<()> {
        let weights = [self.v, self.x, self.y, self.z];
        if weights
            .iter()
            .chain(self.u.iter())
            .any(|c| !(*c >= T::zero()) || !c.is_finite())
        {
            return Err(Error::validation(
                subject,
                "coefficients must be finite and >= 0",
            ));
        }
        if !weights.iter().any(|c| *c > T::zero()) {
            return Err(Error::validation(
                subject,
                "at least one of v, x, y, z must be > 0",
            ));
        }
        if let Some(s) = self.s {
            if !s.is_finite() {
                return Err(Error::validation(subject, "s must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwarfLoop<T> {
    pub spec: LoopSpec<T>,
    pub coeffs: LoopCoefficients<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwarfModel<T> {
    pub name: String,
    pub description: Option<String>,
    pub problem: ProblemCase<T>,
    pub loops: Vec<DwarfLoop<T>>,
    /// Energy regression coefficients, when fitted for this dwarf.
    pub energy: Option<EnergyCoefficients<T>>,
}

/// Work and traffic of one loop (or one node's share of it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopLoad<T> {
    pub w: T,
    pub q: T,
}

impl<T: Scalar> DwarfModel<T> {
    pub fn validate(&self) -> Result<()> {
        let subject = format!("dwarf `{}`", self.name);
        if self.loops.is_empty() {
            return Err(Error::validation(subject, "no loops"));
        }
        let p = &self.problem;
        if [p.nsmax, p.gridn, p.pts, p.iterations, p.fields].contains(&0) {
            return Err(Error::validation(
                &subject,
                "problem sizes must be positive integers",
            ));
        }
        if !(p.spectral_factor > T::zero()) {
            return Err(Error::validation(
                &subject,
                "spectral_factor must be positive",
            ));
        }
        for (i, l) in self.loops.iter().enumerate() {
            let at = format!("{subject} loop `{}`", l.spec.name);
            if self.loops[..i].iter().any(|o| o.spec.name == l.spec.name) {
                return Err(Error::validation(at, "loop name is not unique"));
            }
            l.coeffs.validate(&at)?;
            let s = &l.spec;
            if let Some(i) = s.intensity {
                if !(i > T::zero()) {
                    return Err(Error::validation(at, "intensity must be positive"));
                }
            }
            match s.kind {
                LoopKind::ComputeAndMemory => {
                    if s.w_per_iter.is_none() {
                        return Err(Error::validation(at, "compute loop needs w_per_iter"));
                    }
                    if s.intensity.is_none() && s.q_per_iter.is_none() {
                        return Err(Error::UnderspecifiedLoop(s.name.clone()));
                    }
                    if l.coeffs.u.is_none() {
                        return Err(Error::validation(at, "compute loop needs coefficient u"));
                    }
                }
                LoopKind::MemoryOnly => {
                    if s.q_per_iter.is_none() {
                        return Err(Error::UnderspecifiedLoop(s.name.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whole-problem W and Q of every loop, in loop order.
    pub fn loads(&self) -> Result<Vec<LoopLoad<T>>> {
        self.loops
            .iter()
            .map(|l| {
                let w = match l.spec.kind {
                    LoopKind::MemoryOnly => T::zero(),
                    LoopKind::ComputeAndMemory => estimate_w(&l.spec, &self.problem)?,
                };
                let q = estimate_q(&l.spec, &self.problem, w)?.bytes;
                Ok(LoopLoad { w, q })
            })
            .collect()
    }
}

fn scaled<T: Scalar>(rule: ScalingRule, case: &ProblemCase<T>, per_iter: T) -> T {
    let runs = T::from_count(case.iterations) * T::from_count(case.fields);
    match rule {
        ScalingRule::Spectral => {
            let points = T::from_count(case.nsmax * case.nsmax * case.gridn);
            points * case.spectral_factor * runs * per_iter
        }
        ScalingRule::Gridpoint => T::from_count(case.pts) * runs * per_iter,
        ScalingRule::Explicit => per_iter,
    }
}

/// Total FLOP of a compute loop.
///
/// ```
/// use roofcast_core::cpu::{estimate_w, LoopKind, LoopSpec, ProblemCase, ScalingRule};
/// let dgemm = LoopSpec { name: "dgemm".into(), kind: LoopKind::ComputeAndMemory,
///     scaling: ScalingRule::Spectral, w_per_iter: Some(2.0), q_per_iter: None, intensity: Some(0.083) };
/// let w: f64 = estimate_w(&dgemm, &ProblemCase::new(639, 640, 1661440, 100, 200)).unwrap();
/// assert!((w / 8.70736e12 - 1.0).abs() < 1e-6);
/// ```
pub fn estimate_w<T: Scalar>(spec: &LoopSpec<T>, case: &ProblemCase<T>) -> Result<T> {
    match (spec.kind, spec.w_per_iter) {
        (LoopKind::MemoryOnly, _) => Err(Error::NoWork(spec.name.clone())),
        (LoopKind::ComputeAndMemory, None) => Err(Error::validation(
            format!("loop `{}`", spec.name),
            "missing w_per_iter",
        )),
        (LoopKind::ComputeAndMemory, Some(w)) => Ok(scaled(spec.scaling, case, w)),
    }
}

/// Which input an estimate of Q came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficSource {
    Intensity,
    BytesPerIteration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficEstimate<T> {
    pub bytes: T,
    pub source: TrafficSource,
}

/// Total bytes moved: `W / I` when an intensity is given, else the scaled bytes per iteration.
pub fn estimate_q<T: Scalar>(
    spec: &LoopSpec<T>,
    case: &ProblemCase<T>,
    w: T,
) -> Result<TrafficEstimate<T>> {
    match (spec.intensity, spec.q_per_iter) {
        (Some(i), _) => Ok(TrafficEstimate {
            bytes: w / i,
            source: TrafficSource::Intensity,
        }),
        (None, Some(q)) => Ok(TrafficEstimate {
            bytes: scaled(spec.scaling, case, q),
            source: TrafficSource::BytesPerIteration,
        }),
        (None, None) => Err(Error::UnderspecifiedLoop(spec.name.clone())),
    }
}

/// Seconds per FLOP: `1 / (P*U [+ S])` with P and S in GFLOP/s.
pub fn t_flop<T: Scalar>(perf_gflops: T, coeffs: &LoopCoefficients<T>) -> Result<T> {
    let u = coeffs
        .u
        .ok_or_else(|| Error::domain("loop has no compute coefficient u"))?;
    let rate = perf_gflops * u + coeffs.s.unwrap_or_else(T::zero);
    if !(rate > T::zero()) {
        return Err(Error::domain(format!(
            "effective performance {rate} GFLOP/s is not positive"
        )));
    }
    Ok(T::one() / (rate * T::giga()))
}

/// Seconds per byte: `1 / (L1*V + L2*X + L3*Y + DRAM*Z)` with bandwidths in GB/s.
pub fn t_mop<T: Scalar>(values: &StateValues<T>, coeffs: &LoopCoefficients<T>) -> Result<T> {
    let rate = values.bw_l1 * coeffs.v
        + values.bw_l2 * coeffs.x
        + values.bw_l3 * coeffs.y
        + values.bw_dram * coeffs.z;
    if !(rate > T::zero()) {
        return Err(Error::domain("effective bandwidth is zero"));
    }
    Ok(T::one() / (rate * T::giga()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Compute,
    Memory,
    Balanced,
}

impl Bound {
    pub fn as_str(self) -> &'static str {
        match self {
            Bound::Compute => "compute",
            Bound::Memory => "memory",
            Bound::Balanced => "balanced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopTime<T> {
    /// `W * t_flop`
    pub compute_s: T,
    /// `Q * t_mop`
    pub memory_s: T,
    pub time_s: T,
    pub bound: Bound,
}

/// `max(W * t_flop, Q * t_mop)` and the side that set it.
///
/// ```
/// use roofcast_core::cpu::{loop_time, Bound};
/// let t = loop_time(10.0_f64, 4.0, 1.0, 1.0);
/// assert_eq!((t.time_s, t.bound), (10.0, Bound::Compute));
/// ```
pub fn loop_time<T: Scalar>(w: T, q: T, t_flop: T, t_mop: T) -> LoopTime<T> {
    let compute_s = w * t_flop;
    let memory_s = q * t_mop;
    let bound = if compute_s > memory_s {
        Bound::Compute
    } else if memory_s > compute_s {
        Bound::Memory
    } else {
        Bound::Balanced
    };
    LoopTime {
        compute_s,
        memory_s,
        time_s: compute_s.max(memory_s),
        bound,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopTiming<T> {
    pub name: String,
    pub load: LoopLoad<T>,
    /// `None` for loops without work.
    pub t_flop: Option<T>,
    pub t_mop: T,
    pub time: LoopTime<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwarfTime<T> {
    pub loops: Vec<LoopTiming<T>>,
    pub total: T,
}

impl<T: Scalar> DwarfTime<T> {
    /// Bound side of the whole dwarf: the side with the larger summed time.
    pub fn bound(&self) -> Bound {
        let c: T = self.loops.iter().map(|l| l.time.compute_s).sum();
        let m: T = self.loops.iter().map(|l| l.time.memory_s).sum();
        loop_time(c, m, T::one(), T::one()).bound
    }
}

/// Whole-problem dwarf time at one tabulated state.
pub fn dwarf_time<T: Scalar>(
    model: &DwarfModel<T>,
    state: &CpuState<T>,
    spec: &CpuSpec<T>,
) -> Result<DwarfTime<T>> {
    let values = spec.lookup_state(state)?;
    dwarf_time_with_loads(model, &model.loads()?, values)
}

/// Dwarf time for explicit per-loop loads, e.g. one node's share.
pub fn dwarf_time_with_loads<T: Scalar>(
    model: &DwarfModel<T>,
    loads: &[LoopLoad<T>],
    values: &StateValues<T>,
) -> Result<DwarfTime<T>> {
    if loads.len() != model.loops.len() {
        return Err(Error::domain(format!(
            "{} loads for {} loops",
            loads.len(),
            model.loops.len()
        )));
    }
    let loops = model
        .loops
        .iter()
        .zip(loads)
        .map(|(l, load)| {
            let tm = t_mop(values, &l.coeffs)?;
            let tf = if load.w > T::zero() {
                Some(t_flop(values.perf, &l.coeffs)?)
            } else {
                None
            };
            Ok(LoopTiming {
                name: l.spec.name.clone(),
                load: *load,
                t_flop: tf,
                t_mop: tm,
                time: loop_time(load.w, load.q, tf.unwrap_or_else(T::zero), tm),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = loops.iter().map(|l| l.time.time_s).sum();
    Ok(DwarfTime { loops, total })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RooflineRow<T> {
    pub intensity: T,
    /// L1, L2, L3, DRAM ceilings in GFLOP/s.
    pub ceilings: [T; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RooflineSeries<T> {
    pub peak: T,
    pub rows: Vec<RooflineRow<T>>,
}

/// Per-level ceilings `min(peak, b * I)`; `peak` defaults to the state's perf.
pub fn roofline_series<T: Scalar>(
    spec: &CpuSpec<T>,
    state: &CpuState<T>,
    intensities: &[T],
    effective_peak: Option<T>,
) -> Result<RooflineSeries<T>> {
    let values = spec.lookup_state(state)?;
    if intensities.iter().any(|i| !(*i > T::zero())) {
        return Err(Error::domain("roofline intensities must be positive"));
    }
    if intensities.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("roofline intensities must be sorted"));
    }
    let peak = effective_peak.unwrap_or(values.perf);
    let rows = intensities
        .iter()
        .map(|&i| RooflineRow {
            intensity: i,
            ceilings: values.bandwidths().map(|b| (b * i).min(peak)),
        })
        .collect();
    Ok(RooflineSeries { peak, rows })
}

/// `count` intensities spaced evenly in log10 between `lo` and `hi` inclusive.
pub fn log_space<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            let step = (b - a) / T::from_count((count - 1) as u64);
            (0..count)
                .map(|k| {
                    if k == count - 1 {
                        hi
                    } else {
                        T::lit(10.0).powf(a + step * T::from_count(k as u64))
                    }
                })
                .collect()
        }
    }
}

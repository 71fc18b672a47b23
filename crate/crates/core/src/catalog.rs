//! Hardware capability tables: CPU state grids, GPU device sheets, power benches.
//!
//! ```
//! use roofcast_core::{load_catalog, Catalog, CpuState};
//! let cat: Catalog = load_catalog(r#"{"cpus": [{"name": "toy", "physical_cores": 1,
//!     "vector_width_doubles": 4, "fma_ops_per_cycle": 2,
//!     "states": [{"freq": 2.6, "cores": 1, "perf_gflops": 20.8,
//!                 "l1_gbps": 126, "l2_gbps": 78, "l3_gbps": 33, "dram_gbps": 13.4}]}]}"#).unwrap();
//! let v = cat.cpu("toy").unwrap().lookup_state(&CpuState::new(2.6, 1)).unwrap();
//! assert_eq!(v.perf, 20.8);
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::error::{from_json_str, Error, Result};
use crate::scalar::Scalar;

/// Operating frequency of a CPU state. `Turbo` is a discrete tag, not a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency<T> {
    Ghz(T),
    Turbo,
}

impl<T: Scalar> Frequency<T> {
    pub fn ghz(self) -> Option<T> {
        match self {
            Frequency::Ghz(f) => Some(f),
            Frequency::Turbo => None,
        }
    }

    fn cast<U: Scalar>(self) -> Frequency<U> {
        match self {
            Frequency::Ghz(f) => Frequency::Ghz(U::lit(f.as_f64())),
            Frequency::Turbo => Frequency::Turbo,
        }
    }
}

impl<T: Scalar> fmt::Display for Frequency<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Ghz(g) => write!(f, "{}", g.as_f64()),
            Frequency::Turbo => f.write_str("turbo"),
        }
    }
}

impl<T: Scalar> FromStr for Frequency<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("turbo") {
            return Ok(Frequency::Turbo);
        }
        let ghz: f64 = s
            .parse()
            .map_err(|_| Error::parse("freq", format!("`{s}` is neither a number nor `turbo`")))?;
        Ok(Frequency::Ghz(T::lit(ghz)))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawFrequency {
    Number(f64),
    Tag(String),
}

impl<'de, T: Scalar> Deserialize<'de> for Frequency<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawFrequency::deserialize(d)? {
            RawFrequency::Number(g) => Ok(Frequency::Ghz(T::lit(g))),
            RawFrequency::Tag(t) if t.eq_ignore_ascii_case("turbo") => Ok(Frequency::Turbo),
            RawFrequency::Tag(t) => Err(serde::de::Error::custom(format!(
                "frequency tag `{t}` is not `turbo`"
            ))),
        }
    }
}

/// A (frequency, active cores) operating point.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CpuState<T> {
    #[serde(rename = "freq")]
    pub frequency: Frequency<T>,
    pub cores: u32,
}

impl<T: Scalar> CpuState<T> {
    pub fn new(ghz: f64, cores: u32) -> Self {
        CpuState {
            frequency: Frequency::Ghz(T::lit(ghz)),
            cores,
        }
    }

    pub fn turbo(cores: u32) -> Self {
        CpuState {
            frequency: Frequency::Turbo,
            cores,
        }
    }
}

impl<T: Scalar> fmt::Display for CpuState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(f={}, n={})", self.frequency, self.cores)
    }
}

/// Measured values of one CPU state: GFLOP/s and GB/s per memory level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateValues<T> {
    pub perf: T,
    pub bw_l1: T,
    pub bw_l2: T,
    pub bw_l3: T,
    pub bw_dram: T,
}

impl<T: Scalar> StateValues<T> {
    /// Bandwidths in hierarchy order L1, L2, L3, DRAM.
    pub fn bandwidths(&self) -> [T; 4] {
        [self.bw_l1, self.bw_l2, self.bw_l3, self.bw_dram]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpuSpec<T> {
    pub name: String,
    pub physical_cores: u32,
    pub vector_width_doubles: u32,
    pub fma_ops_per_cycle: u32,
    states: Vec<(CpuState<T>, StateValues<T>)>,
}

impl<T: Scalar> CpuSpec<T> {
    /// Builds and validates a spec from explicit states.
    pub fn new(
        name: impl Into<String>,
        physical_cores: u32,
        vector_width_doubles: u32,
        fma_ops_per_cycle: u32,
        states: Vec<(CpuState<T>, StateValues<T>)>,
    ) -> Result<Self> {
        let spec = CpuSpec {
            name: name.into(),
            physical_cores,
            vector_width_doubles,
            fma_ops_per_cycle,
            states,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Exact tabulated values at `state`. Never interpolates.
    pub fn lookup_state(&self, state: &CpuState<T>) -> Result<&StateValues<T>> {
        self.states
            .iter()
            .find(|(s, _)| s == state)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::MissingState {
                spec: self.name.clone(),
                state: state.to_string(),
            })
    }

    pub fn states(&self) -> impl Iterator<Item = &(CpuState<T>, StateValues<T>)> {
        self.states.iter()
    }

    fn validate(&self) -> Result<()> {
        let subject = |extra: &str| format!("cpu `{}`{extra}", self.name);
        if self.physical_cores == 0 || self.vector_width_doubles == 0 || self.fma_ops_per_cycle == 0
        {
            return Err(Error::validation(
                subject(""),
                "physical_cores, vector_width_doubles and fma_ops_per_cycle must be positive",
            ));
        }
        for (i, (state, v)) in self.states.iter().enumerate() {
            let at = subject(&format!(" state {state}"));
            if let Frequency::Ghz(f) = state.frequency {
                if !(f > T::zero()) || !f.is_finite() {
                    return Err(Error::validation(at, "frequency must be positive"));
                }
            }
            if state.cores == 0 || state.cores > self.physical_cores {
                return Err(Error::validation(
                    at,
                    format!("cores must lie in 1..={}", self.physical_cores),
                ));
            }
            let all = [v.perf, v.bw_l1, v.bw_l2, v.bw_l3, v.bw_dram];
            if all.iter().any(|x| !(*x > T::zero()) || !x.is_finite()) {
                return Err(Error::validation(
                    at,
                    "perf and all four bandwidths must be > 0",
                ));
            }
            if self.states[..i].iter().any(|(s, _)| s == state) {
                return Err(Error::validation(at, "state listed twice"));
            }
        }
        // perf must not drop when cores are added at a fixed frequency
        for (state, v) in &self.states {
            for (other, w) in &self.states {
                if other.frequency == state.frequency
                    && other.cores > state.cores
                    && w.perf < v.perf
                {
                    return Err(Error::validation(
                        subject(&format!(" state {other}")),
                        format!("perf {} is below the {} at {state}", w.perf, v.perf),
                    ));
                }
            }
        }
        Ok(())
    }

    fn cast<U: Scalar>(&self) -> CpuSpec<U> {
        let c = |x: T| U::lit(x.as_f64());
        CpuSpec {
            name: self.name.clone(),
            physical_cores: self.physical_cores,
            vector_width_doubles: self.vector_width_doubles,
            fma_ops_per_cycle: self.fma_ops_per_cycle,
            states: self
                .states
                .iter()
                .map(|(s, v)| {
                    (
                        CpuState {
                            frequency: s.frequency.cast(),
                            cores: s.cores,
                        },
                        StateValues {
                            perf: c(v.perf),
                            bw_l1: c(v.bw_l1),
                            bw_l2: c(v.bw_l2),
                            bw_l3: c(v.bw_l3),
                            bw_dram: c(v.bw_dram),
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Free-function form of [`CpuSpec::lookup_state`].
pub fn lookup_state<'a, T: Scalar>(
    spec: &'a CpuSpec<T>,
    state: &CpuState<T>,
) -> Result<&'a StateValues<T>> {
    spec.lookup_state(state)
}

/// Theoretical peak in GFLOP/s: `ghz * vector_width * ops_per_clock * cores`.
///
/// ```
/// assert_eq!(roofcast_core::cpu_peak_performance(2.6_f64, 4, 2, 14), 291.2);
/// ```
pub fn cpu_peak_performance<T: Scalar>(
    frequency_ghz: T,
    vector_width: u32,
    vector_ops_per_clock: u32,
    cores: u32,
) -> T {
    frequency_ghz
        * T::from_count(u64::from(vector_width))
        * T::from_count(u64::from(vector_ops_per_clock))
        * T::from_count(u64::from(cores))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Microarchitecture {
    Fermi,
    Kepler,
    Maxwell,
    Other,
}

/// Per-SM issue width for double, single and integer operations.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct OpsPerClock<T> {
    pub double: T,
    pub single: T,
    pub int: T,
}

/// Device peaks in FLOP/s (double, single) and OP/s (int).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpuPeaks<T> {
    pub double: T,
    pub single: T,
    pub int: T,
}

/// Vendor-published peaks; any field may be missing.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct PublishedPeaks<T> {
    pub double: Option<T>,
    pub single: Option<T>,
    pub int: Option<T>,
}

impl<T> Default for PublishedPeaks<T> {
    fn default() -> Self {
        PublishedPeaks {
            double: None,
            single: None,
            int: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct GpuSpec<T> {
    pub name: String,
    pub microarchitecture: Microarchitecture,
    /// C_G in Hz.
    pub gpu_clock_hz: T,
    #[serde(default)]
    pub mem_clock_hz: Option<T>,
    #[serde(default)]
    pub mem_bus_bits: Option<u32>,
    pub sm_count: u32,
    pub ops_per_clock_per_sm: OpsPerClock<T>,
    #[serde(default, rename = "peak")]
    pub published_peaks: PublishedPeaks<T>,
    /// G_max in B/s.
    pub bandwidth_bps: T,
    /// Largest domain a single device can hold; `None` means unbounded.
    #[serde(default)]
    pub max_domain_points: Option<T>,
}

impl<T: Scalar> GpuSpec<T> {
    /// Published peaks where present, derived ones elsewhere.
    pub fn peaks(&self) -> GpuPeaks<T> {
        let derived = gpu_peaks(self);
        let p = &self.published_peaks;
        GpuPeaks {
            double: p.double.unwrap_or(derived.double),
            single: p.single.unwrap_or(derived.single),
            int: p.int.unwrap_or(derived.int),
        }
    }

    fn validate(&self) -> Result<()> {
        let subject = format!("gpu `{}`", self.name);
        let o = &self.ops_per_clock_per_sm;
        let positive = [
            ("gpu_clock_hz", self.gpu_clock_hz),
            ("bandwidth_bps", self.bandwidth_bps),
            ("ops_per_clock_per_sm.double", o.double),
            ("ops_per_clock_per_sm.single", o.single),
            ("ops_per_clock_per_sm.int", o.int),
        ];
        for (field, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::validation(
                    &subject,
                    format!("{field} must be positive"),
                ));
            }
        }
        if self.sm_count == 0 {
            return Err(Error::validation(&subject, "sm_count must be positive"));
        }
        if let Some(m) = self.max_domain_points {
            if !(m > T::zero()) {
                return Err(Error::validation(
                    &subject,
                    "max_domain_points must be positive",
                ));
            }
        }
        let derived = gpu_peaks(self);
        let checks = [
            ("peak.double", self.published_peaks.double, derived.double),
            ("peak.single", self.published_peaks.single, derived.single),
            ("peak.int", self.published_peaks.int, derived.int),
        ];
        for (field, published, derived) in checks {
            let Some(p) = published else { continue };
            if !(p > T::zero()) {
                return Err(Error::validation(
                    &subject,
                    format!("{field} must be positive"),
                ));
            }
            if ((p - derived) / derived).abs() > T::lit(0.01) {
                return Err(Error::validation(
                    &subject,
                    format!("{field} {p} differs from the derived {derived} by more than 1%"),
                ));
            }
        }
        Ok(())
    }
}

/// Peaks derived from clock, SM count and per-SM issue width. Floating-point
/// peaks count a fused multiply-add as two operations; the integer peak does not.
pub fn gpu_peaks<T: Scalar>(spec: &GpuSpec<T>) -> GpuPeaks<T> {
    let base = spec.gpu_clock_hz * T::from_count(u64::from(spec.sm_count));
    let o = &spec.ops_per_clock_per_sm;
    let two = T::lit(2.0);
    GpuPeaks {
        double: base * o.double * two,
        single: base * o.single * two,
        int: base * o.int,
    }
}

/// Package and DRAM power of one loaded or idle bench reading, in W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchPower<T> {
    pub pkg_w: T,
    pub dram_w: T,
}

/// Full-load (per state) and idle (per frequency) power readings of one machine.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBench<T> {
    pub name: String,
    /// Machine the readings were taken on, when known.
    pub cpu: Option<String>,
    loaded: Vec<(CpuState<T>, BenchPower<T>)>,
    idle: Vec<(Frequency<T>, BenchPower<T>)>,
}

impl<T: Scalar> EnergyBench<T> {
    pub fn new(
        name: impl Into<String>,
        cpu: Option<String>,
        loaded: Vec<(CpuState<T>, BenchPower<T>)>,
        idle: Vec<(Frequency<T>, BenchPower<T>)>,
    ) -> Result<Self> {
        let bench = EnergyBench {
            name: name.into(),
            cpu,
            loaded,
            idle,
        };
        bench.validate()?;
        Ok(bench)
    }

    pub fn loaded_power(&self, state: &CpuState<T>) -> Result<BenchPower<T>> {
        self.loaded
            .iter()
            .find(|(s, _)| s == state)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::MissingState {
                spec: format!("energy bench `{}`", self.name),
                state: state.to_string(),
            })
    }

    pub fn idle_power(&self, frequency: Frequency<T>) -> Result<BenchPower<T>> {
        self.idle
            .iter()
            .find(|(f, _)| *f == frequency)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::MissingState {
                spec: format!("energy bench `{}` (idle)", self.name),
                state: format!("f={frequency}"),
            })
    }

    pub fn loaded(&self) -> impl Iterator<Item = &(CpuState<T>, BenchPower<T>)> {
        self.loaded.iter()
    }

    fn validate(&self) -> Result<()> {
        let subject = |s: &dyn fmt::Display| format!("energy bench `{}` {s}", self.name);
        for (f, p) in &self.idle {
            if !(p.pkg_w >= T::zero() && p.dram_w >= T::zero()) {
                return Err(Error::validation(
                    subject(&format!("idle f={f}")),
                    "idle power must be nonnegative",
                ));
            }
        }
        for (state, p) in &self.loaded {
            let at = subject(state);
            let idle = self
                .idle
                .iter()
                .find(|(f, _)| *f == state.frequency)
                .map(|(_, p)| *p)
                .ok_or_else(|| Error::validation(&at, "no idle reading at this frequency"))?;
            if !(p.pkg_w >= idle.pkg_w) {
                return Err(Error::validation(
                    &at,
                    format!("pkg power {} W is below idle {} W", p.pkg_w, idle.pkg_w),
                ));
            }
            if !(p.dram_w >= idle.dram_w) {
                return Err(Error::validation(
                    &at,
                    format!("dram power {} W is below idle {} W", p.dram_w, idle.dram_w),
                ));
            }
            for (other, q) in &self.loaded {
                if other.frequency == state.frequency
                    && other.cores > state.cores
                    && (q.pkg_w < p.pkg_w || q.dram_w < p.dram_w)
                {
                    return Err(Error::validation(
                        subject(other),
                        format!("power drops below the reading at {state}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct GpuPowerSpec<T> {
    pub gpu: String,
    /// E_gpu in W.
    pub power_limit_w: T,
    /// Default fraction of the limit drawn by a dwarf.
    #[serde(default)]
    pub s_fraction: Option<T>,
    /// Device draw while idle, used as a constant-power term in workflows.
    #[serde(default)]
    pub idle_w: Option<T>,
}

impl<T: Scalar> GpuPowerSpec<T> {
    fn validate(&self) -> Result<()> {
        let subject = format!("gpu power `{}`", self.gpu);
        if !(self.power_limit_w > T::zero()) {
            return Err(Error::validation(subject, "power_limit_w must be positive"));
        }
        if let Some(s) = self.s_fraction {
            if !(s >= T::zero() && s <= T::one()) {
                return Err(Error::validation(subject, "s_fraction must lie in [0, 1]"));
            }
        }
        if let Some(w) = self.idle_w {
            if !(w >= T::zero()) {
                return Err(Error::validation(subject, "idle_w must be nonnegative"));
            }
        }
        Ok(())
    }
}

/// Immutable registry of every spec in a catalog document.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog<T> {
    pub cpus: Vec<CpuSpec<T>>,
    pub gpus: Vec<GpuSpec<T>>,
    pub energy_benches: Vec<EnergyBench<T>>,
    pub gpu_power: Vec<GpuPowerSpec<T>>,
}

impl<T> Default for Catalog<T> {
    fn default() -> Self {
        Catalog {
            cpus: Vec::new(),
            gpus: Vec::new(),
            energy_benches: Vec::new(),
            gpu_power: Vec::new(),
        }
    }
}

fn find<'a, S>(
    items: &'a [S],
    kind: &'static str,
    name: &str,
    key: impl Fn(&S) -> &str,
) -> Result<&'a S> {
    items
        .iter()
        .find(|s| key(s) == name)
        .ok_or_else(|| Error::Unknown {
            kind,
            name: name.to_string(),
        })
}

impl<T: Scalar> Catalog<T> {
    pub fn is_empty(&self) -> bool {
        self.cpus.is_empty()
            && self.gpus.is_empty()
            && self.energy_benches.is_empty()
            && self.gpu_power.is_empty()
    }

    pub fn cpu(&self, name: &str) -> Result<&CpuSpec<T>> {
        find(&self.cpus, "cpu", name, |s| &s.name)
    }

    pub fn gpu(&self, name: &str) -> Result<&GpuSpec<T>> {
        find(&self.gpus, "gpu", name, |s| &s.name)
    }

    pub fn energy_bench(&self, name: &str) -> Result<&EnergyBench<T>> {
        find(&self.energy_benches, "energy bench", name, |s| &s.name)
    }

    /// First bench recorded on the named CPU.
    pub fn energy_bench_for_cpu(&self, cpu: &str) -> Option<&EnergyBench<T>> {
        self.energy_benches
            .iter()
            .find(|b| b.cpu.as_deref() == Some(cpu))
    }

    pub fn gpu_power(&self, gpu: &str) -> Result<&GpuPowerSpec<T>> {
        find(&self.gpu_power, "gpu power spec", gpu, |s| &s.gpu)
    }

    fn validate(&self) -> Result<()> {
        fn unique<S>(items: &[S], kind: &str, key: impl Fn(&S) -> &str) -> Result<()> {
            let mut seen = BTreeMap::new();
            for s in items {
                if seen.insert(key(s), ()).is_some() {
                    return Err(Error::validation(
                        format!("{kind} `{}`", key(s)),
                        "name appears more than once",
                    ));
                }
            }
            Ok(())
        }
        unique(&self.cpus, "cpu", |s| &s.name)?;
        unique(&self.gpus, "gpu", |s| &s.name)?;
        unique(&self.energy_benches, "energy bench", |s| &s.name)?;
        unique(&self.gpu_power, "gpu power", |s| &s.gpu)?;
        self.cpus.iter().try_for_each(CpuSpec::validate)?;
        self.gpus.iter().try_for_each(GpuSpec::validate)?;
        self.energy_benches
            .iter()
            .try_for_each(EnergyBench::validate)?;
        self.gpu_power.iter().try_for_each(GpuPowerSpec::validate)
    }

    /// Converts every value to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Catalog<U> {
        let c = |x: T| U::lit(x.as_f64());
        let co = |x: Option<T>| x.map(c);
        Catalog {
            cpus: self.cpus.iter().map(CpuSpec::cast).collect(),
            gpus: self
                .gpus
                .iter()
                .map(|g| GpuSpec {
                    name: g.name.clone(),
                    microarchitecture: g.microarchitecture,
                    gpu_clock_hz: c(g.gpu_clock_hz),
                    mem_clock_hz: co(g.mem_clock_hz),
                    mem_bus_bits: g.mem_bus_bits,
                    sm_count: g.sm_count,
                    ops_per_clock_per_sm: OpsPerClock {
                        double: c(g.ops_per_clock_per_sm.double),
                        single: c(g.ops_per_clock_per_sm.single),
                        int: c(g.ops_per_clock_per_sm.int),
                    },
                    published_peaks: PublishedPeaks {
                        double: co(g.published_peaks.double),
                        single: co(g.published_peaks.single),
                        int: co(g.published_peaks.int),
                    },
                    bandwidth_bps: c(g.bandwidth_bps),
                    max_domain_points: co(g.max_domain_points),
                })
                .collect(),
            energy_benches: self
                .energy_benches
                .iter()
                .map(|b| {
                    let p = |p: &BenchPower<T>| BenchPower {
                        pkg_w: c(p.pkg_w),
                        dram_w: c(p.dram_w),
                    };
                    EnergyBench {
                        name: b.name.clone(),
                        cpu: b.cpu.clone(),
                        loaded: b
                            .loaded
                            .iter()
                            .map(|(s, w)| {
                                (
                                    CpuState {
                                        frequency: s.frequency.cast(),
                                        cores: s.cores,
                                    },
                                    p(w),
                                )
                            })
                            .collect(),
                        idle: b.idle.iter().map(|(f, w)| (f.cast(), p(w))).collect(),
                    }
                })
                .collect(),
            gpu_power: self
                .gpu_power
                .iter()
                .map(|g| GpuPowerSpec {
                    gpu: g.gpu.clone(),
                    power_limit_w: c(g.power_limit_w),
                    s_fraction: co(g.s_fraction),
                    idle_w: co(g.idle_w),
                })
                .collect(),
        }
    }
}

// --- file schema -----------------------------------------------------------

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct CatalogFile<T> {
    #[serde(default)]
    cpus: Vec<CpuFile<T>>,
    #[serde(default)]
    gpus: Vec<GpuSpec<T>>,
    #[serde(default)]
    energy_benches: Vec<BenchFile<T>>,
    #[serde(default)]
    gpu_power: Vec<GpuPowerSpec<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct CpuFile<T> {
    name: String,
    physical_cores: u32,
    vector_width_doubles: u32,
    fma_ops_per_cycle: u32,
    states: Vec<StateRecord<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct StateRecord<T> {
    freq: Frequency<T>,
    cores: u32,
    perf_gflops: T,
    l1_gbps: T,
    l2_gbps: T,
    l3_gbps: T,
    dram_gbps: T,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct BenchFile<T> {
    name: String,
    #[serde(default)]
    cpu: Option<String>,
    loaded: Vec<LoadedRecord<T>>,
    idle: Vec<IdleRecord<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct LoadedRecord<T> {
    freq: Frequency<T>,
    cores: u32,
    pkg_w: T,
    dram_w: T,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct IdleRecord<T> {
    freq: Frequency<T>,
    pkg_idle_w: T,
    dram_idle_w: T,
}

/// Parses and validates a catalog JSON document. Blank input yields an empty catalog.
pub fn load_catalog<T: Scalar>(document: &str) -> Result<Catalog<T>> {
    if document.trim().is_empty() {
        return Ok(Catalog::default());
    }
    let file: CatalogFile<T> = from_json_str(document)?;
    let catalog = Catalog {
        cpus: file
            .cpus
            .into_iter()
            .map(|c| CpuSpec {
                name: c.name,
                physical_cores: c.physical_cores,
                vector_width_doubles: c.vector_width_doubles,
                fma_ops_per_cycle: c.fma_ops_per_cycle,
                states: c
                    .states
                    .into_iter()
                    .map(|r| {
                        (
                            CpuState {
                                frequency: r.freq,
                                cores: r.cores,
                            },
                            StateValues {
                                perf: r.perf_gflops,
                                bw_l1: r.l1_gbps,
                                bw_l2: r.l2_gbps,
                                bw_l3: r.l3_gbps,
                                bw_dram: r.dram_gbps,
                            },
                        )
                    })
                    .collect(),
            })
            .collect(),
        gpus: file.gpus,
        energy_benches: file
            .energy_benches
            .into_iter()
            .map(|b| EnergyBench {
                name: b.name,
                cpu: b.cpu,
                loaded: b
                    .loaded
                    .into_iter()
                    .map(|r| {
                        (
                            CpuState {
                                frequency: r.freq,
                                cores: r.cores,
                            },
                            BenchPower {
                                pkg_w: r.pkg_w,
                                dram_w: r.dram_w,
                            },
                        )
                    })
                    .collect(),
                idle: b
                    .idle
                    .into_iter()
                    .map(|r| {
                        (
                            r.freq,
                            BenchPower {
                                pkg_w: r.pkg_idle_w,
                                dram_w: r.dram_idle_w,
                            },
                        )
                    })
                    .collect(),
            })
            .collect(),
        gpu_power: file.gpu_power,
    };
    catalog.validate()?;
    Ok(catalog)
}

pub fn load_catalog_file<T: Scalar>(path: impl AsRef<Path>) -> Result<Catalog<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_catalog(&text)
}

//! Per-loop coefficient fits against a CPU's state grid.

use crate::catalog::{CpuSpec, CpuState};
use crate::error::{Error, Result};
use crate::lsq::{lstsq, nnls, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryFit<T> {
    pub v: T,
    pub x: T,
    pub y: T,
    pub z: T,
    /// Euclidean norm of the residual, GB/s.
    pub residual_norm: T,
    pub states: Vec<CpuState<T>>,
}

/// Nonnegative `(V, X, Y, Z)` minimising `|L1 V + L2 X + L3 Y + DRAM Z - R|`
/// over the measured states. `R` is in GB/s.
pub fn fit_memory_coefficients<T: Scalar>(
    samples: &[(CpuState<T>, T)],
    spec: &CpuSpec<T>,
) -> Result<MemoryFit<T>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut rows = Vec::with_capacity(samples.len());
    let mut b = Vec::with_capacity(samples.len());
    for (state, r) in samples {
        rows.push(spec.lookup_state(state)?.bandwidths().to_vec());
        b.push(*r);
    }
    let sol = nnls(&Matrix::from_rows(&rows)?, &b)?;
    Ok(MemoryFit {
        v: sol.x[0],
        x: sol.x[1],
        y: sol.x[2],
        z: sol.x[3],
        residual_norm: sol.residual_norm,
        states: samples.iter().map(|(s, _)| *s).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComputeFit<T> {
    pub u: T,
    /// Intercept in GFLOP/s, present for affine fits.
    pub s: Option<T>,
    pub residual_norm: T,
    pub states: Vec<CpuState<T>>,
}

/// Least-squares `U` (and intercept `S` when `affine`) in `P U [+ S] = M`,
/// with `M` in GFLOP/s.
///
/// A single state gives the exact ratio `M / P`.
pub fn fit_compute_coefficients<T: Scalar>(
    samples: &[(CpuState<T>, T)],
    spec: &CpuSpec<T>,
    affine: bool,
) -> Result<ComputeFit<T>> {
    let needed = if affine { 2 } else { 1 };
    if samples.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: samples.len(),
        });
    }
    let mut p = Vec::with_capacity(samples.len());
    let mut m = Vec::with_capacity(samples.len());
    for (state, measured) in samples {
        p.push(spec.lookup_state(state)?.perf);
        m.push(*measured);
    }
    let states = samples.iter().map(|(s, _)| *s).collect();
    if !affine {
        let pm: T = p.iter().zip(&m).map(|(a, b)| *a * *b).sum();
        let pp: T = p.iter().map(|a| *a * *a).sum();
        let u = pm / pp;
        let residual_norm = p
            .iter()
            .zip(&m)
            .map(|(a, b)| (*a * u - *b) * (*a * u - *b))
            .sum::<T>()
            .sqrt();
        return Ok(ComputeFit {
            u,
            s: None,
            residual_norm,
            states,
        });
    }
    if p.iter().all(|x| *x == p[0]) {
        return Err(Error::RankDeficient(
            "every state has the same performance, so U and S are not separable".into(),
        ));
    }
    let rows: Vec<Vec<T>> = p.iter().map(|x| vec![*x, T::one()]).collect();
    let sol = lstsq(&Matrix::from_rows(&rows)?, &m)?;
    if sol.rank < 2 {
        return Err(Error::RankDeficient(
            "performance column is numerically constant".into(),
        ));
    }
    Ok(ComputeFit {
        u: sol.x[0],
        s: Some(sol.x[1]),
        residual_norm: sol.residual_norm,
        states,
    })
}

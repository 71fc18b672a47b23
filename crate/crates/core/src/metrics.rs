//! Difference metrics used to compare predictions with measurements.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `t_sim / t_prof - 1`. Positive when the prediction is slower than the reference.
///
/// ```
/// let d = roofcast_core::relative_difference(2.96_f64, 2.94).unwrap();
/// assert!((d - 0.0068).abs() < 1e-4);
/// ```
pub fn relative_difference<T: Scalar>(t_sim: T, t_prof: T) -> Result<T> {
    if t_prof == T::zero() {
        return Err(Error::domain("reference time is zero"));
    }
    Ok(t_sim / t_prof - T::one())
}

/// Root-mean-square of a list of differences.
pub fn square_error<T: Scalar>(differences: &[T]) -> Result<T> {
    if differences.is_empty() {
        return Err(Error::domain("square error of an empty list"));
    }
    let n = T::from_count(differences.len() as u64);
    Ok((differences.iter().map(|d| *d * *d).sum::<T>() / n).sqrt())
}

/// Summary of absolute differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityMetrics<T> {
    pub max: T,
    pub min: T,
    pub mean: T,
    /// Population standard deviation.
    pub stddev: T,
}

pub fn quality_metrics<T: Scalar>(differences: &[T]) -> Result<QualityMetrics<T>> {
    if differences.is_empty() {
        return Err(Error::domain("quality metrics of an empty list"));
    }
    let abs: Vec<T> = differences.iter().map(|d| d.abs()).collect();
    let n = T::from_count(abs.len() as u64);
    let mean = abs.iter().copied().sum::<T>() / n;
    let var = abs.iter().map(|a| (*a - mean) * (*a - mean)).sum::<T>() / n;
    Ok(QualityMetrics {
        max: abs.iter().copied().fold(T::neg_infinity(), T::max),
        min: abs.iter().copied().fold(T::infinity(), T::min),
        mean,
        stddev: var.sqrt(),
    })
}

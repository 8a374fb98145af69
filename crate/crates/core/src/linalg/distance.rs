use super::{trace_norm, DensityMatrix};
use crate::error::{Error, Result};

/// Contractive distance backing the distance-based monotones.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Metric {
    #[default]
    Trace,
}

/// `½‖a − b‖₁`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(0.5 * trace_norm(&(a.matrix() - b.matrix())))
}

pub fn distance(metric: Metric, a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    match metric {
        Metric::Trace => trace_distance(a, b),
    }
}

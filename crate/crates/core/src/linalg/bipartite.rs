use super::{CMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// `a ⊗ b` with the subsystem dimensions of both factors concatenated.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let mut dims: Vec<usize> = a.subsystem_dims().map_or_else(|| vec![a.dim()], <[_]>::to_vec);
    dims.extend(b.subsystem_dims().map_or_else(|| vec![b.dim()], <[_]>::to_vec));
    DensityMatrix::from_matrix_unchecked(a.matrix().kronecker(b.matrix()), Some(dims))
}

fn dims_of(rho: &DensityMatrix, index: usize) -> Result<&[usize]> {
    let dims = rho.subsystem_dims().ok_or(Error::MissingSubsystemDims)?;
    if index >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "subsystem {index} out of range for {} factors",
            dims.len()
        )));
    }
    Ok(dims)
}

/// Splits a flat index into per-factor digits (row-major, first factor most
/// significant).
fn digits(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
}

fn flatten(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Reduced state of factor `keep`; every other factor is traced out.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    let dims = dims_of(rho, keep)?;
    let n = rho.dim();
    let dk = dims[keep];
    let m = rho.matrix();
    let mut out = CMatrix::zeros(dk, dk);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            let traced_match = (0..dims.len()).all(|k| k == keep || di[k] == dj[k]);
            if traced_match {
                out[(di[keep], dj[keep])] += m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out, None))
}

/// Transposes factor `on` in place. The result is Hermitian with unit trace
/// but need not be positive.
pub fn partial_transpose(rho: &DensityMatrix, on: usize) -> Result<CMatrix> {
    let dims = dims_of(rho, on)?;
    let n = rho.dim();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(n, n);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            std::mem::swap(&mut di[on], &mut dj[on]);
            out[(flatten(&di, dims), flatten(&dj, dims))] = m[(i, j)];
            std::mem::swap(&mut di[on], &mut dj[on]);
        }
    }
    Ok(out)
}

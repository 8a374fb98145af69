use nalgebra::DVector;
use num_complex::Complex64;

use super::{
    hermitian_eigenvalues, hermiticity_defect, hermitize, CMatrix, HERMITIAN_TOL, PSD_TOL,
    TRACE_TOL,
};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Wraps `amplitudes`, rejecting vectors whose squared norm is not 1.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".into()));
        }
        let v = DVector::from_vec(amplitudes);
        let n2 = v.norm_squared();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes: v })
    }

    /// Normalizes `amplitudes` first. Fails only on the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(Self { amplitudes: v.unscale(n) })
    }

    /// Same as [`PureState::normalized`] for real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Computational basis ket `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub(crate) fn from_vector_unchecked(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
///
/// `subsystem_dims`, when present, records the tensor factorization used by
/// [`partial_trace`](super::partial_trace) and
/// [`partial_transpose`](super::partial_transpose).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    subsystem_dims: Option<Vec<usize>>,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants and stores the Hermitian part.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let matrix = hermitize(&matrix);
        let min_ev = hermitian_eigenvalues(&matrix)[0];
        if min_ev < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(Self {
            matrix,
            subsystem_dims: None,
        })
    }

    /// Divides by the trace before validating. Used for unnormalized PSD
    /// products such as `G G†` or `K ρ K†`.
    pub fn from_unnormalized(matrix: CMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        Self::new(matrix.unscale(tr))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        Self {
            matrix: hermitize(&(v * v.adjoint())),
            subsystem_dims: None,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim).unscale(dim as f64),
            subsystem_dims: None,
        }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Ok(Self::from_pure(&PureState::basis(dim, index)?))
    }

    /// `diag(probs)`; entries must be a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&DVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        Self::new(m)
    }

    /// `(1 - p) a + p b`.
    pub fn mix(a: &DensityMatrix, b: &DensityMatrix, p: f64) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("mixing weight {p} outside [0,1]")));
        }
        Ok(Self {
            matrix: a.matrix.scale(1.0 - p) + b.matrix.scale(p),
            subsystem_dims: a.subsystem_dims.clone(),
        })
    }

    /// Records a tensor factorization; the product must equal `dim()`.
    pub fn with_subsystem_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        let prod: usize = dims.iter().product();
        if prod != self.dim() || dims.contains(&0) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: prod,
            });
        }
        self.subsystem_dims = Some(dims);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn subsystem_dims(&self) -> Option<&[usize]> {
        self.subsystem_dims.as_deref()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Number of eigenvalues above [`EIGEN_ZERO_TOL`](super::EIGEN_ZERO_TOL).
    pub fn rank(&self) -> usize {
        self.eigenvalues()
            .iter()
            .filter(|&&v| v > super::EIGEN_ZERO_TOL)
            .count()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Builds without validation. Callers guarantee the invariants up to
    /// floating-point rounding.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix, subsystem_dims: Option<Vec<usize>>) -> Self {
        Self {
            matrix: hermitize(&matrix),
            subsystem_dims,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn basis_projector() {
        let rho = DensityMatrix::basis(3, 0).unwrap();
        let expected = CMatrix::from_diagonal(&DVector::from_vec(vec![
            c64(1.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
        ]));
        assert_eq!(rho.matrix(), &expected);
    }

    #[test]
    fn strange_state_projector() {
        let psi = PureState::from_real(&[0.0, 1.0, -1.0]).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        for (i, j, v) in [(1, 1, 0.5), (2, 2, 0.5), (1, 2, -0.5), (2, 1, -0.5)] {
            assert!((rho.entry(i, j) - c64(v, 0.0)).norm() < 1e-15);
        }
        for i in 0..3 {
            assert!(rho.entry(0, i).norm() < 1e-15);
        }
    }

    #[test]
    fn maximally_coherent_projector() {
        let psi = PureState::from_real(&[1.0, -1.0, 1.0]).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let signs = [[1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((rho.entry(i, j).re - signs[i][j] / 3.0).abs() < 1e-15);
                assert!(rho.entry(i, j).im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_unnormalized_vector() {
        let err = PureState::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized(_)));
    }

    #[test]
    fn rejects_bad_matrices() {
        let not_herm = CMatrix::from_row_slice(
            2,
            2,
            &[c64(0.5, 0.0), c64(0.1, 0.0), c64(0.0, 0.0), c64(0.5, 0.0)],
        );
        assert!(DensityMatrix::new(not_herm).is_err());
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = CMatrix::from_diagonal(&DVector::from_vec(vec![c64(1.5, 0.0), c64(-0.5, 0.0)]));
        assert!(DensityMatrix::new(negative).is_err());
    }

    #[test]
    fn subsystem_dims_must_factor() {
        let rho = DensityMatrix::maximally_mixed(6);
        assert!(rho.clone().with_subsystem_dims(vec![3, 2]).is_ok());
        assert!(rho.with_subsystem_dims(vec![2, 2]).is_err());
    }
}

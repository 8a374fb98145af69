//! Small dense complex linear algebra plus the state types everything else
//! is built on.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Dimensions in this crate are
//! tiny (a qutrit, a qutrit-qubit pair), so nothing here is tuned for size.

mod bipartite;
mod distance;
mod named;
mod random;
mod state;

pub use bipartite::{partial_trace, partial_transpose, tensor};
pub use distance::{distance, trace_distance, Metric};
pub use random::{haar_unitary, random_mixed, random_pure, Seed};
pub(crate) use random::{complex_gaussian, isometry};
pub use named::{max_coherent, noisy, norrell, strange};
pub use state::{DensityMatrix, PureState};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues with magnitude below this are treated as zero when counting
/// rank or negative eigenvalues.
pub const EIGEN_ZERO_TOL: f64 = 1e-12;

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-12;
pub(crate) const PSD_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real eigenvalues of a Hermitian matrix, ascending.
///
/// Only the Hermitian part of `m` is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigen-decomposition `(values, vectors)` of a Hermitian matrix; column `k`
/// of `vectors` belongs to `values[k]`. Not sorted.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitize(m).symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let id = CMatrix::identity(u.nrows(), u.ncols());
    max_abs_diff(&(u * u.adjoint()), &id) <= tol
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Hermitian function calculus: applies `f` to the eigenvalues.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let fv = f(v);
        if fv == 0.0 {
            continue;
        }
        let col = vecs.column(k);
        out += (col * col.adjoint()).scale(fv);
    }
    out
}

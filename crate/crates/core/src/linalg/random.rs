//! Seeded sampling of states and unitaries.
//!
//! Every random stream in the crate comes from [`Seed::rng`], a ChaCha8
//! generator keyed by a 64-bit seed. Experiments derive independent streams
//! with [`Seed::derive`], so a given index always sees the same draws no
//! matter how work is scheduled.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, DensityMatrix, PureState};
use crate::error::{Error, Result};

/// Master seed for a deterministic random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Child seed at a fixed integer offset.
    pub fn derive(self, offset: u64) -> Seed {
        Seed(self.0.wrapping_add(offset.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub(crate) fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

impl PureState {
    /// Haar-random pure state: a normalized i.i.d. complex Gaussian vector.
    pub fn haar<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: "random states need d >= 2",
            });
        }
        loop {
            let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
            let n = v.norm();
            if n > 1e-150 {
                return Ok(PureState::from_vector_unchecked(v.unscale(n)));
            }
        }
    }
}

impl DensityMatrix {
    /// `G G† / tr(G G†)` for a `dim x rank` Ginibre matrix `G`. At
    /// `rank == dim` this is the Hilbert-Schmidt measure.
    pub fn hilbert_schmidt<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: "random states need d >= 2",
            });
        }
        if rank == 0 || rank > dim {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} must lie in 1..={dim}"
            )));
        }
        let g = ginibre(dim, rank, rng);
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        Ok(DensityMatrix::from_matrix_unchecked(m.unscale(tr), None))
    }
}

pub fn random_pure(dim: usize, seed: Seed) -> Result<PureState> {
    PureState::haar(dim, &mut seed.rng())
}

pub fn random_mixed(dim: usize, rank: usize, seed: Seed) -> Result<DensityMatrix> {
    DensityMatrix::hilbert_schmidt(dim, rank, &mut seed.rng())
}

/// Haar unitary from the QR decomposition of a Ginibre matrix, with the
/// phases of `R`'s diagonal folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    isometry(dim, dim, rng)
}

/// `rows x cols` matrix with orthonormal columns (`rows >= cols`), Haar
/// distributed.
pub(crate) fn isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    debug_assert!(rows >= cols);
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..cols {
        let d = r[(k, k)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / n;
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}

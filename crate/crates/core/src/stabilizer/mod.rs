//! Pure stabilizer states, the stabilizer polytope, and distances to it.

mod solver;

pub use solver::{minimize, objective, PolytopeResult, SolverOptions};

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::linalg::{c64, trace_distance, CMatrix, DensityMatrix};
use crate::phase_space::{boost, is_prime, omega_pow, shift};

/// Trace distance below which two projectors count as the same vertex.
pub const DEDUP_TOL: f64 = 1e-8;

/// Default membership tolerance for [`in_polytope`].
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// A named Clifford generator.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: &'static str,
    pub unitary: CMatrix,
}

/// Fourier matrix `F_jk = ω^{jk}/√d`.
pub fn fourier(d: usize) -> CMatrix {
    let norm = (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| omega_pow(d, (j * k) as i64) / norm)
}

/// Phase gate: `diag(ω^{j(j−1)·2⁻¹})` for odd `d`, `diag(1, i)` for qubits.
pub fn phase_gate(d: usize) -> CMatrix {
    if d == 2 {
        let mut s = CMatrix::identity(2, 2);
        s[(1, 1)] = c64(0.0, 1.0);
        return s;
    }
    let half = (d as i64 + 1) / 2;
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let j = j as i64;
            omega_pow(d, j * (j - 1) * half)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// `X`, `Z`, `F`, `S` for prime `d`.
pub fn clifford_generators(d: usize) -> Result<Vec<Generator>> {
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "Clifford generators are defined here for prime d",
        });
    }
    Ok(vec![
        Generator { name: "X", unitary: shift(d) },
        Generator { name: "Z", unitary: boost(d) },
        Generator { name: "F", unitary: fourier(d) },
        Generator { name: "S", unitary: phase_gate(d) },
    ])
}

/// Vertices of the stabilizer polytope: the pure stabilizer projectors.
#[derive(Clone, Debug)]
pub struct StabilizerVertexSet {
    dim: usize,
    projectors: Vec<DensityMatrix>,
    /// Generator word (applied left to right to `|0⟩`) reaching each vertex.
    provenance: Vec<String>,
}

impl StabilizerVertexSet {
    /// Shared per-dimension instance.
    pub fn cached(d: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<StabilizerVertexSet>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(v) = cache.read().expect("vertex cache poisoned").get(&d) {
            return Ok(Arc::clone(v));
        }
        let built = Arc::new(stabilizer_pure_states(d)?);
        let mut w = cache.write().expect("vertex cache poisoned");
        Ok(Arc::clone(w.entry(d).or_insert(built)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[DensityMatrix] {
        &self.projectors
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    /// Index of the vertex within [`DEDUP_TOL`] of `rho`, if any.
    pub fn position(&self, rho: &DensityMatrix) -> Option<usize> {
        self.projectors
            .iter()
            .position(|v| trace_distance(v, rho).is_ok_and(|t| t < DEDUP_TOL))
    }

    /// Indices of `|0⟩⟨0|, …, |d−1⟩⟨d−1|` in the vertex list.
    pub fn basis_indices(&self) -> Vec<usize> {
        (0..self.dim)
            .map(|i| {
                let b = DensityMatrix::basis(self.dim, i).expect("index in range");
                self.position(&b).expect("basis projectors are vertices")
            })
            .collect()
    }

    fn matrices(&self) -> Vec<CMatrix> {
        self.projectors.iter().map(|p| p.matrix().clone()).collect()
    }
}

/// Breadth-first orbit of `|0⟩⟨0|` under conjugation by the Clifford
/// generators. Yields 6 vertices for `d = 2` and 12 for `d = 3`.
pub fn stabilizer_pure_states(d: usize) -> Result<StabilizerVertexSet> {
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "stabilizer enumeration supports d = 2 and d = 3",
        });
    }
    let gens = clifford_generators(d)?;
    let mut projectors = vec![DensityMatrix::basis(d, 0)?];
    let mut provenance = vec![String::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        for g in &gens {
            let m = &g.unitary * projectors[idx].matrix() * g.unitary.adjoint();
            let v = DensityMatrix::from_matrix_unchecked(m, None);
            let known = projectors
                .iter()
                .any(|p| trace_distance(p, &v).is_ok_and(|t| t < DEDUP_TOL));
            if !known {
                provenance.push(format!("{}{}", provenance[idx], g.name));
                projectors.push(v);
                queue.push_back(projectors.len() - 1);
            }
        }
    }
    Ok(StabilizerVertexSet {
        dim: d,
        projectors,
        provenance,
    })
}

fn check_dims(rho: &DensityMatrix, d: usize) -> Result<()> {
    if rho.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Minimum trace distance from `rho` to the convex hull of `vertices`.
pub fn polytope_distance(rho: &DensityMatrix, vertices: &StabilizerVertexSet) -> Result<PolytopeResult> {
    polytope_distance_from(rho, vertices, &[])
}

/// As [`polytope_distance`], also evaluating the given weight vectors as
/// starting candidates.
pub fn polytope_distance_from(
    rho: &DensityMatrix,
    vertices: &StabilizerVertexSet,
    candidates: &[Vec<f64>],
) -> Result<PolytopeResult> {
    check_dims(rho, vertices.dim())?;
    Ok(minimize(
        rho.matrix(),
        &vertices.matrices(),
        candidates,
        SolverOptions::default(),
    ))
}

/// Membership in the stabilizer polytope up to `tol` in trace distance.
pub fn in_polytope(rho: &DensityMatrix, vertices: &StabilizerVertexSet, tol: f64) -> Result<bool> {
    Ok(polytope_distance(rho, vertices)?.distance <= tol)
}

/// Minimum trace distance to the diagonal (incoherent) states. Weights are
/// over the computational basis projectors.
pub fn incoherent_distance(rho: &DensityMatrix) -> Result<PolytopeResult> {
    let d = rho.dim();
    let basis: Vec<CMatrix> = (0..d)
        .map(|i| DensityMatrix::basis(d, i).map(DensityMatrix::into_matrix))
        .collect::<Result<_>>()?;
    let diag = rho.populations();
    Ok(minimize(rho.matrix(), &basis, &[diag], SolverOptions::default()))
}

//! Wootters discrete phase space for odd prime dimension `d`.
//!
//! Displacements are `D(p,q) = ω^{-2⁻¹pq} Z^p X^q` with `ω = e^{2πi/d}` and
//! `2⁻¹ = (d+1)/2 mod d`. The phase-point operators are
//! `A(p,q) = D(p,q) A₀ D(p,q)†` with `A₀ = (1/d) Σ D(p,q)`, and the Wigner
//! function is `W(p,q) = tr(ρ A(p,q)) / d`, which sums to one.
//!
//! Points are 0-based. The qutrit closed form below labels them from 1, so
//! its `W_(a,b)` is our `W(a-1, b-1)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, DensityMatrix};

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

pub(crate) fn require_odd_prime(d: usize) -> Result<()> {
    if d.is_multiple_of(2) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "the Wootters construction needs odd d",
        });
    }
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "phase space is implemented for prime d only",
        });
    }
    Ok(())
}

/// Primitive root of unity `e^{2πi k/d}`.
pub fn omega_pow(d: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(d as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * k / d as f64)
}

/// Shift `X|j⟩ = |j+1 mod d⟩`.
pub fn shift(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// Boost `Z|j⟩ = ω^j |j⟩`.
pub fn boost(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            omega_pow(d, i as i64)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// Displacement operator `D(p,q)`. Indices are taken mod `d`.
pub fn displacement(d: usize, p: i64, q: i64) -> Result<CMatrix> {
    require_odd_prime(d)?;
    Ok(displacement_unchecked(d, p, q))
}

fn displacement_unchecked(d: usize, p: i64, q: i64) -> CMatrix {
    let di = d as i64;
    let (p, q) = (p.rem_euclid(di), q.rem_euclid(di));
    let half = (di + 1) / 2;
    let phase = omega_pow(d, -(half * p * q));
    // (Z^p X^q)|j⟩ = ω^{p(j+q)} |j+q⟩
    CMatrix::from_fn(d, d, |i, j| {
        if i as i64 == (j as i64 + q) % di {
            phase * omega_pow(d, p * i as i64)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// A point of the `d x d` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    pub p: usize,
    pub q: usize,
}

impl PhasePoint {
    pub fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }
}

/// Phase-point operators for one dimension, indexed `p * d + q`.
#[derive(Debug)]
pub struct PhaseSpace {
    dim: usize,
    ops: Vec<CMatrix>,
}

impl PhaseSpace {
    pub fn new(d: usize) -> Result<Self> {
        require_odd_prime(d)?;
        let di = d as i64;
        let mut a0 = CMatrix::zeros(d, d);
        for p in 0..di {
            for q in 0..di {
                a0 += displacement_unchecked(d, p, q);
            }
        }
        a0.unscale_mut(d as f64);
        let mut ops = Vec::with_capacity(d * d);
        for p in 0..di {
            for q in 0..di {
                let dpq = displacement_unchecked(d, p, q);
                let a = &dpq * &a0 * dpq.adjoint();
                ops.push(crate::linalg::hermitize(&a));
            }
        }
        Ok(Self { dim: d, ops })
    }

    /// Shared per-dimension instance, built on first use.
    pub fn cached(d: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<PhaseSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(ps) = cache.read().expect("phase-space cache poisoned").get(&d) {
            return Ok(Arc::clone(ps));
        }
        let built = Arc::new(Self::new(d)?);
        let mut w = cache.write().expect("phase-space cache poisoned");
        Ok(Arc::clone(w.entry(d).or_insert(built)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn op(&self, pt: PhasePoint) -> &CMatrix {
        &self.ops[pt.p * self.dim + pt.q]
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn wigner(&self, rho: &DensityMatrix) -> Result<WignerDistribution> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        let d = self.dim;
        let m = rho.matrix();
        let values = self
            .ops
            .iter()
            .map(|a| {
                // tr(ρA) = Σ_ij ρ_ij A_ji
                let mut acc = c64(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        acc += m[(i, j)] * a[(j, i)];
                    }
                }
                acc.re / d as f64
            })
            .collect();
        Ok(WignerDistribution { dim: d, values })
    }
}

/// All `d²` phase-point operators `A(p,q)`, ordered `p * d + q`.
pub fn phase_point_ops(d: usize) -> Result<Vec<CMatrix>> {
    Ok(PhaseSpace::cached(d)?.ops().to_vec())
}

/// Discrete Wigner function of `rho`.
pub fn wigner(rho: &DensityMatrix) -> Result<WignerDistribution> {
    PhaseSpace::cached(rho.dim())?.wigner(rho)
}

/// A real quasiprobability grid, row `p`, column `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerDistribution {
    dim: usize,
    values: Vec<f64>,
}

impl WignerDistribution {
    pub fn from_values(dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: values.len(),
            });
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, pt: PhasePoint) -> f64 {
        self.values[pt.p * self.dim + pt.q]
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `Σ |W|`.
    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.dim)
    }
}

/// The nine qutrit expressions written in terms of
/// `ρ₁₂ = λ₁ + iμ₁`, `ρ₁₃ = λ₂ + iμ₂`, `ρ₂₃ = λ₃ + iμ₃`.
pub fn qutrit_closed_form(rho: &DensityMatrix) -> Result<WignerDistribution> {
    if rho.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            dim: rho.dim(),
            reason: "the closed form is for qutrits",
        });
    }
    let (l1, m1) = (rho.entry(0, 1).re, rho.entry(0, 1).im);
    let (l2, m2) = (rho.entry(0, 2).re, rho.entry(0, 2).im);
    let (l3, m3) = (rho.entry(1, 2).re, rho.entry(1, 2).im);
    let (r11, r22, r33) = (rho.entry(0, 0).re, rho.entry(1, 1).re, rho.entry(2, 2).re);
    let s = 3f64.sqrt();
    #[rustfmt::skip]
    let values = vec![
        2.0 * l3 + r11,          2.0 * l2 + r22,          2.0 * l1 + r33,
        -l3 - s * m3 + r11,      -l2 + s * m2 + r22,      -l1 - s * m1 + r33,
        -l3 + s * m3 + r11,      -l2 - s * m2 + r22,      -l1 + s * m1 + r33,
    ];
    Ok(WignerDistribution {
        dim: 3,
        values: values.into_iter().map(|v| v / 3.0).collect(),
    })
}

/// Direction of a family of parallel lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Lines `q = c`.
    Vertical,
    /// Lines `p = m q + c (mod d)`.
    Slope(usize),
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Vertical => write!(f, "vertical"),
            Direction::Slope(m) => write!(f, "slope{m}"),
        }
    }
}

/// `d` parallel lines partitioning the grid. Line `c` holds the points with
/// intercept `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Striation {
    dim: usize,
    direction: Direction,
    lines: Vec<Vec<PhasePoint>>,
}

impl Striation {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn lines(&self) -> &[Vec<PhasePoint>] {
        &self.lines
    }
}

/// The `d + 1` striations of the grid: vertical first, then slopes `0..d`.
pub fn striations(d: usize) -> Result<Vec<Striation>> {
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "striations are enumerated for prime d",
        });
    }
    let mut out = Vec::with_capacity(d + 1);
    out.push(Striation {
        dim: d,
        direction: Direction::Vertical,
        lines: (0..d)
            .map(|c| (0..d).map(|p| PhasePoint::new(p, c)).collect())
            .collect(),
    });
    for m in 0..d {
        out.push(Striation {
            dim: d,
            direction: Direction::Slope(m),
            lines: (0..d)
                .map(|c| (0..d).map(|q| PhasePoint::new((m * q + c) % d, q)).collect())
                .collect(),
        });
    }
    Ok(out)
}

/// Sum of `w` along each line of `s`.
pub fn line_sums(w: &WignerDistribution, s: &Striation) -> Result<Vec<f64>> {
    if w.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: w.dim(),
        });
    }
    Ok(s.lines()
        .iter()
        .map(|line| line.iter().map(|&pt| w.get(pt)).sum())
        .collect())
}

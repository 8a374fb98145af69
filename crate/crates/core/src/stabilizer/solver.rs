//! Minimum trace distance from a state to the convex hull of a finite vertex
//! list.
//!
//! For traceless Hermitian `X`, `½‖X‖₁ = min { tr P : P ⪰ 0, P ⪰ X }`, so
//!
//! ```text
//! min_w ½‖ρ − Σ wᵢ vᵢ‖₁  =  min  tr P
//!                           s.t. P ⪰ 0,  P − ρ + Σ wᵢ vᵢ ⪰ 0,  w ∈ Δ
//! ```
//!
//! which is a small semidefinite program. It is solved with a log-barrier
//! Newton method. The dual
//!
//! ```text
//! max_{0 ⪯ Π ⪯ I}  tr(Π ρ) − maxᵢ tr(Π vᵢ)
//! ```
//!
//! gives a lower bound for any feasible `Π`, so every result carries a
//! certified optimality gap.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{c64, hermitian_eigen, hermitian_map, trace_norm, CMatrix};

/// Outcome of a distance minimization over a vertex simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeResult {
    /// `½‖ρ − Σ wᵢ vᵢ‖₁` evaluated at `weights`.
    pub distance: f64,
    /// Convex weights over the vertex list.
    pub weights: Vec<f64>,
    /// Newton steps taken.
    pub iterations: usize,
    /// Certified gap `distance − lower_bound` is within tolerance.
    pub converged: bool,
    /// Dual lower bound on the true minimum.
    pub lower_bound: f64,
}

impl PolytopeResult {
    pub fn gap(&self) -> f64 {
        self.distance - self.lower_bound
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Required certified gap.
    pub tol: f64,
    /// Cap on total Newton steps.
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 5000,
        }
    }
}

/// `½‖ρ − Σ wᵢ vᵢ‖₁`.
pub fn objective(rho: &CMatrix, vertices: &[CMatrix], weights: &[f64]) -> f64 {
    0.5 * trace_norm(&residual(rho, vertices, weights))
}

fn residual(rho: &CMatrix, vertices: &[CMatrix], weights: &[f64]) -> CMatrix {
    let mut x = rho.clone();
    for (v, &w) in vertices.iter().zip(weights) {
        if w != 0.0 {
            x -= v.scale(w);
        }
    }
    x
}

/// Dual value `tr(Πρ) − maxᵢ tr(Π vᵢ)`; `pi` must satisfy `0 ⪯ Π ⪯ I`.
fn dual_value(rho: &CMatrix, vertices: &[CMatrix], pi: &CMatrix) -> f64 {
    let worst = vertices
        .iter()
        .map(|v| trace_product(pi, v))
        .fold(f64::NEG_INFINITY, f64::max);
    trace_product(pi, rho) - worst
}

/// `tr(A B)` real part, without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a[(i, j)], b[(j, i)]);
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

/// Hermitian basis: `E_jj`, then `E_jk + E_kj` and `i(E_jk − E_kj)` for
/// `j < k`.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(j, j)] = c64(1.0, 0.0);
        basis.push(m);
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut s = CMatrix::zeros(d, d);
            s[(j, k)] = c64(1.0, 0.0);
            s[(k, j)] = c64(1.0, 0.0);
            basis.push(s);
            let mut a = CMatrix::zeros(d, d);
            a[(j, k)] = c64(0.0, 1.0);
            a[(k, j)] = c64(0.0, -1.0);
            basis.push(a);
        }
    }
    basis
}

/// Coordinates of Hermitian `m` in [`hermitian_basis`].
fn hermitian_coords(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        out.push(m[(j, j)].re);
    }
    for j in 0..d {
        for k in j + 1..d {
            out.push(m[(j, k)].re);
            out.push(m[(j, k)].im);
        }
    }
    out
}

/// Inverse and log-determinant of a Hermitian matrix, or `None` when it is
/// not positive definite.
fn inverse_logdet(m: &CMatrix) -> Option<(CMatrix, f64)> {
    let chol = nalgebra::Cholesky::new(m.clone())?;
    let l = chol.l_dirty();
    let mut logdet = 0.0;
    for i in 0..m.nrows() {
        let v = l[(i, i)].re;
        if !(v > 0.0) {
            return None;
        }
        logdet += 2.0 * v.ln();
    }
    Some((chol.inverse(), logdet))
}

struct Problem<'a> {
    rho: &'a CMatrix,
    basis: Vec<CMatrix>,
    /// `vᵢ − v_last` for `i < n − 1`.
    diffs: Vec<CMatrix>,
    /// `v_last − ρ`.
    offset: CMatrix,
    basis_trace: Vec<f64>,
}

struct Point {
    coords: Vec<f64>,
    y: Vec<f64>,
}

impl Point {
    fn last_weight(&self) -> f64 {
        1.0 - self.y.iter().sum::<f64>()
    }

    fn weights(&self) -> Vec<f64> {
        let mut w = self.y.clone();
        w.push(self.last_weight());
        w
    }
}

impl<'a> Problem<'a> {
    fn new(rho: &'a CMatrix, vertices: &'a [CMatrix]) -> Self {
        let d = rho.nrows();
        let n = vertices.len();
        let last = &vertices[n - 1];
        let basis = hermitian_basis(d);
        let basis_trace = basis.iter().map(|b| b.trace().re).collect();
        Self {
            rho,
            diffs: vertices[..n - 1].iter().map(|v| v - last).collect(),
            offset: last - rho,
            basis,
            basis_trace,
        }
    }

    fn p_matrix(&self, coords: &[f64]) -> CMatrix {
        let d = self.rho.nrows();
        let mut p = CMatrix::zeros(d, d);
        for (b, &c) in self.basis.iter().zip(coords) {
            if c != 0.0 {
                p += b.scale(c);
            }
        }
        p
    }

    fn q_matrix(&self, p: &CMatrix, y: &[f64]) -> CMatrix {
        let mut q = p + &self.offset;
        for (g, &yi) in self.diffs.iter().zip(y) {
            if yi != 0.0 {
                q += g.scale(yi);
            }
        }
        q
    }

    fn q_inverse(&self, pt: &Point) -> Option<CMatrix> {
        let p = self.p_matrix(&pt.coords);
        inverse_logdet(&self.q_matrix(&p, &pt.y)).map(|(inv, _)| inv)
    }

    fn is_interior(&self, pt: &Point) -> bool {
        if pt.last_weight() <= 0.0 || pt.y.iter().any(|&v| v <= 0.0) {
            return false;
        }
        let p = self.p_matrix(&pt.coords);
        inverse_logdet(&p).is_some() && inverse_logdet(&self.q_matrix(&p, &pt.y)).is_some()
    }

    /// Gradient, Hessian and `Q⁻¹` at an interior point.
    fn derivatives(&self, pt: &Point, t: f64) -> Option<(DVector<f64>, DMatrix<f64>, CMatrix)> {
        let na = self.basis.len();
        let ny = pt.y.len();
        let nv = na + ny;
        let p = self.p_matrix(&pt.coords);
        let (pinv, _) = inverse_logdet(&p)?;
        let (qinv, _) = inverse_logdet(&self.q_matrix(&p, &pt.y))?;

        let mp: Vec<CMatrix> = self.basis.iter().map(|b| &pinv * b).collect();
        let mq: Vec<CMatrix> = self
            .basis
            .iter()
            .chain(self.diffs.iter())
            .map(|b| &qinv * b)
            .collect();

        let mut g = DVector::zeros(nv);
        let mut h = DMatrix::zeros(nv, nv);
        for k in 0..na {
            g[k] = t * self.basis_trace[k] - mp[k].trace().re - mq[k].trace().re;
        }
        let wl = pt.last_weight();
        for i in 0..ny {
            g[na + i] = -mq[na + i].trace().re - 1.0 / pt.y[i] + 1.0 / wl;
        }
        for k in 0..nv {
            for l in k..nv {
                let mut v = trace_product(&mq[k], &mq[l]);
                if k < na && l < na {
                    v += trace_product(&mp[k], &mp[l]);
                }
                if k >= na && l >= na {
                    v += 1.0 / (wl * wl);
                    if k == l {
                        v += 1.0 / (pt.y[k - na] * pt.y[k - na]);
                    }
                }
                h[(k, l)] = v;
                h[(l, k)] = v;
            }
        }
        Some((g, h, qinv))
    }
}

fn newton_direction(mut h: DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    // Symmetric Jacobi scaling; barrier Hessians span many orders of
    // magnitude near the boundary.
    let n = g.len();
    let scale: Vec<f64> = (0..n).map(|k| 1.0 / h[(k, k)].abs().max(1e-300).sqrt()).collect();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] *= scale[i] * scale[j];
        }
    }
    let rhs = DVector::from_fn(n, |k, _| -g[k] * scale[k]);
    let solved = match h.clone().cholesky() {
        Some(ch) => Some(ch.solve(&rhs)),
        None => h.lu().solve(&rhs),
    }?;
    let dx = DVector::from_fn(n, |k, _| solved[k] * scale[k]);
    dx.iter().all(|v| v.is_finite()).then_some(dx)
}

/// Minimizes `½‖ρ − Σ wᵢ vᵢ‖₁` over the probability simplex.
///
/// `candidates` are extra weight vectors evaluated alongside the barrier
/// solution; the best one is returned. The reported distance is always the
/// objective evaluated at the returned weights.
pub fn minimize(
    rho: &CMatrix,
    vertices: &[CMatrix],
    candidates: &[Vec<f64>],
    opts: SolverOptions,
) -> PolytopeResult {
    let n = vertices.len();
    assert!(n > 0, "empty vertex list");
    if n == 1 {
        let distance = objective(rho, vertices, &[1.0]);
        return PolytopeResult {
            distance,
            weights: vec![1.0],
            iterations: 0,
            converged: true,
            lower_bound: distance,
        };
    }

    let prob = Problem::new(rho, vertices);
    let d = rho.nrows();

    // Strictly feasible start: uniform weights, P = |X|₊ + I.
    let w0 = vec![1.0 / n as f64; n];
    let x0 = residual(rho, vertices, &w0);
    let p0 = hermitian_map(&x0, |v| v.max(0.0) + 1.0);
    let mut pt = Point {
        coords: hermitian_coords(&p0),
        y: w0[..n - 1].to_vec(),
    };

    let barrier_weight = (2 * d + n) as f64;
    let mut t = 10.0;
    let mut iterations = 0;
    let mut best_w = pt.weights();
    let mut best = objective(rho, vertices, &best_w);
    let mut best_lb = 0.0f64;
    let gap_target = opts.tol * 0.1;

    'outer: loop {
        for _ in 0..60 {
            if iterations >= opts.max_iterations {
                break 'outer;
            }
            let Some((g, h, _)) = prob.derivatives(&pt, t) else {
                break 'outer;
            };
            let Some(dx) = newton_direction(h, &g) else {
                break;
            };
            iterations += 1;
            // Damped Newton: the barrier is self-concordant, so a step of
            // 1/(1+λ) stays inside the domain and decreases the objective.
            let decrement = (-g.dot(&dx)).max(0.0).sqrt();
            if decrement < 1e-6 {
                break;
            }
            let na = prob.basis.len();
            let mut step = if decrement < 0.25 { 1.0 } else { 1.0 / (1.0 + decrement) };
            let mut accepted = false;
            while step > 1e-12 {
                let trial = Point {
                    coords: (0..na).map(|k| pt.coords[k] + step * dx[k]).collect(),
                    y: (0..n - 1).map(|i| pt.y[i] + step * dx[na + i]).collect(),
                };
                if prob.is_interior(&trial) {
                    pt = trial;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let w = pt.weights();
        let f = objective(rho, vertices, &w);
        if f < best {
            best = f;
            best_w = w;
        }
        best_lb = best_lb.max(lower_bound(rho, vertices, &best_w, prob.q_inverse(&pt).as_ref(), t));
        if best - best_lb <= gap_target || barrier_weight / t < 1e-14 {
            break;
        }
        t *= 20.0;
    }

    // Snap negligible weights; the barrier keeps every weight strictly positive.
    let mut snapped: Vec<f64> = best_w.iter().map(|&w| if w < 1e-10 { 0.0 } else { w }).collect();
    let s: f64 = snapped.iter().sum();
    snapped.iter_mut().for_each(|w| *w /= s);
    for cand in std::iter::once(&snapped).chain(candidates) {
        if cand.len() != n {
            continue;
        }
        let v = objective(rho, vertices, cand);
        if v < best {
            best = v;
            best_w = cand.clone();
        }
    }

    let lower_bound = best_lb.max(lower_bound(rho, vertices, &best_w, None, t)).min(best);
    PolytopeResult {
        distance: best,
        converged: best - lower_bound <= opts.tol,
        weights: best_w,
        iterations,
        lower_bound,
    }
}

/// Best dual value over two feasible `Π`: the projector onto the positive
/// part of the residual, and the barrier's dual estimate `Q⁻¹/t` clamped
/// into `[0, I]`.
/// Exact maximum of the dual value over `Π = P₊ + b·K`, `b ∈ [0, 1]`, for a
/// rank-one `K`. The objective is concave and piecewise linear in `b`, so the
/// optimum sits at an endpoint or where two vertex terms cross.
fn line_dual(rho: &CMatrix, vertices: &[CMatrix], pos: &CMatrix, kernel: &CMatrix) -> f64 {
    let base = trace_product(pos, rho);
    let slope = trace_product(kernel, rho);
    let lines: Vec<(f64, f64)> = vertices
        .iter()
        .map(|v| (trace_product(pos, v), trace_product(kernel, v)))
        .collect();
    let value = |b: f64| {
        let worst = lines.iter().map(|&(a, c)| a + b * c).fold(f64::NEG_INFINITY, f64::max);
        base + b * slope - worst
    };
    let mut best = value(0.0).max(value(1.0));
    for (i, &(ai, ci)) in lines.iter().enumerate() {
        for &(aj, cj) in &lines[i + 1..] {
            if (ci - cj).abs() > 1e-300 {
                let b = (aj - ai) / (ci - cj);
                if (0.0..=1.0).contains(&b) {
                    best = best.max(value(b));
                }
            }
        }
    }
    best
}

fn lower_bound(
    rho: &CMatrix,
    vertices: &[CMatrix],
    weights: &[f64],
    qinv: Option<&CMatrix>,
    t: f64,
) -> f64 {
    let x = residual(rho, vertices, weights);
    let (vals, vecs) = hermitian_eigen(&x);
    let d = rho.nrows();
    let mut pos = CMatrix::zeros(d, d);
    for (k, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            let col = vecs.column(k);
            pos += col * col.adjoint();
        }
    }
    let mut lb = dual_value(rho, vertices, &pos).max(0.0);
    if let Some(qinv) = qinv {
        let pi = hermitian_map(&qinv.unscale(t), |v| v.clamp(0.0, 1.0));
        lb = lb.max(dual_value(rho, vertices, &pi));
        // On the range of X the optimal dual is the sign projector; only the
        // near-kernel block is informative, so keep the barrier's guess there.
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for cut in [1e-8, 1e-6, 1e-4] {
            let mut pos_part = CMatrix::zeros(d, d);
            let mut kernel = CMatrix::zeros(d, d);
            for (k, &v) in vals.iter().enumerate() {
                let col = vecs.column(k);
                if v.abs() <= cut * scale {
                    kernel += col * col.adjoint();
                } else if v > 0.0 {
                    pos_part += col * col.adjoint();
                }
            }
            let rank = vals.iter().filter(|v| v.abs() <= cut * scale).count();
            if rank == 1 {
                lb = lb.max(line_dual(rho, vertices, &pos_part, &kernel));
            }
            let block = hermitian_map(&(&kernel * &pi * &kernel), |v| v.clamp(0.0, 1.0));
            lb = lb.max(dual_value(rho, vertices, &(pos_part + block)));
        }
    }
    lb
}

//! Test-only oracles shared by the integration tests.

#![allow(dead_code)]

use qmagic::linalg::DensityMatrix;
use qmagic::phase_space::qutrit_closed_form;

/// The twelve line sums of a qutrit Wigner grid (rows `p`, columns `q`):
/// vertical lines `q = c`, then lines `p = m·q + c` for `m = 0, 1, 2`.
pub fn qutrit_line_sums(rho: &DensityMatrix) -> [f64; 12] {
    let w = qutrit_closed_form(rho).unwrap();
    let at = |p: usize, q: usize| w.values()[3 * p + q];
    let mut out = [0.0; 12];
    for c in 0..3 {
        out[c] = (0..3).map(|p| at(p, c)).sum();
    }
    for m in 0..3 {
        for c in 0..3 {
            out[3 + 3 * m + c] = (0..3).map(|q| at((m * q + c) % 3, q)).sum();
        }
    }
    out
}

/// Brute-force `min_{σ diagonal, λ} (1/4) Σ_lines |m_ρ − λ m_σ|` by a dense
/// grid over `(σ₀, σ₁, λ)` followed by local pattern refinement around the
/// best coarse points. Returns `(value, σ, λ)`.
pub fn cw_dense_grid(rho: &DensityMatrix) -> (f64, [f64; 3], f64) {
    let target = qutrit_line_sums(rho);
    let basis: Vec<[f64; 12]> = (0..3)
        .map(|k| qutrit_line_sums(&DensityMatrix::basis(3, k).unwrap()))
        .collect();
    let f = |s0: f64, s1: f64, lam: f64| -> f64 {
        let s2 = 1.0 - s0 - s1;
        if s0 < 0.0 || s1 < 0.0 || s2 < -1e-15 || lam < 0.0 {
            return f64::INFINITY;
        }
        let s2 = s2.max(0.0);
        (0..12)
            .map(|l| (target[l] - lam * (s0 * basis[0][l] + s1 * basis[1][l] + s2 * basis[2][l])).abs())
            .sum::<f64>()
            / 4.0
    };

    let coarse: f64 = 0.02;
    let n = (1.0 / coarse).round() as usize;
    let nl = (3.0 / coarse).round() as usize;
    let mut pts: Vec<(f64, f64, f64, f64)> = Vec::new();
    for i in 0..=n {
        for j in 0..=(n - i) {
            for k in 0..=nl {
                let (a, b, l) = (i as f64 * coarse, j as f64 * coarse, k as f64 * coarse);
                pts.push((f(a, b, l), a, b, l));
            }
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut best = pts[0];
    for &(v0, a0, b0, l0) in pts.iter().take(12) {
        let (mut v, mut a, mut b, mut l) = (v0, a0, b0, l0);
        let mut h = coarse;
        while h > 1e-7 {
            let mut improved = false;
            for da in -2i32..=2 {
                for db in -2i32..=2 {
                    for dl in -2i32..=2 {
                        let (na, nb, nl) = (a + da as f64 * h, b + db as f64 * h, l + dl as f64 * h);
                        let nv = f(na, nb, nl);
                        if nv < v {
                            (v, a, b, l) = (nv, na, nb, nl);
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        if v < best.0 {
            best = (v, a, b, l);
        }
    }
    let (v, a, b, l) = best;
    (v, [a, b, 1.0 - a - b], l)
}

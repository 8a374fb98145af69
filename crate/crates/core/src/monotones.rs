//! Scalar resource quantifiers.
//!
//! All values are nonnegative. Magic quantifiers built on the Wigner function
//! ([`sum_negativity`], [`mana`]) need an odd prime dimension; the distance
//! quantifiers need a dimension with an enumerated stabilizer polytope.

use crate::error::{Error, Result};
use crate::linalg::{partial_transpose, trace_norm, DensityMatrix};
use crate::phase_space::{line_sums, striations, wigner, Direction};
use crate::stabilizer::{
    incoherent_distance, polytope_distance_from, PolytopeResult, StabilizerVertexSet,
};

/// `Σ_u |W_u| − 1`.
pub fn sum_negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok((wigner(rho)?.abs_sum() - 1.0).max(0.0))
}

/// Logarithm base used for [`mana`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    E,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "ln" | "natural" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            "10" => Ok(LogBase::Ten),
            _ => Err(Error::InvalidArgument(format!("unknown log base '{s}'"))),
        }
    }
}

impl std::fmt::Display for LogBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        })
    }
}

/// Natural-log mana, `ln Σ|W|`.
pub fn mana(rho: &DensityMatrix) -> Result<f64> {
    mana_with_base(rho, LogBase::E)
}

pub fn mana_with_base(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    Ok(base.log(1.0 + sum_negativity(rho)?))
}

/// Sum of the moduli of the off-diagonal entries.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += rho.entry(i, j).norm();
            }
        }
    }
    s
}

/// `(Σ_{i≠j} |ρ_ij|^p)^{1/p}` for `p ≥ 1`.
pub fn lp_coherence(rho: &DensityMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("l_p coherence needs p >= 1, got {p}")));
    }
    let d = rho.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += rho.entry(i, j).norm().powf(p);
            }
        }
    }
    Ok(s.powf(1.0 / p))
}

/// Line sums of every striation, concatenated in striation order and scaled
/// by `1/(d+1)` so the vector is a probability distribution.
pub fn striation_marginals(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let w = wigner(rho)?;
    let all = striations(rho.dim())?;
    let scale = 1.0 / all.len() as f64;
    let mut out = Vec::with_capacity(all.len() * rho.dim());
    for s in &all {
        out.extend(line_sums(&w, s)?.into_iter().map(|v| v * scale));
    }
    Ok(out)
}

/// Optimum of the Wigner-marginal coherence quantifier.
#[derive(Clone, Debug, PartialEq)]
pub struct CwReport {
    pub value: f64,
    /// Optimal scale `λ`.
    pub lambda: f64,
    /// An optimal diagonal state `σ`, as its populations.
    pub sigma: Vec<f64>,
}

/// `min_{σ incoherent, λ ∈ [0, d]} ‖K_ρ − λ K_σ‖₁` where `K` stacks all
/// striation marginals (see [`striation_marginals`]).
pub fn cw_coherence(rho: &DensityMatrix) -> Result<CwReport> {
    let d = rho.dim();
    let dirs: Vec<Direction> = striations(d)?.iter().map(|s| s.direction()).collect();
    cw_coherence_over(rho, &dirs)
}

/// [`cw_coherence`] restricted to the striations with the given directions.
///
/// For diagonal `σ` the vertical marginal is `diag σ` and every other
/// marginal is uniform, so `λ K_σ` sweeps the cone over the basis states.
/// With `t = λ` the objective is
/// `|1 − t| + Σ_{lines} |m − t/d|` (the first term only when the vertical
/// striation is used), a convex piecewise-linear function of one variable
/// minimized exactly at one of its breakpoints, with `σ = diag ρ`.
pub fn cw_coherence_over(rho: &DensityMatrix, directions: &[Direction]) -> Result<CwReport> {
    let d = rho.dim();
    if directions.is_empty() {
        return Err(Error::InvalidArgument("no striations selected".into()));
    }
    let w = wigner(rho)?;
    let all = striations(d)?;
    let mut vertical = false;
    let mut others = Vec::new();
    for dir in directions {
        let s = all
            .iter()
            .find(|s| s.direction() == *dir)
            .ok_or_else(|| Error::InvalidArgument(format!("no striation {dir} for d={d}")))?;
        match dir {
            Direction::Vertical => vertical = true,
            Direction::Slope(_) => others.extend(line_sums(&w, s)?),
        }
    }
    let df = d as f64;
    let lambda_max = df;
    let objective = |t: f64| {
        let v = if vertical { (1.0 - t).abs() } else { 0.0 };
        v + others.iter().map(|m| (m - t / df).abs()).sum::<f64>()
    };
    let mut best_t = 1.0f64;
    let mut best = objective(best_t);
    let breakpoints = others.iter().map(|m| m * df).chain([0.0, lambda_max]);
    for t in breakpoints {
        let t = t.clamp(0.0, lambda_max);
        let v = objective(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    Ok(CwReport {
        value: best / directions.len() as f64,
        lambda: best_t,
        sigma: rho.populations(),
    })
}

fn vertex_set_for(rho: &DensityMatrix) -> Result<std::sync::Arc<StabilizerVertexSet>> {
    StabilizerVertexSet::cached(rho.dim())
}

/// Trace distance to the incoherent states, with solver diagnostics.
pub fn distance_coherence_detailed(rho: &DensityMatrix) -> Result<PolytopeResult> {
    incoherent_distance(rho)
}

/// Trace distance to the stabilizer polytope, with solver diagnostics.
///
/// The incoherent optimum is offered to the solver as a starting candidate,
/// so the result never exceeds [`distance_coherence`].
pub fn distance_magic_detailed(rho: &DensityMatrix) -> Result<PolytopeResult> {
    let vs = vertex_set_for(rho)?;
    let inc = incoherent_distance(rho)?;
    let mut start = vec![0.0; vs.len()];
    for (i, idx) in vs.basis_indices().into_iter().enumerate() {
        start[idx] = inc.weights[i];
    }
    polytope_distance_from(rho, &vs, &[start])
}

pub fn distance_coherence(rho: &DensityMatrix) -> Result<f64> {
    Ok(distance_coherence_detailed(rho)?.distance)
}

pub fn distance_magic(rho: &DensityMatrix) -> Result<f64> {
    Ok(distance_magic_detailed(rho)?.distance)
}

/// `(‖ρ^{T_B}‖₁ − 1)/2`, transposing the last recorded subsystem.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let dims = rho.subsystem_dims().ok_or(Error::MissingSubsystemDims)?;
    let pt = partial_transpose(rho, dims.len() - 1)?;
    Ok(((trace_norm(&pt) - 1.0) / 2.0).max(0.0))
}

/// One named quantifier value.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneReport {
    pub name: &'static str,
    pub value: f64,
    /// Optimizer diagnostics, when the value came from a minimization.
    pub metadata: Option<String>,
}

impl MonotoneReport {
    fn plain(name: &'static str, value: f64) -> Self {
        Self {
            name,
            value,
            metadata: None,
        }
    }
}

/// Every quantifier applicable to `rho`, in a fixed order: sum negativity,
/// mana, l1, l2, C_w, distance coherence, distance magic, negativity.
pub fn all_monotones(rho: &DensityMatrix, base: LogBase) -> Result<Vec<MonotoneReport>> {
    let d = rho.dim();
    let odd_prime = d % 2 == 1 && crate::phase_space::is_prime(d);
    let mut out = Vec::new();
    if odd_prime {
        out.push(MonotoneReport::plain("sum_negativity", sum_negativity(rho)?));
        out.push(MonotoneReport::plain("mana", mana_with_base(rho, base)?));
    }
    out.push(MonotoneReport::plain("l1_coherence", l1_coherence(rho)));
    out.push(MonotoneReport::plain("l2_coherence", lp_coherence(rho, 2.0)?));
    if odd_prime {
        let cw = cw_coherence(rho)?;
        out.push(MonotoneReport {
            name: "cw_coherence",
            value: cw.value,
            metadata: Some(format!("lambda={}", cw.lambda)),
        });
    }
    let diag = |r: &PolytopeResult| {
        Some(format!(
            "gap={:e} iterations={} converged={}",
            r.gap(),
            r.iterations,
            r.converged
        ))
    };
    let dc = distance_coherence_detailed(rho)?;
    out.push(MonotoneReport {
        name: "distance_coherence",
        value: dc.distance,
        metadata: diag(&dc),
    });
    if d == 2 || d == 3 {
        let dm = distance_magic_detailed(rho)?;
        out.push(MonotoneReport {
            name: "distance_magic",
            value: dm.distance,
            metadata: diag(&dm),
        });
    }
    if rho.subsystem_dims().is_some_and(|s| s.len() >= 2) {
        out.push(MonotoneReport::plain("negativity", negativity(rho)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, random_mixed, tensor, PureState, Seed};

    fn strange() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::from_real(&[0.0, 1.0, -1.0]).unwrap())
    }

    fn norrell() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::from_real(&[-1.0, 2.0, -1.0]).unwrap())
    }

    fn coherent() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::from_real(&[1.0, -1.0, 1.0]).unwrap())
    }

    #[test]
    fn sum_negativity_of_named_states() {
        assert!((sum_negativity(&strange()).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((sum_negativity(&norrell()).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(sum_negativity(&DensityMatrix::maximally_mixed(3)).unwrap().abs() < 1e-15);
        assert!((sum_negativity(&coherent()).unwrap() - 4.0 / 9.0).abs() < 1e-12);
        assert!(sum_negativity(&DensityMatrix::maximally_mixed(4)).is_err());
    }

    #[test]
    fn mana_values() {
        assert!(mana(&DensityMatrix::maximally_mixed(3)).unwrap().abs() < 1e-15);
        assert!((mana(&strange()).unwrap() - (5.0f64 / 3.0).ln()).abs() < 1e-12);
        let m2 = mana_with_base(&strange(), LogBase::Two).unwrap();
        assert!((m2 - (5.0f64 / 3.0).log2()).abs() < 1e-12);
        assert_eq!("10".parse::<LogBase>().unwrap(), LogBase::Ten);
        assert!("7".parse::<LogBase>().is_err());
    }

    #[test]
    fn lp_values() {
        assert!((l1_coherence(&coherent()) - 2.0).abs() < 1e-12);
        assert!((l1_coherence(&strange()) - 1.0).abs() < 1e-12);
        assert_eq!(l1_coherence(&DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap()), 0.0);
        let rho = random_mixed(3, 3, Seed(4)).unwrap();
        assert!((lp_coherence(&rho, 1.0).unwrap() - l1_coherence(&rho)).abs() < 1e-14);
        assert!((lp_coherence(&strange(), 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(lp_coherence(&rho, 0.5).is_err());
    }

    #[test]
    fn lp_scales_with_incoherent_ancilla() {
        let rho = random_mixed(3, 3, Seed(8)).unwrap();
        let q = [0.6, 0.3, 0.1];
        let sigma = DensityMatrix::diagonal(&q).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let lhs = lp_coherence(&tensor(&rho, &sigma), p).unwrap();
            let factor = q.iter().map(|v: &f64| v.powf(p)).sum::<f64>().powf(1.0 / p);
            assert!((lhs - factor * lp_coherence(&rho, p).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn cw_basics() {
        let diag = DensityMatrix::diagonal(&[0.1, 0.6, 0.3]).unwrap();
        assert!(cw_coherence(&diag).unwrap().value < 1e-12);
        let c = cw_coherence(&coherent()).unwrap();
        assert!(c.value > 0.1);
        assert!(c.lambda >= 0.0 && c.lambda <= 3.0);
        let rho = random_mixed(3, 3, Seed(2)).unwrap();
        let v = cw_coherence_over(&rho, &[Direction::Vertical]).unwrap();
        assert!(v.value.abs() < 1e-15);
    }

    #[test]
    fn diagonal_states_have_uniform_oblique_marginals() {
        // The structural fact the exact C_w reduction rests on.
        for d in [3usize, 5] {
            for i in 0..d {
                let b = DensityMatrix::basis(d, i).unwrap();
                let k = striation_marginals(&b).unwrap();
                let scale = 1.0 / (d + 1) as f64;
                for (j, v) in k[..d].iter().enumerate() {
                    let want = if j == i { scale } else { 0.0 };
                    assert!((v - want).abs() < 1e-12);
                }
                for v in &k[d..] {
                    assert!((v - scale / d as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn negativity_values() {
        let prod = tensor(&strange(), &DensityMatrix::basis(2, 0).unwrap());
        assert!(negativity(&prod).unwrap() < 1e-12);
        let mut amps = vec![c64(0.0, 0.0); 6];
        amps[0] = c64(1.0, 0.0);
        amps[3] = c64(1.0, 0.0);
        let bell = DensityMatrix::from_pure(&PureState::normalized(amps).unwrap())
            .with_subsystem_dims(vec![3, 2])
            .unwrap();
        assert!((negativity(&bell).unwrap() - 0.5).abs() < 1e-12);
        assert!(negativity(&DensityMatrix::maximally_mixed(6)).is_err());
    }

    #[test]
    fn distance_quantifiers() {
        let diag = DensityMatrix::diagonal(&[0.5, 0.2, 0.3]).unwrap();
        assert!(distance_magic(&diag).unwrap() < 1e-9);
        assert!(distance_coherence(&diag).unwrap() < 1e-9);
        let v = StabilizerVertexSet::cached(3).unwrap();
        assert!(distance_magic(&v.projectors()[5]).unwrap() < 1e-9);
        let s = strange();
        assert!(distance_magic(&s).unwrap() > 0.2);
        assert!(distance_magic(&s).unwrap() <= distance_coherence(&s).unwrap());
    }

    #[test]
    fn report_order_is_fixed() {
        let names: Vec<_> = all_monotones(&strange(), LogBase::E)
            .unwrap()
            .into_iter()
            .map(|r| r.name)
            .collect();
        assert_eq!(
            names,
            [
                "sum_negativity",
                "mana",
                "l1_coherence",
                "l2_coherence",
                "cw_coherence",
                "distance_coherence",
                "distance_magic"
            ]
        );
    }
}

//! Quantum channels in Kraus form, samplers for them, and the free-operation
//! hierarchy of coherence and magic.

use std::collections::{HashMap, VecDeque};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, complex_gaussian, dagger, hermitize, isometry, max_abs_diff, trace_distance, CMatrix, DensityMatrix, Seed,
};
use crate::monotones::distance_magic;
use crate::stabilizer::{clifford_generators, fourier, in_polytope, StabilizerVertexSet, MEMBERSHIP_TOL};

/// Completeness tolerance for `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Default entry threshold for [`is_incoherent`].
pub const INCOHERENT_TOL: f64 = 1e-10;

/// Outcomes with probability at or below this are dropped.
pub const OUTCOME_TOL: f64 = 1e-12;

/// Redraws of the row map before the incoherent sampler gives up.
const SAMPLER_ATTEMPTS: usize = 1000;

/// Word-length cap for the Clifford enumeration.
const WORD_CAP: usize = 8;

#[derive(Clone, Debug)]
pub struct KrausChannel {
    input_dim: usize,
    output_dim: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validates shapes and completeness.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("a channel needs at least one Kraus operator".into()))?;
        let (output_dim, input_dim) = first.shape();
        for k in &kraus {
            if k.shape() != (output_dim, input_dim) {
                return Err(Error::DimensionMismatch {
                    expected: output_dim * input_dim,
                    found: k.nrows() * k.ncols(),
                });
            }
        }
        let ch = Self { input_dim, output_dim, kraus };
        let defect = ch.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators are not complete (defect {defect:e})"
            )));
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(CMatrix::identity(d, d))
    }

    /// `ρ ↦ UρU†`. The caller is responsible for `U` being unitary.
    pub fn unitary(u: CMatrix) -> Self {
        Self {
            input_dim: u.ncols(),
            output_dim: u.nrows(),
            kraus: vec![u],
        }
    }

    /// Complete dephasing, `K_i = |i⟩⟨i|`.
    pub fn dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut k = CMatrix::zeros(d, d);
                k[(i, i)] = c64(1.0, 0.0);
                k
            })
            .collect();
        Self { input_dim: d, output_dim: d, kraus }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Max entry of `|Σ K†K − I|`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.input_dim;
        let mut sum = CMatrix::zeros(d, d);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        max_abs_diff(&sum, &CMatrix::identity(d, d))
    }

    fn check_input(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

/// `Σ K ρ K†`.
pub fn apply(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    channel.check_input(rho)?;
    let d = channel.output_dim;
    let mut out = CMatrix::zeros(d, d);
    for k in &channel.kraus {
        out += k * rho.matrix() * k.adjoint();
    }
    Ok(DensityMatrix::from_matrix_unchecked(hermitize(&out), None))
}

/// Post-measurement ensemble `(p_i, K_i ρ K_i†/p_i)` of a selective
/// measurement, dropping outcomes with `p_i ≤ 1e-12`.
pub fn selective_outcomes(channel: &KrausChannel, rho: &DensityMatrix) -> Result<Vec<(f64, DensityMatrix)>> {
    channel.check_input(rho)?;
    let mut out = Vec::with_capacity(channel.kraus.len());
    for k in &channel.kraus {
        let m = k * rho.matrix() * k.adjoint();
        let p = m.trace().re;
        if p > OUTCOME_TOL {
            out.push((p, DensityMatrix::from_matrix_unchecked(hermitize(&m.unscale(p)), None)));
        }
    }
    Ok(out)
}

/// At most one entry above `tol` in modulus per column of every Kraus
/// operator.
pub fn is_incoherent(channel: &KrausChannel, tol: f64) -> bool {
    channel.kraus.iter().all(|k| is_monomial_like(k, tol))
}

fn is_monomial_like(k: &CMatrix, tol: f64) -> bool {
    k.column_iter().all(|col| col.iter().filter(|z| z.norm() > tol).count() <= 1)
}

/// Random incoherent channel on `C^d` with `n_kraus` Kraus operators.
///
/// Each Kraus operator sends column `j` to a single row `f_k(j)` with
/// amplitude `a_kj`. Completeness requires the vectors `a_·j ∈ C^n` to be
/// unit and orthogonal in the overlap pattern of the row maps, so the
/// columns are drawn one at a time, each projected off the constraints of
/// the earlier ones. Row maps with no room left are redrawn.
pub fn sample_incoherent_channel(d: usize, n_kraus: usize, seed: Seed) -> Result<KrausChannel> {
    if n_kraus == 0 || d == 0 {
        return Err(Error::InvalidArgument("need d >= 1 and n_kraus >= 1".into()));
    }
    let mut rng = seed.rng();
    for _ in 0..SAMPLER_ATTEMPTS {
        let rows: Vec<Vec<usize>> = (0..n_kraus)
            .map(|_| (0..d).map(|_| rng.random_range(0..d)).collect())
            .collect();
        if let Some(amps) = draw_amplitudes(&rows, d, &mut rng) {
            let kraus = (0..n_kraus)
                .map(|k| {
                    let mut m = CMatrix::zeros(d, d);
                    for j in 0..d {
                        m[(rows[k][j], j)] = amps[j][k];
                    }
                    m
                })
                .collect();
            return KrausChannel::new(kraus);
        }
    }
    Err(Error::SamplingFailed(SAMPLER_ATTEMPTS))
}

fn draw_amplitudes<R: Rng + ?Sized>(rows: &[Vec<usize>], d: usize, rng: &mut R) -> Option<Vec<DVector<Complex64>>> {
    let n = rows.len();
    let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(d);
    for j in 0..d {
        // Constraint vectors b_i with (b_i)_k = a_ki [f_k(i) = f_k(j)].
        let mut basis: Vec<DVector<Complex64>> = Vec::new();
        for (i, a) in cols.iter().enumerate() {
            let mut b = DVector::from_fn(n, |k, _| if rows[k][i] == rows[k][j] { a[k] } else { c64(0.0, 0.0) });
            for e in &basis {
                let overlap = e.dotc(&b);
                b -= e * overlap;
            }
            let norm = b.norm();
            if norm > 1e-12 {
                basis.push(b / c64(norm, 0.0));
            }
        }
        if basis.len() >= n {
            return None;
        }
        let mut v = DVector::from_fn(n, |_, _| complex_gaussian(rng));
        for e in &basis {
            let overlap = e.dotc(&v);
            v -= e * overlap;
        }
        let norm = v.norm();
        if norm < 1e-8 {
            return None;
        }
        cols.push(v / c64(norm, 0.0));
    }
    Some(cols)
}

/// Haar-random Stinespring isometry cut into `n_kraus` blocks: a generic
/// CPTP map from `C^d_in` to `C^d_out`.
pub fn sample_cptp_channel(d_in: usize, d_out: usize, n_kraus: usize, seed: Seed) -> Result<KrausChannel> {
    if n_kraus == 0 || d_in == 0 || d_out == 0 || d_out * n_kraus < d_in {
        return Err(Error::InvalidArgument(format!(
            "no isometry from C^{d_in} into {n_kraus} blocks of C^{d_out}"
        )));
    }
    let mut rng = seed.rng();
    let v = isometry(d_out * n_kraus, d_in, &mut rng);
    let kraus = (0..n_kraus)
        .map(|k| v.rows(k * d_out, d_out).into_owned())
        .collect();
    KrausChannel::new(kraus)
}

/// Scales `u` so its first significant entry is real positive.
fn phase_normalized(u: &CMatrix) -> CMatrix {
    let pivot = u.iter().find(|z| z.norm() > 1e-9).copied().unwrap_or(c64(1.0, 0.0));
    u * (pivot.conj() / pivot.norm())
}

fn phase_key(u: &CMatrix) -> Vec<(i64, i64)> {
    phase_normalized(u)
        .iter()
        .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
        .collect()
}

/// Clifford unitaries that map basis states to basis states: the monomial
/// members of the group generated by `X, Z, F, S`, one per global phase
/// class. Words are explored breadth first up to length 8, and the list must
/// stop growing before the cap is reached.
///
/// `d = 2` yields 8 elements, `d = 3` yields 54.
pub fn incoherent_clifford_unitaries(d: usize) -> Result<Vec<CMatrix>> {
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "incoherent Clifford enumeration covers d = 2 and d = 3",
        });
    }
    let gens = clifford_generators(d)?;
    let id = CMatrix::identity(d, d);
    let mut seen: HashMap<Vec<(i64, i64)>, ()> = HashMap::new();
    seen.insert(phase_key(&id), ());
    let mut group = vec![id.clone()];
    let mut queue = VecDeque::from([(id, 0usize)]);
    let mut monomial_count_by_len = [0usize; WORD_CAP + 1];
    while let Some((u, len)) = queue.pop_front() {
        if len == WORD_CAP {
            continue;
        }
        for g in &gens {
            let next = &g.unitary * &u;
            if seen.insert(phase_key(&next), ()).is_none() {
                if is_monomial_like(&next, 1e-9) {
                    monomial_count_by_len[len + 1] += 1;
                }
                group.push(next.clone());
                queue.push_back((next, len + 1));
            }
        }
    }
    if monomial_count_by_len[WORD_CAP] != 0 {
        return Err(Error::InvalidArgument(format!(
            "Clifford enumeration did not saturate within {WORD_CAP} letters"
        )));
    }
    Ok(group
        .into_iter()
        .filter(|u| is_monomial_like(u, 1e-9))
        .map(|u| phase_normalized(&u))
        .collect())
}

/// Every stabilizer vertex is a fixed point of the channel, within `tol` in
/// trace distance.
pub fn is_genuinely_stabilizer(channel: &KrausChannel, vertices: &StabilizerVertexSet, tol: f64) -> Result<bool> {
    for v in vertices.projectors() {
        if trace_distance(&apply(channel, v)?, v)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every stabilizer vertex lands in the stabilizer polytope. By linearity
/// this is the same as the whole polytope being mapped into itself.
pub fn is_stabilizer_preserving(channel: &KrausChannel, vertices: &StabilizerVertexSet, tol: f64) -> Result<bool> {
    for v in vertices.projectors() {
        if !in_polytope(&apply(channel, v)?, vertices, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HierarchyFlags {
    pub incoherent: bool,
    pub incoherent_clifford_unitary: bool,
    pub stabilizer_preserving: bool,
    pub genuinely_stabilizer: bool,
}

/// Places a channel on a `d ∈ {2, 3}` system in the free-operation
/// hierarchy.
pub fn classify(channel: &KrausChannel) -> Result<HierarchyFlags> {
    let d = channel.input_dim;
    if channel.output_dim != d {
        return Err(Error::DimensionMismatch { expected: d, found: channel.output_dim });
    }
    let vertices = StabilizerVertexSet::cached(d)?;
    let incoherent = is_incoherent(channel, INCOHERENT_TOL);
    let incoherent_clifford_unitary = incoherent
        && channel.kraus.len() == 1
        && {
            let key = phase_key(&channel.kraus[0]);
            incoherent_clifford_unitaries(d)?.iter().any(|u| phase_key(u) == key)
        };
    Ok(HierarchyFlags {
        incoherent,
        incoherent_clifford_unitary,
        stabilizer_preserving: is_stabilizer_preserving(channel, &vertices, MEMBERSHIP_TOL)?,
        genuinely_stabilizer: is_genuinely_stabilizer(channel, &vertices, 1e-9)?,
    })
}

/// Dimension of the space of `d x d` matrices that are diagonal in both the
/// computational and the Fourier basis. It is 1 (the scalars) for every `d`.
pub fn doubly_diagonal_dimension(d: usize) -> usize {
    // Unknowns: the diagonal m of M. Constraint: F† diag(m) F has zero
    // off-diagonal entries, which is linear in m.
    let f = fourier(d);
    let mut rows = Vec::new();
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            // (F† diag(m) F)_ab = Σ_j conj(F_ja) m_j F_jb.
            let coeffs: Vec<Complex64> = (0..d).map(|j| f[(j, a)].conj() * f[(j, b)]).collect();
            rows.push(coeffs);
        }
    }
    if rows.is_empty() {
        return d;
    }
    let a = CMatrix::from_fn(rows.len(), d, |r, c| rows[r][c]);
    let sv = a.singular_values();
    let rank = sv.iter().filter(|&&s| s > 1e-10).count();
    d - rank
}

/// Lower bound on the magic that incoherent operations can extract from
/// `rho`: the largest [`distance_magic`] over the identity, `n_trials`
/// sampled incoherent channels, and every incoherent Clifford unitary.
pub fn estimate_cm(rho: &DensityMatrix, n_trials: usize, seed: Seed) -> Result<f64> {
    let d = rho.dim();
    if d != 3 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "the magic estimator is defined for qutrits",
        });
    }
    let mut best = distance_magic(rho)?;
    for u in incoherent_clifford_unitaries(d)? {
        best = best.max(distance_magic(&apply(&KrausChannel::unitary(u), rho)?)?);
    }
    for i in 0..n_trials {
        let ch = sample_incoherent_channel(d, 1 + i % d, seed.derive(i as u64))?;
        best = best.max(distance_magic(&apply(&ch, rho)?)?);
    }
    Ok(best)
}

/// `U ρ U†` for a unitary `u`, kept as a shortcut for audits.
pub fn conjugate(u: &CMatrix, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(hermitize(&(u * rho.matrix() * dagger(u))), rho.subsystem_dims().map(<[_]>::to_vec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_mixed, PureState};
    use crate::monotones::{distance_coherence, l1_coherence};
    use crate::stabilizer::phase_gate;

    fn c_state() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::from_real(&[1.0, 1.0, 1.0]).unwrap())
    }

    #[test]
    fn dephasing_is_incoherent_and_diagonalizes() {
        let ch = KrausChannel::dephasing(3);
        assert!(is_incoherent(&ch, INCOHERENT_TOL));
        let rho = random_mixed(3, 3, Seed(5)).unwrap();
        let out = apply(&ch, &rho).unwrap();
        let diag = DensityMatrix::diagonal(&rho.populations()).unwrap();
        assert!(max_abs_diff(out.matrix(), diag.matrix()) < 1e-15);
    }

    #[test]
    fn identity_channel_is_identity() {
        let rho = random_mixed(3, 2, Seed(6)).unwrap();
        let out = apply(&KrausChannel::identity(3), &rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn incoherent_samples_are_valid() {
        for s in 0..300u64 {
            let n = 1 + (s as usize % 4);
            let ch = sample_incoherent_channel(3, n, Seed(s)).unwrap();
            assert!(ch.completeness_defect() < COMPLETENESS_TOL);
            assert!(is_incoherent(&ch, INCOHERENT_TOL));
            assert_eq!(ch.kraus().len(), n);
            let diag = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
            assert!(apply(&ch, &diag).unwrap().is_diagonal(1e-10));
        }
    }

    #[test]
    fn incoherent_sampler_handles_row_collisions() {
        // With two Kraus operators on a qutrit, some row maps send two
        // columns to one row; the result must stay complete regardless.
        let mut collided = 0;
        for s in 0..200u64 {
            let ch = sample_incoherent_channel(3, 2, Seed(1000 + s)).unwrap();
            assert!(ch.completeness_defect() < COMPLETENESS_TOL);
            collided += ch
                .kraus()
                .iter()
                .filter(|k| k.row_iter().any(|r| r.iter().filter(|z| z.norm() > 1e-12).count() > 1))
                .count();
        }
        assert!(collided > 0);
    }

    #[test]
    fn single_kraus_incoherent_sample_is_monomial_unitary() {
        for s in 0..50u64 {
            let ch = sample_incoherent_channel(3, 1, Seed(s)).unwrap();
            let u = &ch.kraus()[0];
            assert!(crate::linalg::is_unitary(u, 1e-10));
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_incoherent_channel(3, 3, Seed(77)).unwrap();
        let b = sample_incoherent_channel(3, 3, Seed(77)).unwrap();
        for (x, y) in a.kraus().iter().zip(b.kraus()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn cptp_samples_are_complete_and_trace_preserving() {
        for s in 0..20u64 {
            let ch = sample_cptp_channel(3, 3, 1 + s as usize % 4, Seed(s)).unwrap();
            assert!(ch.completeness_defect() < COMPLETENESS_TOL);
            let out = apply(&ch, &random_mixed(3, 3, Seed(s + 50)).unwrap()).unwrap();
            assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn selective_outcomes_resolve_the_channel() {
        let rho = random_mixed(3, 3, Seed(8)).unwrap();
        let ch = sample_incoherent_channel(3, 3, Seed(9)).unwrap();
        let outs = selective_outcomes(&ch, &rho).unwrap();
        let total: f64 = outs.iter().map(|(p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-10);
        let mut mix = CMatrix::zeros(3, 3);
        for (p, o) in &outs {
            mix += o.matrix() * c64(*p, 0.0);
        }
        assert!(max_abs_diff(&mix, apply(&ch, &rho).unwrap().matrix()) < 1e-10);
    }

    #[test]
    fn dephasing_c_state_gives_three_equal_outcomes() {
        let outs = selective_outcomes(&KrausChannel::dephasing(3), &c_state()).unwrap();
        assert_eq!(outs.len(), 3);
        for (p, _) in outs {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        let unitary = selective_outcomes(&KrausChannel::unitary(fourier(3)), &c_state()).unwrap();
        assert_eq!(unitary.len(), 1);
        assert!((unitary[0].0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incoherence_of_named_unitaries() {
        assert!(!is_incoherent(&KrausChannel::unitary(fourier(3)), INCOHERENT_TOL));
        assert!(is_incoherent(&KrausChannel::unitary(phase_gate(2)), INCOHERENT_TOL));
        let perm = CMatrix::from_fn(3, 3, |i, j| if i == (j + 2) % 3 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        assert!(is_incoherent(&KrausChannel::unitary(perm), INCOHERENT_TOL));
    }

    #[test]
    fn incoherent_clifford_counts_and_members() {
        let q = incoherent_clifford_unitaries(2).unwrap();
        assert_eq!(q.len(), 8);
        let x2 = crate::phase_space::shift(2);
        assert!(q.iter().any(|u| phase_key(u) == phase_key(&x2)));

        let t = incoherent_clifford_unitaries(3).unwrap();
        assert_eq!(t.len(), 54);
        for named in [crate::phase_space::shift(3), crate::phase_space::boost(3)] {
            assert!(t.iter().any(|u| phase_key(u) == phase_key(&named)));
        }
        assert!(!t.iter().any(|u| phase_key(u) == phase_key(&fourier(3))));
        for a in &t {
            assert!(crate::linalg::is_unitary(a, 1e-10));
            for b in t.iter().step_by(5) {
                assert!(is_monomial_like(&(a * b), 1e-9));
            }
        }
        assert!(incoherent_clifford_unitaries(5).is_err());
    }

    #[test]
    fn genuinely_stabilizer_examples() {
        let v2 = StabilizerVertexSet::cached(2).unwrap();
        assert!(is_genuinely_stabilizer(&KrausChannel::identity(2), &v2, 1e-9).unwrap());
        assert!(!is_genuinely_stabilizer(&KrausChannel::dephasing(2), &v2, 1e-9).unwrap());
        let flags = classify(&KrausChannel::dephasing(2)).unwrap();
        assert!(flags.incoherent && flags.stabilizer_preserving);
        assert!(!flags.genuinely_stabilizer && !flags.incoherent_clifford_unitary);
        let f = classify(&KrausChannel::unitary(fourier(3))).unwrap();
        assert!(!f.incoherent && f.stabilizer_preserving);
        let x = classify(&KrausChannel::unitary(crate::phase_space::shift(3))).unwrap();
        assert!(x.incoherent_clifford_unitary);
    }

    #[test]
    fn only_scalars_are_diagonal_in_both_bases() {
        for d in 2..=7 {
            assert_eq!(doubly_diagonal_dimension(d), 1, "d = {d}");
        }
    }

    #[test]
    fn estimate_cm_brackets() {
        let diag = DensityMatrix::diagonal(&[0.6, 0.3, 0.1]).unwrap();
        assert!(estimate_cm(&diag, 20, Seed(1)).unwrap() < 1e-9);
        for s in 0..3u64 {
            let rho = random_mixed(3, 1 + s as usize, Seed(40 + s)).unwrap();
            let est = estimate_cm(&rho, 20, Seed(s)).unwrap();
            assert!(est >= distance_magic(&rho).unwrap() - 1e-9);
            assert!(est <= distance_coherence(&rho).unwrap() + 1e-9);
        }
    }

    #[test]
    fn selective_l1_does_not_grow() {
        for s in 0..100u64 {
            let rho = random_mixed(3, 1 + s as usize % 3, Seed(s)).unwrap();
            let ch = sample_incoherent_channel(3, 1 + s as usize % 4, Seed(s + 500)).unwrap();
            let avg: f64 = selective_outcomes(&ch, &rho)
                .unwrap()
                .iter()
                .map(|(p, o)| p * l1_coherence(o))
                .sum();
            assert!(avg <= l1_coherence(&rho) + 1e-9);
        }
    }
}

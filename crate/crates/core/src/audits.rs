//! Randomized audits of the channel-level propositions.
//!
//! Every check records a margin `lhs − rhs` per trial; a trial violates the
//! check when its margin exceeds the tolerance. Trials use seeds derived from
//! one base seed, so reports are reproducible.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::channels::{
    apply, conjugate, doubly_diagonal_dimension, incoherent_clifford_unitaries, is_genuinely_stabilizer,
    sample_cptp_channel, sample_incoherent_channel, selective_outcomes, KrausChannel,
};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, haar_unitary, kron, partial_trace, random_mixed, random_pure, tensor, CMatrix, DensityMatrix, Seed,
};
use crate::monotones::{distance_coherence, distance_magic, l1_coherence, lp_coherence};
use crate::stabilizer::StabilizerVertexSet;

/// Powers used by the l_p audit.
pub const LP_POWERS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Result1,
    Lp,
    Gso,
    Selective,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Result1, Suite::Lp, Suite::Gso, Suite::Selective];

    /// Trial count used when none is given.
    pub fn default_trials(self) -> usize {
        match self {
            Suite::Result1 | Suite::Gso => 10_000,
            Suite::Lp | Suite::Selective => 1_000,
        }
    }

    /// Tolerance used when none is given.
    pub fn default_tol(self) -> f64 {
        match self {
            Suite::Result1 => 1e-8,
            _ => 1e-9,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Result1 => "result1",
            Suite::Lp => "lp",
            Suite::Gso => "gso",
            Suite::Selective => "selective",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown audit suite {s:?}")))
    }
}

/// Outcome of one check over many trials.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    /// Largest `lhs − rhs` seen; `-inf` when there were no trials.
    pub worst_margin: f64,
    pub tol: f64,
}

impl Check {
    fn from_margins(name: impl Into<String>, margins: &[f64], tol: f64) -> Self {
        Self {
            name: name.into(),
            trials: margins.len(),
            violations: margins.iter().filter(|&&m| !(m <= tol)).count(),
            worst_margin: margins.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            tol,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite={}", self.suite)?;
        writeln!(f, "seed={}", self.seed)?;
        for c in &self.checks {
            writeln!(
                f,
                "check={} trials={} violations={} worst_margin={:e} tol={:e} status={}",
                c.name,
                c.trials,
                c.violations,
                c.worst_margin,
                c.tol,
                if c.passed() { "pass" } else { "fail" }
            )?;
        }
        write!(f, "status={}", if self.passed() { "pass" } else { "fail" })
    }
}

/// Runs `suite` with `trials` trials (or the suite default).
pub fn run(suite: Suite, trials: Option<usize>, seed: Seed, tol: Option<f64>) -> Result<AuditReport> {
    let n = trials.unwrap_or(suite.default_trials());
    if n == 0 {
        return Err(Error::InvalidArgument("an audit needs at least one trial".into()));
    }
    let tol = tol.unwrap_or(suite.default_tol());
    let checks = match suite {
        Suite::Result1 => result1(n, seed, tol)?,
        Suite::Lp => lp(n, seed, tol)?,
        Suite::Gso => gso(n, seed, tol)?,
        Suite::Selective => selective(n, seed, tol)?,
    };
    Ok(AuditReport { suite, seed: seed.0, checks })
}

/// Pure Haar on even indices, Hilbert-Schmidt of rank 1..=d on odd ones.
fn random_state(d: usize, i: usize, seed: Seed) -> Result<DensityMatrix> {
    if i.is_multiple_of(2) {
        Ok(DensityMatrix::from_pure(&random_pure(d, seed)?))
    } else {
        random_mixed(d, 1 + (i / 2) % d, seed)
    }
}

fn random_diagonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    let raw: Vec<f64> = (0..d).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let s: f64 = raw.iter().sum();
    DensityMatrix::diagonal(&raw.iter().map(|x| x / s).collect::<Vec<_>>())
}

fn result1(n: usize, seed: Seed, tol: f64) -> Result<Vec<Check>> {
    let margins: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = random_state(3, i, seed.derive(2 * i as u64))?;
            let ch = sample_incoherent_channel(3, 1 + i % 4, seed.derive(2 * i as u64 + 1))?;
            Ok(distance_magic(&apply(&ch, &rho)?)? - distance_coherence(&rho)?)
        })
        .collect::<Result<_>>()?;
    Ok(vec![Check::from_margins("magic_after_incoherent_le_coherence", &margins, tol)])
}

/// `|a, b⟩ ↦ |a, b + a⟩` when `onto_b`, else `|a, b⟩ ↦ |a + b, b⟩`, on two qutrits.
fn controlled_shift(onto_b: bool) -> CMatrix {
    let mut m = CMatrix::zeros(9, 9);
    for a in 0..3 {
        for b in 0..3 {
            let (ta, tb) = if onto_b { (a, (a + b) % 3) } else { ((a + b) % 3, b) };
            m[(3 * ta + tb, 3 * a + b)] = c64(1.0, 0.0);
        }
    }
    m
}

fn lp(n: usize, seed: Seed, tol: f64) -> Result<Vec<Check>> {
    let cliffords = incoherent_clifford_unitaries(3)?;
    struct Trial {
        unitary: [f64; 4],
        tensoring: [f64; 4],
        partial_trace: [f64; 4],
        identity: [f64; 4],
        protocol: [f64; 4],
    }
    let trials: Vec<Trial> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = random_state(3, i, seed.derive(2 * i as u64))?;
            let mut rng = seed.derive(2 * i as u64 + 1).rng();
            let u = &cliffords[rng.random_range(0..cliffords.len())];
            let v = &cliffords[rng.random_range(0..cliffords.len())];
            let sigma = random_diagonal(3, &mut rng)?;
            let q = sigma.populations();

            let rotated = conjugate(u, &rho);
            let joint = tensor(&rotated, &sigma);
            let reduced = partial_trace(&joint, 0)?;
            let w = match rng.random_range(0..3) {
                0 => kron(u, v),
                1 => controlled_shift(true) * kron(u, v),
                _ => controlled_shift(false) * kron(u, v),
            };
            let protocol_out = partial_trace(&conjugate(&w, &tensor(&rho, &sigma)), 0)?;

            let mut t = Trial {
                unitary: [0.0; 4],
                tensoring: [0.0; 4],
                partial_trace: [0.0; 4],
                identity: [0.0; 4],
                protocol: [0.0; 4],
            };
            for (k, &p) in LP_POWERS.iter().enumerate() {
                let c_rho = lp_coherence(&rho, p)?;
                let c_rot = lp_coherence(&rotated, p)?;
                let c_joint = lp_coherence(&joint, p)?;
                t.unitary[k] = c_rot - c_rho;
                t.tensoring[k] = c_joint - c_rot;
                t.partial_trace[k] = lp_coherence(&reduced, p)? - c_joint;
                let factor = q.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p);
                t.identity[k] = (c_joint - factor * c_rot).abs();
                t.protocol[k] = lp_coherence(&protocol_out, p)? - c_rho;
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;

    let mut checks = Vec::new();
    for (k, &p) in LP_POWERS.iter().enumerate() {
        let col = |f: fn(&Trial) -> [f64; 4]| trials.iter().map(|t| f(t)[k]).collect::<Vec<_>>();
        checks.push(Check::from_margins(format!("unitary_p{p}"), &col(|t| t.unitary), tol));
        checks.push(Check::from_margins(format!("tensoring_p{p}"), &col(|t| t.tensoring), tol));
        checks.push(Check::from_margins(format!("tensoring_identity_p{p}"), &col(|t| t.identity), 1e-10));
        checks.push(Check::from_margins(format!("partial_trace_p{p}"), &col(|t| t.partial_trace), tol));
        checks.push(Check::from_margins(format!("protocol_p{p}"), &col(|t| t.protocol), tol));
    }
    Ok(checks)
}

fn gso(n: usize, seed: Seed, tol: f64) -> Result<Vec<Check>> {
    let vertices = StabilizerVertexSet::cached(2)?;
    // Margin is 1 for a channel that fixes every vertex, 0 otherwise, so any
    // fixed-point channel shows up as a violation.
    let margins: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = seed.derive(i as u64);
            let ch = match i % 3 {
                0 => sample_cptp_channel(2, 2, 1 + (i / 3) % 4, s)?,
                1 => sample_incoherent_channel(2, 1 + (i / 3) % 4, s)?,
                _ => KrausChannel::unitary(haar_unitary(2, &mut s.rng())),
            };
            let fixed = is_genuinely_stabilizer(&ch, &vertices, 1e-9)?;
            Ok(if fixed { 1.0 } else { 0.0 })
        })
        .collect::<Result<_>>()?;
    let mut checks = vec![Check::from_margins("no_fixed_point_channel", &margins, tol.min(0.5))];
    // Scalars are the only matrices diagonal in both the computational and
    // Fourier bases: the algebraic core of the proposition.
    let dims: Vec<f64> = (2..=7).map(|d| doubly_diagonal_dimension(d) as f64 - 1.0).collect();
    checks.push(Check::from_margins("doubly_diagonal_is_scalar", &dims, 0.0));
    Ok(checks)
}

fn selective(n: usize, seed: Seed, tol: f64) -> Result<Vec<Check>> {
    let margins: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = random_state(3, i, seed.derive(2 * i as u64))?;
            let ch = sample_incoherent_channel(3, 1 + i % 4, seed.derive(2 * i as u64 + 1))?;
            let avg: f64 = selective_outcomes(&ch, &rho)?
                .iter()
                .map(|(p, out)| p * l1_coherence(out))
                .sum();
            Ok(avg - l1_coherence(&rho))
        })
        .collect::<Result<_>>()?;
    Ok(vec![Check::from_margins("selective_l1_average_le_input", &margins, tol)])
}

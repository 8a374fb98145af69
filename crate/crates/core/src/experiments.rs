//! Seeded batch experiments that emit CSV tables.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::audits::{self, AuditReport, Suite};
use crate::error::{Error, Result};
use crate::io::{format_f64, Cell, CsvTable};
use crate::linalg::{
    max_coherent, noisy, norrell, partial_trace, random_mixed, random_pure, strange, DensityMatrix, PureState, Seed,
};
use crate::monotones::{l1_coherence, negativity, sum_negativity, LogBase};

/// Run parameters, readable from a flat `key=value` file.
///
/// | key | default | meaning |
/// |---|---|---|
/// | `seed` | 42 | base seed |
/// | `samples` | 100000 | random states per scatter (pure qutrits, mixed 3x2 states) |
/// | `mixed_samples` | 10000 | mixed qutrits in the coherence scatter |
/// | `pure_samples` | 10000 | pure 3x2 states in the entanglement scatter |
/// | `rank` | 0 | rank of sampled mixed states, 0 for full rank |
/// | `p_start`, `p_stop`, `p_step` | 0, 1, 0.01 | noise grid |
/// | `tol` | 1e-9 | tolerance for closed forms and conjectures |
/// | `mana_base` | e | log base for mana |
/// | `out` | out | output directory for `run_all` |
/// | `result1_trials`, `lp_trials`, `gso_trials`, `selective_trials` | suite defaults | audit sizes |
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: Seed,
    pub samples: usize,
    pub mixed_samples: usize,
    pub pure_samples: usize,
    pub rank: usize,
    pub p_start: f64,
    pub p_stop: f64,
    pub p_step: f64,
    pub tol: f64,
    pub mana_base: LogBase,
    pub out: PathBuf,
    pub audit_trials: BTreeMap<String, usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: Seed(42),
            samples: 100_000,
            mixed_samples: 10_000,
            pure_samples: 10_000,
            rank: 0,
            p_start: 0.0,
            p_stop: 1.0,
            p_step: 0.01,
            tol: 1e-9,
            mana_base: LogBase::E,
            out: PathBuf::from("out"),
            audit_trials: BTreeMap::new(),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value {value:?} for `{key}`")))
}

impl ExperimentConfig {
    /// Defaults overridden by the `key=value` lines of `text`. Blank lines
    /// and `#` comments are skipped.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, found {line:?}"),
            })?;
            cfg.set(k.trim(), v.trim()).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_kv_str(&std::fs::read_to_string(path)?)
    }

    /// Sets one key. Call [`ExperimentConfig::validate`] afterwards.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = Seed(parse_value(key, value)?),
            "samples" => self.samples = parse_value(key, value)?,
            "mixed_samples" => self.mixed_samples = parse_value(key, value)?,
            "pure_samples" => self.pure_samples = parse_value(key, value)?,
            "rank" => self.rank = parse_value(key, value)?,
            "p_start" => self.p_start = parse_value(key, value)?,
            "p_stop" => self.p_stop = parse_value(key, value)?,
            "p_step" => self.p_step = parse_value(key, value)?,
            "tol" => self.tol = parse_value(key, value)?,
            "mana_base" => self.mana_base = value.parse()?,
            "out" => self.out = PathBuf::from(value),
            "result1_trials" | "lp_trials" | "gso_trials" | "selective_trials" => {
                self.audit_trials.insert(key.to_string(), parse_value(key, value)?);
            }
            _ => return Err(Error::InvalidArgument(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p_start) || !(0.0..=1.0).contains(&self.p_stop) || self.p_start > self.p_stop {
            return bad(format!("p grid [{}, {}] must lie in [0,1]", self.p_start, self.p_stop));
        }
        if !(self.p_step > 0.0) {
            return bad("p_step must be positive".into());
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive".into());
        }
        if self.rank > 6 {
            return bad("rank exceeds the largest state dimension (6)".into());
        }
        if self.audit_trials.values().any(|&n| n == 0) {
            return bad("audit trial counts must be at least 1".into());
        }
        Ok(())
    }

    /// Noise grid; points are `start + k·step`, with `stop` included when
    /// it lies on the grid.
    pub fn p_grid(&self) -> Vec<f64> {
        let n = ((self.p_stop - self.p_start) / self.p_step + 1e-9).floor() as usize;
        (0..=n).map(|k| (self.p_start + k as f64 * self.p_step).min(self.p_stop)).collect()
    }

    fn trials_for(&self, suite: Suite) -> Option<usize> {
        self.audit_trials.get(&format!("{suite}_trials")).copied()
    }
}

/// The four noisy families of the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Curve {
    StrangeWhite,
    NorrellWhite,
    StrangeCoherent,
    NorrellCoherent,
}

impl Curve {
    pub const ALL: [Curve; 4] = [
        Curve::StrangeWhite,
        Curve::NorrellWhite,
        Curve::StrangeCoherent,
        Curve::NorrellCoherent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Curve::StrangeWhite => "strange_white",
            Curve::NorrellWhite => "norrell_white",
            Curve::StrangeCoherent => "strange_coherent",
            Curve::NorrellCoherent => "norrell_coherent",
        }
    }

    pub fn state(self, p: f64) -> Result<DensityMatrix> {
        let psi = match self {
            Curve::StrangeWhite | Curve::StrangeCoherent => strange(),
            Curve::NorrellWhite | Curve::NorrellCoherent => norrell(),
        };
        let noise = match self {
            Curve::StrangeWhite | Curve::NorrellWhite => DensityMatrix::maximally_mixed(3),
            Curve::StrangeCoherent | Curve::NorrellCoherent => DensityMatrix::from_pure(&max_coherent()),
        };
        noisy(&psi, &noise, p)
    }

    /// Linear pieces of the closed form, in order of increasing `p`.
    pub fn branches(self) -> &'static [fn(f64) -> f64] {
        match self {
            Curve::StrangeWhite => &[|p| 2.0 / 9.0 * (3.0 - 4.0 * p), |_| 0.0],
            Curve::NorrellWhite => &[|p| 2.0 / 9.0 * (3.0 - 5.0 * p), |_| 0.0],
            Curve::StrangeCoherent => &[|p| 2.0 / 9.0 * (3.0 - 2.0 * p), |p| (3.0 + p) / 9.0],
            Curve::NorrellCoherent => &[|p| 2.0 / 9.0 * (3.0 - p)],
        }
    }

    /// Where the closed form switches branch.
    pub fn kink(self) -> Option<f64> {
        match self {
            Curve::StrangeWhite => Some(0.75),
            Curve::NorrellWhite | Curve::StrangeCoherent => Some(0.6),
            Curve::NorrellCoherent => None,
        }
    }

    /// Closed-form sum negativity.
    pub fn closed_form(self, p: f64) -> f64 {
        let b = self.branches();
        match self.kink() {
            Some(k) if p > k => b[1](p),
            _ => b[0](p),
        }
    }
}

/// Kink located from measured data alone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kink {
    pub curve: Curve,
    pub expected: f64,
    pub detected: Option<f64>,
}

/// Finds where the branch that best explains the measurements switches.
/// The kink is placed where the straight lines through the last two points
/// of the first branch and the first two points of the second branch meet.
pub fn detect_kink(curve: Curve, ps: &[f64], measured: &[f64]) -> Option<f64> {
    let b = curve.branches();
    if b.len() < 2 {
        return None;
    }
    // 0 or 1 when one branch fits clearly better, None at a tie.
    let label: Vec<Option<usize>> = ps
        .iter()
        .zip(measured)
        .map(|(&p, &m)| {
            let (r0, r1) = ((m - b[0](p)).abs(), (m - b[1](p)).abs());
            if (r0 - r1).abs() < 1e-12 {
                None
            } else {
                Some(usize::from(r1 < r0))
            }
        })
        .collect();
    let left: Vec<usize> = (0..ps.len()).filter(|&i| label[i] == Some(0)).collect();
    let right: Vec<usize> = (0..ps.len()).filter(|&i| label[i] == Some(1)).collect();
    let last_left = *left.last()?;
    let first_right = *right.first()?;
    if first_right < last_left || left.len() < 2 || right.len() < 2 {
        return None;
    }
    let line = |i: usize, j: usize| {
        let slope = (measured[j] - measured[i]) / (ps[j] - ps[i]);
        (slope, measured[i] - slope * ps[i])
    };
    let (s0, c0) = line(left[left.len() - 2], last_left);
    let (s1, c1) = line(first_right, right[1]);
    if (s0 - s1).abs() < 1e-15 {
        return None;
    }
    Some((c1 - c0) / (s0 - s1))
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub table: CsvTable,
    /// Max `|measured − closed form|` per curve, in [`Curve::ALL`] order.
    pub max_error: [f64; 4],
    pub kinks: Vec<Kink>,
    /// Strange white-noise zero crossing lies beyond the Norrell one.
    pub white_crossover_ordered: bool,
    /// Norrell coherent-noise magic is at least the strange one on (0,1).
    pub coherent_dominance: bool,
}

impl SweepResult {
    /// Every closed form matches within `tol`, kinks sit within `1e-6` of
    /// the predicted points, and both orderings hold.
    pub fn passed(&self, tol: f64) -> bool {
        self.max_error.iter().all(|&e| e < tol)
            && self
                .kinks
                .iter()
                .all(|k| k.detected.is_some_and(|d| (d - k.expected).abs() < 1e-6))
            && self.white_crossover_ordered
            && self.coherent_dominance
    }
}

/// Sum negativity along the four noisy families versus their closed forms.
pub fn noise_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let ps = cfg.p_grid();
    let mut measured = [vec![], vec![], vec![], vec![]];
    for (k, c) in Curve::ALL.iter().enumerate() {
        measured[k] = ps.iter().map(|&p| sum_negativity(&c.state(p)?)).collect::<Result<_>>()?;
    }

    let mut header = vec!["p".to_string()];
    header.extend(Curve::ALL.iter().map(|c| format!("msn_{}", c.name())));
    header.extend(Curve::ALL.iter().map(|c| format!("ref_{}", c.name())));
    let mut table = CsvTable::new(header);
    let mut max_error = [0.0f64; 4];
    for (i, &p) in ps.iter().enumerate() {
        let mut row: Vec<Cell> = vec![p.into()];
        row.extend((0..4).map(|k| Cell::Num(measured[k][i])));
        for (k, c) in Curve::ALL.iter().enumerate() {
            let r = c.closed_form(p);
            max_error[k] = max_error[k].max((measured[k][i] - r).abs());
            row.push(r.into());
        }
        table.push(row);
    }

    let kinks: Vec<Kink> = Curve::ALL
        .iter()
        .enumerate()
        .filter_map(|(k, &c)| {
            c.kink().map(|expected| Kink {
                curve: c,
                expected,
                detected: detect_kink(c, &ps, &measured[k]),
            })
        })
        .collect();
    let kink_of = |c: Curve| kinks.iter().find(|k| k.curve == c).and_then(|k| k.detected);
    let white_crossover_ordered = matches!(
        (kink_of(Curve::StrangeWhite), kink_of(Curve::NorrellWhite)),
        (Some(s), Some(n)) if s > n
    );
    let coherent_dominance = ps
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0 && p < 1.0)
        .all(|(i, _)| measured[3][i] >= measured[2][i] - cfg.tol);

    for (k, c) in Curve::ALL.iter().enumerate() {
        table.note(&format!("max_abs_err_{}", c.name()), format_f64(max_error[k]));
    }
    for k in &kinks {
        let detected = k.detected.map_or("none".to_string(), format_f64);
        table.note(&format!("kink_{}", k.curve.name()), detected);
    }
    table.note("white_crossover_ordered", white_crossover_ordered);
    table.note("coherent_dominance", coherent_dominance);

    Ok(SweepResult {
        table,
        max_error,
        kinks,
        white_crossover_ordered,
        coherent_dominance,
    })
}

/// `(C/2)·√(1 − C/2)`, the conjectured lower bound on the sum negativity of
/// a pure qutrit with l1 coherence `C`.
pub fn coherence_bound(c: f64) -> f64 {
    c / 2.0 * (1.0 - c / 2.0).max(0.0).sqrt()
}

/// `(C_l1, M_SN, bound, slack)` for one qutrit state.
pub fn coherence_row(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let c = l1_coherence(rho);
    let m = sum_negativity(rho)?;
    let bound = coherence_bound(c);
    Ok([c, m, bound, m - bound])
}

/// `(E, M, 16E² + 9M²)` for a qutrit-qubit state: negativity of the pair and
/// sum negativity of the qutrit marginal.
pub fn entanglement_row(rho: &DensityMatrix) -> Result<[f64; 3]> {
    let e = negativity(rho)?;
    let m = sum_negativity(&partial_trace(rho, 0)?)?;
    Ok([e, m, 16.0 * e * e + 9.0 * m * m])
}

fn mixed_rank(cfg: &ExperimentConfig, d: usize) -> usize {
    if cfg.rank == 0 {
        d
    } else {
        cfg.rank.min(d)
    }
}

#[derive(Clone, Debug)]
pub struct ScatterResult {
    pub table: CsvTable,
    /// Coherence scatter: min slack over pure states. Entanglement scatter:
    /// max LHS over all states.
    pub statistic: f64,
    pub passed: bool,
}

/// Random qutrits in the (coherence, magic) plane. Pure states are the ones
/// the conjecture speaks about; mixed states are context.
pub fn coherence_magic_scatter(cfg: &ExperimentConfig) -> Result<ScatterResult> {
    cfg.validate()?;
    let base = cfg.seed.derive(1);
    let rank = mixed_rank(cfg, 3);
    let pure: Vec<[f64; 4]> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| coherence_row(&DensityMatrix::from_pure(&random_pure(3, base.derive(i as u64))?)))
        .collect::<Result<_>>()?;
    let mixed_base = cfg.seed.derive(2);
    let mixed: Vec<[f64; 4]> = (0..cfg.mixed_samples)
        .into_par_iter()
        .map(|i| coherence_row(&random_mixed(3, rank, mixed_base.derive(i as u64))?))
        .collect::<Result<_>>()?;

    let mut table = CsvTable::new(["kind", "c_l1", "m_sn", "bound", "slack"]);
    for (kind, rows) in [("pure", &pure), ("mixed", &mixed)] {
        for r in rows.iter() {
            let mut row: Vec<Cell> = vec![kind.into()];
            row.extend(r.iter().map(|&v| Cell::Num(v)));
            table.push(row);
        }
    }
    let min_slack = pure.iter().map(|r| r[3]).fold(f64::INFINITY, f64::min);
    let violations = pure.iter().filter(|r| r[3] < -cfg.tol).count();
    table.note("slack", "m_sn - bound; negative means the conjecture fails");
    table.note("min_slack_pure", format_f64(min_slack));
    table.note("violations_pure", violations);
    Ok(ScatterResult {
        table,
        statistic: min_slack,
        passed: violations == 0,
    })
}

/// Random qutrit-qubit states in the (entanglement, magic) plane, checked
/// against `16E² + 9M² ≤ 4`.
pub fn entanglement_magic_scatter(cfg: &ExperimentConfig) -> Result<ScatterResult> {
    cfg.validate()?;
    let with_dims = |rho: DensityMatrix| rho.with_subsystem_dims(vec![3, 2]);
    let rank = mixed_rank(cfg, 6);
    let mixed_base = cfg.seed.derive(3);
    let mixed: Vec<[f64; 3]> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| entanglement_row(&with_dims(random_mixed(6, rank, mixed_base.derive(i as u64))?)?))
        .collect::<Result<_>>()?;
    let pure_base = cfg.seed.derive(4);
    let pure: Vec<[f64; 3]> = (0..cfg.pure_samples)
        .into_par_iter()
        .map(|i| {
            let psi: PureState = random_pure(6, pure_base.derive(i as u64))?;
            entanglement_row(&with_dims(DensityMatrix::from_pure(&psi))?)
        })
        .collect::<Result<_>>()?;

    let mut table = CsvTable::new(["kind", "e", "m_sn_a", "lhs"]);
    for (kind, rows) in [("mixed", &mixed), ("pure", &pure)] {
        for r in rows.iter() {
            let mut row: Vec<Cell> = vec![kind.into()];
            row.extend(r.iter().map(|&v| Cell::Num(v)));
            table.push(row);
        }
    }
    let max_of = |rows: &[[f64; 3]]| rows.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max);
    let (max_mixed, max_pure) = (max_of(&mixed), max_of(&pure));
    let max_lhs = max_mixed.max(max_pure);
    let violations = mixed.iter().chain(&pure).filter(|r| r[2] > 4.0 + cfg.tol).count();
    table.note("lhs", "16*e^2 + 9*m_sn_a^2; values above 4 mean the conjecture fails");
    table.note("max_lhs_mixed", format_f64(max_mixed));
    table.note("max_lhs_pure", format_f64(max_pure));
    table.note("violations", violations);
    Ok(ScatterResult {
        table,
        statistic: max_lhs,
        passed: violations == 0,
    })
}

/// One line of the `run_all` verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct RunAllReport {
    pub verdicts: Vec<Verdict>,
    pub artifacts: Vec<PathBuf>,
}

impl RunAllReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

impl fmt::Display for RunAllReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.verdicts {
            writeln!(f, "{}={} {}", v.name, if v.passed { "pass" } else { "fail" }, v.detail)?;
        }
        write!(f, "status={}", if self.passed() { "pass" } else { "fail" })
    }
}

fn audits_table(reports: &[AuditReport]) -> CsvTable {
    let mut t = CsvTable::new(["suite", "check", "trials", "violations", "worst_margin", "tol", "status"]);
    for r in reports {
        for c in &r.checks {
            t.push(vec![
                r.suite.to_string().into(),
                c.name.clone().into(),
                c.trials.to_string().into(),
                c.violations.to_string().into(),
                c.worst_margin.into(),
                c.tol.into(),
                (if c.passed() { "pass" } else { "fail" }).into(),
            ]);
        }
    }
    t.note("seed", reports.first().map_or(0, |r| r.seed));
    t
}

/// Runs the sweep, both scatters and every audit suite, writing one CSV per
/// experiment into `cfg.out`.
pub fn run_all(cfg: &ExperimentConfig) -> Result<RunAllReport> {
    cfg.validate()?;
    let mut verdicts = Vec::new();
    let mut artifacts = Vec::new();
    let mut write = |name: &str, table: &CsvTable| -> Result<()> {
        let path = cfg.out.join(name);
        table.write_to(&path)?;
        artifacts.push(path);
        Ok(())
    };

    let sweep = noise_sweep(cfg)?;
    write("sweep.csv", &sweep.table)?;
    let worst = sweep.max_error.iter().copied().fold(0.0, f64::max);
    verdicts.push(Verdict {
        name: "sweep".into(),
        passed: sweep.passed(cfg.tol),
        detail: format!("max_abs_err={worst:e}"),
    });

    let coh = coherence_magic_scatter(cfg)?;
    write("scatter_coherence.csv", &coh.table)?;
    verdicts.push(Verdict {
        name: "scatter_coherence".into(),
        passed: coh.passed,
        detail: format!("min_slack_pure={:e}", coh.statistic),
    });

    let ent = entanglement_magic_scatter(cfg)?;
    write("scatter_entanglement.csv", &ent.table)?;
    verdicts.push(Verdict {
        name: "scatter_entanglement".into(),
        passed: ent.passed,
        detail: format!("max_lhs={}", format_f64(ent.statistic)),
    });

    let mut reports = Vec::new();
    for (k, suite) in Suite::ALL.into_iter().enumerate() {
        let report = audits::run(suite, cfg.trials_for(suite), cfg.seed.derive(100 + k as u64), None)?;
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        verdicts.push(Verdict {
            name: format!("audit_{suite}"),
            passed: report.passed(),
            detail: if failed.is_empty() {
                "failed_checks=none".into()
            } else {
                format!("failed_checks={}", failed.join(";"))
            },
        });
        reports.push(report);
    }
    write("audits.csv", &audits_table(&reports))?;

    Ok(RunAllReport { verdicts, artifacts })
}

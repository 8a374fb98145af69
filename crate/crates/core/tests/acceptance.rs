//! Acceptance gate: one line per criterion.
//!
//! Two criteria are red because the claims they test are false, and the
//! numbers say so. Criterion 7 asks that partial trace never increase l_p
//! coherence; for p > 1 tracing out a mixed incoherent ancilla does
//! increase it. Criterion 8 asks that C_w be contractive under every CPTP
//! map; constant channels onto a coherent state already break that. The
//! gate exits nonzero if the set of red criteria differs from these two.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qmagic::audits::{self, Suite};
use qmagic::channels::{apply, sample_cptp_channel};
use qmagic::experiments::{
    coherence_magic_scatter, entanglement_magic_scatter, noise_sweep, Curve, ExperimentConfig,
};
use qmagic::linalg::{max_coherent, norrell, random_mixed, random_pure, strange, DensityMatrix, Seed};
use qmagic::monotones::{cw_coherence, sum_negativity};
use qmagic::phase_space::{qutrit_closed_form, wigner};
use qmagic::stabilizer::StabilizerVertexSet;

const KNOWN_RED: [u32; 2] = [7, 8];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.passed = false;
    }
    o.detail = format!("{} time={:.2}s limit={}s", o.detail, took.as_secs_f64(), limit.as_secs());
    o
}

fn c1_wigner_closed_form() -> Outcome {
    timed(Duration::from_secs(5), || {
        let mut worst = 0.0f64;
        for i in 0..1000u64 {
            let rho = if i < 500 {
                DensityMatrix::from_pure(&random_pure(3, Seed(10_000 + i)).unwrap())
            } else {
                random_mixed(3, 3, Seed(10_000 + i)).unwrap()
            };
            let a = wigner(&rho).unwrap();
            let b = qutrit_closed_form(&rho).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                worst = worst.max((x - y).abs());
            }
        }
        outcome(worst <= 1e-12, format!("states=1000 max_cell_diff={worst:e} tol=1e-12"))
    })
}

fn c2_sweep() -> Outcome {
    timed(Duration::from_secs(5), || {
        let cfg = ExperimentConfig::default();
        let r = noise_sweep(&cfg).unwrap();
        let worst = r.max_error.iter().copied().fold(0.0, f64::max);
        let kinks: Vec<String> = r
            .kinks
            .iter()
            .map(|k| format!("{}@{}", k.curve.name(), k.detected.map_or("none".into(), |d| format!("{d:.9}"))))
            .collect();
        outcome(r.passed(1e-9), format!("max_abs_err={worst:e} kinks={}", kinks.join(",")))
    })
}

fn c3_endpoints() -> Outcome {
    let m = |c: Curve, p: f64| sum_negativity(&c.state(p).unwrap()).unwrap();
    let checks = [
        (m(Curve::StrangeWhite, 0.0), 2.0 / 3.0),
        (m(Curve::NorrellWhite, 0.0), 2.0 / 3.0),
        (m(Curve::StrangeCoherent, 1.0), 4.0 / 9.0),
        (m(Curve::NorrellCoherent, 1.0), 4.0 / 9.0),
        (sum_negativity(&DensityMatrix::from_pure(&strange())).unwrap(), 2.0 / 3.0),
        (sum_negativity(&DensityMatrix::from_pure(&norrell())).unwrap(), 2.0 / 3.0),
        (sum_negativity(&DensityMatrix::from_pure(&max_coherent())).unwrap(), 4.0 / 9.0),
    ];
    let worst = checks.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("max_abs_err={worst:e} tol=1e-10"))
}

fn c4_conjectures() -> Outcome {
    timed(Duration::from_secs(300), || {
        let cfg = ExperimentConfig::default();
        let coh = coherence_magic_scatter(&cfg).unwrap();
        let ent = entanglement_magic_scatter(&cfg).unwrap();
        let pure_max = ent
            .table
            .summary()
            .iter()
            .find(|(k, _)| k == "max_lhs_pure")
            .map(|(_, v)| v.clone())
            .unwrap_or_default();
        outcome(
            coh.statistic >= -1e-9 && ent.statistic <= 4.0 + 1e-9,
            format!(
                "pure_qutrits={} min_slack={:e} states_3x2={} max_lhs={:.9} max_lhs_pure={pure_max}",
                cfg.samples,
                coh.statistic,
                cfg.samples + cfg.pure_samples,
                ent.statistic
            ),
        )
    })
}

fn c5_result1() -> Outcome {
    let r = audits::run(Suite::Result1, Some(10_000), Seed(42), Some(1e-8)).unwrap();
    let c = &r.checks[0];
    outcome(
        r.passed(),
        format!("pairs={} violations={} worst_margin={:e} tol=1e-8", c.trials, c.violations, c.worst_margin),
    )
}

fn c6_enumeration() -> Outcome {
    let v3 = StabilizerVertexSet::cached(3).unwrap();
    let v2 = StabilizerVertexSet::cached(2).unwrap();
    let worst_neg = v3
        .projectors()
        .iter()
        .map(|v| sum_negativity(v).unwrap())
        .fold(0.0, f64::max);
    let basis_ok = (0..3).all(|k| v3.position(&DensityMatrix::basis(3, k).unwrap()).is_some())
        && (0..2).all(|k| v2.position(&DensityMatrix::basis(2, k).unwrap()).is_some());
    outcome(
        v3.len() == 12 && v2.len() == 6 && worst_neg < 1e-10 && basis_ok,
        format!("qutrit={} qubit={} max_vertex_msn={worst_neg:e} basis_vertices={basis_ok}", v3.len(), v2.len()),
    )
}

fn c7_hierarchy() -> Outcome {
    let mut failed = Vec::new();
    let mut notes = Vec::new();
    for (suite, n) in [(Suite::Lp, 1000), (Suite::Selective, 1000), (Suite::Gso, 10_000)] {
        let r = audits::run(suite, Some(n), Seed(42), Some(1e-9)).unwrap();
        for c in &r.checks {
            if !c.passed() {
                failed.push(format!("{suite}/{}({}/{} worst={:.3e})", c.name, c.violations, c.trials, c.worst_margin));
            }
        }
        notes.push(format!("{suite}={}", if r.passed() { "pass" } else { "fail" }));
    }
    outcome(
        failed.is_empty(),
        format!("{} failed=[{}]", notes.join(" "), failed.join(" ")),
    )
}

fn c8_cw() -> Outcome {
    let mut zero_worst = 0.0f64;
    for i in 0..100u64 {
        let mut rng_state = random_mixed(3, 3, Seed(20_000 + i)).unwrap();
        rng_state = DensityMatrix::diagonal(&rng_state.populations()).unwrap();
        zero_worst = zero_worst.max(cw_coherence(&rng_state).unwrap().value);
    }
    let zero_ok = zero_worst < 1e-7;

    let (mut violations, mut worst) = (0, f64::NEG_INFINITY);
    for i in 0..200u64 {
        let rho = if i % 2 == 0 {
            DensityMatrix::from_pure(&random_pure(3, Seed(30_000 + i)).unwrap())
        } else {
            random_mixed(3, 3, Seed(30_000 + i)).unwrap()
        };
        let ch = sample_cptp_channel(3, 3, 1 + (i as usize % 4), Seed(40_000 + i)).unwrap();
        let margin = cw_coherence(&apply(&ch, &rho).unwrap()).unwrap().value - cw_coherence(&rho).unwrap().value;
        worst = worst.max(margin);
        if margin > 2e-6 {
            violations += 1;
        }
    }
    let contractive = violations == 0;

    let mut oracle_worst = 0.0f64;
    for i in 0..20u64 {
        let rho = if i % 2 == 0 {
            DensityMatrix::from_pure(&random_pure(3, Seed(8000 + i)).unwrap())
        } else {
            random_mixed(3, 1 + (i as usize / 2) % 3, Seed(8000 + i)).unwrap()
        };
        let (grid, _, _) = common::cw_dense_grid(&rho);
        oracle_worst = oracle_worst.max((cw_coherence(&rho).unwrap().value - grid).abs());
    }
    let oracle_ok = oracle_worst < 1e-4;

    outcome(
        zero_ok && contractive && oracle_ok,
        format!(
            "diagonal_max={zero_worst:e} contractive={contractive}(violations={violations}/200 worst={worst:.4}) oracle_max_diff={oracle_worst:e}"
        ),
    )
}

fn c9_determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_qmagic"))
            .args(["run-all", "--seed", "42", "--out"])
            .arg(d.path())
            .output()
            .expect("run the CLI");
        // Exit 1 is expected while the red audits above stay red.
        if !matches!(status.status.code(), Some(0 | 1)) {
            return outcome(false, format!("run-all exited with {:?}", status.status.code()));
        }
    }
    let names = ["sweep.csv", "scatter_coherence.csv", "scatter_entanglement.csv", "audits.csv"];
    let mut same = 0;
    for n in names {
        let a = std::fs::read(dirs[0].path().join(n)).unwrap_or_default();
        let b = std::fs::read(dirs[1].path().join(n)).unwrap_or_default();
        if !a.is_empty() && a == b {
            same += 1;
        }
    }
    outcome(same == names.len(), format!("identical_artifacts={same}/{}", names.len()))
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters: nothing to enumerate here.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "wigner closed form", c1_wigner_closed_form),
        (2, "noise sweep", c2_sweep),
        (3, "endpoint values", c3_endpoints),
        (4, "conjecture audits", c4_conjectures),
        (5, "result 1 audit", c5_result1),
        (6, "stabilizer enumeration", c6_enumeration),
        (7, "hierarchy audits", c7_hierarchy),
        (8, "C_w properties", c8_cw),
        (9, "determinism", c9_determinism),
    ];
    let mut red = Vec::new();
    for (id, name, run) in criteria {
        let o = run();
        println!("criterion {id} {} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            red.push(id);
        }
    }
    let passed = 9 - red.len();
    println!("acceptance: {passed}/9 pass, red={red:?}, expected red={KNOWN_RED:?}");
    if red == KNOWN_RED {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

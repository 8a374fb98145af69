use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qmagic::audits::{self, Suite};
use qmagic::experiments::{self, ExperimentConfig};
use qmagic::io::{format_f64, read_state, CsvTable};
use qmagic::linalg::{DensityMatrix, Seed};
use qmagic::monotones::{all_monotones, LogBase};
use qmagic::phase_space::wigner;
use qmagic::stabilizer::{in_polytope, polytope_distance, StabilizerVertexSet, MEMBERSHIP_TOL};

#[derive(Parser)]
#[command(name = "qmagic", version, about = "Coherence and magic numerics for small qudits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output file (or directory for run-all).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key=value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete Wigner function of a state file.
    Wigner {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Every applicable monotone of a state file.
    Monotones {
        #[arg(long)]
        state: PathBuf,
        /// Tensor factorization, e.g. `3,2`.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, default_value = "e")]
        mana_base: LogBase,
        #[command(flatten)]
        common: Common,
    },
    /// Stabilizer vertices, or the distance of a state to their hull.
    Stab {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        state: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized audit of a channel proposition.
    Audit {
        #[arg(long)]
        suite: Suite,
        /// Trials (defaults to the suite's size).
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Sum negativity of noisy strange and Norrell states.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Coherence versus magic of random qutrits.
    ScatterCoherence {
        #[command(flatten)]
        common: Common,
    },
    /// Entanglement versus magic of random qutrit-qubit states.
    ScatterEntanglement {
        #[command(flatten)]
        common: Common,
    },
    /// Every experiment and audit; CSVs go to the output directory.
    RunAll {
        #[command(flatten)]
        common: Common,
    },
}

/// Outcome of a subcommand: success, a violated check, or bad input.
enum Failure {
    Violation,
    Usage(String),
}

impl From<qmagic::Error> for Failure {
    fn from(e: qmagic::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = Seed(s);
    }
    if let Some(n) = common.samples {
        cfg.samples = n;
    }
    if let Some(t) = common.tol {
        cfg.tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load(path: &Path) -> Result<DensityMatrix, Failure> {
    read_state(path)
        .map(|s| s.into_density())
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_table(table: &CsvTable, out: Option<&Path>) -> Outcome {
    emit(&table.to_csv_string(), out)
}

fn summarize(table: &CsvTable) {
    for (k, v) in table.summary() {
        eprintln!("{k}={v}");
    }
}

fn verdict(passed: bool) -> Outcome {
    if passed {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Wigner { state, common } => {
            let rho = load(&state)?;
            let w = wigner(&rho)?;
            let d = w.dim();
            let mut header = vec!["p".to_string()];
            header.extend((0..d).map(|q| format!("q{q}")));
            let mut t = CsvTable::new(header);
            for (p, row) in w.rows().enumerate() {
                let mut cells = vec![(p as f64).into()];
                cells.extend(row.iter().map(|&v| v.into()));
                t.push(cells);
            }
            t.note("total", format_f64(w.total()));
            t.note("sum_negativity", format_f64((w.abs_sum() - 1.0).max(0.0)));
            emit_table(&t, common.out.as_deref())
        }
        Command::Monotones { state, dims, mana_base, common } => {
            let mut rho = load(&state)?;
            if let Some(dims) = dims {
                rho = rho.with_subsystem_dims(dims)?;
            }
            let mut text = String::new();
            for r in all_monotones(&rho, mana_base)? {
                text.push_str(&format!("{}={}", r.name, format_f64(r.value)));
                if let Some(m) = r.metadata {
                    text.push_str(&format!(" {m}"));
                }
                text.push('\n');
            }
            emit(&text, common.out.as_deref())
        }
        Command::Stab { dim, state, common } => {
            let vs = StabilizerVertexSet::cached(dim)?;
            let tol = common.tol.unwrap_or(MEMBERSHIP_TOL);
            let mut text = String::new();
            match state {
                None => {
                    text.push_str(&format!("dim={dim}\nvertices={}\n", vs.len()));
                    for (i, word) in vs.provenance().iter().enumerate() {
                        let word = if word.is_empty() { "id" } else { word };
                        text.push_str(&format!("vertex{i}={word}\n"));
                    }
                }
                Some(path) => {
                    let rho = load(&path)?;
                    let r = polytope_distance(&rho, &vs)?;
                    text.push_str(&format!(
                        "distance={}\nlower_bound={}\nconverged={}\nin_polytope={}\n",
                        format_f64(r.distance),
                        format_f64(r.lower_bound),
                        r.converged,
                        in_polytope(&rho, &vs, tol)?
                    ));
                    for (w, word) in r.weights.iter().zip(vs.provenance()) {
                        if *w > 0.0 {
                            let word = if word.is_empty() { "id" } else { word };
                            text.push_str(&format!("weight_{word}={}\n", format_f64(*w)));
                        }
                    }
                }
            }
            emit(&text, common.out.as_deref())
        }
        Command::Audit { suite, n, common } => {
            let seed = Seed(common.seed.unwrap_or(42));
            let report = audits::run(suite, n.or(common.samples), seed, common.tol)?;
            emit(&format!("{report}\n"), common.out.as_deref())?;
            verdict(report.passed())
        }
        Command::Sweep { common } => {
            let cfg = config(&common)?;
            let r = experiments::noise_sweep(&cfg)?;
            emit_table(&r.table, common.out.as_deref())?;
            summarize(&r.table);
            verdict(r.passed(cfg.tol))
        }
        Command::ScatterCoherence { common } => {
            let cfg = config(&common)?;
            let r = experiments::coherence_magic_scatter(&cfg)?;
            emit_table(&r.table, common.out.as_deref())?;
            summarize(&r.table);
            verdict(r.passed)
        }
        Command::ScatterEntanglement { common } => {
            let cfg = config(&common)?;
            let r = experiments::entanglement_magic_scatter(&cfg)?;
            emit_table(&r.table, common.out.as_deref())?;
            summarize(&r.table);
            verdict(r.passed)
        }
        Command::RunAll { common } => {
            let mut cfg = config(&common)?;
            if let Some(out) = &common.out {
                cfg.out = out.clone();
            }
            let report = experiments::run_all(&cfg)?;
            println!("{report}");
            verdict(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

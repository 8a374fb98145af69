//! Plain-text state files and the CSV dialect used by the experiments.
//!
//! A state file starts with `dim=<d>`. It is followed either by one line of
//! `d` comma-separated amplitudes (a pure state) or by `d` such lines (a
//! density matrix). Entries use the `a+bi` form, e.g. `0.5`, `-1e-3+2i`,
//! `-i`. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix, PureState};

/// What a state file held.
#[derive(Clone, Debug)]
pub enum StateInput {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateInput {
    pub fn into_density(self) -> DensityMatrix {
        match self {
            StateInput::Pure(psi) => DensityMatrix::from_pure(&psi),
            StateInput::Mixed(rho) => rho,
        }
    }
}

fn parse_entry(raw: &str, line: usize) -> Result<Complex64> {
    let cleaned: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    cleaned.parse::<Complex64>().map_err(|e| Error::Parse {
        line,
        msg: format!("bad complex entry {raw:?}: {e}"),
    })
}

fn parse_row(text: &str, line: usize, d: usize) -> Result<Vec<Complex64>> {
    let row: Vec<Complex64> = text.split(',').map(|e| parse_entry(e, line)).collect::<Result<_>>()?;
    if row.len() != d {
        return Err(Error::Parse {
            line,
            msg: format!("expected {d} entries, found {}", row.len()),
        });
    }
    Ok(row)
}

/// Parses the contents of a state file.
pub fn parse_state(text: &str) -> Result<StateInput> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty state file".into() })?;
    let d: usize = header
        .strip_prefix("dim=")
        .and_then(|v| v.trim().parse().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::Parse {
            line: hline,
            msg: format!("expected `dim=<d>`, found {header:?}"),
        })?;
    let rows: Vec<(usize, &str)> = lines.collect();
    match rows.len() {
        1 => {
            let (line, text) = rows[0];
            Ok(StateInput::Pure(PureState::new(parse_row(text, line, d)?)?))
        }
        n if n == d => {
            let mut m = CMatrix::zeros(d, d);
            for (i, &(line, text)) in rows.iter().enumerate() {
                for (j, z) in parse_row(text, line, d)?.into_iter().enumerate() {
                    m[(i, j)] = z;
                }
            }
            Ok(StateInput::Mixed(DensityMatrix::new(m)?))
        }
        n => Err(Error::Parse {
            line: rows.last().map_or(hline, |r| r.0),
            msg: format!("expected 1 or {d} data lines after the header, found {n}"),
        }),
    }
}

pub fn read_state(path: &Path) -> Result<StateInput> {
    parse_state(&std::fs::read_to_string(path)?)
}

fn format_entry(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.17e}{sign}{:.17e}i", z.re, z.im.abs())
}

/// Writes a density matrix in the state-file format. Entries are printed
/// with enough digits to read back exactly.
pub fn format_density(rho: &DensityMatrix) -> String {
    let d = rho.dim();
    let mut out = format!("dim={d}\n");
    for i in 0..d {
        let row: Vec<String> = (0..d).map(|j| format_entry(rho.entry(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn format_pure(psi: &PureState) -> String {
    let row: Vec<String> = psi.amplitudes().iter().map(|&z| format_entry(z)).collect();
    format!("dim={}\n{}\n", psi.dim(), row.join(","))
}

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits, so every `f64` round-trips.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        // Keep the sign bit out of the file: -0 and 0 compare equal anyway.
        return "0.0000000000000000e0".to_string();
    }
    format!("{v:.16e}")
}

/// A CSV table with one header line and a `#`-prefixed `key=value` trailer.
#[derive(Clone, Debug, Default)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
    summary: Vec<(String, String)>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn summary(&self) -> &[(String, String)] {
        &self.summary
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    /// Numeric column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[idx] {
                    Cell::Num(v) => *v,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_f64(*v),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, random_mixed, random_pure, Seed};

    #[test]
    fn pure_round_trip() {
        let psi = random_pure(3, Seed(3)).unwrap();
        let back = match parse_state(&format_pure(&psi)).unwrap() {
            StateInput::Pure(p) => p,
            other => panic!("{other:?}"),
        };
        assert_eq!(back.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn mixed_round_trip_is_exact() {
        let rho = random_mixed(3, 2, Seed(4)).unwrap();
        let back = parse_state(&format_density(&rho)).unwrap().into_density();
        assert_eq!(max_abs_diff(back.matrix(), rho.matrix()), 0.0);
    }

    #[test]
    fn hand_written_file() {
        let text = "# the strange state\ndim=3\n0, 0.70710678118654752, -0.70710678118654752\n";
        let rho = parse_state(text).unwrap().into_density();
        assert!((rho.entry(1, 2).re + 0.5).abs() < 1e-15);
        let mixed = "dim=2\n0.5, 0.5i\n-0.5i, 0.5\n";
        let rho = parse_state(mixed).unwrap().into_density();
        assert!((rho.entry(0, 1).im - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse_state(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_state("dims=3\n1,0,0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_state("dim=3\n1,0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_state("dim=3\n1,x,0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_state("dim=3\n1,0,0\n0,1,0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_state("dim=2\n1,1"), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn csv_dialect() {
        let mut t = CsvTable::new(["p", "label"]);
        t.push(vec![0.1.into(), "a".into()]);
        t.push(vec![(2.0f64 / 3.0).into(), "b".into()]);
        t.note("max_err", 0.0);
        let s = t.to_csv_string();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "p,label");
        assert_eq!(lines[1], "1.0000000000000001e-1,a");
        assert_eq!(lines[3], "# max_err=0");
        let v: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(v, 2.0 / 3.0);
        assert_eq!(t.column("p").unwrap(), vec![0.1, 2.0 / 3.0]);
    }
}

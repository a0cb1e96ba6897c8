//! Plain-text state, matrix and vector files.
//!
//! A state file lists keyed sections; numbers are whitespace or comma
//! separated and may continue over several lines:
//!
//! ```text
//! # two-mode squeezed vacuum, r = 0.5
//! n: 2
//! gamma:
//!   1.5430806348152437e0 0 1.1752011936438014e0 0
//!   ...
//! d: 0 0 0 0
//! partition: AB
//! ```
//!
//! `d` defaults to zeros and `partition` is optional. Matrix files use the
//! same syntax, either as bare rows or as keyed sections (`A:`, `G:`,
//! `shift:` for a channel).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::channels::GaussianChannel;
use crate::entanglement::ModePartition;
use crate::error::{Error, Result};
use crate::symplectic::{CovarianceMatrix, GaussianState};

/// Parsed contents of a state file. Shapes are checked on parsing; physical
/// validity is checked by [`StateFile::state`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateFile {
    pub gamma: DMatrix<f64>,
    pub d: DVector<f64>,
    pub partition: Option<ModePartition>,
    /// Free-form `key: value` lines written as comments.
    pub notes: Vec<(String, String)>,
}

struct Section {
    line: usize,
    rows: Vec<Vec<String>>,
}

/// Splits text into `key:` sections. Text before the first key goes under
/// the empty key.
fn sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current = String::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = match line.split_once(':') {
            Some((k, rest)) if k.trim().chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => {
                (Some(k.trim().to_ascii_lowercase()), rest)
            }
            Some(_) => return Err(Error::Parse(format!("line {}: malformed key", no + 1))),
            None => (None, line),
        };
        if let Some(k) = key {
            if out.contains_key(&k) {
                return Err(Error::Parse(format!("line {}: duplicate section {k:?}", no + 1)));
            }
            current = k;
            out.insert(
                current.clone(),
                Section {
                    line: no + 1,
                    rows: Vec::new(),
                },
            );
        }
        let tokens: Vec<String> = rest
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::to_owned)
            .collect();
        let sec = out.entry(current.clone()).or_insert_with(|| Section {
            line: no + 1,
            rows: Vec::new(),
        });
        if !tokens.is_empty() {
            sec.rows.push(tokens);
        }
    }
    Ok(out)
}

fn numbers(sec: &Section, key: &str) -> Result<Vec<f64>> {
    sec.rows
        .iter()
        .flatten()
        .map(|t| {
            let v: f64 = t.parse().map_err(|_| {
                Error::Parse(format!("section {key:?} (line {}): bad number {t:?}", sec.line))
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("section {key:?}: non-finite number {t:?}")))
            }
        })
        .collect()
}

fn matrix_rows(sec: &Section, key: &str) -> Result<DMatrix<f64>> {
    let rows = sec
        .rows
        .iter()
        .map(|r| {
            numbers(
                &Section {
                    line: sec.line,
                    rows: vec![r.clone()],
                },
                key,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse(format!(
            "section {key:?} is not a rectangular matrix"
        )));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.into_iter().flatten(),
    ))
}

fn square(values: Vec<f64>, dim: usize, key: &str) -> Result<DMatrix<f64>> {
    if values.len() != dim * dim {
        return Err(Error::Parse(format!(
            "{key:?} needs {} entries, found {}",
            dim * dim,
            values.len()
        )));
    }
    Ok(DMatrix::from_row_slice(dim, dim, &values))
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self> {
        let secs = sections(text)?;
        for key in secs.keys() {
            if !matches!(key.as_str(), "n" | "gamma" | "d" | "partition") {
                return Err(Error::Parse(format!("unknown section {key:?}")));
            }
        }
        let get = |k: &str| {
            secs.get(k)
                .ok_or_else(|| Error::Parse(format!("missing section {k:?}")))
        };
        let n_vals = numbers(get("n")?, "n")?;
        let n = match n_vals.as_slice() {
            [v] if *v >= 1.0 && v.fract() == 0.0 => *v as usize,
            _ => return Err(Error::Parse("n must be a single positive integer".into())),
        };
        let gamma = square(numbers(get("gamma")?, "gamma")?, 2 * n, "gamma")?;
        let d = match secs.get("d") {
            Some(sec) => {
                let v = numbers(sec, "d")?;
                if v.len() != 2 * n {
                    return Err(Error::Parse(format!(
                        "d needs {} entries, found {}",
                        2 * n,
                        v.len()
                    )));
                }
                DVector::from_vec(v)
            }
            None => DVector::zeros(2 * n),
        };
        let partition = match secs.get("partition") {
            Some(sec) => {
                let p: ModePartition = sec.rows.iter().flatten().cloned().collect::<String>().parse()?;
                if p.modes() != n {
                    return Err(Error::Parse(format!(
                        "partition labels {} modes, n is {n}",
                        p.modes()
                    )));
                }
                Some(p)
            }
            None => None,
        };
        Ok(Self {
            gamma,
            d,
            partition,
            notes: Vec::new(),
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_text(path.as_ref())?)
    }

    pub fn from_state(state: &GaussianState) -> Self {
        Self {
            gamma: state.covariance().matrix().clone(),
            d: state.displacement().clone(),
            partition: None,
            notes: Vec::new(),
        }
    }

    pub fn with_partition(mut self, p: Option<ModePartition>) -> Self {
        self.partition = p;
        self
    }

    pub fn with_note(mut self, key: &str, value: impl Into<String>) -> Self {
        self.notes.push((key.to_owned(), value.into()));
        self
    }

    pub fn modes(&self) -> usize {
        self.gamma.nrows() / 2
    }

    /// The covariance, checked for symmetry but not for validity.
    pub fn covariance(&self) -> Result<CovarianceMatrix> {
        CovarianceMatrix::new(self.gamma.clone())
    }

    /// The validated Gaussian state.
    pub fn state(&self) -> Result<GaussianState> {
        GaussianState::new(self.covariance()?, self.d.clone())
    }

    /// 17 significant digits, enough to reproduce every `f64` exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.notes {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "n: {}", self.modes());
        let _ = writeln!(s, "gamma:");
        for row in self.gamma.row_iter() {
            let _ = writeln!(s, "  {}", join(row.iter()));
        }
        let _ = writeln!(s, "d: {}", join(self.d.iter()));
        if let Some(p) = &self.partition {
            let _ = writeln!(s, "partition: {p}");
        }
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_text())
    }
}

fn join<'a>(xs: impl Iterator<Item = &'a f64>) -> String {
    xs.map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ")
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// A bare matrix: one row per line.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let secs = sections(text)?;
    match (secs.len(), secs.get("")) {
        (1, Some(sec)) => matrix_rows(sec, "matrix"),
        _ => Err(Error::Parse("expected a bare matrix without sections".into())),
    }
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    parse_matrix(&read_text(path.as_ref())?)
}

pub fn matrix_to_text(m: &DMatrix<f64>) -> String {
    m.row_iter().map(|r| join(r.iter()) + "\n").collect()
}

/// Whitespace, comma or newline separated numbers.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let secs = sections(text)?;
    match (secs.len(), secs.get("")) {
        (1, Some(sec)) => numbers(sec, "vector"),
        (0, _) => Ok(Vec::new()),
        _ => Err(Error::Parse("expected a bare list of numbers".into())),
    }
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&read_text(path.as_ref())?)
}

/// Channel file with sections `A:` and `G:` (rows of the square matrices)
/// and an optional `shift:`.
pub fn parse_channel(text: &str) -> Result<GaussianChannel> {
    let secs = sections(text)?;
    for key in secs.keys() {
        if !matches!(key.as_str(), "a" | "g" | "shift") {
            return Err(Error::Parse(format!("unknown channel section {key:?}")));
        }
    }
    let get = |k: &str| {
        secs.get(k)
            .ok_or_else(|| Error::Parse(format!("missing channel section {k:?}")))
    };
    let a = matrix_rows(get("a")?, "A")?;
    let g = matrix_rows(get("g")?, "G")?;
    let shift = match secs.get("shift") {
        Some(sec) => DVector::from_vec(numbers(sec, "shift")?),
        None => DVector::zeros(a.nrows()),
    };
    GaussianChannel::new(a, g, shift)
}

pub fn read_channel(path: impl AsRef<Path>) -> Result<GaussianChannel> {
    parse_channel(&read_text(path.as_ref())?)
}

pub fn channel_to_text(ch: &GaussianChannel) -> String {
    format!(
        "A:\n{}G:\n{}shift: {}\n",
        matrix_to_text(ch.a()),
        matrix_to_text(ch.g()),
        join(ch.shift().iter())
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_and_multiline_sections() {
        let text = "# vacuum\nn: 1\ngamma: 1 0\n  0, 1\npartition: A\n";
        let f = StateFile::parse(text).unwrap();
        assert_eq!(f.gamma, DMatrix::identity(2, 2));
        assert_eq!(f.d, DVector::zeros(2));
        assert_eq!(f.partition.unwrap().to_string(), "A");
    }

    #[test]
    fn rejects_malformed_files() {
        for bad in [
            "gamma: 1 0 0 1",
            "n: 1\ngamma: 1 0 0",
            "n: 1.5\ngamma: 1 0 0 1",
            "n: 1\ngamma: 1 0 0 x",
            "n: 1\ngamma: 1 0 0 1\nd: 0",
            "n: 1\ngamma: 1 0 0 1\nextra: 3",
            "n: 1\nn: 1\ngamma: 1 0 0 1",
            "n: 1\ngamma: 1 0 0 inf",
            "n: 2\ngamma: 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1\npartition: AAB",
        ] {
            assert!(matches!(StateFile::parse(bad), Err(Error::Parse(_))), "{bad:?}");
        }
    }

    #[test]
    fn channel_round_trip() {
        let ch = crate::channels::attenuation_channel(0.3, 1).unwrap();
        let back = parse_channel(&channel_to_text(&ch)).unwrap();
        assert_eq!(&back, &ch);
        assert!(parse_channel("A: 1 0\n0 1\n").is_err());
    }

    #[test]
    fn vectors_and_matrices() {
        assert_eq!(parse_vector("0.5, 0.25\n0.125").unwrap(), vec![0.5, 0.25, 0.125]);
        assert!(parse_matrix("1 2\n3").is_err());
        let m = DMatrix::from_row_slice(2, 3, &[1.0, -2.5, 3.0, 0.1, 1e-300, 7.0]);
        assert_eq!(parse_matrix(&matrix_to_text(&m)).unwrap(), m);
    }
}

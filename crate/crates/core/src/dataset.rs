//! Regression datasets and their CSV representation.
//!
//! Rows are stored flat in row-major order so that a subsample block — a
//! contiguous index range — is a zero-copy [`DataView`].
//!
//! CSV schema: header `x1,...,xd,y[,eps]`, comma separated, decimal text.
//! Values are written with Rust's shortest round-trip float formatting, so a
//! write → read cycle reproduces every `f64` bit-exactly.

use std::path::Path;

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub input_dim: usize,
    /// Row-major covariates, `len == n * input_dim`.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Observed error terms when the data came from a generator that tracks
    /// them (then `y = f(x) + eps` recovers the noise-free target).
    pub eps: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(
        input_dim: usize,
        xs: Vec<f64>,
        ys: Vec<f64>,
        eps: Option<Vec<f64>>,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidArgument("input_dim must be positive".into()));
        }
        if xs.len() != ys.len() * input_dim {
            return Err(Error::DimensionMismatch {
                expected: ys.len() * input_dim,
                got: xs.len(),
            });
        }
        if let Some(e) = &eps {
            if e.len() != ys.len() {
                return Err(Error::DimensionMismatch {
                    expected: ys.len(),
                    got: e.len(),
                });
            }
        }
        Ok(Self {
            input_dim,
            xs,
            ys,
            eps,
        })
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.xs[i * self.input_dim..(i + 1) * self.input_dim]
    }

    /// Noise-free regression targets `f(x_i) = y_i - eps_i`; `None` when the
    /// error terms were not recorded.
    pub fn true_values(&self) -> Option<Vec<f64>> {
        let eps = self.eps.as_ref()?;
        Some(self.ys.iter().zip(eps).map(|(y, e)| y - e).collect())
    }

    pub fn view(&self) -> DataView<'_> {
        DataView {
            input_dim: self.input_dim,
            xs: &self.xs,
            ys: &self.ys,
        }
    }

    /// View of rows `start..end` (0-based, half-open).
    pub fn slice(&self, start: usize, end: usize) -> DataView<'_> {
        DataView {
            input_dim: self.input_dim,
            xs: &self.xs[start * self.input_dim..end * self.input_dim],
            ys: &self.ys[start..end],
        }
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_to_io)?;
        let mut header: Vec<String> = (1..=self.input_dim).map(|i| format!("x{i}")).collect();
        header.push("y".into());
        if self.eps.is_some() {
            header.push("eps".into());
        }
        w.write_record(&header).map_err(csv_to_io)?;
        let mut record = Vec::with_capacity(self.input_dim + 2);
        for i in 0..self.len() {
            record.clear();
            for v in self.x(i) {
                record.push(format_f64(*v));
            }
            record.push(format_f64(self.ys[i]));
            if let Some(e) = &self.eps {
                record.push(format_f64(e[i]));
            }
            w.write_record(&record).map_err(csv_to_io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path.as_ref())
            .map_err(csv_to_io)?;
        let headers = r.headers().map_err(|e| Error::CsvData {
            line: 1,
            message: e.to_string(),
        })?;
        let cols: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
        let has_eps = cols.last().map(|c| c == "eps").unwrap_or(false);
        let y_pos = cols.iter().position(|c| c == "y").ok_or(Error::CsvData {
            line: 1,
            message: "missing required column `y`".into(),
        })?;
        let input_dim = y_pos;
        if input_dim == 0 {
            return Err(Error::CsvData {
                line: 1,
                message: "no covariate columns before `y`".into(),
            });
        }
        for (i, c) in cols[..input_dim].iter().enumerate() {
            let expected = format!("x{}", i + 1);
            if *c != expected {
                return Err(Error::CsvData {
                    line: 1,
                    message: format!("expected column `{expected}`, found `{c}`"),
                });
            }
        }

        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut eps = if has_eps { Some(Vec::new()) } else { None };
        for (idx, rec) in r.records().enumerate() {
            let line = idx + 2; // 1-based, after the header
            let rec = rec.map_err(|e| Error::CsvData {
                line,
                message: e.to_string(),
            })?;
            let expected_fields = input_dim + 1 + usize::from(has_eps);
            if rec.len() != expected_fields {
                return Err(Error::CsvData {
                    line,
                    message: format!("expected {expected_fields} fields, found {}", rec.len()),
                });
            }
            let parse = |field: usize| -> Result<f64> {
                rec[field]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::CsvData {
                        line,
                        message: format!("column {} (`{}`): {e}", field + 1, cols[field]),
                    })
            };
            for f in 0..input_dim {
                xs.push(parse(f)?);
            }
            ys.push(parse(input_dim)?);
            if let Some(e) = &mut eps {
                e.push(parse(input_dim + 1)?);
            }
        }
        if ys.is_empty() {
            return Err(Error::CsvData {
                line: 2,
                message: "no data rows".into(),
            });
        }
        Dataset::new(input_dim, xs, ys, eps)
    }
}

/// Borrowed contiguous slice of a dataset: what one subsample block sees.
#[derive(Debug, Clone, Copy)]
pub struct DataView<'a> {
    pub input_dim: usize,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

impl<'a> DataView<'a> {
    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn x(&self, i: usize) -> &'a [f64] {
        &self.xs[i * self.input_dim..(i + 1) * self.input_dim]
    }

    /// Sub-view of rows `start..end` (0-based, half-open).
    pub fn slice(&self, start: usize, end: usize) -> DataView<'a> {
        DataView {
            input_dim: self.input_dim,
            xs: &self.xs[start * self.input_dim..end * self.input_dim],
            ys: &self.ys[start..end],
        }
    }
}

fn format_f64(v: f64) -> String {
    // `{}` prints the shortest decimal that parses back to the same bits.
    format!("{v}")
}

fn csv_to_io(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        },
        _ => Error::CsvData {
            line: 0,
            message: e.to_string(),
        },
    }
}

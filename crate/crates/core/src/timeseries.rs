//! Gappy multivariate time-series and their CSV representation.
//!
//! The on-disk format is a header `t,v1,...,vd` followed by one row per time
//! step, `t` running `1..=n`. An empty field marks a missing value. Floats are
//! written with Rust's shortest round-trip formatting, so
//! `read_csv(write_csv(s)) == s` bit for bit.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Per-cell observation flags for an `n x d` grid, stored column-major by variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    n: usize,
    d: usize,
    observed: Vec<bool>,
}

impl Mask {
    pub fn all_observed(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            observed: vec![true; n * d],
        }
    }

    /// `observed` is column-major: index `v * n + t`.
    pub fn from_vec(n: usize, d: usize, observed: Vec<bool>) -> Result<Self> {
        if observed.len() != n * d {
            return Err(Error::InvalidArgument(format!(
                "mask has {} cells, expected {n}x{d}",
                observed.len()
            )));
        }
        Ok(Self { n, d, observed })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.d)
    }

    #[inline]
    pub fn is_observed(&self, t: usize, v: usize) -> bool {
        self.observed[v * self.n + t]
    }

    #[inline]
    pub fn is_missing(&self, t: usize, v: usize) -> bool {
        !self.is_observed(t, v)
    }

    pub fn set(&mut self, t: usize, v: usize, observed: bool) {
        self.observed[v * self.n + t] = observed;
    }

    pub fn column(&self, v: usize) -> &[bool] {
        &self.observed[v * self.n..(v + 1) * self.n]
    }

    pub fn missing_count(&self) -> usize {
        self.observed.iter().filter(|o| !**o).count()
    }

    pub fn observed_count(&self) -> usize {
        self.observed.len() - self.missing_count()
    }

    /// Cellwise: missing here implies missing in `other`.
    pub fn missing_subset_of(&self, other: &Mask) -> bool {
        self.shape() == other.shape()
            && self
                .observed
                .iter()
                .zip(&other.observed)
                .all(|(a, b)| *a || !*b)
    }

    /// Logical AND of observation flags.
    pub fn intersect(&self, other: &Mask) -> Result<Mask> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        let observed = self
            .observed
            .iter()
            .zip(&other.observed)
            .map(|(a, b)| *a && *b)
            .collect();
        Ok(Mask {
            n: self.n,
            d: self.d,
            observed,
        })
    }

    /// Writes the mask as `t,v1,...,vd` with `1` for observed and `0` for missing.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.to_writer(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn to_writer<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(header(self.d).as_bytes())?;
        let mut line = String::new();
        for t in 0..self.n {
            line.clear();
            write!(line, "{}", t + 1).unwrap();
            for v in 0..self.d {
                line.push(',');
                line.push(if self.is_observed(t, v) { '1' } else { '0' });
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(File::open(path)?)
    }

    pub fn from_reader<R: Read>(r: R) -> Result<Self> {
        let grid = read_grid(r, |line, field| match field {
            "1" => Ok(Some(true)),
            "0" => Ok(Some(false)),
            other => Err(Error::Parse {
                line,
                msg: format!("mask field must be 0 or 1, found {other:?}"),
            }),
        })?;
        let (n, d) = (grid.n, grid.d);
        let mut observed = vec![false; n * d];
        for (t, row) in grid.rows.into_iter().enumerate() {
            for (v, cell) in row.into_iter().enumerate() {
                observed[v * n + t] = cell.unwrap_or(false);
            }
        }
        Ok(Self { n, d, observed })
    }
}

/// A `d`-variate series of length `n` with an explicit observation mask.
///
/// Values are stored column-major by variable. Cells with `mask == false`
/// hold `NaN` and are never read by any operation in this crate.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    values: Vec<f64>,
    mask: Mask,
}

impl TimeSeries {
    /// Builds a fully observed series from one `Vec` per variable.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_options(
            columns
                .into_iter()
                .map(|c| c.into_iter().map(Some).collect())
                .collect(),
        )
    }

    /// Builds a series from one column per variable, `None` marking a missing cell.
    pub fn from_options(columns: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let d = columns.len();
        if d == 0 {
            return Err(Error::InvalidArgument("series needs at least one variable".into()));
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::EmptySeries);
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::ShapeMismatch {
                expected: (n, d),
                found: (bad.len(), d),
            });
        }
        let mut values = Vec::with_capacity(n * d);
        let mut observed = Vec::with_capacity(n * d);
        for cell in columns.into_iter().flatten() {
            values.push(cell.unwrap_or(f64::NAN));
            observed.push(cell.is_some());
        }
        Ok(Self {
            values,
            mask: Mask { n, d, observed },
        })
    }

    /// Univariate shorthand for [`TimeSeries::from_options`].
    pub fn univariate(values: Vec<Option<f64>>) -> Result<Self> {
        Self::from_options(vec![values])
    }

    /// Combines raw column-major values with a mask. Masked-out values are discarded.
    pub fn from_parts(values: Vec<f64>, mask: Mask) -> Result<Self> {
        if values.len() != mask.n * mask.d {
            return Err(Error::ShapeMismatch {
                expected: mask.shape(),
                found: (values.len(), 1),
            });
        }
        if mask.n == 0 {
            return Err(Error::EmptySeries);
        }
        if mask.d == 0 {
            return Err(Error::InvalidArgument("series needs at least one variable".into()));
        }
        let values = values
            .into_iter()
            .zip(&mask.observed)
            .map(|(x, o)| if *o { x } else { f64::NAN })
            .collect();
        Ok(Self { values, mask })
    }

    pub fn len(&self) -> usize {
        self.mask.n
    }

    pub fn is_empty(&self) -> bool {
        self.mask.n == 0
    }

    pub fn dim(&self) -> usize {
        self.mask.d
    }

    pub fn shape(&self) -> (usize, usize) {
        self.mask.shape()
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    #[inline]
    pub fn is_observed(&self, t: usize, v: usize) -> bool {
        self.mask.is_observed(t, v)
    }

    pub fn get(&self, t: usize, v: usize) -> Option<f64> {
        self.is_observed(t, v).then(|| self.values[v * self.len() + t])
    }

    /// Raw stored value; `NaN` for missing cells.
    #[inline]
    pub fn value(&self, t: usize, v: usize) -> f64 {
        self.values[v * self.len() + t]
    }

    /// Raw values of one variable (`NaN` where missing).
    pub fn column(&self, v: usize) -> &[f64] {
        let n = self.len();
        &self.values[v * n..(v + 1) * n]
    }

    pub fn column_options(&self, v: usize) -> Vec<Option<f64>> {
        (0..self.len()).map(|t| self.get(t, v)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.mask.missing_count() == 0
    }

    /// Observed-only view over rows `range` (0-based, half-open).
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::InvalidArgument(format!(
                "slice {range:?} out of bounds for length {}",
                self.len()
            )));
        }
        let columns = (0..self.dim())
            .map(|v| range.clone().map(|t| self.get(t, v)).collect())
            .collect();
        Self::from_options(columns)
    }

    /// Hides every cell that `mask` marks missing (in addition to any already missing).
    pub fn with_mask(&self, mask: &Mask) -> Result<Self> {
        let combined = self.mask.intersect(mask)?;
        Self::from_parts(self.values.clone(), combined)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(File::open(path)?)
    }

    pub fn from_reader<R: Read>(r: R) -> Result<Self> {
        let grid = read_grid(r, |line, field| {
            if field.is_empty() {
                return Ok(None);
            }
            field.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                line,
                msg: format!("invalid number {field:?}"),
            })
        })?;
        let mut columns = vec![Vec::with_capacity(grid.n); grid.d];
        for row in grid.rows {
            for (v, cell) in row.into_iter().enumerate() {
                columns[v].push(cell);
            }
        }
        Self::from_options(columns)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.to_writer(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn to_writer<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(header(self.dim()).as_bytes())?;
        let mut line = String::new();
        for t in 0..self.len() {
            line.clear();
            write!(line, "{}", t + 1).unwrap();
            for v in 0..self.dim() {
                line.push(',');
                if let Some(x) = self.get(t, v) {
                    write!(line, "{x}").unwrap();
                }
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.to_writer(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }
}

/// Shape, mask and observed values (bitwise) must agree.
impl PartialEq for TimeSeries {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask
            && self
                .values
                .iter()
                .zip(&other.values)
                .zip(&self.mask.observed)
                .all(|((a, b), o)| !*o || a.to_bits() == b.to_bits())
    }
}

fn header(d: usize) -> String {
    let mut h = String::from("t");
    for v in 1..=d {
        write!(h, ",v{v}").unwrap();
    }
    h.push('\n');
    h
}

struct Grid<T> {
    n: usize,
    d: usize,
    rows: Vec<Vec<Option<T>>>,
}

fn read_grid<R: Read, T>(
    r: R,
    mut parse: impl FnMut(u64, &str) -> Result<Option<T>>,
) -> Result<Grid<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(r);
    let mut records = reader.records();

    let header = match records.next() {
        Some(rec) => rec?,
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing header".into(),
            })
        }
    };
    if header.get(0).map(str::trim) != Some("t") || header.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            msg: "header must be t,v1,...,vd".into(),
        });
    }
    let d = header.len() - 1;

    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != d + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", d + 1, rec.len()),
            });
        }
        let t: usize = rec[0].trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid time index {:?}", &rec[0]),
        })?;
        if t != rows.len() + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("time index must be {}, found {t}", rows.len() + 1),
            });
        }
        let row = rec
            .iter()
            .skip(1)
            .map(|f| parse(line, f.trim()))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(Grid {
        n: rows.len(),
        d,
        rows,
    })
}

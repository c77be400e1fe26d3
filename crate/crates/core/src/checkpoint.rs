//! Plain-text grid checkpoints: a header line `m L h residual` followed by one
//! line per grid row, values separated by single spaces. Inactive nodes are
//! written as `nan`.

use std::io::{BufRead, Write};

use crate::error::{domain, Result};
use crate::numerics::{lit, to_f64, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct GridCheckpoint<T> {
    pub m: usize,
    pub length: T,
    pub h: T,
    pub residual: T,
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `rows * cols` entries.
    pub values: Vec<T>,
}

fn fmt<T: Real>(x: T) -> String {
    let v = to_f64(x);
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl<T: Real> GridCheckpoint<T> {
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {} {}", self.m, fmt(self.length), fmt(self.h), fmt(self.residual))?;
        for row in self.values.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let io = |e: std::io::Error| domain(format!("checkpoint read failed: {e}"));
        let header = lines.next().ok_or_else(|| domain("empty checkpoint"))?.map_err(io)?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 4 {
            return Err(domain("checkpoint header must hold `m L h residual`"));
        }
        let m = head[0].parse::<usize>().map_err(|e| domain(format!("bad m: {e}")))?;
        let num =
            |s: &str| -> Result<T> { s.parse::<f64>().map(lit).map_err(|e| domain(format!("bad number {s:?}: {e}"))) };
        let (length, h, residual) = (num(head[1])?, num(head[2])?, num(head[3])?);
        let mut values = Vec::new();
        let mut cols = 0;
        let mut rows = 0;
        for line in lines {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<T> = line.split_whitespace().map(num).collect::<Result<_>>()?;
            if rows == 0 {
                cols = row.len();
            } else if row.len() != cols {
                return Err(domain(format!("row {rows} has {} values, expected {cols}", row.len())));
            }
            values.extend(row);
            rows += 1;
        }
        if rows == 0 {
            return Err(domain("checkpoint has no rows"));
        }
        Ok(Self { m, length, h, residual, rows, cols, values })
    }
}

impl<T: Real> crate::allen_cahn::SaddleField<T> {
    /// Full `(n+1)²` square through the antisymmetric extension.
    pub fn to_checkpoint(&self) -> GridCheckpoint<T> {
        let np = self.cells() + 1;
        let mut values = Vec::with_capacity(np * np);
        for i in 0..np {
            for j in 0..np {
                values.push(self.node(i, j));
            }
        }
        GridCheckpoint {
            m: self.m(),
            length: self.length(),
            h: self.spacing(),
            residual: self.residual,
            rows: np,
            cols: np,
            values,
        }
    }

    pub fn from_checkpoint(cp: &GridCheckpoint<T>) -> Result<Self> {
        if cp.rows != cp.cols || cp.rows < 5 {
            return Err(domain("saddle checkpoint must be a square grid"));
        }
        Self::from_values(cp.m, cp.length, cp.rows - 1, cp.values.clone(), cp.residual)
    }
}

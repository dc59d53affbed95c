use super::{add, mul, AlgebraError, Ring, RingElem};

/// Row-major matrix of ring elements.
///
/// Entries are not required to share a parent at construction; arithmetic
/// and saving reject mixed parents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<RingElem>) -> Result<Self, AlgebraError> {
        if rows.checked_mul(cols) != Some(entries.len()) {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<RingElem>>) -> Result<Self, AlgebraError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(AlgebraError::DimensionMismatch(format!("ragged rows: {} vs {ncols}", bad.len())));
        }
        Self::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let entries = (0..n * n).map(|i| if i / n == i % n { ring.one() } else { ring.zero() }).collect();
        Self { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &RingElem {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[RingElem] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[RingElem]) -> Result<Vec<RingElem>, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        if self.cols == 0 {
            return Err(AlgebraError::DimensionMismatch("empty inner dimension".into()));
        }
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut acc = mul(&row[0], &v[0])?;
                for (a, x) in row.iter().zip(v).skip(1) {
                    acc = add(&acc, &mul(a, x)?)?;
                }
                Ok(acc)
            })
            .collect()
    }
}

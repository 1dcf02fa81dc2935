use std::fmt;
use std::ops::{Index, IndexMut};

use super::{LinAlgError, Rational};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r);
        }
        RationalMatrix { rows: nrows, cols, data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&v| Rational::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Rational] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix, LinAlgError> {
        if self.cols != rhs.rows {
            return Err(LinAlgError::DimensionMismatch { left: self.cols, right: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let p = a * b;
                        out[(i, j)] += &p;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &RationalMatrix) -> Result<RationalMatrix, LinAlgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinAlgError::DimensionMismatch { left: self.cols, right: rhs.cols });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(RationalMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Matrix-vector product `self · v`.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Sub-matrix with the given row and column indices, in that order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RationalMatrix {
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self[(i, j)].clone())
            .collect();
        RationalMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &RationalMatrix) -> Result<RationalMatrix, LinAlgError> {
        if self.cols != below.cols {
            return Err(LinAlgError::DimensionMismatch { left: self.cols, right: below.cols });
        }
        let mut data = self.data.clone();
        data.extend(below.data.iter().cloned());
        Ok(RationalMatrix { rows: self.rows + below.rows, cols: self.cols, data })
    }

    /// Determinant by fraction-tracking Gaussian elimination; square only.
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.row_vecs();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            let piv = m[c][c].clone();
            det *= &piv;
            let inv = piv.recip();
            for r in c + 1..n {
                if m[r][c].is_zero() {
                    continue;
                }
                let f = &m[r][c] * &inv;
                let (top, bottom) = m.split_at_mut(r);
                for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                    x.sub_mul(&f, y);
                }
            }
        }
        det
    }

    /// Reduced row echelon form (same shape, zero rows last) and rank.
    pub fn rref(&self) -> (RationalMatrix, usize) {
        let mut rows = self.row_vecs();
        let rank = rref_rows(&mut rows, self.cols).len();
        rows.resize(self.rows, vec![Rational::zero(); self.cols]);
        (RationalMatrix::from_rows(self.cols, rows), rank)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vecs();
        rref_rows(&mut rows, self.cols).len()
    }

    /// Solves `self · x = b` for one particular solution, or `None` if inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let pivots = rref_rows(&mut rows, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = rows[i][self.cols].clone();
        }
        Some(x)
    }
}

/// In-place reduction of `rows` to reduced row echelon form.
///
/// Zero rows are dropped; returns the pivot column of each remaining row.
pub(crate) fn rref_rows(rows: &mut Vec<Vec<Rational>>, cols: usize) -> Vec<usize> {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut pivots = Vec::new();
    let mut rank = 0;
    let mut nz: Vec<usize> = Vec::with_capacity(cols);
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        // Prefer the sparsest candidate to limit fill-in, then the smallest entries.
        let mut best: Option<(usize, (usize, u64))> = None;
        for (r, row) in rows.iter().enumerate().skip(rank) {
            if !row[c].is_zero() {
                let w = row[c..].iter().filter(|x| !x.is_zero()).count();
                let h = row[c..].iter().map(Rational::height).max().unwrap_or(0);
                if best.is_none_or(|(_, bw)| (w, h) < bw) {
                    best = Some((r, (w, h)));
                }
            }
        }
        let Some((p, _)) = best else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][c].recip();
        if !inv.is_one() {
            for x in rows[rank][c..].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        nz.clear();
        nz.extend((c..cols).filter(|&j| !rows[rank][j].is_zero()));
        let pivot_row = std::mem::take(&mut rows[rank]);
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row.is_empty() || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j].sub_mul(&f, &pivot_row[j]);
            }
        }
        rows[rank] = pivot_row;
        pivots.push(c);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

use std::collections::HashMap;

use super::Rational;

/// A sparse vector: `(column, value)` pairs with strictly increasing columns
/// and no stored zeros.
pub type SparseRow = Vec<(usize, Rational)>;

/// Incremental row echelon basis over sparse rows.
///
/// Rows are reduced only at their leading entry, which keeps fill-in low on
/// the block-incidence matrices of the Čech complex. Only the rank and
/// membership are exposed.
#[derive(Default)]
pub struct SparseEchelon {
    pivots: HashMap<usize, SparseRow>,
}

/// `a - f * b` on sparse rows.
fn axpy(a: &SparseRow, f: &Rational, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, -&(f * &b[j].1)));
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            v.sub_mul(f, &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, mut row: SparseRow) -> SparseRow {
        while let Some((lead, coeff)) = row.first() {
            let Some(p) = self.pivots.get(lead) else { break };
            let f = coeff.clone();
            row = axpy(&row, &f, p);
        }
        row
    }

    /// Inserts a row; returns true if it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let row = self.reduce(row);
        match row.first() {
            None => false,
            Some((lead, c)) => {
                let lead = *lead;
                let inv = c.recip();
                let row = row.into_iter().map(|(j, v)| (j, &v * &inv)).collect();
                self.pivots.insert(lead, row);
                true
            }
        }
    }

    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce(row).is_empty()
    }
}

/// Rank of a set of sparse rows; sparsest rows are inserted first.
pub fn sparse_rank(mut rows: Vec<SparseRow>) -> usize {
    rows.sort_by_key(|r| r.len());
    let mut ech = SparseEchelon::new();
    for r in rows {
        ech.insert(r);
    }
    ech.rank()
}

pub fn to_sparse(dense: &[Rational]) -> SparseRow {
    dense.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect()
}

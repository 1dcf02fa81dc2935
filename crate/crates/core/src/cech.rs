//! The E_1 chain complex of the cover by maximal simplices, and its
//! cohomology E_2 by exact rank arithmetic.
//!
//! Column `r` at polynomial degree `p` is `⊕ P_{I_T}` over `(r+1)`-tuples `T`
//! of cover indices, where `I_T` is the intersection of the tuple's simplices.
//! Every summand sits in the same ambient monomial space, so each component
//! of a differential is a signed identity inclusion.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cartan::{CartanMatrix, IndexSet};
use crate::exactlin::{sparse_rank, Rational, SparseRow, SubspaceBasis};
use crate::gradedlat::DimensionTable;
use crate::invariants::InvariantEngine;
use crate::mvss::{resolve_order, MvssError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CechError {
    #[error("cohomological degree {degree} is odd; E_1 vanishes there")]
    OddDegree { degree: usize },
    #[error(transparent)]
    Order(#[from] MvssError),
}

/// Sign of the component map from `T` into `T ∪ {j}`: one factor of −1 for
/// every element of the larger tuple after `j`.
pub fn face_sign(tuple: &[usize], j: usize) -> i64 {
    let after = tuple.iter().filter(|&&t| t > j).count();
    if after % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All increasing `k`-tuples from `0..d`, in lexicographic order.
fn tuples(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct Column {
    pub tuples: Vec<Vec<usize>>,
    pub subsets: Vec<IndexSet>,
    pub pieces: Vec<Arc<SubspaceBasis>>,
}

impl Column {
    pub fn dim(&self) -> usize {
        self.pieces.iter().map(|p| p.dim()).sum()
    }

    fn position(&self, t: &[usize]) -> usize {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).expect("tuple present")
    }
}

/// One degree slice of the E_1 page.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub cover: Vec<IndexSet>,
    pub degree: usize,
    pub ambient_dim: usize,
    pub columns: Vec<Column>,
}

impl ChainComplex {
    pub fn d(&self) -> usize {
        self.cover.len()
    }

    pub fn dim(&self, r: usize) -> usize {
        self.columns.get(r).map_or(0, Column::dim)
    }

    /// Rows of `δ_r`, one per basis vector of column `r`, in the coordinates
    /// `(position of target tuple) · ambient + monomial`.
    pub fn differential_rows(&self, r: usize) -> Vec<SparseRow> {
        let d = self.d();
        if r + 1 >= d {
            return Vec::new();
        }
        let n = self.ambient_dim;
        let src = &self.columns[r];
        let dst = &self.columns[r + 1];
        let mut rows = Vec::with_capacity(src.dim());
        for (t, piece) in src.tuples.iter().zip(&src.pieces) {
            let targets: Vec<(usize, i64)> = (0..d)
                .filter(|j| !t.contains(j))
                .map(|j| {
                    let mut big = t.clone();
                    big.push(j);
                    big.sort_unstable();
                    (dst.position(&big), face_sign(&big, j))
                })
                .collect();
            let mut targets = targets;
            targets.sort_unstable();
            for v in piece.vectors() {
                let nz: Vec<(usize, &Rational)> = v.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
                let mut row = Vec::with_capacity(nz.len() * targets.len());
                for &(pos, sign) in &targets {
                    for &(m, x) in &nz {
                        let val = if sign > 0 { x.clone() } else { -x };
                        row.push((pos * n + m, val));
                    }
                }
                rows.push(row);
            }
        }
        rows
    }

    /// Applies `δ_r` to a vector given in ambient coordinates of column `r`.
    fn apply_ambient(&self, r: usize, x: &SparseRow) -> SparseRow {
        let d = self.d();
        let n = self.ambient_dim;
        let src = &self.columns[r];
        let dst = &self.columns[r + 1];
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (col, val) in x {
            let (pos, m) = (col / n, col % n);
            let t = &src.tuples[pos];
            for j in (0..d).filter(|j| !t.contains(j)) {
                let mut big = t.clone();
                big.push(j);
                big.sort_unstable();
                let key = dst.position(&big) * n + m;
                let e = acc.entry(key).or_insert_with(Rational::zero);
                if face_sign(&big, j) > 0 {
                    *e += val.clone();
                } else {
                    *e -= val;
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Checks `δ_{r+1} ∘ δ_r = 0` on every basis row.
    pub fn verify_dd_zero(&self) -> bool {
        (0..self.d().saturating_sub(2)).all(|r| self.differential_rows(r).iter().all(|row| self.apply_ambient(r + 1, row).is_empty()))
    }

    /// Rank of `δ_r` by eliminating every row of the full matrix.
    pub fn rank_direct(&self, r: usize) -> usize {
        sparse_rank(self.differential_rows(r))
    }

    /// Rank of `δ_r` by block elimination.
    ///
    /// Every nonzero block `(T, X)` is `c · ι` with `ι` the inclusion
    /// `V_T ⊆ V_X` in echelon-basis coordinates. A block with `V_T = V_X` is
    /// an identity and can be pivoted on, and composing inclusions keeps every
    /// updated block an inclusion, so elimination only touches the scalar
    /// coefficients. A block alone in its column has full row rank and is
    /// split off directly. Whatever is left goes through sparse elimination.
    pub fn rank(&self, r: usize) -> usize {
        let d = self.d();
        if r + 1 >= d {
            return 0;
        }
        let src = &self.columns[r];
        let dst = &self.columns[r + 1];
        let ks: Vec<usize> = src.pieces.iter().map(|p| p.dim()).collect();
        let kx: Vec<usize> = dst.pieces.iter().map(|p| p.dim()).collect();
        let mut coeff: Vec<Vec<Rational>> = vec![vec![Rational::zero(); dst.tuples.len()]; src.tuples.len()];
        for (ti, t) in src.tuples.iter().enumerate() {
            for j in (0..d).filter(|j| !t.contains(j)) {
                let mut big = t.clone();
                big.push(j);
                big.sort_unstable();
                coeff[ti][dst.position(&big)] = Rational::from(face_sign(&big, j));
            }
        }
        let mut row_alive: Vec<bool> = ks.iter().map(|&k| k > 0).collect();
        let mut col_alive: Vec<bool> = kx.iter().map(|&k| k > 0).collect();
        let mut rank = 0;
        loop {
            let live_rows: Vec<usize> = (0..ks.len()).filter(|&i| row_alive[i]).collect();
            let live_cols: Vec<usize> = (0..kx.len()).filter(|&x| col_alive[x]).collect();
            let col_count = |x: usize| live_rows.iter().filter(|&&i| !coeff[i][x].is_zero()).count();
            let row_count = |i: usize| live_cols.iter().filter(|&&x| !coeff[i][x].is_zero()).count();
            if let Some((i, x)) = live_cols.iter().find_map(|&x| {
                (col_count(x) == 1).then(|| (*live_rows.iter().find(|&&i| !coeff[i][x].is_zero()).unwrap(), x))
            }) {
                rank += ks[i];
                row_alive[i] = false;
                col_alive[x] = false;
                continue;
            }
            let pivot = live_rows
                .iter()
                .flat_map(|&i| live_cols.iter().map(move |&x| (i, x)))
                .filter(|&(i, x)| !coeff[i][x].is_zero() && ks[i] == kx[x])
                .min_by_key(|&(i, x)| (col_count(x) - 1) * (row_count(i) - 1));
            let Some((t, x)) = pivot else { break };
            for &i in &live_rows {
                if i == t || coeff[i][x].is_zero() {
                    continue;
                }
                let f = &coeff[i][x] / &coeff[t][x];
                for &y in &live_cols {
                    if !coeff[t][y].is_zero() {
                        let delta = &f * &coeff[t][y];
                        coeff[i][y] -= &delta;
                    }
                }
            }
            rank += ks[t];
            row_alive[t] = false;
            col_alive[x] = false;
        }
        let live_cols: Vec<usize> = (0..kx.len()).filter(|&x| col_alive[x]).collect();
        let mut offsets = Vec::with_capacity(live_cols.len());
        let mut width = 0;
        for &x in &live_cols {
            offsets.push(width);
            width += kx[x];
        }
        let mut rows = Vec::new();
        for i in (0..ks.len()).filter(|&i| row_alive[i] && live_cols.iter().any(|&x| !coeff[i][x].is_zero())) {
            for v in src.pieces[i].vectors() {
                let mut row = Vec::new();
                for (&x, &off) in live_cols.iter().zip(&offsets) {
                    let c = &coeff[i][x];
                    if c.is_zero() {
                        continue;
                    }
                    // Coordinates in the echelon basis of V_X are the pivot entries.
                    for (k, &p) in dst.pieces[x].pivots().iter().enumerate() {
                        if !v[p].is_zero() {
                            row.push((off + k, c * &v[p]));
                        }
                    }
                }
                rows.push(row);
            }
        }
        rank + sparse_rank(rows)
    }
}

/// The complex at even cohomological degree `degree` for the cover `order`.
pub fn build_complex_with(engine: &InvariantEngine, order: &[IndexSet], degree: usize) -> Result<ChainComplex, CechError> {
    if degree % 2 == 1 {
        return Err(CechError::OddDegree { degree });
    }
    let p = degree / 2;
    let d = order.len();
    let columns = (0..d)
        .map(|r| {
            let tuples = tuples(d, r + 1);
            let subsets: Vec<IndexSet> =
                tuples.iter().map(|t| t.iter().fold(engine.matrix().index_set(), |acc, &i| acc.intersection(order[i]))).collect();
            let pieces = subsets.iter().map(|&s| engine.piece(s, p)).collect();
            Column { tuples, subsets, pieces }
        })
        .collect();
    Ok(ChainComplex { cover: order.to_vec(), degree, ambient_dim: engine.ambient_dim(p), columns })
}

pub fn build_complex(a: &CartanMatrix, order: Option<&[IndexSet]>, degree: usize) -> Result<ChainComplex, CechError> {
    let order = resolve_order(a, order)?;
    let engine = InvariantEngine::new(a.clone());
    let complex = build_complex_with(&engine, &order, degree)?;
    assert!(complex.verify_dd_zero(), "δ∘δ ≠ 0");
    Ok(complex)
}

/// `E_1` and `E_2` dimensions and differential ranks, keyed by `(r, s)`.
#[derive(Clone, Debug)]
pub struct E2Table {
    pub d: usize,
    pub max_degree: usize,
    pub e1: BTreeMap<(usize, usize), usize>,
    pub ranks: BTreeMap<(usize, usize), usize>,
    pub e2: BTreeMap<(usize, usize), usize>,
}

impl E2Table {
    pub fn get(&self, r: usize, s: usize) -> usize {
        self.e2.get(&(r, s)).copied().unwrap_or(0)
    }

    /// Column `r` as a table over total degree `N = r + s`.
    pub fn column(&self, r: usize) -> DimensionTable {
        let mut t = DimensionTable::zeros(self.max_degree);
        for (&(rr, s), &v) in &self.e2 {
            if rr == r && r + s <= self.max_degree {
                t.0[r + s] = v;
            }
        }
        t
    }

    pub fn total(&self) -> DimensionTable {
        let mut t = DimensionTable::zeros(self.max_degree);
        for (&(r, s), &v) in &self.e2 {
            if r + s <= self.max_degree {
                t.0[r + s] += v;
            }
        }
        t
    }

    fn alternating(map: &BTreeMap<(usize, usize), usize>, s: usize) -> i64 {
        map.iter().filter(|((_, ss), _)| *ss == s).map(|(&(r, _), &v)| if r % 2 == 0 { v as i64 } else { -(v as i64) }).sum()
    }

    pub fn euler_holds(&self, s: usize) -> bool {
        Self::alternating(&self.e1, s) == Self::alternating(&self.e2, s)
    }

    pub fn rank_nullity_holds(&self, s: usize) -> bool {
        let sum = |m: &BTreeMap<(usize, usize), usize>| m.iter().filter(|((_, ss), _)| *ss == s).map(|(_, &v)| v).sum::<usize>();
        sum(&self.e2) + 2 * sum(&self.ranks) == sum(&self.e1)
    }

    pub fn odd_rows_vanish(&self) -> bool {
        self.e2.iter().all(|(&(_, s), &v)| s % 2 == 0 || v == 0)
    }
}

/// E_2 at every column for each even `s ≤ max_degree`.
pub fn e2_dims_with(engine: &InvariantEngine, order: &[IndexSet], max_degree: usize) -> Result<E2Table, CechError> {
    let d = order.len();
    let slices: Vec<ChainComplex> =
        (0..=max_degree / 2).map(|p| build_complex_with(engine, order, 2 * p)).collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..slices.len()).flat_map(|k| (0..d.saturating_sub(1)).map(move |r| (k, r))).collect();
    let ranks: BTreeMap<(usize, usize), usize> =
        jobs.into_par_iter().map(|(k, r)| ((r, slices[k].degree), slices[k].rank(r))).collect();
    let mut e1 = BTreeMap::new();
    let mut e2 = BTreeMap::new();
    for c in &slices {
        let s = c.degree;
        for r in 0..d {
            let dim = c.dim(r);
            let out = ranks.get(&(r, s)).copied().unwrap_or(0);
            let inc = if r == 0 { 0 } else { ranks.get(&(r - 1, s)).copied().unwrap_or(0) };
            e1.insert((r, s), dim);
            e2.insert((r, s), dim - out - inc);
        }
    }
    Ok(E2Table { d, max_degree, e1, ranks, e2 })
}

pub fn e2_dims(a: &CartanMatrix, order: Option<&[IndexSet]>, max_degree: usize) -> Result<E2Table, CechError> {
    let order = resolve_order(a, order)?;
    let engine = InvariantEngine::new(a.clone());
    e2_dims_with(&engine, &order, max_degree)
}

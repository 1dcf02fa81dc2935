use super::matrix::rref_rows;
use super::{LinAlgError, Rational, RationalMatrix};

/// A subspace of `Q^ambient_dim`, stored as its reduced row echelon basis.
///
/// The echelon basis is canonical: two values are equal exactly when they
/// span the same subspace.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    basis: RationalMatrix,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    /// Span of arbitrary (possibly dependent) vectors.
    pub fn from_spanning(ambient_dim: usize, mut vectors: Vec<Vec<Rational>>) -> Self {
        let pivots = rref_rows(&mut vectors, ambient_dim);
        SubspaceBasis { ambient_dim, basis: RationalMatrix::from_rows(ambient_dim, vectors), pivots }
    }

    pub fn row_space(m: &RationalMatrix) -> Self {
        Self::from_spanning(m.cols(), m.row_vecs())
    }

    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceBasis { ambient_dim, basis: RationalMatrix::zeros(0, ambient_dim), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            basis: RationalMatrix::identity(ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.row_vecs()
    }

    fn check(&self, other: &SubspaceBasis) -> Result<(), LinAlgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinAlgError::AmbientMismatch { left: self.ambient_dim, right: other.ambient_dim });
        }
        Ok(())
    }

    /// Reduces `v` against the echelon basis; the remainder is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &mut [Rational]) {
        for (i, &p) in self.pivots.iter().enumerate() {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, b) in v[p..].iter_mut().zip(&self.basis.row(i)[p..]) {
                x.sub_mul(&f, b);
            }
        }
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Rational::is_zero)
    }

    /// True iff `other ⊆ self`.
    pub fn contains(&self, other: &SubspaceBasis) -> Result<bool, LinAlgError> {
        self.check(other)?;
        if other.dim() > self.dim() {
            return Ok(false);
        }
        if self.is_full() || other.is_zero() {
            return Ok(true);
        }
        Ok((0..other.dim()).all(|i| self.contains_vector(other.basis.row(i))))
    }

    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis, LinAlgError> {
        self.check(other)?;
        if self.contains(other)? {
            return Ok(self.clone());
        }
        if other.contains(self)? {
            return Ok(other.clone());
        }
        let mut rows = self.vectors();
        rows.extend(other.vectors());
        Ok(Self::from_spanning(self.ambient_dim, rows))
    }

    /// Intersection through the kernel of the stacked system `x·A + y·B = 0`.
    pub fn intersect(&self, other: &SubspaceBasis) -> Result<SubspaceBasis, LinAlgError> {
        self.check(other)?;
        if self.contains(other)? {
            return Ok(other.clone());
        }
        if other.contains(self)? {
            return Ok(self.clone());
        }
        // Restrict the larger space's defining equations to the smaller space.
        let (small, large) = if self.dim() <= other.dim() { (self, other) } else { (other, self) };
        let eqs = large.annihilator();
        let k = small.dim();
        let restricted: Vec<Vec<Rational>> = eqs
            .iter()
            .map(|eq| {
                (0..k)
                    .map(|i| {
                        let mut acc = Rational::zero();
                        for (c, x) in eq {
                            let b = &small.basis.row(i)[*c];
                            if !b.is_zero() {
                                acc += &(x * b);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let combos = kernel_basis(&RationalMatrix::from_rows(k, restricted));
        let vectors: Vec<Vec<Rational>> = combos
            .vectors()
            .into_iter()
            .map(|c| {
                let mut v = vec![Rational::zero(); self.ambient_dim];
                for (i, ci) in c.iter().enumerate() {
                    if ci.is_zero() {
                        continue;
                    }
                    for (x, b) in v.iter_mut().zip(small.basis.row(i)) {
                        if !b.is_zero() {
                            *x += &(ci * b);
                        }
                    }
                }
                v
            })
            .collect();
        Ok(Self::from_spanning(self.ambient_dim, vectors))
    }

    /// Sparse linear equations cutting out this subspace, one per non-pivot
    /// column: `x_c = Σ_i x_{p_i} · b_i[c]`.
    pub fn annihilator(&self) -> Vec<Vec<(usize, Rational)>> {
        let mut is_pivot = vec![false; self.ambient_dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient_dim)
            .filter(|&c| !is_pivot[c])
            .map(|c| {
                let mut eq = vec![(c, Rational::one())];
                for (i, &p) in self.pivots.iter().enumerate() {
                    let b = &self.basis.row(i)[c];
                    if !b.is_zero() {
                        eq.push((p, -b));
                    }
                }
                eq.sort_by_key(|e| e.0);
                eq
            })
            .collect()
    }
}

/// Canonical basis of `{v : m·v = 0}`.
///
/// `m` is reduced with its columns in reverse order, so every pivot row is
/// zero to the right of its pivot. The vector attached to a free column `f`
/// then has its leading 1 at `f` and its other entries only in pivot columns,
/// which is already the reduced echelon basis of the kernel.
pub fn kernel_basis(m: &RationalMatrix) -> SubspaceBasis {
    let cols = m.cols();
    let mut rows: Vec<Vec<Rational>> = m.row_vecs().into_iter().map(|mut r| {
        r.reverse();
        r
    }).collect();
    let pivots: Vec<usize> = rref_rows(&mut rows, cols).into_iter().map(|p| cols - 1 - p).collect();
    for r in &mut rows {
        r.reverse();
    }
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&f| !is_pivot[f]).collect();
    let vectors: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                if !rows[i][f].is_zero() {
                    debug_assert!(p > f);
                    v[p] = -&rows[i][f];
                }
            }
            v
        })
        .collect();
    SubspaceBasis { ambient_dim: cols, basis: RationalMatrix::from_rows(cols, vectors), pivots: free }
}

/// Reduced row echelon form and rank of `m`.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, usize) {
    m.rref()
}

//! Generalized Cartan matrices: validation, block decomposition, the
//! finite/affine/indefinite trichotomy, and the simplicial category of
//! finite-type index subsets.
//!
//! Indices are 0-based internally and 1-based in everything user-facing
//! (error messages, `Display` of [`IndexSet`]).

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactlin::{Rational, RationalMatrix};

/// Largest supported rank; principal-minor enumeration is exponential in `n`.
pub const MAX_RANK: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("rank {n} exceeds the supported maximum of {MAX_RANK}")]
    TooLarge { n: usize },
    #[error("condition (1) a_ii = 2 violated: a_{i}{i} = {value}")]
    DiagonalNotTwo { i: usize, value: i64 },
    #[error("condition (2) a_ij <= 0 for i != j violated: a_{i}{j} = {value}")]
    PositiveOffDiagonal { i: usize, j: usize, value: i64 },
    #[error("condition (3) a_ij = 0 => a_ji = 0 violated at ({i},{j}): a_{i}{j} = 0 but a_{j}{i} = {value}")]
    AsymmetricZero { i: usize, j: usize, value: i64 },
    #[error("no standard Dynkin diagram matches the finite-type block {block}")]
    NoMatch { block: IndexSet },
    #[error("index {index} out of range for rank {n}")]
    IndexOutOfRange { index: usize, n: usize },
}

/// A subset of `{0, …, n-1}`, displayed 1-based as concatenated indices.
///
/// Ordered lexicographically on the sorted member list, so `{1,2} < {1,3} < {2,3}`
/// and `{1,2} < {3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub fn full(n: usize) -> Self {
        IndexSet(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(1 << i)
    }

    /// From 0-based members.
    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        IndexSet(members.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    pub fn insert(self, i: usize) -> IndexSet {
        IndexSet(self.0 | (1 << i))
    }

    pub fn remove(self, i: usize) -> IndexSet {
        IndexSet(self.0 & !(1 << i))
    }

    /// 0-based members in increasing order.
    pub fn members(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    /// 1-based members, the user-facing form.
    pub fn labels(self) -> Vec<usize> {
        self.members().into_iter().map(|i| i + 1).collect()
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members().cmp(&other.members())
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.labels();
        if labels.iter().any(|&l| l >= 10) {
            let parts: Vec<String> = labels.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", parts.join(","))
        } else {
            for l in labels {
                write!(f, "{l}")?;
            }
            Ok(())
        }
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().iter().map(usize::to_string).collect::<Vec<_>>().join(","))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(s)
    }
}

/// A validated generalized Cartan matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CartanMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl CartanMatrix {
    /// Checks the three defining conditions and the size cap.
    pub fn validate(raw: &[Vec<i64>]) -> Result<Self, CartanError> {
        let n = raw.len();
        if n == 0 {
            return Err(CartanError::Empty);
        }
        for (row, r) in raw.iter().enumerate() {
            if r.len() != n {
                return Err(CartanError::NotSquare { row: row + 1, len: r.len(), n });
            }
        }
        if n > MAX_RANK {
            return Err(CartanError::TooLarge { n });
        }
        for (i, r) in raw.iter().enumerate() {
            if r[i] != 2 {
                return Err(CartanError::DiagonalNotTwo { i: i + 1, value: r[i] });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && raw[i][j] > 0 {
                    return Err(CartanError::PositiveOffDiagonal { i: i + 1, j: j + 1, value: raw[i][j] });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && raw[i][j] == 0 && raw[j][i] != 0 {
                    return Err(CartanError::AsymmetricZero { i: i + 1, j: j + 1, value: raw[j][i] });
                }
            }
        }
        Ok(CartanMatrix { n, entries: raw.iter().flatten().copied().collect() })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn index_set(&self) -> IndexSet {
        IndexSet::full(self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix::from_i64_rows(&self.rows())
    }

    /// The principal submatrix `A_I`, re-indexed by the members of `I` in order.
    pub fn submatrix(&self, subset: IndexSet) -> Option<CartanMatrix> {
        let m = subset.members();
        if m.is_empty() || m.iter().any(|&i| i >= self.n) {
            return None;
        }
        let entries = m.iter().flat_map(|&i| m.iter().map(move |&j| (i, j))).map(|(i, j)| self.get(i, j)).collect();
        Some(CartanMatrix { n: m.len(), entries })
    }

    /// Determinant of the principal submatrix on `subset` (1 for the empty set).
    pub fn principal_minor(&self, subset: IndexSet) -> Rational {
        let m = subset.members();
        if m.is_empty() {
            return Rational::one();
        }
        self.to_rational().select(&m, &m).determinant()
    }

    /// Simultaneous row/column permutation: entry `(i,j)` of the result is
    /// `a_{perm[i], perm[j]}`.
    pub fn permuted(&self, perm: &[usize]) -> CartanMatrix {
        assert_eq!(perm.len(), self.n);
        let entries = (0..self.n).flat_map(|i| (0..self.n).map(move |j| (i, j))).map(|(i, j)| self.get(perm[i], perm[j])).collect();
        CartanMatrix { n: self.n, entries }
    }

    /// Connected components of the graph with edges `{i,j}` where `a_ij != 0`,
    /// sorted by smallest member.
    pub fn decompose(&self) -> Vec<IndexSet> {
        let mut seen = IndexSet::EMPTY;
        let mut blocks = Vec::new();
        for start in 0..self.n {
            if seen.contains(start) {
                continue;
            }
            let mut block = IndexSet::singleton(start);
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for j in 0..self.n {
                    if j != i && self.get(i, j) != 0 && !block.contains(j) {
                        block = block.insert(j);
                        stack.push(j);
                    }
                }
            }
            seen = seen.union(block);
            blocks.push(block);
        }
        blocks
    }

    fn block_kind(&self, block: IndexSet) -> TypeKind {
        let members = block.members();
        let full = block.bits();
        let mut proper_positive = true;
        // Enumerate nonempty proper sub-masks of the block.
        let mut sub = (full.wrapping_sub(1)) & full;
        while sub != 0 {
            if !self.principal_minor(IndexSet(sub)).is_positive() {
                proper_positive = false;
                break;
            }
            sub = (sub - 1) & full;
        }
        let det = self.principal_minor(IndexSet::from_members(members));
        if proper_positive && det.is_positive() {
            TypeKind::Finite
        } else if proper_positive && det.is_zero() {
            TypeKind::Affine
        } else {
            TypeKind::Indefinite
        }
    }

    /// Finite / affine / indefinite label per indecomposable block, plus an
    /// overall label.
    pub fn classify(&self) -> TypeLabel {
        let blocks: Vec<(IndexSet, TypeKind)> = self.decompose().into_iter().map(|b| (b, self.block_kind(b))).collect();
        let overall = if blocks.iter().all(|(_, k)| *k == TypeKind::Finite) {
            TypeKind::Finite
        } else if blocks.iter().any(|(_, k)| *k == TypeKind::Indefinite) {
            TypeKind::Indefinite
        } else {
            TypeKind::Affine
        };
        TypeLabel { kind: overall, decomposable: blocks.len() > 1, blocks }
    }

    /// True iff every principal minor of `A_I` is positive (the empty set is finite).
    pub fn is_finite_subset(&self, subset: IndexSet) -> bool {
        let full = subset.bits();
        let mut sub = full;
        while sub != 0 {
            if !self.principal_minor(IndexSet(sub)).is_positive() {
                return false;
            }
            sub = (sub - 1) & full;
        }
        true
    }

    /// The simplicial category `C(A)`: proper subsets of finite type, built
    /// level by level so a set is only tested once all its facets passed.
    pub fn finite_subsets(&self) -> SimplicialCategory {
        let n = self.n;
        let full = IndexSet::full(n);
        let mut simplices = vec![IndexSet::EMPTY];
        let mut level: Vec<IndexSet> = vec![IndexSet::EMPTY];
        for size in 1..n {
            let mut next: Vec<IndexSet> = Vec::new();
            for base in &level {
                for i in 0..n {
                    if base.contains(i) || base.members().iter().any(|&m| m > i) {
                        continue;
                    }
                    let cand = base.insert(i);
                    debug_assert_eq!(cand.len(), size);
                    let facets_ok = cand.members().iter().all(|&m| {
                        let f = cand.remove(m);
                        f.is_empty() || level.contains(&f)
                    });
                    if facets_ok && cand != full && self.is_finite_subset(cand) {
                        next.push(cand);
                    }
                }
            }
            next.sort();
            next.dedup();
            simplices.extend(next.iter().copied());
            level = next;
            if level.is_empty() {
                break;
            }
        }
        let mut maximal: Vec<IndexSet> = simplices
            .iter()
            .copied()
            .filter(|s| !s.is_empty())
            .filter(|s| !simplices.iter().any(|t| t != s && s.is_subset(*t)))
            .collect();
        maximal.sort();
        SimplicialCategory { n, simplices, maximal }
    }

    /// Matches every block of a finite-type matrix against the standard Dynkin list.
    pub fn dynkin_type(&self) -> Result<Vec<DynkinBlock>, CartanError> {
        self.decompose().into_iter().map(|b| match_block(self, b)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TypeKind {
    Finite,
    Affine,
    Indefinite,
}

impl fmt::Display for TypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TypeKind::Finite => "Finite",
            TypeKind::Affine => "Affine",
            TypeKind::Indefinite => "Indefinite",
        };
        f.write_str(s)
    }
}

/// Classification result. `kind` is `Finite` iff every block is finite;
/// otherwise `Indefinite` if any block is, else `Affine`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeLabel {
    pub kind: TypeKind,
    pub decomposable: bool,
    pub blocks: Vec<(IndexSet, TypeKind)>,
}

impl TypeLabel {
    pub fn is_finite(&self) -> bool {
        self.kind == TypeKind::Finite
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialCategory {
    pub n: usize,
    /// Every simplex including the empty one, by cardinality then lexicographically.
    pub simplices: Vec<IndexSet>,
    /// Inclusion-maximal simplices in lexicographic order.
    pub maximal: Vec<IndexSet>,
}

impl SimplicialCategory {
    pub fn contains(&self, s: IndexSet) -> bool {
        self.simplices.contains(&s)
    }
}

/// A finite-type block matched to a standard diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynkinBlock {
    /// e.g. `A2`, `B3`, `E6`. Rank two `B2` stands for the `B2 = C2` family.
    pub label: String,
    /// `vertices[k]` is the (0-based) matrix index playing the role of
    /// standard node `k`.
    pub vertices: Vec<usize>,
}

impl DynkinBlock {
    /// Order of the Weyl group of the standard type.
    pub fn weyl_order(&self) -> u64 {
        let (family, rank) = self.label.split_at(1);
        let r: u64 = rank.parse().expect("label rank");
        let fact = |k: u64| (1..=k).product::<u64>();
        match family {
            "A" => fact(r + 1),
            "B" | "C" => (1u64 << r) * fact(r),
            "D" => (1u64 << (r - 1)) * fact(r),
            "E" => match r {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            "F" => 1152,
            "G" => 12,
            _ => unreachable!("unknown family"),
        }
    }
}

fn path_matrix(k: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; k]; k];
    for i in 0..k {
        m[i][i] = 2;
        if i + 1 < k {
            m[i][i + 1] = -1;
            m[i + 1][i] = -1;
        }
    }
    m
}

/// Standard finite Cartan matrices of rank `k`, with `a_ij = α_j(α_i^∨)`.
pub fn standard_types(k: usize) -> Vec<(String, Vec<Vec<i64>>)> {
    let mut out = vec![(format!("A{k}"), path_matrix(k))];
    if k >= 2 {
        let mut b = path_matrix(k);
        b[k - 1][k - 2] = -2;
        out.push((format!("B{k}"), b.clone()));
        if k >= 3 {
            let mut c = path_matrix(k);
            c[k - 2][k - 1] = -2;
            out.push((format!("C{k}"), c));
        }
    }
    if k >= 4 {
        let mut d = path_matrix(k);
        d[k - 2][k - 1] = 0;
        d[k - 1][k - 2] = 0;
        d[k - 3][k - 1] = -1;
        d[k - 1][k - 3] = -1;
        out.push((format!("D{k}"), d));
    }
    if (6..=8).contains(&k) {
        // Bourbaki labels: chain 1-3-4-5-…, node 2 attached to 4.
        let mut e = vec![vec![0; k]; k];
        let mut edge = |a: usize, b: usize| {
            e[a][b] = -1;
            e[b][a] = -1;
        };
        edge(0, 2);
        edge(1, 3);
        for i in 2..k - 1 {
            edge(i, i + 1);
        }
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 2;
        }
        out.push((format!("E{k}"), e));
    }
    if k == 4 {
        out.push(("F4".into(), vec![vec![2, -1, 0, 0], vec![-1, 2, -2, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]]));
    }
    if k == 2 {
        out.push(("G2".into(), vec![vec![2, -1], vec![-3, 2]]));
    }
    out
}

fn match_block(a: &CartanMatrix, block: IndexSet) -> Result<DynkinBlock, CartanError> {
    let verts = block.members();
    let k = verts.len();
    for (label, std) in standard_types(k) {
        let mut assign = vec![usize::MAX; k];
        let mut used = vec![false; k];
        if extend(a, &verts, &std, 0, &mut assign, &mut used) {
            return Ok(DynkinBlock { label, vertices: assign.iter().map(|&p| verts[p]).collect() });
        }
    }
    Err(CartanError::NoMatch { block })
}

/// Backtracking search for `assign` with `a[verts[assign[i]]][verts[assign[j]]] == std[i][j]`.
fn extend(a: &CartanMatrix, verts: &[usize], std: &[Vec<i64>], pos: usize, assign: &mut [usize], used: &mut [bool]) -> bool {
    if pos == verts.len() {
        return true;
    }
    for cand in 0..verts.len() {
        if used[cand] {
            continue;
        }
        let ok = (0..pos).all(|q| {
            a.get(verts[cand], verts[assign[q]]) == std[pos][q] && a.get(verts[assign[q]], verts[cand]) == std[q][pos]
        });
        if ok {
            assign[pos] = cand;
            used[cand] = true;
            if extend(a, verts, std, pos + 1, assign, used) {
                return true;
            }
            used[cand] = false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cm(rows: &[&[i64]]) -> CartanMatrix {
        CartanMatrix::validate(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn sets(v: &[&[usize]]) -> Vec<IndexSet> {
        v.iter().map(|s| IndexSet::from_members(s.iter().map(|i| i - 1))).collect()
    }

    #[test]
    fn validate_examples() {
        assert!(CartanMatrix::validate(&[vec![2, -1], vec![-1, 2]]).is_ok());
        assert_eq!(
            CartanMatrix::validate(&[vec![2, 0], vec![-1, 2]]),
            Err(CartanError::AsymmetricZero { i: 1, j: 2, value: -1 })
        );
        assert_eq!(CartanMatrix::validate(&[vec![1]]), Err(CartanError::DiagonalNotTwo { i: 1, value: 1 }));
        assert!(matches!(
            CartanMatrix::validate(&[vec![2, 1], vec![1, 2]]),
            Err(CartanError::PositiveOffDiagonal { i: 1, j: 2, .. })
        ));
        assert!(matches!(CartanMatrix::validate(&[vec![2, -1]]), Err(CartanError::NotSquare { .. })));
        assert_eq!(CartanMatrix::validate(&[]), Err(CartanError::Empty));
        let big: Vec<Vec<i64>> = (0..11).map(|i| (0..11).map(|j| if i == j { 2 } else { 0 }).collect()).collect();
        assert_eq!(CartanMatrix::validate(&big), Err(CartanError::TooLarge { n: 11 }));
    }

    #[test]
    fn error_messages_name_the_condition() {
        let e = CartanMatrix::validate(&[vec![2, 0], vec![-1, 2]]).unwrap_err();
        assert!(e.to_string().contains("condition (3)"));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(cm(&[&[2, -1], &[-1, 2]]).decompose(), sets(&[&[1, 2]]));
        assert_eq!(cm(&[&[2, 0], &[0, 2]]).decompose(), sets(&[&[1], &[2]]));
        let a = cm(&[&[2, -1, 0, 0], &[-1, 2, 0, 0], &[0, 0, 2, -1], &[0, 0, -1, 2]]);
        assert_eq!(a.decompose(), sets(&[&[1, 2], &[3, 4]]));
        let b = cm(&[&[2, 0, -1], &[0, 2, 0], &[-1, 0, 2]]);
        assert_eq!(b.decompose(), sets(&[&[1, 3], &[2]]));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(cm(&[&[2, -1], &[-1, 2]]).classify().kind, TypeKind::Finite);
        assert_eq!(cm(&[&[2, -2], &[-2, 2]]).classify().kind, TypeKind::Affine);
        assert_eq!(cm(&[&[2, -3], &[-2, 2]]).classify().kind, TypeKind::Indefinite);
        let affine3 = cm(&[&[2, -1, -1], &[-1, 2, -1], &[-1, -1, 2]]);
        assert_eq!(affine3.classify().kind, TypeKind::Affine);
        let dec = cm(&[&[2, -2, 0], &[-2, 2, 0], &[0, 0, 2]]);
        let label = dec.classify();
        assert!(label.decomposable);
        assert_eq!(label.kind, TypeKind::Affine);
        assert_eq!(label.blocks, vec![(sets(&[&[1, 2]])[0], TypeKind::Affine), (sets(&[&[3]])[0], TypeKind::Finite)]);
    }

    #[test]
    fn two_by_two_product_rule() {
        for a in 1..=6 {
            for b in 1..=6 {
                let m = cm(&[&[2, -a], &[-b, 2]]);
                let expected = match (a * b).cmp(&4) {
                    Ordering::Less => TypeKind::Finite,
                    Ordering::Equal => TypeKind::Affine,
                    Ordering::Greater => TypeKind::Indefinite,
                };
                assert_eq!(m.classify().kind, expected, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn category_examples() {
        // finite pair {1,2} (product 3), other pairs non-finite
        let a = cm(&[&[2, -1, -3], &[-3, 2, -2], &[-2, -2, 2]]);
        assert_eq!(a.finite_subsets().maximal, sets(&[&[1, 2], &[3]]));
        let b = cm(&[&[2, -2, -2], &[-2, 2, -2], &[-2, -2, 2]]);
        assert_eq!(b.finite_subsets().maximal, sets(&[&[1], &[2], &[3]]));
        let c = cm(&[&[2, -1, -1], &[-1, 2, -1], &[-1, -1, 2]]);
        assert_eq!(c.finite_subsets().maximal, sets(&[&[1, 2], &[1, 3], &[2, 3]]));
    }

    #[test]
    fn index_set_order_and_display() {
        let s = sets(&[&[3], &[1, 3], &[1, 2], &[2, 3]]);
        let mut t = s.clone();
        t.sort();
        assert_eq!(t, sets(&[&[1, 2], &[1, 3], &[2, 3], &[3]]));
        assert_eq!(sets(&[&[1, 2]])[0].to_string(), "12");
        assert_eq!(IndexSet::from_members([0, 9]).to_string(), "{1,10}");
    }

    #[test]
    fn dynkin_examples() {
        let a2 = cm(&[&[2, -1], &[-1, 2]]).dynkin_type().unwrap();
        assert_eq!(a2[0].label, "A2");
        assert_eq!(a2[0].weyl_order(), 6);
        let b2 = cm(&[&[2, -2], &[-1, 2]]).dynkin_type().unwrap();
        assert_eq!(b2[0].label, "B2");
        assert_eq!(b2[0].weyl_order(), 8);
        let g2 = cm(&[&[2, -1], &[-3, 2]]).dynkin_type().unwrap();
        assert_eq!(g2[0].label, "G2");
        assert_eq!(g2[0].weyl_order(), 12);
        assert!(cm(&[&[2, -2], &[-2, 2]]).dynkin_type().is_err());
    }

    #[test]
    fn every_standard_type_is_finite_and_self_matching() {
        for k in 1..=8 {
            for (label, rows) in standard_types(k) {
                let m = CartanMatrix::validate(&rows).unwrap();
                assert!(m.classify().is_finite(), "{label}");
                assert_eq!(m.dynkin_type().unwrap()[0].label, label);
            }
        }
    }

    fn arb_cartan(n: usize) -> impl Strategy<Value = CartanMatrix> {
        proptest::collection::vec((0i64..=3, 0i64..=3), n * (n - 1) / 2).prop_map(move |pairs| {
            let mut m = vec![vec![0i64; n]; n];
            let mut k = 0;
            for i in 0..n {
                m[i][i] = 2;
                for j in i + 1..n {
                    let (x, y) = pairs[k];
                    k += 1;
                    if x != 0 && y != 0 {
                        m[i][j] = -x;
                        m[j][i] = -y;
                    }
                }
            }
            CartanMatrix::validate(&m).unwrap()
        })
    }

    proptest! {
        #[test]
        fn classify_is_permutation_invariant(a in arb_cartan(4), perm in Just((0..4).collect::<Vec<usize>>()).prop_shuffle()) {
            let p = a.permuted(&perm);
            prop_assert_eq!(a.classify().kind, p.classify().kind);
            prop_assert_eq!(a.finite_subsets().maximal.len(), p.finite_subsets().maximal.len());
        }

        #[test]
        fn category_is_downward_closed_and_covers(a in (2usize..=6).prop_flat_map(arb_cartan)) {
            let c = a.finite_subsets();
            let n = a.rank();
            for s in &c.simplices {
                prop_assert!(a.is_finite_subset(*s));
                for m in s.members() {
                    prop_assert!(c.contains(s.remove(m)));
                }
            }
            for i in 0..n {
                prop_assert!(c.contains(IndexSet::singleton(i)));
            }
            // exhaustive: every finite proper subset is listed
            for bits in 0..(1u32 << n) - 1 {
                let s = IndexSet::from_bits(bits);
                prop_assert_eq!(c.contains(s), a.is_finite_subset(s));
            }
            if a.classify().is_infinite() {
                prop_assert!(c.maximal.len() >= 2);
                let union = c.maximal.iter().fold(IndexSet::EMPTY, |u, s| u.union(*s));
                prop_assert_eq!(union, a.index_set());
            }
        }

        #[test]
        fn finite_matrices_match_a_dynkin_diagram(a in (1usize..=5).prop_flat_map(arb_cartan)) {
            if a.classify().is_finite() {
                prop_assert!(a.dynkin_type().is_ok());
            }
        }
    }
}

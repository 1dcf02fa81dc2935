//! Graded pieces of `P = Q[w_1, …, w_n]` and the invariant subspaces `P_J`,
//! computed degree by degree from fixed points of the generating reflections.
//!
//! Degrees here are polynomial degrees; `w_i` sits in cohomological degree 2.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::cartan::{CartanMatrix, IndexSet};
use crate::exactlin::{kernel_basis, Rational, RationalMatrix, SubspaceBasis};

/// All exponent vectors of total degree `d` in `n` variables, ordered so that
/// higher powers of earlier variables come first (`w1², w1w2, w2²`).
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    n: usize,
    d: usize,
    monomials: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: usize) -> Self {
        let mut monomials = Vec::new();
        let mut cur = vec![0u8; n];
        fill(&mut monomials, &mut cur, 0, d);
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialBasis { n, d, monomials, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<u8>] {
        &self.monomials
    }

    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        self.index.get(exponents).copied()
    }
}

fn fill(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, remaining: usize) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining as u8;
        out.push(cur.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e as u8;
        fill(out, cur, pos + 1, remaining - e);
    }
    cur[pos] = 0;
}

/// `C(n+d-1, d)`, the number of degree-`d` monomials in `n` variables.
pub fn monomial_count(n: usize, d: usize) -> usize {
    if n == 0 {
        return usize::from(d == 0);
    }
    let mut c: u128 = 1;
    for k in 1..=d as u128 {
        c = c * (n as u128 - 1 + k) / k;
    }
    c as usize
}

type Poly<T> = HashMap<Vec<u8>, T>;

fn poly_mul<T>(a: &Poly<T>, b: &Poly<T>) -> Poly<T>
where
    T: Clone + std::ops::AddAssign + for<'x> std::ops::Mul<&'x T, Output = T> + IsZero,
{
    let mut out: Poly<T> = HashMap::with_capacity(a.len() * b.len());
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let p = ca.clone() * cb;
            match out.get_mut(&e) {
                Some(v) => *v += p,
                None => {
                    out.insert(e, p);
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero_value());
    out
}

trait IsZero {
    fn is_zero_value(&self) -> bool;
}

impl IsZero for i128 {
    fn is_zero_value(&self) -> bool {
        *self == 0
    }
}

impl IsZero for Rational {
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

/// Matrix of the substitution `w_j ↦ Σ_k M[k][j] w_k` on degree-`d`
/// polynomials: column `m` holds the coordinates of the image of monomial `m`.
///
/// With this convention `action(M1·M2) = action(M1)·action(M2)`.
pub fn action_on_degree(m: &RationalMatrix, d: usize) -> RationalMatrix {
    let n = m.rows();
    assert_eq!(n, m.cols(), "action of a non-square matrix");
    let basis = MonomialBasis::new(n, d);
    let forms: Vec<Poly<Rational>> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&k| !m[(k, j)].is_zero())
                .map(|k| {
                    let mut e = vec![0u8; n];
                    e[k] = 1;
                    (e, m[(k, j)].clone())
                })
                .collect()
        })
        .collect();
    let size = basis.len();
    let mut out = RationalMatrix::zeros(size, size);
    for (col, mono) in basis.monomials().iter().enumerate() {
        let mut p: Poly<Rational> = HashMap::from([(vec![0u8; n], Rational::one())]);
        for (j, &e) in mono.iter().enumerate() {
            for _ in 0..e {
                p = poly_mul(&p, &forms[j]);
            }
        }
        for (e, c) in p {
            out[(basis.index_of(&e).expect("degree preserved"), col)] = c;
        }
    }
    out
}

fn to_rational(x: i128) -> Rational {
    match i64::try_from(x) {
        Ok(v) => Rational::from(v),
        Err(_) => Rational::from(BigInt::from(x)),
    }
}

/// Sparse integer columns of one reflection on one degree.
type SparseAction = Vec<Vec<(usize, i128)>>;

/// `P_J` pieces for one Cartan matrix, memoized on `(J, d)`.
///
/// Safe to share across threads; a key computed twice concurrently yields the
/// same canonical basis.
pub struct InvariantEngine {
    a: CartanMatrix,
    bases: RwLock<HashMap<usize, Arc<MonomialBasis>>>,
    /// Sparse integer columns of `σ_j` acting on degree `d`.
    actions: RwLock<HashMap<(usize, usize), Arc<SparseAction>>>,
    pieces: RwLock<HashMap<(IndexSet, usize), Arc<SubspaceBasis>>>,
}

impl InvariantEngine {
    pub fn new(a: CartanMatrix) -> Self {
        InvariantEngine {
            a,
            bases: RwLock::new(HashMap::new()),
            actions: RwLock::new(HashMap::new()),
            pieces: RwLock::new(HashMap::new()),
        }
    }

    pub fn matrix(&self) -> &CartanMatrix {
        &self.a
    }

    pub fn rank(&self) -> usize {
        self.a.rank()
    }

    pub fn basis(&self, d: usize) -> Arc<MonomialBasis> {
        if let Some(b) = self.bases.read().unwrap().get(&d) {
            return b.clone();
        }
        let b = Arc::new(MonomialBasis::new(self.a.rank(), d));
        self.bases.write().unwrap().entry(d).or_insert(b).clone()
    }

    /// Ambient dimension at polynomial degree `d`.
    pub fn ambient_dim(&self, d: usize) -> usize {
        monomial_count(self.a.rank(), d)
    }

    /// Coefficients of `σ_j(w_j) = −w_j + Σ_{k≠j} (−a_kj) w_k`.
    fn image_of_weight(&self, j: usize) -> Poly<i128> {
        let n = self.a.rank();
        (0..n)
            .filter_map(|k| {
                let c = if k == j { -1 } else { -self.a.get(k, j) as i128 };
                (c != 0).then(|| {
                    let mut e = vec![0u8; n];
                    e[k] = 1;
                    (e, c)
                })
            })
            .collect()
    }

    fn reflection_action(&self, j: usize, d: usize) -> Arc<SparseAction> {
        if let Some(t) = self.actions.read().unwrap().get(&(j, d)) {
            return t.clone();
        }
        let basis = self.basis(d);
        let form = self.image_of_weight(j);
        let n = self.a.rank();
        let mut powers: Vec<Poly<i128>> = vec![HashMap::from([(vec![0u8; n], 1i128)])];
        for e in 1..=d {
            let next = poly_mul(&powers[e - 1], &form);
            powers.push(next);
        }
        let cols: Vec<Vec<(usize, i128)>> = basis
            .monomials()
            .iter()
            .map(|mono| {
                let mut rest = mono.clone();
                rest[j] = 0;
                let mut col: Vec<(usize, i128)> = powers[mono[j] as usize]
                    .iter()
                    .map(|(e, &c)| {
                        let full: Vec<u8> = e.iter().zip(&rest).map(|(x, y)| x + y).collect();
                        (basis.index_of(&full).expect("degree preserved"), c)
                    })
                    .collect();
                col.sort_unstable_by_key(|&(i, _)| i);
                col
            })
            .collect();
        let t = Arc::new(cols);
        self.actions.write().unwrap().entry((j, d)).or_insert(t).clone()
    }

    /// Explicit basis of the fixed space of one reflection: with
    /// `u = 2w_j − β` we have `σ_j(u) = −u`, so the invariants are spanned by
    /// monomials in the other weights times even powers of `u`.
    fn single_fixed(&self, j: usize, d: usize) -> SubspaceBasis {
        let n = self.a.rank();
        let basis = self.basis(d);
        let mut u: Poly<i128> = self.image_of_weight(j);
        for (e, c) in u.iter_mut() {
            if e[j] == 1 {
                *c = 2;
            } else {
                *c = -*c;
            }
        }
        let u_sq = poly_mul(&u, &u);
        let mut u_powers: Vec<Poly<i128>> = vec![HashMap::from([(vec![0u8; n], 1i128)])];
        for m in 1..=d / 2 {
            let next = poly_mul(&u_powers[m - 1], &u_sq);
            u_powers.push(next);
        }
        // Monomials of degree d − 2m avoiding w_j, each multiplied by u^{2m}.
        let rest_bases: Vec<MonomialBasis> = (0..=d / 2).map(|m| MonomialBasis::new(n, d - 2 * m)).collect();
        let mut spanning = Vec::new();
        for (m, up) in u_powers.iter().enumerate() {
            for rest in rest_bases[m].monomials() {
                if rest[j] != 0 {
                    continue;
                }
                let mut v = vec![Rational::zero(); basis.len()];
                for (e, &c) in up {
                    let full: Vec<u8> = e.iter().zip(rest).map(|(x, y)| x + y).collect();
                    v[basis.index_of(&full).expect("degree d")] = to_rational(c);
                }
                spanning.push(v);
            }
        }
        SubspaceBasis::from_spanning(basis.len(), spanning)
    }

    /// `P_J` at polynomial degree `d`.
    pub fn piece(&self, subset: IndexSet, d: usize) -> Arc<SubspaceBasis> {
        if let Some(p) = self.pieces.read().unwrap().get(&(subset, d)) {
            return p.clone();
        }
        let result = self.compute_piece(subset, d);
        let result = Arc::new(result);
        self.pieces.write().unwrap().entry((subset, d)).or_insert(result).clone()
    }

    fn compute_piece(&self, subset: IndexSet, d: usize) -> SubspaceBasis {
        let members = subset.members();
        let ambient = self.ambient_dim(d);
        match members.len() {
            0 => SubspaceBasis::full(ambient),
            1 => self.single_fixed(members[0], d),
            _ => {
                let j = *members.last().unwrap();
                let parent = self.piece(subset.remove(j), d);
                self.restrict(&parent, j, d)
            }
        }
    }

    /// Vectors of `space` fixed by `σ_j`.
    fn restrict(&self, space: &SubspaceBasis, j: usize, d: usize) -> SubspaceBasis {
        let ambient = space.ambient_dim();
        if space.is_zero() {
            return space.clone();
        }
        let action = self.reflection_action(j, d);
        let k = space.dim();
        // Column c of `diff` is σ_j(v_c) − v_c.
        let mut diff = RationalMatrix::zeros(ambient, k);
        for (c, v) in space.vectors().iter().enumerate() {
            for (m, coeff) in v.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                for &(row, t) in action[m].iter() {
                    let p = coeff * &to_rational(t);
                    diff[(row, c)] += &p;
                }
                diff[(m, c)] -= coeff;
            }
        }
        let combos = kernel_basis(&diff);
        if combos.dim() == k {
            return space.clone();
        }
        let basis = space.basis();
        let vectors: Vec<Vec<Rational>> = combos
            .vectors()
            .into_iter()
            .map(|x| {
                let mut v = vec![Rational::zero(); ambient];
                for (c, xc) in x.iter().enumerate() {
                    if xc.is_zero() {
                        continue;
                    }
                    for (vi, b) in v.iter_mut().zip(basis.row(c)) {
                        if !b.is_zero() {
                            vi.sub_mul(&-xc, b);
                        }
                    }
                }
                v
            })
            .collect();
        SubspaceBasis::from_spanning(ambient, vectors)
    }

    /// Oracle path: joint kernel of the stacked `action(σ_i) − I`, no shortcuts.
    pub fn piece_direct(&self, subset: IndexSet, d: usize) -> SubspaceBasis {
        let ambient = self.ambient_dim(d);
        let mut stacked = RationalMatrix::zeros(0, ambient);
        for i in subset.members() {
            let r = crate::weyl::reflection_matrix(&self.a, i).expect("index in range");
            let t = action_on_degree(&r.matrix, d).sub(&RationalMatrix::identity(ambient)).expect("square");
            stacked = stacked.vstack(&t).expect("same width");
        }
        kernel_basis(&stacked)
    }

    /// `P_J` for polynomial degrees `0..=max_degree`, computed in parallel.
    pub fn subspace(&self, subset: IndexSet, max_degree: usize) -> GradedSubspace {
        let pieces: Vec<Arc<SubspaceBasis>> = (0..=max_degree).into_par_iter().map(|d| self.piece(subset, d)).collect();
        GradedSubspace { n: self.a.rank(), subset, pieces }
    }

    /// `dim P_J` at polynomial degrees `0..=max_degree`.
    pub fn dims(&self, subset: IndexSet, max_degree: usize) -> Vec<usize> {
        self.subspace(subset, max_degree).dims()
    }
}

/// `P_J` degree by degree; `pieces[d]` lives in the degree-`d` monomial coordinates.
#[derive(Clone, Debug)]
pub struct GradedSubspace {
    pub n: usize,
    pub subset: IndexSet,
    pub pieces: Vec<Arc<SubspaceBasis>>,
}

impl GradedSubspace {
    pub fn computed_through(&self) -> usize {
        self.pieces.len().saturating_sub(1)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.dim()).collect()
    }
}

/// Uncached convenience for a single piece.
pub fn invariant_piece(a: &CartanMatrix, subset: IndexSet, d: usize) -> SubspaceBasis {
    InvariantEngine::new(a.clone()).piece(subset, d).as_ref().clone()
}

pub fn invariant_subspace(a: &CartanMatrix, subset: IndexSet, max_degree: usize) -> GradedSubspace {
    InvariantEngine::new(a.clone()).subspace(subset, max_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{enumerate_subgroup, DEFAULT_ORDER_CAP};
    use proptest::prelude::*;

    fn cm(rows: &[&[i64]]) -> CartanMatrix {
        CartanMatrix::validate(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_members(v.iter().map(|i| i - 1))
    }

    #[test]
    fn monomial_basis_order_and_size() {
        let b = MonomialBasis::new(2, 2);
        assert_eq!(b.monomials(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(MonomialBasis::new(4, 12).len(), 455);
        for n in 1..5 {
            for d in 0..7 {
                assert_eq!(MonomialBasis::new(n, d).len(), monomial_count(n, d));
            }
        }
    }

    #[test]
    fn action_examples() {
        let m = RationalMatrix::from_i64_rows(&[vec![-1, 0], vec![1, 1]]);
        assert_eq!(action_on_degree(&m, 0), RationalMatrix::identity(1));
        assert_eq!(action_on_degree(&m, 1), m);
        // columns: (−w1+w2)², (−w1+w2)w2, w2²
        let expected = RationalMatrix::from_i64_rows(&[vec![1, 0, 0], vec![-2, -1, 0], vec![1, 1, 1]]);
        let t = action_on_degree(&m, 2);
        assert_eq!(t, expected);
        assert_eq!(t.mul(&t).unwrap(), RationalMatrix::identity(3));
    }

    #[test]
    fn sparse_action_agrees_with_generic() {
        let a = cm(&[&[2, -1, -3], &[-3, 2, -2], &[-2, -2, 2]]);
        let engine = InvariantEngine::new(a.clone());
        for j in 0..3 {
            let r = crate::weyl::reflection_matrix(&a, j).unwrap();
            for d in 0..5 {
                let generic = action_on_degree(&r.matrix, d);
                let sparse = engine.reflection_action(j, d);
                let mut dense = RationalMatrix::zeros(generic.rows(), generic.cols());
                for (c, col) in sparse.iter().enumerate() {
                    for &(row, v) in col {
                        dense[(row, c)] = to_rational(v);
                    }
                }
                assert_eq!(dense, generic);
            }
        }
    }

    #[test]
    fn invariant_examples() {
        let a2 = cm(&[&[2, -1], &[-1, 2]]);
        let e = InvariantEngine::new(a2);
        for d in 0..6 {
            assert_eq!(e.piece(IndexSet::EMPTY, d).dim(), d + 1);
        }
        assert_eq!(e.dims(set(&[1]), 4), vec![1, 1, 2, 2, 3]);
        assert_eq!(e.dims(set(&[1, 2]), 6), vec![1, 0, 1, 1, 1, 1, 2]);
    }

    #[test]
    fn affine_rank_three_has_the_quadratic_form() {
        let affine = cm(&[&[2, -1, -1], &[-1, 2, -1], &[-1, -1, 2]]);
        let e = InvariantEngine::new(affine.clone());
        let full = affine.index_set();
        assert_eq!(&e.dims(full, 1), &[1, 0]);
        // Σ a_ij w_i w_j is fixed by every σ_i for symmetric A.
        let basis = e.basis(2);
        let mut q = vec![Rational::zero(); basis.len()];
        for i in 0..3 {
            for j in 0..3 {
                let mut exps = vec![0u8; 3];
                exps[i] += 1;
                exps[j] += 1;
                q[basis.index_of(&exps).unwrap()] += &Rational::from(affine.get(i, j));
            }
        }
        assert!(e.piece(full, 2).contains_vector(&q));
        assert_eq!(e.piece(full, 2).dim(), 1);
    }

    #[test]
    fn fast_path_matches_direct_solve() {
        for a in [
            cm(&[&[2, -1, -1], &[-1, 2, -1], &[-1, -1, 2]]),
            cm(&[&[2, -1, -3], &[-3, 2, -2], &[-2, -2, 2]]),
            cm(&[&[2, -2, 0], &[-1, 2, -1], &[0, -1, 2]]),
        ] {
            let e = InvariantEngine::new(a);
            for bits in 0..8 {
                let s = IndexSet::from_bits(bits);
                for d in 0..6 {
                    assert_eq!(*e.piece(s, d), e.piece_direct(s, d), "J={s:?} d={d}");
                }
            }
        }
    }

    #[test]
    fn generators_suffice_for_finite_subgroups() {
        let a = cm(&[&[2, -1, -3], &[-3, 2, -2], &[-2, -2, 2]]);
        let e = InvariantEngine::new(a.clone());
        let s = set(&[1, 2]);
        let w = enumerate_subgroup(&a, s, DEFAULT_ORDER_CAP).unwrap();
        for d in 0..5 {
            let ambient = e.ambient_dim(d);
            let mut stacked = RationalMatrix::zeros(0, ambient);
            for k in 0..w.order() {
                let t = action_on_degree(&w.element(k), d).sub(&RationalMatrix::identity(ambient)).unwrap();
                stacked = stacked.vstack(&t).unwrap();
            }
            assert_eq!(kernel_basis(&stacked), *e.piece(s, d));
        }
    }

    #[test]
    fn molien_agreement_on_finite_subsets() {
        let a = cm(&[&[2, -1, 0, 0], &[-1, 2, -2, 0], &[0, -1, 2, -1], &[0, 0, -1, 2]]);
        let e = InvariantEngine::new(a.clone());
        for s in a.finite_subsets().simplices.iter().chain([&a.index_set()]) {
            let w = enumerate_subgroup(&a, *s, DEFAULT_ORDER_CAP).unwrap();
            assert_eq!(e.dims(*s, 8), w.molien_dims(8), "J={s:?}");
        }
    }

    fn arb_matrix() -> impl Strategy<Value = CartanMatrix> {
        proptest::collection::vec((0i64..=3, 0i64..=3), 3).prop_map(|p| {
            let mut m = vec![vec![2i64, 0, 0], vec![0, 2, 0], vec![0, 0, 2]];
            for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
                let (x, y) = p[k];
                if x != 0 && y != 0 {
                    m[i][j] = -x;
                    m[j][i] = -y;
                }
            }
            CartanMatrix::validate(&m).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn action_is_functorial(a in arb_matrix(), i in 0usize..3, j in 0usize..3, d in 0usize..4) {
            let mi = crate::weyl::reflection_matrix(&a, i).unwrap().matrix;
            let mj = crate::weyl::reflection_matrix(&a, j).unwrap().matrix;
            let lhs = action_on_degree(&mi.mul(&mj).unwrap(), d);
            let rhs = action_on_degree(&mi, d).mul(&action_on_degree(&mj, d)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn intersection_law_and_monotonicity(a in arb_matrix(), j in 0u32..8, k in 0u32..8, d in 0usize..5) {
            let e = InvariantEngine::new(a);
            let (pj, pk) = (IndexSet::from_bits(j), IndexSet::from_bits(k));
            let meet = e.piece(pj, d).intersect(&e.piece(pk, d)).unwrap();
            let joint = e.piece(pj.union(pk), d);
            prop_assert_eq!(&meet, joint.as_ref());
            prop_assert!(e.piece(pj, d).contains(&e.piece(pj.union(pk), d)).unwrap());
        }
    }
}

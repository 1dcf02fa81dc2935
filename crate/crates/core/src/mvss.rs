//! The inductive item algorithm: from ordered maximal simplices
//! `I_1, …, I_d` produce the `2^{d-1}` items whose graded dimensions add up to
//! `H*(BG(A); Q)`, then evaluate them. Also hosts the change-of-basis solver,
//! the sum-of-invariants probe and the two-way Borel image computation.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cartan::{CartanMatrix, IndexSet};
use crate::exactlin::{Rational, RationalMatrix, SubspaceBasis};
use crate::gradedlat::{DimensionTable, Evaluator, Item, LatticeError, LatticeExpr};
use crate::invariants::InvariantEngine;
use crate::weyl::reflection_matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MvssError {
    #[error("matrix is of finite type: H*(BG(A);Q) is the invariant ring P^W(A); use the `invariants` command on the full index set")]
    FiniteTypeInput,
    #[error("empty simplex order")]
    EmptyOrder,
    #[error("order is not a permutation of the maximal simplices {expected:?}")]
    BadOrder { expected: Vec<IndexSet> },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("Borel image mismatch at polynomial degree {degree}: joint fixed points dim {joint}, intersection dim {intersection}")]
    MethodMismatch { degree: usize, joint: usize, intersection: usize },
}

/// Items in canonical order (descending shift, then creation order); the
/// unsuspended final item is last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItemList {
    pub items: Vec<Item>,
}

impl ItemList {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn final_item(&self) -> &Item {
        self.items.last().expect("non-empty")
    }

    /// Items that are not zero for a syntactic reason, as strings.
    pub fn nontrivial_strings(&self) -> Vec<String> {
        self.items.iter().filter(|i| !i.is_trivially_zero()).map(Item::to_string).collect()
    }
}

/// Runs the recurrence on simplices in the given order. Needs `d ≥ 1`;
/// for `d = 1` the single item is `P_{I_1}`.
pub fn run_algorithm(order: &[IndexSet]) -> Result<ItemList, MvssError> {
    let (first, rest) = order.split_first().ok_or(MvssError::EmptyOrder)?;
    let mut items: Vec<Item> = Vec::new();
    let mut union = *first;
    for &k in rest {
        let mut next = Vec::with_capacity(2 * items.len() + 1);
        for item in &items {
            let a = &item.numerator;
            let b = item.denominator.as_ref().expect("non-final items are quotients");
            let a_bar = a.bar_substitute(k);
            let b_bar = b.bar_substitute(k);
            next.push(Item::quotient(item.shift, LatticeExpr::Intersect(vec![a.clone(), b_bar.clone()]), b.clone()));
            next.push(Item::quotient(item.shift + 1, a_bar, LatticeExpr::Sum(vec![b_bar, a.clone()])));
        }
        let final_bar = LatticeExpr::atom(union.intersection(k));
        next.push(Item::quotient(1, final_bar, LatticeExpr::Sum(vec![LatticeExpr::atom(union), LatticeExpr::atom(k)])));
        next.sort_by_key(|x| std::cmp::Reverse(x.shift));
        items = next;
        union = union.union(k);
    }
    items.push(Item::plain(LatticeExpr::atom(union)));
    Ok(ItemList { items })
}

/// Checks that `order` is a permutation of the maximal simplices of `a`, or
/// returns the default lexicographic order.
pub fn resolve_order(a: &CartanMatrix, order: Option<&[IndexSet]>) -> Result<Vec<IndexSet>, MvssError> {
    if a.classify().is_finite() {
        return Err(MvssError::FiniteTypeInput);
    }
    let maximal = a.finite_subsets().maximal;
    match order {
        None => Ok(maximal),
        Some(o) => {
            let mut sorted = o.to_vec();
            sorted.sort();
            if sorted != maximal {
                return Err(MvssError::BadOrder { expected: maximal });
            }
            Ok(o.to_vec())
        }
    }
}

#[derive(Clone, Debug)]
pub struct ItemResult {
    pub item: Item,
    pub dims: DimensionTable,
    /// Vanishes at every evaluated degree; not a proof of vanishing.
    pub zero_up_to_cutoff: bool,
    pub trivially_zero: bool,
}

#[derive(Clone, Debug)]
pub struct CohomologyResult {
    pub order_used: Vec<IndexSet>,
    pub max_degree: usize,
    pub items: Vec<ItemResult>,
    pub total: DimensionTable,
    pub by_shift: BTreeMap<usize, DimensionTable>,
}

impl CohomologyResult {
    pub fn shift_table(&self, r: usize) -> DimensionTable {
        self.by_shift.get(&r).cloned().unwrap_or_else(|| DimensionTable::zeros(self.max_degree))
    }
}

/// Items and their tables through cohomological degree `max_degree`.
pub fn cohomology(a: &CartanMatrix, max_degree: usize, order: Option<&[IndexSet]>) -> Result<CohomologyResult, MvssError> {
    let engine = Arc::new(InvariantEngine::new(a.clone()));
    cohomology_with(&engine, max_degree, order)
}

pub fn cohomology_with(engine: &Arc<InvariantEngine>, max_degree: usize, order: Option<&[IndexSet]>) -> Result<CohomologyResult, MvssError> {
    let order_used = resolve_order(engine.matrix(), order)?;
    let list = run_algorithm(&order_used)?;
    let evaluator = Evaluator::new(engine.clone());
    let jobs: Vec<(usize, usize)> = list
        .items
        .iter()
        .enumerate()
        .flat_map(|(k, item)| (0..).take_while(move |d| 2 * d + item.shift <= max_degree).map(move |d| (k, d)))
        .collect();
    let values: Vec<((usize, usize), usize)> = jobs
        .into_par_iter()
        .map(|(k, d)| evaluator.item_dim(&list.items[k], d).map(|v| ((k, d), v)))
        .collect::<Result<_, _>>()?;
    let mut tables: Vec<DimensionTable> = vec![DimensionTable::zeros(max_degree); list.len()];
    for ((k, d), v) in values {
        tables[k].0[2 * d + list.items[k].shift] = v;
    }
    let mut total = DimensionTable::zeros(max_degree);
    let mut by_shift: BTreeMap<usize, DimensionTable> = BTreeMap::new();
    let mut items = Vec::with_capacity(list.len());
    for (item, dims) in list.items.into_iter().zip(tables) {
        total.add_assign(&dims);
        by_shift.entry(item.shift).or_insert_with(|| DimensionTable::zeros(max_degree)).add_assign(&dims);
        items.push(ItemResult { zero_up_to_cutoff: dims.is_zero(), trivially_zero: item.is_trivially_zero(), item, dims });
    }
    Ok(CohomologyResult { order_used, max_degree, items, total, by_shift })
}

/// Solution `C` of `X·A_I = A_{JI}` (`J = S∖I`), with the verification that
/// the new weight basis makes every `σ_i, i ∈ I`, block diagonal.
#[derive(Clone, Debug)]
pub struct ChangeOfBasis {
    pub subset: IndexSet,
    pub complement: IndexSet,
    /// `|J| × |I|`.
    pub c: RationalMatrix,
    /// Lower-left blocks of the conjugated generators all vanish.
    pub block_triangular: bool,
}

pub fn prop51_change_of_basis(a: &CartanMatrix, subset: IndexSet) -> Option<ChangeOfBasis> {
    let n = a.rank();
    let i_idx = subset.members();
    let complement = a.index_set().difference(subset);
    let j_idx = complement.members();
    let full = a.to_rational();
    let a_i = full.select(&i_idx, &i_idx);
    let a_ji = full.select(&j_idx, &i_idx);
    // Row j of X solves x·A_I = row j of A_JI, i.e. A_I^T x^T = (row j)^T.
    let a_i_t = a_i.transpose();
    let mut rows = Vec::with_capacity(j_idx.len());
    for r in 0..j_idx.len() {
        rows.push(a_i_t.solve(a_ji.row(r))?);
    }
    let c = RationalMatrix::from_rows(i_idx.len(), rows);
    debug_assert_eq!(c.mul(&a_i).unwrap(), a_ji);

    // Q = [[I, 0], [C, I]] in the (I, J) ordering of the weights.
    let perm: Vec<usize> = i_idx.iter().chain(&j_idx).copied().collect();
    let p = i_idx.len();
    let mut q = RationalMatrix::identity(n);
    let mut q_inv = RationalMatrix::identity(n);
    for r in 0..j_idx.len() {
        for s in 0..p {
            q[(p + r, s)] = c[(r, s)].clone();
            q_inv[(p + r, s)] = -&c[(r, s)];
        }
    }
    let block_triangular = i_idx.iter().all(|&i| {
        let m = reflection_matrix(a, i).expect("in range").matrix.select(&perm, &perm);
        let conj = q_inv.mul(&m).unwrap().mul(&q).unwrap();
        (p..n).all(|r| (0..p).all(|s| conj[(r, s)].is_zero()))
    });
    Some(ChangeOfBasis { subset, complement, c, block_triangular })
}

/// Predicted `dim P_I` sequence: invariants of `A_I` in `|I|` variables
/// convolved with all polynomials in the remaining `n − |I|` variables.
pub fn prop51_predicted_dims(a: &CartanMatrix, subset: IndexSet, max_poly_degree: usize) -> Vec<usize> {
    let rest = a.rank() - subset.len();
    let inner: Vec<usize> = match a.submatrix(subset) {
        None => (0..=max_poly_degree).map(|d| usize::from(d == 0)).collect(),
        Some(sub) => {
            let full = sub.index_set();
            InvariantEngine::new(sub).dims(full, max_poly_degree)
        }
    };
    (0..=max_poly_degree)
        .map(|d| (0..=d).map(|k| inner[k] * crate::invariants::monomial_count(rest, d - k)).sum())
        .collect()
}

/// `dim P_d − dim (P_1 + … + P_n)_d` for `d = 0..=max_poly_degree`.
pub fn conjecture_sum_check(a: &CartanMatrix, max_poly_degree: usize) -> Vec<usize> {
    let engine = InvariantEngine::new(a.clone());
    conjecture_sum_check_with(&engine, max_poly_degree)
}

pub fn conjecture_sum_check_with(engine: &InvariantEngine, max_poly_degree: usize) -> Vec<usize> {
    let n = engine.rank();
    (0..=max_poly_degree)
        .into_par_iter()
        .map(|d| {
            let mut acc = SubspaceBasis::zero(engine.ambient_dim(d));
            for i in 0..n {
                acc = acc.sum(&engine.piece(IndexSet::singleton(i), d)).expect("shared ambient");
            }
            engine.ambient_dim(d) - acc.dim()
        })
        .collect()
}

/// `P^{W(A)}` computed as joint generator fixed points and as the
/// intersection of the `P_{I_i}` over maximal simplices; the two must agree.
pub fn borel_image_dims(a: &CartanMatrix, max_degree: usize) -> Result<DimensionTable, MvssError> {
    if a.classify().is_finite() {
        return Err(MvssError::FiniteTypeInput);
    }
    let engine = InvariantEngine::new(a.clone());
    let maximal = a.finite_subsets().maximal;
    let full = a.index_set();
    let dims: Vec<usize> = (0..=max_degree / 2)
        .into_par_iter()
        .map(|d| {
            let joint = engine.piece(full, d);
            let mut meet = engine.piece(maximal[0], d).as_ref().clone();
            for s in &maximal[1..] {
                meet = meet.intersect(&engine.piece(*s, d)).expect("shared ambient");
            }
            if meet != *joint {
                return Err(MvssError::MethodMismatch { degree: d, joint: joint.dim(), intersection: meet.dim() });
            }
            Ok(joint.dim())
        })
        .collect::<Result<_, _>>()?;
    Ok(DimensionTable::from_polynomial(&dims, 0, max_degree))
}

/// Exact rational entries of a change-of-basis matrix, as strings.
pub fn format_matrix(m: &RationalMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(Rational::to_string).collect()).collect()
}

//! Simple reflections on the fundamental-weight basis, finite Weyl subgroups
//! by breadth-first closure, and Molien series.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use crate::cartan::{CartanMatrix, IndexSet};
use crate::exactlin::RationalMatrix;

pub const DEFAULT_ORDER_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("generator index {index} out of range for rank {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("group generated by {subset:?} has more than {cap} elements")]
    CapExceeded { subset: IndexSet, cap: usize },
    #[error("subset {subset:?} is not of finite type; its Weyl group is infinite")]
    NotFiniteType { subset: IndexSet },
}

/// `σ_i` as an `n×n` matrix whose column `j` holds the coordinates of `σ_i(w_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionMatrix {
    pub index: usize,
    pub matrix: RationalMatrix,
}

/// Integer entries of `σ_i`, row-major. Column `i` is `e_i − A_{·i}`.
pub fn reflection_entries(a: &CartanMatrix, i: usize) -> Vec<i64> {
    let n = a.rank();
    let mut m = vec![0i64; n * n];
    for k in 0..n {
        m[k * n + k] = 1;
        m[k * n + i] -= a.get(k, i);
    }
    m
}

/// `i` is 0-based here.
pub fn reflection_matrix(a: &CartanMatrix, i: usize) -> Result<ReflectionMatrix, WeylError> {
    let n = a.rank();
    if i >= n {
        return Err(WeylError::IndexOutOfRange { index: i + 1, n });
    }
    let e = reflection_entries(a, i);
    let rows: Vec<Vec<i64>> = e.chunks(n).map(<[i64]>::to_vec).collect();
    let matrix = RationalMatrix::from_i64_rows(&rows);
    let sq = matrix.mul(&matrix).expect("square");
    assert_eq!(sq, RationalMatrix::identity(n), "reflection is not an involution");
    Ok(ReflectionMatrix { index: i, matrix })
}

/// A fully enumerated finite subgroup `W_J`, elements as integer `n×n`
/// matrices in row-major order (first element is the identity).
#[derive(Clone, Debug)]
pub struct WeylSubgroup {
    pub generators: IndexSet,
    pub n: usize,
    pub elements: Vec<Vec<i64>>,
}

impl WeylSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, k: usize) -> RationalMatrix {
        let rows: Vec<Vec<i64>> = self.elements[k].chunks(self.n).map(<[i64]>::to_vec).collect();
        RationalMatrix::from_i64_rows(&rows)
    }

    /// Coefficients through polynomial degree `max_degree` of the Molien series
    /// `(1/|W|) Σ_g 1/det(I − t·g)`.
    pub fn molien_dims(&self, max_degree: usize) -> Vec<usize> {
        let n = self.n;
        let mut polys: HashMap<Vec<i128>, u64> = HashMap::new();
        let chars: Vec<Vec<i128>> = self.elements.par_iter().map(|g| det_one_minus_tg(g, n)).collect();
        for c in chars {
            *polys.entry(c).or_insert(0) += 1;
        }
        let mut total = vec![0i128; max_degree + 1];
        for (c, count) in polys {
            let series = invert_series(&c, max_degree);
            for (t, s) in total.iter_mut().zip(series) {
                *t += s * count as i128;
            }
        }
        let order = self.order() as i128;
        total
            .into_iter()
            .map(|t| {
                assert_eq!(t % order, 0, "Molien coefficient not integral");
                usize::try_from(t / order).expect("negative Molien coefficient")
            })
            .collect()
    }
}

/// Breadth-first closure of the generators `σ_j, j ∈ J`.
pub fn enumerate_subgroup(a: &CartanMatrix, subset: IndexSet, cap: usize) -> Result<WeylSubgroup, WeylError> {
    let n = a.rank();
    if let Some(&bad) = subset.members().iter().find(|&&i| i >= n) {
        return Err(WeylError::IndexOutOfRange { index: bad + 1, n });
    }
    if !a.is_finite_subset(subset) {
        return Err(WeylError::NotFiniteType { subset });
    }
    let gens: Vec<Vec<i64>> = subset.members().into_iter().map(|i| reflection_entries(a, i)).collect();
    let mut identity = vec![0i64; n * n];
    for k in 0..n {
        identity[k * n + k] = 1;
    }
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    seen.insert(identity.clone());
    let mut elements = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let h = mul_int(&g, s, n);
            if seen.insert(h.clone()) {
                if elements.len() >= cap {
                    return Err(WeylError::CapExceeded { subset, cap });
                }
                elements.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(WeylSubgroup { generators: subset, n, elements })
}

fn mul_int(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

/// Coefficients `[1, c_1, …, c_n]` of `det(I − t·g)`, by Faddeev–LeVerrier.
fn det_one_minus_tg(g: &[i64], n: usize) -> Vec<i128> {
    let g: Vec<i128> = g.iter().map(|&x| x as i128).collect();
    let mut c = vec![1i128];
    let mut m = vec![0i128; n * n];
    for k in 1..=n {
        // M_k = g·M_{k-1} + c_{k-1}·I
        let mut next = vec![0i128; n * n];
        for i in 0..n {
            for l in 0..n {
                let x = g[i * n + l];
                if x != 0 {
                    for j in 0..n {
                        next[i * n + j] += x * m[l * n + j];
                    }
                }
            }
            next[i * n + i] += c[k - 1];
        }
        m = next;
        let mut tr = 0i128;
        for i in 0..n {
            for l in 0..n {
                tr += g[i * n + l] * m[l * n + i];
            }
        }
        assert_eq!(tr % k as i128, 0);
        c.push(-tr / k as i128);
    }
    c
}

/// Power series of `1 / (c_0 + c_1 t + …)` with `c_0 = 1`, through degree `max_degree`.
fn invert_series(c: &[i128], max_degree: usize) -> Vec<i128> {
    let mut b = vec![0i128; max_degree + 1];
    b[0] = 1;
    for m in 1..=max_degree {
        let mut acc = 0i128;
        for k in 1..c.len().min(m + 1) {
            acc += c[k] * b[m - k];
        }
        b[m] = -acc;
    }
    b
}

pub fn molien_dims(w: &WeylSubgroup, max_degree: usize) -> Vec<usize> {
    w.molien_dims(max_degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: &[&[i64]]) -> CartanMatrix {
        CartanMatrix::validate(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn reflection_examples() {
        let a2 = cm(&[&[2, -1], &[-1, 2]]);
        assert_eq!(reflection_matrix(&a2, 0).unwrap().matrix, RationalMatrix::from_i64_rows(&[vec![-1, 0], vec![1, 1]]));
        let aff = cm(&[&[2, -2], &[-2, 2]]);
        assert_eq!(reflection_matrix(&aff, 1).unwrap().matrix, RationalMatrix::from_i64_rows(&[vec![1, 2], vec![0, -1]]));
        assert!(matches!(reflection_matrix(&a2, 2), Err(WeylError::IndexOutOfRange { index: 3, n: 2 })));
    }

    #[test]
    fn rank_two_orders() {
        for (a12, a21, order) in [(1, 1, 6), (2, 1, 8), (1, 2, 8), (3, 1, 12), (1, 3, 12)] {
            let a = cm(&[&[2, -a12], &[-a21, 2]]);
            let w = enumerate_subgroup(&a, a.index_set(), DEFAULT_ORDER_CAP).unwrap();
            assert_eq!(w.order(), order);
            assert_eq!(a.dynkin_type().unwrap()[0].weyl_order(), order as u64);
        }
        let a = cm(&[&[2, -1], &[-1, 2]]);
        assert_eq!(enumerate_subgroup(&a, IndexSet::EMPTY, 10).unwrap().order(), 1);
    }

    #[test]
    fn enumeration_errors() {
        let aff = cm(&[&[2, -2], &[-2, 2]]);
        assert!(matches!(enumerate_subgroup(&aff, aff.index_set(), 100), Err(WeylError::NotFiniteType { .. })));
        let a3 = cm(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert!(matches!(enumerate_subgroup(&a3, a3.index_set(), 10), Err(WeylError::CapExceeded { cap: 10, .. })));
    }

    #[test]
    fn group_is_closed_under_products_and_inverses() {
        let b3 = cm(&[&[2, -1, 0], &[-1, 2, -1], &[0, -2, 2]]);
        let w = enumerate_subgroup(&b3, b3.index_set(), DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(w.order(), 48);
        let set: HashSet<&Vec<i64>> = w.elements.iter().collect();
        let mut id = vec![0; 9];
        for k in 0..3 {
            id[k * 3 + k] = 1;
        }
        for g in &w.elements {
            assert!(w.elements.iter().any(|h| mul_int(g, h, 3) == id));
            for h in w.elements.iter().step_by(7) {
                assert!(set.contains(&mul_int(g, h, 3)));
            }
        }
    }

    #[test]
    fn molien_examples() {
        let a2 = cm(&[&[2, -1], &[-1, 2]]);
        let trivial = enumerate_subgroup(&a2, IndexSet::EMPTY, 10).unwrap();
        assert_eq!(trivial.molien_dims(4), vec![1, 2, 3, 4, 5]);
        let w1 = enumerate_subgroup(&a2, IndexSet::singleton(0), 10).unwrap();
        assert_eq!(w1.molien_dims(4), vec![1, 1, 2, 2, 3]);
        let w = enumerate_subgroup(&a2, a2.index_set(), 10).unwrap();
        assert_eq!(w.molien_dims(6), vec![1, 0, 1, 1, 1, 1, 2]);
    }

    #[test]
    fn molien_matches_fundamental_degrees() {
        // B3 invariants have degrees 2, 4, 6; G2 has 2, 6.
        let b3 = cm(&[&[2, -1, 0], &[-1, 2, -1], &[0, -2, 2]]);
        let w = enumerate_subgroup(&b3, b3.index_set(), DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(w.molien_dims(8), vec![1, 0, 1, 0, 2, 0, 3, 0, 4]);
        let g2 = cm(&[&[2, -1], &[-3, 2]]);
        let w = enumerate_subgroup(&g2, g2.index_set(), DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(w.molien_dims(8), vec![1, 0, 1, 0, 1, 0, 2, 0, 2]);
    }

    #[test]
    fn characteristic_polynomial_of_reflection() {
        let a2 = cm(&[&[2, -1], &[-1, 2]]);
        // eigenvalues 1, -1: det(I - tg) = 1 - t^2
        assert_eq!(det_one_minus_tg(&reflection_entries(&a2, 0), 2), vec![1, 0, -1]);
    }
}

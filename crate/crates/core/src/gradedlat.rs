//! Lattice expressions over the invariant subspaces `P_J`: sums,
//! intersections, quotients and suspensions, with canonical printing and
//! exact degreewise evaluation.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::cartan::IndexSet;
use crate::exactlin::SubspaceBasis;
use crate::invariants::InvariantEngine;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("denominator not contained in numerator for {item} at polynomial degree {degree} (numerator dim {num_dim}, denominator dim {den_dim})")]
    QuotientNotNested { item: String, degree: usize, num_dim: usize, den_dim: usize },
}

/// A quotient-free expression. Constructors return canonical forms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum LatticeExpr {
    /// `P_J`; the empty set is the whole ring `P`.
    Atom(IndexSet),
    Sum(Vec<LatticeExpr>),
    Intersect(Vec<LatticeExpr>),
}

impl LatticeExpr {
    pub fn atom(s: IndexSet) -> Self {
        LatticeExpr::Atom(s)
    }

    pub fn top() -> Self {
        LatticeExpr::Atom(IndexSet::EMPTY)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, LatticeExpr::Atom(s) if s.is_empty())
    }

    pub fn sum(children: Vec<LatticeExpr>) -> Self {
        LatticeExpr::Sum(children).canonical()
    }

    pub fn intersect(children: Vec<LatticeExpr>) -> Self {
        LatticeExpr::Intersect(children).canonical()
    }

    /// Index lists of the atoms in depth-first order; the primary sort key.
    pub fn leaves(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Vec<usize>>) {
        match self {
            LatticeExpr::Atom(s) => out.push(s.members()),
            LatticeExpr::Sum(c) | LatticeExpr::Intersect(c) => c.iter().for_each(|x| x.collect_leaves(out)),
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            LatticeExpr::Atom(_) => 0,
            LatticeExpr::Intersect(_) => 1,
            LatticeExpr::Sum(_) => 2,
        }
    }

    /// Flattens, merges atoms under `∩` (`P_J ∩ P_K = P_{J∪K}`), drops
    /// summands `P_J` when some `P_K` with `K ⊊ J` is present, lets `P`
    /// absorb sums, dedupes, collapses singletons and sorts children.
    pub fn canonical(self) -> Self {
        match self {
            LatticeExpr::Atom(_) => self,
            LatticeExpr::Sum(children) => {
                let mut flat = Vec::new();
                for c in children.into_iter().map(LatticeExpr::canonical) {
                    match c {
                        LatticeExpr::Sum(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                if flat.iter().any(LatticeExpr::is_top) {
                    return LatticeExpr::top();
                }
                let atoms: Vec<IndexSet> = flat
                    .iter()
                    .filter_map(|c| match c {
                        LatticeExpr::Atom(s) => Some(*s),
                        _ => None,
                    })
                    .collect();
                flat.retain(|c| match c {
                    LatticeExpr::Atom(j) => !atoms.iter().any(|k| k != j && k.is_subset(*j)),
                    _ => true,
                });
                finish(flat, LatticeExpr::Sum)
            }
            LatticeExpr::Intersect(children) => {
                let mut flat = Vec::new();
                for c in children.into_iter().map(LatticeExpr::canonical) {
                    match c {
                        LatticeExpr::Intersect(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                let mut merged: Option<IndexSet> = None;
                let mut rest = Vec::new();
                for c in flat {
                    match c {
                        LatticeExpr::Atom(s) => merged = Some(merged.unwrap_or(IndexSet::EMPTY).union(s)),
                        other => rest.push(other),
                    }
                }
                match merged {
                    Some(s) if !s.is_empty() || rest.is_empty() => rest.push(LatticeExpr::Atom(s)),
                    _ => {}
                }
                finish(rest, LatticeExpr::Intersect)
            }
        }
    }

    /// Replaces every `Atom(J)` by `Atom(J ∩ K)`, keeping the tree shape.
    pub fn bar_substitute(&self, k: IndexSet) -> Self {
        match self {
            LatticeExpr::Atom(s) => LatticeExpr::Atom(s.intersection(k)),
            LatticeExpr::Sum(c) => LatticeExpr::Sum(c.iter().map(|x| x.bar_substitute(k)).collect()),
            LatticeExpr::Intersect(c) => LatticeExpr::Intersect(c.iter().map(|x| x.bar_substitute(k)).collect()),
        }
    }

    /// Direct children of a sum, or the expression itself.
    pub fn summands(&self) -> Vec<&LatticeExpr> {
        match self {
            LatticeExpr::Sum(c) => c.iter().collect(),
            other => vec![other],
        }
    }
}

fn finish(mut children: Vec<LatticeExpr>, wrap: fn(Vec<LatticeExpr>) -> LatticeExpr) -> LatticeExpr {
    children.sort();
    children.dedup();
    if children.len() == 1 {
        children.pop().unwrap()
    } else {
        wrap(children)
    }
}

impl Ord for LatticeExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.leaves()
            .cmp(&other.leaves())
            .then_with(|| self.kind_rank().cmp(&other.kind_rank()))
            .then_with(|| match (self, other) {
                (LatticeExpr::Sum(a), LatticeExpr::Sum(b)) | (LatticeExpr::Intersect(a), LatticeExpr::Intersect(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for LatticeExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LatticeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeExpr::Atom(s) if s.is_empty() => f.write_str("P"),
            LatticeExpr::Atom(s) => write!(f, "P_{s}"),
            LatticeExpr::Sum(c) => {
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            LatticeExpr::Intersect(c) => {
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str("∩")?;
                    }
                    match x {
                        LatticeExpr::Sum(_) => write!(f, "({x})")?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// `Σ^shift(numerator − denominator)`; the denominator is absent only for the
/// unsuspended final item.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Item {
    pub shift: usize,
    pub numerator: LatticeExpr,
    pub denominator: Option<LatticeExpr>,
}

impl Item {
    pub fn quotient(shift: usize, numerator: LatticeExpr, denominator: LatticeExpr) -> Self {
        Item { shift, numerator: numerator.canonical(), denominator: Some(denominator.canonical()) }
    }

    pub fn plain(numerator: LatticeExpr) -> Self {
        Item { shift: 0, numerator: numerator.canonical(), denominator: None }
    }

    pub fn bar_substitute(&self, k: IndexSet) -> Self {
        Item {
            shift: self.shift,
            numerator: self.numerator.bar_substitute(k).canonical(),
            denominator: self.denominator.as_ref().map(|d| d.bar_substitute(k).canonical()),
        }
    }

    /// Zero for a syntactic reason: the denominator is `P`, equals the
    /// numerator, or has the numerator as a summand.
    pub fn is_trivially_zero(&self) -> bool {
        match &self.denominator {
            None => false,
            Some(den) => den.is_top() || *den == self.numerator || den.summands().contains(&&self.numerator),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = match &self.denominator {
            None => self.numerator.to_string(),
            Some(den @ LatticeExpr::Atom(_)) => format!("{} - {den}", self.numerator),
            Some(den) => format!("{} - ({den})", self.numerator),
        };
        match self.shift {
            0 => f.write_str(&body),
            1 => write!(f, "Σ({body})"),
            r => write!(f, "Σ^{r}({body})"),
        }
    }
}

/// Graded dimensions indexed by cohomological degree `0..=max_degree`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(transparent)]
pub struct DimensionTable(pub Vec<usize>);

impl DimensionTable {
    pub fn zeros(max_degree: usize) -> Self {
        DimensionTable(vec![0; max_degree + 1])
    }

    pub fn max_degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn get(&self, n: usize) -> usize {
        self.0.get(n).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add_assign(&mut self, other: &DimensionTable) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// Spreads polynomial-degree dims to cohomological degree `2d + shift`.
    pub fn from_polynomial(dims: &[usize], shift: usize, max_degree: usize) -> Self {
        let mut t = Self::zeros(max_degree);
        for (d, &v) in dims.iter().enumerate() {
            let n = 2 * d + shift;
            if n <= max_degree {
                t.0[n] = v;
            }
        }
        t
    }
}

/// Memoized evaluation of expressions against one invariant engine.
pub struct Evaluator {
    engine: Arc<InvariantEngine>,
    memo: RwLock<HashMap<(LatticeExpr, usize), Arc<SubspaceBasis>>>,
    use_memo: bool,
}

impl Evaluator {
    pub fn new(engine: Arc<InvariantEngine>) -> Self {
        Evaluator { engine, memo: RwLock::new(HashMap::new()), use_memo: true }
    }

    /// Evaluator that recomputes every subexpression.
    pub fn without_memo(engine: Arc<InvariantEngine>) -> Self {
        Evaluator { engine, memo: RwLock::new(HashMap::new()), use_memo: false }
    }

    pub fn engine(&self) -> &Arc<InvariantEngine> {
        &self.engine
    }

    /// The subspace an expression denotes at polynomial degree `d`.
    pub fn eval(&self, e: &LatticeExpr, d: usize) -> Arc<SubspaceBasis> {
        if let LatticeExpr::Atom(s) = e {
            return self.engine.piece(*s, d);
        }
        let key = (e.clone(), d);
        if self.use_memo {
            if let Some(v) = self.memo.read().unwrap().get(&key) {
                return v.clone();
            }
        }
        let value = match e {
            LatticeExpr::Atom(_) => unreachable!(),
            LatticeExpr::Sum(c) => fold(c, d, self, |a, b| a.sum(b)),
            LatticeExpr::Intersect(c) => fold(c, d, self, |a, b| a.intersect(b)),
        };
        let value = Arc::new(value);
        if self.use_memo {
            self.memo.write().unwrap().entry(key).or_insert(value).clone()
        } else {
            value
        }
    }

    /// `dim numerator − dim denominator` at polynomial degree `d`, after
    /// checking containment.
    pub fn item_dim(&self, item: &Item, d: usize) -> Result<usize, LatticeError> {
        let num = self.eval(&item.numerator, d);
        match &item.denominator {
            None => Ok(num.dim()),
            Some(den) => {
                let den = self.eval(den, d);
                if !num.contains(&den).expect("shared ambient space") {
                    return Err(LatticeError::QuotientNotNested {
                        item: item.to_string(),
                        degree: d,
                        num_dim: num.dim(),
                        den_dim: den.dim(),
                    });
                }
                Ok(num.dim() - den.dim())
            }
        }
    }

    /// Table indexed by cohomological degree; entry `2d + shift` is the
    /// quotient dimension at polynomial degree `d`.
    pub fn item_dims(&self, item: &Item, max_degree: usize) -> Result<DimensionTable, LatticeError> {
        let mut t = DimensionTable::zeros(max_degree);
        let mut d = 0;
        while 2 * d + item.shift <= max_degree {
            t.0[2 * d + item.shift] = self.item_dim(item, d)?;
            d += 1;
        }
        Ok(t)
    }
}

fn fold(children: &[LatticeExpr], d: usize, ev: &Evaluator, op: impl Fn(&SubspaceBasis, &SubspaceBasis) -> Result<SubspaceBasis, crate::exactlin::LinAlgError>) -> SubspaceBasis {
    let mut acc = ev.eval(&children[0], d).as_ref().clone();
    for c in &children[1..] {
        acc = op(&acc, &ev.eval(c, d)).expect("shared ambient space");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanMatrix;
    use proptest::prelude::*;

    fn s(v: &[usize]) -> IndexSet {
        IndexSet::from_members(v.iter().map(|i| i - 1))
    }

    fn p(v: &[usize]) -> LatticeExpr {
        LatticeExpr::atom(s(v))
    }

    fn engine(rows: &[&[i64]]) -> Arc<InvariantEngine> {
        let a = CartanMatrix::validate(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        Arc::new(InvariantEngine::new(a))
    }

    #[test]
    fn printing_matches_the_notation() {
        let num = LatticeExpr::intersect(vec![p(&[1]), LatticeExpr::sum(vec![p(&[3]), p(&[2])])]);
        let den = LatticeExpr::sum(vec![p(&[1, 3]), p(&[1, 2])]);
        assert_eq!(Item::quotient(2, num, den).to_string(), "Σ^2(P_1∩(P_2+P_3) - (P_12+P_13))");
        assert_eq!(Item::quotient(1, LatticeExpr::top(), LatticeExpr::sum(vec![p(&[3]), p(&[1, 2])])).to_string(), "Σ(P - (P_12+P_3))");
        assert_eq!(Item::plain(p(&[1, 2, 3])).to_string(), "P_123");
        assert_eq!(LatticeExpr::atom(IndexSet::from_members([0, 9])).to_string(), "P_{1,10}");
    }

    #[test]
    fn canonical_rules() {
        assert_eq!(LatticeExpr::intersect(vec![p(&[1]), p(&[2])]), p(&[1, 2]));
        assert_eq!(LatticeExpr::sum(vec![p(&[1]), p(&[1])]), p(&[1]));
        assert_eq!(LatticeExpr::sum(vec![p(&[1]), p(&[1, 2])]), p(&[1]));
        assert_eq!(LatticeExpr::sum(vec![p(&[1]), LatticeExpr::top()]), LatticeExpr::top());
        assert_eq!(LatticeExpr::intersect(vec![LatticeExpr::top(), LatticeExpr::sum(vec![p(&[1]), p(&[2])])]).to_string(), "P_1+P_2");
        let nested = LatticeExpr::sum(vec![p(&[4]), LatticeExpr::Sum(vec![p(&[2]), p(&[3])])]);
        assert_eq!(nested.to_string(), "P_2+P_3+P_4");
    }

    #[test]
    fn bar_examples() {
        assert_eq!(p(&[1, 2]).bar_substitute(s(&[1, 3])), p(&[1]));
        let e = LatticeExpr::sum(vec![p(&[1, 2]), p(&[3, 4])]);
        assert_eq!(e.bar_substitute(s(&[1, 2, 3, 4])), e);
        assert_eq!(e.bar_substitute(s(&[1, 3])).canonical(), LatticeExpr::sum(vec![p(&[1]), p(&[3])]));
    }

    #[test]
    fn trivially_zero_detection() {
        assert!(Item::quotient(1, p(&[1]), p(&[1])).is_trivially_zero());
        assert!(Item::quotient(1, p(&[1]), LatticeExpr::top()).is_trivially_zero());
        assert!(Item::quotient(2, p(&[1, 2]), LatticeExpr::sum(vec![p(&[1, 2]), p(&[3])])).is_trivially_zero());
        assert!(!Item::quotient(1, LatticeExpr::top(), LatticeExpr::sum(vec![p(&[1]), p(&[2])])).is_trivially_zero());
    }

    #[test]
    fn evaluation_examples() {
        let e = engine(&[&[2, -1, -3], &[-3, 2, -2], &[-2, -2, 2]]);
        let ev = Evaluator::new(e.clone());
        for d in 0..5 {
            assert!(ev.eval(&LatticeExpr::top(), d).is_full());
            let raw = LatticeExpr::Intersect(vec![p(&[1]), p(&[2])]);
            assert_eq!(ev.eval(&raw, d), e.piece(s(&[1, 2]), d));
            let x = LatticeExpr::Sum(vec![p(&[1]), p(&[1])]);
            assert_eq!(ev.eval(&x, d), e.piece(s(&[1]), d));
        }
        let zero = Item::quotient(0, p(&[2]), p(&[2]));
        assert!(ev.item_dims(&zero, 12).unwrap().is_zero());
        let top = Item::quotient(1, LatticeExpr::top(), LatticeExpr::top());
        assert!(ev.item_dims(&top, 12).unwrap().is_zero());
    }

    #[test]
    fn parity_of_tables() {
        let ev = Evaluator::new(engine(&[&[2, -1, -3], &[-3, 2, -2], &[-2, -2, 2]]));
        let item = Item::quotient(1, LatticeExpr::top(), LatticeExpr::sum(vec![p(&[1, 2]), p(&[3])]));
        let t = ev.item_dims(&item, 16).unwrap();
        for (n, &v) in t.0.iter().enumerate() {
            if n % 2 == 0 {
                assert_eq!(v, 0);
            }
        }
        assert!(!t.is_zero());
    }

    #[test]
    fn non_nested_quotient_is_reported() {
        let ev = Evaluator::new(engine(&[&[2, -1, -3], &[-3, 2, -2], &[-2, -2, 2]]));
        let bad = Item::quotient(0, p(&[1, 2]), p(&[1]));
        assert!(matches!(ev.item_dims(&bad, 4), Err(LatticeError::QuotientNotNested { degree: 1, .. })));
    }

    fn arb_expr() -> impl Strategy<Value = LatticeExpr> {
        let leaf = (0u32..8).prop_map(|b| LatticeExpr::Atom(IndexSet::from_bits(b)));
        leaf.prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..4).prop_map(LatticeExpr::Sum),
                proptest::collection::vec(inner, 2..4).prop_map(LatticeExpr::Intersect),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn canonical_form_preserves_value(e in arb_expr(), d in 0usize..4) {
            let ev = Evaluator::without_memo(engine(&[&[2, -1, -3], &[-3, 2, -2], &[-2, -2, 2]]));
            let c = e.clone().canonical();
            prop_assert_eq!(ev.eval(&e, d), ev.eval(&c, d));
            prop_assert_eq!(c.clone().canonical(), c);
        }

        #[test]
        fn bar_inflates_and_memo_is_sound(e in arb_expr(), k in 0u32..8, d in 0usize..4) {
            let eng = engine(&[&[2, -1, -1], &[-1, 2, -1], &[-1, -1, 2]]);
            let memo = Evaluator::new(eng.clone());
            let plain = Evaluator::without_memo(eng);
            let e = e.canonical();
            let barred = e.bar_substitute(IndexSet::from_bits(k)).canonical();
            prop_assert!(memo.eval(&barred, d).contains(&memo.eval(&e, d)).unwrap());
            prop_assert_eq!(memo.eval(&e, d), plain.eval(&e, d));
        }
    }
}

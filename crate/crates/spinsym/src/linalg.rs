//! Exact sparse linear algebra: rank and nullspace over Q and Q(i, sqrt(2)).
//!
//! Elimination combines rows with exact field operations and renormalizes by
//! the rational content after every update, which keeps intermediate entries
//! small in the spirit of fraction-free elimination while staying valid over
//! any subfield of Q(i, sqrt(2)). All pivoting is deterministic, so results
//! are independent of run order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::field::{FieldElement, Rational};

/// Scalar admissible for exact elimination.
pub trait ExactScalar: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// A scalar dividing the whole row exactly; None skips normalization.
    fn content(entries: &[&Self]) -> Option<Self>;
}

impl ExactScalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn content(entries: &[&Self]) -> Option<Self> {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for e in entries {
            num_gcd = num_gcd.gcd(e.numer());
            den_lcm = den_lcm.lcm(e.denom());
        }
        if num_gcd.is_zero() {
            return None;
        }
        Some(Rational::new(num_gcd, den_lcm))
    }
}

impl ExactScalar for FieldElement {
    fn zero() -> Self {
        FieldElement::zero()
    }
    fn one() -> Self {
        FieldElement::one()
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn sub(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self.try_div(other).expect("division by zero in elimination")
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn content(entries: &[&Self]) -> Option<Self> {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for e in entries {
            for r in [&e.re, &e.im, &e.re_rad, &e.im_rad] {
                if !Zero::is_zero(r) {
                    num_gcd = num_gcd.gcd(r.numer());
                    den_lcm = den_lcm.lcm(r.denom());
                }
            }
        }
        if num_gcd.is_zero() {
            return None;
        }
        Some(FieldElement::from_rational(Rational::new(num_gcd, den_lcm)))
    }
}

/// Sparse row: strictly increasing column indices, nonzero entries.
pub type SparseRow<S> = Vec<(u32, S)>;

fn normalize_row<S: ExactScalar>(row: &mut SparseRow<S>) {
    let refs: Vec<&S> = row.iter().map(|(_, v)| v).collect();
    if let Some(c) = S::content(&refs) {
        if !c.is_zero() && c != S::one() {
            for (_, v) in row.iter_mut() {
                *v = v.div(&c);
            }
        }
    }
}

/// out = a - factor * b, merged sparsely.
fn row_axpy<S: ExactScalar>(a: &SparseRow<S>, b: &SparseRow<S>, factor: &S) -> SparseRow<S> {
    let mut out: SparseRow<S> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((b[j].0, factor.mul(&b[j].1).neg()));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = a[i].1.sub(&factor.mul(&b[j].1));
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    for (c, v) in &b[j..] {
        out.push((*c, factor.mul(v).neg()));
    }
    out
}

/// Row echelon accumulator keyed by pivot column.
struct Echelon<S> {
    pivots: BTreeMap<u32, SparseRow<S>>,
}

impl<S: ExactScalar> Echelon<S> {
    fn new() -> Self {
        Echelon { pivots: BTreeMap::new() }
    }

    /// Reduce `row` against the current pivots; install any nonzero remainder
    /// as a new pivot and report whether the rank grew.
    fn absorb(&mut self, mut row: SparseRow<S>) -> bool {
        loop {
            let Some(&(lead_col, ref lead_val)) = row.first() else {
                return false;
            };
            match self.pivots.get(&lead_col) {
                Some(prow) => {
                    let factor = lead_val.div(&prow[0].1);
                    row = row_axpy(&row, prow, &factor);
                    normalize_row(&mut row);
                }
                None => {
                    normalize_row(&mut row);
                    self.pivots.insert(lead_col, row);
                    return true;
                }
            }
        }
    }
}

/// Sparse matrix given as a list of rows over `S`.
#[derive(Clone, Debug)]
pub struct SparseMatrix<S> {
    pub ncols: usize,
    pub rows: Vec<SparseRow<S>>,
}

impl<S: ExactScalar> SparseMatrix<S> {
    pub fn new(ncols: usize) -> Self {
        SparseMatrix { ncols, rows: Vec::new() }
    }

    pub fn from_dense(rows: &[Vec<S>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::new(ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged matrix");
            m.push_dense_row(r);
        }
        m
    }

    pub fn push_dense_row(&mut self, row: &[S]) {
        let sparse: SparseRow<S> = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c as u32, v.clone()))
            .collect();
        self.rows.push(sparse);
    }

    pub fn push_row(&mut self, mut row: SparseRow<S>) {
        row.sort_by_key(|(c, _)| *c);
        row.retain(|(_, v)| !v.is_zero());
        debug_assert!(row.iter().all(|(c, _)| (*c as usize) < self.ncols));
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Exact rank; invariant under row and column permutation.
    pub fn rank(&self) -> usize {
        // Short rows first keeps fill-in low; the order is fixed so the
        // computation is deterministic.
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| (self.rows[i].len(), i));
        let mut ech = Echelon::new();
        let mut rank = 0;
        for i in order {
            if !self.rows[i].is_empty() && ech.absorb(self.rows[i].clone()) {
                rank += 1;
            }
        }
        rank
    }

    /// Exact kernel basis: one vector per free column, with M v = 0 exactly.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut ech = Echelon::new();
        for row in &self.rows {
            if !row.is_empty() {
                ech.absorb(row.clone());
            }
        }
        // Normalize pivots to leading coefficient one.
        let mut pivots: Vec<(u32, SparseRow<S>)> = ech.pivots.into_iter().collect();
        for (_, row) in pivots.iter_mut() {
            let lead = row[0].1.clone();
            for (_, v) in row.iter_mut() {
                *v = v.div(&lead);
            }
        }
        // Back-substitute to reduced echelon form, last pivot first. When
        // pivot i is used, it has already been cleaned of all later pivot
        // columns, so each row ends up reduced.
        for i in (0..pivots.len()).rev() {
            let (col, prow) = (pivots[i].0, pivots[i].1.clone());
            for j in 0..i {
                let coeff = pivots[j]
                    .1
                    .iter()
                    .find(|(c, _)| *c == col)
                    .map(|(_, v)| v.clone());
                if let Some(coeff) = coeff {
                    if !coeff.is_zero() {
                        pivots[j].1 = row_axpy(&pivots[j].1, &prow, &coeff);
                    }
                }
            }
        }
        let pivot_cols: std::collections::BTreeSet<u32> =
            pivots.iter().map(|(c, _)| *c).collect();
        let mut basis = Vec::new();
        for free in 0..self.ncols as u32 {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![S::zero(); self.ncols];
            v[free as usize] = S::one();
            for (pcol, prow) in &pivots {
                if let Some((_, coeff)) = prow.iter().find(|(c, _)| *c == free) {
                    v[*pcol as usize] = coeff.neg();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Exact rank of a dense matrix of field elements.
pub fn exact_rank(rows: &[Vec<FieldElement>]) -> usize {
    SparseMatrix::from_dense(rows).rank()
}

/// Exact nullspace basis of a dense matrix of field elements.
pub fn exact_nullspace(rows: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
    SparseMatrix::from_dense(rows).nullspace()
}

/// Dense matrix-vector product (used by exactness checks).
pub fn mat_vec(rows: &[Vec<FieldElement>], v: &[FieldElement]) -> Vec<FieldElement> {
    rows.iter()
        .map(|row| {
            let mut acc = FieldElement::zero();
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    fn dense(rows: &[&[i64]]) -> Vec<Vec<FieldElement>> {
        rows.iter()
            .map(|r| r.iter().map(|&n| fe(n)).collect())
            .collect()
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let m = dense(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(exact_rank(&m), 3);
        assert!(exact_nullspace(&m).is_empty());
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let m = dense(&[&[0, 0, 0, 0, 0], &[0, 0, 0, 0, 0]]);
        assert_eq!(exact_rank(&m), 0);
        assert_eq!(exact_nullspace(&m).len(), 5);
    }

    #[test]
    fn rank_one_kernel_vector() {
        // [[1,1],[2,2]] has kernel spanned by (1,-1), by hand elimination.
        let m = dense(&[&[1, 1], &[2, 2]]);
        assert_eq!(exact_rank(&m), 1);
        let ns = exact_nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0][0], -ns[0][1].clone());
        assert!(!ns[0][0].is_zero());
    }

    #[test]
    fn duplicate_rows_do_not_change_rank() {
        let m = dense(&[&[1, 2], &[2, 4]]);
        assert_eq!(exact_rank(&m), 1);
        let stacked = dense(&[&[1, 2], &[2, 4], &[1, 2], &[2, 4]]);
        assert_eq!(exact_rank(&stacked), 1);
    }

    #[test]
    fn kernel_vectors_annihilate_exactly() {
        let m = dense(&[&[1, 2, 3, 1], &[0, 1, -1, 2], &[1, 3, 2, 3]]);
        for v in exact_nullspace(&m) {
            for r in mat_vec(&m, &v) {
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn complex_entries() {
        // (1, i) and (i, -1) are parallel over Q(i): rank 1.
        let i = FieldElement::i();
        let m = vec![vec![fe(1), i.clone()], vec![i.clone(), fe(-1)]];
        assert_eq!(exact_rank(&m), 1);
        let ns = exact_nullspace(&m);
        assert_eq!(ns.len(), 1);
        for r in mat_vec(&m, &ns[0]) {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn rational_scalar_rank() {
        let mut m: SparseMatrix<Rational> = SparseMatrix::new(3);
        m.push_dense_row(&[
            Rational::new(1.into(), 2.into()),
            Rational::new(1.into(), 3.into()),
            Rational::new(0.into(), 1.into()),
        ]);
        m.push_dense_row(&[
            Rational::new(3.into(), 2.into()),
            Rational::new(1.into(), 1.into()),
            Rational::new(0.into(), 1.into()),
        ]);
        assert_eq!(m.rank(), 1);
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<FieldElement>>> {
        ((1usize..5), (1usize..5)).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                proptest::collection::vec((-3i64..=3, -3i64..=3), c),
                r,
            )
            .prop_map(|rows| {
                rows.into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|(a, b)| fe(a) + FieldElement::i() * fe(b))
                            .collect()
                    })
                    .collect()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_equals_rank_of_transpose(m in arb_matrix()) {
            let rows = m.len();
            let cols = m[0].len();
            let mut t = vec![vec![FieldElement::zero(); rows]; cols];
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    t[j][i] = v.clone();
                }
            }
            prop_assert_eq!(exact_rank(&m), exact_rank(&t));
        }

        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let cols = m[0].len();
            prop_assert_eq!(exact_rank(&m) + exact_nullspace(&m).len(), cols);
        }

        #[test]
        fn nullspace_exactness(m in arb_matrix()) {
            for v in exact_nullspace(&m) {
                for r in mat_vec(&m, &v) {
                    prop_assert!(r.is_zero());
                }
            }
        }
    }
}

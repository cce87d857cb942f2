//! Killing spinors on Minkowski space by bounded-degree polynomial ansatz,
//! and the conformal Killing vector basis.
//!
//! A Killing spinor of type (k, l) is a symmetric spinor field with k lower
//! unprimed and l upper primed slots, polynomial in x, annihilated by the
//! fully symmetrized derivative. The solver works per homogeneity degree
//! (the equation is graded), so basis elements come out homogeneous.

use std::collections::HashMap;

use crate::error::SolveError;
use crate::field::FieldElement;
use crate::jet::{coord_derivative_array, coord_derivative_raised, vector_to_spinor};
use crate::linalg::{ExactScalar, SparseMatrix};
use crate::poly::{Monomial, Polynomial, Variable};
use crate::spinor::{Group, SpinorArray, SymGroup, Variance};
use crate::util::{binom, homogeneous_exponents};

/// Symmetric type-(k,l) spinor field solving the Killing equation.
#[derive(Clone, Debug)]
pub struct KillingSpinor {
    pub k: usize,
    pub l: usize,
    /// Homogeneity degree in x of this element.
    pub degree: usize,
    /// Symmetric storage, k lower unprimed and l upper primed slots,
    /// entries polynomial in x only.
    pub comps: SpinorArray,
}

#[derive(Clone, Debug)]
pub struct KillingBasis {
    pub k: usize,
    pub l: usize,
    pub degree_bound: usize,
    pub elements: Vec<KillingSpinor>,
}

impl KillingBasis {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }
}

/// Closed-form complex dimension of the space of Killing spinors of type
/// (k, l), l >= k: (k+1)(k+2)(l+1)(l+2)(k+l+3)/12, which reduces to
/// (k+1)^2 (k+2)^2 (2k+3)/12 at l = k.
pub fn killing_dimension(k: usize, l: usize) -> Result<u64, SolveError> {
    if l < k {
        return Err(SolveError::UnsupportedKillingType { k, l });
    }
    let (k, l) = (k as u64, l as u64);
    let prod = (k + 1) * (k + 2) * (l + 1) * (l + 2) * (k + l + 3);
    debug_assert_eq!(prod % 12, 0);
    Ok(prod / 12)
}

/// Residual of the Killing equation: the groupwise symmetrization of
/// del_A^{A'} kappa, one extra lower unprimed and upper primed slot.
pub fn killing_residual(kappa: &SpinorArray) -> SpinorArray {
    let k = kappa.unprimed_rank();
    let l = kappa.primed_rank();
    let dense = kappa.to_dense();
    let mut u = vec![0usize; k + 1];
    let mut p = vec![0usize; l + 1];
    let mut out = SpinorArray::zeros_with(
        {
            let mut v = vec![Variance::Lower; k + 1];
            v[k] = Variance::Lower;
            v
        },
        vec![Variance::Upper; l + 1],
    );
    let total = k + l + 2;
    for idx in 0..(1usize << total) {
        for s in 0..total {
            let b = (idx >> (total - 1 - s)) & 1;
            if s < k + 1 {
                u[s] = b;
            } else {
                p[s - (k + 1)] = b;
            }
        }
        let inner = dense.get(&u[..k], &p[..l]);
        let val = coord_derivative_raised(inner, u[k], p[l]).expect("x-polynomial entries");
        out.set(&u.clone(), &p.clone(), val);
    }
    out.symmetrize(SymGroup::Both)
}

/// Exact basis of type-(k,l) Killing spinors with polynomial entries of
/// degree at most `degree_bound`, one homogeneous block at a time.
pub fn solve_killing(k: usize, l: usize, degree_bound: usize) -> KillingBasis {
    let mut elements = Vec::new();
    for d in 0..=degree_bound {
        elements.extend(solve_homogeneous_block(k, l, d));
    }
    KillingBasis { k, l, degree_bound, elements }
}

fn solve_homogeneous_block(k: usize, l: usize, d: usize) -> Vec<KillingSpinor> {
    let monos = homogeneous_exponents(4, d);
    let n_comps = (k + 1) * (l + 1);
    let ncols = n_comps * monos.len();
    if ncols == 0 {
        return Vec::new();
    }
    let res_monos = if d == 0 {
        Vec::new()
    } else {
        homogeneous_exponents(4, d - 1)
    };
    let mut res_index: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, e) in res_monos.iter().enumerate() {
        res_index.insert(e.clone(), i);
    }
    let n_res_comps = (k + 2) * (l + 2);
    let nrows = n_res_comps * res_monos.len();
    let mut rows: Vec<Vec<(u32, FieldElement)>> = vec![Vec::new(); nrows];

    for (e_idx, e) in monos.iter().enumerate() {
        let mono = exponents_to_monomial(e);
        let xe = Polynomial::monomial(mono, FieldElement::one());
        for j in 0..=k {
            for m in 0..=l {
                let col = ((j * (l + 1)) + m) * monos.len() + e_idx;
                let weight =
                    FieldElement::from_int(binom(k, j) * binom(l, m));
                for a in 0..2usize {
                    for ap in 0..2usize {
                        let dpoly = coord_derivative_raised(&xe, a, ap).unwrap();
                        if dpoly.is_zero() {
                            continue;
                        }
                        let (j2, m2) = (j + a, m + ap);
                        for (mono_f, coeff) in &dpoly.terms {
                            let f = monomial_to_exponents(mono_f);
                            let f_idx = res_index[&f];
                            let row = ((j2 * (l + 2)) + m2) * res_monos.len() + f_idx;
                            rows[row].push((col as u32, coeff * &weight));
                        }
                    }
                }
            }
        }
    }

    let mut matrix = SparseMatrix::new(ncols);
    for r in rows {
        matrix.push_row(r);
    }
    let kernel = matrix.nullspace();
    kernel
        .into_iter()
        .map(|v| {
            let v = normalize_vector(v);
            let comps = SpinorArray::from_sym_fn(k, l, Variance::Lower, Variance::Upper, |j, m| {
                let mut p = Polynomial::zero();
                for (e_idx, e) in monos.iter().enumerate() {
                    let c = &v[((j * (l + 1)) + m) * monos.len() + e_idx];
                    if !c.is_zero() {
                        p.add_term(exponents_to_monomial(e), c.clone());
                    }
                }
                p
            });
            KillingSpinor { k, l, degree: d, comps }
        })
        .collect()
}

fn normalize_vector(mut v: Vec<FieldElement>) -> Vec<FieldElement> {
    let refs: Vec<&FieldElement> = v.iter().filter(|e| !e.is_zero()).collect();
    if let Some(c) = <FieldElement as ExactScalar>::content(&refs) {
        if !c.is_zero() {
            for e in v.iter_mut() {
                *e = e.try_div(&c).unwrap();
            }
        }
    }
    v
}

pub(crate) fn exponents_to_monomial(e: &[usize]) -> Monomial {
    let mut vars = Vec::new();
    for (axis, &exp) in e.iter().enumerate() {
        if exp > 0 {
            vars.push((Variable::coord(axis), exp as u8));
        }
    }
    Monomial(vars)
}

pub(crate) fn monomial_to_exponents(m: &Monomial) -> Vec<usize> {
    let mut e = vec![0usize; 4];
    for (v, exp) in &m.0 {
        match v {
            Variable::Coordinate { axis } => e[*axis as usize] = *exp as usize,
            _ => panic!("non-coordinate variable in ansatz polynomial"),
        }
    }
    e
}

/// A conformal Killing vector of Minkowski space, with polynomial components.
#[derive(Clone, Debug)]
pub struct ConformalKillingVector {
    pub name: String,
    pub xi: [Polynomial; 4],
}

impl ConformalKillingVector {
    /// Spinor form xi^{CC'} (both slots upper).
    pub fn spinor(&self) -> SpinorArray {
        vector_to_spinor(&self.xi)
    }

    /// Mixed form xi_C^{C'} used by the Killing-spinor correspondence
    /// (lower unprimed, upper primed).
    pub fn spinor_mixed(&self) -> SpinorArray {
        self.spinor()
            .eps_move(Group::Unprimed, 0, Variance::Lower)
            .unwrap()
    }

    /// Opposite mix xi^C{}_{C'} (upper unprimed, lower primed), the shape
    /// appearing in the leading-term closed forms.
    pub fn spinor_comixed(&self) -> SpinorArray {
        self.spinor()
            .eps_move(Group::Primed, 0, Variance::Lower)
            .unwrap()
    }

    /// Divergence del_i xi^i.
    pub fn divergence(&self) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (i, c) in self.xi.iter().enumerate() {
            acc = acc.add(&c.partial(&Variable::coord(i)));
        }
        acc
    }

    /// Conformal factor: del_{(i} xi_{j)} = k(x) eta_{ij}, k = div/4.
    pub fn conformal_factor(&self) -> Polynomial {
        self.divergence().scale(&FieldElement::from_ratio(1, 4))
    }

    pub fn scale(&self, c: &FieldElement, name: &str) -> ConformalKillingVector {
        ConformalKillingVector {
            name: name.to_string(),
            xi: std::array::from_fn(|i| self.xi[i].scale(c)),
        }
    }

    pub fn add(&self, other: &ConformalKillingVector, name: &str) -> ConformalKillingVector {
        ConformalKillingVector {
            name: name.to_string(),
            xi: std::array::from_fn(|i| self.xi[i].add(&other.xi[i])),
        }
    }
}

/// The 15 classical generators: 4 translations, 6 rotations/boosts,
/// 1 dilation, 4 special conformal transformations.
pub fn conformal_killing_basis() -> Vec<ConformalKillingVector> {
    let x = |i: usize| Polynomial::var(Variable::coord(i));
    let x_lower = |i: usize| x(i).scale(&FieldElement::from_int(crate::convention::eta(i, i)));
    let mut out = Vec::with_capacity(15);
    for a in 0..4 {
        out.push(ConformalKillingVector {
            name: format!("P{a}"),
            xi: std::array::from_fn(|i| if i == a { Polynomial::one() } else { Polynomial::zero() }),
        });
    }
    for a in 0..4 {
        for b in (a + 1)..4 {
            out.push(ConformalKillingVector {
                name: format!("M{a}{b}"),
                xi: std::array::from_fn(|i| {
                    if i == b {
                        x_lower(a)
                    } else if i == a {
                        x_lower(b).neg()
                    } else {
                        Polynomial::zero()
                    }
                }),
            });
        }
    }
    out.push(ConformalKillingVector {
        name: "D".to_string(),
        xi: std::array::from_fn(x),
    });
    // x.x = eta_ij x^i x^j
    let mut xx = Polynomial::zero();
    for i in 0..4 {
        xx = xx.add(&x(i).mul(&x(i)).scale(&FieldElement::from_int(
            crate::convention::eta(i, i),
        )));
    }
    for a in 0..4 {
        out.push(ConformalKillingVector {
            name: format!("K{a}"),
            xi: std::array::from_fn(|i| {
                let mut t = x_lower(a).mul(&x(i)).scale(&FieldElement::from_int(2));
                if i == a {
                    t = t.sub(&xx);
                }
                t
            }),
        });
    }
    out
}

/// Exact span dimension over the rationals of the listed Killing spinors,
/// stacking coefficient vectors (used for factorization checks; the entries
/// live in Q(i, sqrt2) and the rank is taken over that field, which equals
/// the complex span dimension).
pub fn killing_span_rank(elements: &[&SpinorArray]) -> usize {
    let mut col_index: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    let mut rows: Vec<Vec<(u32, FieldElement)>> = Vec::new();
    for arr in elements {
        let (k, l) = (arr.unprimed_rank(), arr.primed_rank());
        let mut row = Vec::new();
        for j in 0..=k {
            for m in 0..=l {
                for (mono, c) in &arr.get_sym(j, m).terms {
                    let key = (j, m, monomial_to_exponents(mono));
                    let next = col_index.len();
                    let col = *col_index.entry(key).or_insert(next);
                    row.push((col as u32, c.clone()));
                }
            }
        }
        rows.push(row);
    }
    let mut matrix = SparseMatrix::new(col_index.len().max(1));
    for r in rows {
        matrix.push_row(r);
    }
    matrix.rank()
}

/// Symmetrized product of Killing spinors (types add).
pub fn symmetrized_product(a: &SpinorArray, b: &SpinorArray) -> SpinorArray {
    a.outer(b).symmetrize(SymGroup::Both)
}

/// Check that products of `k` type-(1,1) elements span the type-(k,k) space,
/// returning (achieved rank, expected dimension). Only k <= 2 is needed at
/// desk scale.
pub fn factorization_span_check(k: usize) -> (usize, u64) {
    let base = solve_killing(1, 1, 2);
    let expected = killing_dimension(k, k).unwrap();
    match k {
        1 => {
            let arrs: Vec<&SpinorArray> = base.elements.iter().map(|e| &e.comps).collect();
            (killing_span_rank(&arrs), expected)
        }
        2 => {
            let mut products = Vec::new();
            for i in 0..base.elements.len() {
                for j in i..base.elements.len() {
                    products.push(symmetrized_product(
                        &base.elements[i].comps,
                        &base.elements[j].comps,
                    ));
                }
            }
            let arrs: Vec<&SpinorArray> = products.iter().collect();
            (killing_span_rank(&arrs), expected)
        }
        _ => panic!("factorization check implemented for k <= 2"),
    }
}

/// Products of one type-(0,n) element with one type-(1,1) element span the
/// type-(1, n+1) space; returns (achieved rank, expected dimension).
pub fn mixed_factorization_span_check(n: usize) -> (usize, u64) {
    let chiral = solve_killing(0, n, n);
    let base = solve_killing(1, 1, 2);
    let expected = killing_dimension(1, n + 1).unwrap();
    let mut products = Vec::new();
    for c in &chiral.elements {
        for b in &base.elements {
            products.push(symmetrized_product(&c.comps, &b.comps));
        }
    }
    let arrs: Vec<&SpinorArray> = products.iter().collect();
    (killing_span_rank(&arrs), expected)
}

/// Wave identity for Killing spinors: del_{CC'} del^C{}_{D'} kappa = 0.
pub fn dalembert_identity_holds(kappa: &SpinorArray) -> bool {
    // two coordinate derivatives append lower slots: unprimed [C1, C2]
    let d2 = coord_derivative_array(&coord_derivative_array(kappa).unwrap()).unwrap();
    // contract the two unprimed slots with eps (raise first, contract)
    let raised = d2.eps_move(Group::Unprimed, 0, Variance::Upper).unwrap();
    let contracted = raised.contract(Group::Unprimed, 0, 1).unwrap();
    contracted.is_zero()
}

/// Derivative-exchange identity: del_{CC'} del_{DD'} kappa is symmetric under
/// exchanging the primed labels between the two derivatives.
pub fn derivative_exchange_identity_holds(kappa: &SpinorArray) -> bool {
    let d2 = coord_derivative_array(&coord_derivative_array(kappa).unwrap()).unwrap();
    let l = kappa.primed_rank();
    // primed slots: [kappa uppers.., first derivative, second derivative]
    let m = d2.unprimed_rank();
    let mp = d2.primed_rank();
    let mut u = vec![0usize; m];
    let mut p = vec![0usize; mp];
    for idx in 0..(1usize << (m + mp)) {
        let total = m + mp;
        for s in 0..total {
            let b = (idx >> (total - 1 - s)) & 1;
            if s < m {
                u[s] = b;
            } else {
                p[s - m] = b;
            }
        }
        let mut swapped = p.clone();
        swapped.swap(l, l + 1);
        if d2.get(&u, &p) != d2.get(&u, &swapped) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::coord_derivative;

    #[test]
    fn dimension_formulas() {
        assert_eq!(killing_dimension(0, 0).unwrap(), 1);
        assert_eq!(killing_dimension(1, 1).unwrap(), 15);
        assert_eq!(killing_dimension(2, 2).unwrap(), 84);
        assert_eq!(killing_dimension(0, 2).unwrap(), 10);
        assert_eq!(killing_dimension(0, 4).unwrap(), 35);
        assert_eq!(killing_dimension(0, 6).unwrap(), 84);
        assert_eq!(killing_dimension(1, 3).unwrap(), 70);
        assert!(killing_dimension(2, 1).is_err());
    }

    #[test]
    fn solve_small_types() {
        let b00 = solve_killing(0, 0, 0);
        assert_eq!(b00.dimension(), 1);
        let b02 = solve_killing(0, 2, 2);
        assert_eq!(b02.dimension(), 10);
        for e in &b02.elements {
            assert!(killing_residual(&e.comps).is_zero());
        }
    }

    #[test]
    fn solve_1_1_matches_lemma() {
        let b = solve_killing(1, 1, 2);
        assert_eq!(b.dimension(), 15);
        for e in &b.elements {
            assert!(killing_residual(&e.comps).is_zero());
        }
    }

    #[test]
    fn overbound_gives_nothing_new() {
        // no degree-3 or degree-4 solutions for type (1,1)
        let b = solve_killing(1, 1, 4);
        assert_eq!(b.dimension(), 15);
        assert!(b.elements.iter().all(|e| e.degree <= 2));
    }

    #[test]
    fn ckv_basis_is_conformal_killing() {
        let basis = conformal_killing_basis();
        assert_eq!(basis.len(), 15);
        for ckv in &basis {
            let kfac = ckv.conformal_factor();
            // del_(i xi_j) = k eta_ij exactly
            for i in 0..4 {
                for j in 0..4 {
                    let xi_j = ckv.xi[j].scale(&FieldElement::from_int(
                        crate::convention::eta(j, j),
                    ));
                    let xi_i = ckv.xi[i].scale(&FieldElement::from_int(
                        crate::convention::eta(i, i),
                    ));
                    let sym = xi_j
                        .partial(&Variable::coord(i))
                        .add(&xi_i.partial(&Variable::coord(j)))
                        .scale(&FieldElement::from_ratio(1, 2));
                    let expect = if i == j {
                        kfac.scale(&FieldElement::from_int(crate::convention::eta(i, j)))
                    } else {
                        Polynomial::zero()
                    };
                    assert_eq!(sym, expect, "{} at ({i},{j})", ckv.name);
                }
            }
        }
    }

    #[test]
    fn translation_has_zero_conformal_factor() {
        let basis = conformal_killing_basis();
        assert!(basis[0].conformal_factor().is_zero());
    }

    #[test]
    fn dilation_examples() {
        let basis = conformal_killing_basis();
        let dil = basis.iter().find(|c| c.name == "D").unwrap();
        assert_eq!(dil.divergence(), Polynomial::constant(FieldElement::from_int(4)));
        assert_eq!(dil.conformal_factor(), Polynomial::one());
    }

    #[test]
    fn ckv_spinor_form_satisfies_killing_equation() {
        for ckv in conformal_killing_basis() {
            let mixed = ckv.spinor_mixed();
            assert!(killing_residual(&mixed).is_zero(), "{}", ckv.name);
        }
    }

    #[test]
    fn ckv_spinor_span_has_rank_30_over_reals() {
        // the 15 generators and their i-multiples are independent:
        // complex span of {xi, i xi} has rank 30 real dimensions
        let basis = conformal_killing_basis();
        let mut arrays = Vec::new();
        for ckv in &basis {
            arrays.push(ckv.spinor_mixed());
        }
        // split real/imaginary coefficients into separate rational rows
        let mut col_index: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
        let mut matrix_rows: Vec<Vec<(u32, FieldElement)>> = Vec::new();
        for arr in &arrays {
            let mut re_row = Vec::new();
            let mut im_row = Vec::new();
            for j in 0..=arr.unprimed_rank() {
                for m in 0..=arr.primed_rank() {
                    for (mono, c) in &arr.get_sym(j, m).terms {
                        let key = (j, m, super::monomial_to_exponents(mono));
                        let next = col_index.len();
                        let col = *col_index.entry(key).or_insert(next) as u32;
                        // value = (re + re_rad*sqrt2) + i (im + im_rad*sqrt2)
                        let re = FieldElement::new(
                            c.re.clone(),
                            num_rational::BigRational::new(0.into(), 1.into()),
                            c.re_rad.clone(),
                            num_rational::BigRational::new(0.into(), 1.into()),
                        );
                        let im = FieldElement::new(
                            c.im.clone(),
                            num_rational::BigRational::new(0.into(), 1.into()),
                            c.im_rad.clone(),
                            num_rational::BigRational::new(0.into(), 1.into()),
                        );
                        if !re.is_zero() {
                            re_row.push((col, re));
                        }
                        if !im.is_zero() {
                            im_row.push((col, im));
                        }
                    }
                }
            }
            matrix_rows.push(re_row);
            matrix_rows.push(im_row);
        }
        // real span of {xi_k, i xi_k}: stack [Re;Im] and [-Im;Re] rows
        let ncols = col_index.len();
        let mut m = SparseMatrix::new(2 * ncols);
        for pair in matrix_rows.chunks(2) {
            let (re_row, im_row) = (&pair[0], &pair[1]);
            // xi: (Re | Im)
            let mut r1: Vec<(u32, FieldElement)> = re_row.clone();
            r1.extend(im_row.iter().map(|(c, v)| (c + ncols as u32, v.clone())));
            m.push_row(r1);
            // i*xi: (-Im | Re)
            let mut r2: Vec<(u32, FieldElement)> = im_row
                .iter()
                .map(|(c, v)| (*c, -v.clone()))
                .collect();
            r2.extend(re_row.iter().map(|(c, v)| (c + ncols as u32, v.clone())));
            m.push_row(r2);
        }
        assert_eq!(m.rank(), 30);
    }

    #[test]
    fn special_conformal_factor() {
        let basis = conformal_killing_basis();
        let k0 = basis.iter().find(|c| c.name == "K0").unwrap();
        // k(x) = 2 x_0 for K0
        assert_eq!(
            k0.conformal_factor(),
            Polynomial::var(Variable::coord(0)).scale(&FieldElement::from_int(2))
        );
        let _ = coord_derivative(&k0.xi[0], 0, 0).unwrap();
    }

    #[test]
    fn wave_and_exchange_identities_for_0_2_basis() {
        let b = solve_killing(0, 2, 2);
        for e in &b.elements {
            assert!(dalembert_identity_holds(&e.comps));
            assert!(derivative_exchange_identity_holds(&e.comps));
        }
    }

    #[test]
    fn factorization_single_factor() {
        let (rank, expect) = factorization_span_check(1);
        assert_eq!(rank as u64, expect);
        assert_eq!(rank, 15);
    }
}

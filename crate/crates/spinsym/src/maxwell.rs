//! Tensorial electromagnetic specialization: world-tensor arrays, Hodge
//! duality, the degree-0..4 polynomial tensors with Weyl-tensor symmetry,
//! tensorial conformal and chiral symmetries, and the dictionary between
//! tensor jets and the spin-1 on-shell spinor ring.
//!
//! Tensor-side verification runs entirely through the spinor dictionary:
//! an F-jet is represented from the start by its on-shell spinor image, so
//! the determining equations reduce to exact polynomial identities in the
//! spin-1 jet ring.

use rand::Rng;

use crate::convention::{eta, levi_civita, sigma_lower, sigma_st_lower_raised};
use crate::error::TensorError;
use crate::field::FieldElement;
use crate::jet::{coordinate_spinor, JetContext};
use crate::killing::KillingSpinor;
use crate::linalg::SparseMatrix;
use crate::poly::{Polynomial, Variable};
use crate::spinor::{eps, epsilon_array, Group, SpinorArray, SymGroup, Variance};

/// Sign convention pinned by the anti-self-dual anchor: with the orientation
/// eps_{0123} = +1 and the sigma conventions of this crate, the combination
/// (F - DUALITY_SIGN * i * (*F))/2 has the pure conjugate-spinor image
/// eps_{KL} phibar_{K'L'}. Discovered once by `discover_duality_sign` and
/// frozen here by a regression test.
pub const DUALITY_SIGN: i64 = 1;

/// Relative sign between the computed degree-1 projection and its displayed
/// closed form. Under the epsilon ordering of this crate the transport terms
/// of the degree-1 tensor each project to -(1/2) of the closed-form
/// expression while the metric terms vanish on primed symmetrization, so the
/// closed form picks up this overall sign; the projection identity itself is
/// the anchor that fixes it. Frozen by a regression test.
pub const PROJECTION_H1_SIGN: i64 = -1;

/// Dense array of polynomials with world indices 0..3.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorArray {
    rank: usize,
    entries: Vec<Polynomial>,
}

impl TensorArray {
    pub fn zeros(rank: usize) -> Self {
        TensorArray { rank, entries: vec![Polynomial::zero(); 4usize.pow(rank as u32)] }
    }

    pub fn from_fn(rank: usize, mut f: impl FnMut(&[usize]) -> Polynomial) -> Self {
        let mut t = Self::zeros(rank);
        let mut idx = vec![0usize; rank];
        for flat in 0..t.entries.len() {
            decode_tensor_index(flat, rank, &mut idx);
            t.entries[flat] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        let mut f = 0usize;
        for &i in idx {
            debug_assert!(i < 4);
            f = f * 4 + i;
        }
        f
    }

    pub fn get(&self, idx: &[usize]) -> &Polynomial {
        &self.entries[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Polynomial) {
        let f = self.flat(idx);
        self.entries[f] = value;
    }

    pub fn add(&self, other: &TensorArray) -> TensorArray {
        assert_eq!(self.rank, other.rank);
        TensorArray {
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TensorArray) -> TensorArray {
        self.add(&other.scale(&FieldElement::from_int(-1)))
    }

    pub fn scale(&self, c: &FieldElement) -> TensorArray {
        TensorArray {
            rank: self.rank,
            entries: self.entries.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn swap_slots(&self, s1: usize, s2: usize) -> TensorArray {
        TensorArray::from_fn(self.rank, |idx| {
            let mut j = idx.to_vec();
            j.swap(s1, s2);
            self.get(&j).clone()
        })
    }

    /// Antisymmetrize one slot pair with weight 1/2.
    pub fn antisym_pair(&self, s1: usize, s2: usize) -> TensorArray {
        self.sub(&self.swap_slots(s1, s2))
            .scale(&FieldElement::from_ratio(1, 2))
    }

    /// Total antisymmetrization over all slots (weight 1/rank!).
    pub fn antisymmetrize_all(&self) -> TensorArray {
        let rank = self.rank;
        let perms = permutations(rank);
        let w = FieldElement::from_ratio(1, crate::util::factorial(rank));
        TensorArray::from_fn(rank, |idx| {
            let mut acc = Polynomial::zero();
            for (perm, sign) in &perms {
                let j: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
                let term = self.get(&j).scale(&FieldElement::from_int(*sign));
                acc = acc.add(&term);
            }
            acc.scale(&w)
        })
    }

    /// Trace over two slots with the inverse metric.
    pub fn trace_eta(&self, s1: usize, s2: usize) -> TensorArray {
        let rank = self.rank;
        TensorArray::from_fn(rank - 2, |idx| {
            let mut acc = Polynomial::zero();
            for m in 0..4 {
                let mut full = Vec::with_capacity(rank);
                let mut it = idx.iter();
                for s in 0..rank {
                    if s == s1 || s == s2 {
                        full.push(m);
                    } else {
                        full.push(*it.next().unwrap());
                    }
                }
                acc = acc.add(&self.get(&full).scale(&FieldElement::from_int(eta(m, m))));
            }
            acc
        })
    }
}

fn decode_tensor_index(flat: usize, rank: usize, idx: &mut [usize]) {
    let mut f = flat;
    for s in (0..rank).rev() {
        idx[s] = f % 4;
        f /= 4;
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, i64)>) {
        if k == 1 {
            let sign = perm_sign(items);
            out.push((items.clone(), sign));
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    fn perm_sign(p: &[usize]) -> i64 {
        let mut sign = 1i64;
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                if p[i] > p[j] {
                    sign = -sign;
                }
            }
        }
        sign
    }
    heap(n, &mut items, &mut out);
    out
}

/// Hodge dual of an antisymmetric rank-2 tensor:
/// *F_{ij} = (1/2) eps_{ijkl} F^{kl}, orientation eps_{0123} = +1.
pub fn hodge_dual(f: &TensorArray) -> Result<TensorArray, TensorError> {
    if f.rank() != 2 {
        return Err(TensorError::ShapeMismatch("hodge dual needs rank 2".into()));
    }
    if !f.antisym_pair(0, 1).sub(f).is_zero() {
        return Err(TensorError::NotAntisymmetric);
    }
    Ok(TensorArray::from_fn(2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = Polynomial::zero();
        for k in 0..4 {
            for l in 0..4 {
                let sign = levi_civita(i, j, k, l) * eta(k, k) * eta(l, l);
                if sign != 0 {
                    acc = acc.add(&f.get(&[k, l]).scale(&FieldElement::from_ratio(sign, 2)));
                }
            }
        }
        acc
    }))
}

/// Spinor representative of an all-lower tensor: contract one sigma per slot.
/// Result slots: unprimed [A_1..A_r], primed [A_1'..A_r'] with slot t of the
/// tensor feeding the pair (A_t, A_t').
///
/// Each sigma entry is (1/sqrt2) times a unit in {0,+-1,+-i}, so the product
/// over slots is tracked as a small Gaussian integer and converted once.
pub fn spinor_rep(t: &TensorArray) -> SpinorArray {
    let rank = t.rank();
    let sig = sigma_lower();
    // sigma = (1/sqrt2) * unit
    let mut units = [[[(0i64, 0i64); 2]; 2]; 4];
    for (i, m) in sig.iter().enumerate() {
        for a in 0..2 {
            for ap in 0..2 {
                let e = &m[a][ap] * &FieldElement::sqrt2();
                let re: i64 = num_traits::ToPrimitive::to_i64(e.re.numer()).unwrap();
                let im: i64 = num_traits::ToPrimitive::to_i64(e.im.numer()).unwrap();
                units[i][a][ap] = (re, im);
            }
        }
    }
    let scale = |re: i64, im: i64| -> FieldElement {
        // (re + i im) * (1/sqrt2)^rank
        let base = FieldElement::from_int(re) + FieldElement::i() * FieldElement::from_int(im);
        base * FieldElement::inv_sqrt2().pow(rank as u32)
    };
    SpinorArray::from_fn(rank, rank, Variance::Lower, Variance::Lower, |u, p| {
        let mut acc = Polynomial::zero();
        let mut idx = vec![0usize; rank];
        for flat in 0..4usize.pow(rank as u32) {
            decode_tensor_index(flat, rank, &mut idx);
            let entry = t.get(&idx);
            if entry.is_zero() {
                continue;
            }
            let (mut re, mut im) = (1i64, 0i64);
            for (slot, &i) in idx.iter().enumerate() {
                let (ure, uim) = units[i][u[slot]][p[slot]];
                let nre = re * ure - im * uim;
                let nim = re * uim + im * ure;
                re = nre;
                im = nim;
                if re == 0 && im == 0 {
                    break;
                }
            }
            if re != 0 || im != 0 {
                acc = acc.add(&entry.scale(&scale(re, im)));
            }
        }
        acc
    })
}

/// Sum over eps^{ab} of the components of two lower slots of one group.
fn eps_pair_trace(arr: &SpinorArray, group: Group, s1: usize, s2: usize) -> SpinorArray {
    // raise s1 then contract: lambda^a = eps^{ab} lambda_b, and
    // sum_a X^a{}_a realizes eps^{ab} X_{ba}; we want eps^{ab} X_{ab},
    // so raise s2 and contract (s2 up, s1 down) instead.
    let raised = arr.eps_move(group, s2, Variance::Upper).unwrap();
    raised.contract(group, s2, s1).unwrap()
}

/// The spin-1 dictionary: F-jet images in the on-shell ring, their duals,
/// and spacetime total derivatives. Repeated jets are memoized (derivatives
/// commute, so the key is the sorted derivative list).
pub struct MaxwellDictionary {
    pub ctx: JetContext,
    f_img: TensorArray,
    dual_img: TensorArray,
    jet_cache: std::cell::RefCell<std::collections::HashMap<(bool, usize, usize, Vec<usize>), Polynomial>>,
}

impl MaxwellDictionary {
    pub fn new(max_order: usize) -> Self {
        let ctx = JetContext::single(2, max_order);
        let phi = ctx.jet_block(0, 0).unwrap();
        let phibar = ctx.conj_jet_block(0, 0).unwrap();
        let sig = sigma_st_lower_raised();
        let f_img = TensorArray::from_fn(2, |idx| {
            let (i, j) = (idx[0], idx[1]);
            let mut acc = Polynomial::zero();
            for a in 0..2 {
                for ap in 0..2 {
                    for b in 0..2 {
                        for bp in 0..2 {
                            let coeff = &sig[i][a][ap] * &sig[j][b][bp];
                            if coeff.is_zero() {
                                continue;
                            }
                            let mut term = Polynomial::zero();
                            if eps(ap, bp) != 0 {
                                term = term.add(&phi.get(&[a, b], &[]).scale(
                                    &FieldElement::from_int(eps(ap, bp)),
                                ));
                            }
                            if eps(a, b) != 0 {
                                term = term.add(&phibar.get(&[], &[ap, bp]).scale(
                                    &FieldElement::from_int(eps(a, b)),
                                ));
                            }
                            acc = acc.add(&term.scale(&coeff));
                        }
                    }
                }
            }
            acc
        });
        let dual_img = hodge_dual(&f_img).expect("F image is antisymmetric");
        MaxwellDictionary {
            ctx,
            f_img,
            dual_img,
            jet_cache: std::cell::RefCell::new(std::collections::HashMap::new()),
        }
    }

    /// On-shell image of F_{ij}.
    pub fn f(&self, i: usize, j: usize) -> &Polynomial {
        self.f_img.get(&[i, j])
    }

    /// On-shell image of *F_{ij}.
    pub fn f_dual(&self, i: usize, j: usize) -> &Polynomial {
        self.dual_img.get(&[i, j])
    }

    pub fn f_image(&self) -> &TensorArray {
        &self.f_img
    }

    pub fn f_dual_image(&self) -> &TensorArray {
        &self.dual_img
    }

    /// Spacetime total derivative D_k = sigma_k^{CC'} D_{CC'}.
    pub fn spacetime_derivative(&self, g: &Polynomial, k: usize) -> Polynomial {
        let sig = sigma_st_lower_raised();
        let mut acc = Polynomial::zero();
        for c in 0..2 {
            for cp in 0..2 {
                if sig[k][c][cp].is_zero() {
                    continue;
                }
                let d = self
                    .ctx
                    .total_derivative(g, c, cp)
                    .expect("dictionary derivative within max order");
                acc = acc.add(&d.scale(&sig[k][c][cp]));
            }
        }
        acc
    }

    /// Image of a repeated F-jet F_{ij,k1..kp}.
    pub fn f_jet(&self, i: usize, j: usize, ks: &[usize]) -> Polynomial {
        self.jet_memo(false, i, j, ks)
    }

    /// Image of a dual jet (*F)_{ij,k1..kp}.
    pub fn f_dual_jet(&self, i: usize, j: usize, ks: &[usize]) -> Polynomial {
        self.jet_memo(true, i, j, ks)
    }

    fn jet_memo(&self, dual: bool, i: usize, j: usize, ks: &[usize]) -> Polynomial {
        let mut sorted = ks.to_vec();
        sorted.sort_unstable();
        let key = (dual, i, j, sorted);
        if let Some(hit) = self.jet_cache.borrow().get(&key) {
            return hit.clone();
        }
        let value = match key.3.split_last() {
            None => {
                if dual {
                    self.f_dual(i, j).clone()
                } else {
                    self.f(i, j).clone()
                }
            }
            Some((&last, rest)) => {
                let inner = self.jet_memo(dual, i, j, rest);
                self.spacetime_derivative(&inner, last)
            }
        };
        self.jet_cache
            .borrow_mut()
            .insert(key, value.clone());
        value
    }

    /// Determining-equation residuals D^j Q_{ij} of a rank-2 tensor of
    /// on-shell polynomials (one polynomial per free index i).
    pub fn divergence_residual(&self, q: &TensorArray) -> Vec<Polynomial> {
        (0..4)
            .map(|i| {
                let mut acc = Polynomial::zero();
                for j in 0..4 {
                    let d = self.spacetime_derivative(q.get(&[i, j]), j);
                    acc = acc.add(&d.scale(&FieldElement::from_int(eta(j, j))));
                }
                acc
            })
            .collect()
    }
}

/// Which sign in (F - s*i*(*F))/2 produces the pure conjugate image
/// eps_{KL} phibar_{K'L'}; exposed so a regression test can freeze it.
pub fn discover_duality_sign() -> Option<i64> {
    let dict = MaxwellDictionary::new(1);
    let phibar = dict.ctx.conj_jet_block(0, 0).unwrap();
    let expected = epsilon_array(Group::Unprimed, Variance::Lower).outer(&phibar);
    for sign in [1i64, -1] {
        let minus = dict
            .f_img
            .add(&dict.dual_img.scale(&(FieldElement::i() * FieldElement::from_int(-sign))))
            .scale(&FieldElement::from_ratio(1, 2));
        if spinor_rep(&minus) == expected.to_dense() {
            return Some(sign);
        }
    }
    None
}

/// The anti-self-dual part under the frozen convention.
pub fn anti_self_dual_image(dict: &MaxwellDictionary) -> TensorArray {
    dict.f_img
        .add(
            &dict
                .dual_img
                .scale(&(FieldElement::i() * FieldElement::from_int(-DUALITY_SIGN))),
        )
        .scale(&FieldElement::from_ratio(1, 2))
}

/// Positive-chirality spinor part of an antisymmetric rank-2 image:
/// Q_{AB} = (1/2) eps^{A'B'} Q_{AA'BB'}.
pub fn spinor_positive_part(q: &TensorArray) -> SpinorArray {
    let rep = spinor_rep(q); // (2,2) all lower
    eps_pair_trace(&rep, Group::Primed, 0, 1).scale(&FieldElement::from_ratio(1, 2))
}

/// Tensorial conformal symmetry Z_{ij}[F;xi] = xi^k F_{ij,k}
/// - 2 del_{[i} xi^k F_{j]k}; `on_dual` applies the same formula to *F.
pub fn build_tensor_conformal(
    dict: &MaxwellDictionary,
    ckv: &crate::killing::ConformalKillingVector,
    on_dual: bool,
) -> TensorArray {
    let jet = |i: usize, j: usize, ks: &[usize]| -> Polynomial {
        if on_dual {
            dict.f_dual_jet(i, j, ks)
        } else {
            dict.f_jet(i, j, ks)
        }
    };
    TensorArray::from_fn(2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = Polynomial::zero();
        for k in 0..4 {
            acc = acc.add(&ckv.xi[k].mul(&jet(i, j, &[k])));
            // -2 del_[i xi^k F_j]k = -(del_i xi^k F_jk - del_j xi^k F_ik)
            let di = ckv.xi[k].partial(&Variable::coord(i));
            let dj = ckv.xi[k].partial(&Variable::coord(j));
            acc = acc.sub(&di.mul(&jet(j, k, &[])));
            acc = acc.add(&dj.mul(&jet(i, k, &[])));
        }
        acc
    })
}

/// Constant coefficient tensors a^h with the symmetries required by the
/// degree-h polynomial tensors; `entries` is the dense rank-2/3/4 data.
#[derive(Clone, Debug)]
pub struct WeylCoefficients {
    pub h: usize,
    rank: usize,
    entries: Vec<FieldElement>,
}

impl WeylCoefficients {
    pub fn rank_for(h: usize) -> usize {
        match h {
            0 | 4 => 4,
            1 | 3 => 3,
            2 => 2,
            _ => panic!("h must be 0..=4"),
        }
    }

    pub fn new(h: usize, entries: Vec<FieldElement>) -> Result<Self, TensorError> {
        let rank = Self::rank_for(h);
        assert_eq!(entries.len(), 4usize.pow(rank as u32));
        let w = WeylCoefficients { h, rank, entries };
        w.validate()?;
        Ok(w)
    }

    pub fn get(&self, idx: &[usize]) -> &FieldElement {
        debug_assert_eq!(idx.len(), self.rank);
        let mut f = 0usize;
        for &i in idx {
            f = f * 4 + i;
        }
        &self.entries[f]
    }

    /// Dense tensor view of the coefficient data.
    pub fn as_tensor(&self) -> TensorArray {
        TensorArray::from_fn(self.rank, |idx| Polynomial::constant(self.get(idx).clone()))
    }

    fn validate(&self) -> Result<(), TensorError> {
        let t = self.as_tensor();
        let fail = |name: &str| Err(TensorError::ConstraintViolation(name.to_string()));
        match self.h {
            0 | 4 => {
                if !t.antisym_pair(0, 1).sub(&t).is_zero() {
                    return fail("a_{ijkl} antisymmetric in [ij]");
                }
                if !t.antisym_pair(2, 3).sub(&t).is_zero() {
                    return fail("a_{ijkl} antisymmetric in [kl]");
                }
                if !t.swap_slots(0, 2).swap_slots(1, 3).sub(&t).is_zero() {
                    return fail("a_{ijkl} = a_{klij}");
                }
                if !t.antisymmetrize_all().is_zero() {
                    return fail("a_{[ijkl]} = 0");
                }
                if !t.trace_eta(1, 3).is_zero() {
                    return fail("a_{ijk}{}^j = 0");
                }
            }
            1 | 3 => {
                if !t.antisym_pair(1, 2).sub(&t).is_zero() {
                    return fail("a_{ijk} antisymmetric in [jk]");
                }
                if !t.antisymmetrize_all().is_zero() {
                    return fail("a_{[ijk]} = 0");
                }
                if !t.trace_eta(0, 2).is_zero() {
                    return fail("a_{ji}{}^j = 0");
                }
            }
            2 => {
                if !t.swap_slots(0, 1).sub(&t).is_zero() {
                    return fail("a_{ij} symmetric");
                }
                if !t.trace_eta(0, 1).is_zero() {
                    return fail("a_i{}^i = 0");
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    /// Rational basis of the admissible coefficient space.
    pub fn admissible_basis(h: usize) -> Vec<WeylCoefficients> {
        let rank = Self::rank_for(h);
        let n = 4usize.pow(rank as u32);
        // constraint rows over the n unknowns
        let mut rows: Vec<Vec<(u32, crate::field::Rational)>> = Vec::new();
        let r1 = crate::field::Rational::from_integer(1.into());
        let push_eq = |rows: &mut Vec<Vec<(u32, crate::field::Rational)>>,
                       terms: Vec<(usize, i64)>| {
            let mut row: Vec<(u32, crate::field::Rational)> = Vec::new();
            for (col, c) in terms {
                row.push((col as u32, crate::field::Rational::from_integer(c.into())));
            }
            rows.push(row);
        };
        let _ = r1;
        let flat = |idx: &[usize]| -> usize {
            let mut f = 0usize;
            for &i in idx {
                f = f * 4 + i;
            }
            f
        };
        let mut idx = vec![0usize; rank];
        for fl in 0..n {
            decode_tensor_index(fl, rank, &mut idx);
            match h {
                0 | 4 => {
                    let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
                    push_eq(&mut rows, vec![(fl, 1), (flat(&[j, i, k, l]), 1)]);
                    push_eq(&mut rows, vec![(fl, 1), (flat(&[i, j, l, k]), 1)]);
                    push_eq(&mut rows, vec![(fl, 1), (flat(&[k, l, i, j]), -1)]);
                }
                1 | 3 => {
                    let (i, j, k) = (idx[0], idx[1], idx[2]);
                    push_eq(&mut rows, vec![(fl, 1), (flat(&[i, k, j]), 1)]);
                    // total antisymmetrization zero
                    push_eq(
                        &mut rows,
                        vec![
                            (flat(&[i, j, k]), 1),
                            (flat(&[j, k, i]), 1),
                            (flat(&[k, i, j]), 1),
                            (flat(&[j, i, k]), -1),
                            (flat(&[i, k, j]), -1),
                            (flat(&[k, j, i]), -1),
                        ],
                    );
                }
                2 => {
                    let (i, j) = (idx[0], idx[1]);
                    push_eq(&mut rows, vec![(fl, 1), (flat(&[j, i]), -1)]);
                }
                _ => unreachable!(),
            }
        }
        // traces and, for rank 4, total antisymmetrization
        match h {
            0 | 4 => {
                for i in 0..4 {
                    for k in 0..4 {
                        let mut terms = Vec::new();
                        for m in 0..4 {
                            terms.push((flat(&[i, m, k, m]), eta(m, m)));
                        }
                        push_eq(&mut rows, terms);
                    }
                }
                // a_{[ijkl]} = 0: one equation per index set; enough to use
                // the full antisymmetrization at each index tuple
                let perms = permutations(4);
                let mut idx4 = vec![0usize; 4];
                for fl in 0..n {
                    decode_tensor_index(fl, 4, &mut idx4);
                    let mut terms = Vec::new();
                    for (perm, sign) in &perms {
                        let j: Vec<usize> = perm.iter().map(|&p| idx4[p]).collect();
                        terms.push((flat(&j), *sign));
                    }
                    push_eq(&mut rows, terms);
                }
            }
            1 | 3 => {
                for i in 0..4 {
                    let mut terms = Vec::new();
                    for m in 0..4 {
                        terms.push((flat(&[m, i, m]), eta(m, m)));
                    }
                    push_eq(&mut rows, terms);
                }
            }
            2 => {
                let mut terms = Vec::new();
                for m in 0..4 {
                    terms.push((flat(&[m, m]), eta(m, m)));
                }
                push_eq(&mut rows, terms);
            }
            _ => unreachable!(),
        }
        let mut matrix: SparseMatrix<crate::field::Rational> = SparseMatrix::new(n);
        for mut row in rows {
            // merge duplicate columns
            row.sort_by_key(|(c, _)| *c);
            let mut merged: Vec<(u32, crate::field::Rational)> = Vec::new();
            for (c, v) in row {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv = &*lv + &v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !num_traits::Zero::is_zero(v));
            matrix.push_row(merged);
        }
        matrix
            .nullspace()
            .into_iter()
            .map(|v| {
                let entries: Vec<FieldElement> =
                    v.into_iter().map(FieldElement::from_rational).collect();
                WeylCoefficients::new(h, entries).expect("nullspace satisfies constraints")
            })
            .collect()
    }

    /// Random rational combination of the admissible basis.
    pub fn random_admissible(h: usize, rng: &mut impl Rng) -> WeylCoefficients {
        let basis = Self::admissible_basis(h);
        loop {
            let mut entries = vec![FieldElement::zero(); basis[0].entries.len()];
            let mut nonzero = false;
            for b in &basis {
                let c: i64 = rng.gen_range(-3..=3);
                if c != 0 {
                    nonzero = true;
                }
                for (e, be) in entries.iter_mut().zip(&b.entries) {
                    *e += &FieldElement::from_int(c) * be;
                }
            }
            if nonzero {
                return WeylCoefficients::new(h, entries).expect("combination stays admissible");
            }
        }
    }
}

fn x_upper(i: usize) -> Polynomial {
    Polynomial::var(Variable::coord(i))
}

fn x_lower(i: usize) -> Polynomial {
    x_upper(i).scale(&FieldElement::from_int(eta(i, i)))
}

fn x_dot_x() -> Polynomial {
    let mut acc = Polynomial::zero();
    for i in 0..4 {
        acc = acc.add(&x_upper(i).mul(&x_lower(i)));
    }
    acc
}

/// The degree-h polynomial tensors p^h_{ijkl}; the result is validated to
/// carry the symmetries of a Weyl conformal curvature tensor.
pub fn build_p(a: &WeylCoefficients) -> Result<TensorArray, TensorError> {
    let h = a.h;
    let xx = x_dot_x();
    let raw = match h {
        0 => TensorArray::from_fn(4, |idx| Polynomial::constant(a.get(idx).clone())),
        1 => {
            // x_[i a_j]kl + x_[k a_l]ij + (eta_[i|[k a_l]|j]n + eta_[k|[i a_j]|l]n) x^n
            let t1 = TensorArray::from_fn(4, |id| {
                x_lower(id[0]).scale(a.get(&[id[1], id[2], id[3]]))
            })
            .antisym_pair(0, 1);
            let t2 = TensorArray::from_fn(4, |id| {
                x_lower(id[2]).scale(a.get(&[id[3], id[0], id[1]]))
            })
            .antisym_pair(2, 3);
            let t3raw = TensorArray::from_fn(4, |id| {
                let mut acc = Polynomial::zero();
                for n in 0..4 {
                    if eta(id[0], id[2]) != 0 {
                        acc = acc.add(
                            &x_upper(n)
                                .scale(a.get(&[id[3], id[1], n]))
                                .scale(&FieldElement::from_int(eta(id[0], id[2]))),
                        );
                    }
                }
                acc
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3);
            let t3b = t3raw.swap_slots(0, 2).swap_slots(1, 3);
            t1.add(&t2).add(&t3raw).add(&t3b)
        }
        2 => {
            // a_[i|[k x_l]| x_j] - 1/2 eta_[i|[k a_l]|j] x.x
            // + 1/2 (eta_[i|[k a_l]n| x_j] + eta_[k|[i a_j]n| x_l]) x^n
            // - 1/6 eta_i[k eta_l]j a_mn x^m x^n
            let t1 = TensorArray::from_fn(4, |id| {
                x_lower(id[3]).mul(&x_lower(id[1])).scale(a.get(&[id[0], id[2]]))
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3);
            let t2 = TensorArray::from_fn(4, |id| {
                if eta(id[0], id[2]) != 0 {
                    xx.scale(a.get(&[id[3], id[1]]))
                        .scale(&FieldElement::from_int(eta(id[0], id[2])))
                } else {
                    Polynomial::zero()
                }
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3)
            .scale(&FieldElement::from_ratio(-1, 2));
            let t3raw = TensorArray::from_fn(4, |id| {
                let mut acc = Polynomial::zero();
                if eta(id[0], id[2]) != 0 {
                    for n in 0..4 {
                        acc = acc.add(
                            &x_upper(n)
                                .mul(&x_lower(id[1]))
                                .scale(a.get(&[id[3], n]))
                                .scale(&FieldElement::from_int(eta(id[0], id[2]))),
                        );
                    }
                }
                acc
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3);
            let t3 = t3raw
                .add(&t3raw.swap_slots(0, 2).swap_slots(1, 3))
                .scale(&FieldElement::from_ratio(1, 2));
            let mut q = Polynomial::zero();
            for m in 0..4 {
                for n in 0..4 {
                    q = q.add(&x_upper(m).mul(&x_upper(n)).scale(a.get(&[m, n])));
                }
            }
            let t4 = TensorArray::from_fn(4, |id| {
                let s = eta(id[0], id[2]) * eta(id[3], id[1]);
                if s != 0 {
                    q.scale(&FieldElement::from_int(s))
                } else {
                    Polynomial::zero()
                }
            })
            .antisym_pair(2, 3)
            .scale(&FieldElement::from_ratio(-1, 6));
            t1.add(&t2).add(&t3).add(&t4)
        }
        3 => {
            // (x_[i a_j]n[k x_l] + x_[k a_l]n[i x_j]) x^n
            // + 1/4 (x_[i a_j]kl + x_[k a_l]ij) x.x
            // + 1/2 (a_mn[i eta_j][k x_l] + a_mn[k eta_l][i x_j]) x^m x^n
            // + 1/4 (a_[i|m[k eta_l]|j] + a_[k|m[i eta_j]|l]) x^m x.x
            let t1raw = TensorArray::from_fn(4, |id| {
                let mut acc = Polynomial::zero();
                for n in 0..4 {
                    acc = acc.add(
                        &x_lower(id[0])
                            .mul(&x_lower(id[3]))
                            .mul(&x_upper(n))
                            .scale(a.get(&[id[1], n, id[2]])),
                    );
                }
                acc
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3);
            let t1 = t1raw.add(&t1raw.swap_slots(0, 2).swap_slots(1, 3));
            let t2a = TensorArray::from_fn(4, |id| {
                x_lower(id[0]).mul(&xx).scale(a.get(&[id[1], id[2], id[3]]))
            })
            .antisym_pair(0, 1);
            let t2b = TensorArray::from_fn(4, |id| {
                x_lower(id[2]).mul(&xx).scale(a.get(&[id[3], id[0], id[1]]))
            })
            .antisym_pair(2, 3);
            let t2 = t2a.add(&t2b).scale(&FieldElement::from_ratio(1, 4));
            let t3raw = TensorArray::from_fn(4, |id| {
                let mut acc = Polynomial::zero();
                if eta(id[1], id[2]) != 0 {
                    for m in 0..4 {
                        for n in 0..4 {
                            acc = acc.add(
                                &x_upper(m)
                                    .mul(&x_upper(n))
                                    .mul(&x_lower(id[3]))
                                    .scale(a.get(&[m, n, id[0]]))
                                    .scale(&FieldElement::from_int(eta(id[1], id[2]))),
                            );
                        }
                    }
                }
                acc
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3);
            let t3 = t3raw
                .add(&t3raw.swap_slots(0, 2).swap_slots(1, 3))
                .scale(&FieldElement::from_ratio(1, 2));
            let t4raw = TensorArray::from_fn(4, |id| {
                let mut acc = Polynomial::zero();
                if eta(id[3], id[1]) != 0 {
                    for m in 0..4 {
                        acc = acc.add(
                            &x_upper(m)
                                .mul(&xx)
                                .scale(a.get(&[id[0], m, id[2]]))
                                .scale(&FieldElement::from_int(eta(id[3], id[1]))),
                        );
                    }
                }
                acc
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3);
            let t4 = t4raw
                .add(&t4raw.swap_slots(0, 2).swap_slots(1, 3))
                .scale(&FieldElement::from_ratio(1, 4));
            t1.add(&t2).add(&t3).add(&t4)
        }
        4 => {
            // (a_m[i|n[k x_l]| x_j] - 1/2 a_m[i|n[k eta_l]|j] x.x) x^m x^n
            // - 1/16 a_ijkl (x.x)^2
            let t1 = TensorArray::from_fn(4, |id| {
                let mut acc = Polynomial::zero();
                for m in 0..4 {
                    for n in 0..4 {
                        acc = acc.add(
                            &x_lower(id[3])
                                .mul(&x_lower(id[1]))
                                .mul(&x_upper(m))
                                .mul(&x_upper(n))
                                .scale(a.get(&[m, id[0], n, id[2]])),
                        );
                    }
                }
                acc
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3);
            let t2 = TensorArray::from_fn(4, |id| {
                let mut acc = Polynomial::zero();
                if eta(id[3], id[1]) != 0 {
                    for m in 0..4 {
                        for n in 0..4 {
                            acc = acc.add(
                                &xx.mul(&x_upper(m))
                                    .mul(&x_upper(n))
                                    .scale(a.get(&[m, id[0], n, id[2]]))
                                    .scale(&FieldElement::from_int(eta(id[3], id[1]))),
                            );
                        }
                    }
                }
                acc
            })
            .antisym_pair(0, 1)
            .antisym_pair(2, 3)
            .scale(&FieldElement::from_ratio(-1, 2));
            let t3 = TensorArray::from_fn(4, |id| {
                xx.mul(&xx)
                    .scale(a.get(id))
                    .scale(&FieldElement::from_ratio(-1, 16))
            });
            t1.add(&t2).add(&t3)
        }
        _ => panic!("h must be 0..=4"),
    };
    weyl_symmetry_violation(&raw).map_or(Ok(raw), |v| Err(TensorError::ConstraintViolation(v)))
}

/// Check the Weyl-curvature symmetries of a rank-4 tensor; returns the name
/// of the first violated identity.
pub fn weyl_symmetry_violation(p: &TensorArray) -> Option<String> {
    if !p.antisym_pair(0, 1).sub(p).is_zero() {
        return Some("p_{ijkl} antisymmetric in [ij]".into());
    }
    if !p.antisym_pair(2, 3).sub(p).is_zero() {
        return Some("p_{ijkl} antisymmetric in [kl]".into());
    }
    if !p.swap_slots(0, 2).swap_slots(1, 3).sub(p).is_zero() {
        return Some("p_{ijkl} = p_{klij}".into());
    }
    if !p.antisymmetrize_all().is_zero() {
        return Some("p_{[ijkl]} = 0".into());
    }
    if !p.trace_eta(1, 3).is_zero() {
        return Some("p_{ijk}{}^j = 0".into());
    }
    None
}

/// Double epsilon trace used to extract the primed spinor part of a rank-4
/// Weyl-symmetric tensor: contract the two unprimed pairs.
fn double_unprimed_trace(rep: &SpinorArray) -> SpinorArray {
    // unprimed slots [I,J,K,L] -> eps^{IJ}, eps^{KL}
    let first = eps_pair_trace(rep, Group::Unprimed, 0, 1);
    eps_pair_trace(&first, Group::Unprimed, 0, 1)
}

/// Spinor projection pi^h_{I'J'K'L'} = (1/4) p_{P(I'}{}^P{}_{J'|Q|K'}{}^Q{}_{L')}
/// of a rank-4 polynomial tensor; all-lower primed slots.
pub fn spinor_projection(p: &TensorArray) -> SpinorArray {
    let rep = spinor_rep(p);
    double_unprimed_trace(&rep)
        .symmetrize(SymGroup::Primed)
        .scale(&FieldElement::from_ratio(1, 4))
}

/// The projection as a Killing spinor of type (0,4) (primed slots raised).
pub fn projection_killing_spinor(p: &TensorArray) -> KillingSpinor {
    let low = spinor_projection(p);
    let raised = low.eps_move_all(Group::Primed, Variance::Upper).unwrap();
    KillingSpinor {
        k: 0,
        l: 4,
        degree: raised
            .components()
            .iter()
            .map(|q| q.coordinate_degree())
            .max()
            .unwrap_or(0),
        comps: raised.to_symmetric().expect("projection is symmetric"),
    }
}

/// Constant symmetric spinors alpha^h extracted from the coefficient tensors.
pub fn alpha_from_coefficients(a: &WeylCoefficients) -> SpinorArray {
    match a.h {
        0 | 4 => {
            // alpha_{I'J'K'L'} = (1/4) eps^{IJ} eps^{KL} a_{II'JJ'KK'LL'}
            let rep = spinor_rep(&a.as_tensor());
            double_unprimed_trace(&rep).scale(&FieldElement::from_ratio(1, 4))
        }
        1 | 3 => {
            // alpha_{II'J'K'} = (1/2) eps^{JK} a_{II'JJ'KK'}
            let rep = spinor_rep(&a.as_tensor()); // unprimed [I,J,K], primed [I',J',K']
            eps_pair_trace(&rep, Group::Unprimed, 1, 2).scale(&FieldElement::from_ratio(1, 2))
        }
        2 => spinor_rep(&a.as_tensor()),
        _ => unreachable!(),
    }
}

/// Closed forms of the projections: constant alpha contracted with mixed
/// coordinate spinors and symmetrized over primed slots.
pub fn closed_form_projection(a: &WeylCoefficients) -> SpinorArray {
    let alpha = alpha_from_coefficients(a);
    let xmix = coordinate_spinor()
        .eps_move(Group::Primed, 0, Variance::Lower)
        .unwrap(); // x^L{}_{L'}
    let contract_powers = |alpha: &SpinorArray, n: usize| -> SpinorArray {
        // contract n unprimed lower slots of alpha against n copies of x^L_{L'}
        let mut term = alpha.clone();
        for _ in 0..n {
            let prod = xmix.outer(&term); // unprimed: [L-up, alpha lows..]
            term = prod.contract(Group::Unprimed, 0, 1).unwrap();
        }
        term
    };
    match a.h {
        0 => alpha,
        1 => {
            // alpha^1_{L(I'J'K'} x^L_{L')} up to the frozen sign
            contract_powers(&alpha, 1)
                .symmetrize(SymGroup::Primed)
                .scale(&FieldElement::from_int(PROJECTION_H1_SIGN))
        }
        2 => {
            // (1/4) alpha^2_{KL(I'J'} x^K_{K'} x^L_{L')}
            contract_powers(&alpha, 2)
                .symmetrize(SymGroup::Primed)
                .scale(&FieldElement::from_ratio(1, 4))
        }
        3 => {
            // -(1/2) conj(alpha^3)_{JKL(I'} x^J_{J'} x^K_{K'} x^L_{L')}
            let bar = alpha.conjugate();
            contract_powers(&bar, 3)
                .symmetrize(SymGroup::Primed)
                .scale(&FieldElement::from_ratio(-1, 2))
        }
        4 => {
            // (1/4) conj(alpha^4)_{IJKL} x^I_{I'}..x^L_{L'}
            let bar = alpha.conjugate();
            contract_powers(&bar, 4)
                .symmetrize(SymGroup::Primed)
                .scale(&FieldElement::from_ratio(1, 4))
        }
        _ => unreachable!(),
    }
}

/// Tensorial chiral symmetry W_{ij}[F;p^h]: the four-term contraction of the
/// polynomial tensor with F-jets, coefficients 1, 1, 3/5, 3/5.
pub fn build_maxwell_chiral(
    dict: &MaxwellDictionary,
    p: &TensorArray,
    on_dual: bool,
) -> TensorArray {
    let jet = |i: usize, j: usize, ks: &[usize]| -> Polynomial {
        if on_dual {
            dict.f_dual_jet(i, j, ks)
        } else {
            dict.f_jet(i, j, ks)
        }
    };
    let three_fifth = FieldElement::from_ratio(3, 5);
    // precompute raised F-jet images: F^{kl}, F^{kl},^m and F^{kl},^m{}_j
    let raw = TensorArray::from_fn(2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = Polynomial::zero();
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    let raise = eta(k, k) * eta(l, l) * eta(m, m);
                    // term 1: p_{klmi} F^{kl}{}_,{}^m{}_j
                    let c1 = p.get(&[k, l, m, i]);
                    if !c1.is_zero() {
                        acc = acc.add(
                            &c1.mul(&jet(k, l, &[m, j]))
                                .scale(&FieldElement::from_int(raise)),
                        );
                    }
                    // term 2: del_i p_{jmkl} F^{kl}{}_,{}^m
                    let dp = p.get(&[j, m, k, l]).partial(&Variable::coord(i));
                    if !dp.is_zero() {
                        acc = acc.add(
                            &dp.mul(&jet(k, l, &[m]))
                                .scale(&FieldElement::from_int(raise)),
                        );
                    }
                    // term 3: (3/5) del^m p_{klmi} F^{kl}{}_{,j}
                    let dpm = p
                        .get(&[k, l, m, i])
                        .partial(&Variable::coord(m))
                        .scale(&FieldElement::from_int(eta(m, m)));
                    if !dpm.is_zero() {
                        acc = acc.add(
                            &dpm.mul(&jet(k, l, &[j]))
                                .scale(&three_fifth)
                                .scale(&FieldElement::from_int(eta(k, k) * eta(l, l))),
                        );
                    }
                    // term 4: (3/5) del^m del_i p_{jmkl} F^{kl}
                    let dd = p
                        .get(&[j, m, k, l])
                        .partial(&Variable::coord(i))
                        .partial(&Variable::coord(m))
                        .scale(&FieldElement::from_int(eta(m, m)));
                    if !dd.is_zero() {
                        acc = acc.add(
                            &dd.mul(&jet(k, l, &[]))
                                .scale(&three_fifth)
                                .scale(&FieldElement::from_int(eta(k, k) * eta(l, l))),
                        );
                    }
                }
            }
        }
        acc
    });
    // the display is antisymmetrized over [i j]
    raw.antisym_pair(0, 1)
}

/// Number of independent symmetries of the tensorial system of order r >= 2:
/// (r+1)(r+3)(r^4 + 8 r^3 + 17 r^2 + 4 r + 6)/9; lower orders delegate to the
/// spinorial count at 2s = 2.
pub fn maxwell_dimension(r: usize) -> u64 {
    if r < 2 {
        return crate::symmetry::dimension_d_r(2, r);
    }
    let r = r as u64;
    let prod = (r + 1) * (r + 3) * (r * r * r * r + 8 * r * r * r + 17 * r * r + 4 * r + 6);
    debug_assert_eq!(prod % 9, 0);
    prod / 9
}

/// The Killing-contraction identity of the chiral construction, checked for
/// a type-(0,4) Killing spinor with lower primed slots against the order-1
/// conjugate jet block: for all free I', J',
/// del_{P(I'} pi_{J')K'L'M'} phibar^{K'L'M'P} =
/// (3/5) del_P^{P'} pi_{K'L'P'(I'} phibar_{J')}{}^{K'L'P}.
pub fn ij_symm_derivative_identity_holds(ctx: &JetContext, pi_lower: &SpinorArray) -> bool {
    assert_eq!(pi_lower.unprimed_rank(), 0);
    assert_eq!(pi_lower.primed_rank(), 4);
    let v1 = ctx.conj_jet_block(0, 1).unwrap(); // (1 up-unprimed, 3 lows-primed)
    let v1_up = v1.eps_move_all(Group::Primed, Variance::Upper).unwrap();
    // phibar with K',L' raised and the third primed slot kept low
    let v1_two_up = v1
        .eps_move(Group::Primed, 0, Variance::Upper)
        .unwrap()
        .eps_move(Group::Primed, 1, Variance::Upper)
        .unwrap();
    let lhs_half = |i: usize, j: usize| -> Polynomial {
        let mut acc = Polynomial::zero();
        for p in 0..2 {
            for kk in 0..2 {
                for ll in 0..2 {
                    for mm in 0..2 {
                        let dpi = crate::jet::coord_derivative(
                            pi_lower.get(&[], &[j, kk, ll, mm]),
                            p,
                            i,
                        )
                        .unwrap();
                        acc = acc.add(&dpi.mul(v1_up.get(&[p], &[kk, ll, mm])));
                    }
                }
            }
        }
        acc
    };
    let rhs_half = |i: usize, j: usize| -> Polynomial {
        let mut acc = Polynomial::zero();
        for p in 0..2 {
            for pp in 0..2 {
                for kk in 0..2 {
                    for ll in 0..2 {
                        let dpi = crate::jet::coord_derivative_raised(
                            pi_lower.get(&[], &[kk, ll, pp, i]),
                            p,
                            pp,
                        )
                        .unwrap();
                        acc = acc.add(&dpi.mul(v1_two_up.get(&[p], &[kk, ll, j])));
                    }
                }
            }
        }
        acc.scale(&FieldElement::from_ratio(3, 5))
    };
    for i in 0..2 {
        for j in 0..2 {
            let lhs = lhs_half(i, j).add(&lhs_half(j, i));
            let rhs = rhs_half(i, j).add(&rhs_half(j, i));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Shortcut identity used by the projection: for h_{ijkl} = f_{[ij][kl]},
/// the double unprimed trace of h equals the pairwise primed symmetrization
/// of the double trace of f.
pub fn shortcut_identity_holds(f: &TensorArray) -> bool {
    let h = f.antisym_pair(0, 1).antisym_pair(2, 3);
    let lhs = double_unprimed_trace(&spinor_rep(&h));
    let rep = double_unprimed_trace(&spinor_rep(f));
    // symmetrize the (I'J') and (K'L') pairs separately
    let sympair = |t: &SpinorArray, s1: usize, s2: usize| -> SpinorArray {
        let swapped = SpinorArray::from_fn(0, 4, Variance::Lower, Variance::Lower, |_, p| {
            let mut q = p.to_vec();
            q.swap(s1, s2);
            t.get(&[], &q).clone()
        });
        t.add(&swapped).scale(&FieldElement::from_ratio(1, 2))
    };
    let rhs = sympair(&sympair(&rep, 0, 1), 2, 3);
    lhs == rhs.to_dense()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::killing::{conformal_killing_basis, killing_residual};
    use crate::symmetry::{build_chiral, build_conformal, verify_symmetry, Characteristic};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(n: i64) -> Polynomial {
        Polynomial::constant(FieldElement::from_int(n))
    }

    fn random_antisym(rng: &mut ChaCha8Rng) -> TensorArray {
        TensorArray::from_fn(2, |idx| c(rng.gen_range(-5..=5) * ((idx[0] + 2 * idx[1]) as i64 % 3)))
            .antisym_pair(0, 1)
    }

    #[test]
    fn hodge_squares_to_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..4 {
            let f = random_antisym(&mut rng);
            let dd = hodge_dual(&hodge_dual(&f).unwrap()).unwrap();
            assert_eq!(dd, f.scale(&FieldElement::from_int(-1)));
        }
    }

    #[test]
    fn hodge_rejects_non_antisymmetric() {
        let t = TensorArray::from_fn(2, |idx| c((idx[0] + 1) as i64));
        assert!(matches!(hodge_dual(&t), Err(TensorError::NotAntisymmetric)));
    }

    #[test]
    fn hodge_is_lorentz_equivariant() {
        // rational boost in the (0,1) plane: cosh = 5/3, sinh = 4/3
        let ch = FieldElement::from_ratio(5, 3);
        let sh = FieldElement::from_ratio(4, 3);
        let lambda = |i: usize, j: usize| -> FieldElement {
            match (i, j) {
                (0, 0) | (1, 1) => ch.clone(),
                (0, 1) | (1, 0) => sh.clone(),
                (2, 2) | (3, 3) => FieldElement::one(),
                _ => FieldElement::zero(),
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_antisym(&mut rng);
        let transform = |t: &TensorArray| -> TensorArray {
            TensorArray::from_fn(2, |idx| {
                let mut acc = Polynomial::zero();
                for k in 0..4 {
                    for l in 0..4 {
                        let coeff = &lambda(idx[0], k) * &lambda(idx[1], l);
                        if !coeff.is_zero() {
                            acc = acc.add(&t.get(&[k, l]).scale(&coeff));
                        }
                    }
                }
                acc
            })
        };
        let lhs = hodge_dual(&transform(&f)).unwrap();
        let rhs = transform(&hodge_dual(&f).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn duality_sign_is_frozen() {
        assert_eq!(discover_duality_sign(), Some(DUALITY_SIGN));
    }

    #[test]
    fn anti_self_dual_image_is_pure_conjugate() {
        let dict = MaxwellDictionary::new(1);
        let minus = anti_self_dual_image(&dict);
        let phibar = dict.ctx.conj_jet_block(0, 0).unwrap();
        let expected = epsilon_array(Group::Unprimed, Variance::Lower).outer(&phibar);
        assert_eq!(spinor_rep(&minus), expected.to_dense());
    }

    #[test]
    fn f_image_is_antisymmetric_and_onshell() {
        let dict = MaxwellDictionary::new(2);
        let f = dict.f_image();
        assert!(f.antisym_pair(0, 1).sub(f).is_zero());
        // Maxwell equations hold identically for the image
        for r in dict.divergence_residual(f) {
            assert!(r.is_zero());
        }
        for r in dict.divergence_residual(dict.f_dual_image()) {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn tensor_conformal_matches_spinor_conformal() {
        let dict = MaxwellDictionary::new(3);
        for ckv in conformal_killing_basis() {
            let z = build_tensor_conformal(&dict, &ckv, false);
            let qpos = spinor_positive_part(&z).symmetrize(SymGroup::Unprimed);
            let spin = build_conformal(&dict.ctx, 0, &ckv, false);
            assert_eq!(qpos, spin.comps.to_dense(), "{}", ckv.name);
            // the dual-input construction gives -DUALITY_SIGN * i times it
            let zd = build_tensor_conformal(&dict, &ckv, true);
            let qd = spinor_positive_part(&zd).symmetrize(SymGroup::Unprimed);
            let scale = FieldElement::i() * FieldElement::from_int(-DUALITY_SIGN);
            assert_eq!(qd, spin.comps.scale(&scale).to_dense(), "{} dual", ckv.name);
        }
    }

    #[test]
    fn translation_tensor_conformal_is_pure_transport() {
        let dict = MaxwellDictionary::new(2);
        let ckvs = conformal_killing_basis();
        let z = build_tensor_conformal(&dict, &ckvs[2], false);
        let expect = TensorArray::from_fn(2, |idx| dict.f_jet(idx[0], idx[1], &[2]));
        assert_eq!(z, expect);
    }

    #[test]
    fn admissible_space_dimensions() {
        assert_eq!(WeylCoefficients::admissible_basis(0).len(), 10);
        assert_eq!(WeylCoefficients::admissible_basis(1).len(), 16);
        assert_eq!(WeylCoefficients::admissible_basis(2).len(), 9);
        assert_eq!(WeylCoefficients::admissible_basis(3).len(), 16);
        assert_eq!(WeylCoefficients::admissible_basis(4).len(), 10);
    }

    #[test]
    fn build_p_has_weyl_symmetries_and_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for h in 0..=4usize {
            let a = WeylCoefficients::random_admissible(h, &mut rng);
            let p = build_p(&a).unwrap();
            assert!(weyl_symmetry_violation(&p).is_none(), "h={h}");
            let deg = (0..4usize.pow(4))
                .map(|fl| {
                    let mut idx = vec![0usize; 4];
                    super::decode_tensor_index(fl, 4, &mut idx);
                    p.get(&idx).coordinate_degree()
                })
                .max()
                .unwrap();
            assert_eq!(deg, h, "degree of p^{h}");
        }
    }

    #[test]
    fn p4_carries_minus_one_sixteenth() {
        // the pure (x.x)^2 a-term of p^4 has coefficient -1/16
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = WeylCoefficients::random_admissible(4, &mut rng);
        let p = build_p(&a).unwrap();
        // evaluate at x = (1,0,0,0): x.x = 1; the first display term also
        // contributes there, so isolate instead the monomial (x^0)^4 in the
        // entry p_{2323}, where x_l x_j and x^m x^n factors cannot produce
        // (x^0)^4 from the first two terms with indices j,l in {2,3}.
        let mono = crate::poly::Monomial(vec![(Variable::coord(0), 4)]);
        let entry = p.get(&[2, 3, 2, 3]);
        let coeff = entry.terms.get(&mono).cloned().unwrap_or(FieldElement::zero());
        let a2323 = a.get(&[2, 3, 2, 3]).clone();
        // from term1: a_{m2n2} x^m x^n x_3 x_3 cannot give (x0)^4 (x_3 x_3 fixed);
        // term2 gives -1/2 a_{0202}... eta_{33}-weighted; compare against the
        // full expansion instead: freeze equality with direct evaluation
        let t2_contrib = {
            // -1/2 a_{m[2|n[2} eta_{3]|3]} x.x x^m x^n at the (x0)^4 monomial:
            // antisymmetrized coefficient picks a_{m2n2} eta_{33} pattern
            let mut acc = FieldElement::zero();
            // expand the antisymmetrization over ([2,3],[2,3]) pairs by hand:
            // pairs (i,j)=(2,3), (k,l)=(2,3)
            for (s1, i1, j1) in [(1i64, 2usize, 3usize), (-1, 3, 2)] {
                for (s2, k1, l1) in [(1i64, 2usize, 3usize), (-1, 3, 2)] {
                    if eta(l1, j1) != 0 {
                        let v = a.get(&[0, i1, 0, k1]).clone()
                            * FieldElement::from_int(s1 * s2 * eta(l1, j1));
                        acc += v;
                    }
                }
            }
            // outer weight 1/4 from two antisymmetrizations, -1/2 prefactor,
            // x.x x^0 x^0 has (x0)^4 coefficient 1
            acc * FieldElement::from_ratio(-1, 8)
        };
        let expect = t2_contrib + a2323 * FieldElement::from_ratio(-1, 16);
        assert_eq!(coeff, expect);
    }

    #[test]
    fn projections_match_closed_forms_and_killing() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for h in 0..=4usize {
            let a = WeylCoefficients::random_admissible(h, &mut rng);
            let p = build_p(&a).unwrap();
            let pi = spinor_projection(&p);
            let closed = closed_form_projection(&a);
            assert_eq!(pi, closed.to_dense(), "closed form at h={h}");
            let ks = projection_killing_spinor(&p);
            assert!(killing_residual(&ks.comps).is_zero(), "Killing at h={h}");
        }
    }

    #[test]
    fn shortcut_identity_on_random_tensors() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..3 {
            let f = TensorArray::from_fn(4, |_| c(rng.gen_range(-4..=4)));
            assert!(shortcut_identity_holds(&f));
        }
    }

    #[test]
    fn chiral_tensor_symmetry_full_checks() {
        let dict = MaxwellDictionary::new(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for h in [0usize, 2, 4] {
            let a = WeylCoefficients::random_admissible(h, &mut rng);
            let p = build_p(&a).unwrap();
            let w = build_maxwell_chiral(&dict, &p, false);
            // determining equations through the dictionary
            for r in dict.divergence_residual(&w) {
                assert!(r.is_zero(), "divergence at h={h}");
            }
            let wd = hodge_dual(&w).unwrap();
            for r in dict.divergence_residual(&wd) {
                assert!(r.is_zero(), "dual divergence at h={h}");
            }
            // chirality: *W[F] = -W[*F]
            let w_on_dual = build_maxwell_chiral(&dict, &p, true);
            assert_eq!(wd, w_on_dual.scale(&FieldElement::from_int(-1)), "h={h}");
            // spinor form agrees with the spinorial chiral symmetry
            let pi = projection_killing_spinor(&p);
            let spin = build_chiral(&dict.ctx, 0, &pi).unwrap();
            let qpos = spinor_positive_part(&w).symmetrize(SymGroup::Unprimed);
            assert_eq!(qpos, spin.comps.to_dense(), "spinor form at h={h}");
            // and passes the spinorial determining equation
            let q = Characteristic { family: 0, comps: qpos };
            assert!(verify_symmetry(&dict.ctx, &q).unwrap().pass);
        }
    }

    #[test]
    fn projection_family_spans_all_killing_spinors() {
        // over all h with complexified alpha^2, the projections span the
        // 35-dimensional type-(0,4) space
        let mut rows: Vec<SpinorArray> = Vec::new();
        for h in 0..=4usize {
            for a in WeylCoefficients::admissible_basis(h) {
                let p = build_p(&a).unwrap();
                let pi = spinor_projection(&p);
                if h == 2 {
                    rows.push(pi.scale(&FieldElement::i()));
                }
                rows.push(pi);
            }
        }
        let refs: Vec<&SpinorArray> = rows.iter().collect();
        assert_eq!(crate::killing::killing_span_rank(&refs), 35);
    }

    #[test]
    fn maxwell_dimension_values() {
        assert_eq!(maxwell_dimension(2), 270);
        assert_eq!(maxwell_dimension(3), 1248);
        for r in 2..=6 {
            assert_eq!(maxwell_dimension(r), crate::symmetry::dimension_d_r(2, r));
        }
    }

    #[test]
    fn ij_symm_derivative_identity() {
        let ctx = JetContext::single(2, 2);
        let basis = crate::killing::solve_killing(0, 4, 4);
        for e in basis.elements.iter().take(6) {
            let lower = e.comps.eps_move_all(Group::Primed, Variance::Lower).unwrap();
            assert!(ij_symm_derivative_identity_holds(&ctx, &lower));
        }
    }
}

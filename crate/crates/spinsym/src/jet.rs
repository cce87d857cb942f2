//! On-shell jet ring for massless fields and prolongation machinery.
//!
//! Coordinates on the solution manifold are the four x^i together with the
//! symmetrized derivative spinors of each field family (Penrose exact sets):
//! the order-p block of a spin-s family has 2s+p lower unprimed and p upper
//! primed slots, stored by component counts (j, k), plus the conjugate block
//! with the roles swapped. The total derivative acts by
//!
//!   D_{CC'} u[p](j,k)  =  eps_{D'C'} u[p+1] with C appended unprimed and D'
//!                         appended primed,
//!
//! which encodes that unsymmetrized and symmetrized derivatives agree on the
//! solution manifold; the field equations hold identically in these
//! coordinates.

use crate::convention::{sigma_lower, sigma_st_lower_raised};
use crate::error::JetError;
use crate::field::FieldElement;
use crate::poly::{Polynomial, Variable};
use crate::spinor::{SpinorArray, SymGroup, Variance};

#[derive(Clone, Debug)]
pub struct FieldFamily {
    pub two_s: usize,
}

/// Immutable description of the jet ring: field families and the order cap.
#[derive(Clone, Debug)]
pub struct JetContext {
    families: Vec<FieldFamily>,
    max_order: usize,
}

impl JetContext {
    pub fn new(families: Vec<FieldFamily>, max_order: usize) -> Self {
        assert!(!families.is_empty());
        assert!(families.iter().all(|f| f.two_s >= 1));
        JetContext { families, max_order }
    }

    /// Single spin-s family, 2s = `two_s`.
    pub fn single(two_s: usize, max_order: usize) -> Self {
        Self::new(vec![FieldFamily { two_s }], max_order)
    }

    /// Two decoupled spin-1/2 families (the Weyl system).
    pub fn weyl_pair(max_order: usize) -> Self {
        Self::new(
            vec![FieldFamily { two_s: 1 }, FieldFamily { two_s: 1 }],
            max_order,
        )
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn family_count(&self) -> usize {
        self.families.len()
    }

    pub fn two_s(&self, family: usize) -> usize {
        self.families[family].two_s
    }

    /// Order-p jet block as a symmetric array of variables:
    /// 2s+p lower unprimed slots, p upper primed slots.
    pub fn jet_block(&self, family: usize, p: usize) -> Result<SpinorArray, JetError> {
        self.check_order(p)?;
        let two_s = self.two_s(family);
        Ok(SpinorArray::from_sym_fn(
            two_s + p,
            p,
            Variance::Lower,
            Variance::Upper,
            |j, k| Polynomial::var(Variable::jet(family, p, j, k)),
        ))
    }

    /// Conjugate order-p block: p upper unprimed slots, 2s+p lower primed.
    pub fn conj_jet_block(&self, family: usize, p: usize) -> Result<SpinorArray, JetError> {
        self.check_order(p)?;
        let two_s = self.two_s(family);
        Ok(SpinorArray::from_sym_fn(
            p,
            two_s + p,
            Variance::Upper,
            Variance::Lower,
            |j, k| Polynomial::var(Variable::conj_jet(family, p, j, k)),
        ))
    }

    fn check_order(&self, p: usize) -> Result<(), JetError> {
        if p > self.max_order {
            Err(JetError::MaxOrderExceeded { needed: p, max: self.max_order })
        } else {
            Ok(())
        }
    }

    /// Total derivative D_{CC'} of a jet polynomial (both indices lower).
    pub fn total_derivative(
        &self,
        g: &Polynomial,
        c: usize,
        cp: usize,
    ) -> Result<Polynomial, JetError> {
        let sig = sigma_lower();
        let mut out = Polynomial::zero();
        for v in g.variables() {
            let dv = match v {
                Variable::Coordinate { axis } => {
                    Polynomial::constant(sig[axis as usize][c][cp].clone())
                }
                Variable::Parameter { .. } => continue,
                Variable::Jet { family, order, j, k } => {
                    let p = order as usize + 1;
                    self.check_order(p)?;
                    // D_{CC'} u[p](j,k) = eps_{D'C'} u[p+1](j + [C=1], k + [D'=1])
                    let j2 = j as usize + c;
                    if cp == 0 {
                        Polynomial::var(Variable::jet(family as usize, p, j2, k as usize + 1))
                            .neg()
                    } else {
                        Polynomial::var(Variable::jet(family as usize, p, j2, k as usize))
                    }
                }
                Variable::ConjJet { family, order, j, k } => {
                    let p = order as usize + 1;
                    self.check_order(p)?;
                    // D_{CC'} v[p](j,k) = eps_{DC} v[p+1](j + [D=1], k + [C'=1])
                    let k2 = k as usize + cp;
                    if c == 0 {
                        Polynomial::var(Variable::conj_jet(
                            family as usize,
                            p,
                            j as usize + 1,
                            k2,
                        ))
                        .neg()
                    } else {
                        Polynomial::var(Variable::conj_jet(family as usize, p, j as usize, k2))
                    }
                }
            };
            if dv.is_zero() {
                continue;
            }
            out = out.add(&g.partial(&v).mul(&dv));
        }
        Ok(out)
    }

    /// D_C^{C'} with the primed index raised: D_C^{0'} = D_{C 1'},
    /// D_C^{1'} = -D_{C 0'}.
    pub fn total_derivative_raised(
        &self,
        g: &Polynomial,
        c: usize,
        cp_up: usize,
    ) -> Result<Polynomial, JetError> {
        if cp_up == 0 {
            self.total_derivative(g, c, 1)
        } else {
            Ok(self.total_derivative(g, c, 0)?.neg())
        }
    }

    /// p-fold total derivative of each component of a characteristic array
    /// (rank (2s,0), lower slots), then separate symmetrization: the
    /// coefficient array pairing with the order-p jet partials in the
    /// prolongation. The result has 2s+p lower unprimed and p upper primed
    /// slots.
    pub fn sym_total_derivative_power(
        &self,
        q: &SpinorArray,
        p: usize,
    ) -> Result<SpinorArray, JetError> {
        let mut current = q.to_dense();
        for _ in 0..p {
            current = self.extend_once(&current)?;
        }
        Ok(current.symmetrize(SymGroup::Both))
    }

    /// Append one D_B^{B'} pair: one more lower unprimed and upper primed slot.
    fn extend_once(&self, t: &SpinorArray) -> Result<SpinorArray, JetError> {
        let m = t.unprimed_rank();
        let mp = t.primed_rank();
        let mut uv: Vec<Variance> = (0..m).map(|s| t.unprimed_variance(s)).collect();
        uv.push(Variance::Lower);
        let mut pv: Vec<Variance> = (0..mp).map(|s| t.primed_variance(s)).collect();
        pv.push(Variance::Upper);
        let mut out = SpinorArray::zeros_with(uv, pv);
        let mut err = None;
        let mut u = vec![0usize; m + 1];
        let mut pbits = vec![0usize; mp + 1];
        for idx in 0..(1usize << (m + mp + 2)) {
            // decode into extended bit vectors
            let total = m + mp + 2;
            for s in 0..total {
                let b = (idx >> (total - 1 - s)) & 1;
                if s < m + 1 {
                    u[s] = b;
                } else {
                    pbits[s - (m + 1)] = b;
                }
            }
            let b = u[m];
            let bp = pbits[mp];
            let inner = t.get(&u[..m], &pbits[..mp]);
            match self.total_derivative_raised(inner, b, bp) {
                Ok(val) => out.set(&u.clone(), &pbits.clone(), val),
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = err {
            return Err(e);
        }
        Ok(out)
    }

    /// Prolonged action of the evolutionary field with the given per-family
    /// characteristics on a jet polynomial:
    /// sum over jet variables of (symmetrized derivative coefficient) times
    /// (partial of `g`), plus the conjugate tower with the conjugated
    /// characteristic.
    pub fn apply_evolutionary(
        &self,
        flows: &[(usize, SpinorArray)],
        g: &Polynomial,
    ) -> Result<Polynomial, JetError> {
        // Highest orders actually used, per family and chirality.
        let mut max_jet = vec![None::<usize>; self.families.len()];
        let mut max_conj = vec![None::<usize>; self.families.len()];
        for v in g.variables() {
            match v {
                Variable::Jet { family, order, .. } => {
                    let e = &mut max_jet[family as usize];
                    *e = Some(e.map_or(order as usize, |m| m.max(order as usize)));
                }
                Variable::ConjJet { family, order, .. } => {
                    let e = &mut max_conj[family as usize];
                    *e = Some(e.map_or(order as usize, |m| m.max(order as usize)));
                }
                _ => {}
            }
        }
        let mut out = Polynomial::zero();
        for (family, q) in flows {
            let fam = *family;
            let up_to_jet = max_jet[fam];
            let up_to_conj = max_conj[fam];
            let top = match (up_to_jet, up_to_conj) {
                (None, None) => continue,
                (a, b) => a.unwrap_or(0).max(b.unwrap_or(0)),
            };
            // coefficient arrays, order by order
            let mut coeff = q.to_dense().symmetrize(SymGroup::Both);
            for p in 0..=top {
                if up_to_jet.is_some_and(|m| p <= m) {
                    for (v, comp) in self.block_components(fam, p, false) {
                        let dg = g.partial(&v);
                        if dg.is_zero() {
                            continue;
                        }
                        out = out.add(&dg.mul(coeff.get_sym(comp.0, comp.1)));
                    }
                }
                if up_to_conj.is_some_and(|m| p <= m) {
                    let conj_coeff = coeff.conjugate();
                    for (v, comp) in self.block_components(fam, p, true) {
                        let dg = g.partial(&v);
                        if dg.is_zero() {
                            continue;
                        }
                        out = out.add(&dg.mul(conj_coeff.get_sym(comp.0, comp.1)));
                    }
                }
                if p < top {
                    coeff = self.extend_once(&coeff)?.symmetrize(SymGroup::Both);
                }
            }
        }
        Ok(out)
    }

    /// All (variable, (j,k)) pairs of one block.
    fn block_components(
        &self,
        family: usize,
        p: usize,
        conj: bool,
    ) -> Vec<(Variable, (usize, usize))> {
        let two_s = self.two_s(family);
        let (jm, km) = if conj { (p, two_s + p) } else { (two_s + p, p) };
        let mut out = Vec::with_capacity((jm + 1) * (km + 1));
        for j in 0..=jm {
            for k in 0..=km {
                let v = if conj {
                    Variable::conj_jet(family, p, j, k)
                } else {
                    Variable::jet(family, p, j, k)
                };
                out.push((v, (j, k)));
            }
        }
        out
    }
}

/// Coordinate derivative del_{AA'} of a polynomial in x and parameters only.
pub fn coord_derivative(g: &Polynomial, a: usize, ap: usize) -> Result<Polynomial, JetError> {
    if g.variables().iter().any(Variable::is_jet_like) {
        return Err(JetError::JetVariablePresent);
    }
    let sig = sigma_lower();
    let mut out = Polynomial::zero();
    for axis in 0..4 {
        let d = g.partial(&Variable::coord(axis));
        if !d.is_zero() {
            out = out.add(&d.scale(&sig[axis][a][ap]));
        }
    }
    Ok(out)
}

/// del_A^{A'} with the primed index raised.
pub fn coord_derivative_raised(
    g: &Polynomial,
    a: usize,
    ap_up: usize,
) -> Result<Polynomial, JetError> {
    if ap_up == 0 {
        coord_derivative(g, a, 1)
    } else {
        Ok(coord_derivative(g, a, 0)?.neg())
    }
}

/// del^A{}_{A'} with the unprimed index raised.
pub fn coord_derivative_raised_unprimed(
    g: &Polynomial,
    a_up: usize,
    ap: usize,
) -> Result<Polynomial, JetError> {
    if a_up == 0 {
        coord_derivative(g, 1, ap)
    } else {
        Ok(coord_derivative(g, 0, ap)?.neg())
    }
}

/// The coordinate array x^{AA'} = sigma_i^{AA'} x^i (both slots upper).
pub fn coordinate_spinor() -> SpinorArray {
    let s = sigma_st_lower_raised();
    SpinorArray::from_fn(1, 1, Variance::Upper, Variance::Upper, |u, p| {
        let mut acc = Polynomial::zero();
        for i in 0..4 {
            acc = acc.add(&Polynomial::var(Variable::coord(i)).scale(&s[i][u[0]][p[0]]));
        }
        acc
    })
}

/// Spinor form xi^{CC'} of a world vector field xi^i(x) (both slots upper).
pub fn vector_to_spinor(xi: &[Polynomial; 4]) -> SpinorArray {
    let s = sigma_st_lower_raised();
    SpinorArray::from_fn(1, 1, Variance::Upper, Variance::Upper, |u, p| {
        let mut acc = Polynomial::zero();
        for i in 0..4 {
            acc = acc.add(&xi[i].scale(&s[i][u[0]][p[0]]));
        }
        acc
    })
}

/// Apply the coordinate derivative to every entry of an array, appending one
/// lower unprimed and one lower primed slot (entries must be x-polynomials).
pub fn coord_derivative_array(t: &SpinorArray) -> Result<SpinorArray, JetError> {
    let arr = t.to_dense();
    let m = arr.unprimed_rank();
    let mp = arr.primed_rank();
    let mut uv: Vec<Variance> = (0..m).map(|s| arr.unprimed_variance(s)).collect();
    uv.push(Variance::Lower);
    let mut pv: Vec<Variance> = (0..mp).map(|s| arr.primed_variance(s)).collect();
    pv.push(Variance::Lower);
    let mut out = SpinorArray::zeros_with(uv, pv);
    let total = m + mp + 2;
    let mut u = vec![0usize; m + 1];
    let mut pbits = vec![0usize; mp + 1];
    for idx in 0..(1usize << total) {
        for s in 0..total {
            let b = (idx >> (total - 1 - s)) & 1;
            if s < m + 1 {
                u[s] = b;
            } else {
                pbits[s - (m + 1)] = b;
            }
        }
        let val = coord_derivative(arr.get(&u[..m], &pbits[..mp]), u[m], pbits[mp])?;
        out.set(&u.clone(), &pbits.clone(), val);
    }
    Ok(out)
}

/// Commutation identity between jet partials and the total derivative on the
/// free module of groupwise-symmetric derivative variables, checked
/// componentwise. Returns the violating component descriptions (empty on
/// success).
///
/// Variables here carry three separately symmetric groups (field group of
/// size 2s, derivative group of size q, primed derivative group of size q);
/// the check enumerates all index-count assignments at order `p >= 1`.
pub fn commutation_check(two_s: usize, p: usize) -> Vec<String> {
    assert!(p >= 1, "the commutation identity is stated for p >= 1");
    let rat = |n: i64, d: i64| FieldElement::from_ratio(n, d);
    let mut violations = Vec::new();
    // Scalar value of the symmetrized jet partial with upper counts
    // (a1, b1, bp1) applied to the variable of order q with counts
    // (a2, b2, bp2); orders and counts must match, the weight is the
    // symmetrization projector component 1/C(n, count) per group.
    let partial = |pp: usize,
                   a1: usize,
                   b1: usize,
                   bp1: usize,
                   q: usize,
                   a2: usize,
                   b2: usize,
                   bp2: usize|
     -> FieldElement {
        if pp != q || a1 != a2 || b1 != b2 || bp1 != bp2 {
            return FieldElement::zero();
        }
        rat(
            1,
            crate::util::binom(two_s, a1)
                * crate::util::binom(pp, b1)
                * crate::util::binom(pp, bp1),
        )
    };
    // All variables of orders p-1 and p (the commutator vanishes elsewhere).
    for q in [p - 1, p] {
        for a2 in 0..=two_s {
            for b2 in 0..=q {
                for bp2 in 0..=q {
                    for a1 in 0..=two_s {
                        for b1 in 0..=p {
                            for bp1 in 0..=p {
                                for c in 0..2usize {
                                    for cp in 0..2usize {
                                        // LHS: partial(D var) - D(partial var); the second
                                        // term is D of a constant, hence zero.
                                        let lhs =
                                            partial(p, a1, b1, bp1, q + 1, a2, b2 + c, bp2 + cp);
                                        // RHS: eps_{(B'|}{}^{C'} eps_C{}^{(B|} acting through
                                        // the order-(p-1) partial, symmetrized over the B and
                                        // B' groups of the original operator: the fraction of
                                        // slots matching C (resp. C') times the reduced partial.
                                        let matching_b = if c == 1 { b1 } else { p - b1 };
                                        let matching_bp = if cp == 1 { bp1 } else { p - bp1 };
                                        let mut rhs = FieldElement::zero();
                                        if matching_b > 0 && matching_bp > 0 {
                                            let b_rest = if c == 1 { b1 - 1 } else { b1 };
                                            let bp_rest = if cp == 1 { bp1 - 1 } else { bp1 };
                                            let weight = rat(
                                                (matching_b * matching_bp) as i64,
                                                (p * p) as i64,
                                            );
                                            rhs = weight
                                                * partial(
                                                    p - 1,
                                                    a1,
                                                    b_rest,
                                                    bp_rest,
                                                    q,
                                                    a2,
                                                    b2,
                                                    bp2,
                                                );
                                        }
                                        if lhs != rhs {
                                            violations.push(format!(
                                                "order {q} var ({a2},{b2},{bp2}), op ({a1},{b1},{bp1}), C={c}, C'={cp}: lhs={lhs}, rhs={rhs}"
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Polynomial {
        Polynomial::constant(FieldElement::from_int(n))
    }

    #[test]
    fn coord_derivative_of_coordinate_spinor_is_delta() {
        // del_{AA'} x^{BB'} = delta_A^B delta_{A'}^{B'} via completeness
        let x = coordinate_spinor();
        for a in 0..2 {
            for ap in 0..2 {
                for b in 0..2 {
                    for bp in 0..2 {
                        let d = coord_derivative(x.get(&[b], &[bp]), a, ap).unwrap();
                        let expect = if a == b && ap == bp { c(1) } else { c(0) };
                        assert_eq!(d, expect, "at {a}{ap} {b}{bp}");
                    }
                }
            }
        }
    }

    #[test]
    fn coord_derivative_of_constant_vanishes() {
        assert!(coord_derivative(&c(7), 0, 1).unwrap().is_zero());
    }

    #[test]
    fn contracted_coordinate_trace_is_four() {
        // del_{CC'} x^{CC'} = delta_C^C delta_{C'}^{C'} = 4
        let x = coordinate_spinor();
        let mut acc = Polynomial::zero();
        for cc in 0..2 {
            for cp in 0..2 {
                acc = acc.add(&coord_derivative(x.get(&[cc], &[cp]), cc, cp).unwrap());
            }
        }
        assert_eq!(acc, c(4));
    }

    #[test]
    fn coord_derivative_rejects_jets() {
        let g = Polynomial::var(Variable::jet(0, 0, 0, 0));
        assert!(matches!(
            coord_derivative(&g, 0, 0),
            Err(JetError::JetVariablePresent)
        ));
    }

    #[test]
    fn coordinate_spinor_is_hermitian() {
        let x = coordinate_spinor();
        assert_eq!(x.conjugate(), x.to_dense());
    }

    #[test]
    fn total_derivative_shifts_jets() {
        let ctx = JetContext::single(1, 3);
        // D_{C C'} u[0](j) for C=1, C'=1 gives +u[1](j+1, 0)
        let g = Polynomial::var(Variable::jet(0, 0, 1, 0));
        let d = ctx.total_derivative(&g, 1, 1).unwrap();
        assert_eq!(d, Polynomial::var(Variable::jet(0, 1, 2, 0)));
        // C'=0 lowers with a sign and bumps k
        let d2 = ctx.total_derivative(&g, 0, 0).unwrap();
        assert_eq!(d2, Polynomial::var(Variable::jet(0, 1, 1, 1)).neg());
    }

    #[test]
    fn total_derivatives_commute() {
        let ctx = JetContext::single(2, 4);
        let g = Polynomial::var(Variable::jet(0, 0, 1, 0))
            .mul(&Polynomial::var(Variable::jet(0, 1, 2, 1)))
            .add(&Polynomial::var(Variable::coord(2)).mul(&Polynomial::var(
                Variable::conj_jet(0, 1, 0, 2),
            )));
        for (c1, cp1, c2, cp2) in [(0, 0, 1, 1), (0, 1, 1, 0), (1, 1, 1, 0)] {
            let a = ctx
                .total_derivative(&ctx.total_derivative(&g, c1, cp1).unwrap(), c2, cp2)
                .unwrap();
            let b = ctx
                .total_derivative(&ctx.total_derivative(&g, c2, cp2).unwrap(), c1, cp1)
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn total_derivative_conjugation_compatibility() {
        let ctx = JetContext::single(1, 3);
        let g = Polynomial::var(Variable::jet(0, 1, 1, 1))
            .scale(&FieldElement::i())
            .add(&Polynomial::var(Variable::conj_jet(0, 0, 0, 1)));
        for cc in 0..2 {
            for cp in 0..2 {
                let lhs = ctx.total_derivative(&g, cc, cp).unwrap().conjugate();
                let rhs = ctx
                    .total_derivative(&g.conjugate(), cp, cc)
                    .unwrap();
                assert_eq!(lhs, rhs, "at C={cc}, C'={cp}");
            }
        }
    }

    #[test]
    fn max_order_is_enforced() {
        let ctx = JetContext::single(1, 1);
        let g = Polynomial::var(Variable::jet(0, 1, 0, 0));
        assert!(matches!(
            ctx.total_derivative(&g, 0, 0),
            Err(JetError::MaxOrderExceeded { needed: 2, max: 1 })
        ));
    }

    #[test]
    fn field_equation_holds_identically() {
        // contracting the appended slot of a D-image against a block slot
        // with eps vanishes: eps^{ac} D_{c A'} u[p](..a..) = 0.
        let ctx = JetContext::single(2, 3);
        for p in 0..2usize {
            let two_s = 2;
            for jrest in 0..=(two_s + p - 1) {
                for k in 0..=p {
                    for ap in 0..2 {
                        // residual = D_{1 A'} u(jrest+0) - D_{0 A'} u(jrest+1)
                        let u0 = Polynomial::var(Variable::jet(0, p, jrest, k));
                        let u1 = Polynomial::var(Variable::jet(0, p, jrest + 1, k));
                        let r = ctx
                            .total_derivative(&u0, 1, ap)
                            .unwrap()
                            .sub(&ctx.total_derivative(&u1, 0, ap).unwrap());
                        assert!(r.is_zero(), "p={p} jrest={jrest} k={k} ap={ap}");
                    }
                }
            }
        }
    }

    #[test]
    fn sym_derivative_of_scaling_characteristic_is_jet_block() {
        // Q = u[0] block: p-fold symmetrized derivative = u[p] block exactly
        let ctx = JetContext::single(2, 3);
        let q = ctx.jet_block(0, 0).unwrap();
        for p in 0..=2usize {
            let a = ctx.sym_total_derivative_power(&q, p).unwrap();
            let expect = ctx.jet_block(0, p).unwrap().to_dense();
            assert_eq!(a, expect, "order {p}");
        }
    }

    #[test]
    fn sym_derivative_linear_in_characteristic() {
        let ctx = JetContext::single(1, 3);
        let q1 = ctx.jet_block(0, 0).unwrap();
        let q2 = ctx
            .jet_block(0, 0)
            .unwrap()
            .map(|p| p.scale(&FieldElement::from_int(3)));
        let sum = q1.add(&q2);
        let a = ctx.sym_total_derivative_power(&sum, 2).unwrap();
        let b = ctx
            .sym_total_derivative_power(&q1, 2)
            .unwrap()
            .add(&ctx.sym_total_derivative_power(&q2, 2).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn apply_evolutionary_zeroth_pairing() {
        // G = u[0] component returns the matching component of the flow
        let ctx = JetContext::single(2, 2);
        let flow = ctx.jet_block(0, 0).unwrap().map(|p| {
            p.scale(&FieldElement::from_int(5))
        });
        let g = Polynomial::var(Variable::jet(0, 0, 1, 0));
        let out = ctx.apply_evolutionary(&[(0, flow)], &g).unwrap();
        assert_eq!(
            out,
            Polynomial::var(Variable::jet(0, 0, 1, 0)).scale(&FieldElement::from_int(5))
        );
    }

    #[test]
    fn apply_evolutionary_kills_jet_free_polynomials() {
        let ctx = JetContext::single(1, 2);
        let flow = ctx.jet_block(0, 0).unwrap();
        let g = Polynomial::var(Variable::coord(0)).pow(2);
        assert!(ctx.apply_evolutionary(&[(0, flow)], &g).unwrap().is_zero());
    }

    #[test]
    fn apply_evolutionary_is_a_derivation() {
        let ctx = JetContext::single(1, 3);
        let flow = ctx.jet_block(0, 0).unwrap();
        let g = Polynomial::var(Variable::jet(0, 1, 1, 1))
            .add(&Polynomial::var(Variable::coord(1)));
        let h = Polynomial::var(Variable::jet(0, 0, 1, 0))
            .mul(&Polynomial::var(Variable::conj_jet(0, 0, 0, 1)));
        let flows = [(0usize, flow)];
        let lhs = ctx.apply_evolutionary(&flows, &g.mul(&h)).unwrap();
        let rhs = ctx
            .apply_evolutionary(&flows, &g)
            .unwrap()
            .mul(&h)
            .add(&g.mul(&ctx.apply_evolutionary(&flows, &h).unwrap()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn scaling_characteristic_counts_jet_degree() {
        // with flow = u[0] (and conjugate tower v[0]) each jet monomial of
        // total degree d maps to d times itself
        let ctx = JetContext::single(1, 3);
        let flow = ctx.jet_block(0, 0).unwrap();
        let flows = [(0usize, flow)];
        let m = Polynomial::var(Variable::jet(0, 1, 2, 1))
            .mul(&Polynomial::var(Variable::jet(0, 0, 0, 0)))
            .mul(&Polynomial::var(Variable::conj_jet(0, 2, 1, 2)));
        let out = ctx.apply_evolutionary(&flows, &m).unwrap();
        assert_eq!(out, m.scale(&FieldElement::from_int(3)));
    }

    #[test]
    fn commutation_identity_small_spins() {
        for two_s in [1usize, 2] {
            for p in [1usize, 2] {
                let violations = commutation_check(two_s, p);
                assert!(violations.is_empty(), "2s={two_s}, p={p}: {violations:?}");
            }
        }
    }
}

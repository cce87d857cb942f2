//! Sparse multivariate polynomials over Q(i, sqrt(2)) in coordinate, jet,
//! conjugate-jet and parameter variables.
//!
//! Jet variables are the components of Penrose exact sets: the order-p block
//! of field family `f` with spin 2s carries `2s+p` lower unprimed slots and
//! `p` upper primed slots; a component is addressed by the counts `(j, k)` of
//! index value 1 in the two groups. Conjugate-jet variables swap the roles of
//! the groups. The total ordering on `Variable` is fixed (kind, then numeric
//! fields) so that the canonical form of a polynomial is unique.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::field::FieldElement;

/// One symbol of the jet ring.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Variable {
    /// Minkowski coordinate x^axis, axis in 0..4.
    Coordinate { axis: u8 },
    /// Component of the order-`order` jet block of field family `family`:
    /// `j` ones among the lower unprimed slots (2s+order of them),
    /// `k` ones among the upper primed slots (order of them).
    Jet { family: u8, order: u8, j: u8, k: u8 },
    /// Component of the conjugate block: `j` ones among the upper unprimed
    /// slots (order of them), `k` ones among the lower primed slots
    /// (2s+order of them).
    ConjJet { family: u8, order: u8, j: u8, k: u8 },
    /// Interned free parameter, treated as real under conjugation.
    Parameter { id: u16 },
}

impl Variable {
    pub fn coord(axis: usize) -> Self {
        debug_assert!(axis < 4);
        Variable::Coordinate { axis: axis as u8 }
    }

    pub fn jet(family: usize, order: usize, j: usize, k: usize) -> Self {
        Variable::Jet {
            family: family as u8,
            order: order as u8,
            j: j as u8,
            k: k as u8,
        }
    }

    pub fn conj_jet(family: usize, order: usize, j: usize, k: usize) -> Self {
        Variable::ConjJet {
            family: family as u8,
            order: order as u8,
            j: j as u8,
            k: k as u8,
        }
    }

    pub fn is_coordinate(&self) -> bool {
        matches!(self, Variable::Coordinate { .. })
    }

    pub fn is_jet_like(&self) -> bool {
        matches!(self, Variable::Jet { .. } | Variable::ConjJet { .. })
    }

    /// Jet order of the variable; coordinates and parameters count as None.
    pub fn jet_order(&self) -> Option<usize> {
        match self {
            Variable::Jet { order, .. } | Variable::ConjJet { order, .. } => {
                Some(*order as usize)
            }
            _ => None,
        }
    }

    /// Conjugate variable: jets swap with conjugate jets, component counts
    /// swap groups; coordinates and parameters are fixed (real).
    pub fn conjugate(&self) -> Self {
        match *self {
            Variable::Jet { family, order, j, k } => Variable::ConjJet { family, order, j: k, k: j },
            Variable::ConjJet { family, order, j, k } => Variable::Jet { family, order, j: k, k: j },
            other => other,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Coordinate { axis } => write!(f, "x{axis}"),
            Variable::Jet { family, order, j, k } => {
                write!(f, "u{family}[{order};{j},{k}]")
            }
            Variable::ConjJet { family, order, j, k } => {
                write!(f, "v{family}[{order};{j},{k}]")
            }
            Variable::Parameter { id } => write!(f, "a{id}"),
        }
    }
}

/// Exponent vector: sorted by `Variable`, no zero exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub Vec<(Variable, u8)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Variable) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(Variable, u8)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn exponent(&self, v: &Variable) -> u8 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|idx| self.0[idx].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|(_, e)| *e as usize).sum()
    }

    pub fn coordinate_degree(&self) -> usize {
        self.0
            .iter()
            .filter(|(v, _)| v.is_coordinate())
            .map(|(_, e)| *e as usize)
            .sum()
    }

    /// Maximum jet order among jet-like variables, or None when there is none.
    pub fn jet_order(&self) -> Option<usize> {
        self.0.iter().filter_map(|(v, _)| v.jet_order()).max()
    }

    fn conjugate(&self) -> Monomial {
        let mut out: Vec<(Variable, u8)> =
            self.0.iter().map(|(v, e)| (v.conjugate(), *e)).collect();
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| {
                if *e == 1 {
                    format!("{v}")
                } else {
                    format!("{v}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial in canonical form: no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    pub terms: BTreeMap<Monomial, FieldElement>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(FieldElement::one())
    }

    pub fn constant(c: FieldElement) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn var(v: Variable) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), FieldElement::one());
        Polynomial { terms }
    }

    pub fn monomial(m: Monomial, c: FieldElement) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with respect to `v`.
    pub fn partial(&self, v: &Variable) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let mut reduced: Vec<(Variable, u8)> = Vec::with_capacity(m.0.len());
            for (w, we) in &m.0 {
                if w == v {
                    if *we > 1 {
                        reduced.push((*w, we - 1));
                    }
                } else {
                    reduced.push((*w, *we));
                }
            }
            out.add_term(Monomial(reduced), c * &FieldElement::from_int(e as i64));
        }
        out
    }

    /// Substitute `v := replacement` everywhere.
    pub fn substitute(&self, v: &Variable, replacement: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let rest = Monomial(m.0.iter().filter(|(w, _)| w != v).copied().collect());
            let powed = replacement.pow(e as u32);
            for (pm, pc) in &powed.terms {
                out.add_term(rest.mul(pm), c * pc);
            }
        }
        out
    }

    /// Coefficientwise conjugation combined with the variable swap
    /// jet <-> conjugate jet.
    pub fn conjugate(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.conjugate(), c.conj());
        }
        out
    }

    /// Largest jet order appearing, or None for a purely base polynomial.
    pub fn jet_order(&self) -> Option<usize> {
        self.terms.keys().filter_map(|m| m.jet_order()).max()
    }

    /// Terms whose maximum jet order equals `order`.
    pub fn jet_order_part(&self, order: usize) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.jet_order() == Some(order))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn coordinate_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.coordinate_degree())
            .max()
            .unwrap_or(0)
    }

    /// All distinct variables, in order.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> = Vec::new();
        for m in self.terms.keys() {
            for (v, _) in &m.0 {
                if let Err(pos) = vars.binary_search(v) {
                    vars.insert(pos, *v);
                }
            }
        }
        vars
    }

    /// Evaluate with all jet-like and parameter variables kept, substituting
    /// exact values for the four coordinates.
    pub fn eval_coords(&self, x: &[FieldElement; 4]) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest: Vec<(Variable, u8)> = Vec::new();
            for (v, e) in &m.0 {
                match v {
                    Variable::Coordinate { axis } => {
                        coeff = &coeff * &x[*axis as usize].pow(*e as u32);
                    }
                    _ => rest.push((*v, *e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.0.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(axis: usize) -> Polynomial {
        Polynomial::var(Variable::coord(axis))
    }

    #[test]
    fn partial_of_square() {
        // d/dx0 (x0^2) = 2 x0
        let p = x(0).mul(&x(0));
        let d = p.partial(&Variable::coord(0));
        assert_eq!(d, x(0).scale(&FieldElement::from_int(2)));
    }

    #[test]
    fn substitute_to_zero() {
        // x0*x1 with x1 := 0 vanishes
        let p = x(0).mul(&x(1));
        let q = p.substitute(&Variable::coord(1), &Polynomial::zero());
        assert!(q.is_zero());
    }

    #[test]
    fn binomial_expansion() {
        // (x0+x1)^2 = x0^2 + 2 x0 x1 + x1^2
        let p = x(0).add(&x(1)).pow(2);
        let mut expect = x(0).mul(&x(0));
        expect = expect.add(&x(0).mul(&x(1)).scale(&FieldElement::from_int(2)));
        expect = expect.add(&x(1).mul(&x(1)));
        assert_eq!(p, expect);
    }

    #[test]
    fn conjugate_swaps_jet_families() {
        let v = Variable::jet(0, 1, 2, 1);
        let p = Polynomial::var(v).scale(&FieldElement::i());
        let q = p.conjugate();
        let expect =
            Polynomial::var(Variable::conj_jet(0, 1, 1, 2)).scale(&-FieldElement::i());
        assert_eq!(q, expect);
        assert_eq!(q.conjugate(), p);
    }

    #[test]
    fn jet_order_part_extraction() {
        let p = Polynomial::var(Variable::jet(0, 2, 0, 0))
            .add(&Polynomial::var(Variable::jet(0, 1, 0, 0)))
            .add(&x(3));
        assert_eq!(p.jet_order(), Some(2));
        assert_eq!(p.jet_order_part(2).num_terms(), 1);
        assert_eq!(p.jet_order_part(1).num_terms(), 1);
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        let var = prop_oneof![
            (0usize..4).prop_map(Variable::coord),
            ((0usize..2), (0usize..2), (0usize..3), (0usize..2))
                .prop_map(|(f, p, j, k)| Variable::jet(f, p, j, k)),
        ];
        proptest::collection::vec((var, -4i64..=4), 0..5).prop_map(|terms| {
            let mut p = Polynomial::zero();
            for (v, c) in terms {
                p.add_term(Monomial::var(v), FieldElement::from_int(c));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(p.mul(&q), q.mul(&p));
            prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
            prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        }

        #[test]
        fn conjugation_involutive(p in arb_poly()) {
            prop_assert_eq!(p.conjugate().conjugate(), p.clone());
        }

        #[test]
        fn leibniz_for_partial(p in arb_poly(), q in arb_poly()) {
            let v = Variable::coord(0);
            let lhs = p.mul(&q).partial(&v);
            let rhs = p.partial(&v).mul(&q).add(&p.mul(&q.partial(&v)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}

//! Exact scalar arithmetic in the field Q(i, sqrt(2)).
//!
//! Every scalar is stored as four arbitrary-precision rationals
//! `(re, im, re_rad, im_rad)` meaning `(re + im*i) + (re_rad + im_rad*i)*sqrt(2)`.
//! All operations are exact; rationals are kept reduced with positive
//! denominators by `num_rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::FieldError;

pub type Rational = BigRational;

/// Element of Q(i, sqrt(2)): `(re + im*i) + (re_rad + im_rad*i)*sqrt(2)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FieldElement {
    pub re: Rational,
    pub im: Rational,
    pub re_rad: Rational,
    pub im_rad: Rational,
}

impl FieldElement {
    pub fn new(re: Rational, im: Rational, re_rad: Rational, im_rad: Rational) -> Self {
        FieldElement { re, im, re_rad, im_rad }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        FieldElement { re: Rational::one(), ..Self::default() }
    }

    pub fn from_int(n: i64) -> Self {
        FieldElement { re: Rational::from_integer(BigInt::from(n)), ..Self::default() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        FieldElement {
            re: Rational::new(BigInt::from(num), BigInt::from(den)),
            ..Self::default()
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        FieldElement { re: r, ..Self::default() }
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        FieldElement { im: Rational::one(), ..Self::default() }
    }

    pub fn sqrt2() -> Self {
        FieldElement { re_rad: Rational::one(), ..Self::default() }
    }

    /// 1/sqrt(2) = sqrt(2)/2.
    pub fn inv_sqrt2() -> Self {
        FieldElement {
            re_rad: Rational::new(BigInt::one(), BigInt::from(2)),
            ..Self::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.re_rad.is_zero() && self.im_rad.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero() && self.re_rad.is_zero() && self.im_rad.is_zero()
    }

    /// True when the value lies in Q (no i, no sqrt(2) component).
    pub fn is_rational(&self) -> bool {
        self.im.is_zero() && self.re_rad.is_zero() && self.im_rad.is_zero()
    }

    /// True when the value lies in Q(i) (no sqrt(2) component).
    pub fn is_gaussian(&self) -> bool {
        self.re_rad.is_zero() && self.im_rad.is_zero()
    }

    /// True when the value is a pure multiple of sqrt(2).
    pub fn is_pure_radical(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True when the imaginary components vanish (value is real).
    pub fn is_real(&self) -> bool {
        self.im.is_zero() && self.im_rad.is_zero()
    }

    /// Complex conjugation: fixes sqrt(2), negates i.
    pub fn conj(&self) -> Self {
        FieldElement {
            re: self.re.clone(),
            im: -self.im.clone(),
            re_rad: self.re_rad.clone(),
            im_rad: -self.im_rad.clone(),
        }
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // With A = re + im*i and B = re_rad + im_rad*i (both in Q(i)),
        // self = A + B*sqrt(2) and (A + B*sqrt2)(A - B*sqrt2) = A^2 - 2 B^2 =: W in Q(i).
        // W != 0 because sqrt(2) is not in Q(i).
        let two = Rational::from_integer(BigInt::from(2));
        let a2_re = &self.re * &self.re - &self.im * &self.im;
        let a2_im = &self.re * &self.im * &two;
        let b2_re = &self.re_rad * &self.re_rad - &self.im_rad * &self.im_rad;
        let b2_im = &self.re_rad * &self.im_rad * &two;
        let w_re = a2_re - &two * b2_re;
        let w_im = a2_im - &two * b2_im;
        let norm = &w_re * &w_re + &w_im * &w_im;
        debug_assert!(!norm.is_zero());
        let winv_re = &w_re / &norm;
        let winv_im = -&w_im / &norm;
        let conj_rad = FieldElement {
            re: self.re.clone(),
            im: self.im.clone(),
            re_rad: -self.re_rad.clone(),
            im_rad: -self.im_rad.clone(),
        };
        let winv = FieldElement { re: winv_re, im: winv_im, ..Self::default() };
        Ok(conj_rad * winv)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division; errors when `rhs` is zero.
    pub fn try_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self.clone() * rhs.inv()?)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> Self {
        FieldElement {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
            re_rad: self.re_rad + rhs.re_rad,
            im_rad: self.im_rad + rhs.im_rad,
        }
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
        self.re_rad += rhs.re_rad;
        self.im_rad += rhs.im_rad;
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> Self {
        FieldElement {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
            re_rad: self.re_rad - rhs.re_rad,
            im_rad: self.im_rad - rhs.im_rad,
        }
    }
}

impl SubAssign for FieldElement {
    fn sub_assign(&mut self, rhs: Self) {
        self.re -= rhs.re;
        self.im -= rhs.im;
        self.re_rad -= rhs.re_rad;
        self.im_rad -= rhs.im_rad;
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        FieldElement {
            re: -self.re,
            im: -self.im,
            re_rad: -self.re_rad,
            im_rad: -self.im_rad,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        // (a1 + b1 i + (c1 + d1 i) r)(a2 + b2 i + (c2 + d2 i) r), r^2 = 2.
        let (a1, b1, c1, d1) = (&self.re, &self.im, &self.re_rad, &self.im_rad);
        let (a2, b2, c2, d2) = (&rhs.re, &rhs.im, &rhs.re_rad, &rhs.im_rad);
        let two = Rational::from_integer(BigInt::from(2));
        FieldElement {
            re: a1 * a2 - b1 * b2 + &two * (c1 * c2 - d1 * d2),
            im: a1 * b2 + b1 * a2 + &two * (c1 * d2 + d1 * c2),
            re_rad: a1 * c2 + c1 * a2 - (b1 * d2 + d1 * b2),
            im_rad: a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        }
    }
}

impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: Self) {
        *self = &*self * &rhs;
    }
}

impl Div for FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: Self) -> Self {
        self.try_div(&rhs).expect("division by zero")
    }
}

fn fmt_rat(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if !self.re.is_zero() {
            parts.push(fmt_rat(&self.re));
        }
        if !self.im.is_zero() {
            parts.push(format!("{}*i", fmt_rat(&self.im)));
        }
        if !self.re_rad.is_zero() {
            parts.push(format!("{}*r2", fmt_rat(&self.re_rad)));
        }
        if !self.im_rad.is_zero() {
            parts.push(format!("{}*i*r2", fmt_rat(&self.im_rad)));
        }
        let mut s = String::new();
        for (k, p) in parts.iter().enumerate() {
            if k > 0 && !p.starts_with('-') {
                s.push('+');
            }
            s.push_str(p);
        }
        write!(f, "{s}")
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Serialized form: exact numerator/denominator decimal strings.
#[derive(Serialize, Deserialize)]
pub struct FieldElementRepr {
    pub re: String,
    pub im: String,
    pub re_rad: String,
    pub im_rad: String,
}

fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rat_from_string(s: &str) -> Result<Rational, FieldError> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| FieldError::Parse(s.to_string()))?;
    let numer: BigInt = n.parse().map_err(|_| FieldError::Parse(s.to_string()))?;
    let denom: BigInt = d.parse().map_err(|_| FieldError::Parse(s.to_string()))?;
    if !denom.is_positive() {
        return Err(FieldError::Parse(s.to_string()));
    }
    Ok(Rational::new(numer, denom))
}

impl FieldElement {
    pub fn to_repr(&self) -> FieldElementRepr {
        FieldElementRepr {
            re: rat_to_string(&self.re),
            im: rat_to_string(&self.im),
            re_rad: rat_to_string(&self.re_rad),
            im_rad: rat_to_string(&self.im_rad),
        }
    }

    pub fn from_repr(repr: &FieldElementRepr) -> Result<Self, FieldError> {
        Ok(FieldElement {
            re: rat_from_string(&repr.re)?,
            im: rat_from_string(&repr.im)?,
            re_rad: rat_from_string(&repr.re_rad)?,
            im_rad: rat_from_string(&repr.im_rad)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fe(re: i64, im: i64, rr: i64, ir: i64) -> FieldElement {
        FieldElement::new(
            Rational::from_integer(BigInt::from(re)),
            Rational::from_integer(BigInt::from(im)),
            Rational::from_integer(BigInt::from(rr)),
            Rational::from_integer(BigInt::from(ir)),
        )
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let r = FieldElement::sqrt2();
        assert_eq!(r.clone() * r, FieldElement::from_int(2));
    }

    #[test]
    fn conj_of_i_is_minus_i() {
        assert_eq!(FieldElement::i().conj(), -FieldElement::i());
    }

    #[test]
    fn radical_difference_of_squares() {
        // (1 + sqrt2)(1 - sqrt2) = 1 - 2 = -1
        let a = FieldElement::one() + FieldElement::sqrt2();
        let b = FieldElement::one() - FieldElement::sqrt2();
        assert_eq!(a * b, FieldElement::from_int(-1));
    }

    #[test]
    fn inv_sqrt2_is_inverse() {
        assert_eq!(
            FieldElement::sqrt2() * FieldElement::inv_sqrt2(),
            FieldElement::one()
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let e = FieldElement::one().try_div(&FieldElement::zero());
        assert!(matches!(e, Err(FieldError::DivisionByZero)));
    }

    #[test]
    fn inverse_of_mixed_element() {
        let z = fe(3, -1, 2, 5);
        let w = z.inv().unwrap();
        assert_eq!(z * w, FieldElement::one());
    }

    #[test]
    fn repr_round_trip() {
        let z = FieldElement::new(
            Rational::new(BigInt::from(-7), BigInt::from(3)),
            Rational::from_integer(BigInt::from(4)),
            Rational::new(BigInt::from(1), BigInt::from(2)),
            Rational::zero(),
        );
        let r = z.to_repr();
        assert_eq!(FieldElement::from_repr(&r).unwrap(), z);
    }

    fn arb_fe() -> impl Strategy<Value = FieldElement> {
        (-6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d, q)| {
            FieldElement::new(
                Rational::new(BigInt::from(a), BigInt::from(q)),
                Rational::new(BigInt::from(b), BigInt::from(q)),
                Rational::new(BigInt::from(c), BigInt::from(q)),
                Rational::new(BigInt::from(d), BigInt::from(q)),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(x in arb_fe(), y in arb_fe(), z in arb_fe()) {
            prop_assert_eq!(&(x.clone() * y.clone()) * &z, &x * &(y.clone() * z.clone()));
            prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
            prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
            prop_assert_eq!(
                x.clone() * (y.clone() + z.clone()),
                x.clone() * y.clone() + x.clone() * z.clone()
            );
        }

        #[test]
        fn conj_is_involutive_ring_map(x in arb_fe(), y in arb_fe()) {
            prop_assert_eq!(x.conj().conj(), x.clone());
            prop_assert_eq!((x.clone() * y.clone()).conj(), x.conj() * y.conj());
            prop_assert_eq!((x.clone() + y.clone()).conj(), x.conj() + y.conj());
        }

        #[test]
        fn field_inverse(x in arb_fe()) {
            if !x.is_zero() {
                prop_assert_eq!(x.clone() * x.inv().unwrap(), FieldElement::one());
            }
        }
    }
}

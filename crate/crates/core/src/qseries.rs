//! Truncated formal power series in `q` over exact rationals.
//!
//! A [`QSeries`] of order `N` stores the coefficients of `q^0..=q^N`. Every
//! binary operation truncates at the smaller operand order, so a result is
//! never claimed to be known past the point where both inputs are known.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::binomial;

/// The scalar field: arbitrary-precision rationals kept in lowest terms.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// First degree at which two series disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub degree: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<Rational>,
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c·q^exp`, which is the zero series when `exp > order`.
    pub fn monomial(c: Rational, exp: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if exp <= order {
            s.coeffs[exp] = c;
        }
        s
    }

    /// Builds a series from `c_0..=c_N`.
    ///
    /// Panics on an empty vector: a series always knows at least `c_0`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a QSeries needs at least one coefficient");
        QSeries { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// Highest retained exponent (inclusive).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> Option<&Rational> {
        self.coeffs.get(degree)
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// True when every retained coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order()) + 1;
        QSeries {
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// `self += c·other`, truncating `self` to the common order.
    pub fn add_scaled(&mut self, c: &Rational, other: &QSeries) {
        if other.order() < self.order() {
            self.coeffs.truncate(other.order() + 1);
        }
        if c.is_zero() {
            return;
        }
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !y.is_zero() {
                *x += c * y;
            }
        }
    }

    /// Multiplication by `q^k`; coefficients pushed past the order are dropped.
    pub fn mul_q_pow(&self, k: usize) -> Self {
        let order = self.order();
        let mut out = Self::zero(order);
        for d in k..=order {
            out.coeffs[d] = self.coeffs[d - k].clone();
        }
        out
    }

    /// Multiplication by `(1 - q^m)^(-n)`, done as `n` strided prefix sums.
    pub fn div_one_minus_q_pow(&self, m: usize, n: u32) -> Self {
        assert!(m >= 1, "1/(1 - q^0) is not a power series");
        let mut out = self.clone();
        let order = out.order();
        for _ in 0..n {
            for d in m..=order {
                let prev = out.coeffs[d - m].clone();
                if !prev.is_zero() {
                    out.coeffs[d] += prev;
                }
            }
        }
        out
    }

    /// Multiplication by `(1 - q)^e`.
    pub fn one_minus_q_pow(&self, e: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..e {
            for d in (1..=out.order()).rev() {
                let prev = out.coeffs[d - 1].clone();
                out.coeffs[d] -= prev;
            }
        }
        out
    }

    /// The derivation `δ = q·d/dq`: multiplies the `q^n` coefficient by `n`.
    pub fn delta(&self) -> Self {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * rat(n as i64))
                .collect(),
        }
    }

    /// Evaluates the retained polynomial `c_0 + c_1 q + … + c_N q^N` at `q`.
    pub fn eval_polynomial(&self, q: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * q + c)
    }

    /// First differing degree up to the smaller of the two orders.
    pub fn first_mismatch(&self, other: &QSeries) -> Option<Mismatch> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
            .map(|degree| Mismatch {
                degree,
                lhs: self.coeffs[degree].clone(),
                rhs: other.coeffs[degree].clone(),
            })
    }

    /// Equality of `c_0..=c_upto`. Degrees beyond either order count as unequal.
    pub fn eq_up_to(&self, other: &QSeries, upto: usize) -> bool {
        upto <= self.order()
            && upto <= other.order()
            && self.coeffs[..=upto] == other.coeffs[..=upto]
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            match d {
                0 => write!(f, "{abs}")?,
                _ if abs.is_one() => write!(f, "q^{d}")?,
                _ => write!(f, "{abs}*q^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

impl Add for &QSeries {
    type Output = QSeries;

    fn add(self, rhs: &QSeries) -> QSeries {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &QSeries {
    type Output = QSeries;

    fn sub(self, rhs: &QSeries) -> QSeries {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&QSeries> for QSeries {
    fn add_assign(&mut self, rhs: &QSeries) {
        self.coeffs.truncate(rhs.coeffs.len());
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x += y;
        }
    }
}

impl SubAssign<&QSeries> for QSeries {
    fn sub_assign(&mut self, rhs: &QSeries) {
        self.coeffs.truncate(rhs.coeffs.len());
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x -= y;
        }
    }
}

impl Neg for &QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        -&self
    }
}

/// Cauchy product truncated at the smaller order.
impl Mul for &QSeries {
    type Output = QSeries;

    fn mul(self, rhs: &QSeries) -> QSeries {
        let order = self.order().min(rhs.order());
        let mut out = QSeries::zero(order);
        for (i, x) in self.coeffs[..=order].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs[..=order - i].iter().enumerate() {
                if !y.is_zero() {
                    out.coeffs[i + j] += x * y;
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $f:ident),*) => {$(
        impl $tr for QSeries {
            type Output = QSeries;
            fn $f(self, rhs: QSeries) -> QSeries {
                (&self).$f(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

/// `1/(1 - q^m)^n = Σ_j C(n-1+j, j) q^{m j}`, truncated at `order`.
///
/// `n = 0` gives the constant 1.
pub fn geometric_pow(m: usize, n: u32, order: usize) -> QSeries {
    assert!(m >= 1, "geometric_pow needs m >= 1");
    let mut out = QSeries::zero(order);
    if n == 0 {
        out.coeffs[0] = Rational::one();
        return out;
    }
    let top = i64::from(n) - 1;
    for j in 0..=order / m {
        let j = j as i64;
        out.coeffs[(j as usize) * m] = Rational::from_integer(binomial(top + j, j));
    }
    out
}

/// `s·(1 - q)^e`. Rescales between the `(1-q)`-cleared and `[m]_q` forms.
pub fn one_minus_q_pow(s: &QSeries, e: u32) -> QSeries {
    s.one_minus_q_pow(e)
}

/// Rounds `x` to the nearest multiple of `2^-bits` (ties away from −∞).
pub fn round_dyadic(x: &Rational, bits: u32) -> Rational {
    let den = x.denom();
    let scaled: BigInt = (x.numer() << bits as usize) * 2 + den;
    let rounded = scaled.div_floor(&(den * 2));
    Rational::new(rounded, BigInt::one() << bits as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma1(n: usize) -> i64 {
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| d as i64).sum()
    }

    #[test]
    fn difference_of_squares() {
        let a = QSeries::from_integers(&[1, 1, 0, 0, 0]);
        let b = QSeries::from_integers(&[1, -1, 0, 0, 0]);
        assert_eq!(&a * &b, QSeries::from_integers(&[1, 0, -1, 0, 0]));
    }

    #[test]
    fn additive_inverse_and_identity() {
        let s = QSeries::from_coeffs((0..=12).map(|n| rat(sigma1(n))).collect());
        assert!((&s + &(-&s)).is_zero());
        assert_eq!(&s * &QSeries::one(12), s);
    }

    #[test]
    fn binary_ops_truncate_to_min_order() {
        let a = QSeries::one(7);
        let b = QSeries::one(3);
        assert_eq!((&a + &b).order(), 3);
        assert_eq!((&a * &b).order(), 3);
        assert_eq!((&b - &a).order(), 3);
    }

    #[test]
    fn delta_on_monomials_and_constants() {
        for n in 0..8 {
            let m = QSeries::monomial(rat(1), n, 10);
            assert_eq!(m.delta(), QSeries::monomial(rat(n as i64), n, 10));
        }
        assert!(QSeries::constant(rat(5), 6).delta().is_zero());
    }

    #[test]
    fn geometric_pow_examples() {
        assert_eq!(geometric_pow(1, 1, 4), QSeries::from_integers(&[1, 1, 1, 1, 1]));
        assert_eq!(
            geometric_pow(2, 2, 6),
            QSeries::from_integers(&[1, 0, 2, 0, 3, 0, 4])
        );
        assert_eq!(geometric_pow(1, 3, 3), QSeries::from_integers(&[1, 3, 6, 10]));
        assert_eq!(geometric_pow(3, 0, 5), QSeries::one(5));
    }

    #[test]
    fn one_minus_q_pow_examples() {
        assert_eq!(
            one_minus_q_pow(&QSeries::one(4), 2),
            QSeries::from_integers(&[1, -2, 1, 0, 0])
        );
        let s = QSeries::from_integers(&[3, 1, 4, 1, 5]);
        assert_eq!(one_minus_q_pow(&s, 0), s);
    }

    #[test]
    fn division_matches_geometric_pow() {
        for m in 1..5 {
            for n in 0..5 {
                assert_eq!(
                    QSeries::one(20).div_one_minus_q_pow(m, n),
                    geometric_pow(m, n, 20)
                );
            }
        }
    }

    #[test]
    fn first_mismatch_reports_degree_and_both_sides() {
        let a = QSeries::from_integers(&[0, 1, 3, 4]);
        let b = QSeries::from_integers(&[0, 1, 2, 4, 9]);
        let m = a.first_mismatch(&b).unwrap();
        assert_eq!((m.degree, m.lhs, m.rhs), (2, rat(3), rat(2)));
        assert!(a.eq_up_to(&b, 1));
        assert!(!a.eq_up_to(&b, 4));
        assert_eq!(a.first_mismatch(&a), None);
    }

    #[test]
    fn integrality() {
        assert!(QSeries::from_integers(&[1, 2]).is_integral());
        let half = Rational::new(1.into(), 2.into());
        assert!(!QSeries::constant(half, 2).is_integral());
    }

    #[test]
    fn display_is_readable() {
        let s = QSeries::from_integers(&[1, 0, -2, 1]);
        assert_eq!(s.to_string(), "1 - 2*q^2 + q^3 + O(q^4)");
        assert_eq!(QSeries::zero(1).to_string(), "0 + O(q^2)");
    }

    #[test]
    fn dyadic_rounding() {
        let third = Rational::new(1.into(), 3.into());
        let r = round_dyadic(&third, 4);
        assert_eq!(r, Rational::new(5.into(), 16.into()));
        let neg = round_dyadic(&-third, 4);
        assert_eq!(neg, Rational::new((-5).into(), 16.into()));
    }
}

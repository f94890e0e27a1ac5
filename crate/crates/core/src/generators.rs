//! Nested-sum constructions of the qMZV families and auxiliary single sums.
//!
//! All families are specialisations of one monomial-weighted nested sum
//!
//! ```text
//! Σ_{m_1 > … > m_k > 0}  Π_i  q^{a_i m_i} / (1 - q^{m_i})^{n_i}
//! ```
//!
//! driven by an [`MzvIndex`]. The `q⁻¹`-reflected family is obtained from
//! `1 - q^{-m} = -q^{-m}(1 - q^m)`, so everything stays a power series in `q`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qseries::{rat, round_dyadic, QSeries, Rational};

/// A composition `(n_1..n_k)` paired with exponent weights `(a_1..a_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MzvIndex {
    n: Vec<u32>,
    a: Vec<u32>,
}

impl MzvIndex {
    pub fn new(n: Vec<u32>, a: Vec<u32>) -> Result<Self> {
        if n.is_empty() {
            return Err(Error::EmptyComposition);
        }
        if n.len() != a.len() {
            return Err(Error::domain(format!(
                "composition has length {} but exponent vector has length {}",
                n.len(),
                a.len()
            )));
        }
        if a[0] == 0 {
            return Err(Error::NonSummable);
        }
        Ok(MzvIndex { n, a })
    }

    pub fn composition(&self) -> &[u32] {
        &self.n
    }

    pub fn exponents(&self) -> &[u32] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.n.iter().sum()
    }
}

/// The three named qMZV families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `z̄_q(n) = Σ q^{m_1} / Π (1 - q^{m_i})^{n_i}`.
    Zbar,
    /// Bradley's modified `ζ̄_q(n) = Σ q^{Σ (n_i-1) m_i} / Π (1 - q^{m_i})^{n_i}`.
    ZetaBarBradley,
    /// `z̄_{q⁻¹}(n)` rewritten as a power series in `q`.
    QinvZbar,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Zbar, Family::ZetaBarBradley, Family::QinvZbar];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Zbar => "zbar",
            Family::ZetaBarBradley => "zeta-bar-bradley",
            Family::QinvZbar => "qinv-zbar",
        }
    }

    /// Checks the family's admissible compositions.
    ///
    /// All families need `n_1 >= 2` and `n_i >= 1` after that; `zbar`
    /// additionally allows a trailing zero, `z̄(s, 0)`.
    pub fn validate(self, n: &[u32]) -> Result<()> {
        let bad = |reason| {
            Err(Error::InvalidComposition {
                family: self.as_str(),
                indices: n.to_vec(),
                reason,
            })
        };
        if n.is_empty() {
            return Err(Error::EmptyComposition);
        }
        if n[0] < 2 {
            return bad("n_1 must be at least 2");
        }
        for (i, &ni) in n.iter().enumerate().skip(1) {
            let trailing_zero = self == Family::Zbar && i == n.len() - 1 && ni == 0;
            if ni == 0 && !trailing_zero {
                return bad("n_i must be at least 1 for i > 1");
            }
        }
        Ok(())
    }

    /// The monomial index and overall sign realising this family.
    pub fn index(self, n: &[u32]) -> Result<(MzvIndex, Rational)> {
        self.validate(n)?;
        let (a, sign): (Vec<u32>, i64) = match self {
            Family::Zbar => {
                let mut a = vec![0; n.len()];
                a[0] = 1;
                (a, 1)
            }
            Family::ZetaBarBradley => (n.iter().map(|&ni| ni - 1).collect(), 1),
            Family::QinvZbar => {
                let mut a = n.to_vec();
                a[0] -= 1;
                let w: u32 = n.iter().sum();
                (a, if w.is_multiple_of(2) { 1 } else { -1 })
            }
        };
        Ok((MzvIndex::new(n.to_vec(), a)?, rat(sign)))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "zbar" => Ok(Family::Zbar),
            "zeta-bar-bradley" | "bradley" | "zeta-bar" => Ok(Family::ZetaBarBradley),
            "qinv-zbar" | "zbar-qinv" => Ok(Family::QinvZbar),
            _ => Err(Error::domain(format!("unknown family `{s}`"))),
        }
    }
}

/// Multiplies `s` by `q^{a m} / (1 - q^m)^n`.
fn apply_factor(s: &QSeries, n: u32, a: u32, m: usize) -> QSeries {
    s.div_one_minus_q_pow(m, n).mul_q_pow(a as usize * m)
}

/// The monomial-weighted nested sum truncated at `order`.
///
/// Uses prefix sums over the chain from the innermost index outwards; the
/// outermost index is bounded by `m_1 <= order / a_1`.
pub fn monomial_qmzv(idx: &MzvIndex, order: usize) -> QSeries {
    let (n, a) = (idx.composition(), idx.exponents());
    let top = order / a[0] as usize;
    let mut total = QSeries::zero(order);
    if top == 0 {
        return total;
    }
    // inner[m]: sum over the tail chain whose largest index is below m.
    let mut inner: Vec<QSeries> = vec![QSeries::one(order); top + 1];
    for level in (1..n.len()).rev() {
        let mut next = Vec::with_capacity(top + 1);
        let mut acc = QSeries::zero(order);
        next.push(acc.clone());
        for (m, tail) in inner.iter().enumerate().skip(1) {
            next.push(acc.clone());
            acc += &apply_factor(tail, n[level], a[level], m);
        }
        inner = next;
    }
    for (m, tail) in inner.iter().enumerate().skip(1) {
        total += &apply_factor(tail, n[0], a[0], m);
    }
    total
}

/// A named qMZV family member truncated at `order`.
pub fn named_qmzv(family: Family, n: &[u32], order: usize) -> Result<QSeries> {
    let (idx, sign) = family.index(n)?;
    let s = monomial_qmzv(&idx, order);
    Ok(if sign.is_one() { s } else { s.scale(&sign) })
}

/// `Σ_{l>0} p(l) q^{c l} / (1 - q^l)^s` for a polynomial `p` in `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSingle {
    poly: Vec<Rational>,
    exp_mult: u32,
    denom_pow: u32,
}

impl WeightedSingle {
    /// `poly[i]` is the coefficient of `l^i`.
    pub fn new(poly: Vec<Rational>, exp_mult: u32, denom_pow: u32) -> Result<Self> {
        if exp_mult == 0 {
            return Err(Error::domain(
                "weighted single sum needs exponent multiplier c >= 1",
            ));
        }
        Ok(WeightedSingle {
            poly,
            exp_mult,
            denom_pow,
        })
    }

    /// `p(l) = l`.
    pub fn index(exp_mult: u32, denom_pow: u32) -> Result<Self> {
        Self::new(vec![rat(0), rat(1)], exp_mult, denom_pow)
    }

    /// `p(l) = l - 1`.
    pub fn index_minus_one(exp_mult: u32, denom_pow: u32) -> Result<Self> {
        Self::new(vec![rat(-1), rat(1)], exp_mult, denom_pow)
    }

    fn eval_poly(&self, l: usize) -> Rational {
        let l = rat(l as i64);
        self.poly
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * &l + c)
    }
}

pub fn weighted_single_sum(ws: &WeightedSingle, order: usize) -> QSeries {
    let c = ws.exp_mult as usize;
    let mut total = QSeries::zero(order);
    for l in 1..=order / c {
        let p = ws.eval_poly(l);
        if p.is_zero() {
            continue;
        }
        let term = QSeries::monomial(p, c * l, order).div_one_minus_q_pow(l, ws.denom_pow);
        total += &term;
    }
    total
}

/// Closed form `Σ_{l>0} l q^l (1 + (t-1) q^l) / (1 - q^l)^{t+1}` of `δ z̄_q(t)`.
pub fn delta_zbar_closed(t: u32, order: usize) -> Result<QSeries> {
    if t < 2 {
        return Err(Error::domain(format!("delta_zbar_closed needs t >= 2, got {t}")));
    }
    let mut out = weighted_single_sum(&WeightedSingle::index(1, t + 1)?, order);
    let second = weighted_single_sum(&WeightedSingle::index(2, t + 1)?, order);
    out.add_scaled(&rat(i64::from(t) - 1), &second);
    Ok(out)
}

/// How partial sums are accumulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Exact,
    /// Every summand and running sum is rounded to a multiple of `2^-bits`.
    /// Total error is bounded by a small multiple of `cutoff · 2^-bits`.
    Dyadic(u32),
}

/// Extra bits carried by intermediate quantities in dyadic mode.
const GUARD_BITS: u32 = 64;

impl Precision {
    fn guarded(self) -> Precision {
        match self {
            Precision::Exact => Precision::Exact,
            Precision::Dyadic(bits) => Precision::Dyadic(bits + GUARD_BITS),
        }
    }

    fn apply(self, x: Rational) -> Rational {
        match self {
            Precision::Exact => x,
            Precision::Dyadic(bits) => round_dyadic(&x, bits),
        }
    }
}

/// Shared prefix-sum driver: `Σ_{cutoff >= m_1 > … > m_k > 0} Π factor(i, m_i)`.
fn nested_partial_sum<F>(len: usize, cutoff: usize, precision: Precision, factor: F) -> Rational
where
    F: Fn(usize, usize) -> Rational,
{
    let mut inner = vec![Rational::one(); cutoff + 1];
    for level in (1..len).rev() {
        let mut next = Vec::with_capacity(cutoff + 1);
        let mut acc = Rational::zero();
        next.push(acc.clone());
        for (m, tail) in inner.iter().enumerate().skip(1) {
            next.push(acc.clone());
            acc = precision.apply(acc + factor(level, m) * tail);
        }
        inner = next;
    }
    let mut total = Rational::zero();
    for (m, tail) in inner.iter().enumerate().skip(1) {
        total = precision.apply(total + factor(0, m) * tail);
    }
    total
}

fn check_q(q: &Rational) -> Result<()> {
    if !q.is_positive() || *q >= Rational::one() {
        return Err(Error::domain(format!("q must lie in (0, 1), got {q}")));
    }
    Ok(())
}

/// Exact partial sum of a named family at a rational `0 < q < 1` over chains
/// with `m_1 <= cutoff`.
pub fn numeric_nested_sum(
    family: Family,
    n: &[u32],
    q: &Rational,
    cutoff: usize,
) -> Result<Rational> {
    numeric_nested_sum_with(family, n, q, cutoff, Precision::Exact)
}

pub fn numeric_nested_sum_with(
    family: Family,
    n: &[u32],
    q: &Rational,
    cutoff: usize,
    precision: Precision,
) -> Result<Rational> {
    check_q(q)?;
    if cutoff < 1 {
        return Err(Error::domain("index cutoff M must be at least 1"));
    }
    let (idx, sign) = family.index(n)?;
    // Exact powers of q grow linearly in size with m; in dyadic mode the
    // powers and the per-term factors are rounded with guard bits instead.
    let guarded = precision.guarded();
    let mut q_pows = Vec::with_capacity(cutoff + 1);
    q_pows.push(Rational::one());
    for m in 1..=cutoff {
        let next = guarded.apply(&q_pows[m - 1] * q);
        q_pows.push(next);
    }
    let (ns, a) = (idx.composition(), idx.exponents());
    let factor = |i: usize, m: usize| {
        let qm = &q_pows[m];
        let base = Rational::one() - qm;
        let den = num_traits::pow(base, ns[i] as usize);
        guarded.apply(num_traits::pow(qm.clone(), a[i] as usize) / den)
    };
    let total = nested_partial_sum(n.len(), cutoff, precision, factor);
    Ok(total * sign)
}

/// Exact partial sum `Σ_{M >= m_1 > … > m_k > 0} Π m_i^{-n_i}` of a classical MZV.
pub fn classical_mzv_partial(n: &[u32], cutoff: usize) -> Result<Rational> {
    classical_mzv_partial_with(n, cutoff, Precision::Exact)
}

pub fn classical_mzv_partial_with(n: &[u32], cutoff: usize, precision: Precision) -> Result<Rational> {
    if n.is_empty() {
        return Err(Error::EmptyComposition);
    }
    if n[0] < 2 {
        return Err(Error::InvalidComposition {
            family: "classical",
            indices: n.to_vec(),
            reason: "n_1 must be at least 2",
        });
    }
    if cutoff < n.len() {
        return Err(Error::domain(format!(
            "cutoff M = {cutoff} is below the length {}",
            n.len()
        )));
    }
    let factor = |i: usize, m: usize| {
        Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(m), n[i] as usize))
    };
    Ok(nested_partial_sum(n.len(), cutoff, precision, factor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn zbar2_is_divisor_sum() {
        let s = named_qmzv(Family::Zbar, &[2], 5).unwrap();
        assert_eq!(s, QSeries::from_integers(&[0, 1, 3, 4, 7, 6]));
    }

    #[test]
    fn zbar21_low_coefficients() {
        let s = named_qmzv(Family::Zbar, &[2, 1], 4).unwrap();
        assert_eq!(&s.coeffs()[..4], &[rat(0), rat(0), rat(1), rat(3)]);
    }

    #[test]
    fn bradley_family_map() {
        let idx = MzvIndex::new(vec![2, 2], vec![1, 1]).unwrap();
        assert_eq!(
            named_qmzv(Family::ZetaBarBradley, &[2, 2], 30).unwrap(),
            monomial_qmzv(&idx, 30)
        );
    }

    #[test]
    fn rejects_bad_indices() {
        assert_eq!(MzvIndex::new(vec![], vec![]), Err(Error::EmptyComposition));
        assert_eq!(MzvIndex::new(vec![2], vec![0]), Err(Error::NonSummable));
        assert!(named_qmzv(Family::Zbar, &[1, 2], 5).is_err());
        assert!(named_qmzv(Family::Zbar, &[2, 0, 1], 5).is_err());
        assert!(named_qmzv(Family::Zbar, &[2, 0], 5).is_ok());
        assert!(named_qmzv(Family::ZetaBarBradley, &[2, 0], 5).is_err());
        assert!(named_qmzv(Family::QinvZbar, &[3, 0], 5).is_err());
    }

    #[test]
    fn trailing_zero_is_weighted_single() {
        for s in 2..=6 {
            let lhs = named_qmzv(Family::Zbar, &[s, 0], 40).unwrap();
            let rhs = weighted_single_sum(&WeightedSingle::index_minus_one(1, s).unwrap(), 40);
            assert_eq!(lhs, rhs, "s = {s}");
        }
    }

    #[test]
    fn weighted_single_examples() {
        let ws = WeightedSingle::index_minus_one(1, 2).unwrap();
        let s = weighted_single_sum(&ws, 4);
        assert_eq!(s, QSeries::from_integers(&[0, 0, 1, 2, 5]));
        let lin = weighted_single_sum(&WeightedSingle::index(1, 0).unwrap(), 10);
        assert_eq!(lin, QSeries::from_integers(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]));
        assert!(WeightedSingle::new(vec![rat(1)], 0, 2).is_err());
    }

    #[test]
    fn delta_closed_form_matches_derivation() {
        for t in 2..=4 {
            let direct = named_qmzv(Family::Zbar, &[t], 40).unwrap().delta();
            assert_eq!(delta_zbar_closed(t, 40).unwrap(), direct, "t = {t}");
        }
        assert!(delta_zbar_closed(1, 10).is_err());
    }

    #[test]
    fn numeric_hand_sums() {
        let half = frac(1, 2);
        assert_eq!(numeric_nested_sum(Family::Zbar, &[2], &half, 1).unwrap(), rat(2));
        assert_eq!(
            numeric_nested_sum(Family::Zbar, &[2], &half, 2).unwrap(),
            frac(22, 9)
        );
        assert!(numeric_nested_sum(Family::Zbar, &[2], &rat(1), 2).is_err());
        assert!(numeric_nested_sum(Family::Zbar, &[2], &rat(0), 2).is_err());
        assert!(numeric_nested_sum(Family::Zbar, &[2], &half, 0).is_err());
    }

    #[test]
    fn classical_hand_sums() {
        assert_eq!(classical_mzv_partial(&[2], 3).unwrap(), frac(49, 36));
        assert_eq!(classical_mzv_partial(&[2, 1], 2).unwrap(), frac(1, 4));
        assert!(classical_mzv_partial(&[1, 1], 5).is_err());
        assert!(classical_mzv_partial(&[2, 1, 1], 2).is_err());
    }

    #[test]
    fn dyadic_sum_is_close_to_exact() {
        let q = frac(3, 4);
        let exact = numeric_nested_sum(Family::Zbar, &[3, 1], &q, 40).unwrap();
        let approx =
            numeric_nested_sum_with(Family::Zbar, &[3, 1], &q, 40, Precision::Dyadic(128)).unwrap();
        let bound = Rational::new(1.into(), num_bigint::BigInt::from(1) << 110);
        assert!((exact - approx).abs() < bound);
    }

    #[test]
    fn dyadic_close_to_one() {
        let q = frac(99, 100);
        let exact = numeric_nested_sum(Family::Zbar, &[2], &q, 120).unwrap();
        let approx =
            numeric_nested_sum_with(Family::Zbar, &[2], &q, 120, Precision::Dyadic(256)).unwrap();
        let bound = Rational::new(1.into(), num_bigint::BigInt::from(1) << 240);
        assert!((exact - approx).abs() < bound);
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert_eq!("qinv_zbar".parse::<Family>().unwrap(), Family::QinvZbar);
        assert!("nope".parse::<Family>().is_err());
    }
}

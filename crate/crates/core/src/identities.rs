//! Right-hand sides of the product and decomposition formulas, the `α`/`β`
//! coefficient tables, and the verification driver.
//!
//! Every identity is checked as a literal equality of coefficient vectors up
//! to the requested order; there is no tolerance anywhere except in the
//! numeric `q ↗ 1` limit check.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::combinatorics::{binomial, multinomial, sign};
use crate::error::{Error, Result};
use crate::generators::{
    classical_mzv_partial_with, delta_zbar_closed, named_qmzv, numeric_nested_sum_with,
    weighted_single_sum, Family, Precision, WeightedSingle,
};
use crate::operators::{self, apply_n, build_qmzv_by_operators, BiSeries, OperatorKind};
use crate::qseries::{one_minus_q_pow, rat, QSeries, Rational};
use crate::report::{IdentityReport, LimitReport, Params, Status};

fn int(b: BigInt) -> Rational {
    Rational::from_integer(b)
}

fn check_pair(a: u32, b: u32) -> Result<()> {
    if a < 2 || a > b {
        return Err(Error::domain(format!("need 2 <= a <= b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Accumulates a rational linear combination of generator terms.
struct Combination {
    order: usize,
    sum: QSeries,
}

impl Combination {
    fn new(order: usize) -> Self {
        Combination {
            order,
            sum: QSeries::zero(order),
        }
    }

    fn series(&mut self, c: &Rational, s: &QSeries) {
        self.sum.add_scaled(c, s);
    }

    fn family(&mut self, c: &Rational, family: Family, n: &[u32]) -> Result<()> {
        if !c.is_zero() {
            let s = named_qmzv(family, n, self.order)?;
            self.sum.add_scaled(c, &s);
        }
        Ok(())
    }

    fn zbar(&mut self, c: &Rational, n: &[u32]) -> Result<()> {
        self.family(c, Family::Zbar, n)
    }

    fn zeta(&mut self, c: &Rational, n: &[u32]) -> Result<()> {
        self.family(c, Family::ZetaBarBradley, n)
    }

    /// `Σ_{l>0} (l-1) q^{c l} / (1 - q^l)^s`.
    fn shifted_single(&mut self, coeff: &Rational, c: u32, s: u32) -> Result<()> {
        let ws = WeightedSingle::index_minus_one(c, s)?;
        self.sum.add_scaled(coeff, &weighted_single_sum(&ws, self.order));
        Ok(())
    }

    fn finish(self) -> QSeries {
        self.sum
    }
}

fn zbar(n: &[u32], order: usize) -> Result<QSeries> {
    named_qmzv(Family::Zbar, n, order)
}

fn zeta_bar(n: &[u32], order: usize) -> Result<QSeries> {
    named_qmzv(Family::ZetaBarBradley, n, order)
}

/// The `α`/`β` tables for a pair `2 <= a <= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerCoefficients {
    a: u32,
    b: u32,
    beta: Vec<Rational>,
    alpha: Vec<Rational>,
}

impl EulerCoefficients {
    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// `β_j` for `0 <= j <= a-1`.
    pub fn beta(&self, j: u32) -> &Rational {
        &self.beta[j as usize]
    }

    /// `α_k` for `b <= k <= a+b-2`.
    pub fn alpha(&self, k: u32) -> &Rational {
        assert!(
            (self.b..=self.a + self.b - 2).contains(&k),
            "alpha index {k} outside {}..={}",
            self.b,
            self.a + self.b - 2
        );
        &self.alpha[(k - self.b) as usize]
    }

    pub fn betas(&self) -> &[Rational] {
        &self.beta
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alpha
    }
}

pub fn euler_coefficients(a: u32, b: u32) -> Result<EulerCoefficients> {
    check_pair(a, b)?;
    let (ai, bi) = (i64::from(a), i64::from(b));
    let beta = (0..ai)
        .map(|j| int(sign(ai - j) * multinomial(j + bi - 1, &[j, j + bi - ai, ai - j - 1])))
        .collect();
    let mut alpha = Vec::with_capacity(a as usize - 1);
    let mut running = Rational::zero();
    for j in bi..=ai + bi - 2 {
        let c = int(sign(ai + bi - j) * multinomial(j - 1, &[j - bi, j - ai, ai + bi - j - 1]));
        running += c / rat(1 - j);
        alpha.push(running.clone());
    }
    Ok(EulerCoefficients { a, b, beta, alpha })
}

/// `Σ_{j=0}^{a-1} β_j / (j+b-1)`, which must vanish for the theorem's
/// linear system to be consistent.
pub fn combinatorial_lemma_sum(a: u32, b: u32) -> Result<Rational> {
    let coeffs = euler_coefficients(a, b)?;
    Ok(coeffs
        .betas()
        .iter()
        .enumerate()
        .map(|(j, beta)| beta / rat(j as i64 + i64::from(b) - 1))
        .sum())
}

/// `z_{ab} = Σ_j β_j Σ_{l>0} (l-1) q^l / (1-q^l)^{j+b}`.
pub fn zab_series(a: u32, b: u32, order: usize) -> Result<QSeries> {
    let coeffs = euler_coefficients(a, b)?;
    let mut acc = Combination::new(order);
    for (j, beta) in coeffs.betas().iter().enumerate() {
        acc.shifted_single(beta, 1, j as u32 + b)?;
    }
    Ok(acc.finish())
}

/// `Σ_{k=0}^{a-2} α_{k+b} δz̄(k+b) − Σ_{j=0}^{a-1} β_j z̄(j+b)`.
pub fn zab_reduction(a: u32, b: u32, order: usize) -> Result<QSeries> {
    let coeffs = euler_coefficients(a, b)?;
    let mut acc = Combination::new(order);
    for k in b..=a + b - 2 {
        acc.series(coeffs.alpha(k), &zbar(&[k], order)?.delta());
    }
    for (j, beta) in coeffs.betas().iter().enumerate() {
        acc.zbar(&-beta, &[j as u32 + b])?;
    }
    Ok(acc.finish())
}

pub fn theorem_zab_check(a: u32, b: u32, order: usize) -> Result<IdentityReport> {
    let lhs = zab_series(a, b, order)?;
    let rhs = zab_reduction(a, b, order)?;
    Ok(IdentityReport::new(
        IdentityId::TheoremZab.as_str(),
        Params::Pair { a, b },
        order,
        lhs.first_mismatch(&rhs),
    ))
}

/// `z̄(a)·z̄(b)`.
pub fn zbar_product(a: u32, b: u32, order: usize) -> Result<QSeries> {
    Ok(&zbar(&[a], order)? * &zbar(&[b], order)?)
}

/// The four-block decomposition of `z̄(a)z̄(b)` into length-two values,
/// length-one values and `δ`-terms.
pub fn euler_decomposition_rhs(a: u32, b: u32, order: usize) -> Result<QSeries> {
    let coeffs = euler_coefficients(a, b)?;
    let (ai, bi) = (i64::from(a), i64::from(b));
    let mut acc = Combination::new(order);
    for l in 0..ai {
        for k in 0..=ai - 1 - l {
            let c = sign(k) * binomial(l + bi - 1, bi - 1) * binomial(bi, k);
            acc.zbar(&int(c), &[(bi + l) as u32, (ai - l - k) as u32])?;
        }
    }
    for l in 0..bi {
        for k in 0..=ai.min(bi - 1 - l) {
            let c = sign(k) * binomial(l + ai - 1, ai - 1) * binomial(ai, k);
            acc.zbar(&int(c), &[(ai + l) as u32, (bi - l - k) as u32])?;
        }
    }
    for k in 1..=a {
        acc.zbar(&-coeffs.beta(a - k), &[a + b - k])?;
    }
    for j in 1..a {
        let t = a + b - 1 - j;
        acc.series(coeffs.alpha(t), &delta_zbar_closed(t, order)?);
    }
    Ok(acc.finish())
}

/// Product formula over the five summation domains `D_1..D_5`.
// The bounds are kept in the `lo <= x <= hi` shape the domains are stated in.
#[allow(clippy::int_plus_one)]
pub fn domain_sum_rhs(a: u32, b: u32, order: usize) -> Result<QSeries> {
    check_pair(a, b)?;
    let (ai, bi) = (i64::from(a), i64::from(b));
    let mut acc = Combination::new(order);
    for j in 1..=ai + bi {
        for i in 1..=ai + bi {
            let s = sign(ai + bi - i - j);
            let mut c = BigInt::zero();
            // D_1
            if i <= bi && ai <= j && bi - i + 1 <= j && j <= ai + bi - i {
                c += multinomial(j - 1, &[i + j - bi - 1, j - ai, ai + bi - i - j]);
            }
            // D_2
            if i <= bi - 1 && ai <= j && bi - i <= j && j <= ai + bi - i - 1 {
                c += multinomial(j - 1, &[i + j - bi, j - ai, ai + bi - i - j - 1]);
            }
            // D_3
            if i <= ai && ai - i + 1 <= j && bi <= j && j <= ai + bi - i {
                c += multinomial(j - 1, &[j - bi, i + j - ai - 1, ai + bi - i - j]);
            }
            // D_4
            if i <= ai - 1 && ai - i <= j && bi <= j && j <= ai + bi - i - 1 {
                c += multinomial(j - 1, &[j - bi, i + j - ai, ai + bi - i - j - 1]);
            }
            if !c.is_zero() {
                acc.zbar(&int(s * c), &[j as u32, i as u32])?;
            }
        }
    }
    // D_5: P̃^{(j)}(ȳȳ)(q) = Σ (l-1) q^l / (1-q^l)^j
    for j in ai.max(bi)..ai + bi {
        let c = sign(ai + bi - j) * multinomial(j - 1, &[j - bi, j - ai, ai + bi - j - 1]);
        acc.shifted_single(&int(c), 1, j as u32)?;
    }
    Ok(acc.finish())
}

/// The compact five-sum product formula. The last sum carries the sign
/// `(-1)^{a-j}` of `z_{ab}`; `printed_sign` switches to the constant
/// `(-1)^{a-1}` for comparison.
pub(crate) fn compact_rhs_with_sign(
    a: u32,
    b: u32,
    order: usize,
    printed_sign: bool,
) -> Result<QSeries> {
    check_pair(a, b)?;
    let (ai, bi) = (i64::from(a), i64::from(b));
    let mut acc = Combination::new(order);
    let term = |c: BigInt, j: i64, i: i64, acc: &mut Combination| -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        acc.zbar(&int(sign(ai + bi - i - j) * c), &[j as u32, i as u32])
    };
    for j in ai..ai + bi {
        for i in (bi - j + 1).max(1)..=ai + bi - j {
            let c = binomial(j - 1, ai - 1) * binomial(ai - 1, ai + bi - i - j);
            term(c, j, i, &mut acc)?;
        }
        for i in (bi - j).max(1)..ai + bi - j {
            let c = binomial(j - 1, ai - 1) * binomial(ai - 1, ai + bi - i - j - 1);
            term(c, j, i, &mut acc)?;
        }
    }
    for j in bi..ai + bi {
        for i in 1..=ai + bi - j {
            let c = binomial(j - 1, bi - 1) * binomial(bi - 1, ai + bi - i - j);
            term(c, j, i, &mut acc)?;
        }
        for i in 1..ai + bi - j {
            let c = binomial(j - 1, bi - 1) * binomial(bi - 1, ai + bi - i - j - 1);
            term(c, j, i, &mut acc)?;
        }
    }
    for j in 0..ai {
        let s = if printed_sign { sign(ai - 1) } else { sign(ai - j) };
        let c = s * multinomial(j + bi - 1, &[j, ai - j - 1, j + bi - ai]);
        acc.shifted_single(&int(c), 1, (j + bi) as u32)?;
    }
    Ok(acc.finish())
}

pub fn compact_rhs(a: u32, b: u32, order: usize) -> Result<QSeries> {
    compact_rhs_with_sign(a, b, order, false)
}

fn check_stuffle(n: u32, m: u32) -> Result<()> {
    if n < 2 || m < 2 {
        return Err(Error::domain(format!(
            "quasi-shuffle needs n, m >= 2, got n = {n}, m = {m}"
        )));
    }
    Ok(())
}

/// Quasi-shuffle right-hand side of `X(n)·X(m)` in modified variables.
///
/// - `zbar`: `z̄(n,m) + z̄(m,n) + z̄(n+m) − z̄(n,m-1) − z̄(m,n-1) − z̄(n+m-1)`
/// - `zeta-bar-bradley`: `ζ̄(n,m) + ζ̄(m,n) + ζ̄(n+m) + ζ̄(n+m-1)`
pub fn quasi_shuffle_rhs(family: Family, n: u32, m: u32, order: usize) -> Result<QSeries> {
    check_stuffle(n, m)?;
    let one = rat(1);
    let mut acc = Combination::new(order);
    match family {
        Family::Zbar => {
            acc.zbar(&one, &[n, m])?;
            acc.zbar(&one, &[m, n])?;
            acc.zbar(&one, &[n + m])?;
            acc.zbar(&-&one, &[n, m - 1])?;
            acc.zbar(&-&one, &[m, n - 1])?;
            acc.zbar(&-&one, &[n + m - 1])?;
        }
        Family::ZetaBarBradley => {
            acc.zeta(&one, &[n, m])?;
            acc.zeta(&one, &[m, n])?;
            acc.zeta(&one, &[n + m])?;
            acc.zeta(&one, &[n + m - 1])?;
        }
        Family::QinvZbar => {
            return Err(Error::domain("quasi-shuffle is defined for zbar and zeta-bar-bradley"))
        }
    }
    Ok(acc.finish())
}

/// The quasi-shuffle in unmodified variables `(1-q)^w·X`, with its explicit
/// `(1-q)` correction factor. Returns `(lhs, rhs)`.
pub fn quasi_shuffle_scaled(
    family: Family,
    n: u32,
    m: u32,
    order: usize,
) -> Result<(QSeries, QSeries)> {
    check_stuffle(n, m)?;
    let unmod = |k: &[u32]| -> Result<QSeries> {
        let w = k.iter().sum();
        Ok(one_minus_q_pow(&named_qmzv(family, k, order)?, w))
    };
    let lhs = &unmod(&[n])? * &unmod(&[m])?;
    let mut rhs = &(&unmod(&[n, m])? + &unmod(&[m, n])?) + &unmod(&[n + m])?;
    match family {
        Family::Zbar => {
            let lower = &(&unmod(&[n, m - 1])? + &unmod(&[m, n - 1])?) + &unmod(&[n + m - 1])?;
            rhs -= &one_minus_q_pow(&lower, 1);
        }
        Family::ZetaBarBradley => {
            rhs += &one_minus_q_pow(&unmod(&[n + m - 1])?, 1);
        }
        Family::QinvZbar => {
            return Err(Error::domain("quasi-shuffle is defined for zbar and zeta-bar-bradley"))
        }
    }
    Ok((lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BradleyVariant {
    /// Double sums minus the weighted single sums `Σ (k-1) q^{(a+b-1-l)k}/(1-q^k)^{a+b-l}`.
    Raw,
    /// Double sums plus `β`-weighted `ζ̄` and `α`-weighted `δζ̄` terms.
    DeltaForm,
}

fn bradley_double_sums(a: u32, b: u32, acc: &mut Combination) -> Result<()> {
    let (ai, bi) = (i64::from(a), i64::from(b));
    for n in 0..ai {
        for m in 0..ai - n {
            let c = binomial(n + bi - 1, bi - 1) * binomial(bi - 1, m);
            acc.zeta(&int(c), &[(bi + n) as u32, (ai - n - m) as u32])?;
        }
    }
    for n in 0..bi {
        for m in 0..bi - n {
            let c = binomial(n + ai - 1, ai - 1) * binomial(ai - 1, m);
            acc.zeta(&int(c), &[(ai + n) as u32, (bi - n - m) as u32])?;
        }
    }
    Ok(())
}

/// `alpha_sign` multiplies the `δζ̄` block; `+1` reproduces the product.
pub(crate) fn bradley_rhs_with(
    a: u32,
    b: u32,
    order: usize,
    variant: BradleyVariant,
    alpha_sign: i64,
) -> Result<QSeries> {
    check_pair(a, b)?;
    let mut acc = Combination::new(order);
    bradley_double_sums(a, b, &mut acc)?;
    match variant {
        BradleyVariant::Raw => {
            let (ai, bi) = (i64::from(a), i64::from(b));
            for l in 1..=ai.min(bi) {
                let c = multinomial(ai + bi - 1 - l, &[ai - l, bi - l, l - 1]);
                acc.shifted_single(&-int(c), (ai + bi - 1 - l) as u32, (ai + bi - l) as u32)?;
            }
        }
        BradleyVariant::DeltaForm => {
            let coeffs = euler_coefficients(a, b)?;
            for k in 1..=a {
                let c = coeffs.beta(a - k) * rat(sign(i64::from(k)));
                acc.zeta(&c, &[a + b - k])?;
            }
            for j in 1..a {
                let t = a + b - 1 - j;
                let c = coeffs.alpha(t) * rat(alpha_sign * sign(i64::from(j) + 1));
                acc.series(&c, &zeta_bar(&[t], order)?.delta());
            }
        }
    }
    Ok(acc.finish())
}

pub fn bradley_rhs(a: u32, b: u32, order: usize, variant: BradleyVariant) -> Result<QSeries> {
    bradley_rhs_with(a, b, order, variant, 1)
}

/// `ζ̄(n)` as a signed sum of `z̄_{q⁻¹}` values over all ways of lowering the
/// trailing entries by one. Requires every `n_i >= 2`.
pub fn conversion_rhs(n: &[u32], order: usize) -> Result<QSeries> {
    if n.is_empty() {
        return Err(Error::EmptyComposition);
    }
    if n.iter().any(|&ni| ni < 2) {
        return Err(Error::InvalidComposition {
            family: "conversion",
            indices: n.to_vec(),
            reason: "every n_i must be at least 2",
        });
    }
    let w: i64 = n.iter().map(|&x| i64::from(x)).sum();
    let tail = n.len() - 1;
    let mut acc = Combination::new(order);
    for mask in 0u32..(1 << tail) {
        let mut lowered = n.to_vec();
        for (i, entry) in lowered.iter_mut().skip(1).enumerate() {
            if mask & (1 << i) != 0 {
                *entry -= 1;
            }
        }
        let j = i64::from(mask.count_ones());
        acc.family(&rat(sign(w - j)), Family::QinvZbar, &lowered)?;
    }
    Ok(acc.finish())
}

/// `(-1)^n Σ_{l>0} (l-1) q^{(n-1)l} / (1-q^l)^n`, the power-series form of
/// `z̄_{q⁻¹}(n, 0) = Σ_{l>m>0} q^{-l}/(1-q^{-l})^n`.
fn qinv_zbar_trailing_zero(n: u32, order: usize) -> Result<QSeries> {
    let ws = WeightedSingle::index_minus_one(n - 1, n)?;
    Ok(weighted_single_sum(&ws, order).scale(&rat(sign(i64::from(n)))))
}

fn check_length2(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("length-two conversion needs n >= 2, got {n}")));
    }
    Ok(())
}

/// Both sides of `ζ_q(n,1) = q^w 𝔷_{q⁻¹}(n,1) − q^w (1-q⁻¹) 𝔷_{q⁻¹}(n,0)`,
/// `w = n+1`, cleared to power series in `q`:
/// `q^w (1-q⁻¹)^w = (-1)^w (1-q)^w`.
pub fn length2_conversion_sides(n: u32, order: usize) -> Result<(QSeries, QSeries)> {
    check_length2(n)?;
    let w = n + 1;
    let lhs = one_minus_q_pow(&zeta_bar(&[n, 1], order)?, w);
    let mut bracket = named_qmzv(Family::QinvZbar, &[n, 1], order)?;
    bracket -= &qinv_zbar_trailing_zero(n, order)?;
    let rhs = one_minus_q_pow(&bracket, w).scale(&rat(sign(i64::from(w))));
    Ok((lhs, rhs))
}

/// The same identity with the `j = 1` correction written as
/// `+ q^w Σ l q^{-l}/[l]^n_{q⁻¹} − q^w 𝔷_{q⁻¹}(n)`, i.e. without the
/// `−(1-q⁻¹)` factor. Kept to document that this form does not hold.
pub fn length2_conversion_unfactored_rhs(n: u32, order: usize) -> Result<QSeries> {
    check_length2(n)?;
    let w = n + 1;
    let first = one_minus_q_pow(&named_qmzv(Family::QinvZbar, &[n, 1], order)?, w)
        .scale(&rat(sign(i64::from(w))));
    // q^w (1-q⁻¹)^n = q (-1)^n (1-q)^n and Σ l q^{-l}/(1-q^{-l})^n = (-1)^n WS(l, n-1, n)
    let ws = weighted_single_sum(&WeightedSingle::index(n - 1, n)?, order);
    let second = one_minus_q_pow(&ws, n).mul_q_pow(1);
    let third = one_minus_q_pow(&named_qmzv(Family::QinvZbar, &[n], order)?, n)
        .mul_q_pow(1)
        .scale(&rat(sign(i64::from(n))));
    Ok(&(&first + &second) - &third)
}

pub fn length2_conversion_check(n: u32, order: usize) -> Result<IdentityReport> {
    let (lhs, rhs) = length2_conversion_sides(n, order)?;
    Ok(IdentityReport::new(
        IdentityId::Length2Conversion.as_str(),
        Params::Single { n },
        order,
        lhs.first_mismatch(&rhs),
    ))
}

/// `δz̄(b)` expressed purely through `z̄` values by comparing the
/// quasi-shuffle with the Euler decomposition.
pub fn delta_elimination(b: u32, order: usize) -> Result<QSeries> {
    if b < 2 {
        return Err(Error::domain(format!("delta elimination needs b >= 2, got {b}")));
    }
    let mut acc = Combination::new(order);
    if b == 2 {
        for (c, n) in [(4, &[3u32, 1][..]), (-2, &[2, 1]), (-1, &[2]), (3, &[3]), (-1, &[4])] {
            acc.zbar(&rat(c), n)?;
        }
        return Ok(acc.finish());
    }
    let bi = i64::from(b);
    let fixed: [(i64, Vec<u32>); 7] = [
        (-(bi - 1), vec![b, 1]),
        (2 * bi, vec![b + 1, 1]),
        (-1, vec![2, b - 1]),
        (1, vec![2, b - 2]),
        (bi + 1, vec![b + 1]),
        (-1, vec![b + 2]),
        (-(bi - 1), vec![b]),
    ];
    for (c, n) in &fixed {
        acc.zbar(&rat(*c), n)?;
    }
    for l in 1..=bi - 2 {
        for k in 0..=2.min(bi - 1 - l) {
            let c = sign(k) * binomial(l + 1, 1) * binomial(2, k);
            acc.zbar(&int(c), &[(2 + l) as u32, (bi - l - k) as u32])?;
        }
    }
    Ok(acc.finish())
}

/// Tolerances for the two gaps of [`classical_limit_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitTolerances {
    pub q_side: Rational,
    pub classical: Rational,
}

/// Bits kept by the rounded partial sums of the limit check. With cutoffs in
/// the thousands the accumulated rounding error stays below `2^-240`.
pub const LIMIT_CHECK_BITS: u32 = 256;

/// Numeric `q ↗ 1` comparison for `z̄(a)z̄(b)`:
///
/// - `q_gap = |(1-q)^{a+b} z̄_q(a) z̄_q(b) − ζ_M(a) ζ_M(b)|`
/// - `classical_gap = |ζ_M(a) ζ_M(b) − Σ_i C(i+b-1, b-1) ζ_M(b+i, a-i) − Σ_j C(j+a-1, a-1) ζ_M(a+j, b-j)|`
///
/// where `ζ_M` and `z̄_q` are partial sums with `m_1 <= M`, accumulated with
/// dyadic rounding at [`LIMIT_CHECK_BITS`] bits.
pub fn classical_limit_check(
    a: u32,
    b: u32,
    q: &Rational,
    cutoff: usize,
    tolerances: &LimitTolerances,
) -> Result<LimitReport> {
    check_pair(a, b)?;
    let precision = Precision::Dyadic(LIMIT_CHECK_BITS);
    let scaled = |s: u32| -> Result<Rational> {
        let raw = numeric_nested_sum_with(Family::Zbar, &[s], q, cutoff, precision)?;
        Ok(raw * num_traits::pow(Rational::from_integer(1.into()) - q, s as usize))
    };
    let zeta = |n: &[u32]| classical_mzv_partial_with(n, cutoff, precision);

    let classical_product = zeta(&[a])? * zeta(&[b])?;
    let q_gap = (scaled(a)? * scaled(b)? - &classical_product).abs();

    let (ai, bi) = (i64::from(a), i64::from(b));
    let mut euler = Rational::zero();
    for i in 0..ai {
        euler += int(binomial(i + bi - 1, bi - 1)) * zeta(&[(bi + i) as u32, (ai - i) as u32])?;
    }
    for j in 0..bi {
        euler += int(binomial(j + ai - 1, ai - 1)) * zeta(&[(ai + j) as u32, (bi - j) as u32])?;
    }
    let classical_gap = (classical_product - euler).abs();

    let q_status = Status::from_pass(q_gap < tolerances.q_side);
    let classical_status = Status::from_pass(classical_gap < tolerances.classical);
    Ok(LimitReport {
        identity: "classical-limit".to_string(),
        a,
        b,
        q: q.clone(),
        cutoff,
        q_gap,
        q_tolerance: tolerances.q_side.clone(),
        classical_gap,
        classical_tolerance: tolerances.classical.clone(),
        q_status,
        classical_status,
        status: Status::from_pass(q_status.is_pass() && classical_status.is_pass()),
    })
}

/// Every identity the driver knows how to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    EulerZbar,
    DomainSum,
    Compact,
    StuffleZbar,
    StuffleBradley,
    StuffleZbarScaled,
    StuffleBradleyScaled,
    BradleyRaw,
    BradleyDelta,
    TheoremZab,
    LemmaSum,
    DeltaElimination,
    Reflection,
    Length2Conversion,
    Conversion,
    OperatorRoute,
    GoldenZbar2Squared,
    GoldenZbar2Zbar3,
    GoldenZ23,
    GoldenZ33,
    PtildeYy,
    OperatorZbar2Squared,
    GoldenZbar21Zbar2,
    GoldenZbar31Zbar2,
}

/// Which parameter shape an identity takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Pair,
    Single,
    Composition,
    Fixed,
}

impl IdentityId {
    pub const ALL: [IdentityId; 24] = [
        IdentityId::EulerZbar,
        IdentityId::DomainSum,
        IdentityId::Compact,
        IdentityId::StuffleZbar,
        IdentityId::StuffleBradley,
        IdentityId::StuffleZbarScaled,
        IdentityId::StuffleBradleyScaled,
        IdentityId::BradleyRaw,
        IdentityId::BradleyDelta,
        IdentityId::TheoremZab,
        IdentityId::LemmaSum,
        IdentityId::DeltaElimination,
        IdentityId::Reflection,
        IdentityId::Length2Conversion,
        IdentityId::Conversion,
        IdentityId::OperatorRoute,
        IdentityId::GoldenZbar2Squared,
        IdentityId::GoldenZbar2Zbar3,
        IdentityId::GoldenZ23,
        IdentityId::GoldenZ33,
        IdentityId::PtildeYy,
        IdentityId::OperatorZbar2Squared,
        IdentityId::GoldenZbar21Zbar2,
        IdentityId::GoldenZbar31Zbar2,
    ];

    pub fn as_str(self) -> &'static str {
        use IdentityId::*;
        match self {
            EulerZbar => "euler-zbar",
            DomainSum => "domain-sum",
            Compact => "compact",
            StuffleZbar => "stuffle-zbar",
            StuffleBradley => "stuffle-bradley",
            StuffleZbarScaled => "stuffle-zbar-scaled",
            StuffleBradleyScaled => "stuffle-bradley-scaled",
            BradleyRaw => "bradley-raw",
            BradleyDelta => "bradley-delta",
            TheoremZab => "theorem-zab",
            LemmaSum => "lemma-sum",
            DeltaElimination => "delta-elimination",
            Reflection => "reflection",
            Length2Conversion => "length2-conversion",
            Conversion => "conversion",
            OperatorRoute => "operator-route",
            GoldenZbar2Squared => "golden-zbar2-squared",
            GoldenZbar2Zbar3 => "golden-zbar2-zbar3",
            GoldenZ23 => "golden-z23",
            GoldenZ33 => "golden-z33",
            PtildeYy => "ptilde-yy",
            OperatorZbar2Squared => "operator-zbar2-squared",
            GoldenZbar21Zbar2 => "golden-zbar21-zbar2",
            GoldenZbar31Zbar2 => "golden-zbar31-zbar2",
        }
    }

    pub fn param_kind(self) -> ParamKind {
        use IdentityId::*;
        match self {
            EulerZbar | DomainSum | Compact | StuffleZbar | StuffleBradley | StuffleZbarScaled
            | StuffleBradleyScaled | BradleyRaw | BradleyDelta | TheoremZab | LemmaSum => {
                ParamKind::Pair
            }
            DeltaElimination | Reflection | Length2Conversion => ParamKind::Single,
            Conversion | OperatorRoute => ParamKind::Composition,
            GoldenZbar2Squared | GoldenZbar2Zbar3 | GoldenZ23 | GoldenZ33 | PtildeYy | OperatorZbar2Squared
            | GoldenZbar21Zbar2 | GoldenZbar31Zbar2 => ParamKind::Fixed,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let canonical = s.replace('_', "-");
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == canonical)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

fn lin(terms: &[(i64, &[u32])], order: usize) -> Result<QSeries> {
    let mut acc = Combination::new(order);
    for (c, n) in terms {
        acc.zbar(&rat(*c), n)?;
    }
    Ok(acc.finish())
}

/// `Σ_i coeff_i · Σ_{l>0} (l-1) q^{c_i l} / (1-q^l)^s`.
fn shifted_singles(terms: &[(i64, u32)], s: u32, order: usize) -> Result<QSeries> {
    let mut acc = Combination::new(order);
    for (c, e) in terms {
        acc.shifted_single(&rat(*c), *e, s)?;
    }
    Ok(acc.finish())
}

/// Builds `(lhs, rhs)` for one of the fixed displayed identities.
fn fixed_sides(id: IdentityId, order: usize) -> Result<(QSeries, QSeries)> {
    use IdentityId::*;
    let sides = match id {
        GoldenZbar2Squared => {
            let lhs = zbar_product(2, 2, order)?;
            let mut rhs = lin(&[(2, &[2, 2]), (4, &[3, 1]), (-4, &[2, 1]), (2, &[3]), (-1, &[2])], order)?;
            rhs -= &zbar(&[2], order)?.delta();
            (lhs, rhs)
        }
        GoldenZbar2Zbar3 => {
            let lhs = zbar_product(2, 3, order)?;
            let mut rhs = lin(
                &[
                    (3, &[3, 2]),
                    (1, &[2, 3]),
                    (6, &[4, 1]),
                    (-2, &[2, 2]),
                    (-7, &[3, 1]),
                    (1, &[2, 1]),
                    (3, &[4]),
                    (-2, &[3]),
                ],
                order,
            )?;
            rhs -= &zbar(&[3], order)?.delta();
            (lhs, rhs)
        }
        GoldenZ23 => {
            // −Σ (l-1) q^l (1 + 2q^l) / (1-q^l)^4
            let lhs = shifted_singles(&[(-1, 1), (-2, 2)], 4, order)?;
            let mut rhs = lin(&[(3, &[4]), (-2, &[3])], order)?;
            rhs -= &zbar(&[3], order)?.delta();
            (lhs, rhs)
        }
        GoldenZ33 => {
            // −Σ (l-1) q^l (1 + 4q^l + q^{2l}) / (1-q^l)^5
            let lhs = shifted_singles(&[(-1, 1), (-4, 2), (-1, 3)], 5, order)?;
            let mut rhs = lin(&[(6, &[5]), (-6, &[4]), (1, &[3])], order)?;
            let half = Rational::new(1.into(), 2.into());
            rhs.add_scaled(&(&half * rat(-3)), &zbar(&[4], order)?.delta());
            rhs.add_scaled(&half, &zbar(&[3], order)?.delta());
            (lhs, rhs)
        }
        PtildeYy => {
            let ybar = BiSeries::ybar(order, order);
            let yy = operators::mul(&ybar, &ybar);
            let three = operators::eval_at_q(&apply_n(OperatorKind::Ptilde, &yy, 3)?);
            let two = operators::eval_at_q(&apply_n(OperatorKind::Ptilde, &yy, 2)?);
            let lhs = &two - &three.scale(&rat(2));
            let mut rhs = lin(&[(2, &[3]), (-1, &[2])], order)?;
            rhs -= &zbar(&[2], order)?.delta();
            (lhs, rhs)
        }
        OperatorZbar2Squared => (zbar_product(2, 2, order)?, zbar2_squared_operator_expansion(order)?),
        GoldenZbar21Zbar2 => {
            let lhs = &zbar(&[2, 1], order)? * &zbar(&[2], order)?;
            let mut rhs = lin(
                &[
                    (6, &[3, 1, 1]),
                    (3, &[2, 2, 1]),
                    (1, &[2, 1, 2]),
                    (-7, &[2, 1, 1]),
                    (4, &[3, 1]),
                    (1, &[2, 2]),
                    (-3, &[2, 1]),
                ],
                order,
            )?;
            rhs -= &zbar(&[2, 1], order)?.delta();
            (lhs, rhs)
        }
        GoldenZbar31Zbar2 => {
            let lhs = &zbar(&[3, 1], order)? * &zbar(&[2], order)?;
            let mut rhs = lin(
                &[
                    (9, &[4, 1, 1]),
                    (4, &[3, 2, 1]),
                    (1, &[3, 1, 2]),
                    (1, &[2, 3, 1]),
                    (-11, &[3, 1, 1]),
                    (-2, &[2, 2, 1]),
                    (1, &[2, 1, 1]),
                    (1, &[3, 2]),
                    (-5, &[3, 1]),
                    (6, &[4, 1]),
                ],
                order,
            )?;
            rhs -= &zbar(&[3, 1], order)?.delta();
            (lhs, rhs)
        }
        _ => unreachable!("{id} is not a fixed identity"),
    };
    Ok(sides)
}

/// `2P̃²[ȳP̃²[ȳ]] + 4P̃³[ȳP̃[ȳ]] − 4P̃²[ȳP̃[ȳ]] − 2P̃³[ȳȳ] + P̃²[ȳȳ]` at `t = q`,
/// with `T = N = order`.
pub fn zbar2_squared_operator_expansion(order: usize) -> Result<QSeries> {
    use OperatorKind::Ptilde;
    let y = BiSeries::ybar(order, order);
    let yy = operators::mul(&y, &y);
    let y_p1 = operators::mul(&y, &apply_n(Ptilde, &y, 1)?);
    let y_p2 = operators::mul(&y, &apply_n(Ptilde, &y, 2)?);
    let terms = [
        (2, apply_n(Ptilde, &y_p2, 2)?),
        (4, apply_n(Ptilde, &y_p1, 3)?),
        (-4, apply_n(Ptilde, &y_p1, 2)?),
        (-2, apply_n(Ptilde, &yy, 3)?),
        (1, apply_n(Ptilde, &yy, 2)?),
    ];
    let mut out = QSeries::zero(order);
    for (c, f) in &terms {
        out.add_scaled(&rat(*c), &operators::eval_at_q(f));
    }
    Ok(out)
}

fn params_mismatch(id: IdentityId, params: &Params) -> Error {
    Error::domain(format!(
        "identity {id} takes {:?} parameters, got {params:?}",
        id.param_kind()
    ))
}

/// Builds both sides of `id` at `params` and compares them to `order`.
pub fn verify_identity(id: IdentityId, params: &Params, order: usize) -> Result<IdentityReport> {
    use IdentityId::*;
    let report = |lhs: QSeries, rhs: QSeries| {
        IdentityReport::new(id.as_str(), params.clone(), order, lhs.first_mismatch(&rhs))
    };
    match (id.param_kind(), params) {
        (ParamKind::Pair, &Params::Pair { a, b }) => {
            let product = || zbar_product(a, b, order);
            let zeta_product = || -> Result<QSeries> {
                Ok(&zeta_bar(&[a], order)? * &zeta_bar(&[b], order)?)
            };
            Ok(match id {
                EulerZbar => report(product()?, euler_decomposition_rhs(a, b, order)?),
                DomainSum => report(product()?, domain_sum_rhs(a, b, order)?),
                Compact => report(product()?, compact_rhs(a, b, order)?),
                StuffleZbar => report(product()?, quasi_shuffle_rhs(Family::Zbar, a, b, order)?),
                StuffleBradley => report(
                    zeta_product()?,
                    quasi_shuffle_rhs(Family::ZetaBarBradley, a, b, order)?,
                ),
                StuffleZbarScaled => {
                    let (l, r) = quasi_shuffle_scaled(Family::Zbar, a, b, order)?;
                    report(l, r)
                }
                StuffleBradleyScaled => {
                    let (l, r) = quasi_shuffle_scaled(Family::ZetaBarBradley, a, b, order)?;
                    report(l, r)
                }
                BradleyRaw => report(zeta_product()?, bradley_rhs(a, b, order, BradleyVariant::Raw)?),
                BradleyDelta => report(
                    zeta_product()?,
                    bradley_rhs(a, b, order, BradleyVariant::DeltaForm)?,
                ),
                TheoremZab => theorem_zab_check(a, b, order)?,
                LemmaSum => {
                    let sum = combinatorial_lemma_sum(a, b)?;
                    let mismatch = (!sum.is_zero()).then(|| crate::qseries::Mismatch {
                        degree: 0,
                        lhs: sum,
                        rhs: Rational::zero(),
                    });
                    IdentityReport::new(id.as_str(), params.clone(), order, mismatch)
                }
                _ => unreachable!(),
            })
        }
        (ParamKind::Single, &Params::Single { n }) => Ok(match id {
            DeltaElimination => report(zbar(&[n], order)?.delta(), delta_elimination(n, order)?),
            Reflection => report(zeta_bar(&[n], order)?, conversion_rhs(&[n], order)?),
            Length2Conversion => length2_conversion_check(n, order)?,
            _ => unreachable!(),
        }),
        (ParamKind::Composition, Params::Composition { indices }) => Ok(match id {
            Conversion => report(zeta_bar(indices, order)?, conversion_rhs(indices, order)?),
            OperatorRoute => report(
                build_qmzv_by_operators(indices, order, order)?,
                zbar(indices, order)?,
            ),
            _ => unreachable!(),
        }),
        (ParamKind::Fixed, Params::Fixed {}) => {
            let (lhs, rhs) = fixed_sides(id, order)?;
            Ok(report(lhs, rhs))
        }
        _ => Err(params_mismatch(id, params)),
    }
}

/// All compositions of total weight `<= max_weight` whose entries are drawn
/// from `min_first..` (first entry) and `min_rest..` (later entries).
pub fn compositions(max_weight: u32, min_first: u32, min_rest: u32) -> Vec<Vec<u32>> {
    fn extend(prefix: &mut Vec<u32>, budget: u32, min_rest: u32, out: &mut Vec<Vec<u32>>) {
        out.push(prefix.clone());
        for next in min_rest.max(1)..=budget {
            prefix.push(next);
            extend(prefix, budget - next, min_rest, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for first in min_first..=max_weight {
        extend(&mut vec![first], max_weight - first, min_rest, &mut out);
    }
    out
}

/// The cells of the verification table for `2 <= a <= b <= max`.
///
/// Pair identities run over the whole triangle; single-parameter ones over
/// `2..=max` (the length-two conversion over weights `n+1 <= max`);
/// composition identities over compositions of weight `<= max`; fixed
/// identities once. Cells come back sorted by identity name then parameters.
pub fn table_cells(max: u32) -> Vec<(IdentityId, Params)> {
    let mut cells = Vec::new();
    for id in IdentityId::ALL {
        match id.param_kind() {
            ParamKind::Pair => {
                for a in 2..=max {
                    for b in a..=max {
                        cells.push((id, Params::Pair { a, b }));
                    }
                }
            }
            ParamKind::Single => {
                let top = if id == IdentityId::Length2Conversion { max.saturating_sub(1) } else { max };
                for n in 2..=top {
                    cells.push((id, Params::Single { n }));
                }
            }
            ParamKind::Composition => {
                let min_rest = if id == IdentityId::Conversion { 2 } else { 1 };
                for indices in compositions(max, 2, min_rest) {
                    cells.push((id, Params::Composition { indices }));
                }
            }
            ParamKind::Fixed => cells.push((id, Params::Fixed {})),
        }
    }
    cells.sort_by(|(x, p), (y, r)| {
        x.as_str()
            .cmp(y.as_str())
            .then_with(|| p.sort_key().cmp(&r.sort_key()))
    });
    cells
}

/// Runs every table cell on a pool of `jobs` workers. Output order follows
/// [`table_cells`] regardless of scheduling.
pub fn run_table(max: u32, order: usize, jobs: usize) -> Result<Vec<IdentityReport>> {
    let cells = table_cells(max);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        cells
            .par_iter()
            .map(|(id, params)| verify_identity(*id, params, order))
            .collect()
    })
}

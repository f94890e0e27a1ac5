//! The q-dilation operator calculus on a bi-graded truncated carrier.
//!
//! A [`BiSeries`] is `Σ_{m=0}^{T} c_m(q) t^m` with every `c_m` a [`QSeries`]
//! of order `N`. The q-dilation `E_q f(t) = f(q t)` scales the `t^m` row by
//! `q^m`, so every operator in the family is diagonal in `t`:
//!
//! | operator | action on the `t^m` row |
//! |----------|-------------------------|
//! | `E_q`    | `q^m c_m` |
//! | `P_q`    | `q^m/(1-q^m) c_m` |
//! | `P̃_q`    | `1/(1-q^m) c_m` |
//! | `P̃′_q`   | `-1/(1-q^m) c_m` |
//! | `M_id`   | moves `c_m` to `t^{m+1}` |
//! | `J`      | `(1-q) P̃_q M_id` |
//! | `Ĵ`      | `(1-q) P̃_q` |
//!
//! The summing operators diverge on a nonzero `t^0` row and reject it.

use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::generators::Family;
use crate::qseries::{rat, QSeries, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    rows: Vec<QSeries>,
}

impl BiSeries {
    pub fn zero(t_order: usize, q_order: usize) -> Self {
        BiSeries {
            rows: vec![QSeries::zero(q_order); t_order + 1],
        }
    }

    /// Builds a carrier from its `t`-rows, truncating them to a common q-order.
    pub fn from_rows(rows: Vec<QSeries>) -> Self {
        assert!(!rows.is_empty(), "a BiSeries needs at least the t^0 row");
        let q_order = rows.iter().map(QSeries::order).min().unwrap_or(0);
        BiSeries {
            rows: rows.into_iter().map(|r| r.truncate(q_order)).collect(),
        }
    }

    /// `c·t^m`.
    pub fn monomial(m: usize, c: QSeries, t_order: usize) -> Self {
        let mut out = Self::zero(t_order, c.order());
        if m <= t_order {
            out.rows[m] = c;
        }
        out
    }

    /// `ȳ(t) = t/(1-t) = Σ_{m>=1} t^m`.
    pub fn ybar(t_order: usize, q_order: usize) -> Self {
        let mut out = Self::zero(t_order, q_order);
        for row in out.rows.iter_mut().skip(1) {
            *row = QSeries::one(q_order);
        }
        out
    }

    pub fn t_order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn q_order(&self) -> usize {
        self.rows[0].order()
    }

    pub fn rows(&self) -> &[QSeries] {
        &self.rows
    }

    pub fn row(&self, m: usize) -> Option<&QSeries> {
        self.rows.get(m)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(QSeries::is_zero)
    }

    /// Admissible for the summing operators: the `t^0` row vanishes.
    pub fn has_zero_constant_row(&self) -> bool {
        self.rows[0].is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map_rows(|_, r| r.scale(c))
    }

    /// Multiplies every row by the same q-series.
    pub fn scale_series(&self, s: &QSeries) -> Self {
        self.map_rows(|_, r| r * s)
    }

    fn map_rows(&self, f: impl Fn(usize, &QSeries) -> QSeries) -> Self {
        BiSeries {
            rows: self.rows.iter().enumerate().map(|(m, r)| f(m, r)).collect(),
        }
    }

    fn zip_rows(&self, other: &BiSeries, f: impl Fn(&QSeries, &QSeries) -> QSeries) -> Self {
        BiSeries {
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl Add for &BiSeries {
    type Output = BiSeries;

    fn add(self, rhs: &BiSeries) -> BiSeries {
        self.zip_rows(rhs, |a, b| a + b)
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;

    fn sub(self, rhs: &BiSeries) -> BiSeries {
        self.zip_rows(rhs, |a, b| a - b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// q-dilation.
    Eq,
    /// `Σ_{n>0} E_q^n`, Rota–Baxter of weight +1.
    Pq,
    /// `Σ_{n>=0} E_q^n`, Rota–Baxter of weight −1.
    Ptilde,
    /// `-P̃_q`, Rota–Baxter of weight +1.
    PtildePrime,
    /// Multiplication by the identity function.
    Mid,
    /// Jackson integral `(1-q) P̃_q M_id`.
    J,
    /// Modified Jackson integral `(1-q) P̃_q`.
    Jhat,
}

impl OperatorKind {
    fn name(self) -> &'static str {
        match self {
            OperatorKind::Eq => "E_q",
            OperatorKind::Pq => "P_q",
            OperatorKind::Ptilde => "Ptilde_q",
            OperatorKind::PtildePrime => "Ptilde'_q",
            OperatorKind::Mid => "M_id",
            OperatorKind::J => "J",
            OperatorKind::Jhat => "Jhat",
        }
    }
}

fn one_minus_q(order: usize) -> QSeries {
    QSeries::one(order).one_minus_q_pow(1)
}

fn ptilde_rows(f: &BiSeries) -> BiSeries {
    f.map_rows(|m, r| if m == 0 { r.clone() } else { r.div_one_minus_q_pow(m, 1) })
}

/// Applies `op` to `f`.
///
/// `P_q`, `P̃_q`, `P̃′_q` and `Ĵ` reject a nonzero `t^0` row. `J` accepts any
/// input because `M_id` clears the constant row before summing.
pub fn apply(op: OperatorKind, f: &BiSeries) -> Result<BiSeries> {
    let summing = matches!(
        op,
        OperatorKind::Pq | OperatorKind::Ptilde | OperatorKind::PtildePrime | OperatorKind::Jhat
    );
    if summing && !f.has_zero_constant_row() {
        return Err(Error::ConstantRow { op: op.name() });
    }
    let out = match op {
        OperatorKind::Eq => f.map_rows(|m, r| r.mul_q_pow(m)),
        OperatorKind::Pq => f.map_rows(|m, r| {
            if m == 0 {
                r.clone()
            } else {
                r.mul_q_pow(m).div_one_minus_q_pow(m, 1)
            }
        }),
        OperatorKind::Ptilde => ptilde_rows(f),
        OperatorKind::PtildePrime => ptilde_rows(f).scale(&rat(-1)),
        OperatorKind::Mid => {
            let mut rows = Vec::with_capacity(f.rows.len());
            rows.push(QSeries::zero(f.q_order()));
            rows.extend(f.rows[..f.t_order()].iter().cloned());
            BiSeries { rows }
        }
        OperatorKind::J => {
            let shifted = apply(OperatorKind::Mid, f)?;
            ptilde_rows(&shifted).scale_series(&one_minus_q(f.q_order()))
        }
        OperatorKind::Jhat => ptilde_rows(f).scale_series(&one_minus_q(f.q_order())),
    };
    Ok(out)
}

/// Applies `op` `times` times.
pub fn apply_n(op: OperatorKind, f: &BiSeries, times: u32) -> Result<BiSeries> {
    (0..times).try_fold(f.clone(), |acc, _| apply(op, &acc))
}

/// Cauchy product in `t`, truncated at the smaller `t`- and `q`-orders.
pub fn mul(f: &BiSeries, g: &BiSeries) -> BiSeries {
    let t_order = f.t_order().min(g.t_order());
    let q_order = f.q_order().min(g.q_order());
    let mut out = BiSeries::zero(t_order, q_order);
    for (i, fi) in f.rows[..=t_order].iter().enumerate() {
        if fi.is_zero() {
            continue;
        }
        for (j, gj) in g.rows[..=t_order - i].iter().enumerate() {
            if !gj.is_zero() {
                out.rows[i + j] += &(fi * gj);
            }
        }
    }
    out
}

/// Substitutes `t = q`. The result is trusted to order `min(N, T)` and is
/// returned at exactly that order.
pub fn eval_at_q(f: &BiSeries) -> QSeries {
    let order = f.q_order().min(f.t_order());
    let mut out = QSeries::zero(order);
    for (m, row) in f.rows.iter().enumerate().take(order + 1) {
        out += &row.truncate(order).mul_q_pow(m);
    }
    out
}

/// `P̃^{(n_1)}[ȳ P̃^{(n_2)}[ȳ ⋯ P̃^{(n_k)}[ȳ]⋯]]` evaluated at `t = q`,
/// valid to order `min(T, N)`.
pub fn build_qmzv_by_operators(n: &[u32], t_order: usize, q_order: usize) -> Result<QSeries> {
    Family::Zbar.validate(n)?;
    if n.iter().skip(1).any(|&ni| ni == 0) {
        return Err(Error::InvalidComposition {
            family: "zbar (operator route)",
            indices: n.to_vec(),
            reason: "n_i must be at least 1 for i > 1",
        });
    }
    let ybar = BiSeries::ybar(t_order, q_order);
    let (&last, outer) = n.split_last().expect("validated non-empty");
    let mut cur = apply_n(OperatorKind::Ptilde, &ybar, last)?;
    for &ni in outer.iter().rev() {
        cur = apply_n(OperatorKind::Ptilde, &mul(&ybar, &cur), ni)?;
    }
    Ok(eval_at_q(&cur))
}

/// The operator identities whose residual (LHS − RHS) must vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RotaBaxterIdentity {
    /// `P̃(f)P̃(g) = P̃(P̃(f)g + fP̃(g) − fg)`.
    PtildeWeightMinusOne,
    /// `P(f)P(g) = P(P(f)g + fP(g) + fg)`.
    PqWeightPlusOne,
    /// `J(f)J(g) + (1-q)J(M_id(fg)) = J(J(f)g + fJ(g))`.
    JacksonRelation,
    /// `J(f)J(g) = J(fJ(g)) + q J(J(E_q f) g)`.
    QShuffle,
    /// `P̃′(f)P̃′(g) = P̃′(P̃′(f)g + fP̃′(g) + fg)`.
    PtildePrimeWeightPlusOne,
}

impl RotaBaxterIdentity {
    pub const ALL: [RotaBaxterIdentity; 5] = [
        RotaBaxterIdentity::PtildeWeightMinusOne,
        RotaBaxterIdentity::PqWeightPlusOne,
        RotaBaxterIdentity::JacksonRelation,
        RotaBaxterIdentity::QShuffle,
        RotaBaxterIdentity::PtildePrimeWeightPlusOne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RotaBaxterIdentity::PtildeWeightMinusOne => "ptilde-weight-minus-one",
            RotaBaxterIdentity::PqWeightPlusOne => "pq-weight-plus-one",
            RotaBaxterIdentity::JacksonRelation => "jackson-relation",
            RotaBaxterIdentity::QShuffle => "q-shuffle",
            RotaBaxterIdentity::PtildePrimeWeightPlusOne => "ptilde-prime-weight-plus-one",
        }
    }
}

/// Rota–Baxter relation `T(f)T(g) − T(T(f)g + fT(g) + θfg)` for scalar θ.
fn rb_residual(op: OperatorKind, weight: i64, f: &BiSeries, g: &BiSeries) -> Result<BiSeries> {
    let tf = apply(op, f)?;
    let tg = apply(op, g)?;
    let lhs = mul(&tf, &tg);
    let mut inner = &mul(&tf, g) + &mul(f, &tg);
    inner = &inner + &mul(f, g).scale(&rat(weight));
    Ok(&lhs - &apply(op, &inner)?)
}

/// LHS − RHS of `kind` on `(f, g)`; a passing identity gives the zero carrier.
pub fn rota_baxter_residual(
    kind: RotaBaxterIdentity,
    f: &BiSeries,
    g: &BiSeries,
) -> Result<BiSeries> {
    for h in [f, g] {
        if !h.has_zero_constant_row() {
            return Err(Error::ConstantRow { op: kind.name() });
        }
    }
    use OperatorKind::*;
    match kind {
        RotaBaxterIdentity::PtildeWeightMinusOne => rb_residual(Ptilde, -1, f, g),
        RotaBaxterIdentity::PqWeightPlusOne => rb_residual(Pq, 1, f, g),
        RotaBaxterIdentity::PtildePrimeWeightPlusOne => rb_residual(PtildePrime, 1, f, g),
        RotaBaxterIdentity::JacksonRelation => {
            let (jf, jg) = (apply(J, f)?, apply(J, g)?);
            let one_minus_q = one_minus_q(f.q_order().min(g.q_order()));
            let correction = apply(J, &apply(Mid, &mul(f, g))?)?.scale_series(&one_minus_q);
            let lhs = &mul(&jf, &jg) + &correction;
            let rhs = apply(J, &(&mul(&jf, g) + &mul(f, &jg)))?;
            Ok(&lhs - &rhs)
        }
        RotaBaxterIdentity::QShuffle => {
            let (jf, jg) = (apply(J, f)?, apply(J, g)?);
            let q = QSeries::monomial(rat(1), 1, f.q_order().min(g.q_order()));
            let first = apply(J, &mul(f, &jg))?;
            let second = apply(J, &mul(&apply(J, &apply(Eq, f)?)?, g))?.scale_series(&q);
            Ok(&mul(&jf, &jg) - &(&first + &second))
        }
    }
}

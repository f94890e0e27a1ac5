//! Verification outcome records and their serialised shape.
//!
//! Reports serialise with a fixed key order: `identity`, the parameters
//! flattened in, `order`, `status`, then `first_mismatch` when present.
//! Rationals render as `p/q` in lowest terms (`p` when integral).

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::qseries::{Mismatch, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

/// Parameters of one identity instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Pair { a: u32, b: u32 },
    Single { n: u32 },
    Composition { indices: Vec<u32> },
    Fixed {},
}

impl Params {
    /// Key used to order table rows within one identity.
    pub fn sort_key(&self) -> Vec<u32> {
        match self {
            Params::Pair { a, b } => vec![*a, *b],
            Params::Single { n } => vec![*n],
            Params::Composition { indices } => indices.clone(),
            Params::Fixed {} => Vec::new(),
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::Pair { a, b } => write!(f, "a={a} b={b}"),
            Params::Single { n } => write!(f, "n={n}"),
            Params::Composition { indices } => {
                let parts: Vec<String> = indices.iter().map(u32::to_string).collect();
                write!(f, "indices={}", parts.join(","))
            }
            Params::Fixed {} => Ok(()),
        }
    }
}

pub fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MismatchRecord {
    pub degree: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: Rational,
}

impl From<Mismatch> for MismatchRecord {
    fn from(m: Mismatch) -> Self {
        MismatchRecord {
            degree: m.degree,
            lhs: m.lhs,
            rhs: m.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    #[serde(flatten)]
    pub params: Params,
    pub order: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<MismatchRecord>,
}

impl IdentityReport {
    /// Builds a report from the outcome of a coefficient comparison; the
    /// status is `pass` exactly when there is no mismatch.
    pub fn new(identity: &str, params: Params, order: usize, mismatch: Option<Mismatch>) -> Self {
        IdentityReport {
            identity: identity.to_string(),
            params,
            order,
            status: Status::from_pass(mismatch.is_none()),
            first_mismatch: mismatch.map(MismatchRecord::from),
        }
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.identity)?;
        let params = self.params.to_string();
        if !params.is_empty() {
            write!(f, " {params}")?;
        }
        write!(f, " order={}: {}", self.order, self.status)?;
        if let Some(m) = &self.first_mismatch {
            write!(f, " (degree {}: lhs {} rhs {})", m.degree, m.lhs, m.rhs)?;
        }
        Ok(())
    }
}

/// Renders a small exact gap for humans; the exact value stays in the report.
pub fn approx(r: &Rational) -> String {
    match r.to_f64() {
        Some(x) => format!("{x:.6e}"),
        None => r.to_string(),
    }
}

fn serialize_approx<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&approx(r))
}

/// Outcome of the `q ↗ 1` limit check for one product `z̄(a)z̄(b)`.
///
/// Gaps are exact rationals with very large denominators, so they serialise
/// as decimal approximations; tolerances serialise exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    pub identity: String,
    pub a: u32,
    pub b: u32,
    #[serde(serialize_with = "serialize_rational")]
    pub q: Rational,
    pub cutoff: usize,
    /// `|(1-q)^{a+b} z̄_q(a) z̄_q(b) − ζ_M(a) ζ_M(b)|`.
    #[serde(serialize_with = "serialize_approx")]
    pub q_gap: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub q_tolerance: Rational,
    /// `|ζ_M(a) ζ_M(b) − classical Euler decomposition of partial sums|`.
    #[serde(serialize_with = "serialize_approx")]
    pub classical_gap: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub classical_tolerance: Rational,
    pub q_status: Status,
    pub classical_status: Status,
    pub status: Status,
}

impl LimitReport {
    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}

impl fmt::Display for LimitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} a={} b={} q={} M={}: q_gap={} (< {}: {}) classical_gap={} (< {}: {}) => {}",
            self.identity,
            self.a,
            self.b,
            self.q,
            self.cutoff,
            approx(&self.q_gap),
            self.q_tolerance,
            self.q_status,
            approx(&self.classical_gap),
            self.classical_tolerance,
            self.classical_status,
            self.status
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rat;

    #[test]
    fn json_shape_is_flat_and_ordered() {
        let r = IdentityReport::new("euler-zbar", Params::Pair { a: 2, b: 3 }, 50, None);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"identity":"euler-zbar","a":2,"b":3,"order":50,"status":"pass"}"#
        );
    }

    #[test]
    fn mismatch_renders_fractions() {
        let m = Mismatch {
            degree: 4,
            lhs: Rational::new(3.into(), 6.into()),
            rhs: rat(-2),
        };
        let r = IdentityReport::new("ptilde-yy", Params::Fixed {}, 10, Some(m));
        assert!(!r.passed());
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"identity":"ptilde-yy","order":10,"status":"fail","first_mismatch":{"degree":4,"lhs":"1/2","rhs":"-2"}}"#
        );
        assert_eq!(r.to_string(), "ptilde-yy order=10: fail (degree 4: lhs 1/2 rhs -2)");
    }

    #[test]
    fn composition_params() {
        let r = IdentityReport::new(
            "conversion",
            Params::Composition { indices: vec![3, 2, 2] },
            40,
            None,
        );
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"identity":"conversion","indices":[3,2,2],"order":40,"status":"pass"}"#
        );
        assert_eq!(r.to_string(), "conversion indices=3,2,2 order=40: pass");
    }
}

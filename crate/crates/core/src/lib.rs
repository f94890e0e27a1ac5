//! Exact truncated q-series for q-analogs of multiple zeta values.
//!
//! The crate is organised bottom-up:
//!
//! - [`qseries`]: the truncated power-series ring over exact rationals, with
//!   the derivation `δ = q·d/dq` and the `1/(1-q^m)^n` expansion primitive.
//! - [`generators`]: nested-sum constructions of `z̄_q`, Bradley's `ζ̄_q`, the
//!   `q⁻¹`-reflected `z̄_{q⁻¹}`, weighted single sums and exact partial sums.
//! - [`operators`]: the q-dilation / Jackson-integral operator calculus on a
//!   bi-graded carrier, including Rota–Baxter residuals.
//! - [`identities`]: right-hand sides of the product and decomposition
//!   formulas plus the verification driver producing [`IdentityReport`]s.
//! - [`cli`]: the command-line surface used by the `qmzv` binary.

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod generators;
pub mod identities;
pub mod operators;
pub mod qseries;
pub mod report;

pub use error::{Error, Result};
pub use generators::{Family, MzvIndex, WeightedSingle};
pub use identities::{EulerCoefficients, IdentityId};
pub use operators::{BiSeries, OperatorKind, RotaBaxterIdentity};
pub use qseries::{geometric_pow, one_minus_q_pow, Mismatch, QSeries, Rational};
pub use report::{IdentityReport, LimitReport, Params, Status};

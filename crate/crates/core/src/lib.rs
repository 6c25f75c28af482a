//! Numerical verification of an average-value identity for L-series of
//! level-one Hecke eigenforms at complex arguments.
//!
//! The crate evaluates both sides of
//!
//! ```text
//! gamma_k(s)^{-1} int_0^inf R_{s,k}(it) t^{s'-1} dt
//!     = c_k / gamma_k(s) * sum_nu L*(f_nu, s) L*(f_nu, s') / <f_nu, f_nu>
//! ```
//!
//! where the left side is expanded into four explicit terms (two zeta/Gamma
//! terms, a hypergeometric sum over matrices with positive entries, and a
//! beta-integral term), and the right side is computed spectrally from
//! numerically constructed Hecke eigenforms.
//!
//! Modules, bottom-up:
//!
//! * [`specfun`]: Gamma, zeta, incomplete Gamma, `2F1`, principal powers.
//! * [`modforms`]: exact q-expansions, Victor-Miller bases, Hecke operators,
//!   eigenforms.
//! * [`lfunc`]: completed L-values, periods and Petersson norms.
//! * [`kernel`]: the identity engine and its oracles.
//! * [`report`]: serializable verification reports.

// Reference tables keep every digit they were derived with, and comparisons
// like `!(x > 0.0)` are written that way on purpose so NaN is rejected.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernel;
pub mod lfunc;
pub mod modforms;
pub mod quad;
pub mod report;
pub mod specfun;
pub mod sum;

pub use error::{Error, Result};
pub use specfun::{AccuracyBudget, ComplexValue};

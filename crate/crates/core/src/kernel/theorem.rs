//! The four closed-form terms and the two corollaries built on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::hyper::{hyper_sum, HyperSum};
use super::{c_k, gamma_k, ParamPoint};
use crate::error::{Error, Result};
use crate::specfun::{as_integer, gamma, principal_pow, zeta, AccuracyBudget, I};

/// Shells summed directly before the family tail takes over.
pub const DEFAULT_N_MAX: u64 = 200;

/// The four summands of the right-hand side, in printed order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremTerms {
    pub t1: Complex64,
    pub t2: Complex64,
    pub t3: Complex64,
    pub t4: Complex64,
    pub total: Complex64,
    /// Bound on the error of `t3` from the matrix-sum truncation.
    pub trunc_error: f64,
}

fn i_pow_neg_k(k: u32) -> f64 {
    if (k / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `t1 = i^{-k} (2 pi i)^{k-s} (2 pi)^{s'-k} zeta(s-s'+1) Gamma(k-s') / Gamma(k-s)`.
fn t1(p: &ParamPoint) -> Result<Complex64> {
    let (s, sp) = (p.s(), p.sprime());
    let k = Complex64::new(p.k() as f64, 0.0);
    let two_pi = Complex64::new(2.0 * PI, 0.0);
    Ok(i_pow_neg_k(p.k())
        * principal_pow(2.0 * PI * I, k - s)?
        * principal_pow(two_pi, sp - k)?
        * zeta(s - sp + 1.0)?
        * gamma(k - sp)?
        / gamma(k - s)?)
}

/// `t2 = i^{-k} (-2 pi i)^{s} (2 pi)^{s'-k} zeta(k-s'-s+1) Gamma(k-s') / Gamma(s)`.
fn t2(p: &ParamPoint) -> Result<Complex64> {
    let (s, sp) = (p.s(), p.sprime());
    let k = Complex64::new(p.k() as f64, 0.0);
    let two_pi = Complex64::new(2.0 * PI, 0.0);
    Ok(i_pow_neg_k(p.k())
        * principal_pow(-2.0 * PI * I, s)?
        * principal_pow(two_pi, sp - k)?
        * zeta(k - sp - s + 1.0)?
        * gamma(k - sp)?
        / gamma(s)?)
}

fn beta_ratio(s: Complex64, sp: Complex64) -> Result<Complex64> {
    Ok(gamma(sp)? * gamma(s - sp)? / gamma(s)?)
}

/// `t4 = zeta(s-s') (e^{-pi i s'/2} - e^{3 pi i s'/2}) Gamma(s') Gamma(s-s') / Gamma(s)`.
fn t4(p: &ParamPoint) -> Result<Complex64> {
    let (s, sp) = (p.s(), p.sprime());
    if as_integer(sp).is_some() {
        // e^{-pi i s'/2} (1 - e^{2 pi i s'}) vanishes exactly
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rot = (-I * PI * sp / 2.0).exp() - (I * 3.0 * PI * sp / 2.0).exp();
    Ok(zeta(s - sp)? * rot * beta_ratio(s, sp)?)
}

/// `i zeta(s-s') (e^{3 pi i (s'-1)/2} - e^{-pi i (s'-1)/2}) Gamma(s') Gamma(s-s') / Gamma(s)`,
/// the form in which the `c = 0` contour evaluation produces `t4`.
pub fn t4_alternative_form(p: &ParamPoint) -> Result<Complex64> {
    let (s, sp) = (p.s(), p.sprime());
    if as_integer(sp).is_some() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rot = (I * 3.0 * PI * (sp - 1.0) / 2.0).exp() - (-I * PI * (sp - 1.0) / 2.0).exp();
    Ok(I * zeta(s - sp)? * rot * beta_ratio(s, sp)?)
}

pub(crate) fn closed_terms(p: &ParamPoint) -> Result<(Complex64, Complex64, Complex64)> {
    Ok((t1(p)?, t2(p)?, t4(p)?))
}

fn assemble(p: &ParamPoint, h: &HyperSum) -> Result<TheoremTerms> {
    let (t1, t2, t4) = closed_terms(p)?;
    Ok(TheoremTerms {
        t1,
        t2,
        t3: h.value,
        t4,
        total: t1 + t2 + h.value + t4,
        trunc_error: h.trunc_error,
    })
}

/// Right-hand side with [`DEFAULT_N_MAX`] shells.
pub fn rhs_theorem(p: &ParamPoint, budget: &AccuracyBudget) -> Result<TheoremTerms> {
    rhs_theorem_with(p, DEFAULT_N_MAX, budget)
}

pub fn rhs_theorem_with(p: &ParamPoint, n_max: u64, budget: &AccuracyBudget) -> Result<TheoremTerms> {
    assemble(p, &hyper_sum(p, n_max, budget)?)
}

/// Right-hand side from an explicitly computed matrix sum (for points where
/// the automatic truncation cannot certify a bound).
pub fn rhs_from_hyper(p: &ParamPoint, h: &HyperSum) -> Result<TheoremTerms> {
    assemble(p, h)
}

/// `(gamma_k(s) / c_k) * total`: the average of `L*(f, s) L*(f, s') / <f, f>`
/// over the eigenbasis.
pub fn average_lseries(p: &ParamPoint, budget: &AccuracyBudget) -> Result<(Complex64, TheoremTerms)> {
    let terms = rhs_theorem(p, budget)?;
    let factor = gamma_k(p.s(), p.k())? / c_k(p.k());
    Ok((factor * terms.total, terms))
}

/// Residual of the vanishing statement for `S_k = {0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corollary2 {
    /// `t1 + t2 + t4`.
    pub lhs: Complex64,
    /// `-t3`.
    pub rhs: Complex64,
    /// `|lhs - rhs|`.
    pub residual: f64,
    pub trunc_bound: f64,
}

/// `|t1 + t2 + t4 + t3|` for `k` in `{8, 10, 14}`.
pub fn corollary2_residual(p: &ParamPoint, n_max: u64, budget: &AccuracyBudget) -> Result<Corollary2> {
    if ![8, 10, 14].contains(&p.k()) {
        return Err(Error::Domain(format!(
            "the vanishing statement needs dim S_k = 0 with k in {{8, 10, 14}}, got k = {}",
            p.k()
        )));
    }
    let t = rhs_theorem_with(p, n_max, budget)?;
    let lhs = t.t1 + t.t2 + t.t4;
    let rhs = -t.t3;
    Ok(Corollary2 {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        trunc_bound: t.trunc_error,
    })
}

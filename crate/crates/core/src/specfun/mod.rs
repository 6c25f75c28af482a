//! Complex special functions with explicit accuracy contracts.
//!
//! | Function | Notes |
//! |----------|-------|
//! | [`principal_pow`] | `z^w = exp(w log z)`, `arg z` in `(-pi, pi]` |
//! | [`gamma`], [`log_gamma`] | Lanczos (g = 7, n = 9) with reflection |
//! | [`zeta`] | eta acceleration / Euler-Maclaurin / reflection |
//! | [`hurwitz_zeta`] | Euler-Maclaurin, `q > 0` |
//! | [`upper_incomplete_gamma`] | series or Legendre continued fraction |
//! | [`pochhammer`] | rising factorial, exact zero on termination |
//! | [`gauss_2f1`] | power series on `0 <= z <= 1/2` with a rigorous tail bound |
//!
//! Every power of a complex or negative base in the crate goes through
//! [`principal_pow`]; never call `Complex64::powc` directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod gamma;
mod hyper;
mod incgamma;
mod zeta;

pub use gamma::{gamma, log_gamma};
pub use hyper::{gauss_2f1, gauss_2f1_with};
pub use incgamma::{upper_incomplete_gamma, upper_incomplete_gamma_with};
pub use zeta::{hurwitz_zeta, zeta, zeta_alternating, zeta_euler_maclaurin};
pub(crate) use zeta::BERNOULLI_OVER_FACT;

/// The universal scalar.
pub type ComplexValue = Complex64;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerances and iteration cap shared by series, continued fractions and
/// quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyBudget {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl AccuracyBudget {
    pub fn new(abs_tol: f64, rel_tol: f64, max_terms: usize) -> Result<Self> {
        let ok = abs_tol >= 0.0 && rel_tol >= 0.0 && (abs_tol > 0.0 || rel_tol > 0.0);
        if !ok || !abs_tol.is_finite() || !rel_tol.is_finite() || max_terms == 0 {
            return Err(Error::Domain(format!(
                "invalid budget: abs_tol={abs_tol}, rel_tol={rel_tol}, max_terms={max_terms}"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_terms,
        })
    }

    /// Whether `err` is acceptable for a quantity of size `scale`.
    pub fn accepts(&self, err: f64, scale: f64) -> bool {
        err <= self.abs_tol.max(self.rel_tol * scale)
    }
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_terms: 100_000,
        }
    }
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `Some(n)` when `z` is exactly the integer `n`.
pub(crate) fn as_integer(z: Complex64) -> Option<i64> {
    if z.im == 0.0 && z.re == z.re.round() && z.re.abs() < 9.0e15 {
        Some(z.re as i64)
    } else {
        None
    }
}

/// Principal argument in `(-pi, pi]`. A negative real with a negative zero
/// imaginary part still gets `+pi`.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.im == 0.0 && z.re < 0.0 {
        std::f64::consts::PI
    } else {
        z.im.atan2(z.re)
    }
}

/// Principal logarithm `ln|z| + i arg z`.
pub fn principal_log(z: Complex64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("logarithm of zero".into()));
    }
    Ok(c(z.norm().ln(), principal_arg(z)))
}

/// `z^w = exp(w (ln|z| + i arg z))` with `arg z` in `(-pi, pi]`.
pub fn principal_pow(z: Complex64, w: Complex64) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 && (z.re != 0.0 || z.im != 0.0) {
        return Ok(real(1.0));
    }
    let l = principal_log(z).map_err(|_| Error::Domain("principal_pow with zero base".into()))?;
    let v = (w * l).exp();
    if !is_finite(v) {
        return Err(Error::Domain(format!("principal_pow({z}, {w}) overflowed")));
    }
    Ok(v)
}

/// `x^w` for a positive real base; same branch as [`principal_pow`].
#[inline]
pub fn pow_pos(x: f64, w: Complex64) -> Complex64 {
    debug_assert!(x > 0.0);
    (w * x.ln()).exp()
}

/// Rising factorial `(z)_m = z (z+1) ... (z+m-1)`.
///
/// Exactly zero when `z` is a nonpositive integer with `-z < m`.
pub fn pochhammer(z: Complex64, m: u32) -> Complex64 {
    if let Some(n) = as_integer(z) {
        if n <= 0 && (-n as u64) < m as u64 {
            return Complex64::new(0.0, 0.0);
        }
    }
    let mut acc = real(1.0);
    for j in 0..m {
        acc *= z + j as f64;
    }
    acc
}

/// `n!` as a float (exact through 22!).
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

//! Upper incomplete Gamma `Gamma(s, x)` for complex `s` and real `x > 0`.

use num_complex::Complex64;

use super::{as_integer, gamma, AccuracyBudget};
use crate::error::{Error, Result};
use crate::sum::ComplexSum;

const TINY: f64 = 1e-300;

/// `x^s e^{-x}`
fn prefactor(s: Complex64, x: f64) -> Complex64 {
    (s * x.ln() - x).exp()
}

/// Legendre continued fraction, modified Lentz evaluation.
fn continued_fraction(s: Complex64, x: f64, budget: &AccuracyBudget) -> Result<Complex64> {
    let eps = budget.rel_tol.max(1e-16);
    let tiny = Complex64::new(TINY, 0.0);
    let nz = |z: Complex64| if z.norm() == 0.0 { tiny } else { z };
    let mut f = nz(x + 1.0 - s);
    let mut cc = f;
    let mut d = Complex64::new(0.0, 0.0);
    for i in 1..=budget.max_terms {
        let fi = i as f64;
        let a = -fi * (fi - s);
        let b = x + 2.0 * fi + 1.0 - s;
        d = nz(b + a * d);
        cc = nz(b + a / cc);
        d = 1.0 / d;
        let delta = cc * d;
        f *= delta;
        if (delta - 1.0).norm() < eps {
            return Ok(prefactor(s, x) / f);
        }
    }
    Err(Error::accuracy(
        format!("incomplete gamma continued fraction at s={s}, x={x}"),
        f64::NAN,
        eps,
    ))
}

/// Lower incomplete gamma by its power series; needs `s` off the poles.
fn lower_series(s: Complex64, x: f64, budget: &AccuracyBudget) -> Result<Complex64> {
    let eps = budget.rel_tol.max(1e-17);
    let mut term = 1.0 / s;
    let mut acc = ComplexSum::new();
    acc.add(term);
    for n in 1..=budget.max_terms {
        term *= x / (s + n as f64);
        acc.add(term);
        if (n as f64) > x - s.re && term.norm() <= eps * acc.value().norm() {
            return Ok(prefactor(s, x) * acc.value());
        }
    }
    Err(Error::accuracy(
        format!("lower incomplete gamma series at s={s}, x={x}"),
        f64::NAN,
        eps,
    ))
}

/// `Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt` with the default budget.
pub fn upper_incomplete_gamma(s: Complex64, x: f64) -> Result<Complex64> {
    upper_incomplete_gamma_with(s, x, &AccuracyBudget::default())
}

/// Continued fraction for `x >= |s| + 1`, otherwise `Gamma(s) - gamma(s, x)`;
/// arguments with `Re s < 1/2` are lifted by the recurrence
/// `Gamma(s, x) = (Gamma(s + 1, x) - x^s e^{-x}) / s`.
pub fn upper_incomplete_gamma_with(
    s: Complex64,
    x: f64,
    budget: &AccuracyBudget,
) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("incomplete gamma needs x > 0, got {x}")));
    }
    let on_pole = matches!(as_integer(s), Some(n) if n <= 0);
    if x >= s.norm() + 1.0 || on_pole {
        return continued_fraction(s, x, budget);
    }
    if s.re >= 0.5 {
        return Ok(gamma(s)? - lower_series(s, x, budget)?);
    }
    let lift = (0.5 - s.re).ceil() as usize;
    let mut g = upper_incomplete_gamma_with(s + lift as f64, x, budget)?;
    for j in (0..lift).rev() {
        let sj = s + j as f64;
        g = (g - prefactor(sj, x)) / sj;
    }
    Ok(g)
}

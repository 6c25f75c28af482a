//! Completed L-values `L*(f, s)`, periods and Petersson norms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::modforms::NumericForm;
use crate::quad::gauss_legendre;
use crate::specfun::{pow_pos, upper_incomplete_gamma_with, AccuracyBudget};
use crate::sum::{ComplexSum, KahanSum};

/// Cutoff and budget for the incomplete-Gamma series of `L*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LStarSeriesParams {
    pub n_terms: usize,
    pub budget: AccuracyBudget,
}

impl LStarSeriesParams {
    pub fn new(n_terms: usize, budget: AccuracyBudget) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::Domain("n_terms must be positive".into()));
        }
        Ok(Self { n_terms, budget })
    }
}

impl Default for LStarSeriesParams {
    fn default() -> Self {
        Self {
            n_terms: 40,
            budget: AccuracyBudget::default(),
        }
    }
}

fn sign_k(k: u32) -> f64 {
    if (k / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `L*(f, s) = (2 pi)^{-s} Gamma(s) L(f, s)` for any complex `s`, from the
/// Mellin integral split at `t = 1`:
///
/// ```text
/// L*(f, s) = sum_n a(n) [ (2 pi n)^{-s} Gamma(s, 2 pi n)
///                        + (-1)^{k/2} (2 pi n)^{s-k} Gamma(k-s, 2 pi n) ]
/// ```
pub fn lstar(f: &NumericForm, s: Complex64, p: &LStarSeriesParams) -> Result<Complex64> {
    if p.n_terms > f.prec() {
        return Err(Error::Precision {
            needed: p.n_terms,
            available: f.prec(),
        });
    }
    let k = f.weight();
    let eps = sign_k(k);
    let ks = Complex64::new(k as f64, 0.0) - s;
    let mut acc = ComplexSum::new();
    let mut last = 0.0;
    for n in 1..=p.n_terms {
        let a = f.a(n);
        if a == 0.0 {
            continue;
        }
        let x = 2.0 * PI * n as f64;
        let g1 = upper_incomplete_gamma_with(s, x, &p.budget)?;
        let g2 = upper_incomplete_gamma_with(ks, x, &p.budget)?;
        let term = a * (pow_pos(x, -s) * g1 + eps * pow_pos(x, -ks) * g2);
        last = term.norm();
        acc.add(term);
    }
    let value = acc.value();
    // Terms decay like e^{-2 pi n}; the next one bounds the tail up to a
    // constant factor.
    let tail = last * (-2.0 * PI).exp() * 2.0;
    if !p.budget.accepts(tail, value.norm()) {
        return Err(Error::accuracy("L* series tail", tail, p.budget.abs_tol));
    }
    Ok(value)
}

/// Period `r_n(f) = int_0^inf f(it) t^n dt = L*(f, n + 1)` for `0 <= n <= k - 2`.
pub fn period(f: &NumericForm, n: u32, p: &LStarSeriesParams) -> Result<Complex64> {
    if n > f.weight() - 2 {
        return Err(Error::Domain(format!(
            "period index {n} outside 0..={}",
            f.weight() - 2
        )));
    }
    lstar(f, Complex64::new(n as f64 + 1.0, 0.0), p)
}

/// Grid for the Petersson-norm quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeterssonQuadParams {
    /// Truncation height of the fundamental domain.
    pub y_max: f64,
    /// Gauss-Legendre nodes in `x`.
    pub nx: usize,
    /// Gauss-Legendre nodes per `y` panel.
    pub ny: usize,
}

impl PeterssonQuadParams {
    pub fn new(y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(y_max >= 2.0) {
            return Err(Error::Domain(format!("y_max must be >= 2, got {y_max}")));
        }
        if nx < 8 || ny < 8 {
            return Err(Error::Domain(format!("grid sizes must be >= 8, got {nx} x {ny}")));
        }
        Ok(Self { y_max, nx, ny })
    }

    fn coarser(&self) -> Self {
        Self {
            y_max: self.y_max,
            nx: (self.nx * 3 / 4).max(8),
            ny: (self.ny * 3 / 4).max(8),
        }
    }
}

impl Default for PeterssonQuadParams {
    fn default() -> Self {
        Self {
            y_max: 12.0,
            nx: 32,
            ny: 24,
        }
    }
}

/// Petersson norm with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeterssonNorm {
    pub value: f64,
    /// Grid-refinement difference plus the analytic bound for `y > y_max`.
    pub error: f64,
}

/// Relative accuracy demanded of [`petersson_norm`].
pub const PETERSSON_REL_TOL: f64 = 1e-8;

const Y_PANEL: f64 = 0.5;

fn fundamental_domain_integral(f: &NumericForm, q: &PeterssonQuadParams) -> f64 {
    let k = f.weight() as i32;
    let (gx, wx) = gauss_legendre(q.nx);
    let (gy, wy) = gauss_legendre(q.ny);
    // x in [0, 1/2]; |f(-x+iy)| = |f(x+iy)| for real coefficients.
    let columns: Vec<f64> = gx
        .par_iter()
        .zip(wx.par_iter())
        .map(|(&u, &w)| {
            let x = 0.25 * (u + 1.0);
            let y0 = (1.0 - x * x).sqrt();
            let panels = ((q.y_max - y0) / Y_PANEL).ceil().max(1.0) as usize;
            let h = (q.y_max - y0) / panels as f64;
            let mut col = KahanSum::new();
            for p in 0..panels {
                let lo = y0 + p as f64 * h;
                for (&v, &wv) in gy.iter().zip(&wy) {
                    let y = lo + 0.5 * h * (v + 1.0);
                    let fz = f.eval(Complex64::new(x, y));
                    col.add(0.5 * h * wv * fz.norm_sqr() * y.powi(k - 2));
                }
            }
            0.25 * w * col.value()
        })
        .collect();
    2.0 * columns.into_iter().collect::<KahanSum>().value()
}

/// Bound for `int_{y_max}^inf int_{-1/2}^{1/2} |f|^2 y^{k-2} dx dy`.
fn tail_bound(f: &NumericForm, y_max: f64) -> f64 {
    let k = f.weight() as f64;
    let c: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, a)| a.abs() * (-2.0 * PI * (n as f64 - 1.0) * y_max).exp())
        .sum();
    let rate = 4.0 * PI - (k - 2.0) / y_max;
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    c * c * (-4.0 * PI * y_max).exp() * y_max.powf(k - 2.0) / rate
}

/// `<f, f> = int_F |f(x+iy)|^2 y^{k-2} dx dy` over the standard fundamental
/// domain, without volume normalization.
pub fn petersson_norm(f: &NumericForm, q: &PeterssonQuadParams) -> Result<PeterssonNorm> {
    let fine = fundamental_domain_integral(f, q);
    let coarse = fundamental_domain_integral(f, &q.coarser());
    // the q-series and the weight factor carry a few hundred ulps each, so a
    // grid difference below that level is not evidence of convergence
    let rounding = 1e3 * f64::EPSILON * fine.abs();
    let error = (fine - coarse).abs() + tail_bound(f, q.y_max) + rounding;
    if !(fine > 0.0) {
        return Err(Error::Domain("Petersson norm of the zero form".into()));
    }
    if error > PETERSSON_REL_TOL * fine {
        return Err(Error::accuracy("Petersson norm quadrature", error / fine, PETERSSON_REL_TOL));
    }
    Ok(PeterssonNorm { value: fine, error })
}

//! Independent evaluations of the intermediate steps, each paired with the
//! closed form it should reproduce.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::hyper::hyper_prefactor;
use super::theorem::{closed_terms, t4_alternative_form};
use super::{MatrixQuadruple, ParamPoint};
use crate::error::{Error, Result};
use crate::quad::{integrate_real_line, integrate_to_infinity, tanh_sinh};
use crate::specfun::{
    gamma, gauss_2f1, pochhammer, pow_pos, principal_pow, zeta, AccuracyBudget, BERNOULLI_OVER_FACT, I,
};
use crate::sum::ComplexSum;

const QUAD_TOL: f64 = 1e-12;

/// A quantity computed by direct numerics and by its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OraclePair {
    pub direct: Complex64,
    pub closed: Complex64,
    /// `|direct - closed|`.
    pub residual: f64,
    /// Error estimate of the direct evaluation.
    pub direct_error: f64,
}

impl OraclePair {
    fn new(direct: Complex64, closed: Complex64, direct_error: f64) -> Self {
        Self {
            direct,
            closed,
            residual: (direct - closed).norm(),
            direct_error,
        }
    }

    /// Residual relative to `|closed|`; the absolute residual when the
    /// closed form vanishes exactly.
    pub fn relative(&self) -> f64 {
        let scale = self.closed.norm();
        if scale > 0.0 {
            self.residual / scale
        } else {
            self.residual
        }
    }
}

/// `t^w` for real `t != 0` with `arg t = pi` when `t < 0`.
fn real_pow(t: f64, w: Complex64) -> Complex64 {
    if t > 0.0 {
        pow_pos(t, w)
    } else {
        (Complex64::new(t.abs().ln(), PI) * w).exp()
    }
}

/// `sum_{m > n} (m + w)^{-e}` by Euler-Maclaurin from `m = n`.
fn em_tail(w: Complex64, e: Complex64, n: f64) -> Result<Complex64> {
    let base = Complex64::new(n, 0.0) + w;
    let phi = principal_pow(base, -e)?;
    let mut acc = ComplexSum::new();
    acc.add(principal_pow(base, Complex64::new(1.0, 0.0) - e)? / (e - 1.0));
    acc.add(-0.5 * phi);
    // phi^{(r)} = (-1)^r (e)_r (x + w)^{-e-r}; only odd r appear.
    let inv = 1.0 / base;
    let mut pw = phi * inv;
    for (i, &b) in BERNOULLI_OVER_FACT.iter().take(10).enumerate() {
        let r = 2 * i as u32 + 1;
        let deriv = -pochhammer(e, r) * pw;
        acc.add(-b * deriv);
        pw *= inv * inv;
    }
    Ok(acc.value())
}

/// `sum_{n in Z} (n + w)^{-e}` for `Im w != 0`, `Re e > 1` (principal powers).
pub fn lattice_sum(w: Complex64, e: Complex64) -> Result<Complex64> {
    if w.im == 0.0 || e.re <= 1.0 {
        return Err(Error::Domain(format!("lattice sum needs Im w != 0 and Re e > 1, got w = {w}, e = {e}")));
    }
    let n = (30.0 + e.norm() + w.norm()).ceil();
    let mut acc = ComplexSum::new();
    let ni = n as i64;
    for m in -ni..=ni {
        acc.add(principal_pow(Complex64::new(m as f64, 0.0) + w, -e)?);
    }
    acc.add(em_tail(w, e, n)?);
    // -m + w = e^{+-i pi} (m - w), the sign following Im w.
    let rot = if w.im > 0.0 { (-I * PI * e).exp() } else { (I * PI * e).exp() };
    acc.add(rot * em_tail(-w, e, n)?);
    Ok(acc.value())
}

/// `((-2 pi i)^s / Gamma(s)) sum_{n >= 1} n^{s-1} e^{-2 pi n t}`.
pub fn lipschitz_series(t: f64, s: Complex64) -> Result<Complex64> {
    let mut acc = ComplexSum::new();
    let mut n = 1.0;
    loop {
        let term = pow_pos(n, s - 1.0) * (-2.0 * PI * n * t).exp();
        acc.add(term);
        if term.norm() < 1e-18 * acc.value().norm() || n > 1e5 {
            break;
        }
        n += 1.0;
    }
    Ok(principal_pow(-2.0 * PI * I, s)? / gamma(s)? * acc.value())
}

/// Lattice sum `sum_n (it + n)^{-s}` against its exponential expansion.
pub fn lipschitz_check(t: f64, s: Complex64) -> Result<OraclePair> {
    let direct = lattice_sum(Complex64::new(0.0, t), s)?;
    let closed = lipschitz_series(t, s)?;
    Ok(OraclePair::new(direct, closed, 0.0))
}

fn i_pow_neg_k(k: u32) -> f64 {
    if (k / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Where the true integrand `~ t^{k-Re s'-1+max(Re s, k-Re s)} e^{-2 pi t}`
/// has dropped below `1e-17`.
fn a_term_cutoff(p: &ParamPoint) -> f64 {
    let k = p.k() as f64;
    let power = k - p.sprime().re - 1.0 + p.s().re.max(k - p.s().re);
    let mut t = 2.0;
    while -2.0 * PI * t + power * t.ln() > -39.0 {
        t += 0.5;
    }
    t
}

fn a_integrand(p: &ParamPoint, t: f64) -> Complex64 {
    let (s, sp) = (p.s(), p.sprime());
    let k = Complex64::new(p.k() as f64, 0.0);
    let first = lattice_sum(Complex64::new(0.0, -t), k - s);
    let second = lattice_sum(Complex64::new(0.0, t), s);
    match (first, second) {
        (Ok(a), Ok(b)) => (a + b) * pow_pos(t, k - sp - 1.0),
        _ => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// The `bd = 0` contribution by direct quadrature of the lattice sums:
/// `i^{-k} int_0^inf [sum_n (n - it)^{s-k} + sum_n (n + it)^{-s}] t^{k-s'-1} dt`,
/// compared with `t1 + t2`. Disagreement beyond `budget` is an oracle failure.
pub fn a_term_oracle(p: &ParamPoint, budget: &AccuracyBudget) -> Result<OraclePair> {
    let (t1, t2, _) = closed_terms(p)?;
    let closed = t1 + t2;
    let cutoff = a_term_cutoff(p);
    let q = tanh_sinh(|t| a_integrand(p, t), 0.0, cutoff, QUAD_TOL)?;
    let direct = i_pow_neg_k(p.k()) * q.value;
    if !(direct.re.is_finite() && direct.im.is_finite()) {
        return Err(Error::accuracy("bd = 0 lattice quadrature", f64::INFINITY, budget.abs_tol));
    }
    let pair = OraclePair::new(direct, closed, q.error);
    let tol = budget.abs_tol.max(budget.rel_tol * closed.norm());
    if pair.residual > tol {
        return Err(Error::OracleFailure {
            name: "a_term".into(),
            residual: pair.residual,
            tolerance: tol,
        });
    }
    Ok(pair)
}

/// The same contribution before the substitution `t -> 1/t`:
/// `i^{-k} int_0^inf [sum_n (n - i/t)^{s-k} + sum_n (n + i/t)^{-s}] t^{s'-k-1} dt`.
pub fn a_term_direct_inverted(p: &ParamPoint) -> Result<Complex64> {
    let (s, sp) = (p.s(), p.sprime());
    let k = Complex64::new(p.k() as f64, 0.0);
    let f = |t: f64| {
        let u = 1.0 / t;
        let a = lattice_sum(Complex64::new(0.0, -u), k - s);
        let b = lattice_sum(Complex64::new(0.0, u), s);
        match (a, b) {
            (Ok(a), Ok(b)) => (a + b) * pow_pos(t, sp - k - 1.0),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let lo = 1.0 / a_term_cutoff(p);
    let near = tanh_sinh(f, lo, 1.0, QUAD_TOL)?;
    let far = integrate_to_infinity(f, 1.0, QUAD_TOL)?;
    Ok(i_pow_neg_k(p.k()) * (near.value + far.value))
}

/// `int_{-inf}^{inf} (cit+d)^{-k} ((ait+b)/(cit+d))^{-s} t^{s'-1} dt` for
/// arbitrary integer entries.
pub fn per_matrix_oracle_signed(a: i64, b: i64, c: i64, d: i64, p: &ParamPoint) -> Result<Complex64> {
    let (s, sp) = (p.s(), p.sprime());
    let k = p.k() as i32;
    let f = |t: f64| {
        let den = Complex64::new(d as f64, c as f64 * t);
        let num = Complex64::new(b as f64, a as f64 * t);
        match principal_pow(num / den, -s) {
            Ok(ratio) => den.powi(-k) * ratio * real_pow(t, sp - 1.0),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    Ok(integrate_real_line(f, QUAD_TOL)?.value)
}

/// Direct quadrature of the per-matrix integral and its closed form
/// `2 pi e^{pi i (s'-1)/2} (1-s')_{k-1}/(k-1)! a^{-s} c^{s-s'} d^{s'-k} 2F1(s, k-s'; k; 1/(ad))`.
pub fn per_matrix_oracle(q: &MatrixQuadruple, p: &ParamPoint) -> Result<OraclePair> {
    let (s, sp) = (p.s(), p.sprime());
    let k = Complex64::new(p.k() as f64, 0.0);
    let direct = per_matrix_oracle_signed(q.a as i64, q.b as i64, q.c as i64, q.d as i64, p)?;
    let closed = hyper_prefactor(p)
        * pow_pos(q.a as f64, -s)
        * pow_pos(q.c as f64, s - sp)
        * pow_pos(q.d as f64, sp - k)
        * gauss_2f1(s, k - sp, k, 1.0 / q.det_shell() as f64)?;
    Ok(OraclePair::new(direct, closed, 0.0))
}

/// `int_{-inf}^{inf} (-it + n)^{s-k} t^{s'-1} dt`, which vanishes.
pub fn upper_a_zero_integral(p: &ParamPoint, n: u32) -> Result<Complex64> {
    let (s, sp) = (p.s(), p.sprime());
    let k = Complex64::new(p.k() as f64, 0.0);
    let f = |t: f64| match principal_pow(Complex64::new(n as f64, -t), s - k) {
        Ok(v) => v * real_pow(t, sp - 1.0),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    Ok(integrate_real_line(f, QUAD_TOL)?.value)
}

/// `zeta(s-s') int_{-inf}^{inf} (i tau + 1)^{-s} tau^{s'-1} d tau` against
/// the beta-integral closed form.
pub fn c_zero_term_oracle(p: &ParamPoint) -> Result<OraclePair> {
    let (s, sp) = (p.s(), p.sprime());
    let f = |t: f64| match principal_pow(Complex64::new(1.0, t), -s) {
        Ok(v) => v * real_pow(t, sp - 1.0),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let q = integrate_real_line(f, QUAD_TOL)?;
    let z = zeta(s - sp)?;
    Ok(OraclePair::new(z * q.value, t4_alternative_form(p)?, z.norm() * q.error))
}

/// `int_0^inf (w+1)^{-s} w^{s'-1} dw = Gamma(s') Gamma(s-s') / Gamma(s)`.
pub fn beta_integral_check(s: Complex64, sp: Complex64) -> Result<OraclePair> {
    let f = |w: f64| pow_pos(w + 1.0, -s) * pow_pos(w, sp - 1.0);
    let lo = tanh_sinh(f, 0.0, 1.0, QUAD_TOL)?;
    let hi = integrate_to_infinity(f, 1.0, QUAD_TOL)?;
    let closed = gamma(sp)? * gamma(s - sp)? / gamma(s)?;
    Ok(OraclePair::new(lo.value + hi.value, closed, lo.error + hi.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{enumerate_quadruples, rhs_theorem};

    fn pt(k: u32, s: (f64, f64), sp: (f64, f64)) -> ParamPoint {
        ParamPoint::new(k, Complex64::new(s.0, s.1), Complex64::new(sp.0, sp.1)).unwrap()
    }

    fn a1() -> ParamPoint {
        pt(8, (3.6, 0.0), (1.4, 0.0))
    }

    #[test]
    fn lattice_sum_against_slow_direct_sum() {
        let w = Complex64::new(0.0, 0.7);
        let e = Complex64::new(4.5, 1.0);
        let mut acc = ComplexSum::new();
        for n in -200_000i64..=200_000 {
            acc.add(principal_pow(Complex64::new(n as f64, 0.0) + w, -e).unwrap());
        }
        // remaining tail ~ 2 * 200000^{-3.5} / 3.5
        let fast = lattice_sum(w, e).unwrap();
        assert!((fast - acc.value()).norm() < 1e-15 + 1e-12 * fast.norm());
    }

    #[test]
    fn lipschitz_summation() {
        let r = lipschitz_check(1.0, Complex64::new(3.2, 0.4)).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        let r = lipschitz_check(0.3, Complex64::new(5.5, -1.0)).unwrap();
        assert!(r.relative() < 1e-10, "{r:?}");
    }

    #[test]
    fn a_term_dual_method() {
        let b = AccuracyBudget::new(1e-8, 1e-8, 100_000).unwrap();
        for p in [a1(), pt(10, (5.2, 1.3), (1.8, -1.3)), pt(14, (7.3, 2.0), (3.7, -2.0))] {
            let r = a_term_oracle(&p, &b).unwrap();
            assert!(r.residual < 1e-8, "k = {}: {r:?}", p.k());
        }
    }

    #[test]
    fn a_term_substitution_consistency() {
        let p = a1();
        let inv = a_term_direct_inverted(&p).unwrap();
        let b = AccuracyBudget::new(1e-8, 1e-8, 100_000).unwrap();
        let dir = a_term_oracle(&p, &b).unwrap().direct;
        assert!((inv - dir).norm() < 1e-8 * dir.norm().max(1.0), "{inv} vs {dir}");
    }

    #[test]
    fn per_matrix_small_shells() {
        for p in [a1(), pt(8, (3.6, 0.7), (1.4, -0.7))] {
            for q in enumerate_quadruples(6) {
                let r = per_matrix_oracle(&q, &p).unwrap();
                assert!(r.residual < 1e-7, "{q:?}: {r:?}");
            }
        }
    }

    #[test]
    fn negative_entries_integrate_to_zero() {
        let p = a1();
        // a, c < 0 and b, d > 0 with ad - bc = 1
        for (a, b, c, d) in [(-1i64, 1, -2, 1), (-2, 1, -3, 1), (-1, 2, -1, 1)] {
            assert_eq!(a * d - b * c, 1);
            let v = per_matrix_oracle_signed(a, b, c, d, &p).unwrap();
            assert!(v.norm() < 1e-9, "{v}");
        }
    }

    #[test]
    fn upper_a_zero_vanishes() {
        let p = a1();
        for n in 1..=3 {
            assert!(upper_a_zero_integral(&p, n).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn c_zero_term() {
        let r = c_zero_term_oracle(&a1()).unwrap();
        assert!(r.residual < 1e-9, "{r:?}");
        let t = rhs_theorem(&a1(), &AccuracyBudget::new(1e-9, 0.0, 1000).unwrap()).unwrap();
        assert!((r.closed - t.t4).norm() < 1e-13 * t.t4.norm());
    }

    #[test]
    fn beta_integral() {
        let r = beta_integral_check(Complex64::new(3.6, 0.0), Complex64::new(1.4, 0.0)).unwrap();
        assert!(r.residual < 1e-10);
        let half = gamma(Complex64::new(1.5, 0.0)).unwrap().powi(2) / gamma(Complex64::new(3.0, 0.0)).unwrap();
        assert!((half.re - PI / 8.0).abs() < 1e-15);
        let r = beta_integral_check(Complex64::new(3.0, 0.0), Complex64::new(1.5, 0.0)).unwrap();
        assert!((r.direct.re - PI / 8.0).abs() < 1e-10);
    }
}

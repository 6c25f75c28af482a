//! The left-hand side, evaluated spectrally and by direct summation of the
//! kernel function followed by Mellin quadrature.

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{c_k, gamma_k, ParamPoint};
use crate::error::{Error, Result};
use crate::lfunc::{lstar, petersson_norm, LStarSeriesParams, PeterssonNorm, PeterssonQuadParams};
use crate::modforms::{eigenbasis, Eigenform};
use crate::quad::gauss_kronrod;
use crate::specfun::{pow_pos, principal_pow, AccuracyBudget};
use crate::sum::ComplexSum;

/// Eigenbasis of `S_k` with Petersson norms.
#[derive(Debug, Clone)]
pub struct SpectralData {
    k: u32,
    forms: Vec<Eigenform>,
    norms: Vec<PeterssonNorm>,
    lparams: LStarSeriesParams,
}

impl SpectralData {
    pub fn compute(k: u32, prec: usize, quad: &PeterssonQuadParams) -> Result<Self> {
        let forms = eigenbasis(k, prec)?;
        let norms = forms
            .iter()
            .map(|f| petersson_norm(f, quad))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(k, forms, norms)
    }

    pub fn from_parts(k: u32, forms: Vec<Eigenform>, norms: Vec<PeterssonNorm>) -> Result<Self> {
        if forms.len() != norms.len() {
            return Err(Error::Dependency("one Petersson norm per eigenform is required".into()));
        }
        if forms.iter().any(|f| f.weight() != k) {
            return Err(Error::Dependency(format!("eigenforms must have weight {k}")));
        }
        let n_terms = forms.iter().map(|f| f.prec()).min().unwrap_or(40).min(40);
        Ok(Self {
            k,
            forms,
            norms,
            lparams: LStarSeriesParams {
                n_terms,
                ..Default::default()
            },
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn forms(&self) -> &[Eigenform] {
        &self.forms
    }

    pub fn norms(&self) -> &[PeterssonNorm] {
        &self.norms
    }
}

/// Spectral side with a relative error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralValue {
    pub value: Complex64,
    pub error: f64,
}

/// `c_k sum_nu L*(f_nu, s) L*(f_nu, s') / <f_nu, f_nu>`; zero when `S_k = {0}`.
pub fn spectral_lhs(p: &ParamPoint, data: &SpectralData) -> Result<SpectralValue> {
    if data.k != p.k() {
        return Err(Error::Dependency(format!(
            "spectral data has weight {}, point has weight {}",
            data.k,
            p.k()
        )));
    }
    let mut acc = ComplexSum::new();
    let mut err = 0.0;
    for (f, n) in data.forms.iter().zip(&data.norms) {
        let a = lstar(f, p.s(), &data.lparams)?;
        let b = lstar(f, p.sprime(), &data.lparams)?;
        let term = c_k(p.k()) * a * b / n.value;
        err += term.norm() * (n.error / n.value + 1e-14);
        acc.add(term);
    }
    Ok(SpectralValue {
        value: acc.value(),
        error: err,
    })
}

/// Representatives `(a, b, c, d)` of `PSL_2(Z)` with all entries at most
/// `m_max` in absolute value, one per `+-` pair (`c > 0`, or `c = 0, d = 1`).
#[derive(Debug, Clone)]
pub struct KernelMatrices {
    m_max: i64,
    mats: Vec<[i64; 4]>,
}

impl KernelMatrices {
    pub fn new(m_max: u32) -> Self {
        let m = m_max as i64;
        let mut mats = Vec::new();
        for b in -m..=m {
            mats.push([1, b, 0, 1]);
        }
        for c in 1..=m {
            for d in -m..=m {
                if d.gcd(&c) != 1 {
                    continue;
                }
                // a d = 1 mod c
                let e = d.extended_gcd(&c);
                let a0 = e.x.rem_euclid(c);
                let mut a = a0 - ((a0 + m) / c) * c;
                while a <= m {
                    if a >= -m {
                        let num = a * d - 1;
                        if num % c == 0 {
                            let b = num / c;
                            if b.abs() <= m {
                                mats.push([a, b, c, d]);
                            }
                        }
                    }
                    a += c;
                }
            }
        }
        Self { m_max: m, mats }
    }

    pub fn m_max(&self) -> i64 {
        self.m_max
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn matrices(&self) -> &[[i64; 4]] {
        &self.mats
    }

    /// `sum_V (cz+d)^{-k} ((az+b)/(cz+d))^{-s}` without the `gamma_k` factor.
    pub fn sum(&self, s: Complex64, k: u32, z: Complex64) -> Result<Complex64> {
        let mut acc = ComplexSum::new();
        for &[a, b, c, d] in &self.mats {
            let den = z * c as f64 + d as f64;
            let num = z * a as f64 + b as f64;
            acc.add(den.powi(-(k as i32)) * principal_pow(num / den, -s)?);
        }
        Ok(acc.value())
    }
}

/// `R_{s,k}(it)` truncated to entries of size at most `m_max`.
pub fn kernel_value(s: Complex64, k: u32, t: f64, m_max: u32) -> Result<Complex64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("kernel_value expects t >= 1, got {t}")));
    }
    let mats = KernelMatrices::new(m_max);
    Ok(gamma_k(s, k)? * mats.sum(s, k, Complex64::new(0.0, t))?)
}

/// Direct evaluation of `gamma_k(s)^{-1} int_0^inf R_{s,k}(it) t^{s'-1} dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinLhs {
    pub value: Complex64,
    /// Change when the matrix box shrinks to `3/4` of `m_max`.
    pub truncation: f64,
    pub quad_error: f64,
    /// Estimate of the neglected range `t > t_max`.
    pub tail: f64,
    pub m_max: u32,
    pub t_max: f64,
}

impl MellinLhs {
    pub fn error(&self) -> f64 {
        self.truncation + self.quad_error + self.tail
    }
}

/// Upper end of the folded integral. The truncated kernel sum does not
/// share the `e^{-2 pi t}` decay of the full series, so the range is kept
/// short; the neglected part is estimated from the integrand at `t_max`.
pub const MELLIN_T_MAX: f64 = 5.0;

fn folded(p: &ParamPoint, mats: &KernelMatrices, t_max: f64, tol: f64) -> Result<(Complex64, f64, f64)> {
    let (s, sp, k) = (p.s(), p.sprime(), p.k());
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let kc = Complex64::new(k as f64, 0.0);
    let f = |t: f64| match mats.sum(s, k, Complex64::new(0.0, t)) {
        Ok(r) => r * (pow_pos(t, sp - 1.0) + sign * pow_pos(t, kc - sp - 1.0)),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let q = gauss_kronrod(f, 1.0, t_max, tol, 400)?;
    let end = f(t_max).norm() / (2.0 * std::f64::consts::PI);
    Ok((q.value, q.error, end))
}

/// `int_1^T R(it) (t^{s'-1} + (-1)^{k/2} t^{k-s'-1}) dt / gamma_k(s)`, the
/// range `(0, 1)` folded onto `(1, inf)` by `R(-1/z) = z^k R(z)`.
pub fn mellin_lhs(p: &ParamPoint, m_max: u32, budget: &AccuracyBudget) -> Result<MellinLhs> {
    let tol = 1e-10;
    let fine = KernelMatrices::new(m_max);
    let coarse = KernelMatrices::new((m_max * 3 / 4).max(2));
    let (value, quad_error, tail) = folded(p, &fine, MELLIN_T_MAX, tol)?;
    let (rough, _, _) = folded(p, &coarse, MELLIN_T_MAX, tol)?;
    let out = MellinLhs {
        value,
        truncation: (value - rough).norm(),
        quad_error,
        tail,
        m_max,
        t_max: MELLIN_T_MAX,
    };
    let target = budget.abs_tol.max(budget.rel_tol * value.norm());
    if out.error() > target {
        return Err(Error::accuracy(
            format!("kernel Mellin integral with m_max = {m_max} (box change {:e})", out.truncation),
            out.error(),
            target,
        ));
    }
    Ok(out)
}

/// `int_{1/T}^{T} R(it) t^{s'-1} dt / gamma_k(s)` without folding.
pub fn mellin_lhs_unfolded(p: &ParamPoint, m_max: u32, t_max: f64) -> Result<Complex64> {
    let mats = KernelMatrices::new(m_max);
    let (s, sp, k) = (p.s(), p.sprime(), p.k());
    let f = |t: f64| match mats.sum(s, k, Complex64::new(0.0, t)) {
        Ok(r) => r * pow_pos(t, sp - 1.0),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let lo = gauss_kronrod(f, 1.0 / t_max, 1.0, 1e-10, 400)?;
    let hi = gauss_kronrod(f, 1.0, t_max, 1e-10, 400)?;
    Ok(lo.value + hi.value)
}

#[cfg(test)]
pub(crate) fn folded_integral(p: &ParamPoint, m_max: u32, t_max: f64) -> Complex64 {
    folded(p, &KernelMatrices::new(m_max), t_max, 1e-10).unwrap().0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rhs_theorem;

    fn pt(k: u32, s: (f64, f64), sp: (f64, f64)) -> ParamPoint {
        ParamPoint::new(k, Complex64::new(s.0, s.1), Complex64::new(sp.0, sp.1)).unwrap()
    }

    fn budget() -> AccuracyBudget {
        AccuracyBudget::new(1e-12, 1e-9, 100_000).unwrap()
    }

    #[test]
    fn representatives_are_unique_and_unimodular() {
        let m = KernelMatrices::new(12);
        let mut seen = std::collections::HashSet::new();
        for &[a, b, c, d] in m.matrices() {
            assert_eq!(a * d - b * c, 1);
            assert!([a, b, c, d].iter().all(|x| x.abs() <= 12));
            assert!(c > 0 || (c == 0 && d == 1));
            assert!(seen.insert([a, b, c, d]));
            assert!(!seen.contains(&[-a, -b, -c, -d]) || c == 0);
        }
        // brute force count
        let mut count = 0;
        for a in -12i64..=12 {
            for b in -12i64..=12 {
                for c in -12i64..=12 {
                    for d in -12i64..=12 {
                        if a * d - b * c == 1 {
                            count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(2 * m.len(), count);
    }

    #[test]
    fn kernel_decays_like_a_cusp_form() {
        let s = Complex64::new(7.5, 0.0);
        let near = kernel_value(s, 12, 1.0, 60).unwrap().norm();
        let far = kernel_value(s, 12, 6.0, 60).unwrap().norm();
        assert!(far < 1e-6 * near, "{far} vs {near}");
    }

    #[test]
    fn truncated_kernel_is_exactly_modular() {
        // the box is stable under V -> V S, so R(i/t) = (it)^k R(it) holds
        // for every truncation
        let mats = KernelMatrices::new(20);
        let s = Complex64::new(6.5, 0.8);
        for t in [1.3, 2.0, 3.7] {
            let a = mats.sum(s, 12, Complex64::new(0.0, 1.0 / t)).unwrap();
            let b = Complex64::new(0.0, t).powi(12) * mats.sum(s, 12, Complex64::new(0.0, t)).unwrap();
            assert!((a - b).norm() < 1e-9 * b.norm().max(1e-300) + 1e-14, "t = {t}");
        }
    }

    #[test]
    fn fold_identity() {
        let p = pt(12, (6.5, 0.0), (2.5, 0.0));
        let folded = folded_integral(&p, 30, 4.0);
        let unfolded = mellin_lhs_unfolded(&p, 30, 4.0).unwrap();
        assert!((folded - unfolded).norm() < 1e-8 * folded.norm(), "{folded} vs {unfolded}");
    }

    #[test]
    fn spectral_side_matches_theorem_at_valid_point() {
        let data = SpectralData::compute(12, 64, &PeterssonQuadParams::default()).unwrap();
        let p = pt(12, (6.5, 0.0), (2.5, 0.0));
        let spec = spectral_lhs(&p, &data).unwrap();
        let rhs = rhs_theorem(&p, &budget()).unwrap();
        let lhs = gamma_k(p.s(), 12).unwrap() * rhs.total;
        assert!((lhs - spec.value).norm() < 1e-6 * spec.value.norm(), "{lhs} vs {}", spec.value);
    }

    #[test]
    fn spectral_side_is_symmetric() {
        let data = SpectralData::compute(12, 64, &PeterssonQuadParams::default()).unwrap();
        let p = ParamPoint::unchecked(12, Complex64::new(7.5, 0.0), Complex64::new(3.5, 0.0));
        let q = ParamPoint::unchecked(12, Complex64::new(3.5, 0.0), Complex64::new(7.5, 0.0));
        let a = spectral_lhs(&p, &data).unwrap().value;
        let b = spectral_lhs(&q, &data).unwrap().value;
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn empty_space_gives_zero() {
        let data = SpectralData::compute(8, 64, &PeterssonQuadParams::default()).unwrap();
        let p = pt(8, (3.6, 0.0), (1.4, 0.0));
        assert_eq!(spectral_lhs(&p, &data).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn weight_mismatch_is_a_dependency_error() {
        let data = SpectralData::compute(8, 64, &PeterssonQuadParams::default()).unwrap();
        let p = pt(12, (6.5, 0.0), (2.5, 0.0));
        assert!(matches!(spectral_lhs(&p, &data), Err(Error::Dependency(_))));
    }
}

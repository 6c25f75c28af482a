//! Normalized Hecke eigenforms with numeric coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::f64::consts::PI;
use std::ops::Deref;

use super::{dim_cusp, hecke_matrix, rat, rational_to_f64, victor_miller_basis, QExpansion};
use crate::error::{Error, Result};
use crate::sum::{ComplexSum, KahanSum};

/// A cusp form given by numeric coefficients `a(0)..=a(N)` (with `a(0) = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct NumericForm {
    weight: u32,
    coeffs: Vec<f64>,
}

impl NumericForm {
    pub fn new(weight: u32, coeffs: Vec<f64>) -> Result<Self> {
        if weight < 4 || weight % 2 != 0 {
            return Err(Error::Domain(format!("weight must be even and >= 4, got {weight}")));
        }
        if coeffs.len() < 2 {
            return Err(Error::Domain("need at least a(0) and a(1)".into()));
        }
        if coeffs[0] != 0.0 {
            return Err(Error::Domain("cusp form must have a(0) = 0".into()));
        }
        Ok(Self { weight, coeffs })
    }

    pub fn from_expansion(q: &QExpansion) -> Result<Self> {
        Self::new(q.weight(), q.to_f64())
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn a(&self, n: usize) -> f64 {
        self.coeffs[n]
    }

    pub fn scaled(&self, c: f64) -> NumericForm {
        NumericForm {
            weight: self.weight,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `sum a(n) e^{2 pi i n z}`, `Im z > 0`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        debug_assert!(z.im > 0.0);
        let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
        let mut qn = Complex64::new(1.0, 0.0);
        let mut acc = ComplexSum::new();
        for &a in &self.coeffs[1..] {
            qn *= q;
            if qn.norm() < 1e-300 {
                break;
            }
            acc.add(a * qn);
        }
        acc.value()
    }

    /// `f(it)` for `t > 0`, through `f(it) = (-1)^{k/2} t^{-k} f(i/t)` when
    /// `t < 1` so the q-series is only summed where `|q| <= e^{-2 pi}`.
    pub fn eval_imag_axis(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        if t >= 1.0 {
            let q = (-2.0 * PI * t).exp();
            let mut qn = 1.0;
            let mut acc = KahanSum::new();
            for &a in &self.coeffs[1..] {
                qn *= q;
                if qn < 1e-300 {
                    break;
                }
                acc.add(a * qn);
            }
            acc.value()
        } else {
            let sign = if (self.weight / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sign * t.powi(-(self.weight as i32)) * self.eval_imag_axis(1.0 / t)
        }
    }
}

/// Normalized (`a(1) = 1`) Hecke eigenform `f_{k, nu}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenform {
    form: NumericForm,
    index: usize,
    t2_eigenvalue: f64,
}

impl Eigenform {
    pub fn new(form: NumericForm, index: usize) -> Result<Self> {
        if (form.a(1) - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("eigenform must have a(1) = 1, got {}", form.a(1))));
        }
        let t2 = if form.prec() >= 2 { form.a(2) } else { f64::NAN };
        Ok(Self {
            form,
            index,
            t2_eigenvalue: t2,
        })
    }

    /// Position `nu` in `1..=g_k` after sorting by `a(2)`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn t2_eigenvalue(&self) -> f64 {
        self.t2_eigenvalue
    }

    pub fn form(&self) -> &NumericForm {
        &self.form
    }
}

impl Deref for Eigenform {
    type Target = NumericForm;

    fn deref(&self) -> &NumericForm {
        &self.form
    }
}

/// Coordinates of eigenvectors (normalized to first coordinate 1), or
/// `None` when the spectrum is degenerate.
fn eigen_coordinates(m: &[Vec<BigRational>], basis: &[QExpansion]) -> Result<Option<Vec<Vec<f64>>>> {
    let d = m.len();
    let prec = basis[0].prec();
    match d {
        1 => Ok(Some(vec![basis[0].to_f64()])),
        2 => {
            // Transposed action: T(sum v_i g_i) = sum_j (sum_i v_i M_ij) g_j.
            let tr = &m[0][0] + &m[1][1];
            let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
            let disc = &tr * &tr - rat(4) * &det;
            if !disc.is_positive() {
                return Ok(None);
            }
            let root = rational_to_f64(&disc).sqrt();
            if m[1][0].is_zero() {
                // triangular: only the M00 eigenvector has a nonzero q^1 term
                return Err(Error::Domain("Hecke matrix has an eigenvector with a(1) = 0".into()));
            }
            // v2 = (lambda - M00) / M10 = (tr - 2 M00 +- root) / (2 M10)
            let two_m10 = rat(2) * &m[1][0];
            let p_coef = (&tr - rat(2) * &m[0][0]) / &two_m10;
            let mut out = Vec::new();
            for sign in [-1.0, 1.0] {
                let coeffs = (0..=prec)
                    .map(|n| {
                        let p = basis[0].coeff(n) + &p_coef * basis[1].coeff(n);
                        let q = basis[1].coeff(n) / &two_m10;
                        rational_to_f64(&p) + sign * rational_to_f64(&q) * root
                    })
                    .collect();
                out.push(coeffs);
            }
            Ok(Some(out))
        }
        _ => {
            let a = DMatrix::from_fn(d, d, |i, j| rational_to_f64(&m[j][i]));
            let Some(vals) = a.clone().schur().eigenvalues() else {
                return Ok(None);
            };
            let mut vals: Vec<f64> = vals.iter().copied().collect();
            vals.sort_by(f64::total_cmp);
            let scale = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
            if vals.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-9 * scale) {
                return Ok(None);
            }
            let mut out = Vec::new();
            for &lambda in &vals {
                let shift = lambda + 1e-10 * scale;
                let lu = (&a - DMatrix::identity(d, d) * shift).lu();
                let mut v = nalgebra::DVector::from_element(d, 1.0);
                for _ in 0..4 {
                    v = lu
                        .solve(&v)
                        .ok_or_else(|| Error::Domain("singular inverse iteration".into()))?;
                    v /= v.norm();
                }
                if v[0].abs() < 1e-12 {
                    return Err(Error::Domain("eigenvector with a(1) = 0".into()));
                }
                v /= v[0];
                let coeffs = (0..=prec)
                    .map(|n| {
                        (0..d)
                            .map(|i| v[i] * rational_to_f64(basis[i].coeff(n)))
                            .collect::<KahanSum>()
                            .value()
                    })
                    .collect();
                out.push(coeffs);
            }
            Ok(Some(out))
        }
    }
}

/// Normalized Hecke eigenbasis of `S_k`, sorted by `a(2)` ascending.
///
/// Diagonalizes `T_2` on the Victor-Miller basis (exactly for `dim <= 2`),
/// falling back to `T_3` if the `T_2` spectrum is degenerate.
pub fn eigenbasis(k: u32, prec: usize) -> Result<Vec<Eigenform>> {
    let d = dim_cusp(k as i64);
    if d == 0 {
        return Ok(Vec::new());
    }
    eigenbasis_from_basis(k, &victor_miller_basis(k, prec)?)
}

/// As [`eigenbasis`], starting from a previously computed basis of `S_k`
/// (for instance one read back from disk).
pub fn eigenbasis_from_basis(k: u32, basis: &[QExpansion]) -> Result<Vec<Eigenform>> {
    let d = dim_cusp(k as i64);
    if basis.len() != d {
        return Err(Error::Domain(format!(
            "basis of S_{k} needs {d} forms, got {}",
            basis.len()
        )));
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    if let Some(q) = basis.iter().find(|q| q.weight() != k || !q.is_cusp_form()) {
        return Err(Error::Domain(format!(
            "basis element of weight {} is not a cusp form of weight {k}",
            q.weight()
        )));
    }
    let mut coords = None;
    for n in [2usize, 3] {
        let m = hecke_matrix(basis, n)?;
        if let Some(c) = eigen_coordinates(&m, basis)? {
            coords = Some(c);
            break;
        }
    }
    let coords = coords.ok_or_else(|| {
        Error::Domain(format!("degenerate T_2 and T_3 spectra in weight {k}"))
    })?;
    let mut forms = coords
        .into_iter()
        .map(|c| NumericForm::new(k, c))
        .collect::<Result<Vec<_>>>()?;
    forms.sort_by(|x, y| x.a(2).total_cmp(&y.a(2)));
    forms
        .into_iter()
        .enumerate()
        .map(|(i, f)| Eigenform::new(f, i + 1))
        .collect()
}

//! The hypergeometric matrix sum
//! `sum_{a,b,c,d > 0, ad - bc = 1} a^{-s} c^{s-s'} d^{s'-k} 2F1(s, k-s'; k; 1/(ad))`.
//!
//! Shells `N = ad <= n_max` are summed directly. Beyond `n_max` the sum is
//! regrouped by coprime pairs `(b, d)`: with `x = ad` one has `a = x/d`,
//! `c = (x-1)/b`, `x` runs through the progression `x = 0 mod d`,
//! `x = 1 mod b`, and by Euler's transformation
//!
//! ```text
//! term = b^{s'-s} d^{s+s'-k} g(x),   g(x) = x^{-s'} 2F1(k-s, s'; k; 1/x)
//!                                         = sum_j e_j x^{-s'-j}.
//! ```
//!
//! Each family tail `sum_{x > n_max} g(x)` is summed by Euler-Maclaurin in
//! the progression index. Families with `b > B` or `d > D` are not summed;
//! they are covered by an analytic bound, which is the reported truncation
//! error.

use num_complex::Complex64;
use num_integer::Integer;
use std::f64::consts::PI;

use super::{divisors, ParamPoint};
use crate::error::{Error, Result};
use crate::specfun::{factorial, gauss_2f1, pochhammer, pow_pos, zeta, AccuracyBudget, BERNOULLI_OVER_FACT};
use crate::sum::ComplexSum;

/// Largest `B * D` rectangle of families the automatic selection may use.
const MAX_FAMILY_AREA: f64 = 2.0e7;
/// Euler-Maclaurin starts once the progression index reaches `x / h >= W`.
const EM_START: f64 = 8.0;
const EM_TERMS: usize = 8;

/// Result of [`hyper_sum`].
#[derive(Debug, Clone, PartialEq)]
pub struct HyperSum {
    /// Prefactor times the matrix sum: the third term of the identity.
    pub value: Complex64,
    /// The matrix sum without prefactor.
    pub raw: Complex64,
    /// Raw contribution of shells `N <= n_max`.
    pub shells: Complex64,
    /// Raw contribution of the summed family tails.
    pub tail: Complex64,
    /// Bound on `|value - exact|` (omitted families and rounding).
    pub trunc_error: f64,
    pub n_max: u64,
    pub b_max: u64,
    pub d_max: u64,
}

impl HyperSum {
    fn zero(n_max: u64) -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            raw: Complex64::new(0.0, 0.0),
            shells: Complex64::new(0.0, 0.0),
            tail: Complex64::new(0.0, 0.0),
            trunc_error: 0.0,
            n_max,
            b_max: 0,
            d_max: 0,
        }
    }
}

/// `2 pi e^{pi i (s'-1)/2} (1-s')_{k-1} / (k-1)!`; exactly zero when `s'` is
/// an integer in `1..=k-1`.
pub fn hyper_prefactor(p: &ParamPoint) -> Complex64 {
    let sp = p.sprime();
    let poch = pochhammer(Complex64::new(1.0, 0.0) - sp, p.k() - 1);
    if poch == Complex64::new(0.0, 0.0) {
        return poch;
    }
    let rot = (Complex64::new(0.0, PI / 2.0) * (sp - 1.0)).exp();
    2.0 * PI * rot * poch / factorial(p.k() - 1)
}

struct PowTables {
    a: Vec<Complex64>,
    c: Vec<Complex64>,
    d: Vec<Complex64>,
}

impl PowTables {
    fn new(p: &ParamPoint, n: u64) -> Self {
        let (s, sp, k) = (p.s(), p.sprime(), p.k() as f64);
        let table = |w: Complex64| -> Vec<Complex64> {
            (0..=n).map(|m| if m == 0 { Complex64::new(0.0, 0.0) } else { pow_pos(m as f64, w) }).collect()
        };
        Self {
            a: table(-s),
            c: table(s - sp),
            d: table(sp - k),
        }
    }

    /// Raw shell `N`: `F(1/N) (sum_{d | N} (N/d)^{-s} d^{s'-k}) (sum_{c | N-1} c^{s-s'})`.
    fn shell(&self, p: &ParamPoint, n: u64) -> Result<Complex64> {
        let k = Complex64::new(p.k() as f64, 0.0);
        let f = gauss_2f1(p.s(), k - p.sprime(), k, 1.0 / n as f64)?;
        let ad: ComplexSum = divisors(n)
            .into_iter()
            .map(|d| self.a[(n / d) as usize] * self.d[d as usize])
            .collect();
        let cs: ComplexSum = divisors(n - 1).into_iter().map(|c| self.c[c as usize]).collect();
        Ok(f * ad.value() * cs.value())
    }
}

/// Raw (no prefactor) sum over the quadruples with `ad = n`.
pub fn shell_sum(p: &ParamPoint, n: u64) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::Domain(format!("shell index must be >= 2, got {n}")));
    }
    PowTables::new(p, n).shell(p, n)
}

/// Coefficients of `g(x) = sum_j e_j x^{-s'-j}` and the Euler-Maclaurin
/// corrections `e_j B_{2i}/(2i)! (s'+j)_{2i-1}`.
struct FamilySeries {
    sp: Complex64,
    e: Vec<Complex64>,
    integral: Vec<Complex64>,
    em: Vec<Vec<Complex64>>,
}

impl FamilySeries {
    fn new(p: &ParamPoint, x_min: f64) -> Result<Self> {
        let (s, sp) = (p.s(), p.sprime());
        let k = p.k() as f64;
        let mut e = vec![Complex64::new(1.0, 0.0)];
        let mut scale = 1.0;
        loop {
            let j = (e.len() - 1) as f64;
            let next = e[e.len() - 1] * (k - s + j) * (sp + j) / ((k + j) * (j + 1.0));
            scale /= x_min;
            e.push(next);
            if next.norm() * scale < 1e-18 {
                break;
            }
            if e.len() > 400 {
                return Err(Error::accuracy("family series in 1/x", next.norm() * scale, 1e-18));
            }
        }
        let integral = e
            .iter()
            .enumerate()
            .map(|(j, &ej)| ej / (sp + j as f64 - 1.0))
            .collect();
        let em = (1..=EM_TERMS)
            .map(|i| {
                e.iter()
                    .enumerate()
                    .map(|(j, &ej)| ej * BERNOULLI_OVER_FACT[i - 1] * pochhammer(sp + j as f64, 2 * i as u32 - 1))
                    .collect()
            })
            .collect();
        Ok(Self { sp, e, integral, em })
    }

    fn dot(coeffs: &[Complex64], powers: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, r) in coeffs.iter().zip(powers).rev() {
            acc += c * r;
        }
        acc
    }

    fn powers(&self, y: f64, buf: &mut Vec<f64>) {
        buf.clear();
        let r = 1.0 / y;
        let mut v = 1.0;
        for _ in 0..self.e.len() {
            buf.push(v);
            v *= r;
        }
    }

    fn g(&self, y: f64, buf: &mut Vec<f64>) -> Complex64 {
        self.powers(y, buf);
        pow_pos(y, -self.sp) * Self::dot(&self.e, buf)
    }

    /// `sum_{m >= 0} g(x1 + m h)`.
    fn progression_sum(&self, x1: f64, h: f64, buf: &mut Vec<f64>) -> Complex64 {
        let direct = (EM_START - x1 / h).ceil().max(0.0) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..direct {
            acc += self.g(x1 + m as f64 * h, buf);
        }
        let y = x1 + direct as f64 * h;
        self.powers(y, buf);
        let rho = h / y;
        let mut rest = Self::dot(&self.integral, buf) / rho + 0.5 * Self::dot(&self.e, buf);
        let mut rho_pow = rho;
        for row in &self.em {
            rest += rho_pow * Self::dot(row, buf);
            rho_pow *= rho * rho;
        }
        acc + pow_pos(y, -self.sp) * rest
    }
}

/// Bounds on the omitted families `b > B` and `d > D` (raw, no prefactor).
struct OmittedBounds {
    fmax: f64,
    sigma: f64,
    sigma_p: f64,
    k: f64,
    z_b0: f64,
    z_b1: f64,
    z_d0: f64,
    z_d1: f64,
    z_sp: f64,
}

fn zeta_real(x: f64) -> f64 {
    if x <= 1.0 {
        f64::INFINITY
    } else {
        zeta(Complex64::new(x, 0.0)).map(|z| z.re).unwrap_or(f64::INFINITY)
    }
}

impl OmittedBounds {
    fn new(p: &ParamPoint) -> Result<Self> {
        let k = p.k() as f64;
        let (s, sp) = (p.s(), p.sprime());
        let fmax = gauss_2f1(
            Complex64::new(s.norm(), 0.0),
            Complex64::new((k - sp).norm(), 0.0),
            Complex64::new(k, 0.0),
            0.5,
        )?
        .re;
        let (sigma, sigma_p) = (s.re, sp.re);
        Ok(Self {
            fmax,
            sigma,
            sigma_p,
            k,
            z_b0: zeta_real(k - sigma - sigma_p),
            z_b1: zeta_real(k + 1.0 - sigma - sigma_p),
            z_d0: zeta_real(sigma - sigma_p),
            z_d1: zeta_real(sigma - sigma_p + 1.0),
            z_sp: zeta_real(sigma_p),
        })
    }

    /// All terms with `b > B`.
    fn b(&self, b: f64) -> f64 {
        let s = self.sigma;
        self.fmax * self.z_sp * (b.powf(-s) * self.z_b0 + b.powf(1.0 - s) * self.z_b1 / (s - 1.0))
    }

    /// All terms with `d > D`.
    fn d(&self, d: f64) -> f64 {
        let (s, k) = (self.sigma, self.k);
        self.fmax * self.z_sp * (d.powf(s - k) * self.z_d0 + d.powf(1.0 + s - k) * self.z_d1 / (k - s - 1.0))
    }

    /// Envelope `|S_N| <= zeta(Re(s-s')) zeta(k - Re(s+s')) Fmax N^{-Re s'}`.
    fn shell_envelope(&self, n: u64) -> f64 {
        self.fmax * self.z_d0 * zeta_real(self.k - self.sigma - self.sigma_p) * (n as f64).powf(-self.sigma_p)
    }
}

/// Smallest integer `m >= 1` with `bound(m) <= target`, or `None`.
fn smallest_cutoff(bound: impl Fn(f64) -> f64, target: f64, cap: f64) -> Option<u64> {
    if !bound(cap).is_finite() || bound(cap) > target {
        return None;
    }
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while bound(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi as u64)
}

/// Inverse of `d` modulo `b` (`gcd(b, d) = 1`).
fn inverse_mod(d: u64, b: u64) -> u64 {
    if b == 1 {
        return 0;
    }
    let e = (d as i64).extended_gcd(&(b as i64));
    e.x.rem_euclid(b as i64) as u64
}

/// The matrix sum with an explicit family rectangle `b <= b_max`, `d <= d_max`.
/// The truncation error may be infinite outside the theorem's hypotheses.
pub fn hyper_sum_with_families(p: &ParamPoint, n_max: u64, b_max: u64, d_max: u64) -> Result<HyperSum> {
    if n_max < 2 {
        return Err(Error::Domain(format!("n_max must be >= 2, got {n_max}")));
    }
    let pref = hyper_prefactor(p);
    if pref == Complex64::new(0.0, 0.0) {
        return Ok(HyperSum::zero(n_max));
    }
    let tables = PowTables::new(p, n_max);
    let mut shells = ComplexSum::new();
    let mut abs_total = 0.0;
    for n in 2..=n_max {
        let v = tables.shell(p, n)?;
        abs_total += v.norm();
        shells.add(v);
    }

    let series = FamilySeries::new(p, (n_max + 1) as f64)?;
    let (s, sp, k) = (p.s(), p.sprime(), p.k() as f64);
    let wb: Vec<Complex64> = (0..=b_max).map(|b| if b == 0 { sp } else { pow_pos(b as f64, sp - s) }).collect();
    let mut tail = ComplexSum::new();
    let mut buf = Vec::with_capacity(series.e.len());
    for d in 1..=d_max {
        let wd = pow_pos(d as f64, s + sp - k);
        let mut row = ComplexSum::new();
        let a_min = n_max / d + 1;
        for b in 1..=b_max {
            if b.gcd(&d) != 1 {
                continue;
            }
            let a0 = inverse_mod(d % b, b);
            let a = a_min + (a0 + b - a_min % b) % b;
            let x1 = (d * a) as f64;
            let h = (b * d) as f64;
            let v = wb[b as usize] * series.progression_sum(x1, h, &mut buf);
            abs_total += v.norm() * wd.norm();
            row.add(v);
        }
        tail.add(wd * row.value());
    }

    let bounds = OmittedBounds::new(p)?;
    let omitted = bounds.b(b_max as f64) + bounds.d(d_max as f64);
    let rounding = 16.0 * f64::EPSILON * abs_total;
    let raw = shells.value() + tail.value();
    Ok(HyperSum {
        value: pref * raw,
        raw,
        shells: shells.value(),
        tail: tail.value(),
        trunc_error: pref.norm() * (omitted + rounding),
        n_max,
        b_max,
        d_max,
    })
}

/// The third term of the identity with the family rectangle chosen so the
/// omitted-family bound meets `budget` (`abs_tol`, or `rel_tol` relative to
/// the shell part).
pub fn hyper_sum(p: &ParamPoint, n_max: u64, budget: &AccuracyBudget) -> Result<HyperSum> {
    let pref = hyper_prefactor(p);
    if pref == Complex64::new(0.0, 0.0) {
        if n_max < 2 {
            return Err(Error::Domain(format!("n_max must be >= 2, got {n_max}")));
        }
        return Ok(HyperSum::zero(n_max));
    }
    let bounds = OmittedBounds::new(p)?;
    let scale = (pref * shell_sum(p, 2)?).norm();
    let target = budget.abs_tol.max(budget.rel_tol * scale) / pref.norm();
    // half of the allowance for each direction, leaving room for rounding
    let half = 0.45 * target;
    let cap = MAX_FAMILY_AREA.sqrt() * 10.0;
    let b_max = smallest_cutoff(|b| bounds.b(b), half, cap);
    let d_max = smallest_cutoff(|d| bounds.d(d), half, cap);
    let (Some(b_max), Some(d_max)) = (b_max, d_max) else {
        return Err(Error::accuracy(
            "matrix-sum family bound",
            pref.norm() * (bounds.b(cap) + bounds.d(cap)),
            target * pref.norm(),
        ));
    };
    if (b_max as f64) * (d_max as f64) > MAX_FAMILY_AREA {
        return Err(Error::accuracy(
            format!("matrix-sum family rectangle {b_max} x {d_max}"),
            pref.norm() * 2.0 * half,
            target * pref.norm(),
        ));
    }
    let h = hyper_sum_with_families(p, n_max, b_max, d_max)?;
    if h.trunc_error > target * pref.norm() {
        return Err(Error::accuracy("matrix-sum truncation", h.trunc_error, target * pref.norm()));
    }
    Ok(h)
}

/// Envelope `|S_N| <= zeta(Re(s-s')) zeta(k - Re(s+s')) 2F1(|s|, |k-s'|; k; 1/2) N^{-Re s'}`
/// for the raw shell sums.
pub fn shell_envelope(p: &ParamPoint, n: u64) -> Result<f64> {
    Ok(OmittedBounds::new(p)?.shell_envelope(n))
}

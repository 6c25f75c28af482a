//! Numerical quadrature used by the oracles and the Petersson norm.
//!
//! * [`tanh_sinh`]: finite intervals, tolerates integrable endpoint singularities.
//! * [`integrate_to_infinity`]: `[a, inf)` by the exp-sinh transform.
//! * [`integrate_real_line`]: `(-inf, inf)` split at zero.
//! * [`gauss_kronrod`]: adaptive G7/K15 bisection for smooth integrands.
//! * [`gauss_legendre`]: fixed nodes and weights.
//!
//! Stopping rules compare the error estimate with `tol * L1`, where `L1`
//! approximates `int |f|`, so integrals that cancel to zero still terminate.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::sum::{ComplexSum, KahanSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    /// Approximation of `int |f|`.
    pub l1: f64,
    pub evaluations: usize,
}

const MAX_LEVEL: usize = 12;

/// One trapezoid level of a double-exponential rule. `map(t)` returns the
/// abscissa and the Jacobian; `None` once the abscissa leaves the
/// representable range.
fn de_level<F, M>(f: &F, map: &M, h: f64, offset: f64, step: f64, t_max: f64, evals: &mut usize) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
    M: Fn(f64) -> Option<(f64, f64)>,
{
    let mut acc = ComplexSum::new();
    let mut l1 = KahanSum::new();
    for dir in [1.0, -1.0] {
        let mut k = 0usize;
        let mut small_run = 0;
        loop {
            let t = dir * (offset + k as f64 * step);
            if t.abs() > t_max {
                break;
            }
            if dir < 0.0 && t == 0.0 {
                k += 1;
                continue;
            }
            let Some((x, jac)) = map(t) else { break };
            let v = f(x) * jac;
            *evals += 1;
            let m = v.norm();
            if !m.is_finite() {
                break;
            }
            acc.add(v);
            l1.add(m);
            if m <= 1e-20 * l1.value() {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
            k += 1;
        }
    }
    (acc.value() * h, l1.value() * h)
}

fn de_integrate<F, M>(f: F, map: M, t_max: f64, tol: f64, what: &str) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
    M: Fn(f64) -> Option<(f64, f64)>,
{
    let mut evals = 0;
    let mut h = 0.5;
    let (mut sum, mut l1) = de_level(&f, &map, 1.0, 0.0, h, t_max, &mut evals);
    sum *= h;
    l1 *= h;
    let mut prev_diff = f64::INFINITY;
    for _ in 1..MAX_LEVEL {
        // refine: only the new midpoints are evaluated
        let (mid, mid_l1) = de_level(&f, &map, 1.0, h / 2.0, h, t_max, &mut evals);
        h /= 2.0;
        let new_sum = sum * 0.5 + mid * h;
        let new_l1 = l1 * 0.5 + mid_l1 * h;
        let diff = (new_sum - sum).norm();
        sum = new_sum;
        l1 = new_l1;
        // quadratic convergence: the next correction is about diff^2/prev
        let est = if prev_diff.is_finite() && prev_diff > 0.0 {
            (diff * diff / prev_diff).max(diff * 1e-3)
        } else {
            diff
        };
        prev_diff = diff;
        if est <= tol * l1 || l1 == 0.0 {
            return Ok(QuadResult {
                value: sum,
                error: est.max(f64::EPSILON * l1),
                l1,
                evaluations: evals,
            });
        }
    }
    Err(Error::accuracy(
        format!("{what} quadrature"),
        prev_diff,
        tol * l1,
    ))
}

/// Tanh-sinh quadrature on `[a, b]`.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let half = 0.5 * (b - a);
    let map = move |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (ch * ch);
        // distance to the nearer endpoint without cancellation
        let d = half * 2.0 / (1.0 + (2.0 * u.abs()).exp());
        let x = if t >= 0.0 { b - d } else { a + d };
        if d <= 0.0 || x <= a || x >= b || w == 0.0 {
            None
        } else {
            Some((x, w))
        }
    };
    de_integrate(f, map, 4.0, tol, "tanh-sinh")
}

/// Exp-sinh quadrature on `[a, inf)`. The integrand must decay at least
/// algebraically faster than `1/x`.
pub fn integrate_to_infinity<F>(f: F, a: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let map = move |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        if u.abs() > 700.0 {
            return None;
        }
        let e = u.exp();
        let x = a + e;
        let w = FRAC_PI_2 * t.cosh() * e;
        if e == 0.0 || !x.is_finite() || x == a {
            None
        } else {
            Some((x, w))
        }
    };
    de_integrate(f, map, 6.5, tol, "exp-sinh")
}

/// `int_{-inf}^{inf} f`, evaluated as two half-line integrals.
pub fn integrate_real_line<F>(f: F, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let right = integrate_to_infinity(&f, 0.0, tol)?;
    let left = integrate_to_infinity(|t| f(-t), 0.0, tol)?;
    Ok(QuadResult {
        value: right.value + left.value,
        error: right.error + left.error,
        l1: right.l1 + left.l1,
        evaluations: right.evaluations + left.evaluations,
    })
}

// Kronrod 15-point nodes (nonnegative half) and weights, Gauss 7 weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    l1: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        kron += (f1 + f2) * WGK[j];
        l1 += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    Segment {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).norm(),
        l1: l1 * h.abs(),
    }
}

/// Adaptive Gauss-Kronrod (G7/K15) with global bisection of the worst
/// segment.
pub fn gauss_kronrod<F>(f: F, a: f64, b: f64, tol: f64, max_segments: usize) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let mut heap = BinaryHeap::new();
    heap.push(gk15(&f, a, b));
    let mut evals = 15;
    loop {
        let (value, error, l1) = totals(&heap);
        if error <= tol * l1 || l1 == 0.0 {
            return Ok(QuadResult {
                value,
                error,
                l1,
                evaluations: evals,
            });
        }
        if heap.len() >= max_segments {
            return Err(Error::accuracy("Gauss-Kronrod quadrature", error, tol * l1));
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        heap.push(gk15(&f, worst.a, m));
        heap.push(gk15(&f, m, worst.b));
        evals += 30;
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (Complex64, f64, f64) {
    // sort by left endpoint so the reduction order is fixed
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut v = ComplexSum::new();
    let mut e = KahanSum::new();
    let mut l = KahanSum::new();
    for s in segs {
        v.add(s.value);
        e.add(s.error);
        l.add(s.l1);
    }
    (v.value(), e.value(), l.value())
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

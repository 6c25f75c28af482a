//! Riemann and Hurwitz zeta functions.
//!
//! Two independent routes for the Riemann zeta function:
//! Borwein's eta acceleration (with the functional equation for
//! `Re s < 1/2`) and Euler-Maclaurin summation. [`zeta`] picks a route;
//! the dual-method check compares the other two entry points.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{gamma, pow_pos};
use crate::error::{Error, Result};
use crate::sum::ComplexSum;

/// `B_{2j} / (2j)!` for `j = 1..=30`.
pub(crate) const BERNOULLI_OVER_FACT: [f64; 30] = [
    0.083_333_333_333_333_333_333,
    -0.001_388_888_888_888_888_888_9,
    0.000_033_068_783_068_783_068_783,
    -8.267_195_767_195_767_195_8e-7,
    2.087_675_698_786_809_897_9e-8,
    -5.284_190_138_687_493_184_8e-10,
    1.338_253_653_068_467_883_3e-11,
    -3.389_680_296_322_582_866_8e-13,
    8.586_062_056_277_844_564_1e-15,
    -2.174_868_698_558_061_873e-16,
    5.509_002_828_360_229_515_2e-18,
    -1.395_446_468_581_252_334_1e-19,
    3.534_707_039_629_467_471_7e-21,
    -8.953_517_427_037_546_850_4e-23,
    2.267_952_452_337_683_060_3e-24,
    -5.744_790_668_872_202_445_3e-26,
    1.455_172_475_614_864_901_9e-27,
    -3.685_994_940_665_310_178_2e-29,
    9.336_734_257_095_044_672e-31,
    -2.365_022_415_700_629_934_6e-32,
    5.990_671_762_482_134_304_7e-34,
    -1.517_454_884_468_290_261_7e-35,
    3.843_758_125_454_188_232_2e-37,
    -9.736_353_072_646_691_035_3e-39,
    2.466_247_044_200_680_957_1e-40,
    -6.247_076_741_820_743_693_1e-42,
    1.582_403_024_464_491_429_8e-43,
    -4.008_273_685_948_935_968_5e-45,
    1.015_307_585_556_955_631_2e-46,
    -2.571_804_158_241_871_749_9e-48,
];

fn check_pole(s: Complex64) -> Result<()> {
    if s.re == 1.0 && s.im == 0.0 {
        return Err(Error::Pole {
            function: "zeta",
            at: s.to_string(),
        });
    }
    Ok(())
}

/// Hurwitz zeta `sum_{n>=0} (n + q)^{-s}` for `q > 0`, `s != 1`, by
/// Euler-Maclaurin summation with a shifted start.
pub fn hurwitz_zeta(s: Complex64, q: f64) -> Result<Complex64> {
    check_pole(s)?;
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("hurwitz_zeta needs q > 0, got {q}")));
    }
    // shift so that N + q dominates |s|; the Bernoulli remainder then
    // shrinks like (|s + 2p| / (2 pi (N + q)))^{2p}
    let target = 12.0 + s.norm();
    let n_direct = if q >= target { 0 } else { (target - q).ceil() as usize };
    let mut acc = ComplexSum::new();
    for n in 0..n_direct {
        acc.add(pow_pos(n as f64 + q, -s));
    }
    let big = n_direct as f64 + q;
    let big_pow = pow_pos(big, -s);
    acc.add(big * big_pow / (s - 1.0));
    acc.add(0.5 * big_pow);
    // rising product (s)_{2j-1} times big^{-s-2j+1}
    let mut rising = s;
    let mut power = big_pow / big;
    let inv_big2 = 1.0 / (big * big);
    let mut last = f64::INFINITY;
    for (j, &b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = b * rising * power;
        let mag = term.norm();
        acc.add(term);
        if mag <= 1e-18 * acc.value().norm() || mag > last {
            break;
        }
        last = mag;
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power *= inv_big2;
    }
    Ok(acc.value())
}

/// Riemann zeta by Euler-Maclaurin (valid for every `s != 1`).
pub fn zeta_euler_maclaurin(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

fn borwein_degree(s: Complex64) -> usize {
    (40 + 2 * s.im.abs().ceil() as usize).min(140)
}

/// Dirichlet eta by Borwein's accelerated alternating series.
fn eta_borwein(s: Complex64) -> Complex64 {
    let n = borwein_degree(s);
    let nf = n as f64;
    // d_k / d_n accumulated from the ratio of consecutive summands
    let mut partial = Vec::with_capacity(n + 1);
    let mut term = 1.0;
    let mut run = 0.0;
    for i in 0..=n {
        run += term;
        partial.push(run);
        let fi = i as f64;
        term *= 4.0 * (nf + fi) * (nf - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0));
    }
    let dn = partial[n];
    let mut acc = ComplexSum::new();
    for (k, &dk) in partial.iter().take(n).enumerate() {
        let w = (dk - dn) / dn;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * w * pow_pos(k as f64 + 1.0, -s));
    }
    -acc.value()
}

/// Riemann zeta through the alternating eta series, reflected for
/// `Re s < 1/2`.
pub fn zeta_alternating(s: Complex64) -> Result<Complex64> {
    check_pole(s)?;
    if s.re < 0.5 {
        let sp = 1.0 - s;
        return Ok(reflection_factor(s)? * zeta_alternating(sp)?);
    }
    let denom = 1.0 - pow_pos(2.0, 1.0 - s);
    if denom.norm() == 0.0 {
        return Err(Error::Domain(format!("eta route degenerate at s = {s}")));
    }
    Ok(eta_borwein(s) / denom)
}

/// `2^s pi^{s-1} sin(pi s / 2) Gamma(1 - s)`.
fn reflection_factor(s: Complex64) -> Result<Complex64> {
    Ok(pow_pos(2.0, s) * pow_pos(PI, s - 1.0) * (s * (PI / 2.0)).sin() * gamma(1.0 - s)?)
}

/// Riemann zeta function, `s != 1`.
///
/// Uses the eta acceleration for `Re s >= 1/2` and reflection below, except
/// near `s = 0` and near zeros of `1 - 2^{1-s}` where Euler-Maclaurin is
/// used instead.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    check_pole(s)?;
    if s.re >= 0.5 {
        let denom = 1.0 - pow_pos(2.0, 1.0 - s);
        if denom.norm() < 0.1 {
            return zeta_euler_maclaurin(s);
        }
        Ok(eta_borwein(s) / denom)
    } else if s.norm() < 0.5 || (1.0 - pow_pos(2.0, s)).norm() < 0.1 {
        zeta_euler_maclaurin(s)
    } else {
        Ok(reflection_factor(s)? * zeta(1.0 - s)?)
    }
}

/// Zeros of `1 - 2^{1-s}` sit at `1 + 2 pi i m / ln 2`.
#[cfg(test)]
fn eta_factor_zero(m: i32) -> Complex64 {
    Complex64::new(1.0, 2.0 * PI * m as f64 / std::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{c, real};

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn classical_values() {
        let z2 = zeta(real(2.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-15, "{z2}");
        assert!((z2.re - 1.644_934_066_848_23).abs() < 1e-13);
        let z0 = zeta(real(0.0)).unwrap();
        assert!((z0 - real(-0.5)).norm() < 1e-15, "{z0}");
        let z4 = zeta(real(4.0)).unwrap();
        assert!((z4.re - PI.powi(4) / 90.0).abs() < 1e-15);
        let zm1 = zeta(real(-1.0)).unwrap();
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-14, "{zm1}");
        assert!(zeta(real(-2.0)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn pole_is_reported() {
        assert!(matches!(zeta(real(1.0)), Err(Error::Pole { .. })));
        assert!(matches!(zeta_euler_maclaurin(real(1.0)), Err(Error::Pole { .. })));
        assert!(zeta_alternating(real(1.0)).is_err());
    }

    #[test]
    fn dual_methods_agree_at_3_plus_4i() {
        let s = c(3.0, 4.0);
        let a = zeta_alternating(s).unwrap();
        let b = zeta_euler_maclaurin(s).unwrap();
        assert!(rel(a, b) < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn dual_methods_agree_on_grid() {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for i in 0..10 {
            for j in 0..10 {
                let s = c(-1.9 + 0.65 * i as f64, -19.5 + 4.3 * j as f64);
                if (s - 1.0).norm() < 0.05 || (1.0 - pow_pos(2.0, 1.0 - s)).norm() < 0.05 {
                    continue;
                }
                let a = zeta_alternating(s).unwrap();
                let b = zeta_euler_maclaurin(s).unwrap();
                let e = rel(a, b);
                // left of the line the direct part of Euler-Maclaurin sums
                // growing terms n^{-s}; its rounding error scales with their size
                let n = 12.0 + s.norm();
                let cond = (n.powf(1.0 - s.re) / ((1.0 - s.re) * a.norm())).max(1.0);
                let e = e / cond;
                worst = worst.max(e);
                count += 1;
                assert!(e < 1e-12, "s = {s}: {a} vs {b} (rel {e:e}, cond {cond:.1})");
            }
        }
        assert!(count >= 95, "{count}");
        assert!(worst < 1e-12);
    }

    #[test]
    fn hurwitz_reduces_to_riemann_minus_head() {
        let s = c(2.5, 1.5);
        let full = zeta(s).unwrap();
        let shifted = hurwitz_zeta(s, 4.0).unwrap();
        let head: Complex64 = (1..4).map(|n| pow_pos(n as f64, -s)).sum();
        assert!(rel(shifted + head, full) < 1e-14);
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let half = hurwitz_zeta(s, 0.5).unwrap();
        assert!(rel(half, (pow_pos(2.0, s) - 1.0) * full) < 1e-13);
    }

    #[test]
    fn hurwitz_large_q_matches_integral_asymptotics() {
        // zeta(s, q) ~ q^{1-s}/(s-1) + q^{-s}/2 for huge q
        let s = c(1.4, 0.0);
        let q = 1e8;
        let v = hurwitz_zeta(s, q).unwrap();
        let approx = pow_pos(q, 1.0 - s) / (s - 1.0) + 0.5 * pow_pos(q, -s);
        assert!(rel(v, approx) < 1e-15);
    }

    #[test]
    fn route_switch_near_eta_factor_zero() {
        let s = eta_factor_zero(1) + c(0.01, 0.0);
        let a = zeta(s).unwrap();
        let b = zeta_euler_maclaurin(s).unwrap();
        assert_eq!(a, b);
    }
}

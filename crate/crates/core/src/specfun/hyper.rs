//! Gauss hypergeometric series on `0 <= z <= 1/2`.

use num_complex::Complex64;

use super::{as_integer, real, AccuracyBudget};
use crate::error::{Error, Result};
use crate::sum::ComplexSum;

/// `2F1(a, b; c; z)` with the default budget (`abs_tol = 1e-16`).
pub fn gauss_2f1(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    let budget = AccuracyBudget::new(1e-16, 1e-16, 10_000)?;
    gauss_2f1_with(a, b, c, z, &budget)
}

/// Power series with a rigorous geometric tail bound.
///
/// For `m > |c|` every later term ratio is bounded by
/// `rho_m = z (m + |a|)(m + max(|b|, 1)) / ((m - |c|)(m + 1))`, so once
/// `rho_m < 1` the tail after term `m` is at most `|t_m| rho_m / (1 - rho_m)`.
/// Summation stops when that bound drops below `abs_tol`.
pub fn gauss_2f1_with(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: f64,
    budget: &AccuracyBudget,
) -> Result<Complex64> {
    if matches!(as_integer(c), Some(n) if n <= 0) {
        return Err(Error::Domain(format!("2F1 with c = {c} a nonpositive integer")));
    }
    if !(0.0..=0.5).contains(&z) {
        return Err(Error::Domain(format!("2F1 restricted to 0 <= z <= 1/2, got {z}")));
    }
    if z == 0.0 {
        return Ok(real(1.0));
    }
    let (na, nb, nc) = (a.norm(), b.norm().max(1.0), c.norm());
    let mut term = real(1.0);
    let mut acc = ComplexSum::new();
    acc.add(term);
    for m in 0..budget.max_terms {
        let mf = m as f64;
        term *= (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)) * z;
        acc.add(term);
        let next = mf + 1.0;
        if next > nc {
            let rho = z * (next + na) * (next + nb) / ((next - nc) * (next + 1.0));
            if rho < 1.0 {
                let tail = term.norm() * rho / (1.0 - rho);
                if tail < budget.abs_tol {
                    return Ok(acc.value());
                }
            }
        }
    }
    Err(Error::accuracy(
        format!("2F1({a}, {b}; {c}; {z}) series"),
        term.norm(),
        budget.abs_tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use crate::specfun::{c as cx, gamma, pow_pos};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Euler integral `Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt`.
    fn euler_integral(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Complex64 {
        let norm = gamma(c).unwrap() / (gamma(b).unwrap() * gamma(c - b).unwrap());
        let f = |t: f64| pow_pos(t, b - 1.0) * pow_pos(1.0 - t, c - b - 1.0) * pow_pos(1.0 - z * t, -a);
        norm * quad::tanh_sinh(f, 0.0, 1.0, 1e-12).unwrap().value
    }

    #[test]
    fn constant_term() {
        assert_eq!(gauss_2f1(cx(2.0, 1.0), cx(-0.5, 3.0), cx(4.0, 0.0), 0.0).unwrap(), real(1.0));
    }

    #[test]
    fn two_log_two() {
        let v = gauss_2f1(real(1.0), real(1.0), real(2.0), 0.5).unwrap();
        assert!((v.re - 2.0 * std::f64::consts::LN_2).abs() < 1e-15, "{v}");
        assert!((v.re - 1.386_294_361_119_89).abs() < 1e-13);
    }

    #[test]
    fn terminating_series() {
        // 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
        let (b, c, z) = (real(3.0), real(5.0), 0.25);
        let v = gauss_2f1(real(-2.0), b, c, z).unwrap();
        let exact = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!((v - exact).norm() < 1e-16);
    }

    #[test]
    fn theorem_parameters_match_euler_integral() {
        let a = cx(3.6, 0.7);
        let b = cx(6.6, 0.7);
        let c = real(8.0);
        let series = gauss_2f1(a, b, c, 0.5).unwrap();
        let integral = euler_integral(a, b, c, 0.5);
        assert!((series - integral).norm() < 1e-10, "{series} vs {integral}");
    }

    #[test]
    fn random_draws_match_euler_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let b = cx(rng.gen_range(0.3..4.0), rng.gen_range(-1.0..1.0));
            let c = cx(b.re + rng.gen_range(0.5..4.0), rng.gen_range(-1.0..1.0));
            let a = cx(rng.gen_range(-3.0..6.0), rng.gen_range(-2.0..2.0));
            let z = rng.gen_range(0.01..0.5);
            let series = gauss_2f1(a, b, c, z).unwrap();
            let integral = euler_integral(a, b, c, z);
            let err = (series - integral).norm() / series.norm().max(1.0);
            assert!(err < 1e-9, "a={a} b={b} c={c} z={z}: {series} vs {integral}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(gauss_2f1(real(1.0), real(1.0), real(-3.0), 0.25), Err(Error::Domain(_))));
        assert!(matches!(gauss_2f1(real(1.0), real(1.0), real(2.0), 0.75), Err(Error::Domain(_))));
        assert!(gauss_2f1(real(1.0), real(1.0), real(2.0), -0.1).is_err());
    }

    #[test]
    fn reports_nonconvergence() {
        let b = AccuracyBudget::new(1e-16, 1e-16, 3).unwrap();
        assert!(matches!(
            gauss_2f1_with(real(5.0), real(5.0), real(2.0), 0.5, &b),
            Err(Error::Accuracy { .. })
        ));
    }
}

//! Complex Gamma via the Lanczos approximation (g = 7, n = 9) and reflection.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{as_integer, c, is_finite, real};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
// ln sqrt(2 pi)
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_pole(z: Complex64) -> Result<()> {
    if let Some(n) = as_integer(z) {
        if n <= 0 {
            return Err(Error::Pole {
                function: "gamma",
                at: z.to_string(),
            });
        }
    }
    Ok(())
}

/// `(ln A(z), t)` for the Lanczos sum `A` and `t = z + g - 1/2`, valid for
/// `Re z >= 1/2`.
fn lanczos_parts(z: Complex64) -> (Complex64, Complex64) {
    let zm1 = z - 1.0;
    let mut a = real(LANCZOS_COEF[0]);
    for (i, &p) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += p / (zm1 + i as f64);
    }
    (a.ln(), zm1 + LANCZOS_G + 0.5)
}

/// Gamma function for complex arguments.
///
/// Relative accuracy is about 1e-14 on `0 < Re z <= 30, |Im z| <= 10`;
/// reflection handles `Re z < 1/2`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if let Some(n) = as_integer(z) {
        if (1..=23).contains(&n) {
            return Ok(real(super::factorial(n as u32 - 1)));
        }
    }
    let v = if z.re < 0.5 {
        let s = (z * PI).sin();
        PI / (s * gamma(1.0 - z)?)
    } else {
        let (ln_a, t) = lanczos_parts(z);
        ((z - 0.5) * t.ln() - t + LN_SQRT_2PI + ln_a).exp()
    };
    if !is_finite(v) {
        return Err(Error::Domain(format!("gamma({z}) is not representable")));
    }
    Ok(v)
}

/// A logarithm of Gamma. For `Re z >= 1/2` this is the branch that is
/// real on the positive axis and continuous in the right half-plane; for
/// `Re z < 1/2` it is `ln pi - ln sin(pi z) - ln Gamma(1 - z)` with principal
/// logarithms, so only `exp(log_gamma(z)) = gamma(z)` is guaranteed there.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        let s = (z * PI).sin();
        Ok(c(PI.ln(), 0.0) - s.ln() - log_gamma(1.0 - z)?)
    } else {
        let (ln_a, t) = lanczos_parts(z);
        Ok((z - 0.5) * t.ln() - t + LN_SQRT_2PI + ln_a)
    }
}

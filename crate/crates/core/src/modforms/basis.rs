//! Eisenstein series, the discriminant form and Victor-Miller bases.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{rat, QExpansion};
use crate::error::{Error, Result};

fn sigma(n: u64, power: u32) -> BigInt {
    let mut acc = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(power);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(power);
            }
        }
        d += 1;
    }
    acc
}

/// `E4 = 1 + 240 sum sigma_3(n) q^n` or `E6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein(k: u32, prec: usize) -> Result<QExpansion> {
    let (scale, power) = match k {
        4 => (240, 3),
        6 => (-504, 5),
        _ => {
            return Err(Error::Domain(format!(
                "eisenstein generator needs k in {{4, 6}}, got {k}"
            )))
        }
    };
    if prec == 0 {
        return Err(Error::Domain("precision must be >= 1".into()));
    }
    let coeffs = (0..=prec as u64).map(|n| {
        if n == 0 {
            BigInt::from(1)
        } else {
            sigma(n, power) * scale
        }
    });
    Ok(QExpansion::from_integers(k, coeffs))
}

/// `Delta = (E4^3 - E6^2) / 1728`.
pub fn delta(prec: usize) -> Result<QExpansion> {
    let e4 = eisenstein(4, prec)?;
    let e6 = eisenstein(6, prec)?;
    Ok(e4.pow(3).sub(&e6.pow(2))?.scale(&(rat(1) / rat(1728))))
}

/// Dimension of the space of level-one cusp forms of weight `k`.
pub fn dim_cusp(k: i64) -> usize {
    if k < 12 || k % 2 != 0 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

/// Echelonized basis `g_i = q^i + O(q^{d+1})`, `i = 1..=d`, built from the
/// monomials `Delta^j E6^b E4^a` with `12 j + 6 b + 4 a = k`.
pub fn victor_miller_basis(k: u32, prec: usize) -> Result<Vec<QExpansion>> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::Domain(format!("weight must be even and >= 4, got {k}")));
    }
    let d = dim_cusp(k as i64);
    if d == 0 {
        return Ok(Vec::new());
    }
    if prec < d {
        return Err(Error::Precision {
            needed: d,
            available: prec,
        });
    }
    let dl = delta(prec)?;
    let e4 = eisenstein(4, prec)?;
    let e6 = eisenstein(6, prec)?;
    let mut forms = Vec::with_capacity(d);
    for j in 1..=d as u32 {
        let rest = k - 12 * j;
        let b = if rest % 4 == 2 { 1 } else { 0 };
        let a = (rest - 6 * b) / 4;
        let mut f = dl.pow(j);
        if b == 1 {
            f = f.mul(&e6);
        }
        for _ in 0..a {
            f = f.mul(&e4);
        }
        debug_assert_eq!(f.weight(), k);
        forms.push(f);
    }
    // back substitution: clear q^i (i > j) from g_j using the reduced g_i
    for j in (0..d).rev() {
        for i in j + 1..d {
            let c = forms[j].coeff(i + 1).clone();
            if !c.is_zero() {
                let reduced = forms[j].sub(&forms[i].scale(&c))?;
                forms[j] = reduced;
            }
        }
    }
    Ok(forms)
}

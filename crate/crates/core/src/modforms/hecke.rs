//! Hecke operators on level-one q-expansions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::QExpansion;
use crate::error::{Error, Result};

/// `T_n f` with `a(m) = sum_{e | gcd(m, n)} e^{k-1} a_f(m n / e^2)`.
///
/// The result carries precision `floor(N / n)`.
pub fn hecke_operator(f: &QExpansion, n: usize) -> Result<QExpansion> {
    if n == 0 {
        return Err(Error::Domain("Hecke operator index must be positive".into()));
    }
    let target = f.prec() / n;
    if target == 0 {
        return Err(Error::Precision {
            needed: n,
            available: f.prec(),
        });
    }
    hecke_operator_to(f, n, target)
}

/// `T_n f` truncated at `target_prec`; needs `N >= n * target_prec`.
pub fn hecke_operator_to(f: &QExpansion, n: usize, target_prec: usize) -> Result<QExpansion> {
    if n == 0 || target_prec == 0 {
        return Err(Error::Domain("Hecke operator needs n >= 1 and target precision >= 1".into()));
    }
    let needed = n * target_prec;
    if f.prec() < needed {
        return Err(Error::Precision {
            needed,
            available: f.prec(),
        });
    }
    let km1 = f.weight() - 1;
    let coeffs = (0..=target_prec)
        .map(|m| {
            let g = if m == 0 { n } else { m.gcd(&n) };
            let mut acc = BigRational::zero();
            for e in (1..=g).filter(|e| g % e == 0) {
                let idx = m * n / (e * e);
                let a = f.coeff(idx);
                if !a.is_zero() {
                    acc += a * BigRational::from_integer(BigInt::from(e).pow(km1));
                }
            }
            acc
        })
        .collect();
    QExpansion::new(f.weight(), coeffs)
}

/// Matrix of `T_n` on an echelonized basis: row `i` holds the coordinates
/// of `T_n g_i`, read off from the coefficients of `q^1..q^d`.
pub fn hecke_matrix(basis: &[QExpansion], n: usize) -> Result<Vec<Vec<BigRational>>> {
    let d = basis.len();
    basis
        .iter()
        .map(|g| {
            let t = hecke_operator_to(g, n, d)?;
            Ok((1..=d).map(|j| t.coeff(j).clone()).collect())
        })
        .collect()
}

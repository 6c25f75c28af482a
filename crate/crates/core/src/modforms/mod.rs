//! Level-one modular forms as exact q-expansions.
//!
//! Everything up to the eigenbasis step is exact rational arithmetic; the
//! eigenforms themselves carry `f64` coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod basis;
mod eigen;
mod hecke;

pub use basis::{delta, dim_cusp, eisenstein, victor_miller_basis};
pub use eigen::{eigenbasis, eigenbasis_from_basis, Eigenform, NumericForm};
pub use hecke::{hecke_matrix, hecke_operator, hecke_operator_to};

/// Default number of coefficients carried by expansions.
pub const DEFAULT_PREC: usize = 64;

/// Truncated q-series `a(0) + a(1) q + ... + a(N) q^N` of a level-one
/// modular form of even weight `>= 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    weight: u32,
    coeffs: Vec<BigRational>,
}

impl QExpansion {
    /// `coeffs` holds `a(0)..=a(N)`.
    pub fn new(weight: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if weight < 4 || weight % 2 != 0 {
            return Err(Error::Domain(format!("weight must be even and >= 4, got {weight}")));
        }
        if coeffs.len() < 2 {
            return Err(Error::Domain("q-expansion needs precision N >= 1".into()));
        }
        Ok(Self { weight, coeffs })
    }

    pub(crate) fn from_integers(weight: u32, coeffs: impl IntoIterator<Item = BigInt>) -> Self {
        Self {
            weight,
            coeffs: coeffs.into_iter().map(BigRational::from_integer).collect(),
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Precision `N`: coefficients `a(0)..=a(N)` are known.
    pub fn prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn is_cusp_form(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// Keep `a(0)..=a(prec)`.
    pub fn truncate(&self, prec: usize) -> Result<Self> {
        if prec > self.prec() {
            return Err(Error::Precision {
                needed: prec,
                available: self.prec(),
            });
        }
        Ok(Self {
            weight: self.weight,
            coeffs: self.coeffs[..=prec].to_vec(),
        })
    }

    /// Truncated product; the weight adds and the precision is the smaller one.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let n = self.prec().min(other.prec());
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QExpansion {
            weight: self.weight + other.weight,
            coeffs: out,
        }
    }

    pub fn pow(&self, e: u32) -> QExpansion {
        assert!(e >= 1, "zero power has weight 0");
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn zip_with(&self, other: &QExpansion, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Result<QExpansion> {
        if self.weight != other.weight {
            return Err(Error::Domain(format!(
                "weights differ: {} vs {}",
                self.weight, other.weight
            )));
        }
        let n = self.prec().min(other.prec());
        Ok(QExpansion {
            weight: self.weight,
            coeffs: (0..=n).map(|i| f(&self.coeffs[i], &other.coeffs[i])).collect(),
        })
    }

    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &BigRational) -> QExpansion {
        QExpansion {
            weight: self.weight,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&QExpansionJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: QExpansionJson = serde_json::from_str(s).map_err(|e| Error::Serde(e.to_string()))?;
        raw.try_into()
    }
}

/// Wire form: `{"weight": k, "prec": N, "coeffs": ["num/den", ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QExpansionJson {
    pub weight: u32,
    pub prec: usize,
    pub coeffs: Vec<String>,
}

impl From<&QExpansion> for QExpansionJson {
    fn from(q: &QExpansion) -> Self {
        QExpansionJson {
            weight: q.weight,
            prec: q.prec(),
            coeffs: q
                .coeffs
                .iter()
                .map(|r| format!("{}/{}", r.numer(), r.denom()))
                .collect(),
        }
    }
}

impl TryFrom<QExpansionJson> for QExpansion {
    type Error = Error;

    fn try_from(raw: QExpansionJson) -> Result<Self> {
        if raw.coeffs.len() != raw.prec + 1 {
            return Err(Error::Serde(format!(
                "prec {} but {} coefficients",
                raw.prec,
                raw.coeffs.len()
            )));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        QExpansion::new(raw.weight, coeffs)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Serde(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Correctly scaled conversion even when numerator and denominator overflow
/// `f64` individually.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb - db - 60).max(0) as usize;
    let down = (db - nb + 60).max(0) as usize;
    let scaled = (r.numer() << down) / (r.denom() << shift);
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32 - down as i32)
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

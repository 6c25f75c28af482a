//! Serializable verification reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::{ParamPoint, TheoremTerms};

/// `[re, im]`.
pub type Pair = [f64; 2];

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub k: u32,
    pub s_re: f64,
    pub s_im: f64,
    pub sp_re: f64,
    pub sp_im: f64,
}

impl From<&ParamPoint> for ParamsJson {
    fn from(p: &ParamPoint) -> Self {
        Self {
            k: p.k(),
            s_re: p.s().re,
            s_im: p.s().im,
            sp_re: p.sprime().re,
            sp_im: p.sprime().im,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermsJson {
    pub t1: Pair,
    pub t2: Pair,
    pub t3: Pair,
    pub t4: Pair,
    pub total: Pair,
    pub trunc_error: f64,
}

impl From<&TheoremTerms> for TermsJson {
    fn from(t: &TheoremTerms) -> Self {
        Self {
            t1: pair(t.t1),
            t2: pair(t.t2),
            t3: pair(t.t3),
            t4: pair(t.t4),
            total: pair(t.total),
            trunc_error: t.trunc_error,
        }
    }
}

/// Per-point output: terms, the independently computed left-hand sides,
/// nonnegative residuals, the settings used and wall-clock timings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub params: ParamsJson,
    pub terms: TermsJson,
    pub lhs_spectral: Option<Pair>,
    pub lhs_quadrature: Option<Pair>,
    pub residuals: BTreeMap<String, f64>,
    pub settings: BTreeMap<String, serde_json::Value>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn new(p: &ParamPoint, terms: &TheoremTerms) -> Self {
        Self {
            params: p.into(),
            terms: terms.into(),
            lhs_spectral: None,
            lhs_quadrature: None,
            residuals: BTreeMap::new(),
            settings: BTreeMap::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    /// Records a residual; negative or NaN values are rejected.
    pub fn add_residual(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0) {
            return Err(Error::Domain(format!("residual {name} must be nonnegative, got {value}")));
        }
        self.residuals.insert(name.to_string(), value);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s).map_err(|e| Error::Serde(e.to_string()))?;
        if let Some((name, v)) = r.residuals.iter().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::Serde(format!("residual {name} = {v} is negative")));
        }
        Ok(r)
    }

    /// The same report with timings cleared, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        Self {
            timings_ms: BTreeMap::new(),
            ..self.clone()
        }
    }
}

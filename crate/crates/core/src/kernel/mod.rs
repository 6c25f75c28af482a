//! The identity engine: matrix sums, the four closed-form terms, both
//! evaluations of the left-hand side and the per-term oracles.
//!
//! Branch rule for the whole module: every complex power is principal,
//! `z^w = exp(w log z)` with `arg z` in `(-pi, pi]`; in particular
//! `t^{s'-1}` for `t < 0` is taken with `arg t = pi`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::specfun::{factorial, gamma};

mod hyper;
mod oracles;
mod spectral;
mod theorem;

pub use hyper::{
    hyper_prefactor, hyper_sum, hyper_sum_with_families, shell_envelope, shell_sum, HyperSum,
};
pub use oracles::{
    a_term_direct_inverted, a_term_oracle, beta_integral_check, c_zero_term_oracle, lattice_sum,
    lipschitz_check, lipschitz_series, per_matrix_oracle, per_matrix_oracle_signed,
    upper_a_zero_integral, OraclePair,
};
pub use spectral::{
    kernel_value, mellin_lhs, mellin_lhs_unfolded, spectral_lhs, KernelMatrices, MellinLhs,
    SpectralData, SpectralValue,
};
pub use theorem::{
    average_lseries, corollary2_residual, rhs_from_hyper, rhs_theorem, rhs_theorem_with, t4_alternative_form,
    Corollary2, TheoremTerms, DEFAULT_N_MAX,
};

const SUM_TOL: f64 = 1e-12;

/// A violated hypothesis of the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    WeightNotEven { k: u32 },
    /// For `k < 8` no pair satisfies the hypotheses simultaneously.
    NoAdmissibleValues { k: u32 },
    SumNotReal { im: f64 },
    SumNotOddInteger { re: f64 },
    SumOutOfRange { sum: f64, k: u32 },
    RealPartGap { re_s: f64, re_sp: f64 },
    SOutOfStrip { re_s: f64, k: u32 },
    SPrimeOutOfStrip { re_sp: f64, k: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WeightNotEven { k } => write!(f, "k = {k} must be even"),
            Violation::NoAdmissibleValues { k } => write!(
                f,
                "no admissible values of (s, s') exist for k = {k}: the conditions force s+s' >= 5 and s+s' < k-1"
            ),
            Violation::SumNotReal { im } => write!(f, "s+s' must be real, Im(s+s') = {im}"),
            Violation::SumNotOddInteger { re } => {
                write!(f, "s+s' must be an odd integer, got {re}")
            }
            Violation::SumOutOfRange { sum, k } => {
                write!(f, "need 1 < s+s' < k-1 = {}, got {sum}", k - 1)
            }
            Violation::RealPartGap { re_s, re_sp } => {
                write!(f, "need Re s > Re s' + 1, got Re s = {re_s}, Re s' = {re_sp}")
            }
            Violation::SOutOfStrip { re_s, k } => {
                write!(f, "need 1 < Re s < {}, got {re_s}", k - 1)
            }
            Violation::SPrimeOutOfStrip { re_sp, k } => {
                write!(f, "need 1 < Re s' < {}, got {re_sp}", k - 1)
            }
        }
    }
}

/// A weight and a pair `(s, s')`.
///
/// Points built through [`ParamPoint::new`] satisfy all hypotheses; points
/// built with [`ParamPoint::unchecked`] are for diagnostics outside them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    k: u32,
    s: Complex64,
    sprime: Complex64,
    admissible: bool,
}

impl ParamPoint {
    pub fn new(k: u32, s: Complex64, sprime: Complex64) -> Result<Self> {
        validate_params(k, s, sprime)
    }

    /// Skips validation. Functions that need a hypothesis for convergence
    /// still report failures through their error estimates.
    pub fn unchecked(k: u32, s: Complex64, sprime: Complex64) -> Self {
        let admissible = violations(k, s, sprime).is_empty();
        Self {
            k,
            s,
            sprime,
            admissible,
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn sprime(&self) -> Complex64 {
        self.sprime
    }

    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    /// The same point with `s` and `s'` exchanged (not validated).
    pub fn swapped(&self) -> Self {
        Self::unchecked(self.k, self.sprime, self.s)
    }
}

fn violations(k: u32, s: Complex64, sp: Complex64) -> Vec<Violation> {
    let mut v = Vec::new();
    if k % 2 != 0 {
        v.push(Violation::WeightNotEven { k });
    }
    if k < 8 {
        v.push(Violation::NoAdmissibleValues { k });
    }
    let sum = s + sp;
    if sum.im.abs() >= SUM_TOL {
        v.push(Violation::SumNotReal { im: sum.im });
    }
    let nearest = sum.re.round();
    if (sum.re - nearest).abs() >= SUM_TOL || (nearest as i64).rem_euclid(2) != 1 {
        v.push(Violation::SumNotOddInteger { re: sum.re });
    }
    let kf = k as f64;
    if !(sum.re > 1.0 && sum.re < kf - 1.0) {
        v.push(Violation::SumOutOfRange { sum: sum.re, k });
    }
    if !(s.re > sp.re + 1.0) {
        v.push(Violation::RealPartGap {
            re_s: s.re,
            re_sp: sp.re,
        });
    }
    if !(s.re > 1.0 && s.re < kf - 1.0) {
        v.push(Violation::SOutOfStrip { re_s: s.re, k });
    }
    if !(sp.re > 1.0 && sp.re < kf - 1.0) {
        v.push(Violation::SPrimeOutOfStrip { re_sp: sp.re, k });
    }
    v
}

/// Checks every hypothesis and reports all violations at once.
pub fn validate_params(k: u32, s: Complex64, sprime: Complex64) -> Result<ParamPoint> {
    let v = violations(k, s, sprime);
    if v.is_empty() {
        Ok(ParamPoint {
            k,
            s,
            sprime,
            admissible: true,
        })
    } else {
        Err(Error::Validation(v))
    }
}

/// `gamma_k(s) = e^{pi i s / 2} Gamma(s) Gamma(k - s)`.
pub fn gamma_k(s: Complex64, k: u32) -> Result<Complex64> {
    let kc = Complex64::new(k as f64, 0.0);
    let rot = (Complex64::new(0.0, PI / 2.0) * s).exp();
    Ok(rot * gamma(s)? * gamma(kc - s)?)
}

/// `c_k = (-1)^{k/2} pi (k-2)! / 2^{k-2}`.
pub fn c_k(k: u32) -> f64 {
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * PI * factorial(k - 2) / 2f64.powi(k as i32 - 2)
}

/// `(a, b, c, d)` with positive entries and `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixQuadruple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl MatrixQuadruple {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 || d == 0 {
            return Err(Error::Domain("matrix entries must be positive".into()));
        }
        if a * d != b * c + 1 {
            return Err(Error::Domain(format!("ad - bc != 1 for ({a}, {b}, {c}, {d})")));
        }
        Ok(Self { a, b, c, d })
    }

    /// `ad`, which is at least 2.
    pub fn det_shell(&self) -> u64 {
        self.a * self.d
    }
}

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Every quadruple with `ad <= n_max`, in the fixed order: `N = ad`
/// ascending, then `a | N` ascending, then `c | N - 1` ascending.
pub fn enumerate_quadruples(n_max: u64) -> impl Iterator<Item = MatrixQuadruple> {
    (2..=n_max).flat_map(|n| {
        let cs = divisors(n - 1);
        divisors(n).into_iter().flat_map(move |a| {
            let d = n / a;
            cs.clone().into_iter().map(move |c| MatrixQuadruple {
                a,
                b: (n - 1) / c,
                c,
                d,
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn valid_points() {
        assert!(validate_params(8, c(3.6, 0.0), c(1.4, 0.0)).is_ok());
        assert!(validate_params(8, c(3.6, 0.7), c(1.4, -0.7)).is_ok());
        assert!(validate_params(14, c(7.3, 2.0), c(3.7, -2.0)).is_ok());
    }

    #[test]
    fn each_condition_is_named() {
        let cases: Vec<(u32, Complex64, Complex64, fn(&Violation) -> bool)> = vec![
            (8, c(3.6, 0.1), c(1.4, 0.0), |v| matches!(v, Violation::SumNotReal { .. })),
            (8, c(3.6, 0.0), c(1.5, 0.0), |v| matches!(v, Violation::SumNotOddInteger { .. })),
            (8, c(3.0, 0.0), c(1.0, 0.0), |v| matches!(v, Violation::SumNotOddInteger { .. })),
            (8, c(5.5, 0.0), c(1.5, 0.0), |v| matches!(v, Violation::SumOutOfRange { .. })),
            (8, c(2.8, 0.0), c(2.2, 0.0), |v| matches!(v, Violation::RealPartGap { .. })),
            (10, c(7.6, 0.0), c(-0.6, 0.0), |v| matches!(v, Violation::SPrimeOutOfStrip { .. })),
            (10, c(9.5, 0.0), c(-2.5, 0.0), |v| matches!(v, Violation::SOutOfStrip { .. })),
            (9, c(3.6, 0.0), c(1.4, 0.0), |v| matches!(v, Violation::WeightNotEven { .. })),
        ];
        for (k, s, sp, pred) in cases {
            match validate_params(k, s, sp) {
                Err(Error::Validation(v)) => assert!(v.iter().any(pred), "{k} {s} {sp}: {v:?}"),
                other => panic!("expected validation error, got {other:?}"),
            }
        }
    }

    #[test]
    fn low_weights_have_no_admissible_values() {
        for k in [4u32, 6] {
            for (s, sp) in [(c(2.0, 0.0), c(1.0, 0.0)), (c(3.6, 0.0), c(1.4, 0.0)), (c(2.5, 0.0), c(1.1, 0.0))] {
                let err = validate_params(k, s, sp).unwrap_err();
                let msg = err.to_string();
                assert!(msg.contains("no admissible values"), "{msg}");
            }
        }
    }

    #[test]
    fn tolerance_of_odd_integer_test() {
        assert!(validate_params(8, c(3.6 + 5e-13, 0.0), c(1.4, 0.0)).is_ok());
        assert!(validate_params(8, c(3.6 + 5e-12, 0.0), c(1.4, 0.0)).is_err());
        assert!(validate_params(8, c(3.6, 0.7 + 5e-12), c(1.4, -0.7)).is_err());
    }

    #[test]
    fn unchecked_records_admissibility() {
        assert!(ParamPoint::unchecked(8, c(3.6, 0.0), c(1.4, 0.0)).is_admissible());
        assert!(!ParamPoint::unchecked(12, c(7.5, 0.0), c(3.5, 0.0)).is_admissible());
    }

    #[test]
    fn gamma_k_and_c_k() {
        let g = gamma_k(c(2.0, 0.0), 12).unwrap();
        assert!((g - c(-362_880.0, 0.0)).norm() < 1e-9);
        assert!((c_k(12) - 3543.75 * PI).abs() < 1e-10);
        assert!((c_k(12) - 11_133.019).abs() < 1e-3);
        assert!((c_k(14) + PI * 479_001_600.0 / 4096.0).abs() < 1e-8);
        assert!(c_k(10) < 0.0 && c_k(8) > 0.0);
    }

    fn brute_force(n_max: u64) -> Vec<MatrixQuadruple> {
        let mut out = Vec::new();
        for a in 1..=n_max {
            for d in 1..=n_max / a {
                for b in 1..=n_max {
                    for c in 1..=n_max {
                        if a * d == b * c + 1 {
                            out.push(MatrixQuadruple { a, b, c, d });
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn enumeration_small_cases() {
        let two: Vec<_> = enumerate_quadruples(2).collect();
        assert_eq!(
            two,
            vec![
                MatrixQuadruple { a: 1, b: 1, c: 1, d: 2 },
                MatrixQuadruple { a: 2, b: 1, c: 1, d: 1 }
            ]
        );
        assert_eq!(enumerate_quadruples(3).count(), 6);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let dcount = |n: u64| divisors(n).len();
        for n_max in 2..=50u64 {
            let mut fast: Vec<_> = enumerate_quadruples(n_max).collect();
            let mut slow = brute_force(n_max);
            assert_eq!(fast.len(), slow.len(), "n_max = {n_max}");
            let formula: usize = (2..=n_max).map(|m| dcount(m) * dcount(m - 1)).sum();
            assert_eq!(fast.len(), formula);
            for q in &fast {
                assert!(MatrixQuadruple::new(q.a, q.b, q.c, q.d).is_ok());
            }
            fast.sort_by_key(|q| (q.a, q.b, q.c, q.d));
            slow.sort_by_key(|q| (q.a, q.b, q.c, q.d));
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn enumeration_order_is_fixed() {
        let v: Vec<_> = enumerate_quadruples(30).collect();
        for w in v.windows(2) {
            let (p, q) = (w[0], w[1]);
            assert!((p.det_shell(), p.a, p.c) < (q.det_shell(), q.a, q.c));
        }
    }

    #[test]
    fn quadruple_validation() {
        assert!(MatrixQuadruple::new(1, 1, 1, 2).is_ok());
        assert!(MatrixQuadruple::new(1, 1, 1, 3).is_err());
        assert!(MatrixQuadruple::new(0, 1, 1, 1).is_err());
    }
}

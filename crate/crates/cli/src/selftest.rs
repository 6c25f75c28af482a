//! Built-in invariant suite: a short, fixed battery of identities that
//! exercise every layer from the special functions to the full identity.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use lkernel::kernel::{
    beta_integral_check, c_zero_term_oracle, corollary2_residual, enumerate_quadruples, per_matrix_oracle,
    spectral_lhs, KernelMatrices, ParamPoint, SpectralData,
};
use lkernel::lfunc::{lstar, petersson_norm, LStarSeriesParams, PeterssonQuadParams};
use lkernel::modforms::{delta, NumericForm};
use lkernel::quad::tanh_sinh;
use lkernel::specfun::{gamma, gauss_2f1, pow_pos, zeta};
use lkernel::{AccuracyBudget, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::commands::eigenforms;
use crate::output::{emit, render};
use crate::{status, Cli, Format};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// A check returns its residual; it passes when the residual is below `tol`.
struct Check {
    name: &'static str,
    tol: f64,
    run: fn(&Cli) -> Result<f64>,
}

fn special_values(_: &Cli) -> Result<f64> {
    let g = rel(gamma(c(0.5, 0.0))?, c(PI.sqrt(), 0.0));
    let z = rel(zeta(c(2.0, 0.0))?, c(PI * PI / 6.0, 0.0));
    let h = rel(gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 0.5)?, c(2.0 * LN_2, 0.0));
    Ok(g.max(z).max(h))
}

fn quadrature(_: &Cli) -> Result<f64> {
    // int_0^1 x^{-1/2} dx = 2, endpoint singularity
    let q = tanh_sinh(|x: f64| c(x.powf(-0.5), 0.0), 0.0, 1.0, 1e-13)?;
    Ok((q.value - 2.0).norm() / 2.0)
}

fn hecke_relations(cli: &Cli) -> Result<f64> {
    // weight 24: two Galois-conjugate eigenforms
    let forms = eigenforms(cli, 24)?;
    let mut worst: f64 = 0.0;
    for f in &forms {
        let scale = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs());
        worst = worst.max(scale(f.a(6), f.a(2) * f.a(3)));
        worst = worst.max(scale(f.a(15), f.a(3) * f.a(5)));
        worst = worst.max(scale(f.a(4), f.a(2) * f.a(2) - 2f64.powi(23)));
        worst = worst.max(scale(f.a(9), f.a(3) * f.a(3) - 3f64.powi(23)));
        for p in [2usize, 3, 5, 7, 11, 13] {
            if f.a(p).abs() > 2.0 * (p as f64).powf(11.5) {
                return Ok(f64::INFINITY);
            }
        }
    }
    Ok(worst)
}

fn functional_equation(_: &Cli) -> Result<f64> {
    // L*(12 - s) from the incomplete-Gamma series against the absolutely
    // convergent Dirichlet series (2 pi)^{-s} Gamma(s) sum a(n) n^{-s} at s
    let f = NumericForm::from_expansion(&delta(64)?)?;
    let p = LStarSeriesParams::default();
    let mut worst: f64 = 0.0;
    for s in [c(14.0, 2.0), c(15.5, -4.0)] {
        let dirichlet: Complex64 = (1..=64).map(|n| f.a(n) * pow_pos(n as f64, -s)).sum();
        let direct = pow_pos(2.0 * PI, -s) * gamma(s)? * dirichlet;
        worst = worst.max(rel(lstar(&f, 12.0 - s, &p)?, direct));
    }
    Ok(worst)
}

fn enumeration_counts(_: &Cli) -> Result<f64> {
    // matrices with positive entries, determinant 1 and ad = N, by brute force
    let n_max = 40u64;
    let mut brute = vec![0u64; n_max as usize + 1];
    for a in 1..=n_max {
        for d in 1..=n_max / a {
            let bc = a * d - 1;
            if bc == 0 {
                continue;
            }
            brute[(a * d) as usize] += (1..=bc).filter(|b| bc % b == 0).count() as u64;
        }
    }
    let mut counted = vec![0u64; n_max as usize + 1];
    for q in enumerate_quadruples(n_max) {
        counted[q.det_shell() as usize] += 1;
    }
    Ok(if brute == counted { 0.0 } else { 1.0 })
}

fn fold_identity(_: &Cli) -> Result<f64> {
    // the truncated box is closed under V -> V S, so R(-1/z) = z^k R(z) exactly
    let mats = KernelMatrices::new(12);
    let (s, k) = (c(7.5, 0.3), 12);
    let mut worst: f64 = 0.0;
    for z in [c(0.1, 1.3), c(-0.4, 0.9), c(0.25, 2.0)] {
        let lhs = mats.sum(s, k, -1.0 / z)?;
        let rhs = z.powi(k as i32) * mats.sum(s, k, z)?;
        worst = worst.max(rel(lhs, rhs));
    }
    Ok(worst)
}

fn swap_symmetry(cli: &Cli) -> Result<f64> {
    let forms = eigenforms(cli, 12)?;
    let quad = PeterssonQuadParams::default();
    let norms = forms.iter().map(|f| petersson_norm(f, &quad)).collect::<Result<Vec<_>>>()?;
    let data = SpectralData::from_parts(12, forms, norms)?;
    let p = ParamPoint::unchecked(12, c(6.8, 1.2), c(4.2, -1.2));
    Ok(rel(spectral_lhs(&p, &data)?.value, spectral_lhs(&p.swapped(), &data)?.value))
}

fn vanishing_statement(_: &Cli) -> Result<f64> {
    let p = ParamPoint::new(8, c(3.6, 0.0), c(1.4, 0.0))?;
    let b = AccuracyBudget::new(1e-9, 0.0, 100_000)?;
    Ok(corollary2_residual(&p, 200, &b)?.residual)
}

fn dual_methods(_: &Cli) -> Result<f64> {
    let p = ParamPoint::new(8, c(3.6, 0.7), c(1.4, -0.7))?;
    let mut worst = beta_integral_check(p.s(), p.sprime())?.relative();
    worst = worst.max(c_zero_term_oracle(&p)?.relative());
    for q in enumerate_quadruples(3) {
        worst = worst.max(per_matrix_oracle(&q, &p)?.relative());
    }
    Ok(worst)
}

const CHECKS: &[Check] = &[
    Check { name: "special_values", tol: 1e-14, run: special_values },
    Check { name: "tanh_sinh_endpoint_singularity", tol: 1e-12, run: quadrature },
    Check { name: "hecke_multiplicativity_deligne", tol: 1e-9, run: hecke_relations },
    Check { name: "functional_equation_delta", tol: 1e-10, run: functional_equation },
    Check { name: "enumeration_vs_brute_force", tol: 0.5, run: enumeration_counts },
    Check { name: "fold_identity", tol: 1e-10, run: fold_identity },
    Check { name: "spectral_swap_symmetry", tol: 1e-13, run: swap_symmetry },
    Check { name: "vanishing_k8", tol: 1e-8, run: vanishing_statement },
    Check { name: "dual_method_integrals", tol: 1e-7, run: dual_methods },
];

pub fn run(cli: &Cli) -> u8 {
    let mut code = status::OK;
    let mut records: Vec<Value> = Vec::new();
    for check in CHECKS {
        let start = Instant::now();
        let outcome = (check.run)(cli);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let (residual, pass, error) = match outcome {
            Ok(r) => (Some(r), r < check.tol, None),
            Err(e) => (None, false, Some(e.to_string())),
        };
        eprintln!(
            "{} {:<34} {}",
            if pass { "ok  " } else { "FAIL" },
            check.name,
            match (&residual, &error) {
                (Some(r), _) => format!("{r:.3e} (tol {:.0e})", check.tol),
                (None, Some(e)) => e.clone(),
                _ => String::new(),
            }
        );
        if !pass {
            code = status::FAILURE;
        }
        records.push(json!({
            "check": check.name,
            "residual": residual,
            "tol": check.tol,
            "pass": pass,
            "error": error,
            "timings_ms": {"total": elapsed},
        }));
    }
    match render(&records, cli.opts.format.unwrap_or(Format::Json)).and_then(|t| emit(&t, cli.opts.out.as_deref())) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: {e}");
            status::FAILURE
        }
    }
}

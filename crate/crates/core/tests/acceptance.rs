//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so the report is always printed; the
//! process exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use lkernel::kernel::{
    a_term_oracle, beta_integral_check, c_k, c_zero_term_oracle, corollary2_residual, enumerate_quadruples,
    gamma_k, hyper_sum, hyper_sum_with_families, lipschitz_check, mellin_lhs, per_matrix_oracle, rhs_from_hyper,
    rhs_theorem, spectral_lhs, KernelMatrices, OraclePair, ParamPoint, SpectralData, TheoremTerms,
};
use lkernel::lfunc::{lstar, petersson_norm, LStarSeriesParams, PeterssonQuadParams};
use lkernel::modforms::{eigenbasis, Eigenform};
use lkernel::specfun::{gamma, pow_pos};
use lkernel::{AccuracyBudget, Error};
use num_complex::Complex64;

type Outcome = Result<(bool, String), Error>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn valid(k: u32, s: Complex64, sp: Complex64) -> ParamPoint {
    ParamPoint::new(k, s, sp).expect("admissible point")
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if b.norm() > 0.0 {
        d / b.norm()
    } else {
        d
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// The family rectangle used where the automatic tail bound diverges
/// (`s + s' = k - 1`): the sum is then reported as computed, without a
/// certified error.
const FIXED_B: u64 = 2000;
const FIXED_D: u64 = 1000;

fn rhs_any(p: &ParamPoint) -> Result<TheoremTerms, Error> {
    if p.is_admissible() {
        rhs_theorem(p, &AccuracyBudget::new(0.0, 1e-10, 100_000)?)
    } else {
        rhs_from_hyper(p, &hyper_sum_with_families(p, 200, FIXED_B, FIXED_D)?)
    }
}

fn point_label(p: &ParamPoint) -> String {
    format!("({}, {}, {})", p.k(), p.s(), p.sprime())
}

fn cor2_budget() -> AccuracyBudget {
    AccuracyBudget::new(1e-9, 0.0, 100_000).unwrap()
}

fn a1() -> Outcome {
    let start = Instant::now();
    let p = valid(8, c(3.6, 0.0), c(1.4, 0.0));
    let r = corollary2_residual(&p, 200, &cor2_budget())?;
    let t = secs(start.elapsed());
    let ok = r.residual < 1e-8 && t < 5.0;
    Ok((ok, format!("residual {:.2e} (tol 1e-8, n_max 200), {t:.2} s (limit 5 s)", r.residual)))
}

fn a2() -> Outcome {
    let start = Instant::now();
    let points = [
        (8, c(3.6, 0.7), c(1.4, -0.7)),
        (10, c(5.2, 1.3), c(1.8, -1.3)),
        (14, c(6.5, 0.0), c(2.5, 0.0)),
        (14, c(7.3, 2.0), c(3.7, -2.0)),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (k, s, sp) in points {
        let r = corollary2_residual(&valid(k, s, sp), 200, &cor2_budget())?;
        worst = worst.max(r.residual);
        parts.push(format!("{:.1e}", r.residual));
    }
    let t = secs(start.elapsed());
    let ok = worst < 1e-8 && t < 30.0;
    Ok((ok, format!("residuals [{}] (tol 1e-8), {t:.2} s (limit 30 s)", parts.join(", "))))
}

struct DeltaData {
    form: Eigenform,
    spectral: SpectralData,
    norm: f64,
}

fn delta_data() -> Result<DeltaData, Error> {
    let form = eigenbasis(12, 64)?.remove(0);
    let norm = petersson_norm(&form, &PeterssonQuadParams::default())?;
    let spectral = SpectralData::from_parts(12, vec![form.clone()], vec![norm])?;
    Ok(DeltaData {
        form,
        spectral,
        norm: norm.value,
    })
}

/// Spectral residual and the norm-free ratio at one point.
fn spectral_checks(p: &ParamPoint, d: &DeltaData) -> Result<(f64, Complex64), Error> {
    let rhs = rhs_any(p)?.total;
    let g = gamma_k(p.s(), 12)?;
    let spec = spectral_lhs(p, &d.spectral)?.value;
    let lp = LStarSeriesParams::default();
    let l = lstar(&d.form, p.s(), &lp)? * lstar(&d.form, p.sprime(), &lp)?;
    let ratio = g * rhs / l / (c_k(12) / d.norm);
    Ok((rel(g * rhs, spec), ratio))
}

fn spectral_criterion(points: [ParamPoint; 2], d: &DeltaData) -> Outcome {
    let (r1, q1) = spectral_checks(&points[0], d)?;
    let (r2, q2) = spectral_checks(&points[1], d)?;
    let spread = rel(q2, q1);
    let ok = r1 < 1e-5 && r2 < 1e-5 && spread < 1e-7;
    Ok((
        ok,
        format!(
            "{} rel {r1:.2e}, {} rel {r2:.2e} (tol 1e-5); ratios {q1:.6}, {q2:.6}, spread {spread:.2e} (tol 1e-7)",
            point_label(&points[0]),
            point_label(&points[1])
        ),
    ))
}

fn a3(d: &DeltaData) -> Outcome {
    // as stated; s + s' = k - 1 lies on the boundary excluded by the
    // hypotheses, so the points are built unchecked
    let points = [
        ParamPoint::unchecked(12, c(7.5, 0.0), c(3.5, 0.0)),
        ParamPoint::unchecked(12, c(6.8, 1.2), c(4.2, -1.2)),
    ];
    spectral_criterion(points, d)
}

fn a3_companion(d: &DeltaData) -> Outcome {
    let points = [valid(12, c(6.5, 0.0), c(2.5, 0.0)), valid(12, c(5.8, 1.2), c(3.2, -1.2))];
    spectral_criterion(points, d)
}

fn quadrature_criterion(p: &ParamPoint) -> Outcome {
    let start = Instant::now();
    let rhs = rhs_any(p)?.total;
    // no budget: the comparison with the right-hand side is the criterion
    let q = mellin_lhs(p, 60, &AccuracyBudget::new(f64::MAX, 0.0, 100_000)?)?;
    let t = secs(start.elapsed());
    let r = rel(q.value, rhs);
    let ok = r < 1e-3 && t < 120.0;
    Ok((
        ok,
        format!(
            "{} rel {r:.2e} (tol 1e-3, m_max 60, est. error {:.1e}), {t:.1} s (limit 120 s)",
            point_label(p),
            q.error() / q.value.norm()
        ),
    ))
}

fn a4() -> Outcome {
    quadrature_criterion(&ParamPoint::unchecked(12, c(7.5, 0.0), c(3.5, 0.0)))
}

fn a4_companion() -> Outcome {
    quadrature_criterion(&valid(12, c(6.5, 0.0), c(2.5, 0.0)))
}

fn a5(d: &DeltaData) -> Outcome {
    let p = valid(12, c(7.0, 0.0), c(2.0, 0.0));
    let h = hyper_sum(&p, 200, &AccuracyBudget::new(0.0, 1e-10, 100_000)?)?;
    let exact_zero = h.value == Complex64::new(0.0, 0.0);
    let t = rhs_from_hyper(&p, &h)?;
    let three = t.t1 + t.t2 + t.t4;
    let spec = spectral_lhs(&p, &d.spectral)?.value;
    let r = rel(gamma_k(p.s(), 12)? * three, spec);
    Ok((
        exact_zero && r < 1e-5,
        format!("hyper sum exactly zero: {exact_zero}; three-term rel {r:.2e} (tol 1e-5)"),
    ))
}

fn oracle_residual(r: &OraclePair) -> f64 {
    rel(r.direct, r.closed)
}

fn a6() -> Outcome {
    let points = [
        valid(8, c(3.6, 0.0), c(1.4, 0.0)),
        valid(8, c(3.6, 0.7), c(1.4, -0.7)),
        valid(10, c(5.2, 1.3), c(1.8, -1.3)),
        valid(14, c(7.3, 2.0), c(3.7, -2.0)),
        valid(12, c(6.5, 0.0), c(2.5, 0.0)),
        valid(12, c(7.0, 0.0), c(2.0, 0.0)),
    ];
    let tol = 1e-7;
    let mut worst = [0.0f64; 5];
    let mut count = 0;
    for p in &points {
        for q in enumerate_quadruples(6) {
            worst[0] = worst[0].max(oracle_residual(&per_matrix_oracle(&q, p)?));
            count += 1;
        }
        worst[1] = worst[1].max(oracle_residual(&a_term_oracle(p, &AccuracyBudget::new(0.0, tol, 100_000)?)?));
        worst[2] = worst[2].max(oracle_residual(&c_zero_term_oracle(p)?));
        for t in [0.3, 1.0, 2.5] {
            worst[3] = worst[3].max(oracle_residual(&lipschitz_check(t, p.s())?));
        }
        worst[4] = worst[4].max(oracle_residual(&beta_integral_check(p.s(), p.sprime())?));
    }
    let ok = worst.iter().all(|w| *w < tol);
    Ok((
        ok,
        format!(
            "per_matrix ({count} evaluations) {:.1e}, a_term {:.1e}, c_zero {:.1e}, lipschitz {:.1e}, beta {:.1e} (tol 1e-7)",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    ))
}

fn a7() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |name: &str, residual: f64, tol: f64| {
        if residual.is_nan() || residual >= tol {
            failures.push(format!("{name} {residual:.1e}"));
        }
    };

    // Gamma reflection
    let mut w: f64 = 0.0;
    for z in [c(0.3, 0.7), c(-2.4, 1.1), c(4.5, -3.0)] {
        w = w.max(rel(gamma(z)? * gamma(1.0 - z)?, PI / (z * PI).sin()));
    }
    check("gamma_reflection", w, 1e-13);

    // functional equations against absolutely convergent Dirichlet series
    let lp = LStarSeriesParams::default();
    let mut w: f64 = 0.0;
    for (k, s) in [(12u32, c(14.0, 2.0)), (18, c(24.0, -1.5)), (24, c(30.0, 3.0))] {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        for f in eigenbasis(k, 64)? {
            let dirichlet: Complex64 = (1..=64).map(|n| f.a(n) * pow_pos(n as f64, -s)).sum();
            let direct = pow_pos(2.0 * PI, -s) * gamma(s)? * dirichlet;
            w = w.max(rel(sign * lstar(&f, k as f64 - s, &lp)?, direct));
        }
    }
    check("functional_equation", w, 1e-10);

    // Hecke multiplicativity, prime-square relation and Deligne bound
    let mut w: f64 = 0.0;
    let mut deligne = true;
    for k in [12u32, 16, 20, 24, 28, 32] {
        for f in eigenbasis(k, 64)? {
            let kf = k as f64;
            let sc = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
            for (m, n) in [(2, 3), (2, 5), (3, 5), (3, 7), (4, 9), (5, 7), (7, 9)] {
                w = w.max(sc(f.a(m * n), f.a(m) * f.a(n)));
            }
            for p in [2usize, 3, 5, 7] {
                w = w.max(sc(f.a(p * p), f.a(p) * f.a(p) - (p as f64).powf(kf - 1.0)));
            }
            for p in [2usize, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61] {
                deligne &= f.a(p).abs() <= 2.0 * (p as f64).powf((kf - 1.0) / 2.0);
            }
        }
    }
    check("hecke_multiplicativity", w, 1e-9);
    check("deligne_bound", if deligne { 0.0 } else { 1.0 }, 0.5);

    // enumeration counts against brute force
    let n_max = 60u64;
    let mut brute = vec![0usize; n_max as usize + 1];
    for a in 1..=n_max {
        for d in 1..=n_max / a {
            for b in 1..a * d {
                if (a * d - 1) % b == 0 {
                    brute[(a * d) as usize] += 1;
                }
            }
        }
    }
    let mut counted = vec![0usize; n_max as usize + 1];
    for q in enumerate_quadruples(n_max) {
        counted[q.det_shell() as usize] += 1;
    }
    check("enumeration_counts", if brute == counted { 0.0 } else { 1.0 }, 0.5);

    // fold identity of the truncated kernel sum
    let mats = KernelMatrices::new(16);
    let mut w: f64 = 0.0;
    for (s, z) in [(c(7.5, 0.0), c(0.2, 1.1)), (c(6.8, 1.2), c(-0.45, 0.95)), (c(6.5, 0.0), c(0.0, 1.7))] {
        let lhs = mats.sum(s, 12, -1.0 / z)?;
        let rhs = z.powi(12) * mats.sum(s, 12, z)?;
        w = w.max(rel(lhs, rhs));
    }
    check("fold_identity", w, 1e-10);

    // swap symmetry of the spectral side (weight 24, two eigenforms)
    let forms = eigenbasis(24, 64)?;
    let q = PeterssonQuadParams::default();
    let norms = forms.iter().map(|f| petersson_norm(f, &q)).collect::<Result<Vec<_>, _>>()?;
    let data = SpectralData::from_parts(24, forms, norms)?;
    let p = ParamPoint::unchecked(24, c(13.1, 0.8), c(7.9, -0.8));
    check("swap_symmetry", rel(spectral_lhs(&p, &data)?.value, spectral_lhs(&p.swapped(), &data)?.value), 1e-14);

    let ok = failures.is_empty();
    let detail = if ok {
        "gamma reflection, functional equations (k = 12, 18, 24), Hecke relations and Deligne bounds \
         (k = 12..32), enumeration counts (ad <= 60), fold identity, swap symmetry"
            .to_string()
    } else {
        format!("failed: {}", failures.join(", "))
    };
    Ok((ok, detail))
}

fn report(name: &str, outcome: Outcome) -> bool {
    let (ok, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    println!("{name:<4} {} {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn main() {
    println!("acceptance criteria");
    let mut all = true;
    all &= report("A1", a1());
    all &= report("A2", a2());
    let delta = delta_data();
    match &delta {
        Ok(d) => {
            all &= report("A3", a3(d));
            // the companion lines are informative and do not replace A3/A4
            report("A3*", a3_companion(d));
        }
        Err(e) => {
            all &= report("A3", Err(e.clone()));
        }
    }
    all &= report("A4", a4());
    report("A4*", a4_companion());
    match &delta {
        Ok(d) => all &= report("A5", a5(d)),
        Err(e) => all &= report("A5", Err(e.clone())),
    }
    all &= report("A6", a6());
    all &= report("A7", a7());
    if !all {
        println!("acceptance: some criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}

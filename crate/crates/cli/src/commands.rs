//! Command dispatch: parameter loading, per-point evaluation and the exit
//! status.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use lkernel::kernel::{
    a_term_oracle, beta_integral_check, c_k, c_zero_term_oracle, corollary2_residual, enumerate_quadruples,
    gamma_k, lipschitz_check, mellin_lhs, per_matrix_oracle, rhs_theorem_with, spectral_lhs, validate_params,
    OraclePair, ParamPoint, SpectralData,
};
use lkernel::lfunc::{petersson_norm, PeterssonQuadParams};
use lkernel::modforms::{eigenbasis, eigenbasis_from_basis, Eigenform};
use lkernel::report::{pair, ParamsJson, TermsJson, VerificationReport};
use lkernel::{AccuracyBudget, Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cache::cache_expansions;
use crate::output::{emit, render};
use crate::{selftest, status, Cli, Command, Format};

/// Default pass/fail tolerances.
pub const COR2_TOL: f64 = 1e-8;
pub const THEOREM_TOL: f64 = 1e-6;
pub const ORACLE_TOL: f64 = 1e-7;

/// Largest `ad` for which every matrix is checked by the oracle command.
const ORACLE_MAX_SHELL: u64 = 6;

const MAX_TERMS: usize = 100_000;

/// One entry of a `--grid` file; imaginary parts default to zero.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridEntry {
    k: u32,
    s_re: f64,
    #[serde(default)]
    s_im: f64,
    sp_re: f64,
    #[serde(default)]
    sp_im: f64,
}

/// Exit status ordered by severity: invalid input first, then accuracy
/// failures, then residuals over budget.
pub fn worst(a: u8, b: u8) -> u8 {
    let rank = |c: u8| match c {
        status::INVALID_PARAMS => 3,
        status::ACCURACY => 2,
        status::FAILURE => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

pub fn classify(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::Pole { .. } => status::INVALID_PARAMS,
        Error::Accuracy { .. } | Error::Precision { .. } => status::ACCURACY,
        Error::OracleFailure { .. } | Error::Dependency(_) | Error::Serde(_) => status::FAILURE,
    }
}

pub fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    match std::env::var_os("LKERNEL_CACHE") {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => cli.opts.cache.clone(),
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn run(cli: &Cli) -> u8 {
    if cli.command == Command::Selftest {
        return selftest::run(cli);
    }
    let raw = match load_points(cli) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return status::INVALID_PARAMS;
        }
    };
    let mut code = status::OK;
    let mut points = Vec::new();
    for (i, (k, s, sp)) in raw.into_iter().enumerate() {
        match validate_params(k, s, sp) {
            Ok(p) => points.push(p),
            Err(e) => {
                eprintln!("error: point {i} (k = {k}, s = {s}, s' = {sp}): {e}");
                code = worst(code, classify(&e));
            }
        }
    }
    if points.is_empty() {
        return code;
    }

    let spectral = if matches!(cli.command, Command::VerifyTheorem | Command::Average) {
        match spectral_data(cli, &points) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("error: spectral data: {e}");
                return worst(code, classify(&e));
            }
        }
    } else {
        BTreeMap::new()
    };

    let outcomes: Vec<Result<(Vec<Value>, u8)>> = points
        .par_iter()
        .map(|p| evaluate(cli, p, &spectral))
        .collect();

    let mut records = Vec::new();
    let (mut passed, mut total) = (0usize, 0usize);
    for (p, outcome) in points.iter().zip(outcomes) {
        total += 1;
        match outcome {
            Ok((recs, point_code)) => {
                records.extend(recs);
                if point_code == status::OK {
                    passed += 1;
                }
                code = worst(code, point_code);
            }
            Err(e) => {
                eprintln!("error: {}: {e}", describe(p));
                code = worst(code, classify(&e));
            }
        }
    }

    let default_format = if cli.command == Command::Table {
        Format::Csv
    } else {
        Format::Json
    };
    let text = match render(&records, cli.opts.format.unwrap_or(default_format)) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return worst(code, status::FAILURE);
        }
    };
    if let Err(e) = emit(&text, cli.opts.out.as_deref()) {
        eprintln!("error: {e}");
        return worst(code, status::FAILURE);
    }
    if cli.command != Command::Table {
        eprintln!("{passed}/{total} points within tolerance");
    }
    code
}

fn describe(p: &ParamPoint) -> String {
    format!("k = {}, s = {}, s' = {}", p.k(), p.s(), p.sprime())
}

type RawPoint = (u32, Complex64, Complex64);

fn load_points(cli: &Cli) -> std::result::Result<Vec<RawPoint>, String> {
    let o = &cli.opts;
    if let Some(path) = &o.grid {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read grid {}: {e}", path.display()))?;
        let entries: Vec<GridEntry> =
            serde_json::from_str(&text).map_err(|e| format!("bad grid file {}: {e}", path.display()))?;
        if entries.is_empty() {
            return Err(format!("grid file {} lists no points", path.display()));
        }
        return Ok(entries
            .into_iter()
            .map(|g| (g.k, Complex64::new(g.s_re, g.s_im), Complex64::new(g.sp_re, g.sp_im)))
            .collect());
    }
    match (o.k, o.s, o.sp) {
        (Some(k), Some(s), Some(sp)) => Ok(vec![(k, Complex64::new(s, o.s_im), Complex64::new(sp, o.sp_im))]),
        _ => Err("give a point with --k, --s and --sp (plus --s-im/--sp-im), or a --grid file".into()),
    }
}

fn quad_params(cli: &Cli) -> Result<PeterssonQuadParams> {
    PeterssonQuadParams::new(cli.opts.y_max, cli.opts.nx, cli.opts.ny)
}

/// Eigenbasis of `S_k`, through the on-disk basis cache when one is configured.
pub fn eigenforms(cli: &Cli, k: u32) -> Result<Vec<Eigenform>> {
    match cache_dir(cli) {
        Some(dir) => {
            let (basis, _) = cache_expansions(k, cli.opts.prec, &dir)?;
            eigenbasis_from_basis(k, &basis)
        }
        None => eigenbasis(k, cli.opts.prec),
    }
}

fn spectral_data(cli: &Cli, points: &[ParamPoint]) -> Result<BTreeMap<u32, SpectralData>> {
    let quad = quad_params(cli)?;
    let mut out = BTreeMap::new();
    for p in points {
        if out.contains_key(&p.k()) {
            continue;
        }
        let forms = eigenforms(cli, p.k())?;
        let norms = forms.iter().map(|f| petersson_norm(f, &quad)).collect::<Result<Vec<_>>>()?;
        out.insert(p.k(), SpectralData::from_parts(p.k(), forms, norms)?);
    }
    Ok(out)
}

fn theorem_budget(tol: f64) -> Result<AccuracyBudget> {
    AccuracyBudget::new(0.0, tol * 1e-3, MAX_TERMS)
}

fn settings(cli: &Cli, tol: f64) -> Value {
    let o = &cli.opts;
    json!({
        "n_max": o.n_max,
        "tol": tol,
    })
}

/// Records for one point and its exit status.
type PointOutcome = Result<(Vec<Value>, u8)>;

fn pass_code(pass: bool) -> u8 {
    if pass {
        status::OK
    } else {
        status::FAILURE
    }
}

fn evaluate(cli: &Cli, p: &ParamPoint, spectral: &BTreeMap<u32, SpectralData>) -> PointOutcome {
    match cli.command {
        Command::VerifyCor2 => verify_cor2(cli, p),
        Command::VerifyTheorem => verify_theorem(cli, p, &spectral[&p.k()]),
        Command::Average => average(cli, p, &spectral[&p.k()]),
        Command::Oracles => oracles(cli, p),
        Command::Table => table(cli, p),
        Command::Selftest => unreachable!("handled before point evaluation"),
    }
}

fn verify_cor2(cli: &Cli, p: &ParamPoint) -> PointOutcome {
    let tol = cli.opts.tol.unwrap_or(COR2_TOL);
    let start = Instant::now();
    let budget = AccuracyBudget::new(tol / 10.0, 0.0, MAX_TERMS)?;
    let c = corollary2_residual(p, cli.opts.n_max, &budget)?;
    let pass = c.residual < tol;
    let rec = json!({
        "params": ParamsJson::from(p),
        "lhs": pair(c.lhs),
        "rhs": pair(c.rhs),
        "residual": c.residual,
        "trunc_bound": c.trunc_bound,
        "pass": pass,
        "settings": settings(cli, tol),
        "timings_ms": {"total": ms(start)},
    });
    Ok((vec![rec], pass_code(pass)))
}

/// `|a - b| / |b|`, or `|a - b|` when `b` vanishes.
fn relative(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if b.norm() > 0.0 {
        d / b.norm()
    } else {
        d
    }
}

fn verify_theorem(cli: &Cli, p: &ParamPoint, data: &SpectralData) -> PointOutcome {
    let o = &cli.opts;
    let tol = o.tol.unwrap_or(THEOREM_TOL);
    let mut timings = BTreeMap::new();

    let start = Instant::now();
    let terms = rhs_theorem_with(p, o.n_max, &theorem_budget(tol)?)?;
    timings.insert("rhs".to_string(), ms(start));

    let start = Instant::now();
    let spec = spectral_lhs(p, data)?;
    let lhs = spec.value / gamma_k(p.s(), p.k())?;
    timings.insert("spectral".to_string(), ms(start));

    let mut report = VerificationReport::new(p, &terms);
    report.lhs_spectral = Some(pair(lhs));
    let spectral_res = if data.forms().is_empty() {
        terms.total.norm()
    } else {
        relative(terms.total, lhs)
    };
    let mut pass = spectral_res < tol;
    report.add_residual("spectral", spectral_res)?;

    let mut code = pass_code(pass);
    if o.quadrature {
        // evaluated without a budget so the value is reported even when the
        // box-truncation estimate exceeds the tolerance
        let start = Instant::now();
        let q = mellin_lhs(p, o.m_max, &AccuracyBudget::new(f64::MAX, 0.0, MAX_TERMS)?)?;
        timings.insert("quadrature".to_string(), ms(start));
        let res = relative(q.value, terms.total);
        report.lhs_quadrature = Some(pair(q.value));
        report.add_residual("quadrature", res)?;
        report.settings.insert("quad_error".into(), json!(q.error() / q.value.norm()));
        pass &= res < o.quad_tol;
        if q.error() > o.quad_tol * q.value.norm() {
            eprintln!(
                "warning: {}: quadrature error estimate {:.2e} (relative) exceeds quad_tol {:.0e}; increase --m-max",
                describe(p),
                q.error() / q.value.norm(),
                o.quad_tol
            );
            code = worst(code, status::ACCURACY);
        } else {
            code = worst(code, pass_code(pass));
        }
    }

    for (key, v) in [
        ("n_max", json!(o.n_max)),
        ("m_max", json!(o.m_max)),
        ("tol", json!(tol)),
        ("quad_tol", json!(o.quad_tol)),
        ("prec", json!(o.prec)),
        ("petersson", json!([o.y_max, o.nx, o.ny])),
        ("spectral_error", json!(spec.error / gamma_k(p.s(), p.k())?.norm())),
    ] {
        report.settings.insert(key.to_string(), v);
    }
    report.timings_ms = timings;

    let mut rec = serde_json::to_value(&report).map_err(|e| Error::Serde(e.to_string()))?;
    rec["pass"] = json!(pass);
    Ok((vec![rec], code))
}

fn average(cli: &Cli, p: &ParamPoint, data: &SpectralData) -> PointOutcome {
    let o = &cli.opts;
    let tol = o.tol.unwrap_or(THEOREM_TOL);
    let start = Instant::now();
    let terms = rhs_theorem_with(p, o.n_max, &theorem_budget(tol)?)?;
    let avg = gamma_k(p.s(), p.k())? / c_k(p.k()) * terms.total;
    let spec = spectral_lhs(p, data)?.value / c_k(p.k());
    let res = if data.forms().is_empty() {
        avg.norm()
    } else {
        relative(avg, spec)
    };
    let pass = res < tol;
    let rec = json!({
        "params": ParamsJson::from(p),
        "dim": data.forms().len(),
        "average": pair(avg),
        "spectral_average": pair(spec),
        "residual": res,
        "pass": pass,
        "settings": settings(cli, tol),
        "timings_ms": {"total": ms(start)},
    });
    Ok((vec![rec], pass_code(pass)))
}

fn oracle_record(p: &ParamPoint, name: String, r: &OraclePair, tol: f64) -> (Value, bool) {
    let res = relative(r.direct, r.closed);
    let pass = res < tol;
    let rec = json!({
        "params": ParamsJson::from(p),
        "oracle": name,
        "direct": pair(r.direct),
        "closed": pair(r.closed),
        "residual": res,
        "direct_error": r.direct_error,
        "pass": pass,
    });
    (rec, pass)
}

fn oracles(cli: &Cli, p: &ParamPoint) -> PointOutcome {
    let tol = cli.opts.tol.unwrap_or(ORACLE_TOL);
    let mut checks: Vec<(String, OraclePair)> = Vec::new();
    for q in enumerate_quadruples(ORACLE_MAX_SHELL) {
        let name = format!("per_matrix[{},{},{},{}]", q.a, q.b, q.c, q.d);
        checks.push((name, per_matrix_oracle(&q, p)?));
    }
    checks.push(("a_term".into(), a_term_oracle(p, &AccuracyBudget::new(0.0, tol, MAX_TERMS)?)?));
    checks.push(("c_zero".into(), c_zero_term_oracle(p)?));
    for t in [0.5, 1.0, 2.0] {
        checks.push((format!("lipschitz[t={t}]"), lipschitz_check(t, p.s())?));
    }
    checks.push(("beta".into(), beta_integral_check(p.s(), p.sprime())?));

    let mut all = true;
    let records = checks
        .into_iter()
        .map(|(name, r)| {
            let (rec, ok) = oracle_record(p, name, &r, tol);
            all &= ok;
            rec
        })
        .collect();
    Ok((records, pass_code(all)))
}

fn table(cli: &Cli, p: &ParamPoint) -> PointOutcome {
    let tol = cli.opts.tol.unwrap_or(THEOREM_TOL);
    let terms = rhs_theorem_with(p, cli.opts.n_max, &theorem_budget(tol)?)?;
    let rec = json!({
        "params": ParamsJson::from(p),
        "terms": TermsJson::from(&terms),
        "n_max": cli.opts.n_max,
    });
    Ok((vec![rec], status::OK))
}

use std::collections::HashSet;

use qcong::arith::jacobi_symbol;
use qcong::circle::{
    enumerate_admissible_t, enumerate_circle_solutions, param_point, s_of_p, EXHAUSTIVE_LIMIT,
};
use qcong::counter::{
    count_box_exact, count_pythagorean, count_smoothed, pythagorean_asymptotic, transition_check,
    CountConfig, CountMethod, CountReport,
};
use qcong::expsum::{
    e_sum, gauss_sum_bruteforce, gauss_sum_closed, s_alpha_bruteforce, s_alpha_cochrane, tolerance,
    CochraneCase, EsumMode, ExpSumSpec,
};
use qcong::weights::{poisson_check, WeightSpec};
use qcong::{Complex64, Error, PrimePowerModulus};
use serde::Serialize;
use serde_json::json;

use crate::output::{
    csv_writer, destination, sidecar_path, write_json, CliError, CliResult, ComplexValue, Report,
};
use crate::{
    Context, CountArgs, ExpsumArgs, GaussArgs, MethodArg, ModeArg, ParamArgs, PoissonArgs,
    ScanArgs, TransitionArgs, TriplesArgs,
};

/// Largest |diff| tolerated by the Poisson check.
const POISSON_TOL: f64 = 1e-12;
const TRIPLES_ORACLE_LIMIT: u64 = 2000;

impl From<MethodArg> for CountMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::SqrtBucket => CountMethod::SqrtBucket,
            MethodArg::TripleLoop => CountMethod::TripleLoop,
        }
    }
}

fn n_from_nu(m: &PrimePowerModulus, nu: f64) -> CliResult<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(CliError::Usage(format!("--nu must be positive, got {nu}")));
    }
    Ok((m.q() as f64).powf(nu).ceil())
}

fn run_count(
    m: PrimePowerModulus,
    n_scale: f64,
    phi_scale: f64,
    cutoff: f64,
    method: MethodArg,
) -> CliResult<CountReport> {
    let weight = WeightSpec::gaussian(phi_scale)?;
    let cfg = CountConfig::new(m, n_scale, weight, cutoff, method.into())?;
    Ok(count_smoothed(&cfg)?)
}

pub fn count(args: &CountArgs) -> CliResult<Report> {
    let m = PrimePowerModulus::new(args.p, args.n)?;
    let n_scale = match (args.n_scale, args.nu) {
        (Some(n), _) => n,
        (None, Some(nu)) => n_from_nu(&m, nu)?,
        (None, None) => return Err(CliError::Usage("one of --N or --nu is required".into())),
    };
    let mut report = run_count(m, n_scale, args.phi_scale, args.cutoff, args.method)?;
    if args.exact_box {
        report.exact_box_count = Some(count_box_exact(&m, n_scale.floor() as u64)?);
    }
    Report::ok(report)
}

/// "4..6", "4..=6" or "5", inclusive.
fn parse_range(s: &str) -> CliResult<Vec<u32>> {
    let bad = || CliError::Usage(format!("invalid exponent range {s:?}"));
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(CliError::Usage(format!("exponent range {s:?} is empty")));
    }
    Ok((lo..=hi).collect())
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    let values = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid N value {t:?}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::Usage("N list is empty".into()));
    }
    Ok(values)
}

#[derive(Serialize)]
struct ScanRow {
    p: u64,
    n: u32,
    q: u64,
    #[serde(rename = "N")]
    n_scale: f64,
    nu: f64,
    phi_scale: f64,
    #[serde(rename = "measured_T")]
    measured_t: f64,
    #[serde(rename = "predicted_T0")]
    predicted_t0: f64,
    ratio: f64,
    method: &'static str,
    seconds: f64,
}

pub fn scan(args: &ScanArgs, ctx: &Context) -> CliResult<bool> {
    let exponents = parse_range(&args.n)?;
    let sizes = args.n_scale.as_deref().map(parse_list).transpose()?;
    let mut configs = Vec::new();
    for &n in &exponents {
        let m = PrimePowerModulus::new(args.p, n)?;
        match (&sizes, args.nu) {
            (Some(list), _) => configs.extend(list.iter().map(|&s| (m, s))),
            (None, Some(nu)) => configs.push((m, n_from_nu(&m, nu)?)),
            (None, None) => return Err(CliError::Usage("one of --N or --nu is required".into())),
        }
    }
    // Validate every configuration before doing any work.
    let weight = WeightSpec::gaussian(args.phi_scale)?;
    for &(m, n_scale) in &configs {
        CountConfig::new(m, n_scale, weight, args.cutoff, args.method.into())?;
    }
    let path = destination(args.out.as_deref(), ctx.out_dir.as_deref(), "scan.csv");
    let mut writer = csv_writer(path.as_deref())?;
    for (m, n_scale) in configs.iter().copied() {
        let r = run_count(m, n_scale, args.phi_scale, args.cutoff, args.method)?;
        writer.serialize(ScanRow {
            p: r.p,
            n: r.n,
            q: r.q,
            n_scale: r.n_scale,
            nu: r.nu,
            phi_scale: r.phi_scale,
            measured_t: r.measured_t,
            predicted_t0: r.predicted_t0,
            ratio: r.ratio,
            method: r.method.as_str(),
            seconds: r.wall_time_s,
        })?;
    }
    writer.flush()?;
    if let Some(path) = path {
        let manifest = ctx.manifest("scan", args, Some(&path));
        let doc = json!({ "manifest": manifest, "rows": configs.len() });
        write_json(Some(&sidecar_path(&path)), &doc)?;
    }
    Ok(true)
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
enum RecordStatus {
    Ok,
    HypothesisViolated,
}

#[derive(Serialize)]
struct ExpsumRecord {
    mode: &'static str,
    alpha: Option<u64>,
    status: RecordStatus,
    re: Option<f64>,
    im: Option<f64>,
    abs: Option<f64>,
    oracle_diff: Option<f64>,
    /// Closed-form branch for a single class: "vanishing" or "simple-root".
    case: Option<&'static str>,
    message: Option<String>,
}

impl ExpsumRecord {
    fn value(
        mode: &'static str,
        alpha: Option<u64>,
        z: Complex64,
        case: Option<&'static str>,
    ) -> Self {
        Self {
            mode,
            alpha,
            status: RecordStatus::Ok,
            re: Some(z.re),
            im: Some(z.im),
            abs: Some(z.norm()),
            oracle_diff: None,
            case,
            message: None,
        }
    }

    fn violated(mode: &'static str, alpha: Option<u64>, msg: String) -> Self {
        Self {
            mode,
            alpha,
            status: RecordStatus::HypothesisViolated,
            re: None,
            im: None,
            abs: None,
            oracle_diff: None,
            case: None,
            message: Some(msg),
        }
    }
}

fn closed_value(
    spec: &ExpSumSpec,
    alpha: Option<u64>,
) -> qcong::Result<(Complex64, Option<&'static str>)> {
    match alpha {
        None => Ok((e_sum(spec, EsumMode::Closed)?, None)),
        Some(a) => {
            let v = s_alpha_cochrane(&spec.phase(), a as i128, &spec.modulus)?;
            let case = match v.case {
                CochraneCase::Vanishing => "vanishing",
                CochraneCase::SimpleRoot { .. } => "simple-root",
            };
            Ok((v.value, Some(case)))
        }
    }
}

pub fn expsum(args: &ExpsumArgs) -> CliResult<Report> {
    let m = PrimePowerModulus::new(args.p, args.n)?;
    let spec = ExpSumSpec::new(args.k1, args.k2, args.x3, m)?;
    let brute = match args.mode {
        ModeArg::Closed => None,
        _ => Some(match args.alpha {
            None => e_sum(&spec, EsumMode::Bruteforce)?,
            Some(a) => s_alpha_bruteforce(&spec.phase(), a as i128, &m)?,
        }),
    };
    let closed = match args.mode {
        ModeArg::Bruteforce => None,
        _ => Some(match closed_value(&spec, args.alpha) {
            Ok(v) => Ok(v),
            Err(Error::HypothesisViolated(msg)) => Err(msg),
            Err(e) => return Err(e.into()),
        }),
    };
    let diff = match (&brute, &closed) {
        (Some(b), Some(Ok((c, _)))) => Some((b - c).norm()),
        _ => None,
    };
    let mut records = Vec::new();
    if let Some(b) = brute {
        records.push(ExpsumRecord::value("bruteforce", args.alpha, b, None));
    }
    match closed {
        Some(Ok((c, case))) => records.push(ExpsumRecord::value("closed", args.alpha, c, case)),
        Some(Err(msg)) => records.push(ExpsumRecord::violated("closed", args.alpha, msg)),
        None => {}
    }
    for r in &mut records {
        r.oracle_diff = diff;
    }
    let tol = tolerance(m.q());
    let failure = diff
        .filter(|&d| d > tol)
        .map(|d| format!("closed form differs from brute force by {d:.3e} > {tol:.3e}"));
    let result = json!({
        "spec": {
            "p": m.p(), "n": m.n(), "q": m.q(),
            "k1": spec.k1, "k2": spec.k2, "x3": spec.x3,
            "r": spec.r, "l1": spec.l1, "l2": spec.l2, "D": spec.d,
            "D_is_residue": jacobi_symbol(spec.d, m.p()) == 1,
        },
        "tolerance": tol,
        "records": records,
    });
    Report::checked(result, failure)
}

#[derive(Serialize)]
struct ParamPoint {
    t: u64,
    y1: u64,
    y2: u64,
}

pub fn param(args: &ParamArgs) -> CliResult<Report> {
    let m = PrimePowerModulus::new(args.p, args.n)?;
    if m.q() > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge(format!("q = {} > {EXHAUSTIVE_LIMIT}", m.q())).into());
    }
    let ts = enumerate_admissible_t(&m);
    let mut points = Vec::with_capacity(ts.len());
    for t in &ts {
        let (y1, y2) = param_point(t, &m)?.pair();
        points.push(ParamPoint {
            t: t.value(),
            y1,
            y2,
        });
    }
    let image: HashSet<(u64, u64)> = points.iter().map(|pt| (pt.y1, pt.y2)).collect();
    let solutions: HashSet<(u64, u64)> = enumerate_circle_solutions(&m)?.into_iter().collect();
    let expected = m.q() / m.p() * (m.p() - s_of_p(m.p()));
    let bijective = image.len() == ts.len() && image == solutions;
    let failure = (!bijective || ts.len() as u64 != expected).then(|| {
        format!(
            "{} parameters, {} distinct points, {} circle solutions, expected {expected}",
            ts.len(),
            image.len(),
            solutions.len()
        )
    });
    let result = json!({
        "p": m.p(), "n": m.n(), "q": m.q(),
        "s_p": s_of_p(m.p()),
        "admissible_count": ts.len(),
        "expected_count": expected,
        "circle_solution_count": solutions.len(),
        "bijective": bijective,
        "admissible_t": ts.iter().map(|t| t.value()).collect::<Vec<_>>(),
        "points": if args.points { Some(points) } else { None },
    });
    Report::checked(result, failure)
}

pub fn gauss(args: &GaussArgs) -> CliResult<Report> {
    let brute = gauss_sum_bruteforce(args.q)?;
    let closed = gauss_sum_closed(args.q)?;
    let tol = tolerance(args.q);
    let diff = (brute - closed).norm();
    let abs_error = (brute.norm() - (args.q as f64).sqrt()).abs();
    let failure = (diff > tol || abs_error > tol)
        .then(|| format!("|brute - closed| = {diff:.3e}, ||G| - sqrt q| = {abs_error:.3e}"));
    let result = json!({
        "q": args.q,
        "bruteforce": ComplexValue::from(brute),
        "closed": ComplexValue::from(closed),
        "abs": brute.norm(),
        "oracle_diff": diff,
        "tolerance": tol,
    });
    Report::checked(result, failure)
}

pub fn poisson(args: &PoissonArgs) -> CliResult<Report> {
    let c = poisson_check(&WeightSpec::gaussian(args.s)?);
    let failure = (c.diff > POISSON_TOL).then(|| format!("|lhs - rhs| = {:.3e}", c.diff));
    let result = json!({
        "scale": args.s,
        "lhs": c.lhs,
        "rhs": c.rhs,
        "diff": c.diff,
        "tolerance": POISSON_TOL,
    });
    Report::checked(result, failure)
}

fn triples_by_enumeration(n_box: u64) -> u64 {
    let n = n_box as i64;
    let mut count = 0;
    for x1 in -n..=n {
        for x2 in -n..=n {
            let s = (x1 * x1 + x2 * x2) as u64;
            let x3 = s.isqrt();
            if x3 * x3 == s && x3 <= n_box {
                count += if x3 == 0 { 1 } else { 2 };
            }
        }
    }
    count
}

pub fn triples(args: &TriplesArgs) -> CliResult<Report> {
    let count = count_pythagorean(args.n_box)?;
    let oracle = if args.oracle {
        if args.n_box > TRIPLES_ORACLE_LIMIT {
            return Err(CliError::Usage(format!(
                "--oracle needs N <= {TRIPLES_ORACLE_LIMIT}"
            )));
        }
        Some(triples_by_enumeration(args.n_box))
    } else {
        None
    };
    let failure = oracle
        .filter(|&o| o != count)
        .map(|o| format!("sieve count {count} != enumeration {o}"));
    let asymptotic = pythagorean_asymptotic(args.n_box);
    let result = json!({
        "N": args.n_box,
        "count": count,
        "oracle_count": oracle,
        "asymptotic": asymptotic,
        "ratio": if asymptotic > 0.0 { Some(count as f64 / asymptotic) } else { None },
    });
    Report::checked(result, failure)
}

pub fn transition(args: &TransitionArgs) -> CliResult<Report> {
    let m = PrimePowerModulus::new(args.p, args.n)?;
    let rep = transition_check(&m, args.n_box)?;
    let failure = (!rep.equal).then(|| {
        format!(
            "congruence count {} != equation count {}",
            rep.congruence_count, rep.equation_count
        )
    });
    let result = json!({
        "p": m.p(), "n": m.n(), "q": m.q(), "N": args.n_box,
        "threshold": (m.q() as f64 / 2.0).sqrt(),
        "congruence_count": rep.congruence_count,
        "equation_count": rep.equation_count,
        "equal": rep.equal,
    });
    Report::checked(result, failure)
}

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;
use tracetails::bounds::{compare_report, default_epsilon_grid, rows_to_csv, sample_size, Method, DEFAULT_GRID_POINTS};
use tracetails::extremal::{
    abs_estimator_regions, abs_min_dim, effective_rank, extremal_abs_law, extremal_rel_law, random_abs_pair,
    random_rel_pair, rel_estimator_regions, rel_min_dim, stable_rank, worst_abs_spectrum, worst_rel_spectrum,
    Family,
};
use tracetails::majorization::{chain_classical, chain_frobenius, MajorizationChain};
use tracetails::rng::CounterRng;
use tracetails::trace_estimator::{summarize, tail_frequency, ErrorMode, EstimatorRun};
use tracetails::verify::{
    chain_dominance, conjecture_probe, monotonicity_check, ChainCheckOptions, DominancePath, PathKind,
    ProbeFamily, Verdict,
};
use tracetails::{trace_estimator_law, Error, Spectrum};

use crate::config::{require, CommandName, FamilySpec, Format, RunConfig, Suite, SCHEMA_VERSION};

/// How a command ended, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numeric(String),
    Refused(String),
    /// A proved-region check failed; the report is still written.
    ClaimFailed(Output),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Refused(_) => 4,
            Failure::ClaimFailed(_) => 5,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Precondition(_) => Failure::Config(e.to_string()),
            Error::RegionRefusal(_) => Failure::Refused(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Config(s)
    }
}

/// A finished report, written once by the caller.
#[derive(Debug)]
pub struct Output {
    pub text: String,
}

fn to_json<T: Serialize>(v: &T) -> Result<Output, Failure> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Failure::Numeric(e.to_string()))?;
    text.push('\n');
    Ok(Output { text })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, Failure> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || points == 0 {
        return Err(Failure::Config(format!("epsilon_grid needs 0 < lo <= hi and points >= 1, got {lo}, {hi}, {points}")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == points => hi,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect())
}

fn epsilon_grid(cfg: &RunConfig, family: &Family, m: usize) -> Result<Vec<f64>, Failure> {
    if let Some(values) = &cfg.epsilons {
        return Ok(values.clone());
    }
    if let Some(eps) = cfg.epsilon {
        return Ok(vec![eps]);
    }
    if let Some(g) = cfg.epsilon_grid {
        return log_grid(g.lo, g.hi, g.points);
    }
    Ok(default_epsilon_grid(family, m, cfg.grid_points.unwrap_or(DEFAULT_GRID_POINTS))?)
}

pub fn bounds(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    cfg.check_command(CommandName::Bounds)?;
    let family = cfg.family()?;
    let m = cfg.m()?;
    let grid = epsilon_grid(cfg, &family, m)?;
    let rows = compare_report(&family, m, &grid)?;
    match format {
        Format::Csv => Ok(Output { text: rows_to_csv(&rows) }),
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "bounds",
            "family": cfg.family,
            "m": m,
            "rows": rows,
        })),
    }
}

pub fn samplesize(cfg: &RunConfig, format: Option<Format>, force: bool) -> Result<Output, Failure> {
    cfg.check_command(CommandName::Samplesize)?;
    let family = cfg.family()?;
    let eps = require(cfg.epsilon, "epsilon")?;
    let delta = require(cfg.delta, "delta")?;
    let method = cfg.method.unwrap_or(Method::Ck);
    let s = sample_size(&family, eps, delta, method, force)?;
    let method_name = match s.method {
        Method::Ck => "ck",
        Method::Extremal => "extremal",
    };
    match format {
        None => {
            let mut line = format!(
                "m = {} (method {method_name}, bound at m = {:?}, region {})",
                s.m,
                s.bound_at_m,
                s.region_status.as_str()
            );
            if let Some(note) = &s.note {
                let _ = write!(line, "; {note}");
            }
            line.push('\n');
            Ok(Output { text: line })
        }
        Some(Format::Csv) => Ok(Output {
            text: format!(
                "m,method,bound_at_m,region_status,note\n{},{method_name},{:?},{},{}\n",
                s.m,
                s.bound_at_m,
                s.region_status.as_str(),
                s.note.as_deref().unwrap_or("").replace(',', ";")
            ),
        }),
        Some(Format::Json) => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "samplesize",
            "family": cfg.family,
            "epsilon": eps,
            "delta": delta,
            "result": s,
        })),
    }
}

pub fn estimate(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    cfg.check_command(CommandName::Estimate)?;
    let spectrum = Spectrum::new(cfg.spectrum.clone().ok_or_else(|| "missing key: spectrum".to_string())?)?;
    let mode = cfg.error_mode.unwrap_or(ErrorMode::Absolute);
    let run = EstimatorRun::new(spectrum, cfg.m()?, cfg.reps.unwrap_or(1000), cfg.seed())?;
    if let Some(eps) = cfg.epsilon {
        if !(eps >= 0.0) {
            return Err(Failure::Config(format!("epsilon must be nonnegative, got {eps}")));
        }
        if mode == ErrorMode::Relative && run.trace() == 0.0 {
            return Err(Failure::Config("relative error needs a nonzero trace".into()));
        }
    }
    let estimates = run.estimates();
    let summary = summarize(&run, &estimates);
    let tail = match cfg.epsilon {
        Some(eps) if !estimates.is_empty() => Some(tail_frequency(&estimates, run.trace(), eps, mode)?),
        _ => None,
    };
    match format {
        Format::Csv => {
            let mode_name = match mode {
                ErrorMode::Absolute => "absolute",
                ErrorMode::Relative => "relative",
            };
            Ok(Output {
                text: format!(
                    "reps,trace,mean,variance,exact_variance,epsilon,error_mode,tail_frequency,half_width_95\n\
                     {},{:?},{},{},{:?},{},{},{},{}\n",
                    summary.reps,
                    summary.trace,
                    opt(summary.mean),
                    opt(summary.variance),
                    summary.exact_variance,
                    opt(cfg.epsilon),
                    if cfg.epsilon.is_some() { mode_name } else { "" },
                    opt(tail.map(|t| t.frequency)),
                    opt(tail.map(|t| t.half_width_95)),
                ),
            })
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "estimate",
            "spectrum": run.spectrum,
            "m": run.m,
            "seed": run.seed,
            "summary": summary,
            "epsilon": cfg.epsilon,
            "error_mode": cfg.epsilon.map(|_| mode),
            "tail": tail,
        })),
    }
}

pub fn worstcase(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    cfg.check_command(CommandName::Worstcase)?;
    let family = cfg.family()?;
    let m = cfg.m()?;
    let (spectrum, rank, extremal, regions) = match &family {
        Family::Relative(f) => {
            let s = worst_rel_spectrum(f);
            let rank = effective_rank(s.entries())?;
            let law = extremal_rel_law(f, m)?;
            (s, json!({ "effective_rank": rank }), json!({ "sign": 1.0, "law": law }), json!(rel_estimator_regions(f, m)?))
        }
        Family::Absolute(f) => {
            let s = worst_abs_spectrum(f);
            let rank = stable_rank(s.entries())?;
            let (sign, law) = extremal_abs_law(f, m, 1)?;
            (s, json!({ "stable_rank": rank }), json!({ "sign": sign, "law": law }), json!(abs_estimator_regions(f, m)?))
        }
    };
    let law = trace_estimator_law(spectrum.entries(), m)?;
    let (mean, sd) = (law.mean(), law.variance().sqrt());
    let points = cfg.grid_points.unwrap_or(200).max(2);
    let lo = (mean - 6.0 * sd).max(0.0);
    let hi = mean + 6.0 * sd;
    let mut curve = Vec::with_capacity(points);
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let pdf = if x == 0.0 { law.pdf(x, 0).unwrap_or(f64::NAN) } else { law.pdf(x, 0)? };
        curve.push((x, pdf, law.cdf(x)?));
    }
    match format {
        Format::Csv => {
            let mut text = String::from("x,pdf,cdf\n");
            for (x, p, c) in &curve {
                let _ = writeln!(text, "{x:?},{},{c:?}", if p.is_finite() { format!("{p:?}") } else { String::new() });
            }
            Ok(Output { text })
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "worstcase",
            "family": cfg.family,
            "m": m,
            "spectrum": spectrum,
            "rank": rank,
            "estimator_law": law,
            "extremal_law": extremal,
            "regions": regions,
            "curve": curve.iter().map(|(x, p, c)| json!({ "x": x, "pdf": p, "cdf": c })).collect::<Vec<_>>(),
        })),
    }
}

#[derive(Debug, Serialize)]
struct StepSummary {
    pair: usize,
    m: usize,
    step: usize,
    j: usize,
    k: usize,
    region: (f64, f64),
    worst_margin: f64,
    verdict: Verdict,
    monotonicity_violation: f64,
    monotonicity: Verdict,
}

fn chain_steps(
    pair: usize,
    chain: &MajorizationChain,
    kind: PathKind,
    ms: &[usize],
    options: &ChainCheckOptions,
    out: &mut Vec<StepSummary>,
) -> Result<(), Failure> {
    for &m in ms {
        let alpha = m as f64 / 2.0;
        let reports = chain_dominance(chain, kind, alpha, alpha, options)?;
        for (step, ((prev, next), r)) in chain.pairs().zip(reports).enumerate() {
            let path = DominancePath::from_step(prev, next, kind, alpha, alpha)?;
            let mut violation = 0.0f64;
            for x in [r.region.lower, r.region.upper] {
                violation = violation.max(monotonicity_check(&path, x)?.worst_violation);
            }
            let (j, k) = path.indices();
            out.push(StepSummary {
                pair,
                m,
                step,
                j,
                k,
                region: (r.region.lower, r.region.upper),
                worst_margin: r.worst_margin,
                verdict: r.verdict,
                monotonicity_violation: violation,
                monotonicity: if violation <= 1e-9 { Verdict::Pass } else { Verdict::Fail },
            });
        }
    }
    Ok(())
}

fn uniform_index(rng: &mut CounterRng, n: usize) -> usize {
    ((rng.next_open01() * n as f64) as usize).min(n.saturating_sub(1))
}

pub fn verify(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    cfg.check_command(CommandName::Verify)?;
    let suite = require(cfg.suite, "suite")?;
    let spec = require(cfg.family, "family")?;
    let family = spec.family()?;
    let ms = cfg.ms.clone().unwrap_or_else(|| vec![2, 8]);
    if ms.is_empty() || ms.contains(&0) {
        return Err(Failure::Config("ms must be a nonempty list of positive counts".into()));
    }
    let seed = cfg.seed();
    let mut rng = CounterRng::new(seed, 0);
    let extra = cfg.extra_dims.unwrap_or(3);
    let mut options = ChainCheckOptions::default();
    options.t_points = cfg.t_points.unwrap_or(options.t_points);
    options.x_points = cfg.x_points.unwrap_or(options.x_points);
    options.cells_per_sd = cfg.cells_per_sd.unwrap_or(options.cells_per_sd);

    let suite_name = match suite {
        Suite::Relative => "relative",
        Suite::Absolute => "absolute",
        Suite::Probe => "probe",
    };
    if suite == Suite::Probe {
        let trials = cfg.pairs.unwrap_or(20);
        let probe_family = match spec {
            FamilySpec::Relative { mu } => ProbeFamily::Relative { mu },
            FamilySpec::Absolute { lam, phi } => ProbeFamily::Absolute { lam, phi },
        };
        let reports = ms
            .iter()
            .enumerate()
            .map(|(i, &m)| conjecture_probe(probe_family, m as f64 / 2.0, trials, seed.wrapping_add(i as u64)))
            .collect::<Result<Vec<_>, _>>()?;
        if format == Format::Csv {
            let mut text = String::from("alpha,trials,empirical_max,conjectured_bound,pessimistic_floor,counterexample\n");
            for r in &reports {
                let _ = writeln!(
                    text,
                    "{:?},{},{:?},{:?},{},{}",
                    r.alpha,
                    r.trials,
                    r.empirical_max,
                    r.conjectured_bound,
                    opt(r.pessimistic_floor),
                    r.counterexample.is_some()
                );
            }
            return Ok(Output { text });
        }
        return to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "verify",
            "suite": suite_name,
            "family": spec,
            "seed": seed,
            "ms": ms,
            "reports": reports,
            "verdict": "report-only",
        }));
    }

    let mut steps = Vec::new();
    let pairs = cfg.pairs.unwrap_or(match suite {
        Suite::Relative => 50,
        _ => 20,
    });
    for pair in 0..pairs {
        match (suite, &family) {
            (Suite::Relative, Family::Relative(f)) => {
                let n = rel_min_dim(f).max(2) + uniform_index(&mut rng, extra + 1);
                let (a, b) = random_rel_pair(f, n, &mut rng)?;
                let chain = chain_classical(a.entries(), b.entries())?;
                chain_steps(pair, &chain, PathKind::Relative, &ms, &options, &mut steps)?;
            }
            (Suite::Absolute, Family::Absolute(f)) => {
                let n = abs_min_dim(f).max(3) + uniform_index(&mut rng, extra + 1);
                let (a, b) = random_abs_pair(f, n, &mut rng)?;
                let chain = chain_frobenius(a.entries(), b.entries())?;
                chain_steps(pair, &chain, PathKind::Absolute, &ms, &options, &mut steps)?;
            }
            _ => return Err(Failure::Config(format!("the {suite_name} suite needs a {suite_name} family"))),
        }
    }
    let worst_margin = steps.iter().map(|s| s.worst_margin).fold(f64::INFINITY, f64::min);
    let passed = steps.iter().all(|s| s.verdict == Verdict::Pass && s.monotonicity == Verdict::Pass);
    let verdict = if passed { Verdict::Pass } else { Verdict::Fail };
    let output = match format {
        Format::Csv => {
            let mut text = String::from(
                "pair,m,step,j,k,region_lower,region_upper,worst_margin,verdict,monotonicity_violation,monotonicity\n",
            );
            for s in &steps {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{:?},{:?},{:?},{},{:?},{}",
                    s.pair,
                    s.m,
                    s.step,
                    s.j,
                    s.k,
                    s.region.0,
                    s.region.1,
                    s.worst_margin,
                    verdict_str(s.verdict),
                    s.monotonicity_violation,
                    verdict_str(s.monotonicity)
                );
            }
            Output { text }
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "verify",
            "suite": suite_name,
            "family": spec,
            "seed": seed,
            "pairs": pairs,
            "ms": ms,
            "options": options,
            "steps": steps,
            "worst_margin": if steps.is_empty() { None } else { Some(worst_margin) },
            "verdict": verdict,
        }))?,
    };
    if passed {
        Ok(output)
    } else {
        Err(Failure::ClaimFailed(output))
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    }
}

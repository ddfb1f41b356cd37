//! Command dispatch.

use std::collections::BTreeMap;
use std::io::Write;

use cuspsum_core::acceptance::{self, Outcome};
use cuspsum_core::bounds::{
    longsum_moment_rhs, thm1_rhs, thm2_rhs, thm3_rhs, thm4_rhs, thm5_rhs, BoundParams, Evaluation, ExponentPair,
    DEFAULT_KNOB, MAX_KNOB,
};
use cuspsum_core::coefficients::load_cache;
use cuspsum_core::moments::{
    abs_quantile, exact_moment, exact_moment_parallel, large_value_census_with, moment_growth_fit, MomentSpec,
};
use cuspsum_core::spacing::{spacing_count_bruteforce, spacing_count_pairsum};
use cuspsum_core::sums::{build_step_function, short_sum_direct, ShortSumSpec};
use cuspsum_core::voronoi::error_profile;
use cuspsum_core::Error as CoreError;

use crate::config::{parse_config, Format, Job, RunConfig};
use crate::output::{evaluation_json, evaluation_report, write_json, Cell, Report};
use crate::tables::{cache_dir, cache_file, existing_cache, generate, save_atomic, table_for};
use crate::CliError;

/// What a command produced, before formatting.
enum Produced {
    Table(Report),
    Bound(Evaluation),
}

/// Runs `config`, writing to its output path or stdout; notes go to stderr.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let mut buf = Vec::new();
    let result = run_to(config, &mut buf, &mut std::io::stderr());
    match &config.output_path {
        Some(p) => std::fs::write(p, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    result
}

/// Runs `config` into the given writers. Output is written even when the
/// command then reports a criterion failure.
pub fn run_to(config: &RunConfig, out: &mut dyn Write, notes: &mut dyn Write) -> Result<(), CliError> {
    let (produced, verdict) = execute(config, notes)?;
    match (produced, config.output_format) {
        (Produced::Table(r), Format::Csv) => r.write_csv(out, notes)?,
        (Produced::Table(r), Format::Json) => write_json(out, &r.to_json(config.command.name()))?,
        (Produced::Bound(e), Format::Json) => write_json(out, &evaluation_json(&e))?,
        (Produced::Bound(e), Format::Csv) => evaluation_report(&e).write_csv(out, notes)?,
    }
    verdict
}

type Executed = (Produced, Result<(), CliError>);

fn execute(config: &RunConfig, notes: &mut dyn Write) -> Result<Executed, CliError> {
    let cache = config.coeff_cache_path.as_deref();
    let ok = |r: Report| Ok((Produced::Table(r), Ok(())));
    match config.job()? {
        Job::Gen { n_max } => {
            let t = generate(n_max)?;
            let path = match cache {
                Some(p) => p.to_path_buf(),
                None => cache_file(&cache_dir(), n_max),
            };
            save_atomic(&t, &path)?;
            let mut r = Report::new(&["n_max", "path"]);
            r.row(vec![n_max.into(), path.display().to_string().into()]);
            ok(r)
        }
        Job::Validate { n_max } => validate(&existing_cache(cache, n_max)?),
        Job::Sum { spec, x } => {
            let t = table_for(cache, spec.max_index())?;
            match x {
                Some(x) => {
                    let s = short_sum_direct(x, &spec, &t)?;
                    let mut r = Report::new(&["x", "re", "im", "abs"]);
                    r.row(vec![x.into(), s.re.into(), s.im.into(), s.norm().into()]);
                    ok(r)
                }
                None => {
                    let sf = build_step_function(&spec, &t)?;
                    let mut r = Report::new(&["x_left", "x_right", "re", "im"]);
                    for (l, rt, v) in sf.plateaus() {
                        r.row(vec![l.into(), rt.into(), v.re.into(), v.im.into()]);
                    }
                    r.note("plateaus", sf.plateau_count());
                    ok(r)
                }
            }
        }
        Job::Voronoi { x, twist, truncations } => {
            let top = truncations.iter().cloned().fold(x, f64::max);
            let t = table_for(cache, top.floor() as u64)?;
            let p = error_profile(x, twist, &truncations, &t)?;
            let mut r = Report::new(&["N", "error", "main_re", "main_im"]);
            for ((n, e), m) in p.n_values.iter().zip(&p.errors).zip(&p.main_terms) {
                r.row(vec![(*n).into(), (*e).into(), m.re.into(), m.im.into()]);
            }
            r.note("direct_re", p.direct.re);
            r.note("direct_im", p.direct.im);
            r.note("slope", p.fitted_slope);
            ok(r)
        }
        Job::Moment { spec, a, parts } => {
            let t = table_for(cache, spec.max_index())?;
            let ms = MomentSpec::new(a, spec)?;
            let m = if parts == 1 {
                exact_moment(&ms, &t)?
            } else {
                exact_moment_parallel(&ms, &t, parts)?
            };
            let tw = spec.twist();
            let mut r = Report::new(&[
                "M",
                "Delta",
                "k",
                "h",
                "A",
                "value",
                "max_abs",
                "argmax",
                "plateaus",
                "error_budget",
            ]);
            r.row(vec![
                spec.m().into(),
                spec.delta().into(),
                tw.k().into(),
                tw.h().into(),
                a.into(),
                m.value.into(),
                m.max_abs.into(),
                m.argmax.into(),
                m.plateau_count.into(),
                m.error_budget.into(),
            ]);
            ok(r)
        }
        Job::Ladder { a, twist, ladder, rule } => {
            let mut needed = 0;
            for &m in &ladder {
                needed = needed.max(ShortSumSpec::new(m, rule.delta(m), twist)?.max_index());
            }
            let t = table_for(cache, needed)?;
            let fit = moment_growth_fit(a, rule, twist, &ladder, &t)?;
            let mut r = Report::new(&["M", "Delta", "k", "A", "value", "max_abs", "argmax", "thm1_branch", "thm1_value"]);
            for p in &fit.points {
                r.row(vec![
                    p.m.into(),
                    p.delta.into(),
                    p.k.into(),
                    p.a.into(),
                    p.result.value.into(),
                    p.result.max_abs.into(),
                    p.result.argmax.into(),
                    p.thm1.branch.clone().into(),
                    p.thm1.value.map_or(Cell::S(String::new()), Cell::F),
                ]);
            }
            r.note("slope", fit.slope);
            ok(r)
        }
        Job::Census { spec, v, quantile, knob } => {
            let t = table_for(cache, spec.max_index())?;
            let sf = build_step_function(&spec, &t)?;
            let v = v.unwrap_or_else(|| abs_quantile(&sf, quantile));
            let c = large_value_census_with(&sf, v, knob)?;
            let mut r = Report::new(&["x", "abs_S"]);
            for (x, s) in c.points.iter().zip(&c.abs_values) {
                r.row(vec![(*x).into(), (*s).into()]);
            }
            r.note("V", c.v);
            r.note("R", c.r);
            r.note("bound", c.bound_rhs);
            ok(r)
        }
        Job::Spacing { query, bruteforce } => {
            let c = if bruteforce {
                spacing_count_bruteforce(&query)?
            } else {
                spacing_count_pairsum(&query)?
            };
            let mut r = Report::new(&["L", "delta", "omega", "count", "bound_rs", "bound_corollary"]);
            r.row(vec![
                query.l().into(),
                query.delta().into(),
                query.omega().into(),
                c.count.into(),
                c.bound_rs.into(),
                c.bound_corollary.into(),
            ]);
            r.note("rechecked", c.rechecked);
            ok(r)
        }
        Job::Bounds { theorem, values, pair } => Ok((Produced::Bound(evaluate(&theorem, &values, pair)?), Ok(()))),
        Job::CheckAll { seed } => {
            let mut outcomes = acceptance::run_core(seed);
            outcomes.insert(outcomes.len() - 1, cli_determinism());
            let mut r = Report::new(&["id", "criterion", "result", "detail"]);
            for o in &outcomes {
                r.row(vec![
                    o.id.into(),
                    o.name.into(),
                    if o.passed { "PASS" } else { "FAIL" }.into(),
                    o.detail.clone().into(),
                ]);
                if let Some(s) = o.elapsed {
                    writeln!(notes, "runtime {}: {s:.2}s", o.id)?;
                }
            }
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
            r.note("passed", outcomes.len() - failed.len());
            r.note("failed", failed.len());
            let verdict = if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Criterion(format!("criteria failed: {}", failed.join(", "))))
            };
            Ok((Produced::Table(r), verdict))
        }
    }
}

fn validate(path: &std::path::Path) -> Result<Executed, CliError> {
    let mut r = Report::new(&["check", "witness", "severity", "detail"]);
    match load_cache(path) {
        Ok((t, report)) => {
            for v in &report.violations {
                let kind = format!("{v:?}");
                let check = kind.split([' ', '{']).next().unwrap_or("").to_string();
                r.row(vec![
                    check.into(),
                    v.witness().into(),
                    format!("{:?}", v.severity_for_loaded()).to_lowercase().into(),
                    kind.into(),
                ]);
            }
            r.note("n_max", t.n_max());
            r.note("violations", report.len());
            let verdict = if report.is_empty() {
                Ok(())
            } else {
                Err(CliError::Criterion(format!("{} table violations", report.len())))
            };
            Ok((Produced::Table(r), verdict))
        }
        Err(e @ (CoreError::Rejected(_) | CoreError::Cache { .. })) => {
            r.row(vec!["rejected".into(), 0u64.into(), "error".into(), e.to_string().into()]);
            Ok((Produced::Table(r), Err(CliError::Criterion(e.to_string()))))
        }
        Err(e) => Err(e.into()),
    }
}

fn evaluate(theorem: &str, values: &BTreeMap<String, f64>, pair: ExponentPair) -> Result<Evaluation, CliError> {
    let get = |key: &str, default: Option<f64>| {
        values
            .get(key)
            .copied()
            .or(default)
            .ok_or_else(|| CliError::Usage(format!("missing required parameter `--{key}`")))
    };
    let positive = |key: &str, min: f64| -> Result<f64, CliError> {
        let v = get(key, if key == "k" { Some(1.0) } else { None })?;
        if v >= min {
            Ok(v)
        } else {
            Err(CliError::Usage(format!("`{key}`: must be >= {min}, got {v}")))
        }
    };
    let eps = get("eps", Some(DEFAULT_KNOB))?;
    if !(0.0..=MAX_KNOB).contains(&eps) {
        return Err(CliError::Usage(format!("`eps`: {eps} is outside [0, {MAX_KNOB}]")));
    }
    let params = |a_default: Option<f64>| -> Result<BoundParams, CliError> {
        let b = BoundParams {
            alpha: get("alpha", Some(0.0))?,
            beta: get("beta", Some(1.0))?,
            gamma: get("gamma", Some(0.0))?,
            v0: get("V0", Some(1.0))?,
            a: get("A", a_default)?,
            k: positive("k", 1.0)?,
            m: positive("M", 1.0)?,
            delta: get("delta-len", Some(1.0))?,
            eps_knob: eps,
            ..Default::default()
        };
        b.validate()?;
        Ok(b)
    };
    Ok(match theorem {
        "thm1" => thm1_rhs(positive("k", 1.0)?, positive("M", 1.0)?, positive("delta-len", f64::MIN_POSITIVE)?, eps),
        "thm2" => {
            let knob = get("delta", Some(DEFAULT_KNOB))?;
            if !(0.0..=MAX_KNOB).contains(&knob) {
                return Err(CliError::Usage(format!("`delta`: {knob} is outside [0, {MAX_KNOB}]")));
            }
            thm2_rhs(
                positive("k", 1.0)?,
                positive("M", 1.0)?,
                positive("delta-len", f64::MIN_POSITIVE)?,
                positive("V", f64::MIN_POSITIVE)?,
                pair,
                knob,
            )
        }
        "thm3" => thm3_rhs(&params(None)?, pair),
        "thm4" => thm4_rhs(positive("k", 1.0)?, positive("M", 1.0)?, positive("A", 1.0)?, eps),
        "thm5" => thm5_rhs(positive("M", 1.0)?, positive("delta-len", f64::MIN_POSITIVE)?, positive("A", 1.0)?, eps),
        "longsum" => longsum_moment_rhs(&params(None)?, pair),
        other => return Err(CliError::Usage(format!("unknown calculator `{other}`"))),
    })
}

/// Commands run twice in-process; their outputs must match byte for byte.
pub const DETERMINISM_PROBES: [&str; 9] = [
    "sum --M 1000 --delta 30 --k 3 --h 1 --x 1012.5",
    "sum --M 500 --delta 20 --k 4 --h 3",
    "voronoi --x 1000 --k 1 --N 16,64,256",
    "moment --M 2000 --delta 40 --k 5 --h 2 --A 4 --parts 3",
    "ladder --A 2 --ladder 2^8..2^11 --format json",
    "census --M 2000 --delta 25",
    "spacing --L 16 --delta 1e-3",
    "bounds thm2 --k 2 --M 1e5 --delta-len 300 --V 40",
    "bounds thm5 --M 1e6 --delta-len 100 --A 8 --format csv",
];

fn capture(args: &str) -> Result<Vec<u8>, CliError> {
    let config = parse_config(std::iter::once("cuspsum").chain(args.split_whitespace()))?;
    let (mut out, mut notes) = (Vec::new(), Vec::new());
    run_to(&config, &mut out, &mut notes)?;
    out.extend(notes);
    Ok(out)
}

pub fn cli_determinism() -> Outcome {
    let mut differing = Vec::new();
    for probe in DETERMINISM_PROBES {
        match (capture(probe), capture(probe)) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => differing.push(probe.split_whitespace().next().unwrap_or("").to_string()),
            (Err(e), _) | (_, Err(e)) => {
                return Outcome {
                    id: "13a",
                    name: "command reruns identical",
                    passed: false,
                    detail: format!("`{probe}` failed: {e}"),
                    elapsed: None,
                }
            }
        }
    }
    Outcome {
        id: "13a",
        name: "command reruns identical",
        passed: differing.is_empty(),
        detail: format!(
            "{} commands run twice, differing {}",
            DETERMINISM_PROBES.len(),
            if differing.is_empty() { "none".into() } else { differing.join(", ") }
        ),
        elapsed: None,
    }
}

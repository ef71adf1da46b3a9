//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use dbmatch_core::config::{load_model, load_plan, ModelSpec};
use dbmatch_core::detectors::{count_test_from_llr, glrt, llr_matrix, np_oracle_from_llr, SumTest};
use dbmatch_core::experiments::{
    bound_report, count_plan_for, estimate_risk, exact_tv_small, sweep as run_sweep,
    DetectorConfig, PdMethodChoice, SweepRow, TauCountRule, TrialPlan, DEFAULT_TRIALS,
};
use dbmatch_core::exponents::{chernoff_e, kl_divergences, Side};
use dbmatch_core::io::{read_matrix, write_matrix, write_risk_csv, write_sigma};
use dbmatch_core::models::{sample_alt, sample_null};
use dbmatch_core::{
    Capacity, DatabasePair, DetectorKind, Error, JointModel, PdMethod, Result, Verdict,
};
use serde_json::json;

use crate::{
    BoundsArgs, ChernoffArgs, DetectArgs, DetectorArgs, Format, Hypothesis, RiskArgs, SampleArgs,
    SweepArgs, TvArgs, ValidateArgs,
};

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Writes `bytes` to `out` or stdout.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| io_err(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json_bytes(value: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

fn build(spec: &ModelSpec) -> Result<JointModel> {
    spec.build()
}

fn parse_detectors(args: &DetectorArgs) -> Result<Vec<DetectorConfig>> {
    if args.detectors.is_empty() {
        return Err(Error::Validation(
            "at least one --detector is required".into(),
        ));
    }
    let pd_method: PdMethodChoice = args.pd_method.parse()?;
    let mut used_tau_count = false;
    let configs = args
        .detectors
        .iter()
        .map(|name| {
            Ok(match name.parse::<DetectorKind>()? {
                DetectorKind::Glrt => DetectorConfig::Glrt {
                    tau: args.tau.unwrap_or(0.0),
                },
                DetectorKind::Sum => DetectorConfig::Sum { tau: args.tau },
                DetectorKind::Np => DetectorConfig::Np,
                DetectorKind::Count => {
                    used_tau_count = true;
                    let raw = args.tau_count.as_deref().ok_or_else(|| {
                        Error::Validation("--detector count requires --tau-count".into())
                    })?;
                    DetectorConfig::Count {
                        tau_count: raw.parse::<TauCountRule>()?,
                        pd_method,
                    }
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if args.tau_count.is_some() && !used_tau_count {
        return Err(Error::Validation(
            "--tau-count only applies to --detector count".into(),
        ));
    }
    Ok(configs)
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    if let Some(path) = &args.source.model {
        let spec = load_model(path)?;
        println!("ok: {} ({} model)", path.display(), spec.kind_label());
    }
    if let Some(path) = &args.source.plan {
        let plan = load_plan(path, None).or_else(|e| match e {
            // A plan without a seed is well-formed; the seed can come from --seed.
            Error::Config { ref message, .. } if message.starts_with("seed is required") => {
                load_plan(path, Some(0))
            }
            other => Err(other),
        })?;
        let points = plan.sweep.as_ref().map_or(1, |g| {
            g.param.as_ref().map_or(1, Vec::len)
                * g.n.as_ref().map_or(1, Vec::len)
                * g.d.as_ref().map_or(1, Vec::len)
        });
        println!(
            "ok: {} (plan, {} model, {} detector(s), {points} grid point(s))",
            path.display(),
            plan.model.kind_label(),
            plan.detectors.len()
        );
    }
    Ok(())
}

pub fn sample(args: &SampleArgs) -> Result<()> {
    let spec = load_model(&args.model)?;
    let model = build(&spec)?;
    let pair = match args.hypothesis {
        Hypothesis::H0 => sample_null(&model, args.n, args.d, args.seed)?,
        Hypothesis::H1 => sample_alt(&model, args.n, args.d, args.seed, None)?,
    };
    std::fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;
    let integer = matches!(model, JointModel::Discrete(_));
    let write = |name: &str, f: &dyn Fn(BufWriter<File>) -> Result<()>| -> Result<()> {
        let path = args.out.join(name);
        let file = File::create(&path).map_err(|e| io_err(&path, e))?;
        f(BufWriter::new(file))
    };
    write("x.csv", &|w| write_matrix(w, &pair.x, integer))?;
    write("y.csv", &|w| write_matrix(w, &pair.y, integer))?;
    if let Some(sigma) = &pair.hidden_sigma {
        write("sigma.csv", &|w| write_sigma(w, sigma))?;
    }
    Ok(())
}

fn read_pair(x: &Path, y: &Path) -> Result<DatabasePair> {
    let open = |p: &Path| File::open(p).map_err(|e| io_err(p, e));
    let xm = read_matrix(open(x)?, &x.display().to_string())?;
    let ym = read_matrix(open(y)?, &y.display().to_string())?;
    DatabasePair::new(xm, ym, None)
}

fn verdicts_csv(verdicts: &[Verdict]) -> Vec<u8> {
    let mut s = String::from("detector,decision,statistic,threshold\n");
    for v in verdicts {
        s.push_str(&format!(
            "{},{},{},{}\n",
            v.detector,
            u8::from(v.decision),
            v.statistic,
            v.threshold
        ));
    }
    s.into_bytes()
}

pub fn detect(args: &DetectArgs) -> Result<()> {
    let spec = load_model(&args.model)?;
    let model = build(&spec)?;
    let pair = read_pair(&args.x, &args.y)?;
    let configs = parse_detectors(&args.detectors)?;
    let cap = Capacity::default();
    let (n, d) = (pair.n(), pair.d());
    let needs_llr = configs
        .iter()
        .any(|c| !matches!(c, DetectorConfig::Sum { .. } | DetectorConfig::Glrt { .. }));
    let llr = if needs_llr {
        Some(llr_matrix(&model, &pair)?)
    } else {
        None
    };
    let mut verdicts = Vec::with_capacity(configs.len());
    for cfg in &configs {
        let v = match cfg {
            DetectorConfig::Glrt { tau } => glrt(&model, &pair, *tau)?,
            DetectorConfig::Sum { tau } => SumTest::new(&model)?.run(&pair, *tau)?,
            DetectorConfig::Np => np_oracle_from_llr(llr.as_ref().expect("computed above"), &cap)?,
            DetectorConfig::Count {
                tau_count,
                pd_method,
            } => {
                let method = match (pd_method.resolve(&model, 0), args.seed) {
                    (PdMethod::MonteCarlo { samples, .. }, Some(seed)) => {
                        PdMethod::MonteCarlo { samples, seed }
                    }
                    (PdMethod::MonteCarlo { .. }, None) => {
                        return Err(Error::Validation(
                            "--seed is required for Monte-Carlo P_d".into(),
                        ))
                    }
                    (exact, _) => exact,
                };
                let plan = count_plan_for(&model, n, d, *tau_count, method)?;
                count_test_from_llr(llr.as_ref().expect("computed above"), d, &plan)?
            }
        };
        verdicts.push(v);
    }
    let bytes = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&verdicts)?,
        Format::Csv => verdicts_csv(&verdicts),
    };
    emit(args.output.out.as_deref(), &bytes)
}

fn rows_output(rows: &[SweepRow], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_risk_csv(&mut buf, rows)?;
            Ok(buf)
        }
        Format::Json => {
            let values: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| match &r.outcome {
                    Ok(est) => serde_json::to_value(est).unwrap_or(serde_json::Value::Null),
                    Err(e) => json!({
                        "model_kind": r.model_kind,
                        "param": r.param,
                        "n": r.n,
                        "d": r.d,
                        "detector": r.detector,
                        "error": e.to_string(),
                    }),
                })
                .collect();
            json_bytes(&values)
        }
    }
}

pub fn risk(args: &RiskArgs) -> Result<()> {
    let mut plan = match &args.plan {
        Some(path) => {
            let mut plan = load_plan(path, args.seed)?;
            if !args.detectors.detectors.is_empty() {
                plan.detectors = parse_detectors(&args.detectors)?;
            }
            plan
        }
        None => {
            let model_path = args.model.as_ref().expect("clap enforces --model");
            TrialPlan {
                model: load_model(model_path)?,
                n: args.n.expect("clap enforces --n"),
                d: args.d.expect("clap enforces --d"),
                detectors: parse_detectors(&args.detectors)?,
                trials: DEFAULT_TRIALS,
                seed: args
                    .seed
                    .ok_or_else(|| Error::Validation("--seed is required".into()))?,
                sweep: None,
                capacity: Capacity::default(),
            }
        }
    };
    if let Some(t) = args.trials {
        plan.trials = t;
    }
    plan.sweep = None;
    let estimates = estimate_risk(&plan)?;
    let rows: Vec<SweepRow> = estimates
        .into_iter()
        .map(|e| SweepRow {
            model_kind: e.model_kind.clone(),
            param: e.param,
            n: e.n,
            d: e.d,
            detector: e.detector,
            outcome: Ok(e),
        })
        .collect();
    let bytes = rows_output(&rows, args.output.format.unwrap_or(Format::Csv))?;
    emit(args.output.out.as_deref(), &bytes)
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let mut plan = load_plan(&args.plan, args.seed)?;
    if let Some(t) = args.trials {
        plan.trials = t;
    }
    let rows = run_sweep(&plan)?;
    let bytes = rows_output(&rows, args.output.format.unwrap_or(Format::Csv))?;
    emit(args.output.out.as_deref(), &bytes)?;
    let mut warnings = 0;
    for r in &rows {
        if let Err(e) = &r.outcome {
            warnings += 1;
            let param = r.param.map_or_else(|| "-".to_string(), |p| p.to_string());
            eprintln!(
                "warning: param={param} d={} n={} detector={}: {e}",
                r.d, r.n, r.detector
            );
        }
    }
    if warnings > 0 {
        eprintln!("{warnings} row(s) failed");
    }
    Ok(())
}

pub fn bounds(args: &BoundsArgs) -> Result<()> {
    let model = build(&load_model(&args.model)?)?;
    let report = bound_report(
        &model,
        args.n,
        args.d,
        args.tau,
        args.tau_count,
        &Capacity::default(),
    )?;
    emit(args.out.as_deref(), &json_bytes(&report)?)
}

pub fn chernoff(args: &ChernoffArgs) -> Result<()> {
    if args.points < 2 {
        return Err(Error::Validation("--points must be at least 2".into()));
    }
    let model = build(&load_model(&args.model)?)?;
    let kl = kl_divergences(&model)?;
    let (lo, hi) = (-kl.kl_qp, kl.kl_pq);
    let mut rows = Vec::with_capacity(args.points);
    for k in 0..args.points {
        let theta = if k + 1 == args.points {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (args.points - 1) as f64
        };
        let eq = chernoff_e(&model, theta, Side::Q)?;
        let ep = chernoff_e(&model, theta, Side::P)?;
        rows.push((theta, eq.value, ep.value, eq.argmax_lambda));
    }
    let bytes = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("theta,E_Q,E_P,argmax_lambda\n");
            for (t, q, p, l) in &rows {
                s.push_str(&format!("{t},{q},{p},{l}\n"));
            }
            s.into_bytes()
        }
        Format::Json => {
            let values: Vec<_> = rows
                .iter()
                .map(|(t, q, p, l)| json!({"theta": t, "E_Q": q, "E_P": p, "argmax_lambda": l}))
                .collect();
            json_bytes(&values)?
        }
    };
    emit(args.output.out.as_deref(), &bytes)
}

pub fn tv_oracle(args: &TvArgs) -> Result<()> {
    let model = build(&load_model(&args.model)?)?;
    let JointModel::Discrete(dm) = &model else {
        return Err(Error::Unsupported(
            "the exact TV oracle needs a discrete or Bernoulli model".into(),
        ));
    };
    let r = exact_tv_small(dm, args.n, args.d, &Capacity::default())?;
    emit(
        args.out.as_deref(),
        &json_bytes(&json!({"n": args.n, "d": args.d, "tv": r.tv, "bayes_risk": r.bayes_risk}))?,
    )
}

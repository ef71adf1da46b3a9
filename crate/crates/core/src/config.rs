//! Model and plan files.
//!
//! Both are TOML. A model file:
//!
//! ```toml
//! kind = "discrete"
//! alphabet_size = 2
//! joint = [[0.4, 0.1], [0.1, 0.4]]   # nested or flat row-major
//! marginal = [0.5, 0.5]              # optional, checked against the joint
//! ```
//!
//! A plan file carries the model under `[model]`, the sizes, one
//! `[[detectors]]` table per detector and an optional `[sweep]` grid:
//!
//! ```toml
//! n = 100
//! d = 10
//! trials = 2000
//! seed = 7
//!
//! [model]
//! kind = "gaussian"
//! rho = 0.5
//!
//! [[detectors]]
//! kind = "sum"
//!
//! [[detectors]]
//! kind = "count"
//! tau_count = "min-bound"
//!
//! [sweep]
//! param = { start = 0.05, stop = 0.95, step = 0.05 }
//! d = [2, 10, 100]
//! ```
//!
//! Validation failures are reported as `path:line: message`.

use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::capacity::Capacity;
use crate::detectors::DEFAULT_PD_SAMPLES;
use crate::error::{Error, Result};
use crate::experiments::{
    DetectorConfig, PdMethodChoice, SweepGrid, TauCountRule, TrialPlan, DEFAULT_TRIALS,
};
use crate::models::{BernoulliModel, DiscreteJointModel, GaussianModel, JointModel};

/// Rejects a field that is present but does not apply.
type Forbid<'a> = dyn Fn(&str, Option<Range<usize>>) -> Result<()> + 'a;

/// Largest number of points a sweep grid axis may hold.
pub const MAX_GRID_POINTS: usize = 10_000;

/// A model description, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Gaussian {
        rho: f64,
    },
    Bernoulli {
        tau: f64,
        p: f64,
    },
    Discrete {
        alphabet_size: usize,
        /// Row-major `m × m` joint.
        joint: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marginal: Option<Vec<f64>>,
    },
}

impl ModelSpec {
    /// Validates and builds the model.
    pub fn build(&self) -> Result<JointModel> {
        match self {
            Self::Gaussian { rho } => Ok(GaussianModel::new(*rho)?.into()),
            Self::Bernoulli { tau, p } => Ok(BernoulliModel::new(*tau, *p)?.joint()?.into()),
            Self::Discrete {
                alphabet_size,
                joint,
                marginal,
            } => {
                let m = match marginal {
                    Some(q) => {
                        DiscreteJointModel::with_marginal(*alphabet_size, joint.clone(), q.clone())?
                    }
                    None => DiscreteJointModel::new(*alphabet_size, joint.clone())?,
                };
                Ok(m.into())
            }
        }
    }

    #[must_use]
    pub fn kind_label(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::Bernoulli { .. } => "bernoulli",
            Self::Discrete { .. } => "discrete",
        }
    }

    /// The sweepable scalar: `ρ` for Gaussian, `τ` for Bernoulli.
    #[must_use]
    pub fn param(&self) -> Option<f64> {
        match self {
            Self::Gaussian { rho } => Some(*rho),
            Self::Bernoulli { tau, .. } => Some(*tau),
            Self::Discrete { .. } => None,
        }
    }

    /// Copy with the sweepable scalar replaced.
    pub fn with_param(&self, value: f64) -> Result<Self> {
        match self {
            Self::Gaussian { .. } => Ok(Self::Gaussian { rho: value }),
            Self::Bernoulli { p, .. } => Ok(Self::Bernoulli { tau: value, p: *p }),
            Self::Discrete { .. } => Err(Error::Validation(
                "discrete models have no scalar parameter to sweep".into(),
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Raw file layouts
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: Spanned<String>,
    rho: Option<Spanned<f64>>,
    tau: Option<Spanned<f64>>,
    p: Option<Spanned<f64>>,
    alphabet_size: Option<Spanned<i64>>,
    joint: Option<Spanned<RawJoint>>,
    marginal: Option<Spanned<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawJoint {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    model: Spanned<RawModel>,
    n: Spanned<i64>,
    d: Spanned<i64>,
    trials: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    detectors: Option<Vec<Spanned<RawDetector>>>,
    sweep: Option<Spanned<RawSweep>>,
    capacity: Option<Spanned<Capacity>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    kind: Spanned<String>,
    tau: Option<Spanned<f64>>,
    tau_count: Option<Spanned<RawTauCount>>,
    pd_method: Option<Spanned<String>>,
    pd_samples: Option<Spanned<i64>>,
    pd_seed: Option<Spanned<i64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTauCount {
    Value(f64),
    Rule(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: Option<Spanned<RawGrid<f64>>>,
    n: Option<Spanned<RawGrid<i64>>>,
    d: Option<Spanned<RawGrid<i64>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawGrid<T> {
    List(Vec<T>),
    Range { start: T, stop: T, step: T },
}

// ---------------------------------------------------------------------------
// Error location
// ---------------------------------------------------------------------------

struct Source<'a> {
    path: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, span: &Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn err(&self, span: &Range<usize>, message: impl Into<String>) -> Error {
        Error::Config {
            path: self.path.to_string(),
            line: self.line(span),
            message: message.into(),
        }
    }

    fn at(&self, span: &Range<usize>, e: Error) -> Error {
        self.err(span, e.to_string())
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        toml::from_str(self.text).map_err(|e| Error::Config {
            path: self.path.to_string(),
            line: e.span().map_or(1, |s| self.line(&s)),
            message: e.message().trim().to_string(),
        })
    }
}

fn positive(src: &Source<'_>, field: &str, v: &Spanned<i64>) -> Result<usize> {
    usize::try_from(*v.get_ref())
        .ok()
        .filter(|&x| x > 0)
        .ok_or_else(|| {
            src.err(
                &v.span(),
                format!("{field} must be a positive integer, got {}", v.get_ref()),
            )
        })
}

fn seed_value(src: &Source<'_>, field: &str, v: &Spanned<i64>) -> Result<u64> {
    u64::try_from(*v.get_ref())
        .map_err(|_| src.err(&v.span(), format!("{field} must be non-negative")))
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

fn model_from_raw(src: &Source<'_>, raw: &Spanned<RawModel>) -> Result<ModelSpec> {
    let r = raw.get_ref();
    let kind = r.kind.get_ref().as_str();
    let kind_span = r.kind.span();
    let forbid = |name: &str, present: Option<Range<usize>>| match present {
        Some(span) => Err(src.err(
            &span,
            format!("field '{name}' does not apply to kind '{kind}'"),
        )),
        None => Ok(()),
    };
    let require = |name: &str, v: Option<&Spanned<f64>>| {
        v.map(|s| *s.get_ref())
            .ok_or_else(|| src.err(&kind_span, format!("kind '{kind}' requires field '{name}'")))
    };
    let spec = match kind {
        "gaussian" => {
            forbid("tau", r.tau.as_ref().map(Spanned::span))?;
            forbid("p", r.p.as_ref().map(Spanned::span))?;
            forbid("alphabet_size", r.alphabet_size.as_ref().map(Spanned::span))?;
            forbid("joint", r.joint.as_ref().map(Spanned::span))?;
            forbid("marginal", r.marginal.as_ref().map(Spanned::span))?;
            ModelSpec::Gaussian {
                rho: require("rho", r.rho.as_ref())?,
            }
        }
        "bernoulli" => {
            forbid("rho", r.rho.as_ref().map(Spanned::span))?;
            forbid("alphabet_size", r.alphabet_size.as_ref().map(Spanned::span))?;
            forbid("joint", r.joint.as_ref().map(Spanned::span))?;
            forbid("marginal", r.marginal.as_ref().map(Spanned::span))?;
            ModelSpec::Bernoulli {
                tau: require("tau", r.tau.as_ref())?,
                p: require("p", r.p.as_ref())?,
            }
        }
        "discrete" => {
            forbid("rho", r.rho.as_ref().map(Spanned::span))?;
            forbid("tau", r.tau.as_ref().map(Spanned::span))?;
            forbid("p", r.p.as_ref().map(Spanned::span))?;
            let size = r.alphabet_size.as_ref().ok_or_else(|| {
                src.err(&kind_span, "kind 'discrete' requires field 'alphabet_size'")
            })?;
            let m = positive(src, "alphabet_size", size)?;
            let joint = r
                .joint
                .as_ref()
                .ok_or_else(|| src.err(&kind_span, "kind 'discrete' requires field 'joint'"))?;
            let flat = match joint.get_ref() {
                RawJoint::Flat(v) => v.clone(),
                RawJoint::Nested(rows) => {
                    if rows.len() != m || rows.iter().any(|row| row.len() != m) {
                        return Err(src.err(
                            &joint.span(),
                            format!("shape: joint must be {m} rows of {m} entries"),
                        ));
                    }
                    rows.concat()
                }
            };
            ModelSpec::Discrete {
                alphabet_size: m,
                joint: flat,
                marginal: r.marginal.as_ref().map(|q| q.get_ref().clone()),
            }
        }
        other => {
            return Err(src.err(
                &kind_span,
                format!("unknown model kind '{other}' (expected gaussian, bernoulli or discrete)"),
            ))
        }
    };
    if let Err(e) = spec.build() {
        let msg = e.to_string();
        let span = match &spec {
            ModelSpec::Gaussian { .. } => r.rho.as_ref().map(Spanned::span),
            ModelSpec::Bernoulli { .. } => {
                if msg.contains("tau") {
                    r.tau.as_ref().map(Spanned::span)
                } else {
                    r.p.as_ref().map(Spanned::span)
                }
            }
            ModelSpec::Discrete { .. } => {
                if msg.contains("marginal") && r.marginal.is_some() {
                    r.marginal.as_ref().map(Spanned::span)
                } else {
                    r.joint.as_ref().map(Spanned::span)
                }
            }
        };
        return Err(src.at(&span.unwrap_or(kind_span), e));
    }
    Ok(spec)
}

/// Parses and validates a model file's contents.
pub fn parse_model(text: &str, path: &str) -> Result<ModelSpec> {
    let src = Source { path, text };
    let raw: RawModel = src.parse()?;
    model_from_raw(&src, &Spanned::new(0..0, raw))
}

/// Reads and validates a model file.
pub fn load_model(path: &Path) -> Result<ModelSpec> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_model(&text, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

fn detector_from_raw(src: &Source<'_>, raw: &Spanned<RawDetector>) -> Result<DetectorConfig> {
    let r = raw.get_ref();
    let kind = r.kind.get_ref().as_str();
    let forbid = |name: &str, span: Option<Range<usize>>| match span {
        Some(s) => Err(src.err(
            &s,
            format!("field '{name}' does not apply to detector '{kind}'"),
        )),
        None => Ok(()),
    };
    let tau = r.tau.as_ref().map(|t| *t.get_ref());
    let count_fields = |src_forbid: &Forbid| -> Result<()> {
        src_forbid("tau_count", r.tau_count.as_ref().map(Spanned::span))?;
        src_forbid("pd_method", r.pd_method.as_ref().map(Spanned::span))?;
        src_forbid("pd_samples", r.pd_samples.as_ref().map(Spanned::span))?;
        src_forbid("pd_seed", r.pd_seed.as_ref().map(Spanned::span))
    };
    match kind {
        "glrt" => {
            count_fields(&forbid)?;
            Ok(DetectorConfig::Glrt {
                tau: tau.unwrap_or(0.0),
            })
        }
        "sum" => {
            count_fields(&forbid)?;
            Ok(DetectorConfig::Sum { tau })
        }
        "np" => {
            count_fields(&forbid)?;
            forbid("tau", r.tau.as_ref().map(Spanned::span))?;
            Ok(DetectorConfig::Np)
        }
        "count" => {
            forbid("tau", r.tau.as_ref().map(Spanned::span))?;
            let tc = r.tau_count.as_ref().ok_or_else(|| {
                src.err(
                    &r.kind.span(),
                    "detector 'count' requires field 'tau_count'",
                )
            })?;
            let tau_count = match tc.get_ref() {
                RawTauCount::Value(v) if v.is_finite() => TauCountRule::Fixed(*v),
                RawTauCount::Value(v) => {
                    return Err(src.err(&tc.span(), format!("tau_count must be finite, got {v}")))
                }
                RawTauCount::Rule(s) => s.parse().map_err(|e| src.at(&tc.span(), e))?,
            };
            let samples = match &r.pd_samples {
                Some(s) => Some(positive(src, "pd_samples", s)? as u64),
                None => None,
            };
            let seed = match &r.pd_seed {
                Some(s) => Some(seed_value(src, "pd_seed", s)?),
                None => None,
            };
            let pd_method = match r
                .pd_method
                .as_ref()
                .map(|m| (m.get_ref().as_str(), m.span()))
            {
                None | Some(("auto", _)) => PdMethodChoice::Auto {
                    samples: samples.unwrap_or(DEFAULT_PD_SAMPLES),
                    seed,
                },
                Some(("exact", span)) => {
                    if let Some(s) = &r.pd_samples {
                        return Err(
                            src.err(&s.span(), "pd_samples does not apply to pd_method 'exact'")
                        );
                    }
                    if r.pd_seed.is_some() {
                        return Err(src.err(&span, "pd_seed does not apply to pd_method 'exact'"));
                    }
                    PdMethodChoice::Exact
                }
                Some(("monte-carlo", _)) => PdMethodChoice::MonteCarlo {
                    samples: samples.unwrap_or(DEFAULT_PD_SAMPLES),
                    seed,
                },
                Some((other, span)) => {
                    return Err(src.err(
                        &span,
                        format!(
                            "unknown pd_method '{other}' (expected auto, exact or monte-carlo)"
                        ),
                    ))
                }
            };
            Ok(DetectorConfig::Count {
                tau_count,
                pd_method,
            })
        }
        other => Err(src.err(
            &r.kind.span(),
            format!("unknown detector '{other}' (expected glrt, sum, count or np)"),
        )),
    }
}

fn float_grid(src: &Source<'_>, g: &Spanned<RawGrid<f64>>) -> Result<Vec<f64>> {
    let span = g.span();
    let values = match g.get_ref() {
        RawGrid::List(v) => v.clone(),
        RawGrid::Range { start, stop, step } => {
            if !(*step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
                return Err(src.err(&span, "range needs finite start ≤ stop and step > 0"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > MAX_GRID_POINTS {
                return Err(Error::Capacity(format!(
                    "{}:{}: grid has {count} points, limit {MAX_GRID_POINTS}",
                    src.path,
                    src.line(&span)
                )));
            }
            // Rounded to 12 decimals so 0.1 + 2·0.1 prints as 0.3.
            (0..count)
                .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
    };
    if values.is_empty() {
        return Err(src.err(&span, "grid must not be empty"));
    }
    Ok(values)
}

fn int_grid(src: &Source<'_>, field: &str, g: &Spanned<RawGrid<i64>>) -> Result<Vec<usize>> {
    let span = g.span();
    let raw = match g.get_ref() {
        RawGrid::List(v) => v.clone(),
        RawGrid::Range { start, stop, step } => {
            if *step <= 0 || stop < start {
                return Err(src.err(&span, "range needs start ≤ stop and step > 0"));
            }
            let count = ((stop - start) / step + 1) as usize;
            if count > MAX_GRID_POINTS {
                return Err(Error::Capacity(format!(
                    "{}:{}: grid has {count} points, limit {MAX_GRID_POINTS}",
                    src.path,
                    src.line(&span)
                )));
            }
            (0..count as i64).map(|k| start + k * step).collect()
        }
    };
    if raw.is_empty() {
        return Err(src.err(&span, "grid must not be empty"));
    }
    raw.into_iter()
        .map(|v| {
            usize::try_from(v).ok().filter(|&x| x > 0).ok_or_else(|| {
                src.err(
                    &span,
                    format!("{field} grid entries must be positive, got {v}"),
                )
            })
        })
        .collect()
}

/// Parses and validates a plan file's contents. `seed_override` replaces
/// the file's seed; one of the two must be present.
pub fn parse_plan(text: &str, path: &str, seed_override: Option<u64>) -> Result<TrialPlan> {
    let src = Source { path, text };
    let raw: RawPlan = src.parse()?;
    let model = model_from_raw(&src, &raw.model)?;
    let n = positive(&src, "n", &raw.n)?;
    let d = positive(&src, "d", &raw.d)?;
    let trials = match &raw.trials {
        Some(t) => positive(&src, "trials", t)? as u64,
        None => DEFAULT_TRIALS,
    };
    let seed = match (seed_override, &raw.seed) {
        (Some(s), _) => s,
        (None, Some(s)) => seed_value(&src, "seed", s)?,
        (None, None) => {
            return Err(src.err(&(0..0), "seed is required (in the plan or via --seed)"))
        }
    };
    let detectors = raw
        .detectors
        .as_ref()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| {
            src.err(
                &(text.len()..text.len()),
                "at least one [[detectors]] table is required",
            )
        })?
        .iter()
        .map(|det| detector_from_raw(&src, det))
        .collect::<Result<Vec<_>>>()?;
    let sweep = match &raw.sweep {
        None => None,
        Some(s) => {
            let r = s.get_ref();
            let param = match &r.param {
                Some(g) => {
                    if model.param().is_none() {
                        return Err(src.err(
                            &g.span(),
                            "discrete models have no scalar parameter to sweep",
                        ));
                    }
                    let values = float_grid(&src, g)?;
                    for &v in &values {
                        model
                            .with_param(v)?
                            .build()
                            .map_err(|e| src.at(&g.span(), e))?;
                    }
                    Some(values)
                }
                None => None,
            };
            Some(SweepGrid {
                param,
                n: r.n.as_ref().map(|g| int_grid(&src, "n", g)).transpose()?,
                d: r.d.as_ref().map(|g| int_grid(&src, "d", g)).transpose()?,
            })
        }
    };
    let capacity = raw.capacity.map(Spanned::into_inner).unwrap_or_default();
    let plan = TrialPlan {
        model,
        n,
        d,
        detectors,
        trials,
        seed,
        sweep,
        capacity,
    };
    plan.validate()?;
    Ok(plan)
}

/// Reads and validates a plan file.
pub fn load_plan(path: &Path, seed_override: Option<u64>) -> Result<TrialPlan> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_plan(&text, &path.display().to_string(), seed_override)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(e: &Error) -> usize {
        match e {
            Error::Config { line, .. } => *line,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_each_model_kind() {
        let g = parse_model("kind = \"gaussian\"\nrho = 0.6\n", "m.toml").unwrap();
        assert_eq!(g, ModelSpec::Gaussian { rho: 0.6 });
        let b = parse_model("kind = \"bernoulli\"\ntau = 0.5\np = 0.5\n", "m.toml").unwrap();
        assert_eq!(b.param(), Some(0.5));
        let nested = parse_model(
            "kind = \"discrete\"\nalphabet_size = 2\njoint = [[0.4, 0.1], [0.1, 0.4]]\n",
            "m.toml",
        )
        .unwrap();
        let flat = parse_model(
            "kind = \"discrete\"\nalphabet_size = 2\njoint = [0.4, 0.1, 0.1, 0.4]\nmarginal = [0.5, 0.5]\n",
            "m.toml",
        )
        .unwrap();
        assert_eq!(nested.build().unwrap().kind(), "discrete");
        assert_eq!(flat.kind_label(), "discrete");
    }

    #[test]
    fn errors_point_at_the_offending_line() {
        let e = parse_model("kind = \"gaussian\"\n\nrho = 1.5\n", "m.toml").unwrap_err();
        assert_eq!(line_of(&e), 3);
        assert!(e.to_string().starts_with("m.toml:3:"));

        let text = "kind = \"discrete\"\nalphabet_size = 2\njoint = [[0.4, 0.1], [0.1, 0.4]]\nmarginal = [0.6, 0.4]\n";
        let e = parse_model(text, "m.toml").unwrap_err();
        assert_eq!(line_of(&e), 4);
        assert!(e.to_string().contains("marginal consistency"), "{e}");

        let e = parse_model(
            "kind = \"discrete\"\nalphabet_size = 2\njoint = [[0.4, 0.2], [0.0, 0.4]]\n",
            "m.toml",
        )
        .unwrap_err();
        assert_eq!(line_of(&e), 3);
        assert!(e.to_string().contains("symmetry"), "{e}");

        let e = parse_model("kind = \"gaussian\"\nrho = 0.5\nbogus = 1\n", "m.toml").unwrap_err();
        assert_eq!(line_of(&e), 3);

        let e = parse_model("kind = \"poisson\"\n", "m.toml").unwrap_err();
        assert_eq!(line_of(&e), 1);

        let e = parse_model("kind = \"bernoulli\"\ntau = 0.5\np = 0.0\n", "m.toml").unwrap_err();
        assert_eq!(line_of(&e), 3);
    }

    const PLAN: &str = r#"n = 100
d = 10
seed = 7

[model]
kind = "gaussian"
rho = 0.5

[[detectors]]
kind = "sum"

[[detectors]]
kind = "count"
tau_count = "min-bound"

[[detectors]]
kind = "glrt"
tau = 0.1

[sweep]
param = { start = 0.05, stop = 0.95, step = 0.05 }
d = [2, 10, 100]
"#;

    #[test]
    fn parses_plan_with_sweep() {
        let plan = parse_plan(PLAN, "p.toml", None).unwrap();
        assert_eq!(plan.trials, DEFAULT_TRIALS);
        assert_eq!(plan.seed, 7);
        assert_eq!(plan.detectors.len(), 3);
        let sweep = plan.sweep.as_ref().unwrap();
        let param = sweep.param.as_ref().unwrap();
        assert_eq!(param.len(), 19);
        assert_eq!(param[5], 0.3);
        assert_eq!(param[18], 0.95);
        assert_eq!(sweep.d.as_deref(), Some(&[2usize, 10, 100][..]));
        assert_eq!(parse_plan(PLAN, "p.toml", Some(9)).unwrap().seed, 9);
    }

    #[test]
    fn plan_errors() {
        let no_seed = PLAN.replace("seed = 7\n", "");
        assert!(parse_plan(&no_seed, "p.toml", None).is_err());
        assert!(parse_plan(&no_seed, "p.toml", Some(1)).is_ok());

        let bad_d = PLAN.replace("d = 10", "d = 0");
        assert_eq!(line_of(&parse_plan(&bad_d, "p.toml", None).unwrap_err()), 2);

        let bad_det = PLAN.replace("kind = \"glrt\"", "kind = \"oracle\"");
        assert_eq!(
            line_of(&parse_plan(&bad_det, "p.toml", None).unwrap_err()),
            17
        );

        let bad_grid = PLAN.replace("stop = 0.95", "stop = 1.0");
        assert!(parse_plan(&bad_grid, "p.toml", None).is_err());
    }
}

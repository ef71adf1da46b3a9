//! Seeded Monte-Carlo risk estimation, parameter sweeps, the exact
//! total-variation oracle for tiny discrete instances and the bound report.
//!
//! Trial `t` of a plan with seed `s` draws its null pair from substream
//! `(s, NullData, t)` and its alternative pair (including the uniformly
//! drawn permutation) from `(s, AltData, t)`. Results therefore depend only
//! on the plan, never on scheduling, and every point of a sweep sees the
//! same underlying streams.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::Capacity;
use crate::config::ModelSpec;
use crate::detectors::{
    count_test_from_llr, glrt_with_llr, llr_matrix, np_oracle_from_llr, CountTestPlan,
    DetectorKind, PdMethod, SumTest, TailTable, DEFAULT_PD_SAMPLES,
};
use crate::error::{Error, Result};
use crate::exponents::{chernoff_e_with, kl_divergences, var_q_centered_kernel, LlrLaw, Side};
use crate::matrix::Matrix;
use crate::models::{
    sample_alt_with, sample_null_with, DatabasePair, DiscreteJointModel, JointModel,
};
use crate::numeric::{for_each_permutation, ln_factorial};
use crate::rng::{substream, Purpose};
use crate::spectral::{
    bound_b, eigenvalues, gaussian_profile, poisson_surrogate_limit, risk_lower_bound_from_moment,
    second_moment_exact_with, strong_lb_fixed_d_threshold, weak_lb_statistic, SpectralProfile,
    SpectrumSource, DEFAULT_GAUSSIAN_TOL,
};

/// Monte-Carlo trials per hypothesis when a plan does not say.
pub const DEFAULT_TRIALS: u64 = 2000;

/// Grid resolution of the `min-bound` threshold rule.
const TAU_RULE_POINTS: usize = 200;

/// How the count test's `τ_count` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauCountRule {
    Fixed(f64),
    /// Minimizes `2n·Q_d/P_d + 4/(n·P_d)` over an evenly spaced grid of
    /// thresholds from `−KL(Q‖P)` up to the larger of `KL(P‖Q)` and the
    /// point where `P_d` falls to `4/n`, using the plan's tail table.
    MinBound,
}

impl FromStr for TauCountRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "min-bound" {
            return Ok(Self::MinBound);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Self::Fixed(v)),
            _ => Err(Error::Validation(format!(
                "tau_count must be a finite number or 'min-bound', got '{s}'"
            ))),
        }
    }
}

/// How `P_d` is obtained. `seed: None` means the plan seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdMethodChoice {
    /// Exact for discrete models, Monte-Carlo for Gaussian.
    Auto {
        samples: u64,
        seed: Option<u64>,
    },
    Exact,
    MonteCarlo {
        samples: u64,
        seed: Option<u64>,
    },
}

impl Default for PdMethodChoice {
    fn default() -> Self {
        Self::Auto {
            samples: DEFAULT_PD_SAMPLES,
            seed: None,
        }
    }
}

impl PdMethodChoice {
    /// Resolves the choice for a model and plan seed.
    #[must_use]
    pub fn resolve(self, model: &JointModel, plan_seed: u64) -> PdMethod {
        match self {
            Self::Exact => PdMethod::ExactConvolution,
            Self::Auto { .. } if matches!(model, JointModel::Discrete(_)) => {
                PdMethod::ExactConvolution
            }
            Self::Auto { samples, seed } | Self::MonteCarlo { samples, seed } => {
                PdMethod::MonteCarlo {
                    samples,
                    seed: seed.unwrap_or(plan_seed),
                }
            }
        }
    }
}

impl FromStr for PdMethodChoice {
    type Err = Error;

    /// `auto`, `exact`, `monte-carlo` or `monte-carlo:<samples>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::default()),
            "exact" => Ok(Self::Exact),
            "monte-carlo" => Ok(Self::MonteCarlo {
                samples: DEFAULT_PD_SAMPLES,
                seed: None,
            }),
            other => match other.strip_prefix("monte-carlo:").map(str::parse::<u64>) {
                Some(Ok(samples)) if samples > 0 => Ok(Self::MonteCarlo { samples, seed: None }),
                _ => Err(Error::Validation(format!(
                    "pd method must be auto, exact, monte-carlo or monte-carlo:<samples>, got '{other}'"
                ))),
            },
        }
    }
}

/// One detector of a plan.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorConfig {
    Glrt {
        tau: f64,
    },
    /// `tau: None` uses `d·n·SKL`.
    Sum {
        tau: Option<f64>,
    },
    Count {
        tau_count: TauCountRule,
        pd_method: PdMethodChoice,
    },
    Np,
}

impl DetectorConfig {
    #[must_use]
    pub fn kind(&self) -> DetectorKind {
        match self {
            Self::Glrt { .. } => DetectorKind::Glrt,
            Self::Sum { .. } => DetectorKind::Sum,
            Self::Count { .. } => DetectorKind::Count,
            Self::Np => DetectorKind::Np,
        }
    }
}

/// Optional grid axes; a missing axis uses the plan's base value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepGrid {
    pub param: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    pub d: Option<Vec<usize>>,
}

/// A Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub model: ModelSpec,
    pub n: usize,
    pub d: usize,
    pub detectors: Vec<DetectorConfig>,
    /// Trials per hypothesis.
    pub trials: u64,
    pub seed: u64,
    pub sweep: Option<SweepGrid>,
    pub capacity: Capacity,
}

impl TrialPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::Validation(format!(
                "n and d must be positive, got n={}, d={}",
                self.n, self.d
            )));
        }
        if self.trials == 0 {
            return Err(Error::Validation("trials must be at least 1".into()));
        }
        if self.detectors.is_empty() {
            return Err(Error::Validation(
                "a plan needs at least one detector".into(),
            ));
        }
        if let Some(g) = &self.sweep {
            let empty = g.param.as_ref().is_some_and(Vec::is_empty)
                || g.n.as_ref().is_some_and(Vec::is_empty)
                || g.d.as_ref().is_some_and(Vec::is_empty);
            if empty {
                return Err(Error::Validation("sweep grids must be non-empty".into()));
            }
            if g.n.iter().chain(g.d.iter()).flatten().any(|&v| v == 0) {
                return Err(Error::Validation(
                    "sweep n and d values must be positive".into(),
                ));
            }
            if g.param.is_some() && self.model.param().is_none() {
                return Err(Error::Validation(
                    "discrete models have no scalar parameter to sweep".into(),
                ));
            }
        }
        self.model.build()?;
        Ok(())
    }
}

/// Empirical Type-I and Type-II error rates of one detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub detector: DetectorKind,
    pub model_kind: String,
    /// `ρ` (Gaussian) or `τ` (Bernoulli); absent for discrete models.
    pub param: Option<f64>,
    pub n: usize,
    pub d: usize,
    pub threshold: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub risk: f64,
    /// `√(fpr(1−fpr)/M + fnr(1−fnr)/M)`.
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

// ---------------------------------------------------------------------------
// Risk estimation
// ---------------------------------------------------------------------------

/// A detector with its model-dependent state built once per grid point.
enum Prepared {
    Glrt { tau: f64 },
    Sum { test: SumTest, threshold: f64 },
    Count { plan: CountTestPlan },
    Np { cap: Capacity },
}

impl Prepared {
    fn new(
        cfg: &DetectorConfig,
        model: &JointModel,
        n: usize,
        d: usize,
        seed: u64,
        cap: &Capacity,
    ) -> Result<Self> {
        Ok(match cfg {
            DetectorConfig::Glrt { tau } => Self::Glrt { tau: *tau },
            DetectorConfig::Sum { tau } => {
                let test = SumTest::new(model)?;
                let threshold = tau.unwrap_or_else(|| test.default_threshold(n, d));
                Self::Sum { test, threshold }
            }
            DetectorConfig::Count {
                tau_count,
                pd_method,
            } => Self::Count {
                plan: count_plan_for(model, n, d, *tau_count, pd_method.resolve(model, seed))?,
            },
            DetectorConfig::Np => {
                if n > cap.max_factorial_n {
                    return Err(Error::Capacity(format!(
                        "the NP oracle enumerates n! permutations and allows n ≤ {}, got {n}",
                        cap.max_factorial_n
                    )));
                }
                Self::Np { cap: *cap }
            }
        })
    }

    fn threshold(&self, n: usize) -> f64 {
        match self {
            Self::Glrt { tau } => *tau,
            Self::Sum { threshold, .. } => *threshold,
            Self::Count { plan } => 0.5 * n as f64 * plan.pd,
            Self::Np { .. } => 1.0,
        }
    }

    fn needs_llr(&self) -> bool {
        !matches!(self, Self::Sum { .. })
    }

    fn decide(
        &self,
        model: &JointModel,
        pair: &DatabasePair,
        llr: Option<&Matrix>,
    ) -> Result<bool> {
        let c = || llr.ok_or_else(|| Error::Invariant("LLR matrix not computed".into()));
        Ok(match self {
            Self::Glrt { tau } => glrt_with_llr(model, pair, c()?, *tau)?.decision,
            Self::Sum { test, threshold } => test.statistic(pair)? >= *threshold,
            Self::Count { plan } => count_test_from_llr(c()?, pair.d(), plan)?.decision,
            Self::Np { cap } => np_oracle_from_llr(c()?, cap)?.decision,
        })
    }
}

/// Count-test plan for `n` rows under a threshold rule. Fails when the
/// chosen threshold leaves `P_d = 0`.
pub fn count_plan_for(
    model: &JointModel,
    n: usize,
    d: usize,
    rule: TauCountRule,
    method: PdMethod,
) -> Result<CountTestPlan> {
    let table = TailTable::new(model, d, method)?;
    let tau = match rule {
        TauCountRule::Fixed(t) => t,
        TauCountRule::MinBound => min_bound_tau(model, &table, n)?,
    };
    let plan = table.plan(tau);
    if !(plan.pd > 0.0) {
        return Err(Error::Validation(format!(
            "count-test plan has P_d = 0 at tau_count = {tau}, so the threshold is vacuous"
        )));
    }
    Ok(plan)
}

/// `τ_count` minimizing the count test's Markov + Chebyshev risk bound.
fn min_bound_tau(model: &JointModel, table: &TailTable, n: usize) -> Result<f64> {
    let kl = kl_divergences(model)?;
    if kl.skl <= 0.0 {
        return Err(Error::Degenerate(
            "the count test needs a dependent model".into(),
        ));
    }
    let nf = n as f64;
    // Past the point where P_d = 4/n the Chebyshev term alone is ≥ 1.
    let lo = -kl.kl_qp;
    let hi = kl.kl_pq.max(table.p_quantile((4.0 / nf).min(1.0)));
    let mut best: Option<(f64, f64)> = None;
    for k in 0..=TAU_RULE_POINTS {
        let tau = lo + (hi - lo) * k as f64 / TAU_RULE_POINTS as f64;
        let ((pd, _), (qd, _)) = table.tails(tau);
        if pd <= 0.0 {
            continue;
        }
        let bound = 2.0 * nf * qd / pd + 4.0 / (nf * pd);
        if best.is_none_or(|(b, _)| bound < b) {
            best = Some((bound, tau));
        }
    }
    best.map(|(_, t)| t)
        .ok_or_else(|| Error::Validation("no threshold on the grid has P_d > 0".into()))
}

fn decisions(prepared: &[&Prepared], pair: &DatabasePair, model: &JointModel) -> Result<Vec<bool>> {
    let llr = if prepared.iter().any(|p| p.needs_llr()) {
        Some(llr_matrix(model, pair)?)
    } else {
        None
    };
    prepared
        .iter()
        .map(|p| p.decide(model, pair, llr.as_ref()))
        .collect()
}

/// Risk estimates for the plan's base point, one per detector in plan
/// order. Any failure aborts the whole estimate.
pub fn estimate_risk(plan: &TrialPlan) -> Result<Vec<RiskEstimate>> {
    plan.validate()?;
    estimate_point(plan, &plan.model, plan.n, plan.d)
        .into_iter()
        .collect()
}

/// Per-detector outcomes at one grid point. A detector that cannot be set
/// up fails alone; a trial failure fails every detector at the point.
fn estimate_point(
    plan: &TrialPlan,
    spec: &ModelSpec,
    n: usize,
    d: usize,
) -> Vec<Result<RiskEstimate>> {
    let model = match spec.build() {
        Ok(m) => m,
        Err(e) => return plan.detectors.iter().map(|_| Err(e.clone())).collect(),
    };
    let prepared: Vec<Result<Prepared>> = plan
        .detectors
        .iter()
        .map(|cfg| Prepared::new(cfg, &model, n, d, plan.seed, &plan.capacity))
        .collect();
    let live: Vec<&Prepared> = prepared.iter().filter_map(|p| p.as_ref().ok()).collect();

    let trial_results: Vec<Result<(Vec<bool>, Vec<bool>)>> = (0..plan.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(plan.seed, Purpose::NullData, t);
            let null = sample_null_with(&model, n, d, &mut rng)
                .map_err(|e| e.context(&format!("trial {t} (H0)")))?;
            let h0 = decisions(&live, &null, &model)
                .map_err(|e| e.context(&format!("trial {t} (H0)")))?;
            let mut rng = substream(plan.seed, Purpose::AltData, t);
            let alt = sample_alt_with(&model, n, d, &mut rng, None)
                .map_err(|e| e.context(&format!("trial {t} (H1)")))?;
            let h1 = decisions(&live, &alt, &model)
                .map_err(|e| e.context(&format!("trial {t} (H1)")))?;
            Ok((h0, h1))
        })
        .collect();

    let mut false_alarms = vec![0u64; live.len()];
    let mut misses = vec![0u64; live.len()];
    let mut failure = None;
    for r in trial_results {
        match r {
            Ok((h0, h1)) => {
                for k in 0..live.len() {
                    false_alarms[k] += u64::from(h0[k]);
                    misses[k] += u64::from(!h1[k]);
                }
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }

    let m = plan.trials as f64;
    let mut k = 0;
    plan.detectors
        .iter()
        .zip(prepared)
        .map(|(cfg, p)| {
            let p = p?;
            if let Some(e) = &failure {
                return Err(e.clone());
            }
            let fpr = false_alarms[k] as f64 / m;
            let fnr = misses[k] as f64 / m;
            k += 1;
            Ok(RiskEstimate {
                detector: cfg.kind(),
                model_kind: spec.kind_label().to_string(),
                param: spec.param(),
                n,
                d,
                threshold: p.threshold(n),
                fpr,
                fnr,
                risk: fpr + fnr,
                stderr: (fpr * (1.0 - fpr) / m + fnr * (1.0 - fnr) / m).sqrt(),
                trials: plan.trials,
                seed: plan.seed,
            })
        })
        .collect()
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model_kind: String,
    pub param: Option<f64>,
    pub n: usize,
    pub d: usize,
    pub detector: DetectorKind,
    pub outcome: Result<RiskEstimate>,
}

/// Estimates every grid point. Rows are ordered by model parameter, then
/// `d`, then `n`, then detector in plan order. Failures are recorded per
/// row.
pub fn sweep(plan: &TrialPlan) -> Result<Vec<SweepRow>> {
    plan.validate()?;
    let grid = plan.sweep.clone().unwrap_or_default();
    let params: Vec<Option<f64>> = match &grid.param {
        Some(v) => v.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let ds = grid.d.unwrap_or_else(|| vec![plan.d]);
    let ns = grid.n.unwrap_or_else(|| vec![plan.n]);
    let mut rows = Vec::new();
    for param in &params {
        let spec = match param {
            Some(v) => plan.model.with_param(*v)?,
            None => plan.model.clone(),
        };
        for &d in &ds {
            for &n in &ns {
                let outcomes = estimate_point(plan, &spec, n, d);
                for (cfg, outcome) in plan.detectors.iter().zip(outcomes) {
                    rows.push(SweepRow {
                        model_kind: spec.kind_label().to_string(),
                        param: spec.param(),
                        n,
                        d,
                        detector: cfg.kind(),
                        outcome,
                    });
                }
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Exact total variation
// ---------------------------------------------------------------------------

/// Exact distance between the null and the permutation-mixture alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvResult {
    pub tv: f64,
    /// `1 − tv`, the optimal average risk.
    pub bayes_risk: f64,
}

/// Nondecreasing sequences of length `n` over `0..r`, with the number of
/// orderings each represents.
fn multisets(r: usize, n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(
        r: usize,
        n: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, f64)>,
        ln_n: f64,
    ) {
        if cur.len() == n {
            let mut ln_w = ln_n;
            let mut run = 1;
            for i in 1..=n {
                if i < n && cur[i] == cur[i - 1] {
                    run += 1;
                } else {
                    ln_w -= ln_factorial(run);
                    run = 1;
                }
            }
            out.push((cur.clone(), ln_w.exp().round()));
            return;
        }
        for v in start..r {
            cur.push(v);
            rec(r, n, v, cur, out, ln_n);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        r,
        n,
        0,
        &mut Vec::with_capacity(n),
        &mut out,
        ln_factorial(n),
    );
    out
}

/// `d_TV(P_H0, P_H1)` by enumerating every database pair.
///
/// Both laws are invariant under reordering the rows of `X` and of `Y`
/// separately, so the sum runs over pairs of row multisets weighted by
/// their number of orderings.
pub fn exact_tv_small(
    model: &DiscreteJointModel,
    n: usize,
    d: usize,
    cap: &Capacity,
) -> Result<TvResult> {
    if n == 0 || d == 0 {
        return Err(Error::Validation("n and d must be positive".into()));
    }
    let m = model.alphabet_size();
    let states = u32::try_from(2 * n * d)
        .ok()
        .and_then(|e| (m as u64).checked_pow(e))
        .filter(|&s| s <= cap.max_tv_states)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "enumeration needs m^(2nd) = {m}^{} states, limit {}",
                2 * n * d,
                cap.max_tv_states
            ))
        })?;
    debug_assert!(states > 0);
    if n > cap.max_factorial_n {
        return Err(Error::Capacity(format!(
            "enumeration over permutations allows n ≤ {}, got {n}",
            cap.max_factorial_n
        )));
    }
    let q = model.marginal();
    let r = m.pow(d as u32);
    let digits = |mut v: usize| {
        let mut s = vec![0; d];
        for slot in s.iter_mut().rev() {
            *slot = v % m;
            v /= m;
        }
        s
    };
    let rows: Vec<Vec<usize>> = (0..r).map(digits).collect();
    let q_row: Vec<f64> = rows
        .iter()
        .map(|a| a.iter().map(|&s| q[s]).product())
        .collect();
    let mut p_pair = vec![0.0; r * r];
    for a in 0..r {
        for b in 0..r {
            p_pair[a * r + b] = rows[a]
                .iter()
                .zip(&rows[b])
                .map(|(&x, &y)| model.joint(x, y))
                .product();
        }
    }
    let sets = multisets(r, n);
    let mut perms = Vec::new();
    for_each_permutation(n, |p| perms.push(p.to_vec()));
    let n_fact = perms.len() as f64;

    let mut tv = 0.0;
    for (xs, wx) in &sets {
        let px: f64 = xs.iter().map(|&a| q_row[a]).product();
        for (ys, wy) in &sets {
            let py: f64 = ys.iter().map(|&b| q_row[b]).product();
            let mix: f64 = perms
                .iter()
                .map(|p| {
                    (0..n)
                        .map(|i| p_pair[xs[i] * r + ys[p[i]]])
                        .product::<f64>()
                })
                .sum::<f64>()
                / n_fact;
            tv += wx * wy * (px * py - mix).abs();
        }
    }
    let tv = (0.5 * tv).clamp(0.0, 1.0);
    Ok(TvResult {
        tv,
        bayes_risk: 1.0 - tv,
    })
}

// ---------------------------------------------------------------------------
// Bound report
// ---------------------------------------------------------------------------

/// A value, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Avail<T> {
    Value(T),
    Unavailable { unavailable: String },
}

impl Avail<f64> {
    fn from_result(r: Result<f64>) -> Self {
        match r {
            Ok(v) if v.is_finite() => Self::Value(v),
            Ok(v) => Self::Unavailable {
                unavailable: format!("not finite ({v})"),
            },
            Err(e) => Self::Unavailable {
                unavailable: e.to_string(),
            },
        }
    }

    #[must_use]
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Value(v) => Some(*v),
            Self::Unavailable { .. } => None,
        }
    }
}

impl<T> Avail<T> {
    fn from_err(e: &Error) -> Self {
        Self::Unavailable {
            unavailable: e.to_string(),
        }
    }
}

/// GLRT exponent conditions at a given `τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlrtBounds {
    pub tau: f64,
    pub e_q: f64,
    pub e_p: f64,
    /// `E_Q(τ)`.
    pub condition_lhs: f64,
    /// `log(n/e)/d + (1 + log n)/(dn)`.
    pub condition_rhs: f64,
    pub condition_holds: bool,
    /// `exp(log n! − dn·E_Q(τ))`.
    pub type_i_bound: f64,
    /// `exp(−dn·E_P(τ))`.
    pub type_ii_bound: f64,
}

/// Count-test exponent bounds at a given `τ_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountBounds {
    pub tau_count: f64,
    pub e_q: f64,
    pub e_p: f64,
    /// `2n·e^{−d·E_Q}/(1 − e^{−d·E_P})`.
    pub type_i_bound: f64,
    /// `4/(n·(1 − e^{−d·E_P}))`.
    pub type_ii_bound: f64,
}

/// Finite-sample theoretical quantities for one `(model, n, d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model_kind: String,
    pub n: usize,
    pub d: usize,
    pub eigenvalues: Vec<f64>,
    /// Set when the eigenvalue list is a truncated infinite sequence.
    pub eigenvalue_truncation_tol: Option<f64>,
    pub weak_lb_statistic: Avail<f64>,
    pub d_times_weak_lb_statistic: Avail<f64>,
    pub strong_fixed_d_threshold: Avail<f64>,
    pub second_moment_exact: Avail<f64>,
    pub risk_lower_bound: Avail<f64>,
    pub poisson_surrogate_limit: Avail<f64>,
    pub bound_b: Avail<f64>,
    /// `4·Var_Q(𝒦)/(d·SKL²)`.
    pub sum_test_risk_bound: Avail<f64>,
    pub glrt: Avail<GlrtBounds>,
    pub count: Avail<CountBounds>,
    pub notes: Vec<String>,
}

fn profile_of(model: &JointModel) -> Result<SpectralProfile> {
    match model {
        JointModel::Discrete(dm) => eigenvalues(dm),
        JointModel::Gaussian(g) => gaussian_profile(g.rho(), DEFAULT_GAUSSIAN_TOL),
    }
}

fn glrt_bounds(law: &LlrLaw, n: usize, d: usize, tau: f64) -> Result<GlrtBounds> {
    let e_q = chernoff_e_with(law, tau, Side::Q)?.value;
    let e_p = chernoff_e_with(law, tau, Side::P)?.value;
    let (nf, df) = (n as f64, d as f64);
    let rhs = (nf.ln() - 1.0) / df + (1.0 + nf.ln()) / (df * nf);
    Ok(GlrtBounds {
        tau,
        e_q,
        e_p,
        condition_lhs: e_q,
        condition_rhs: rhs,
        condition_holds: e_q >= rhs,
        type_i_bound: (ln_factorial(n) - df * nf * e_q).exp(),
        type_ii_bound: (-df * nf * e_p).exp(),
    })
}

fn count_bounds(law: &LlrLaw, n: usize, d: usize, tau: f64) -> Result<CountBounds> {
    let e_q = chernoff_e_with(law, tau, Side::Q)?.value;
    let e_p = chernoff_e_with(law, tau, Side::P)?.value;
    let (nf, df) = (n as f64, d as f64);
    let pd_floor = -(-df * e_p).exp_m1();
    Ok(CountBounds {
        tau_count: tau,
        e_q,
        e_p,
        type_i_bound: 2.0 * nf * (-df * e_q).exp() / pd_floor,
        type_ii_bound: 4.0 / (nf * pd_floor),
    })
}

/// Collects the spectral, second-moment and exponent quantities for
/// `(model, n, d)`. Quantities that cannot be computed carry a note.
pub fn bound_report(
    model: &JointModel,
    n: usize,
    d: usize,
    tau_glrt: f64,
    tau_count: Option<f64>,
    cap: &Capacity,
) -> Result<BoundReport> {
    if n == 0 || d == 0 {
        return Err(Error::Validation("n and d must be positive".into()));
    }
    let profile = profile_of(model)?;
    let truncation = match profile.source() {
        SpectrumSource::GaussianTruncated { .. } => profile.truncation_tol(),
        SpectrumSource::DiscreteExact => None,
    };
    let weak = Avail::from_result(weak_lb_statistic(&profile));
    let d_weak = match weak.value() {
        Some(w) => Avail::Value(d as f64 * w),
        None => weak.clone(),
    };
    let moment = Avail::from_result(second_moment_exact_with(&profile, n, d, cap));
    let risk_lb = match moment.value() {
        Some(m) => Avail::from_result(risk_lower_bound_from_moment(m)),
        None => Avail::Unavailable {
            unavailable: "second moment unavailable".into(),
        },
    };
    let sum_bound = Avail::from_result(kl_divergences(model).and_then(|kl| {
        if kl.skl <= 0.0 {
            return Err(Error::Degenerate(
                "SKL = 0, the sum test is undefined".into(),
            ));
        }
        Ok(4.0 * var_q_centered_kernel(model)? / (d as f64 * kl.skl * kl.skl))
    }));
    let law = LlrLaw::new(model);
    let glrt = match &law {
        Ok(l) => glrt_bounds(l, n, d, tau_glrt).map_or_else(|e| Avail::from_err(&e), Avail::Value),
        Err(e) => Avail::from_err(e),
    };
    let count = match (&law, tau_count) {
        (Ok(l), Some(t)) => {
            count_bounds(l, n, d, t).map_or_else(|e| Avail::from_err(&e), Avail::Value)
        }
        (Err(e), Some(_)) => Avail::from_err(e),
        (_, None) => Avail::Unavailable {
            unavailable: "no tau_count given".into(),
        },
    };
    let mut notes = vec![
        "Monte-Carlo risks are averages over a uniformly drawn permutation; every detector here is \
         invariant to reordering the rows of Y, so this equals the worst-case Type-II error."
            .to_string(),
    ];
    if truncation.is_some() {
        notes.push(
            "Gaussian eigenvalues rho^l are listed up to the truncation tolerance; sums include the \
             analytic tail."
                .to_string(),
        );
    }
    Ok(BoundReport {
        model_kind: model.kind().to_string(),
        n,
        d,
        eigenvalues: profile.eigenvalues().to_vec(),
        eigenvalue_truncation_tol: truncation,
        weak_lb_statistic: weak,
        d_times_weak_lb_statistic: d_weak,
        strong_fixed_d_threshold: Avail::from_result(strong_lb_fixed_d_threshold(&profile)),
        second_moment_exact: moment,
        risk_lower_bound: risk_lb,
        poisson_surrogate_limit: Avail::from_result(poisson_surrogate_limit(&profile)),
        bound_b: Avail::from_result(bound_b(&profile, d)),
        sum_test_risk_bound: sum_bound,
        glrt,
        count,
        notes,
    })
}

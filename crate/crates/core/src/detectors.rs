//! Decision procedures: the GLRT (optimal assignment), the centered-kernel
//! sum test, the count test, and two exact oracles for tiny instances
//! (factorial GLRT and the Neyman-Pearson mixture-likelihood test).
//!
//! Every detector decides 1 ("dependent") exactly when its statistic is at
//! least its threshold.

use std::fmt;

use rand::Rng;
use rand_distr::ChiSquared;
use serde::{Deserialize, Serialize};

use crate::assignment::{brute_force_assignment, max_weight_assignment};
use crate::capacity::Capacity;
use crate::error::{Error, Result};
use crate::exponents::{kl_divergences, llr_atoms, CenteredKernel, LlrAtoms};
use crate::matrix::Matrix;
use crate::models::{symbol, DatabasePair, JointModel};
use crate::numeric::{exact_sum, for_each_permutation, ln_factorial, LogSumExp};
use crate::rng::{substream, Purpose};

/// Default Monte-Carlo sample count for count-test probabilities.
pub const DEFAULT_PD_SAMPLES: u64 = 1_000_000;

/// Largest support of an exact `d`-fold LLR convolution.
const MAX_CONVOLUTION_SUPPORT: usize = 2_000_000;

/// Below this the symmetric KL is treated as zero.
const DEPENDENCE_TOL: f64 = 1e-14;

/// Detector tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Glrt,
    Sum,
    Count,
    Np,
}

impl DetectorKind {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Glrt => "glrt",
            Self::Sum => "sum",
            Self::Count => "count",
            Self::Np => "np",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "glrt" => Ok(Self::Glrt),
            "sum" => Ok(Self::Sum),
            "count" => Ok(Self::Count),
            "np" => Ok(Self::Np),
            other => Err(Error::Validation(format!(
                "unknown detector '{other}' (expected glrt, sum, count or np)"
            ))),
        }
    }
}

/// Detector-specific details of a decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VerdictAux {
    /// Maximizing permutation (`X_i ↔ Y_{assignment[i]}`) and its raw value.
    Glrt {
        assignment: Vec<usize>,
        value: f64,
    },
    Sum,
    Count {
        count: u64,
        pd: f64,
    },
    /// `log` of the mixture likelihood ratio.
    Np {
        log_statistic: f64,
    },
}

/// A decision with the statistic and threshold that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub detector: DetectorKind,
    pub decision: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub aux: VerdictAux,
}

impl Verdict {
    fn new(detector: DetectorKind, statistic: f64, threshold: f64, aux: VerdictAux) -> Self {
        Self {
            detector,
            decision: statistic >= threshold,
            statistic,
            threshold,
            aux,
        }
    }
}

// ---------------------------------------------------------------------------
// Pairwise LLR matrix
// ---------------------------------------------------------------------------

/// `C[i][j] = Σ_ℓ 𝓛(X_iℓ, Y_jℓ)` for all row pairs.
///
/// Gaussian entries use norms and inner products:
/// `C = −(d/2)log(1−ρ²) + (2ρ⟨x,y⟩ − ρ²(‖x‖²+‖y‖²))/(2(1−ρ²))`.
pub fn llr_matrix(model: &JointModel, pair: &DatabasePair) -> Result<Matrix> {
    let (n, d) = (pair.n(), pair.d());
    let mut c = Matrix::zeros(n, n);
    match model {
        JointModel::Gaussian(g) => {
            let r = g.rho();
            let s = 1.0 - r * r;
            let base = -0.5 * d as f64 * (-r * r).ln_1p();
            let sq = |m: &Matrix, i: usize| m.row(i).iter().map(|v| v * v).sum::<f64>();
            let nx: Vec<f64> = (0..n).map(|i| sq(&pair.x, i)).collect();
            let ny: Vec<f64> = (0..n).map(|j| sq(&pair.y, j)).collect();
            for i in 0..n {
                let xi = pair.x.row(i);
                for j in 0..n {
                    let dot: f64 = xi.iter().zip(pair.y.row(j)).map(|(a, b)| a * b).sum();
                    c.set(
                        i,
                        j,
                        base + (2.0 * r * dot - r * r * (nx[i] + ny[j])) / (2.0 * s),
                    );
                }
            }
            if c.as_slice().iter().any(|v| !v.is_finite()) {
                return Err(Error::Data(
                    "non-finite observation in a Gaussian database".into(),
                ));
            }
        }
        JointModel::Discrete(dm) => {
            let m = dm.alphabet_size();
            let mut table = vec![f64::NAN; m * m];
            for a in 0..m {
                for b in 0..m {
                    if let Ok(v) = dm.llr(a, b) {
                        table[a * m + b] = v;
                    }
                }
            }
            let code = |v: f64| symbol(v, m).map_err(|e| Error::Data(e.to_string()));
            let xs: Vec<usize> = pair
                .x
                .as_slice()
                .iter()
                .map(|&v| code(v))
                .collect::<Result<_>>()?;
            let ys: Vec<usize> = pair
                .y
                .as_slice()
                .iter()
                .map(|&v| code(v))
                .collect::<Result<_>>()?;
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for l in 0..d {
                        acc += table[xs[i * d + l] * m + ys[j * d + l]];
                    }
                    if !acc.is_finite() {
                        return Err(Error::Data(format!(
                            "rows X_{i} and Y_{j} have a feature outside the model support"
                        )));
                    }
                    c.set(i, j, acc);
                }
            }
        }
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// GLRT
// ---------------------------------------------------------------------------

/// `max_σ Σ_i C[i][σ_i]/(dn) ≥ τ` via an exact assignment solver.
pub fn glrt(model: &JointModel, pair: &DatabasePair, tau: f64) -> Result<Verdict> {
    let c = llr_matrix(model, pair)?;
    glrt_with_llr(model, pair, &c, tau)
}

/// GLRT on a raw weight matrix; the value is summed in row order.
#[must_use]
pub fn glrt_from_llr(c: &Matrix, d: usize, tau: f64) -> Verdict {
    let a = max_weight_assignment(c);
    glrt_verdict(a.perm, a.value, c.rows(), d, tau)
}

/// GLRT given the LLR matrix of `pair`. For discrete models the value of
/// the maximizing permutation is recomputed by [`discrete_path_value`], so
/// permutations that tie in exact arithmetic report identical statistics.
pub fn glrt_with_llr(
    model: &JointModel,
    pair: &DatabasePair,
    c: &Matrix,
    tau: f64,
) -> Result<Verdict> {
    let a = max_weight_assignment(c);
    let value = canonical_value(model, pair, &a.perm)?.unwrap_or(a.value);
    Ok(glrt_verdict(a.perm, value, pair.n(), pair.d(), tau))
}

/// GLRT with the maximum taken over all `n!` permutations.
pub fn glrt_brute_force(
    model: &JointModel,
    pair: &DatabasePair,
    tau: f64,
    cap: &Capacity,
) -> Result<Verdict> {
    check_factorial(pair.n(), cap)?;
    let c = llr_matrix(model, pair)?;
    let a = brute_force_assignment(&c);
    let value = canonical_value(model, pair, &a.perm)?.unwrap_or(a.value);
    Ok(glrt_verdict(a.perm, value, pair.n(), pair.d(), tau))
}

fn glrt_verdict(perm: Vec<usize>, value: f64, n: usize, d: usize, tau: f64) -> Verdict {
    Verdict::new(
        DetectorKind::Glrt,
        value / (d * n) as f64,
        tau,
        VerdictAux::Glrt {
            assignment: perm,
            value,
        },
    )
}

fn canonical_value(model: &JointModel, pair: &DatabasePair, perm: &[usize]) -> Result<Option<f64>> {
    match model {
        JointModel::Discrete(_) => discrete_path_value(model, pair, perm).map(Some),
        JointModel::Gaussian(_) => Ok(None),
    }
}

/// `Σ_i Σ_ℓ 𝓛(X_iℓ, Y_{σ_i ℓ})` for a discrete model, evaluated as
/// `Σ_v K_v·v` over the distinct single-letter LLR values `v` in ascending
/// order, where `K_v` counts the terms equal to `v`. The result depends
/// only on the counts, not on how the terms are grouped.
pub fn discrete_path_value(model: &JointModel, pair: &DatabasePair, perm: &[usize]) -> Result<f64> {
    let JointModel::Discrete(dm) = model else {
        return Err(Error::Unsupported(
            "path values are defined for discrete models".into(),
        ));
    };
    let (n, d, m) = (pair.n(), pair.d(), dm.alphabet_size());
    let mut counts = vec![0u64; m * m];
    for (i, &j) in perm.iter().enumerate().take(n) {
        for l in 0..d {
            let a = symbol(pair.x.get(i, l), m).map_err(|e| Error::Data(e.to_string()))?;
            let b = symbol(pair.y.get(j, l), m).map_err(|e| Error::Data(e.to_string()))?;
            counts[a * m + b] += 1;
        }
    }
    let mut terms: Vec<(f64, u64)> = Vec::new();
    for a in 0..m {
        for b in 0..m {
            let k = counts[a * m + b];
            if k > 0 {
                let v = dm.llr(a, b).map_err(|e| Error::Data(e.to_string()))?;
                terms.push((v, k));
            }
        }
    }
    terms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut i = 0;
    while i < terms.len() {
        let v = terms[i].0;
        let mut k = 0;
        while i < terms.len() && terms[i].0 == v {
            k += terms[i].1;
            i += 1;
        }
        total += k as f64 * v;
    }
    Ok(total)
}

fn check_factorial(n: usize, cap: &Capacity) -> Result<()> {
    if n > cap.max_factorial_n {
        return Err(Error::Capacity(format!(
            "permutation enumeration allows n ≤ {}, got {n}",
            cap.max_factorial_n
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sum test
// ---------------------------------------------------------------------------

/// Sum test with its model-dependent constants precomputed.
#[derive(Debug, Clone)]
pub struct SumTest {
    kernel: CenteredKernel,
    skl: f64,
}

impl SumTest {
    pub fn new(model: &JointModel) -> Result<Self> {
        let skl = kl_divergences(model)?.skl;
        if skl <= DEPENDENCE_TOL {
            return Err(Error::Degenerate(
                "the sum test needs a dependent model (SKL = 0)".into(),
            ));
        }
        Ok(Self {
            kernel: CenteredKernel::new(model)?,
            skl,
        })
    }

    /// Default threshold `d·n·SKL`.
    #[must_use]
    pub fn default_threshold(&self, n: usize, d: usize) -> f64 {
        (d * n) as f64 * self.skl
    }

    /// `Σ_{i,j,ℓ} 𝒦(X_iℓ, Y_jℓ)`, unnormalized. The value depends only on
    /// the multisets of rows, so it is unchanged by any row reordering.
    pub fn statistic(&self, pair: &DatabasePair) -> Result<f64> {
        let (n, d) = (pair.n(), pair.d());
        match &self.kernel {
            CenteredKernel::Gaussian { c } => {
                let mut s = 0.0;
                for l in 0..d {
                    let sx = exact_sum((0..n).map(|i| pair.x.get(i, l)));
                    let sy = exact_sum((0..n).map(|j| pair.y.get(j, l)));
                    s += sx * sy;
                }
                if !s.is_finite() {
                    return Err(Error::Data(
                        "non-finite observation in a Gaussian database".into(),
                    ));
                }
                Ok(c * s)
            }
            CenteredKernel::Discrete { m, table } => {
                let m = *m;
                let mut s = 0.0;
                let mut cx = vec![0u64; m];
                let mut cy = vec![0u64; m];
                for l in 0..d {
                    cx.fill(0);
                    cy.fill(0);
                    for i in 0..n {
                        cx[symbol(pair.x.get(i, l), m)
                            .map_err(|e| Error::Data(e.to_string()))?] += 1;
                        cy[symbol(pair.y.get(i, l), m)
                            .map_err(|e| Error::Data(e.to_string()))?] += 1;
                    }
                    for a in 0..m {
                        for b in 0..m {
                            let w = (cx[a] * cy[b]) as f64;
                            if w > 0.0 {
                                let k = table[a * m + b];
                                if k.is_nan() {
                                    return Err(Error::Data(format!(
                                        "symbol pair ({a}, {b}) outside the model support"
                                    )));
                                }
                                s += w * k;
                            }
                        }
                    }
                }
                Ok(s)
            }
        }
    }

    pub fn run(&self, pair: &DatabasePair, tau: Option<f64>) -> Result<Verdict> {
        let threshold = tau.unwrap_or_else(|| self.default_threshold(pair.n(), pair.d()));
        Ok(Verdict::new(
            DetectorKind::Sum,
            self.statistic(pair)?,
            threshold,
            VerdictAux::Sum,
        ))
    }
}

/// Sum test; the default threshold is `d·n·SKL`.
pub fn sum_test(model: &JointModel, pair: &DatabasePair, tau: Option<f64>) -> Result<Verdict> {
    SumTest::new(model)?.run(pair, tau)
}

// ---------------------------------------------------------------------------
// Count test
// ---------------------------------------------------------------------------

/// How `P_d` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum PdMethod {
    /// Exact `d`-fold convolution of the LLR atoms (discrete models).
    ExactConvolution,
    /// Seeded Monte-Carlo estimate.
    MonteCarlo { samples: u64, seed: u64 },
}

/// Threshold and reference probability of the count test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountTestPlan {
    pub tau_count: f64,
    /// `P_d = Pr_P[Σ_ℓ 𝓛 ≥ d·τ]`.
    pub pd: f64,
    pub pd_method: PdMethod,
    /// Standard error of `pd` (zero when exact).
    pub pd_stderr: f64,
    /// `Q_d = Pr_Q[Σ_ℓ 𝓛 ≥ d·τ]`, computed by the same method.
    pub qd: f64,
    pub qd_stderr: f64,
}

/// Upper tails of `Σ_{ℓ≤d} 𝓛(A_ℓ, B_ℓ)` under `P` and `Q`.
#[derive(Debug, Clone)]
pub enum TailTable {
    /// Support points sorted by value with `P` and `Q` upper-tail masses
    /// (`p_tail[k] = Pr_P[S ≥ values[k]]`).
    Exact {
        d: usize,
        values: Vec<f64>,
        p_tail: Vec<f64>,
        q_tail: Vec<f64>,
    },
    /// Sorted Monte-Carlo draws of the sum under each law.
    Sampled {
        d: usize,
        samples: u64,
        seed: u64,
        p_draws: Vec<f64>,
        q_draws: Vec<f64>,
    },
}

impl TailTable {
    /// Builds the table for `d` features.
    pub fn new(model: &JointModel, d: usize, method: PdMethod) -> Result<Self> {
        if d == 0 {
            return Err(Error::Validation("d must be positive".into()));
        }
        match (model, method) {
            (JointModel::Gaussian(_), PdMethod::ExactConvolution) => Err(Error::Unsupported(
                "exact convolution is only available for discrete models; use monte-carlo".into(),
            )),
            (JointModel::Discrete(dm), PdMethod::ExactConvolution) => {
                let atoms = llr_atoms(dm)?;
                let law = convolve(&atoms, d)?;
                let k = law.len();
                let mut p_tail = vec![0.0; k];
                let mut q_tail = vec![0.0; k];
                let (mut ps, mut qs) = (0.0, 0.0);
                for i in (0..k).rev() {
                    ps += law[i].2;
                    qs += law[i].1;
                    p_tail[i] = ps.min(1.0);
                    q_tail[i] = qs.min(1.0);
                }
                Ok(Self::Exact {
                    d,
                    values: law.iter().map(|a| a.0).collect(),
                    p_tail,
                    q_tail,
                })
            }
            (_, PdMethod::MonteCarlo { samples, seed }) => {
                if samples == 0 {
                    return Err(Error::Validation(
                        "monte-carlo needs at least one sample".into(),
                    ));
                }
                let mut p_draws = draw_llr_sums(model, d, samples, seed, Purpose::PdEstimate)?;
                let mut q_draws = draw_llr_sums(model, d, samples, seed, Purpose::QdEstimate)?;
                p_draws.sort_by(f64::total_cmp);
                q_draws.sort_by(f64::total_cmp);
                Ok(Self::Sampled {
                    d,
                    samples,
                    seed,
                    p_draws,
                    q_draws,
                })
            }
        }
    }

    /// `(P_d, Q_d)` at threshold `τ` together with their standard errors.
    #[must_use]
    pub fn tails(&self, tau: f64) -> ((f64, f64), (f64, f64)) {
        match self {
            Self::Exact {
                d,
                values,
                p_tail,
                q_tail,
            } => {
                let t = *d as f64 * tau;
                let t = t - 1e-12 * (1.0 + t.abs());
                let k = values.partition_point(|&v| v < t);
                let get = |tail: &[f64]| tail.get(k).copied().unwrap_or(0.0);
                ((get(p_tail), 0.0), (get(q_tail), 0.0))
            }
            Self::Sampled {
                d,
                p_draws,
                q_draws,
                ..
            } => {
                let t = *d as f64 * tau;
                let frac = |draws: &[f64]| {
                    let k = draws.len() - draws.partition_point(|&v| v < t);
                    let p = k as f64 / draws.len() as f64;
                    (p, (p * (1.0 - p) / draws.len() as f64).sqrt())
                };
                (frac(p_draws), frac(q_draws))
            }
        }
    }

    /// Largest per-feature threshold `τ` with `P_d(τ) ≥ prob`, for
    /// `prob ∈ (0, 1]`.
    #[must_use]
    pub fn p_quantile(&self, prob: f64) -> f64 {
        match self {
            Self::Exact {
                d, values, p_tail, ..
            } => {
                let k = p_tail.partition_point(|&p| p >= prob).saturating_sub(1);
                values[k] / *d as f64
            }
            Self::Sampled { d, p_draws, .. } => {
                let len = p_draws.len();
                let need = ((prob * len as f64).ceil() as usize).clamp(1, len);
                let (v, df) = (p_draws[len - need], *d as f64);
                let mut tau = v / df;
                // `tails` compares against `d·τ`, which may round above `v`.
                while tau * df > v {
                    tau -= tau.abs() * f64::EPSILON + f64::MIN_POSITIVE;
                }
                tau
            }
        }
    }

    #[must_use]
    pub fn method(&self) -> PdMethod {
        match self {
            Self::Exact { .. } => PdMethod::ExactConvolution,
            Self::Sampled { samples, seed, .. } => PdMethod::MonteCarlo {
                samples: *samples,
                seed: *seed,
            },
        }
    }

    /// The plan for threshold `τ`.
    #[must_use]
    pub fn plan(&self, tau_count: f64) -> CountTestPlan {
        let ((pd, pd_stderr), (qd, qd_stderr)) = self.tails(tau_count);
        CountTestPlan {
            tau_count,
            pd,
            pd_method: self.method(),
            pd_stderr,
            qd,
            qd_stderr,
        }
    }
}

/// `d`-fold convolution of the atoms: `(value, q_mass, p_mass)` sorted by
/// value, with sums that agree to 1e-12 (relative) merged.
fn convolve(atoms: &LlrAtoms, d: usize) -> Result<Vec<(f64, f64, f64)>> {
    let mut law = vec![(0.0, 1.0, 1.0)];
    for _ in 0..d {
        let mut next = Vec::with_capacity(law.len() * atoms.atoms.len());
        for &(v, q, p) in &law {
            for a in &atoms.atoms {
                next.push((v + a.value, q * a.q_prob, p * a.p_prob));
            }
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        law.clear();
        for t in next {
            match law.last_mut() {
                Some(last) if t.0 - last.0 <= 1e-12 * (1.0 + last.0.abs()) => {
                    last.1 += t.1;
                    last.2 += t.2;
                }
                _ => law.push(t),
            }
        }
        if law.len() > MAX_CONVOLUTION_SUPPORT {
            return Err(Error::Capacity(format!(
                "exact convolution support exceeds {MAX_CONVOLUTION_SUPPORT} points"
            )));
        }
    }
    Ok(law)
}

/// Monte-Carlo draws of `Σ_{ℓ≤d} 𝓛(A_ℓ,B_ℓ)` with `(A,B) ~ P` (purpose
/// `PdEstimate`) or `Q` (purpose `QdEstimate`).
///
/// Gaussian draws use the exact representation
/// `Σ𝓛 = −(d/2)log(1−ρ²) + α·W₁ − β·W₂` with independent `W ~ χ²_d`,
/// where `α = β = ρ/2` under `P` and `α = ρ/(2(1+ρ))`, `β = ρ/(2(1−ρ))`
/// under `Q` (rotate to `(A±B)/√2`).
fn draw_llr_sums(
    model: &JointModel,
    d: usize,
    samples: u64,
    seed: u64,
    purpose: Purpose,
) -> Result<Vec<f64>> {
    let mut rng = substream(seed, purpose, 0);
    match model {
        JointModel::Gaussian(g) => {
            let r = g.rho();
            let base = -0.5 * d as f64 * (-r * r).ln_1p();
            let (alpha, beta) = if purpose == Purpose::PdEstimate {
                (0.5 * r, 0.5 * r)
            } else {
                (r / (2.0 * (1.0 + r)), r / (2.0 * (1.0 - r)))
            };
            let chi = ChiSquared::new(d as f64).map_err(|e| Error::Validation(e.to_string()))?;
            Ok((0..samples)
                .map(|_| {
                    let w1: f64 = rng.sample(chi);
                    let w2: f64 = rng.sample(chi);
                    base + alpha * w1 - beta * w2
                })
                .collect())
        }
        JointModel::Discrete(dm) => {
            let atoms = llr_atoms(dm)?;
            let weights: Vec<f64> = atoms
                .atoms
                .iter()
                .map(|a| {
                    if purpose == Purpose::PdEstimate {
                        a.p_prob
                    } else {
                        a.q_prob
                    }
                })
                .collect();
            let mut cdf = Vec::with_capacity(weights.len());
            let mut acc = 0.0;
            for w in &weights {
                acc += w;
                cdf.push(acc);
            }
            let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
            Ok((0..samples)
                .map(|_| {
                    (0..d)
                        .map(|_| {
                            let u: f64 = rng.random::<f64>() * acc;
                            let k = cdf.iter().position(|&c| u < c).unwrap_or(last);
                            atoms.atoms[k].value
                        })
                        .sum()
                })
                .collect())
        }
    }
}

/// Computes `P_d` (and `Q_d`) for threshold `tau_count`.
pub fn make_count_plan(
    model: &JointModel,
    d: usize,
    tau_count: f64,
    method: PdMethod,
) -> Result<CountTestPlan> {
    if !tau_count.is_finite() {
        return Err(Error::Validation(format!(
            "tau_count must be finite, got {tau_count}"
        )));
    }
    Ok(TailTable::new(model, d, method)?.plan(tau_count))
}

/// Counts pairs with `C[i][j]/d ≥ τ` and compares with `½·n·P_d`.
pub fn count_test(
    model: &JointModel,
    pair: &DatabasePair,
    plan: &CountTestPlan,
) -> Result<Verdict> {
    let c = llr_matrix(model, pair)?;
    count_test_from_llr(&c, pair.d(), plan)
}

/// Count test on a precomputed LLR matrix.
pub fn count_test_from_llr(c: &Matrix, d: usize, plan: &CountTestPlan) -> Result<Verdict> {
    if !(plan.pd > 0.0) {
        return Err(Error::Validation(
            "count-test plan has P_d = 0, so the threshold is vacuous".into(),
        ));
    }
    let df = d as f64;
    let count = c
        .as_slice()
        .iter()
        .filter(|&&v| v / df >= plan.tau_count)
        .count() as u64;
    let threshold = 0.5 * c.rows() as f64 * plan.pd;
    Ok(Verdict::new(
        DetectorKind::Count,
        count as f64,
        threshold,
        VerdictAux::Count { count, pd: plan.pd },
    ))
}

// ---------------------------------------------------------------------------
// Neyman-Pearson oracle
// ---------------------------------------------------------------------------

/// Mixture likelihood ratio `(1/n!)·Σ_σ ∏_i exp(C[i][σ_i])` against 1.
pub fn np_oracle(model: &JointModel, pair: &DatabasePair, cap: &Capacity) -> Result<Verdict> {
    check_factorial(pair.n(), cap)?;
    let c = llr_matrix(model, pair)?;
    np_oracle_from_llr(&c, cap)
}

/// NP oracle on a precomputed LLR matrix.
pub fn np_oracle_from_llr(c: &Matrix, cap: &Capacity) -> Result<Verdict> {
    let n = c.rows();
    check_factorial(n, cap)?;
    let mut acc = LogSumExp::default();
    for_each_permutation(n, |p| {
        acc.push(p.iter().enumerate().map(|(i, &j)| c.get(i, j)).sum());
    });
    let log_statistic = acc.value() - ln_factorial(n);
    Ok(Verdict::new(
        DetectorKind::Np,
        log_statistic.exp(),
        1.0,
        VerdictAux::Np { log_statistic },
    ))
}

//! Likelihood-kernel spectra and the impossibility statistics built on them.
//!
//! The kernel `L(x,y) = P(x,y)/(q(x)q(y))` acts as a self-adjoint operator
//! on `L²(q)`. Its eigenvalues `1 = λ_0 ≥ λ_1 ≥ …` enter every lower bound
//! only through the even power sums `g_k = Σ_i λ_i^{2k}`.
//!
//! The second moment of the permutation-mixture likelihood ratio under the
//! null depends on the relative permutation only through its cycle type:
//! a `k`-cycle contributes `g_k^d`. Averaging over cycle types (integer
//! partitions of `n`) replaces an `n!` sum with `p(n)` terms.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::capacity::Capacity;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::models::DiscreteJointModel;
use crate::numeric::{ln_factorial, LogSumExp};

/// Default truncation tolerance for Gaussian spectra.
pub const DEFAULT_GAUSSIAN_TOL: f64 = 1e-12;

/// Largest nontrivial modulus treated as strictly below one.
const SINGULAR_TOL: f64 = 1e-12;

/// Where the eigenvalues came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectrumSource {
    /// Full spectrum of a finite kernel (or an explicit list).
    DiscreteExact,
    /// `ρ^ℓ` for `ℓ = 0..K`; the omitted tail is summed analytically.
    GaussianTruncated { rho: f64 },
}

/// Eigenvalues sorted by decreasing value, `λ_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    eigenvalues: Vec<f64>,
    source: SpectrumSource,
    truncation_tol: Option<f64>,
}

impl SpectralProfile {
    /// Profile from an explicit finite list. Sorted here; must contain a
    /// leading eigenvalue 1 and no entry of modulus above one.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("eigenvalues must be finite".into()));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let profile = Self {
            eigenvalues,
            source: SpectrumSource::DiscreteExact,
            truncation_tol: None,
        };
        profile.check()?;
        Ok(profile)
    }

    fn check(&self) -> Result<()> {
        match self.eigenvalues.first() {
            Some(&l0) if (l0 - 1.0).abs() <= 1e-10 => {}
            other => {
                return Err(Error::Invariant(format!(
                    "leading eigenvalue must be 1, got {other:?}"
                )))
            }
        }
        if let Some(v) = self.eigenvalues.iter().find(|v| v.abs() > 1.0 + 1e-10) {
            return Err(Error::Invariant(format!(
                "eigenvalue {v} has modulus above 1"
            )));
        }
        Ok(())
    }

    #[must_use]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[must_use]
    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    #[must_use]
    pub fn truncation_tol(&self) -> Option<f64> {
        self.truncation_tol
    }

    /// Nontrivial eigenvalues `λ_1, λ_2, …` (the stored ones).
    fn nontrivial(&self) -> &[f64] {
        &self.eigenvalues[1..]
    }

    /// `ρ` and the index of the first omitted eigenvalue, for truncated
    /// Gaussian profiles.
    fn tail(&self) -> Option<(f64, usize)> {
        match self.source {
            SpectrumSource::GaussianTruncated { rho } => Some((rho, self.eigenvalues.len())),
            SpectrumSource::DiscreteExact => None,
        }
    }

    /// `g_k − 1 = Σ_{i≥1} λ_i^{2k}`, including the exact geometric tail of
    /// truncated Gaussian profiles.
    #[must_use]
    pub fn power_sum_excess(&self, k: u32) -> f64 {
        let mut s: f64 = self.nontrivial().iter().map(|l| l.powi(2 * k as i32)).sum();
        if let Some((rho, first)) = self.tail() {
            let r2k = (rho * rho).powi(k as i32);
            s += r2k.powi(first as i32) / (1.0 - r2k);
        }
        s
    }

    /// `g_k = Σ_i λ_i^{2k}` with `λ_0 = 1` included.
    #[must_use]
    pub fn power_sum(&self, k: u32) -> f64 {
        1.0 + self.power_sum_excess(k)
    }

    /// Analytic bound on the omitted part of the weak statistic
    /// (`0` for exact profiles).
    #[must_use]
    pub fn weak_tail_bound(&self) -> f64 {
        match self.tail() {
            Some((rho, first)) => {
                let r2 = rho * rho;
                let r2k = r2.powi(first as i32);
                r2k / ((1.0 - r2) * (1.0 - r2k))
            }
            None => 0.0,
        }
    }

    /// Largest nontrivial modulus `max_{i≥1} |λ_i|`.
    #[must_use]
    pub fn lambda_max(&self) -> f64 {
        self.nontrivial()
            .iter()
            .fold(0.0, |m: f64, l| m.max(l.abs()))
    }

    fn require_nonsingular(&self) -> Result<()> {
        if self.lambda_max() >= 1.0 - SINGULAR_TOL {
            return Err(Error::SingularProfile(
                "a nontrivial eigenvalue has modulus 1 (perfectly dependent component)".into(),
            ));
        }
        Ok(())
    }

    /// True when every nontrivial eigenvalue is zero.
    #[must_use]
    pub fn is_trivial(&self) -> bool {
        self.nontrivial().iter().all(|&l| l == 0.0) && self.tail().is_none()
    }
}

// ---------------------------------------------------------------------------
// Kernels and eigenvalues
// ---------------------------------------------------------------------------

/// Row-stochastic kernel `M[x][y] = joint[x][y]/q(x)`.
pub fn kernel_matrix(model: &DiscreteJointModel) -> Result<Matrix> {
    model.require_positive_marginal()?;
    let m = model.alphabet_size();
    let q = model.marginal();
    let mut out = Matrix::zeros(m, m);
    for x in 0..m {
        for y in 0..m {
            out.set(x, y, model.joint(x, y) / q[x]);
        }
    }
    Ok(out)
}

/// Spectrum of the kernel, computed on `D^{-1/2}·joint·D^{-1/2}`.
pub fn eigenvalues(model: &DiscreteJointModel) -> Result<SpectralProfile> {
    model.require_positive_marginal()?;
    let m = model.alphabet_size();
    let q = model.marginal();
    let s = DMatrix::from_fn(m, m, |x, y| model.joint(x, y) / (q[x] * q[y]).sqrt());
    let eig = SymmetricEigen::new(s);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let profile = SpectralProfile {
        eigenvalues: values,
        source: SpectrumSource::DiscreteExact,
        truncation_tol: None,
    };
    profile.check()?;
    Ok(profile)
}

/// `ρ^ℓ` for `ℓ = 0..=K`, where `K` is the first index with `|ρ^K| < tol`.
/// Stored in decreasing order of value.
pub fn gaussian_profile(rho: f64, tol: f64) -> Result<SpectralProfile> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(Error::Domain(format!("|rho| must be below 1, got {rho}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Validation(format!(
            "tol must lie in (0, 1), got {tol}"
        )));
    }
    let mut values = vec![1.0];
    if rho != 0.0 {
        for l in 1.. {
            let v = rho.powi(l);
            values.push(v);
            if v.abs() < tol {
                break;
            }
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SpectralProfile {
        eigenvalues: values,
        source: SpectrumSource::GaussianTruncated { rho },
        truncation_tol: Some(tol),
    })
}

// ---------------------------------------------------------------------------
// Threshold statistics
// ---------------------------------------------------------------------------

/// `Σ_{i≥1} λ_i²/(1−λ_i²)`, plus the tail bound for truncated profiles.
pub fn weak_lb_statistic(profile: &SpectralProfile) -> Result<f64> {
    profile.require_nonsingular()?;
    let s: f64 = profile
        .nontrivial()
        .iter()
        .map(|l| l * l / (1.0 - l * l))
        .sum();
    let tail = profile.weak_tail_bound();
    if let Some(tol) = profile.truncation_tol {
        if tail >= tol {
            return Err(Error::Invariant(format!(
                "tail bound {tail} is not below tol {tol}"
            )));
        }
    }
    Ok(s + tail)
}

/// `−log λ_1² / log Σ_i λ_i²`, with `λ_1` the largest nontrivial modulus.
/// Any `d` strictly below the value makes strong detection impossible for
/// fixed `d`.
pub fn strong_lb_fixed_d_threshold(profile: &SpectralProfile) -> Result<f64> {
    let l1 = profile.lambda_max();
    if l1 == 0.0 {
        return Err(Error::Degenerate(
            "λ_1 = 0 (independent model): threshold undefined".into(),
        ));
    }
    let excess = profile.power_sum_excess(1);
    Ok(-2.0 * l1.ln() / excess.ln_1p())
}

// ---------------------------------------------------------------------------
// Cycle types
// ---------------------------------------------------------------------------

/// Cycle type of a permutation of `n` points: pairs `(k, N_k)` with
/// `N_k > 0`, increasing in `k`, and the probability of the type under a
/// uniform permutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleType {
    pub counts: Vec<(usize, usize)>,
    pub probability: f64,
}

impl CycleType {
    /// `N_k` (zero when absent).
    #[must_use]
    pub fn count(&self, k: usize) -> usize {
        self.counts.iter().find(|c| c.0 == k).map_or(0, |c| c.1)
    }
}

/// Log-probability of a cycle type: `−Σ_k (N_k log k + log N_k!)`.
fn log_type_probability(counts: &[(usize, usize)]) -> f64 {
    -counts
        .iter()
        .map(|&(k, c)| c as f64 * (k as f64).ln() + ln_factorial(c))
        .sum::<f64>()
}

fn check_partition_capacity(n: usize, cap: &Capacity) -> Result<()> {
    if n == 0 || n > cap.max_partition_n {
        return Err(Error::Capacity(format!(
            "cycle-type enumeration needs 1 ≤ n ≤ {}, got {n}",
            cap.max_partition_n
        )));
    }
    Ok(())
}

/// Calls `f(counts, log_probability)` once per integer partition of `n`.
pub fn for_each_cycle_type<F: FnMut(&[(usize, usize)], f64)>(
    n: usize,
    cap: &Capacity,
    mut f: F,
) -> Result<()> {
    check_partition_capacity(n, cap)?;
    let mut counts: Vec<(usize, usize)> = Vec::new();
    partitions(n, n, &mut counts, &mut |c| f(c, log_type_probability(c)));
    Ok(())
}

/// Partitions of `rest` into parts `≤ max_part`, emitted with parts in
/// increasing order.
fn partitions<F: FnMut(&[(usize, usize)])>(
    rest: usize,
    max_part: usize,
    stack: &mut Vec<(usize, usize)>,
    f: &mut F,
) {
    if rest == 0 {
        let mut sorted = stack.clone();
        sorted.reverse();
        f(&sorted);
        return;
    }
    for k in (1..=max_part.min(rest)).rev() {
        for c in (1..=rest / k).rev() {
            stack.push((k, c));
            partitions(rest - k * c, k - 1, stack, f);
            stack.pop();
        }
    }
}

/// All cycle types of `S_n`.
pub fn cycle_types(n: usize) -> Result<Vec<CycleType>> {
    let mut out = Vec::new();
    for_each_cycle_type(n, &Capacity::default(), |c, lp| {
        out.push(CycleType {
            counts: c.to_vec(),
            probability: lp.exp(),
        });
    })?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Second moment and surrogates
// ---------------------------------------------------------------------------

/// `E_{H0}[L_n²] = Σ_types P(type) ∏_k g_k^{d N_k}`, accumulated in log
/// space. Returns `+∞` when the value exceeds the `f64` range.
pub fn second_moment_exact(profile: &SpectralProfile, n: usize, d: usize) -> Result<f64> {
    second_moment_exact_with(profile, n, d, &Capacity::default())
}

/// [`second_moment_exact`] under explicit capacity limits.
pub fn second_moment_exact_with(
    profile: &SpectralProfile,
    n: usize,
    d: usize,
    cap: &Capacity,
) -> Result<f64> {
    check_partition_capacity(n, cap)?;
    if d == 0 {
        return Err(Error::Validation("d must be positive".into()));
    }
    if profile.is_trivial() {
        return Ok(1.0);
    }
    let log_g: Vec<f64> = (1..=n)
        .map(|k| profile.power_sum_excess(k as u32).ln_1p())
        .collect();
    let mut acc = LogSumExp::default();
    for_each_cycle_type(n, cap, |counts, lp| {
        let e: f64 = counts
            .iter()
            .map(|&(k, c)| (d * c) as f64 * log_g[k - 1])
            .sum();
        acc.push(lp + e);
    })?;
    Ok(acc.value().exp())
}

/// `∏_{k=1..m} exp((g_k^d − 1)/k)`: the second moment with the cycle
/// counts replaced by independent `Poisson(1/k)` variables.
pub fn poisson_surrogate_moment(profile: &SpectralProfile, m: usize, d: usize) -> Result<f64> {
    if m == 0 || d == 0 {
        return Err(Error::Validation("m and d must be positive".into()));
    }
    let mut log = 0.0;
    for k in 1..=m {
        let lg = profile.power_sum_excess(k as u32).ln_1p();
        log += (d as f64 * lg).exp_m1() / k as f64;
        if !log.is_finite() {
            return Ok(f64::INFINITY);
        }
    }
    Ok(log.exp())
}

/// `exp(−Σ_{i≥1} log(1−λ_i²))`, the `m → ∞` limit of the `d = 1` surrogate.
pub fn poisson_surrogate_limit(profile: &SpectralProfile) -> Result<f64> {
    profile.require_nonsingular()?;
    let mut s: f64 = profile.nontrivial().iter().map(|l| -(-l * l).ln_1p()).sum();
    if let Some((rho, first)) = profile.tail() {
        // Σ_{ℓ≥K} −log(1−ρ^{2ℓ}) via the series Σ_k ρ^{2kK}/(k(1−ρ^{2k})).
        let r2 = rho * rho;
        let mut k = 1;
        loop {
            let r2k = r2.powi(k);
            let term = r2k.powi(first as i32) / (f64::from(k) * (1.0 - r2k));
            s += term;
            if term < 1e-18 || k > 10_000 {
                break;
            }
            k += 1;
        }
    }
    Ok(s.exp())
}

/// `exp[d·S + (Σ_i λ_i²)^{d−2}·(d·S)²]` with `S` the weak statistic.
pub fn bound_b(profile: &SpectralProfile, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Validation("d must be positive".into()));
    }
    let s = weak_lb_statistic(profile)?;
    let sum2 = profile.power_sum(1);
    let ds = d as f64 * s;
    Ok((ds + sum2.powi(d as i32 - 2) * ds * ds).exp())
}

/// `clamp(1 − ½√(M − 1), 0, 1)`, a lower bound on the minimax risk.
pub fn risk_lower_bound_from_moment(second_moment: f64) -> Result<f64> {
    if second_moment.is_nan() || second_moment < 1.0 - 1e-12 {
        return Err(Error::Invariant(format!(
            "second moment {second_moment} is below 1; the moment computation is broken"
        )));
    }
    if second_moment == f64::INFINITY {
        return Ok(0.0);
    }
    let v = 1.0 - 0.5 * (second_moment - 1.0).max(0.0).sqrt();
    Ok(v.clamp(0.0, 1.0))
}

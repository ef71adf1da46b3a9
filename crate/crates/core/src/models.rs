//! Generative pair distributions, single-letter log-likelihood ratios and
//! seeded database samplers.
//!
//! Under the null the two databases are independent with i.i.d. entries
//! drawn from the shared marginal `q`. Under the alternative the rows are
//! paired through a hidden permutation `σ`: `(X_i, Y_{σ_i})` are i.i.d.
//! draws from `P_XY^{⊗d}`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::is_permutation;
use crate::rng::{substream, Purpose};

const SUM_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Discrete models
// ---------------------------------------------------------------------------

/// Symmetric joint pmf on `{0..m-1}²` with equal marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteJointModel {
    alphabet_size: usize,
    joint: Vec<f64>,
    marginal: Vec<f64>,
}

impl DiscreteJointModel {
    /// Validates a row-major `m × m` joint pmf and derives its marginal.
    ///
    /// Checks non-negativity, total mass, symmetry and marginal consistency.
    /// Mutual absolute continuity is reported separately by
    /// [`Self::is_mutually_continuous`] so that degenerate corners can still
    /// be constructed.
    pub fn new(alphabet_size: usize, joint: Vec<f64>) -> Result<Self> {
        let marginal = row_sums(alphabet_size, &joint)?;
        Self::with_marginal(alphabet_size, joint, marginal)
    }

    /// As [`Self::new`] but checks the rows against an explicit marginal.
    pub fn with_marginal(
        alphabet_size: usize,
        joint: Vec<f64>,
        marginal: Vec<f64>,
    ) -> Result<Self> {
        let m = alphabet_size;
        if m == 0 {
            return Err(Error::Validation("alphabet_size must be positive".into()));
        }
        if joint.len() != m * m {
            return Err(Error::Shape(format!(
                "joint must have alphabet_size² = {} entries, got {}",
                m * m,
                joint.len()
            )));
        }
        if marginal.len() != m {
            return Err(Error::Shape(format!(
                "marginal must have {m} entries, got {}",
                marginal.len()
            )));
        }
        for (k, &v) in joint.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!(
                    "non-negativity: joint[{}][{}] = {v}",
                    k / m,
                    k % m
                )));
            }
        }
        let total: f64 = joint.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Validation(format!(
                "total mass: joint sums to {total}, expected 1"
            )));
        }
        for x in 0..m {
            for y in (x + 1)..m {
                let (a, b) = (joint[x * m + y], joint[y * m + x]);
                if (a - b).abs() > SUM_TOL {
                    return Err(Error::Validation(format!(
                        "symmetry: joint[{x}][{y}] = {a} but joint[{y}][{x}] = {b}"
                    )));
                }
            }
        }
        let rows = row_sums(m, &joint)?;
        for x in 0..m {
            if (rows[x] - marginal[x]).abs() > SUM_TOL {
                return Err(Error::Validation(format!(
                    "marginal consistency: row {x} of joint sums to {} but marginal[{x}] = {}",
                    rows[x], marginal[x]
                )));
            }
        }
        Ok(Self {
            alphabet_size: m,
            joint,
            marginal: rows,
        })
    }

    /// The product model `q ⊗ q`.
    pub fn independent(marginal: &[f64]) -> Result<Self> {
        let m = marginal.len();
        let mut joint = vec![0.0; m * m];
        for x in 0..m {
            for y in 0..m {
                joint[x * m + y] = marginal[x] * marginal[y];
            }
        }
        Self::new(m, joint)
    }

    #[must_use]
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    #[must_use]
    pub fn joint(&self, x: usize, y: usize) -> f64 {
        self.joint[x * self.alphabet_size + y]
    }

    /// Row-major joint pmf.
    #[must_use]
    pub fn joint_row_major(&self) -> &[f64] {
        &self.joint
    }

    #[must_use]
    pub fn marginal(&self) -> &[f64] {
        &self.marginal
    }

    /// `joint[x][y] > 0` exactly when `q(x)·q(y) > 0`.
    #[must_use]
    pub fn is_mutually_continuous(&self) -> bool {
        let m = self.alphabet_size;
        (0..m).all(|x| {
            (0..m).all(|y| (self.joint(x, y) > 0.0) == (self.marginal[x] * self.marginal[y] > 0.0))
        })
    }

    /// Errors unless the model is mutually absolutely continuous.
    pub fn require_continuous(&self) -> Result<()> {
        if self.is_mutually_continuous() {
            Ok(())
        } else {
            Err(Error::Degenerate(
                "joint and product of marginals are not mutually absolutely continuous".into(),
            ))
        }
    }

    /// Errors if some symbol has zero marginal mass.
    pub fn require_positive_marginal(&self) -> Result<()> {
        match self.marginal.iter().position(|&q| q <= 0.0) {
            Some(x) => Err(Error::Degenerate(format!("marginal q({x}) = 0"))),
            None => Ok(()),
        }
    }

    /// True when the joint equals the product of its marginals (within 1e-12).
    #[must_use]
    pub fn is_independent(&self) -> bool {
        let m = self.alphabet_size;
        (0..m).all(|x| {
            (0..m)
                .all(|y| (self.joint(x, y) - self.marginal[x] * self.marginal[y]).abs() <= SUM_TOL)
        })
    }

    /// Pearson correlation with symbols read as the numbers `0..m-1`.
    pub fn pearson_rho(&self) -> Result<f64> {
        let m = self.alphabet_size;
        let mean: f64 = (0..m).map(|x| x as f64 * self.marginal[x]).sum();
        let var: f64 = (0..m)
            .map(|x| (x as f64 - mean).powi(2) * self.marginal[x])
            .sum();
        if var <= 0.0 {
            return Err(Error::Degenerate("zero variance in the marginal".into()));
        }
        let mut cov = 0.0;
        for x in 0..m {
            for y in 0..m {
                cov += (x as f64 - mean) * (y as f64 - mean) * self.joint(x, y);
            }
        }
        Ok(cov / var)
    }

    /// `log joint(x,y)/(q(x)q(y))`.
    pub fn llr(&self, x: usize, y: usize) -> Result<f64> {
        let m = self.alphabet_size;
        if x >= m || y >= m {
            return Err(Error::Domain(format!(
                "symbol pair ({x}, {y}) outside alphabet of size {m}"
            )));
        }
        let qq = self.marginal[x] * self.marginal[y];
        if qq <= 0.0 {
            return Err(Error::Domain(format!(
                "symbol pair ({x}, {y}) outside the support of q⊗q"
            )));
        }
        let p = self.joint(x, y);
        if p <= 0.0 {
            return Err(Error::Degenerate(format!(
                "joint[{x}][{y}] = 0 on the support of q⊗q"
            )));
        }
        Ok((p / qq).ln())
    }
}

fn row_sums(m: usize, joint: &[f64]) -> Result<Vec<f64>> {
    if joint.len() != m * m {
        return Err(Error::Shape(format!(
            "joint must have alphabet_size² = {} entries, got {}",
            m * m,
            joint.len()
        )));
    }
    Ok((0..m)
        .map(|x| joint[x * m..(x + 1) * m].iter().sum())
        .collect())
}

// ---------------------------------------------------------------------------
// Parametric families
// ---------------------------------------------------------------------------

/// Standard bivariate normal pair with correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    rho: f64,
}

impl GaussianModel {
    /// Requires `0 < |rho| < 1`. At `|rho| = 1` the joint law is singular
    /// with respect to the product law and no likelihood ratio exists.
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(Error::Validation(format!(
                "rho must satisfy |rho| < 1, got {rho}"
            )));
        }
        if rho == 0.0 {
            return Err(Error::Validation("rho must be nonzero".into()));
        }
        Ok(Self { rho })
    }

    #[must_use]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Mehler-kernel log-likelihood ratio.
    #[must_use]
    pub fn llr(&self, x: f64, y: f64) -> f64 {
        let r = self.rho;
        let s = 1.0 - r * r;
        -0.5 * s.ln() + (-(x * x + y * y) * r * r + 2.0 * x * y * r) / (2.0 * s)
    }
}

/// Correlated Bernoulli pair: `X ~ Bern(τp)`, `Y | X=1 ~ Bern(τ)`,
/// `Y | X=0 ~ Bern(τp(1−τ)/(1−τp))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliModel {
    tau: f64,
    p: f64,
}

impl BernoulliModel {
    pub fn new(tau: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Validation(format!(
                "tau must lie in [0, 1], got {tau}"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Validation(format!("p must lie in (0, 1), got {p}")));
        }
        Ok(Self { tau, p })
    }

    #[must_use]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    #[must_use]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// `τ(1−p)/(1−τp)`.
    pub fn pearson_rho(&self) -> Result<f64> {
        let (t, p) = (self.tau, self.p);
        if t == 0.0 {
            return Err(Error::Degenerate("tau = 0 gives a constant X".into()));
        }
        Ok(t * (1.0 - p) / (1.0 - t * p))
    }

    /// The 2×2 joint pmf; symbol 1 is "success".
    pub fn joint(&self) -> Result<DiscreteJointModel> {
        let (t, p) = (self.tau, self.p);
        let j11 = t * t * p;
        let j10 = t * p * (1.0 - t);
        let j00 = 1.0 - 2.0 * t * p + t * t * p;
        DiscreteJointModel::new(2, vec![j00, j10, j10, j11])
    }
}

/// Builds the correlated Bernoulli joint pmf.
pub fn make_bernoulli(tau: f64, p: f64) -> Result<DiscreteJointModel> {
    BernoulliModel::new(tau, p)?.joint()
}

/// A validated pair distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum JointModel {
    Discrete(DiscreteJointModel),
    Gaussian(GaussianModel),
}

impl From<DiscreteJointModel> for JointModel {
    fn from(m: DiscreteJointModel) -> Self {
        Self::Discrete(m)
    }
}

impl From<GaussianModel> for JointModel {
    fn from(m: GaussianModel) -> Self {
        Self::Gaussian(m)
    }
}

impl JointModel {
    /// Single-letter LLR. Discrete observations are symbol indices stored
    /// as `f64` and must be exact integers.
    pub fn llr(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            Self::Gaussian(g) => {
                if !(x.is_finite() && y.is_finite()) {
                    return Err(Error::Domain(format!("non-finite observation ({x}, {y})")));
                }
                Ok(g.llr(x, y))
            }
            Self::Discrete(m) => {
                m.llr(symbol(x, m.alphabet_size())?, symbol(y, m.alphabet_size())?)
            }
        }
    }

    /// Sum of single-letter LLRs over the `d` features of a row pair.
    pub fn pair_llr(&self, x_row: &[f64], y_row: &[f64]) -> Result<f64> {
        if x_row.len() != y_row.len() {
            return Err(Error::Shape(format!(
                "row lengths differ: {} vs {}",
                x_row.len(),
                y_row.len()
            )));
        }
        if x_row.is_empty() {
            return Err(Error::Shape("rows must have at least one feature".into()));
        }
        x_row.iter().zip(y_row).map(|(&a, &b)| self.llr(a, b)).sum()
    }

    /// Short label used in reports.
    #[must_use]
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Discrete(_) => "discrete",
            Self::Gaussian(_) => "gaussian",
        }
    }
}

/// Converts a stored observation to a symbol index.
pub fn symbol(v: f64, m: usize) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && (v as usize) < m {
        Ok(v as usize)
    } else {
        Err(Error::Domain(format!(
            "observation {v} is not a symbol in 0..{m}"
        )))
    }
}

// ---------------------------------------------------------------------------
// Databases and samplers
// ---------------------------------------------------------------------------

/// Two `n × d` databases and, for alternative draws, the hidden pairing
/// (`X_i` is paired with `Y_{σ[i]}`, 0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatabasePair {
    pub x: Matrix,
    pub y: Matrix,
    pub hidden_sigma: Option<Vec<usize>>,
}

impl DatabasePair {
    /// Validates shapes and the optional permutation.
    pub fn new(x: Matrix, y: Matrix, hidden_sigma: Option<Vec<usize>>) -> Result<Self> {
        if x.rows() != y.rows() || x.cols() != y.cols() {
            return Err(Error::Shape(format!(
                "X is {}×{} but Y is {}×{}",
                x.rows(),
                x.cols(),
                y.rows(),
                y.cols()
            )));
        }
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::Shape(
                "databases must have n ≥ 1 rows and d ≥ 1 columns".into(),
            ));
        }
        if let Some(s) = &hidden_sigma {
            if !is_permutation(s, x.rows()) {
                return Err(Error::Validation(
                    "hidden_sigma is not a permutation of the rows".into(),
                ));
            }
        }
        Ok(Self { x, y, hidden_sigma })
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    #[must_use]
    pub fn d(&self) -> usize {
        self.x.cols()
    }
}

fn check_dims(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::Validation(format!(
            "n and d must be positive, got n={n}, d={d}"
        )));
    }
    Ok(())
}

/// Draws a null database pair from the `(seed, NullData, 0)` substream.
pub fn sample_null(model: &JointModel, n: usize, d: usize, seed: u64) -> Result<DatabasePair> {
    sample_null_with(model, n, d, &mut substream(seed, Purpose::NullData, 0))
}

/// Draws an alternative database pair from the `(seed, AltData, 0)`
/// substream. A missing `sigma` is drawn uniformly by Fisher-Yates first.
pub fn sample_alt(
    model: &JointModel,
    n: usize,
    d: usize,
    seed: u64,
    sigma: Option<&[usize]>,
) -> Result<DatabasePair> {
    sample_alt_with(
        model,
        n,
        d,
        &mut substream(seed, Purpose::AltData, 0),
        sigma,
    )
}

/// Null sampler on a caller-provided stream: all of `X` row-major, then
/// all of `Y`.
pub fn sample_null_with(
    model: &JointModel,
    n: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DatabasePair> {
    check_dims(n, d)?;
    let mut x = Matrix::zeros(n, d);
    let mut y = Matrix::zeros(n, d);
    match model {
        JointModel::Gaussian(_) => {
            for m in [&mut x, &mut y] {
                for i in 0..n {
                    for v in m.row_mut(i) {
                        *v = rng.sample(StandardNormal);
                    }
                }
            }
        }
        JointModel::Discrete(dm) => {
            let sampler = DiscreteSampler::new(dm);
            for m in [&mut x, &mut y] {
                for i in 0..n {
                    for v in m.row_mut(i) {
                        *v = sampler.marginal(rng.random()) as f64;
                    }
                }
            }
        }
    }
    DatabasePair::new(x, y, None)
}

/// Alternative sampler on a caller-provided stream. Draw order: the
/// permutation (if not supplied), then for each `i` and feature `ℓ` the
/// pair `(X_iℓ, Y_{σ_i ℓ})`.
pub fn sample_alt_with(
    model: &JointModel,
    n: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
    sigma: Option<&[usize]>,
) -> Result<DatabasePair> {
    check_dims(n, d)?;
    let sigma = match sigma {
        Some(s) => {
            if !is_permutation(s, n) {
                return Err(Error::Validation(format!(
                    "sigma is not a permutation of 0..{n}"
                )));
            }
            s.to_vec()
        }
        None => fisher_yates(n, rng),
    };
    let mut x = Matrix::zeros(n, d);
    let mut y = Matrix::zeros(n, d);
    match model {
        JointModel::Gaussian(g) => {
            let r = g.rho();
            let s = (1.0 - r * r).sqrt();
            for i in 0..n {
                for l in 0..d {
                    let a: f64 = rng.sample(StandardNormal);
                    let z: f64 = rng.sample(StandardNormal);
                    x.set(i, l, a);
                    y.set(sigma[i], l, r * a + s * z);
                }
            }
        }
        JointModel::Discrete(dm) => {
            let sampler = DiscreteSampler::new(dm);
            for i in 0..n {
                for l in 0..d {
                    let a = sampler.marginal(rng.random());
                    let b = sampler.conditional(a, rng.random());
                    x.set(i, l, a as f64);
                    y.set(sigma[i], l, b as f64);
                }
            }
        }
    }
    DatabasePair::new(x, y, Some(sigma))
}

/// Uniform permutation of `0..n` by Fisher-Yates.
pub fn fisher_yates(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Inverse-CDF tables for the marginal and the row conditionals.
struct DiscreteSampler {
    m: usize,
    marginal_cdf: Vec<f64>,
    conditional_cdf: Vec<f64>,
}

impl DiscreteSampler {
    fn new(model: &DiscreteJointModel) -> Self {
        let m = model.alphabet_size();
        let q = model.marginal();
        let marginal_cdf = cumulative(q);
        let mut conditional_cdf = vec![0.0; m * m];
        for x in 0..m {
            if q[x] > 0.0 {
                let row: Vec<f64> = (0..m).map(|y| model.joint(x, y) / q[x]).collect();
                conditional_cdf[x * m..(x + 1) * m].copy_from_slice(&cumulative(&row));
            }
        }
        Self {
            m,
            marginal_cdf,
            conditional_cdf,
        }
    }

    fn marginal(&self, u: f64) -> usize {
        invert(&self.marginal_cdf, u)
    }

    fn conditional(&self, x: usize, u: f64) -> usize {
        invert(&self.conditional_cdf[x * self.m..(x + 1) * self.m], u)
    }
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|&v| {
            acc += v;
            acc
        })
        .collect()
}

/// First index with `u < cdf[k]`; rounding slack at the top goes to the last
/// symbol of positive mass.
fn invert(cdf: &[f64], u: f64) -> usize {
    if let Some(k) = cdf.iter().position(|&c| u < c) {
        return k;
    }
    let mut prev = 0.0;
    let mut last = 0;
    for (k, &c) in cdf.iter().enumerate() {
        if c > prev {
            last = k;
        }
        prev = c;
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussHermite;

    fn diag_model() -> DiscreteJointModel {
        DiscreteJointModel::new(2, vec![0.4, 0.1, 0.1, 0.4]).unwrap()
    }

    fn check_invariants(m: &DiscreteJointModel) {
        let k = m.alphabet_size();
        let total: f64 = m.joint_row_major().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for x in 0..k {
            let row: f64 = (0..k).map(|y| m.joint(x, y)).sum();
            let col: f64 = (0..k).map(|y| m.joint(y, x)).sum();
            assert!((row - m.marginal()[x]).abs() < 1e-12);
            assert!((col - m.marginal()[x]).abs() < 1e-12);
            for y in 0..k {
                assert!(m.joint(x, y) >= 0.0);
                assert_eq!(m.joint(x, y), m.joint(y, x));
            }
        }
    }

    #[test]
    fn bernoulli_corners() {
        let m = make_bernoulli(0.0, 0.5).unwrap();
        assert_eq!(m.marginal()[1], 0.0);
        assert_eq!(m.joint(1, 1), 0.0);
        assert!(m.require_positive_marginal().is_err());

        let m = make_bernoulli(1.0, 0.5).unwrap();
        assert!((m.joint(1, 1) - 0.5).abs() < 1e-15);
        assert_eq!(m.joint(0, 1), 0.0);
        assert_eq!(m.joint(1, 0), 0.0);
        check_invariants(&m);
        assert!(!m.is_mutually_continuous());
        assert!((m.pearson_rho().unwrap() - 1.0).abs() < 1e-12);
        assert!(
            (BernoulliModel::new(1.0, 0.5)
                .unwrap()
                .pearson_rho()
                .unwrap()
                - 1.0)
                .abs()
                < 1e-15
        );

        assert!(
            matches!(make_bernoulli(1.5, 0.5), Err(Error::Validation(msg)) if msg.contains("tau"))
        );
        assert!(
            matches!(make_bernoulli(0.5, 1.0), Err(Error::Validation(msg)) if msg.contains('p'))
        );
    }

    #[test]
    fn bernoulli_conditional_law_and_rho() {
        let (t, p) = (0.5, 0.5);
        let m = make_bernoulli(t, p).unwrap();
        let q1 = m.marginal()[1];
        assert!((q1 - t * p).abs() < 1e-15);
        assert!((m.joint(1, 1) / q1 - t).abs() < 1e-15);
        assert!(
            (m.joint(0, 1) / m.marginal()[0] - t * p * (1.0 - t) / (1.0 - t * p)).abs() < 1e-15
        );
        assert!(
            (BernoulliModel::new(t, p).unwrap().pearson_rho().unwrap() - 1.0 / 3.0).abs() < 1e-15
        );
        assert!((m.pearson_rho().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_grid_satisfies_invariants() {
        for i in 0..=10 {
            for j in 1..10 {
                let (t, p) = (f64::from(i) / 10.0, f64::from(j) / 10.0);
                let m = make_bernoulli(t, p).unwrap();
                check_invariants(&m);
                if t > 0.0 && t < 1.0 {
                    assert!(m.is_mutually_continuous(), "tau={t}, p={p}");
                }
            }
        }
    }

    #[test]
    fn independent_model_has_zero_llr_and_rho() {
        let m = DiscreteJointModel::independent(&[0.3, 0.7]).unwrap();
        assert!(m.is_independent());
        assert!(m.pearson_rho().unwrap().abs() < 1e-12);
        let jm = JointModel::from(m);
        for x in 0..2 {
            for y in 0..2 {
                assert!(jm.llr(f64::from(x), f64::from(y)).unwrap().abs() < 1e-12);
            }
        }
        assert!(
            jm.pair_llr(&[0.0, 1.0, 1.0], &[1.0, 1.0, 0.0])
                .unwrap()
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn llr_values() {
        let g = JointModel::from(GaussianModel::new(0.6).unwrap());
        assert!((g.llr(0.0, 0.0).unwrap() - 0.223_143_551_314_209_7).abs() < 1e-12);
        let dm = JointModel::from(diag_model());
        assert!((dm.llr(0.0, 0.0).unwrap() - 1.6f64.ln()).abs() < 1e-15);
        let v = dm.pair_llr(&[0.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((v - (1.6f64.ln() + 0.4f64.ln())).abs() < 1e-15);
        assert!((v + 0.446_287_102_628_419_5).abs() < 1e-12);
        assert_eq!(
            dm.pair_llr(&[1.0], &[1.0]).unwrap(),
            dm.llr(1.0, 1.0).unwrap()
        );
        assert!(matches!(dm.llr(2.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(dm.llr(0.5, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            dm.pair_llr(&[0.0], &[0.0, 1.0]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn gaussian_rejects_boundary() {
        assert!(GaussianModel::new(1.0).is_err());
        assert!(GaussianModel::new(-1.0).is_err());
        assert!(GaussianModel::new(0.0).is_err());
        assert!(GaussianModel::new(f64::NAN).is_err());
        assert!(GaussianModel::new(-0.99).is_ok());
    }

    #[test]
    fn discrete_validation_names_invariant() {
        let err = DiscreteJointModel::new(2, vec![0.4, 0.2, 0.1, 0.3]).unwrap_err();
        assert!(err.to_string().contains("symmetry"), "{err}");
        let err = DiscreteJointModel::with_marginal(2, vec![0.4, 0.1, 0.1, 0.4], vec![0.6, 0.4])
            .unwrap_err();
        assert!(err.to_string().contains("marginal consistency"), "{err}");
        let err = DiscreteJointModel::new(2, vec![0.5, 0.1, 0.1, 0.4]).unwrap_err();
        assert!(err.to_string().contains("total mass"), "{err}");
        let err = DiscreteJointModel::new(2, vec![-0.1, 0.3, 0.3, 0.5]).unwrap_err();
        assert!(err.to_string().contains("non-negativity"), "{err}");
    }

    #[test]
    fn likelihood_ratio_is_normalized() {
        for m in [
            diag_model(),
            make_bernoulli(0.5, 0.5).unwrap(),
            make_bernoulli(0.9, 0.2).unwrap(),
        ] {
            let q = m.marginal().to_vec();
            let mut s = 0.0;
            for x in 0..2 {
                for y in 0..2 {
                    s += q[x] * q[y] * m.llr(x, y).unwrap().exp();
                }
            }
            assert!((s - 1.0).abs() < 1e-9);
        }
        let gh = GaussHermite::new(64);
        for rho in [-0.7, -0.2, 0.1, 0.5, 0.8] {
            let g = GaussianModel::new(rho).unwrap();
            let s = gh.expect2(|x, y| g.llr(x, y).exp());
            assert!((s - 1.0).abs() < 1e-9, "rho={rho}: {s}");
        }
    }

    #[test]
    fn samplers_are_deterministic() {
        for model in [
            JointModel::from(diag_model()),
            JointModel::from(GaussianModel::new(0.3).unwrap()),
        ] {
            assert_eq!(
                sample_null(&model, 3, 2, 7).unwrap(),
                sample_null(&model, 3, 2, 7).unwrap()
            );
            assert_eq!(
                sample_alt(&model, 3, 2, 7, None).unwrap(),
                sample_alt(&model, 3, 2, 7, None).unwrap()
            );
            assert_ne!(
                sample_null(&model, 3, 2, 7).unwrap(),
                sample_null(&model, 3, 2, 8).unwrap()
            );
        }
    }

    #[test]
    fn sampler_rejects_bad_inputs() {
        let model = JointModel::from(diag_model());
        assert!(sample_null(&model, 0, 2, 1).is_err());
        assert!(sample_alt(&model, 3, 0, 1, None).is_err());
        assert!(matches!(
            sample_alt(&model, 3, 1, 1, Some(&[0, 0, 1])),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn single_row_alternative_uses_identity() {
        let model = JointModel::from(diag_model());
        let pair = sample_alt(&model, 1, 4, 11, None).unwrap();
        assert_eq!(pair.hidden_sigma, Some(vec![0]));
    }

    fn four_sigma(sample_mean: f64, mean: f64, sd: f64, n: usize) -> bool {
        (sample_mean - mean).abs() <= 4.0 * sd / (n as f64).sqrt()
    }

    #[test]
    fn bernoulli_null_marginal_mean() {
        let model = JointModel::from(make_bernoulli(0.5, 0.5).unwrap());
        let n = 10_000;
        let pair = sample_null(&model, n, 1, 3).unwrap();
        let mean = pair.x.as_slice().iter().sum::<f64>() / n as f64;
        assert!(four_sigma(mean, 0.25, (0.25f64 * 0.75).sqrt(), n), "{mean}");
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / n;
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / n;
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>() / n;
        cov / (va * vb).sqrt()
    }

    #[test]
    fn gaussian_null_is_uncorrelated() {
        let model = JointModel::from(GaussianModel::new(0.9).unwrap());
        let n = 10_000;
        let pair = sample_null(&model, n, 1, 5).unwrap();
        let r = corr(pair.x.as_slice(), pair.y.as_slice());
        assert!(four_sigma(r, 0.0, 1.0, n), "{r}");
    }

    #[test]
    fn gaussian_alternative_correlation() {
        let model = JointModel::from(GaussianModel::new(0.8).unwrap());
        let n = 10_000;
        let id: Vec<usize> = (0..n).collect();
        let pair = sample_alt(&model, n, 1, 9, Some(&id)).unwrap();
        let r = corr(pair.x.as_slice(), pair.y.as_slice());
        // Asymptotic sd of the sample correlation is (1 - ρ²).
        assert!(four_sigma(r, 0.8, 1.0 - 0.64, n), "{r}");
    }

    #[test]
    fn alternative_rows_resorted_by_sigma_are_iid_pairs() {
        let dm = make_bernoulli(0.6, 0.5).unwrap();
        let model = JointModel::from(dm.clone());
        let n = 20_000;
        let pair = sample_alt(&model, n, 1, 21, None).unwrap();
        let sigma = pair.hidden_sigma.clone().unwrap();
        let y = pair.y.permute_rows(&sigma);
        let both = (0..n)
            .filter(|&i| pair.x.get(i, 0) == 1.0 && y.get(i, 0) == 1.0)
            .count();
        let freq = both as f64 / n as f64;
        let p11 = dm.joint(1, 1);
        assert!(
            four_sigma(freq, p11, (p11 * (1.0 - p11)).sqrt(), n),
            "{freq} vs {p11}"
        );
        // Marginal of Y alone is unchanged by the permutation.
        let ymean = pair.y.as_slice().iter().sum::<f64>() / n as f64;
        let q1 = dm.marginal()[1];
        assert!(four_sigma(ymean, q1, (q1 * (1.0 - q1)).sqrt(), n));
    }

    #[test]
    fn gaussian_alternative_pairs_have_unit_variance() {
        let model = JointModel::from(GaussianModel::new(-0.5).unwrap());
        let n = 20_000;
        let pair = sample_alt(&model, n, 1, 4, None).unwrap();
        let y = pair.y.permute_rows(pair.hidden_sigma.as_ref().unwrap());
        let r = corr(pair.x.as_slice(), y.as_slice());
        assert!(four_sigma(r, -0.5, 0.75, n), "{r}");
        let vy = y.as_slice().iter().map(|v| v * v).sum::<f64>() / n as f64;
        // Var of a chi-square(1) sample mean is 2/n.
        assert!(four_sigma(vy, 1.0, 2f64.sqrt(), n), "{vy}");
    }

    #[test]
    fn fisher_yates_is_uniform_on_s3() {
        let mut rng = substream(1, Purpose::AltData, 0);
        let mut counts = std::collections::HashMap::new();
        let trials = 60_000;
        for _ in 0..trials {
            *counts.entry(fisher_yates(3, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let p = 1.0 / 6.0;
        for &c in counts.values() {
            assert!(four_sigma(
                c as f64 / trials as f64,
                p,
                (p * (1.0 - p)).sqrt(),
                trials
            ));
        }
    }
}

//! Law of the single-letter log-likelihood ratio `𝓛 = log P/Q`: log-MGFs,
//! KL divergences, Chernoff exponents and the centered kernel of the sum
//! test.
//!
//! `ψ_Q(λ) = log E_Q[e^{λ𝓛}]` and `ψ_P(λ) = ψ_Q(λ+1)`. The Chernoff
//! exponents are the Legendre transforms `E_Q(θ) = sup_λ λθ − ψ_Q(λ)` and
//! `E_P(θ) = sup_λ λθ − ψ_P(λ) = E_Q(θ) − θ`, defined for
//! `θ ∈ (−KL(Q‖P), KL(P‖Q))`.
//!
//! For the Gaussian model the closed form used is
//! `ψ_Q(λ) = −((λ−1)/2)·log(1−ρ²) − ½·log(1−(1−λ)²ρ²)`, finite for
//! `|1−λ|·|ρ| < 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{DiscreteJointModel, GaussianModel, JointModel};
use crate::numeric::log_sum_exp;

/// Values closer than this are merged into one atom.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

const GOLDEN_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

/// One support point of the LLR law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlrAtom {
    pub value: f64,
    pub q_prob: f64,
    pub p_prob: f64,
}

/// The exact law of `𝓛(A,B)` under `Q` and under `P`, sorted by value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlrAtoms {
    pub atoms: Vec<LlrAtom>,
}

/// Collects the LLR over the support of `q⊗q`, merging equal values.
pub fn llr_atoms(model: &DiscreteJointModel) -> Result<LlrAtoms> {
    model.require_continuous()?;
    let m = model.alphabet_size();
    let q = model.marginal();
    let mut cells = Vec::with_capacity(m * m);
    for x in 0..m {
        for y in 0..m {
            let qq = q[x] * q[y];
            if qq > 0.0 {
                cells.push(LlrAtom {
                    value: model.llr(x, y)?,
                    q_prob: qq,
                    p_prob: model.joint(x, y),
                });
            }
        }
    }
    cells.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut atoms: Vec<LlrAtom> = Vec::new();
    for c in cells {
        match atoms.last_mut() {
            Some(last) if c.value - last.value <= ATOM_MERGE_TOL => {
                last.q_prob += c.q_prob;
                last.p_prob += c.p_prob;
            }
            _ => atoms.push(c),
        }
    }
    Ok(LlrAtoms { atoms })
}

// ---------------------------------------------------------------------------
// Log-MGF
// ---------------------------------------------------------------------------

/// Which log-MGF / exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Q,
    P,
}

/// Precomputed LLR law, reused across many `ψ` evaluations.
#[derive(Debug, Clone)]
pub enum LlrLaw {
    Discrete(LlrAtoms),
    Gaussian(f64),
}

impl LlrLaw {
    pub fn new(model: &JointModel) -> Result<Self> {
        match model {
            JointModel::Discrete(m) => Ok(Self::Discrete(llr_atoms(m)?)),
            JointModel::Gaussian(g) => Ok(Self::Gaussian(g.rho())),
        }
    }

    /// Open interval of `λ` where `ψ_Q` is finite.
    #[must_use]
    pub fn domain_q(&self) -> (f64, f64) {
        match self {
            Self::Discrete(_) => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Gaussian(r) => (1.0 - 1.0 / r.abs(), 1.0 + 1.0 / r.abs()),
        }
    }

    /// `ψ_Q(λ)`.
    pub fn psi_q(&self, lam: f64) -> Result<f64> {
        match self {
            Self::Discrete(a) => {
                let terms: Vec<f64> = a
                    .atoms
                    .iter()
                    .map(|t| t.q_prob.ln() + lam * t.value)
                    .collect();
                Ok(log_sum_exp(&terms))
            }
            Self::Gaussian(r) => {
                let u = (1.0 - lam) * r;
                if !(u.abs() < 1.0) {
                    return Err(Error::Domain(format!(
                        "E_Q[exp(λ𝓛)] diverges at λ = {lam} for ρ = {r}"
                    )));
                }
                let s = (-r * r).ln_1p();
                Ok(-0.5 * (lam - 1.0) * s - 0.5 * (-u * u).ln_1p())
            }
        }
    }

    /// `ψ_Q'(λ)`, the mean of `𝓛` under the `λ`-tilted law.
    pub fn dpsi_q(&self, lam: f64) -> Result<f64> {
        match self {
            Self::Discrete(a) => {
                let logs: Vec<f64> = a
                    .atoms
                    .iter()
                    .map(|t| t.q_prob.ln() + lam * t.value)
                    .collect();
                let z = log_sum_exp(&logs);
                Ok(a.atoms
                    .iter()
                    .zip(&logs)
                    .map(|(t, l)| t.value * (l - z).exp())
                    .sum())
            }
            Self::Gaussian(r) => {
                let u = (1.0 - lam) * r;
                if !(u.abs() < 1.0) {
                    return Err(Error::Domain(format!(
                        "E_Q[exp(λ𝓛)] diverges at λ = {lam} for ρ = {r}"
                    )));
                }
                Ok(-0.5 * (-r * r).ln_1p() - (1.0 - lam) * r * r / (1.0 - u * u))
            }
        }
    }

    fn psi(&self, side: Side, lam: f64) -> Result<f64> {
        match side {
            Side::Q => self.psi_q(lam),
            Side::P => self.psi_q(lam + 1.0),
        }
    }

    fn dpsi(&self, side: Side, lam: f64) -> Result<f64> {
        match side {
            Side::Q => self.dpsi_q(lam),
            Side::P => self.dpsi_q(lam + 1.0),
        }
    }

    /// Directed and symmetric KL divergences.
    #[must_use]
    pub fn kl(&self) -> KlDivergences {
        match self {
            Self::Discrete(a) => {
                let kl_pq: f64 = a.atoms.iter().map(|t| t.p_prob * t.value).sum();
                let kl_qp: f64 = -a.atoms.iter().map(|t| t.q_prob * t.value).sum::<f64>();
                KlDivergences::new(kl_pq.max(0.0), kl_qp.max(0.0))
            }
            Self::Gaussian(r) => {
                let s = (-r * r).ln_1p();
                KlDivergences::new(-0.5 * s, 0.5 * s + r * r / (1.0 - r * r))
            }
        }
    }
}

/// `ψ_Q(λ) = log E_Q[exp(λ𝓛)]`.
pub fn psi_q(model: &JointModel, lam: f64) -> Result<f64> {
    LlrLaw::new(model)?.psi_q(lam)
}

/// `ψ_P(λ) = ψ_Q(λ+1)`.
pub fn psi_p(model: &JointModel, lam: f64) -> Result<f64> {
    psi_q(model, lam + 1.0)
}

/// Direct Gaussian form `ψ_P(λ) = −(λ/2)log(1−ρ²) − ½log(1−λ²ρ²)`.
pub fn gaussian_psi_p_direct(model: &GaussianModel, lam: f64) -> Result<f64> {
    let r = model.rho();
    let u = lam * r;
    if !(u.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "E_P[exp(λ𝓛)] diverges at λ = {lam} for ρ = {r}"
        )));
    }
    Ok(-0.5 * lam * (-r * r).ln_1p() - 0.5 * (-u * u).ln_1p())
}

// ---------------------------------------------------------------------------
// Divergences
// ---------------------------------------------------------------------------

/// `KL(P‖Q)`, `KL(Q‖P)` and their average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlDivergences {
    pub kl_pq: f64,
    pub kl_qp: f64,
    pub skl: f64,
}

impl KlDivergences {
    fn new(kl_pq: f64, kl_qp: f64) -> Self {
        Self {
            kl_pq,
            kl_qp,
            skl: 0.5 * (kl_pq + kl_qp),
        }
    }
}

pub fn kl_divergences(model: &JointModel) -> Result<KlDivergences> {
    Ok(LlrLaw::new(model)?.kl())
}

// ---------------------------------------------------------------------------
// Chernoff exponents
// ---------------------------------------------------------------------------

/// Maximizer of `λθ − ψ(λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub theta: f64,
    pub value: f64,
    pub argmax_lambda: f64,
    pub iterations: u32,
    /// Set when the supremum sits at a wall of the log-MGF domain.
    pub at_boundary: bool,
}

/// `E_Q(θ)` or `E_P(θ)` by golden-section search.
pub fn chernoff_e(model: &JointModel, theta: f64, side: Side) -> Result<ExponentResult> {
    chernoff_e_with(&LlrLaw::new(model)?, theta, side)
}

/// [`chernoff_e`] on a precomputed law.
pub fn chernoff_e_with(law: &LlrLaw, theta: f64, side: Side) -> Result<ExponentResult> {
    let kl = law.kl();
    if kl.kl_pq <= 0.0 {
        return Err(Error::Degenerate(
            "KL(P‖Q) = 0: exponents are undefined for independent models".into(),
        ));
    }
    if !theta.is_finite() || theta < -kl.kl_qp || theta > kl.kl_pq {
        return Err(Error::Domain(format!(
            "theta = {theta} outside [−KL(Q‖P), KL(P‖Q)] = [{}, {}]",
            -kl.kl_qp, kl.kl_pq
        )));
    }
    // Endpoint limits: the maximizer is λ = 0 or λ = 1 (shifted by −1 for P).
    let shift = if side == Side::P { -1.0 } else { 0.0 };
    let endpoint = |lam: f64, value: f64| ExponentResult {
        theta,
        value,
        argmax_lambda: lam + shift,
        iterations: 0,
        at_boundary: false,
    };
    if theta == -kl.kl_qp {
        return Ok(endpoint(0.0, if side == Side::Q { 0.0 } else { kl.kl_qp }));
    }
    if theta == kl.kl_pq {
        return Ok(endpoint(1.0, if side == Side::Q { kl.kl_pq } else { 0.0 }));
    }

    let (wall_lo, wall_hi) = {
        let (a, b) = law.domain_q();
        (a + shift, b + shift)
    };
    let slope = |lam: f64| law.dpsi(side, lam).map(|g| theta - g);
    let objective = |lam: f64| law.psi(side, lam).map(|p| lam * theta - p);

    let (mut lo, mut hi) = (-1.0 + shift, 2.0 + shift);
    // λ = 0 and λ = 1 (shifted) always lie inside the domain.
    if lo <= wall_lo {
        lo = 0.5 * (wall_lo + shift);
    }
    if hi >= wall_hi {
        hi = 0.5 * (wall_hi + 1.0 + shift);
    }
    let mut at_boundary = false;
    let mut step = 1.0;
    let mut guard = 0;
    while slope(lo)? <= 0.0 {
        guard += 1;
        if guard > 2000 {
            at_boundary = true;
            break;
        }
        hi = lo;
        let next = lo - step;
        lo = if next <= wall_lo {
            0.5 * (lo + wall_lo)
        } else {
            next
        };
        step *= 2.0;
    }
    step = 1.0;
    guard = 0;
    while slope(hi)? >= 0.0 {
        guard += 1;
        if guard > 2000 {
            at_boundary = true;
            break;
        }
        lo = hi;
        let next = hi + step;
        hi = if next >= wall_hi {
            0.5 * (hi + wall_hi)
        } else {
            next
        };
        step *= 2.0;
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    let mut iterations = 0;
    while hi - lo > GOLDEN_TOL {
        iterations += 1;
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = objective(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = objective(d)?;
        }
    }
    let lam = 0.5 * (lo + hi);
    // λθ − ψ(λ) vanishes at λ = 0 for both sides, so the sup is ≥ 0.
    let value = objective(lam)?.max(0.0);
    Ok(ExponentResult {
        theta,
        value,
        argmax_lambda: lam,
        iterations,
        at_boundary,
    })
}

// ---------------------------------------------------------------------------
// Centered kernel
// ---------------------------------------------------------------------------

/// `𝒦(x,y) = 𝓛(x,y) − E_A[𝓛(A,y)] − E_B[𝓛(x,B)] − KL(Q‖P)` with `A, B ~ q`.
#[derive(Debug, Clone)]
pub enum CenteredKernel {
    /// Row-major `m × m` table (NaN outside the support).
    Discrete { m: usize, table: Vec<f64> },
    /// `𝒦 = c·x·y` with `c = ρ/(1−ρ²)`.
    Gaussian { c: f64 },
}

impl CenteredKernel {
    pub fn new(model: &JointModel) -> Result<Self> {
        match model {
            JointModel::Gaussian(g) => {
                let r = g.rho();
                Ok(Self::Gaussian {
                    c: r / (1.0 - r * r),
                })
            }
            JointModel::Discrete(dm) => {
                dm.require_continuous()?;
                let m = dm.alphabet_size();
                let q = dm.marginal();
                let mut llr = vec![f64::NAN; m * m];
                for x in 0..m {
                    for y in 0..m {
                        if q[x] * q[y] > 0.0 {
                            llr[x * m + y] = dm.llr(x, y)?;
                        }
                    }
                }
                let cond = |x: usize| -> f64 {
                    (0..m)
                        .filter(|&b| q[b] > 0.0)
                        .map(|b| q[b] * llr[x * m + b])
                        .sum()
                };
                let row: Vec<f64> = (0..m)
                    .map(|x| if q[x] > 0.0 { cond(x) } else { f64::NAN })
                    .collect();
                let kl_qp = -(0..m)
                    .filter(|&x| q[x] > 0.0)
                    .map(|x| q[x] * row[x])
                    .sum::<f64>();
                let mut table = vec![f64::NAN; m * m];
                for x in 0..m {
                    for y in 0..m {
                        if q[x] * q[y] > 0.0 {
                            // The joint is symmetric, so E_A[𝓛(A,y)] = row[y].
                            table[x * m + y] = llr[x * m + y] - row[y] - row[x] - kl_qp;
                        }
                    }
                }
                Ok(Self::Discrete { m, table })
            }
        }
    }

    /// `𝒦(x,y)`; discrete observations are symbol indices.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            Self::Gaussian { c } => Ok(c * x * y),
            Self::Discrete { m, table } => {
                let (a, b) = (crate::models::symbol(x, *m)?, crate::models::symbol(y, *m)?);
                let v = table[a * m + b];
                if v.is_nan() {
                    Err(Error::Domain(format!(
                        "({a}, {b}) outside the support of q⊗q"
                    )))
                } else {
                    Ok(v)
                }
            }
        }
    }
}

pub fn centered_kernel(model: &JointModel, x: f64, y: f64) -> Result<f64> {
    CenteredKernel::new(model)?.eval(x, y)
}

/// `Var_Q(𝒦(A,B))` for independent `A, B ~ q`.
pub fn var_q_centered_kernel(model: &JointModel) -> Result<f64> {
    match (model, CenteredKernel::new(model)?) {
        (JointModel::Gaussian(g), _) => {
            let r = g.rho();
            Ok(r * r / (1.0 - r * r).powi(2))
        }
        (JointModel::Discrete(dm), CenteredKernel::Discrete { m, table }) => {
            let q = dm.marginal();
            let mut s = 0.0;
            for x in 0..m {
                for y in 0..m {
                    if q[x] * q[y] > 0.0 {
                        s += q[x] * q[y] * table[x * m + y].powi(2);
                    }
                }
            }
            Ok(s)
        }
        _ => unreachable!("kernel variant follows the model variant"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::make_bernoulli;
    use crate::quadrature::GaussHermite;
    use crate::spectral;

    fn diag() -> DiscreteJointModel {
        DiscreteJointModel::new(2, vec![0.4, 0.1, 0.1, 0.4]).unwrap()
    }

    fn gauss(rho: f64) -> JointModel {
        JointModel::from(GaussianModel::new(rho).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn models() -> Vec<JointModel> {
        vec![
            JointModel::from(diag()),
            JointModel::from(make_bernoulli(0.5, 0.5).unwrap()),
            JointModel::from(make_bernoulli(0.8, 0.3).unwrap()),
            JointModel::from(
                DiscreteJointModel::new(3, vec![0.2, 0.05, 0.05, 0.05, 0.25, 0.1, 0.05, 0.1, 0.15])
                    .unwrap(),
            ),
            gauss(0.6),
            gauss(-0.3),
        ]
    }

    #[test]
    fn atom_examples() {
        let a = llr_atoms(&diag()).unwrap();
        assert_eq!(a.atoms.len(), 2);
        assert!(close(a.atoms[0].value, 0.4f64.ln(), 1e-15));
        assert!(close(a.atoms[0].q_prob, 0.5, 1e-15) && close(a.atoms[0].p_prob, 0.2, 1e-15));
        assert!(close(a.atoms[1].value, 1.6f64.ln(), 1e-15));
        assert!(close(a.atoms[1].q_prob, 0.5, 1e-15) && close(a.atoms[1].p_prob, 0.8, 1e-15));

        let ind = llr_atoms(&DiscreteJointModel::independent(&[0.3, 0.7]).unwrap()).unwrap();
        assert_eq!(ind.atoms.len(), 1);
        assert!(ind.atoms[0].value.abs() < 1e-12);
        assert!(close(ind.atoms[0].q_prob, 1.0, 1e-12) && close(ind.atoms[0].p_prob, 1.0, 1e-12));

        let b = llr_atoms(&make_bernoulli(0.5, 0.5).unwrap()).unwrap();
        assert_eq!(b.atoms.len(), 3);
        let values: Vec<f64> = b.atoms.iter().map(|t| t.value).collect();
        let expect = [(2.0f64 / 3.0).ln(), (0.625f64 / 0.5625).ln(), 2f64.ln()];
        for (v, e) in values.iter().zip(expect) {
            assert!(close(*v, e, 1e-12));
        }
        for t in &b.atoms {
            assert!(close(t.p_prob, t.q_prob * t.value.exp(), 1e-10));
        }
        assert!(matches!(
            llr_atoms(&make_bernoulli(1.0, 0.5).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn psi_normalization_identities() {
        for m in models() {
            assert!(psi_q(&m, 0.0).unwrap().abs() < 1e-9);
            assert!(psi_q(&m, 1.0).unwrap().abs() < 1e-9);
            assert!(psi_p(&m, 0.0).unwrap().abs() < 1e-9);
            assert!(psi_p(&m, -1.0).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn psi_examples() {
        let g = gauss(0.6);
        assert!(close(psi_q(&g, 2.0).unwrap(), -(0.64f64).ln(), 1e-12));
        assert!(close(psi_q(&g, 2.0).unwrap(), 0.44629, 1e-5));
        assert!(close(psi_p(&g, 1.0).unwrap(), -(0.64f64).ln(), 1e-12));
        let gm = GaussianModel::new(0.6).unwrap();
        for lam in [-1.5, -0.5, 0.0, 0.3, 1.0, 1.6] {
            assert!(close(
                gaussian_psi_p_direct(&gm, lam).unwrap(),
                psi_p(&g, lam).unwrap(),
                1e-12
            ));
        }
        assert!(matches!(psi_q(&g, 3.0), Err(Error::Domain(_))));
    }

    /// `E[f(A,B)]` for independent standard normals with nodes stretched by
    /// `s` and weights corrected by the density ratio, so integrands growing
    /// like `exp(c·x²)` with `c < (1 − 1/s²)/2` stay well resolved.
    fn scaled_expect2(gh: &GaussHermite, s: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
        let ratio = |x: f64| s * (-0.5 * x * x * (1.0 - 1.0 / (s * s))).exp();
        let mut acc = 0.0;
        for (&ti, &wi) in gh.nodes().iter().zip(gh.weights()) {
            for (&tj, &wj) in gh.nodes().iter().zip(gh.weights()) {
                let (x, y) = (s * ti, s * tj);
                acc += wi * wj * ratio(x) * ratio(y) * f(x, y);
            }
        }
        acc
    }

    #[test]
    fn psi_matches_quadrature() {
        let gh = GaussHermite::new(64);
        for rho in [0.1, 0.3, 0.5] {
            let g = GaussianModel::new(rho).unwrap();
            let jm = JointModel::from(g);
            for lam in [-0.5, 0.0, 0.5, 1.0, 1.5, 2.0] {
                let quad = scaled_expect2(&gh, 3f64.sqrt(), |x, y| (lam * g.llr(x, y)).exp()).ln();
                assert!(
                    close(psi_q(&jm, lam).unwrap(), quad, 1e-6),
                    "rho={rho} lam={lam}"
                );
            }
        }
    }

    #[test]
    fn trace_identity_for_discrete_models() {
        for m in models() {
            if let JointModel::Discrete(dm) = &m {
                let p = spectral::eigenvalues(dm).unwrap();
                assert!(close(psi_q(&m, 2.0).unwrap().exp(), p.power_sum(1), 1e-8));
            }
        }
    }

    #[test]
    fn kl_examples() {
        let k = kl_divergences(&gauss(0.6)).unwrap();
        assert!(close(k.kl_pq, 0.22314, 1e-5));
        assert!(close(k.kl_qp, 0.33936, 1e-5));
        assert!(close(k.skl, 0.28125, 1e-12));
        for rho in [-0.9, -0.4, 0.05, 0.3, 0.7, 0.95] {
            let k = kl_divergences(&gauss(rho)).unwrap();
            assert!(close(k.skl, rho * rho / (2.0 * (1.0 - rho * rho)), 1e-12));
        }
        let k = kl_divergences(&JointModel::from(
            DiscreteJointModel::independent(&[0.5, 0.5]).unwrap(),
        ))
        .unwrap();
        assert!(k.kl_pq.abs() < 1e-15 && k.kl_qp.abs() < 1e-15 && k.skl.abs() < 1e-15);
        // Discrete KL against a direct sum over cells.
        let dm = diag();
        let direct: f64 = [(0.4, 0.25), (0.1, 0.25), (0.1, 0.25), (0.4, 0.25)]
            .iter()
            .map(|(p, q): &(f64, f64)| p * (p / q).ln())
            .sum();
        assert!(close(
            kl_divergences(&JointModel::from(dm)).unwrap().kl_pq,
            direct,
            1e-15
        ));
    }

    #[test]
    fn chernoff_identities() {
        for m in models() {
            let k = kl_divergences(&m).unwrap();
            for i in 1..20 {
                let theta = -k.kl_qp + (k.kl_pq + k.kl_qp) * f64::from(i) / 20.0;
                let eq = chernoff_e(&m, theta, Side::Q).unwrap();
                let ep = chernoff_e(&m, theta, Side::P).unwrap();
                assert!(eq.value >= 0.0 && ep.value >= 0.0);
                assert!(close(ep.value, eq.value - theta, 1e-6), "{m:?} θ={theta}");
                assert!(!eq.at_boundary && !ep.at_boundary);
            }
            let eq = chernoff_e(&m, k.kl_pq, Side::Q).unwrap();
            assert!(close(eq.value, k.kl_pq, 1e-6));
            assert!(chernoff_e(&m, -k.kl_qp, Side::Q).unwrap().value.abs() < 1e-6);
            assert!(chernoff_e(&m, k.kl_pq, Side::P).unwrap().value.abs() < 1e-6);
            let eps = 1e-7;
            assert!(chernoff_e(&m, -k.kl_qp + eps, Side::Q).unwrap().value < 1e-6);
            assert!(chernoff_e(&m, k.kl_pq - eps, Side::P).unwrap().value < 1e-6);
            assert!(close(
                chernoff_e(&m, k.kl_pq - eps, Side::Q).unwrap().value,
                k.kl_pq,
                1e-6
            ));
            assert!(matches!(
                chernoff_e(&m, k.kl_pq + 0.1, Side::Q),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn chernoff_gaussian_zero_threshold() {
        let m = gauss(0.6);
        let r = chernoff_e(&m, 0.0, Side::Q).unwrap();
        let witness = -0.25 * (0.64f64).ln() + 0.5 * (1.0 - 0.09f64).ln();
        assert!(r.value >= witness);
        // Independent oracle: dense grid over the domain.
        let law = LlrLaw::new(&m).unwrap();
        let grid_max = (1..200_000)
            .map(|i| -0.66 + 3.3 * f64::from(i) / 200_000.0)
            .filter_map(|l| law.psi_q(l).ok().map(|p| -p))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(close(r.value, grid_max, 1e-9));
        assert!(close(r.value, 0.065_078, 1e-5));
    }

    #[test]
    fn chernoff_convexity() {
        for m in models() {
            let k = kl_divergences(&m).unwrap();
            let span = k.kl_pq + k.kl_qp;
            for i in 1..9 {
                let a = -k.kl_qp + span * f64::from(i) / 10.0;
                let b = a + span / 10.0;
                let mid = 0.5 * (a + b);
                let e = |t| chernoff_e(&m, t, Side::Q).unwrap().value;
                assert!(e(mid) <= 0.5 * (e(a) + e(b)) + 1e-9);
            }
        }
    }

    #[test]
    fn independent_exponents_are_degenerate() {
        let m = JointModel::from(DiscreteJointModel::independent(&[0.5, 0.5]).unwrap());
        assert!(matches!(
            chernoff_e(&m, 0.0, Side::Q),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn centered_kernel_examples() {
        assert!(close(
            centered_kernel(&gauss(0.6), 1.0, 1.0).unwrap(),
            0.9375,
            1e-15
        ));
        let ind = JointModel::from(DiscreteJointModel::independent(&[0.3, 0.7]).unwrap());
        for x in 0..2 {
            for y in 0..2 {
                assert!(
                    centered_kernel(&ind, f64::from(x), f64::from(y))
                        .unwrap()
                        .abs()
                        < 1e-12
                );
            }
        }
        // Zero mean under Q: exact sum for discrete, quadrature for Gaussian.
        for m in models() {
            match &m {
                JointModel::Discrete(dm) => {
                    let q = dm.marginal();
                    let k = dm.alphabet_size();
                    let mut s = 0.0;
                    for x in 0..k {
                        for y in 0..k {
                            s += q[x] * q[y] * centered_kernel(&m, x as f64, y as f64).unwrap();
                        }
                    }
                    assert!(s.abs() < 1e-12);
                }
                JointModel::Gaussian(g) => {
                    let gh = GaussHermite::new(64);
                    let kern = CenteredKernel::new(&m).unwrap();
                    assert!(gh.expect2(|x, y| kern.eval(x, y).unwrap()).abs() < 1e-12);
                    // Defining formula reproduces the closed form.
                    let kl = kl_divergences(&m).unwrap();
                    let (x, y) = (0.7, -1.3);
                    let ea = gh.expect(|a| g.llr(a, y));
                    let eb = gh.expect(|b| g.llr(x, b));
                    let direct = g.llr(x, y) - ea - eb - kl.kl_qp;
                    assert!(close(direct, kern.eval(x, y).unwrap(), 1e-10));
                }
            }
        }
    }

    #[test]
    fn centered_kernel_matches_definition_discrete() {
        let dm = make_bernoulli(0.7, 0.4).unwrap();
        let m = JointModel::from(dm.clone());
        let q = dm.marginal();
        let kl_qp = kl_divergences(&m).unwrap().kl_qp;
        for x in 0..2 {
            for y in 0..2 {
                let ea: f64 = (0..2).map(|a| q[a] * dm.llr(a, y).unwrap()).sum();
                let eb: f64 = (0..2).map(|b| q[b] * dm.llr(x, b).unwrap()).sum();
                let direct = dm.llr(x, y).unwrap() - ea - eb - kl_qp;
                assert!(close(
                    centered_kernel(&m, x as f64, y as f64).unwrap(),
                    direct,
                    1e-14
                ));
            }
        }
    }

    #[test]
    fn variance_examples() {
        assert!(close(
            var_q_centered_kernel(&gauss(0.6)).unwrap(),
            0.36 / 0.4096,
            1e-14
        ));
        assert!(close(
            var_q_centered_kernel(&gauss(0.6)).unwrap(),
            0.87891,
            1e-5
        ));
        let ind = JointModel::from(DiscreteJointModel::independent(&[0.3, 0.7]).unwrap());
        assert!(var_q_centered_kernel(&ind).unwrap() < 1e-24);
        // Four-cell brute force: 𝒦 = ±log 2 with probability ¼ each cell.
        let v = var_q_centered_kernel(&JointModel::from(diag())).unwrap();
        let l16 = 1.6f64.ln();
        let l04 = 0.4f64.ln();
        let kl_qp = -0.5 * (l16 + l04);
        let row = 0.5 * (l16 + l04);
        let k00 = l16 - 2.0 * row - kl_qp;
        let k01 = l04 - 2.0 * row - kl_qp;
        let brute = 0.25 * (2.0 * k00 * k00 + 2.0 * k01 * k01);
        assert!(close(v, brute, 1e-15));
        assert!(close(v, 2f64.ln().powi(2), 1e-14));
        // Gaussian closed form against quadrature.
        let gh = GaussHermite::new(64);
        let kern = CenteredKernel::new(&gauss(0.4)).unwrap();
        let quad = gh.expect2(|x, y| kern.eval(x, y).unwrap().powi(2));
        assert!(close(
            quad,
            var_q_centered_kernel(&gauss(0.4)).unwrap(),
            1e-12
        ));
    }
}

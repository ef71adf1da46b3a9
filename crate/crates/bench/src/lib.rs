//! Shared fixtures for the benchmarks.

use dbmatch_core::models::{make_bernoulli, sample_alt};
use dbmatch_core::{DatabasePair, DiscreteJointModel, GaussianModel, JointModel};

/// Seed used by every fixture.
pub const SEED: u64 = 0x5eed;

#[must_use]
pub fn gaussian(rho: f64) -> JointModel {
    GaussianModel::new(rho).expect("valid rho").into()
}

#[must_use]
pub fn bernoulli() -> JointModel {
    make_bernoulli(0.6, 0.5).expect("valid parameters").into()
}

/// A three-symbol model with a non-uniform marginal.
#[must_use]
pub fn ternary() -> DiscreteJointModel {
    DiscreteJointModel::new(3, vec![0.25, 0.05, 0.05, 0.05, 0.2, 0.05, 0.05, 0.05, 0.25])
        .expect("valid joint")
}

/// A pair drawn under the alternative.
#[must_use]
pub fn alt_pair(model: &JointModel, n: usize, d: usize) -> DatabasePair {
    sample_alt(model, n, d, SEED, None).expect("sampling succeeds")
}

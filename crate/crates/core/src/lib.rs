//! Detecting dependence between two databases whose rows were shuffled by
//! an unknown permutation.
//!
//! The crate provides the generative models and samplers ([`models`]),
//! spectral lower-bound calculus ([`spectral`]), log-MGF and Chernoff
//! exponent machinery ([`exponents`]), the GLRT, sum and count detectors
//! with exact small-instance oracles ([`detectors`]), and a seeded
//! Monte-Carlo risk harness ([`experiments`]).

// Guards like `!(x > 0.0)` are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assignment;
pub mod capacity;
pub mod config;
pub mod detectors;
pub mod error;
pub mod experiments;
pub mod exponents;
pub mod io;
pub mod matrix;
pub mod models;
pub mod numeric;
pub mod quadrature;
pub mod rng;
pub mod spectral;

pub use capacity::Capacity;
pub use detectors::{CountTestPlan, DetectorKind, PdMethod, Verdict};
pub use error::{Error, Result};
pub use experiments::{RiskEstimate, TrialPlan};
pub use exponents::{ExponentResult, KlDivergences, LlrAtoms, Side};
pub use matrix::Matrix;
pub use models::{BernoulliModel, DatabasePair, DiscreteJointModel, GaussianModel, JointModel};
pub use spectral::{CycleType, SpectralProfile};

//! Estimation of the transverse displacement between two photons from
//! momentum-resolved two-photon interference at a balanced beam splitter.
//!
//! Modules, bottom-up:
//!
//! - [`wavepacket`]: momentum densities, the beat envelope `C(Δk)`, and the
//!   quantum Fisher information `H = 2σ_k²`.
//! - [`detection`]: outcome densities for every detector variant.
//! - [`sampler`]: exact, reproducible event generation.
//! - [`information`]: Fisher information and Cramér–Rao bounds.
//! - [`estimator`]: maximum likelihood and the Monte Carlo trial harness.
//! - [`units`]: lab-frame conversions.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detection;
pub mod error;
pub mod estimator;
pub mod information;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod units;
pub mod wavepacket;

pub use detection::{
    bin_probability, bucket_probs, check_resolution, joint_density, joint_density_dx, joint_density_kk,
    BucketProbs, DetectorMode, DetectorModel, Outcome, ResolutionReport, SceneParams,
};
pub use error::{Error, Result};
pub use estimator::{
    log_likelihood, mle, mle_bucket, run_trials, run_trials_with_records, EstimationResult, SearchInterval,
    TrialConfig, TrialRecord, TrialStatistics,
};
pub use information::{
    crb, fi_contribution, fisher_asymptote, fisher_nonresolving, fisher_partial, fisher_resolving,
    fisher_resolving_quadrature, fisher_single_camera, FisherReport,
};
pub use sampler::{sample_batch, sample_event, DetectionEvent, SampleSet};
pub use wavepacket::{envelope, make_gaussian, qfi, BeatEnvelope, MomentumDistribution};

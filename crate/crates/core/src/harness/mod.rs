//! Coefficient sets, the linearized identity, gauge experiments, recovery
//! demonstrations and file formats.

mod coeffs;
mod gauge;
mod hypotheses;
pub mod io;
mod phantoms;
mod recovery;

pub use coeffs::{
    integral_identity, integral_identity_with_jets, polynomial_jets, sample_polynomial, CoefficientSet,
    IdentityReport,
};
pub use gauge::{cutoff_gauge, gauge_coefficients, gauge_experiment, GaugeReport};
pub use hypotheses::{divergence_residual, hypothesis_check, Hypothesis, HypothesisResult};
pub use phantoms::{ball_bump, ball_profile, random_trace_free_tensor, trace_free_bump};
pub use recovery::{moment_recovery_demo, Planted, RecoveryConfig, RecoveryReport, SliceTensors};

//! Two-point-measurement work statistics for driven protocols.

mod evolution;
mod sampling;
mod transition;

pub use evolution::{
    exact_evolution, ramp_evolution, schedule_commutator_norm, trotter_evolution, Ramp, COMMUTATOR_TOLERANCE,
};
pub use sampling::{sample_tpm, EstimatorSummary, TpmSamples, TrajectorySample, SAMPLES_PER_STREAM};
pub use transition::{
    jarzynski_average, ln_tasaki_average, relative_entropy_via_work, tasaki_average, transition_matrix,
    work_distribution, TransitionMatrix, WorkDistribution, WorkOutcome,
};

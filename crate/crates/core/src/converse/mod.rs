//! Capacity bounds and strong-converse machinery for the thermal and
//! additive-noise channels.

pub mod bounds;
pub mod codebook;
pub mod concentration;
pub mod envelope;
pub mod qubit;

pub use bounds::{
    cap_lower_additive, cap_lower_thermal, cap_upper_gio, cap_upper_gio_additive, cap_upper_ks,
    cap_upper_ks_additive, log_grid, rank_bound_check, thermal_bound_grid, BoundRow, RankReport,
};
pub use codebook::{mean_constraint_demo, CodebookSpec, MeanConstraintReport};
pub use concentration::{concentration_experiment, ConcentrationReport};
pub use envelope::{
    envelope_thm1, envelope_thm2, first_below, ChannelParams, ConverseEnvelope, DeltaSchedule,
    Deltas,
};
pub use qubit::{qubit_converse_check, QubitReport};

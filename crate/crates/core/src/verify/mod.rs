//! Deciding whether a protocol reproduces the quantum statistics exactly.
//!
//! The four-bit protocol is checked analytically by integrating its
//! agreement probability over the hidden angle. The composed and table
//! protocols are checked statistically, with a hard rule that outcomes of
//! probability zero never occur.

pub mod integrate;
pub mod stats;

pub use integrate::{beta_separation_probability, integrate_slot, integrate_slot_midpoint};
pub use stats::{
    chi_square_gof, chi_square_sf, empirical_joint, gamma_p, gamma_q, run_seed, EmpiricalJoint,
    GofReport, SweepPolicy, SweepVerdict,
};

//! Oscillation decay and Hölder continuity from a parabolic Harnack inequality.
//!
//! Cylinders `D_R`, `D+_R` and `D-_R` around a space-time center, the
//! one-step oscillation inequality `omega+ <= zeta omega` with
//! `zeta = (C-1)/C`, the nested cylinders of the iteration (certified in
//! exact arithmetic) and the resulting Hölder bound, together with grid
//! estimates of the Harnack constant and of Hölder quotients.

mod cylinder;
mod holder;
mod region;

pub use cylinder::{
    nested_cylinders, parabolic_distance, AxisBox, Containment, CylinderKind, NestedCylinders,
    ParabolicCylinder, SpaceTimeBox,
};
pub use holder::{holder_bound, iteration_delta, HoelderParams, MIN_HARNACK_CONSTANT};
pub use region::{
    chain_oscillations, empirical_holder_quotient, estimate_harnack_constant, oscillation,
    oscillation_inequality_check, sup_norm, OscillationCheck,
};

#[cfg(test)]
mod tests;

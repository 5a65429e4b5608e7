//! Closed-form Harnack bounds.
//!
//! [`lower_bound`] and [`upper_bound`] evaluate the two-point inequalities
//! implied by a gradient estimate `f_t + a f >= C |grad f|^p / f^r` (or its
//! reverse). [`heat_bound`], [`pme_bound`] and [`pdiff_bound`] are the
//! specializations to the three model equations.

mod coefficient;
mod general;
mod params;
mod special;

pub(crate) use coefficient::power_integral;
pub use coefficient::{TabulatedCoefficient, TimeCoefficient, QUADRATURE_REL_TOL};
pub use general::{lower_bound, upper_bound, HarnackBound, Relation};
pub use params::{
    derive_quantities, weight_integral_i, BoundCase, DerivedQuantities, Direction, EstimateParams,
};
pub(crate) use special::heat_as_bound;
pub use special::{heat_bound, pdiff_bound, pme_bound, PdiffParams, PmeParams};

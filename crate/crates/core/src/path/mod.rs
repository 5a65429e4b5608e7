//! Weighted path energy `E(x) = (1/q) int |x'|^q w dt` with fixed endpoints.
//!
//! The minimum over all paths is `|x2 - x1|^q / (q (W(t2) - W(t1))^{q-1})`,
//! attained by `v(t) = D + B W(t)` where `W' = w^{1/(1-q)}`. This module
//! evaluates both and checks them against a discrete minimizer.

mod discrete;
mod minimize;
mod weight;

pub use discrete::{
    functional_e, gateaux, poincare_check, DiscretePath, PoincareReport, DEGENERATE_SPEED,
};
pub use minimize::{
    closed_form_min, numeric_minimize, optimal_path, w_uniform_knots, KnotSpacing,
    MinimizationResult, MinimizeOptions, OptimalPath,
};
pub use weight::WeightFunction;

#[cfg(test)]
mod tests;

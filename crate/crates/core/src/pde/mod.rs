//! Exact solutions and explicit finite-difference solvers.
//!
//! [`ExactSolution`] provides the heat kernel, Barenblatt profiles and the
//! Moser family with analytic derivatives. [`solve_heat`], [`solve_pme`] and
//! [`solve_pdiff`] step the model equations on `[-L, L]^d` in flux form with
//! forward Euler and return a [`GridSolution`].

mod exact;
mod grid;
mod solver;

pub use exact::{
    barenblatt_eval, barenblatt_exponents, barenblatt_support_radius, heat_kernel_eval,
    moser_log_ratio, moser_ratio, BarenblattValue, Derivatives, ExactSolution,
};
pub use grid::{Equation, GridSolution, StepRecord};
pub use solver::{
    solve_heat, solve_pdiff, solve_pme, BoundaryCondition, InitialData, SolverConfig,
};

#[cfg(test)]
mod tests;

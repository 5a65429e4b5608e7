//! Harnack inequalities for parabolic equations, checked numerically.
//!
//! The crate evaluates closed-form Harnack bounds ([`bounds`]), minimizes the
//! weighted path energy behind them ([`path`]), solves the heat, porous
//! medium and p-diffusion equations on grids ([`pde`]), verifies gradient
//! estimates and Harnack inequalities on solutions ([`verify`]) and runs the
//! Moser oscillation and Hölder machinery ([`moser`]).

pub mod bounds;
pub mod cli;
pub mod error;
pub mod moser;
pub mod path;
pub mod pde;
pub mod point;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use point::SpacetimePoint;

/// Shortest round-trip text of a float: plain decimal or exponent form.
pub(crate) fn compact(v: f64) -> String {
    let plain = v.to_string();
    let exp = format!("{v:e}");
    if exp.len() < plain.len() {
        exp
    } else {
        plain
    }
}

//! Weak form of the equation for f = u^gamma / gamma tested against
//! random bumps.

use harnack_lab::pde::{solve_heat, solve_pdiff, BoundaryCondition, SolverConfig};
use harnack_lab::verify::{scaled_weak_form_residual, BumpFunction};
use harnack_lab::Result;

fn main() -> Result<()> {
    for dx in [0.1, 0.05, 0.025] {
        let mut cfg = SolverConfig::heat_kernel(1, dx, 2.0);
        cfg.half_width = Some(6.0);
        let grid = solve_heat(&cfg)?;
        let bumps = BumpFunction::random_set(&grid, 20, 3);
        println!(
            "heat, dx = {dx:<6} scaled residual {:.3e}",
            scaled_weak_form_residual(&grid, 0.0, &bumps)?
        );
    }

    let mut cfg = SolverConfig::heat_kernel(1, 0.05, 2.0);
    cfg.half_width = Some(6.0);
    cfg.boundary = BoundaryCondition::Homogeneous;
    let grid = solve_pdiff(3.0, &cfg)?;
    let bumps = BumpFunction::random_set(&grid, 20, 3);
    println!(
        "p = 3 (gamma = 1/2): scaled residual {:.3e}",
        scaled_weak_form_residual(&grid, 0.5, &bumps)?
    );
    Ok(())
}

//! Porous medium solver on Barenblatt data: L1 error under grid refinement.

use harnack_lab::pde::{solve_pme, BoundaryCondition, ExactSolution, InitialData, SolverConfig};
use harnack_lab::Result;

fn main() -> Result<()> {
    let barenblatt = ExactSolution::Barenblatt {
        d: 1,
        m: 2.0,
        c0: 1.0,
    };
    let mut previous: Option<f64> = None;
    for dx in [0.1, 0.05, 0.025] {
        let mut cfg = SolverConfig::new(
            1,
            InitialData::Exact {
                solution: barenblatt.clone(),
            },
            dx,
            2.0,
        );
        cfg.half_width = Some(8.0);
        cfg.boundary = BoundaryCondition::Exact;
        let grid = solve_pme(2.0, &cfg)?;
        let err = grid
            .final_l1_error()
            .expect("Barenblatt solves the porous medium equation");
        let order = previous
            .map(|e| format!("{:.2}", (e / err).log2()))
            .unwrap_or_default();
        println!(
            "dx = {dx:<6} steps = {:<6} L1 error = {err:.3e}  order {order}",
            grid.steps().len()
        );
        previous = Some(err);
    }
    Ok(())
}

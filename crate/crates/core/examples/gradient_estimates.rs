//! Li–Yau, Aronson–Bénilan and Esteban–Vázquez estimates on exact and
//! computed solutions.

use harnack_lab::pde::{solve_pdiff, BoundaryCondition, ExactSolution, SolverConfig};
use harnack_lab::verify::{aronson_benilan_check, esteban_vazquez_check, li_yau_check, SamplePlan};
use harnack_lab::Result;

fn main() -> Result<()> {
    let plan = SamplePlan::analytic(1000, 0, 7, [-4.0, 4.0], [0.1, 10.0]);
    let ly = li_yau_check(&ExactSolution::heat_kernel(2), &plan)?;
    println!(
        "Li–Yau on the heat kernel: worst margin {:.2e}",
        ly.worst_margin
    );

    let barenblatt = ExactSolution::Barenblatt {
        d: 2,
        m: 3.0,
        c0: 1.0,
    };
    let ab = aronson_benilan_check(&barenblatt, 3.0, &plan)?;
    println!(
        "Aronson–Bénilan on Barenblatt: worst margin {:.2e} ({} samples outside the support)",
        ab.worst_margin, ab.excluded
    );

    let mut cfg = SolverConfig::heat_kernel(1, 0.05, 2.0);
    cfg.boundary = BoundaryCondition::Homogeneous;
    let grid = solve_pdiff(3.0, &cfg)?;
    let mut grid_plan = SamplePlan::grid(20_000, 0, 7);
    grid_plan.time_origin = 1.0;
    let ev = esteban_vazquez_check(&grid, 3.0, None, &grid_plan)?;
    println!(
        "Esteban–Vázquez on a p = 3 grid: {} samples, {} violations, tolerance {:.2e}",
        ev.samples, ev.violations, ev.tolerance
    );
    Ok(())
}

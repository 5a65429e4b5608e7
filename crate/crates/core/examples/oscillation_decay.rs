//! Harnack constant, one-step oscillation decay and the Hölder bound on a
//! heat-equation grid.

use harnack_lab::moser::{
    empirical_holder_quotient, estimate_harnack_constant, holder_bound, nested_cylinders,
    oscillation_inequality_check, sup_norm, AxisBox, HoelderParams, SpaceTimeBox,
    MIN_HARNACK_CONSTANT,
};
use harnack_lab::pde::{solve_heat, SolverConfig};
use harnack_lab::Result;

fn main() -> Result<()> {
    let mut cfg = SolverConfig::heat_kernel(1, 0.02, 2.0);
    cfg.save_every = 5;
    let grid = solve_heat(&cfg)?;

    let centers = [(-1.5, 1.4), (0.0, 1.5), (2.0, 1.6)];
    let mut c = MIN_HARNACK_CONSTANT;
    for &(x, t) in &centers {
        c = c.max(estimate_harnack_constant(&grid, &[x], t, 0.2)?);
    }
    let params = HoelderParams::new(c)?;
    println!(
        "C = {c:.4}, zeta = {:.4}, nu = {:.4}",
        params.zeta(),
        params.nu()
    );
    for &(x, t) in &centers {
        let check = oscillation_inequality_check(&grid, &[x], t, 0.2, c)?;
        println!(
            "  ({x}, {t}): omega+ = {:.3e}, zeta omega = {:.3e}, grid slack {:.1e}: {}",
            check.omega_plus,
            check.zeta * check.omega,
            check.tolerance,
            check.holds
        );
    }

    let boxes = SpaceTimeBox::new(
        AxisBox::new(vec![-4.0], vec![4.0], [1.1, 1.9])?,
        AxisBox::new(vec![-2.0], vec![2.0], [1.3, 1.7])?,
    )?;
    let d = boxes.parabolic_distance();
    let bound = holder_bound(c, d, sup_norm(&grid, &boxes.outer)?)?;
    let quotient = empirical_holder_quotient(&grid, &boxes.inner, params.nu(), 5000, 1)?;
    println!("d(Q, Q') = {d:.4}: Hölder quotient {quotient:.4} <= bound {bound:.2}");

    let chain = nested_cylinders(&[0.0], 1.7, 0.4, 4)?;
    println!(
        "chain radii {:?}, all containments certified: {}",
        chain.radii,
        chain.certificates.iter().all(|c| c.holds())
    );
    Ok(())
}

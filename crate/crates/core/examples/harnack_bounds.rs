//! Two-point Harnack bounds: the general estimate in each case and the
//! heat, porous medium and p-diffusion specializations.

use harnack_lab::bounds::{
    heat_bound, lower_bound, pdiff_bound, pme_bound, upper_bound, EstimateParams, PdiffParams,
    PmeParams, TimeCoefficient,
};
use harnack_lab::{Result, SpacetimePoint};

fn main() -> Result<()> {
    let p1 = SpacetimePoint::scalar(0.0, 1.0)?;
    let p2 = SpacetimePoint::scalar(1.0, 2.0)?;

    // (C, p, r) in the three regimes of m = r/(p-1) - 1
    for (c, p, r) in [(1.0, 2.0, 1.0), (0.5, 2.0, 1.5), (0.5, 3.0, 1.0)] {
        let params = EstimateParams::forward(c, p, r, TimeCoefficient::power_law(0.5)?)?;
        let b = lower_bound(&params, &p1, &p2, 1.0)?;
        println!(
            "C = {c}, p = {p}, r = {r}: {:?}, f2^{} >= {:.6} (root form valid: {})",
            b.case, b.power, b.value, b.parenthesis_nonneg
        );
    }
    let backward = EstimateParams::backward(1.0, 2.0, 1.0, TimeCoefficient::constant(0.0)?)?;
    println!(
        "backward upper bound: {:.6}",
        upper_bound(&backward, &p1, &p2, 1.0)?.value
    );

    println!("heat, d = 1:   u2 >= {:.6}", heat_bound(1, &p1, &p2, 1.0)?);
    let pme = PmeParams::new(2.0, 1)?;
    println!(
        "pme, M = 2:    u2 >= {:.6}",
        pme_bound(&pme, &p1, &p2, 1.0)?.value
    );
    let pdiff = PdiffParams::new(3.0, 1, None)?;
    println!(
        "pdiff, p = 3:  {:?}",
        pdiff_bound(&pdiff, &p1, &p2, 1.0)?.root
    );

    // below the critical exponent there is no bound at all
    match PmeParams::new(0.1, 3) {
        Err(e) => println!("M = 0.1, d = 3 rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

//! Harnack inequalities on random admissible pairs, and sharpness close to
//! the diagonal.

use harnack_lab::bounds::PmeParams;
use harnack_lab::pde::ExactSolution;
use harnack_lab::verify::{harnack_check, BoundProducer, SamplePlan};
use harnack_lab::Result;

fn main() -> Result<()> {
    let heat = ExactSolution::heat_kernel(1);
    let plan = SamplePlan::analytic(0, 10_000, 11, [-4.0, 4.0], [0.5, 4.0]);
    let r = harnack_check(&heat, &BoundProducer::Heat, &plan)?;
    println!("heat: {} pairs, {} violations", r.samples, r.violations);

    let mut near = SamplePlan::analytic(0, 2000, 11, [-0.5, 0.5], [1.0, 1.001]);
    near.max_pair_distance = Some(1e-3);
    near.max_pair_gap = Some(1e-3);
    let r = harnack_check(&heat, &BoundProducer::Heat, &near)?;
    if let Some(s) = r.sharpness {
        println!(
            "near-diagonal sharpness: min {:.5}, max {:.7}",
            s.min, s.max
        );
    }

    for (m, d) in [(2.0, 1), (3.0, 2)] {
        let barenblatt = ExactSolution::Barenblatt { d, m, c0: 1.0 };
        let producer = BoundProducer::Pme(PmeParams::new(m, d)?);
        let r = harnack_check(&barenblatt, &producer, &plan)?;
        println!(
            "pme M = {m}, d = {d}: {} pairs, {} violations, {} outside the support",
            r.samples, r.violations, r.excluded
        );
    }
    Ok(())
}

//! Weighted path energy: closed-form minimum, discrete minimizer and the
//! Poincaré-type inequality behind uniqueness.

use harnack_lab::bounds::TimeCoefficient;
use harnack_lab::path::{
    closed_form_min, numeric_minimize, optimal_path, poincare_check, DiscretePath, KnotSpacing,
    MinimizeOptions, WeightFunction,
};
use harnack_lab::Result;

fn main() -> Result<()> {
    let weights = [
        ("w = 1", WeightFunction::unit()),
        ("w = t^1.5", WeightFunction::PowerTime { sigma: 1.5 }),
        (
            "w = exp(-m mu ln t)",
            WeightFunction::ExpOfA {
                m: 0.5,
                a: TimeCoefficient::power_law(1.0)?,
            },
        ),
    ];
    let (x1, x2) = ([0.0, 0.0], [1.0, -2.0]);
    for (name, w) in &weights {
        let exact = closed_form_min(3.0, w, 1.0, 3.0, &x1, &x2)?;
        let options = MinimizeOptions {
            knots: 400,
            spacing: KnotSpacing::WUniform,
            ..MinimizeOptions::default()
        };
        let r = numeric_minimize(3.0, w, 1.0, 3.0, &x1, &x2, &options)?;
        println!(
            "{name:22} closed form {exact:.8}  numeric {:.8}  iterations {}",
            r.value, r.iterations
        );
    }

    let w = WeightFunction::PowerTime { sigma: 0.5 };
    let v = optimal_path(2.0, &w, 1.0, 2.0, &[0.0], &[1.0])?;
    println!("optimal path at t = 1.5: {:?}", v.eval(1.5)?);

    let knots = DiscretePath::uniform_knots(1.0, 2.0, 200);
    let bump = DiscretePath::from_fn(knots, |t| vec![((t - 1.0) * (2.0 - t)).sin()])?;
    let report = poincare_check(&bump, 2.0, &w)?;
    println!(
        "Poincaré: {:.3e} <= {:.3e} (holds: {})",
        report.lhs, report.rhs, report.holds
    );
    Ok(())
}

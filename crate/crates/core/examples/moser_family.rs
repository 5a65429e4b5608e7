//! The family showing that a Harnack inequality needs the waiting time:
//! the ratio of two values at the same time is unbounded over the family.

use harnack_lab::pde::{moser_log_ratio, ExactSolution};
use harnack_lab::Result;

fn main() -> Result<()> {
    for xi in [0.0, -10.0, -30.0, -60.0] {
        let u = ExactSolution::MoserFamily { xi };
        let (near, far) = (u.value(&[0.0], 1.0)?, u.value(&[1.0], 1.0)?);
        let direct = far / near;
        let closed = (-moser_log_ratio(xi, 1.0)).exp();
        if direct.is_finite() {
            println!("xi = {xi:>5}: u(1, 1) / u(0, 1) = {direct:.4e} (closed form {closed:.4e})");
        } else {
            // both values underflow; the log form does not
            println!(
                "xi = {xi:>5}: u(1, 1) / u(0, 1) = {closed:.4e} (direct evaluation underflows)"
            );
        }
    }
    Ok(())
}

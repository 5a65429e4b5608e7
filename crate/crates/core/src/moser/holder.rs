use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// No Harnack constant of the linear equation can be smaller than this.
pub const MIN_HARNACK_CONSTANT: f64 = 4.0 / 3.0;

/// Oscillation decay `zeta = (C-1)/C` and Hölder exponent `nu = log_4(C/(C-1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoelderParams {
    c: f64,
    zeta: f64,
    nu: f64,
}

impl HoelderParams {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 1.0 && c.is_finite()) {
            return Err(invalid(
                "C",
                format!(
                    "the Harnack constant must exceed 1, got {c} (zeta >= 1 stops the iteration)"
                ),
            ));
        }
        let ln_zeta = (-1.0 / c).ln_1p();
        Ok(Self {
            c,
            zeta: ln_zeta.exp(),
            nu: -ln_zeta / (2.0 * LN_2),
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// `delta = d(Q, Q') / 64`, the scale below which pairs are handled by the iteration.
pub fn iteration_delta(d_qqp: f64) -> f64 {
    d_qqp / 64.0
}

/// `2 (256 / d(Q, Q'))^nu sup_Q |u|`.
pub fn holder_bound(c: f64, d_qqp: f64, sup_norm: f64) -> Result<f64> {
    let params = HoelderParams::new(c)?;
    if !(d_qqp > 0.0 && d_qqp.is_finite()) {
        return Err(invalid(
            "d(Q, Q')",
            format!("must be positive, got {d_qqp}"),
        ));
    }
    if !(sup_norm >= 0.0 && sup_norm.is_finite()) {
        return Err(invalid(
            "sup norm",
            format!("must be nonnegative, got {sup_norm}"),
        ));
    }
    Ok(2.0 * (256.0 / d_qqp).powf(params.nu()) * sup_norm)
}

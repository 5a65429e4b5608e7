use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::Equation;
use crate::bounds::PmeParams;
use crate::error::{invalid, Error, Result};
use crate::point::norm_sq;

/// `u` and its analytic derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub u: f64,
    pub grad: Vec<f64>,
    pub ut: f64,
    pub lap: f64,
}

/// Barenblatt profile with its pressure `f = (M/(M-1)) u^{M-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarenblattValue {
    pub u: f64,
    pub grad: Vec<f64>,
    pub ut: f64,
    /// `Delta (u^M)`.
    pub lap_um: f64,
    pub pressure_f: f64,
    pub grad_f: Vec<f64>,
    pub lap_f: f64,
    /// Strictly inside the support ball.
    pub inside: bool,
}

/// Explicit solutions with closed-form derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactSolution {
    /// `mass (4 pi t)^{-d/2} exp(-|x + shift|^2 / 4t)`.
    HeatKernel {
        d: usize,
        shift: Vec<f64>,
        mass: f64,
    },
    /// Source-type solution of `u_t = Delta u^M`, `M > 1`.
    Barenblatt { d: usize, m: f64, c0: f64 },
    /// `t^{-1/2} exp(-(x + xi)^2 / 4t)` in one dimension.
    MoserFamily { xi: f64 },
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive, got t = {t}")))
    }
}

fn check_point(d: usize, x: &[f64]) -> Result<()> {
    if x.len() != d {
        return Err(Error::Shape(format!(
            "point of dimension {} for a {d}-d solution",
            x.len()
        )));
    }
    Ok(())
}

fn heat_scaled(d: usize, shift: &[f64], mass: f64, x: &[f64], t: f64) -> Result<Derivatives> {
    check_time(t)?;
    check_point(d, x)?;
    if shift.len() != d {
        return Err(Error::Shape(format!(
            "shift of dimension {} for d = {d}",
            shift.len()
        )));
    }
    let y: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a + b).collect();
    let r2 = norm_sq(&y);
    let df = d as f64;
    let u = mass * (-0.5 * df * (4.0 * PI * t).ln() - r2 / (4.0 * t)).exp();
    let grad = y.iter().map(|v| -u * v / (2.0 * t)).collect();
    // u_t = Delta u = u (|y|^2 / 4t^2 - d / 2t)
    let ut = u * (r2 / (4.0 * t * t) - df / (2.0 * t));
    Ok(Derivatives {
        u,
        grad,
        ut,
        lap: ut,
    })
}

/// Unit-mass heat kernel `(4 pi t)^{-d/2} e^{-|x+shift|^2/4t}` and its derivatives.
pub fn heat_kernel_eval(d: usize, shift: &[f64], x: &[f64], t: f64) -> Result<Derivatives> {
    heat_scaled(d, shift, 1.0, x, t)
}

/// `u(x, t) = t^{-alpha} (C0 - kappa |x|^2 t^{-2 alpha/d})_+^{1/(M-1)}`.
pub fn barenblatt_eval(d: usize, m: f64, c0: f64, x: &[f64], t: f64) -> Result<BarenblattValue> {
    if !(m > 1.0) {
        return Err(Error::Unsupported(format!(
            "Barenblatt profiles are implemented for M > 1 only, got M = {m}"
        )));
    }
    PmeParams::new(m, d)?;
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(invalid("C0", format!("must be positive, got {c0}")));
    }
    check_time(t)?;
    check_point(d, x)?;
    let (df, e) = (d as f64, 1.0 / (m - 1.0));
    let (alpha, kappa) = barenblatt_exponents(d, m);
    let beta = alpha / df;
    let r2 = norm_sq(x);
    let s = t.powf(-2.0 * beta);
    let g = c0 - kappa * r2 * s;
    let ta = t.powf(-alpha);
    let grad_g: Vec<f64> = x.iter().map(|v| -2.0 * kappa * v * s).collect();
    let lap_g = -2.0 * kappa * df * s;
    let gt = 2.0 * beta * kappa * r2 * s / t;
    let coef = m / (m - 1.0);
    let pressure_scale = coef * t.powf(-alpha * (m - 1.0));
    // the pressure is a paraboloid in x, so its Laplacian is defined everywhere
    let lap_f = pressure_scale * lap_g;
    if g <= 0.0 {
        return Ok(BarenblattValue {
            u: 0.0,
            grad: vec![0.0; d],
            ut: 0.0,
            lap_um: 0.0,
            pressure_f: 0.0,
            grad_f: vec![0.0; d],
            lap_f,
            inside: false,
        });
    }
    let u = ta * g.powf(e);
    let grad = grad_g
        .iter()
        .map(|v| ta * e * g.powf(e - 1.0) * v)
        .collect();
    let ut = -alpha * u / t + ta * e * g.powf(e - 1.0) * gt;
    // u^M = t^{-alpha M} g^{s}, s = M/(M-1)
    let sm = m * e;
    let grad_g2 = norm_sq(&grad_g);
    let lap_um = t.powf(-alpha * m)
        * (sm * g.powf(sm - 1.0) * lap_g + sm * (sm - 1.0) * g.powf(sm - 2.0) * grad_g2);
    Ok(BarenblattValue {
        u,
        grad,
        ut,
        lap_um,
        pressure_f: pressure_scale * g,
        grad_f: grad_g.iter().map(|v| pressure_scale * v).collect(),
        lap_f,
        inside: true,
    })
}

/// `(alpha, kappa)` with `alpha = d/(d(M-1)+2)` and `kappa = alpha (M-1)/(2 d M)`.
pub fn barenblatt_exponents(d: usize, m: f64) -> (f64, f64) {
    let df = d as f64;
    let alpha = df / (df * (m - 1.0) + 2.0);
    (alpha, alpha * (m - 1.0) / (2.0 * df * m))
}

/// Radius of the Barenblatt support at time `t`.
pub fn barenblatt_support_radius(d: usize, m: f64, c0: f64, t: f64) -> f64 {
    let (alpha, kappa) = barenblatt_exponents(d, m);
    (c0 / kappa).sqrt() * t.powf(alpha / d as f64)
}

/// `ln(u_xi(0,1) / u_xi(x0,1)) = ((x0 + xi)^2 - xi^2) / 4 = x0^2/4 + x0 xi / 2`.
pub fn moser_log_ratio(xi: f64, x0: f64) -> f64 {
    x0 * x0 / 4.0 + x0 * xi / 2.0
}

/// `u_xi(0,1) / u_xi(x0,1) = e^{x0^2/4} e^{x0 xi/2}`, which tends to 0 as `xi -> -inf`.
pub fn moser_ratio(xi: f64, x0: f64) -> f64 {
    moser_log_ratio(xi, x0).exp()
}

impl ExactSolution {
    pub fn heat_kernel(d: usize) -> Self {
        Self::HeatKernel {
            d,
            shift: vec![0.0; d],
            mass: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::HeatKernel { d, .. } | Self::Barenblatt { d, .. } => *d,
            Self::MoserFamily { .. } => 1,
        }
    }

    /// Checks the parameters once so later evaluations only fail on `(x, t)`.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::HeatKernel { d, shift, mass } => {
                if *d == 0 {
                    return Err(invalid("d", "dimension must be at least 1"));
                }
                if shift.len() != *d || shift.iter().any(|v| !v.is_finite()) {
                    return Err(invalid("shift", format!("needs {d} finite coordinates")));
                }
                if !(*mass > 0.0 && mass.is_finite()) {
                    return Err(invalid("mass", format!("must be positive, got {mass}")));
                }
                Ok(())
            }
            Self::Barenblatt { d, m, c0 } => {
                barenblatt_eval(*d, *m, *c0, &vec![0.0; *d], 1.0).map(|_| ())
            }
            Self::MoserFamily { xi } => {
                if xi.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("xi", "must be finite"))
                }
            }
        }
    }

    /// `u`, `grad u`, `u_t` and `Delta u`.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<Derivatives> {
        match self {
            Self::HeatKernel { d, shift, mass } => heat_scaled(*d, shift, *mass, x, t),
            Self::MoserFamily { xi } => heat_scaled(1, &[*xi], (4.0 * PI).sqrt(), x, t),
            Self::Barenblatt { d, m, c0 } => {
                let b = barenblatt_eval(*d, *m, *c0, x, t)?;
                let lap = if b.inside {
                    let (alpha, kappa) = barenblatt_exponents(*d, *m);
                    let e = 1.0 / (m - 1.0);
                    let s = t.powf(-2.0 * alpha / *d as f64);
                    let r2 = norm_sq(x);
                    let g = c0 - kappa * r2 * s;
                    let grad_g2 = 4.0 * kappa * kappa * r2 * s * s;
                    let lap_g = -2.0 * kappa * *d as f64 * s;
                    t.powf(-alpha)
                        * (e * g.powf(e - 1.0) * lap_g + e * (e - 1.0) * g.powf(e - 2.0) * grad_g2)
                } else {
                    0.0
                };
                Ok(Derivatives {
                    u: b.u,
                    grad: b.grad,
                    ut: b.ut,
                    lap,
                })
            }
        }
    }

    /// `u(x, t)` only.
    pub fn value(&self, x: &[f64], t: f64) -> Result<f64> {
        self.eval(x, t).map(|v| v.u)
    }

    /// `u_t - Delta u` or `u_t - Delta u^M`, evaluated analytically.
    pub fn pde_residual(&self, x: &[f64], t: f64) -> Result<f64> {
        match self {
            Self::Barenblatt { d, m, c0 } => {
                let b = barenblatt_eval(*d, *m, *c0, x, t)?;
                Ok(b.ut - b.lap_um)
            }
            _ => {
                let v = self.eval(x, t)?;
                Ok(v.ut - v.lap)
            }
        }
    }

    /// Whether this family solves the given equation exactly.
    pub fn solves(&self, equation: &Equation) -> bool {
        match (self, equation) {
            (Self::HeatKernel { .. } | Self::MoserFamily { .. }, Equation::Heat) => true,
            (Self::HeatKernel { .. } | Self::MoserFamily { .. }, Equation::Pme { m }) => *m == 1.0,
            (Self::HeatKernel { .. } | Self::MoserFamily { .. }, Equation::Pdiff { p, .. }) => {
                *p == 2.0
            }
            (Self::Barenblatt { m, .. }, Equation::Pme { m: em }) => m == em,
            _ => false,
        }
    }
}

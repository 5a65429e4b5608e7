//! Harnack inequalities for the heat, porous medium and p-diffusion equations.

use serde::{Deserialize, Serialize};

use super::coefficient::power_integral;
use super::general::{HarnackBound, Relation};
use super::params::BoundCase;
use crate::error::{ensure_finite, invalid, Error, Result};
use crate::point::{ordered_pair, SpacetimePoint};

fn positive_value(u1: f64) -> Result<()> {
    if u1 > 0.0 && u1.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "u(x1, t1) must be positive, got {u1}"
        )))
    }
}

fn log_heat_bound(d: usize, p1: &SpacetimePoint, p2: &SpacetimePoint, u1: f64) -> Result<f64> {
    ordered_pair(p1, p2)?;
    positive_value(u1)?;
    let (t1, t2) = (p1.t(), p2.t());
    let dist = p1.distance(p2);
    Ok(u1.ln() + 0.5 * d as f64 * (t1 / t2).ln() - dist * dist / (4.0 * (t2 - t1)))
}

/// `u1 (t1/t2)^{d/2} exp(-|x2 - x1|^2 / (4 (t2 - t1)))`.
pub fn heat_bound(d: usize, p1: &SpacetimePoint, p2: &SpacetimePoint, u1: f64) -> Result<f64> {
    if d == 0 || d != p1.dim() {
        return Err(Error::Shape(format!(
            "dimension {d} does not match points of dimension {}",
            p1.dim()
        )));
    }
    log_heat_bound(d, p1, p2, u1).map(f64::exp)
}

pub(crate) fn heat_as_bound(
    d: usize,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
    u1: f64,
) -> Result<HarnackBound> {
    let value = heat_bound(d, p1, p2, u1)?;
    Ok(HarnackBound {
        value,
        case: BoundCase::CaseI,
        power: 1.0,
        relation: Relation::AtLeast,
        parenthesis_nonneg: true,
        root: Some(value),
        root_relation: Relation::AtLeast,
    })
}

/// Porous medium exponent `M` in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmeParams {
    m: f64,
    d: usize,
}

impl PmeParams {
    pub fn new(m: f64, d: usize) -> Result<Self> {
        ensure_finite("M", m)?;
        if d == 0 {
            return Err(invalid("d", "dimension must be at least 1"));
        }
        let m0 = Self::critical_exponent(d);
        if m <= m0 {
            return Err(Error::BelowCriticalExponent { m, d, m0 });
        }
        Ok(Self { m, d })
    }

    /// `M0(d) = max(0, 1 - 2/d)`.
    pub fn critical_exponent(d: usize) -> f64 {
        (1.0 - 2.0 / d as f64).max(0.0)
    }

    pub fn exponent(&self) -> f64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `k = 1 / (M - 1 + 2/d)`.
    pub fn k(&self) -> f64 {
        1.0 / (self.m - 1.0 + 2.0 / self.d as f64)
    }

    /// `mu = (M - 1) k`.
    pub fn mu(&self) -> f64 {
        (self.m - 1.0) * self.k()
    }

    /// `delta = 1 - mu`.
    pub fn delta(&self) -> f64 {
        1.0 - self.mu()
    }
}

/// Porous medium Harnack inequality.
///
/// `M > 1` bounds `u2^{M-1}` from below; `M = 1` is the heat bound;
/// `M0 < M < 1` bounds `u2^{1-M}` from below through a reciprocal, and is
/// flagged (value `+inf`, no root) if the bracket is not positive.
pub fn pme_bound(
    params: &PmeParams,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
    u1: f64,
) -> Result<HarnackBound> {
    let big_m = params.m;
    if big_m == 1.0 {
        return heat_as_bound(params.d, p1, p2, u1);
    }
    if p1.dim() != params.d {
        return Err(Error::Shape(format!(
            "dimension {} does not match points of dimension {}",
            params.d,
            p1.dim()
        )));
    }
    ordered_pair(p1, p2)?;
    positive_value(u1)?;
    let (t1, t2) = (p1.t(), p2.t());
    let (mu, delta, k) = (params.mu(), params.delta(), params.k());
    let dist = p1.distance(p2);
    let mm1 = big_m - 1.0;
    // bracket = u1^{M-1} (1 - rho)
    let rho = (mm1 / big_m) * delta * dist * dist / (4.0 * (t2.powf(delta) - t1.powf(delta)))
        * t1.powf(-mu)
        * u1.powf(-mm1);
    let log_u1 = u1.ln();
    let log_ratio = (t1 / t2).ln();
    if mm1 > 0.0 {
        let nonneg = rho <= 1.0;
        let log_scale = mu * log_ratio + mm1 * log_u1;
        let value = if nonneg {
            (log_scale + (-rho).ln_1p()).exp()
        } else {
            -(log_scale + (rho - 1.0).ln()).exp()
        };
        // root: (t1/t2)^k u1 (1 - rho)^{1/(M-1)}, using mu/(M-1) = k
        let root = nonneg.then(|| (k * log_ratio + log_u1 + (-rho).ln_1p() / mm1).exp());
        Ok(HarnackBound {
            value,
            case: BoundCase::CaseIII,
            power: mm1,
            relation: Relation::AtLeast,
            parenthesis_nonneg: nonneg,
            root,
            root_relation: Relation::AtLeast,
        })
    } else {
        // rho < 0 here, so the bracket is positive unless it underflows.
        let positive = rho < 1.0;
        let (value, root) = if positive {
            let log_bracket = mm1 * log_u1 + (-rho).ln_1p();
            let log_value = -mu * log_ratio - log_bracket;
            (log_value.exp(), Some((log_value / -mm1).exp()))
        } else {
            (f64::INFINITY, None)
        };
        Ok(HarnackBound {
            value,
            case: BoundCase::CaseIII,
            power: -mm1,
            relation: Relation::AtLeast,
            parenthesis_nonneg: positive,
            root,
            root_relation: Relation::AtLeast,
        })
    }
}

/// Exponent `p` of the p-diffusion equation in dimension `d`, with the
/// Aronson–Bénilan-type constant `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdiffParams {
    p: f64,
    d: usize,
    k: f64,
}

impl PdiffParams {
    /// `k = None` selects [`PdiffParams::default_k`].
    pub fn new(p: f64, d: usize, k: Option<f64>) -> Result<Self> {
        ensure_finite("p", p)?;
        if d == 0 {
            return Err(invalid("d", "dimension must be at least 1"));
        }
        let threshold = Self::subcritical_threshold(d);
        if p <= threshold {
            return Err(Error::SubcriticalExponent { p, d, threshold });
        }
        let k = match k {
            Some(k) => ensure_finite("K", k)?,
            None => Self::default_k(p, d),
        };
        if k <= 0.0 {
            return Err(invalid("K", format!("must be positive, got {k}")));
        }
        Ok(Self { p, d, k })
    }

    /// `2d / (d + 1)`.
    pub fn subcritical_threshold(d: usize) -> f64 {
        2.0 * d as f64 / (d as f64 + 1.0)
    }

    /// `K = d / (d (p - 2) + p)`, equal to `d/2` at `p = 2`.
    pub fn default_k(p: f64, d: usize) -> f64 {
        let d = d as f64;
        d / (d * (p - 2.0) + p)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `gamma = (p - 2) / (p - 1)`.
    pub fn gamma(&self) -> f64 {
        (self.p - 2.0) / (self.p - 1.0)
    }

    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `xi = (1/q) (1/p)^{q-1}`.
    pub fn xi(&self) -> f64 {
        let q = self.q();
        (1.0 / q) * (1.0 / self.p).powf(q - 1.0)
    }

    /// `delta = (2 - p) K + 1`, snapped to zero within `1e-12`.
    pub fn delta(&self) -> f64 {
        let delta = (2.0 - self.p) * self.k + 1.0;
        if delta.abs() <= 1e-12 {
            0.0
        } else {
            delta
        }
    }

    /// `(t2^delta - t1^delta)/delta`, or `ln t2 - ln t1` when `delta = 0`.
    pub fn weight_integral(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(t1 > 0.0 && t1 < t2) {
            return Err(Error::TimeOrdering { t1, t2 });
        }
        Ok(power_integral(self.delta() - 1.0, t1, t2))
    }
}

/// p-diffusion Harnack inequality.
///
/// `p > 2` bounds `u2^gamma` from below; `p = 2` is the heat bound;
/// `2d/(d+1) < p < 2` bounds `u2^{-gamma}` from below through a reciprocal.
pub fn pdiff_bound(
    params: &PdiffParams,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
    u1: f64,
) -> Result<HarnackBound> {
    if params.p == 2.0 {
        return heat_as_bound(params.d, p1, p2, u1);
    }
    if p1.dim() != params.d {
        return Err(Error::Shape(format!(
            "dimension {} does not match points of dimension {}",
            params.d,
            p1.dim()
        )));
    }
    ordered_pair(p1, p2)?;
    positive_value(u1)?;
    let (t1, t2) = (p1.t(), p2.t());
    let gamma = params.gamma();
    let k = params.k;
    let q = params.q();
    let dist = p1.distance(p2);
    let big_d = if dist == 0.0 {
        0.0
    } else {
        (q * dist.ln() + (1.0 - q) * params.weight_integral(t1, t2)?.ln()).exp()
    };
    let log_u1 = u1.ln();
    let log_ratio = (t1 / t2).ln();
    // bracket = u1^gamma (1 - rho)
    let rho = gamma * params.xi() * big_d * (-gamma * k * t1.ln() - gamma * log_u1).exp();
    if gamma > 0.0 {
        let nonneg = rho <= 1.0;
        let log_scale = gamma * k * log_ratio + gamma * log_u1;
        let value = if nonneg {
            (log_scale + (-rho).ln_1p()).exp()
        } else {
            -(log_scale + (rho - 1.0).ln()).exp()
        };
        let root = nonneg.then(|| (k * log_ratio + log_u1 + (-rho).ln_1p() / gamma).exp());
        Ok(HarnackBound {
            value,
            case: BoundCase::CaseIII,
            power: gamma,
            relation: Relation::AtLeast,
            parenthesis_nonneg: nonneg,
            root,
            root_relation: Relation::AtLeast,
        })
    } else {
        let positive = rho < 1.0;
        let (value, root) = if positive {
            let log_bracket = gamma * log_u1 + (-rho).ln_1p();
            let log_value = -gamma * k * log_ratio - log_bracket;
            (log_value.exp(), Some((log_value / -gamma).exp()))
        } else {
            (f64::INFINITY, None)
        };
        Ok(HarnackBound {
            value,
            case: BoundCase::CaseIII,
            power: -gamma,
            relation: Relation::AtLeast,
            parenthesis_nonneg: positive,
            root,
            root_relation: Relation::AtLeast,
        })
    }
}

use serde::{Deserialize, Serialize};

use super::coefficient::TimeCoefficient;
use crate::error::{ensure_finite, invalid, Error, Result};

/// Which gradient estimate the parameters describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `f_t + a f >= C |grad f|^p / f^r`: yields lower bounds.
    Forward,
    /// `f_t + a f <= -C |grad f|^p / f^r`: yields upper bounds.
    Backward,
}

/// The three regimes of the two-point inequality, plus the `r = 0`
/// extension that allows a vanishing left-hand value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCase {
    CaseI,
    CaseII,
    CaseIII,
    NonnegR0,
}

impl BoundCase {
    /// Dispatches on the sign of `m = r/(p-1) - 1`.
    ///
    /// `r` and `p - 1` are compared with a relative tolerance of `1e-12`, so
    /// that parameters like `p = 2.7, r = 1.7` land in case (i) despite rounding.
    pub fn classify(p: f64, r: f64) -> Self {
        let pm1 = p - 1.0;
        if (r - pm1).abs() <= 1e-12 * pm1.abs().max(r.abs()) {
            Self::CaseI
        } else if r > pm1 {
            Self::CaseII
        } else {
            Self::CaseIII
        }
    }
}

/// Derived constants of a gradient estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub q: f64,
    pub m: f64,
    pub xi: f64,
}

/// Constants `(C, p, r)`, time coefficient `a(t)` and direction of a
/// gradient estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateParams {
    c: f64,
    p: f64,
    r: f64,
    a: TimeCoefficient,
    direction: Direction,
}

impl EstimateParams {
    pub fn new(c: f64, p: f64, r: f64, a: TimeCoefficient, direction: Direction) -> Result<Self> {
        ensure_finite("C", c)?;
        if c <= 0.0 {
            return Err(Error::NonPositiveConstant { c });
        }
        ensure_finite("p", p)?;
        if p <= 1.0 {
            return Err(invalid("p", format!("must exceed 1, got {p}")));
        }
        ensure_finite("r", r)?;
        Ok(Self {
            c,
            p,
            r,
            a,
            direction,
        })
    }

    pub fn forward(c: f64, p: f64, r: f64, a: TimeCoefficient) -> Result<Self> {
        Self::new(c, p, r, a, Direction::Forward)
    }

    pub fn backward(c: f64, p: f64, r: f64, a: TimeCoefficient) -> Result<Self> {
        Self::new(c, p, r, a, Direction::Backward)
    }

    /// The Li–Yau estimate for the heat equation in dimension `d`:
    /// `C = 1, p = 2, r = 1, a = d/(2t)`.
    pub fn heat(d: usize) -> Result<Self> {
        Self::forward(1.0, 2.0, 1.0, TimeCoefficient::power_law(d as f64 / 2.0)?)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn coefficient(&self) -> &TimeCoefficient {
        &self.a
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `m = r/(p-1) - 1`, snapped to zero in case (i).
    pub fn m(&self) -> f64 {
        match self.case() {
            BoundCase::CaseI => 0.0,
            _ => self.r / (self.p - 1.0) - 1.0,
        }
    }

    pub fn xi(&self) -> f64 {
        let q = self.q();
        (1.0 / q) * (1.0 / (self.p * self.c)).powf(q - 1.0)
    }

    pub fn case(&self) -> BoundCase {
        BoundCase::classify(self.p, self.r)
    }

    pub fn derived(&self) -> DerivedQuantities {
        DerivedQuantities {
            q: self.q(),
            m: self.m(),
            xi: self.xi(),
        }
    }

    /// `I = int_{t1}^{t2} exp(m (p-1) A(t)) dt`.
    pub fn weight_integral(&self, t1: f64, t2: f64) -> Result<f64> {
        self.a.exp_integral(self.m() * (self.p - 1.0), t1, t2)
    }
}

/// `(q, m, xi)` of a gradient estimate.
pub fn derive_quantities(params: &EstimateParams) -> DerivedQuantities {
    params.derived()
}

/// `I = int_{t1}^{t2} exp(m (p-1) A(t)) dt`.
pub fn weight_integral_i(params: &EstimateParams, t1: f64, t2: f64) -> Result<f64> {
    params.weight_integral(t1, t2)
}

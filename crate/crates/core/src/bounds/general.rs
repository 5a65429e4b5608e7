//! Generic two-point bounds from a gradient estimate.
//!
//! Every exponential factor is combined in log space and only the final
//! quantity is exponentiated, so `e^{A(t)}` never overflows on its own. The
//! power-form values of case (iii), and of the backward case (ii), can be
//! negative; they are evaluated as `-exp(log|.|)`.

use serde::{Deserialize, Serialize};

use super::params::{BoundCase, Direction, EstimateParams};
use crate::error::{Error, Result};
use crate::point::{ordered_pair, SpacetimePoint};

/// Which side of the inequality the bound sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `u2^power >= value`.
    AtLeast,
    /// `u2^power <= value`.
    AtMost,
}

/// A bound on `f(x2, t2)^power`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnackBound {
    pub value: f64,
    pub case: BoundCase,
    pub power: f64,
    pub relation: Relation,
    /// Validity condition of the root form. When false, `root` is `None`.
    pub parenthesis_nonneg: bool,
    /// The bound on `f(x2, t2)` itself, when the root form is valid.
    pub root: Option<f64>,
    /// Side of the root-form inequality: below for forward estimates, above
    /// for backward ones.
    pub root_relation: Relation,
}

impl HarnackBound {
    fn plain(value: f64, case: BoundCase, relation: Relation) -> Self {
        Self {
            value,
            case,
            power: 1.0,
            relation,
            parenthesis_nonneg: true,
            root: Some(value),
            root_relation: relation,
        }
    }

    /// Signed slack of the inequality at the observed value `u2`: nonnegative
    /// exactly when the bound holds.
    pub fn margin(&self, u2: f64) -> f64 {
        let lhs = if self.power == 1.0 {
            u2
        } else {
            u2.powf(self.power)
        };
        match self.relation {
            Relation::AtLeast => lhs - self.value,
            Relation::AtMost => self.value - lhs,
        }
    }

    /// Observed-to-bound ratio on the power scale (`1` means sharp).
    pub fn sharpness(&self, u2: f64) -> f64 {
        let lhs = if self.power == 1.0 {
            u2
        } else {
            u2.powf(self.power)
        };
        self.value / lhs
    }

    pub fn holds(&self, u2: f64, tol: f64) -> bool {
        self.margin(u2) >= -tol
    }
}

struct Prepared {
    case: BoundCase,
    m: f64,
    xi: f64,
    a1: f64,
    a2: f64,
    /// `|x2 - x1|^q I^{1-q}`.
    d: f64,
    /// `ln d`, `-inf` when the points coincide in space.
    log_d: f64,
}

fn prepare(
    params: &EstimateParams,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
    f1: f64,
) -> Result<Prepared> {
    ordered_pair(p1, p2)?;
    if !f1.is_finite() || f1 < 0.0 {
        return Err(Error::Domain(format!(
            "f(x1, t1) must be a finite value >= 0, got {f1}"
        )));
    }
    let mut case = params.case();
    if f1 == 0.0 {
        if params.r() != 0.0 {
            return Err(Error::Domain(
                "f(x1, t1) = 0 is only admissible when r = 0".into(),
            ));
        }
        case = BoundCase::NonnegR0;
    }
    let a = params.coefficient();
    let (t1, t2) = (p1.t(), p2.t());
    let a1 = a.antiderivative(t1)?;
    let a2 = a.antiderivative(t2)?;
    let q = params.q();
    let dist = p1.distance(p2);
    let (d, log_d) = if dist == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        let i = params.weight_integral(t1, t2)?;
        (
            dist.powf(q) * i.powf(1.0 - q),
            q * dist.ln() + (1.0 - q) * i.ln(),
        )
    };
    Ok(Prepared {
        case,
        m: params.m(),
        xi: params.xi(),
        a1,
        a2,
        d,
        log_d,
    })
}

/// Lower bound on `f(x2, t2)` (or a power of it) from the forward estimate.
pub fn lower_bound(
    params: &EstimateParams,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
    f1: f64,
) -> Result<HarnackBound> {
    if params.direction() != Direction::Forward {
        return Err(Error::Direction(
            "lower bounds need a forward estimate".into(),
        ));
    }
    let s = prepare(params, p1, p2, f1)?;
    let shift = s.a1 - s.a2;
    let bound = match s.case {
        BoundCase::CaseI => {
            let log = f1.ln() + shift - s.xi * s.d;
            HarnackBound::plain(log.exp(), s.case, Relation::AtLeast)
        }
        BoundCase::CaseII => {
            let m = s.m;
            let rho = ((m * s.xi).ln() + s.log_d + m * (f1.ln() + s.a1)).exp();
            let log = f1.ln() + shift - rho.ln_1p() / m;
            HarnackBound::plain(log.exp(), s.case, Relation::AtLeast)
        }
        BoundCase::CaseIII => {
            let am = -s.m;
            // rho = |m| xi D / (f1^{|m|} e^{|m| A1})
            let rho = ((am * s.xi).ln() + s.log_d - am * (f1.ln() + s.a1)).exp();
            let nonneg = rho <= 1.0;
            let log_scale = am * (f1.ln() + shift);
            let value = if nonneg {
                (log_scale + (-rho).ln_1p()).exp()
            } else {
                -(log_scale + (rho - 1.0).ln()).exp()
            };
            let root = nonneg.then(|| (f1.ln() + shift + (-rho).ln_1p() / am).exp());
            HarnackBound {
                value,
                case: s.case,
                power: am,
                relation: Relation::AtLeast,
                parenthesis_nonneg: nonneg,
                root,
                root_relation: Relation::AtLeast,
            }
        }
        BoundCase::NonnegR0 => {
            // f1 = 0: only the (negative) distance term survives.
            let am = -s.m;
            let value = -((am * s.xi).ln() + s.log_d + am * shift - am * s.a1).exp();
            HarnackBound {
                value,
                case: s.case,
                power: am,
                relation: Relation::AtLeast,
                parenthesis_nonneg: value >= 0.0,
                root: (value >= 0.0).then_some(0.0),
                root_relation: Relation::AtLeast,
            }
        }
    };
    Ok(bound)
}

/// Upper bound on `f(x2, t2)` (or a power of it) from the backward estimate.
///
/// In case (ii) the power form is `f2^{-m} >= e^{m(A2-A1)} (f1^{-m} - m xi D e^{m A1})`,
/// the form obtained by integrating the estimate along the optimal path; the
/// root form follows when the bracket is nonnegative.
pub fn upper_bound(
    params: &EstimateParams,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
    f1: f64,
) -> Result<HarnackBound> {
    if params.direction() != Direction::Backward {
        return Err(Error::Direction(
            "upper bounds need a backward estimate".into(),
        ));
    }
    let s = prepare(params, p1, p2, f1)?;
    let shift = s.a1 - s.a2;
    let bound = match s.case {
        BoundCase::CaseI => {
            let log = f1.ln() + shift + s.xi * s.d;
            HarnackBound::plain(log.exp(), s.case, Relation::AtMost)
        }
        BoundCase::CaseII => {
            let m = s.m;
            // rho = m xi D f1^m e^{m A1}; bracket = f1^{-m} (1 - rho)
            let rho = ((m * s.xi).ln() + s.log_d + m * (f1.ln() + s.a1)).exp();
            let nonneg = rho <= 1.0;
            let log_scale = -m * (f1.ln() + shift);
            let value = if nonneg {
                (log_scale + (-rho).ln_1p()).exp()
            } else {
                -(log_scale + (rho - 1.0).ln()).exp()
            };
            let root = nonneg.then(|| (f1.ln() + shift - (-rho).ln_1p() / m).exp());
            HarnackBound {
                value,
                case: s.case,
                power: -m,
                relation: Relation::AtLeast,
                parenthesis_nonneg: nonneg,
                root,
                root_relation: Relation::AtMost,
            }
        }
        BoundCase::CaseIII => {
            let am = -s.m;
            let rho = ((am * s.xi).ln() + s.log_d - am * (f1.ln() + s.a1)).exp();
            let value = (f1.ln() + shift + rho.ln_1p() / am).exp();
            HarnackBound::plain(value, s.case, Relation::AtMost)
        }
        BoundCase::NonnegR0 => {
            let am = -s.m;
            let value = ((am * s.xi).ln() + s.log_d + am * shift - am * s.a1).exp();
            HarnackBound {
                value,
                case: s.case,
                power: am,
                relation: Relation::AtMost,
                parenthesis_nonneg: true,
                root: Some(value.powf(1.0 / am)),
                root_relation: Relation::AtMost,
            }
        }
    };
    Ok(bound)
}

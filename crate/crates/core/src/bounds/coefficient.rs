use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature;

/// Relative tolerance for the quadrature fallback of tabulated coefficients.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// The time coefficient `a(t)` of a gradient estimate, together with its
/// antiderivative `A(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeCoefficient {
    /// `a(t) = mu / t`, `A(t) = mu ln t`.
    PowerLaw { mu: f64 },
    /// `a(t) = c`, `A(t) = c t`.
    Constant { c: f64 },
    /// Piecewise-linear `a` through the samples; `A` is its exact
    /// (cumulative trapezoid) antiderivative.
    Tabulated { samples: TabulatedCoefficient },
}

impl TimeCoefficient {
    pub fn power_law(mu: f64) -> Result<Self> {
        crate::error::ensure_finite("mu", mu)?;
        Ok(Self::PowerLaw { mu })
    }

    pub fn constant(c: f64) -> Result<Self> {
        crate::error::ensure_finite("c", c)?;
        Ok(Self::Constant { c })
    }

    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        TabulatedCoefficient::new(samples).map(|samples| Self::Tabulated { samples })
    }

    /// `a(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        positive_time(t)?;
        match self {
            Self::PowerLaw { mu } => Ok(mu / t),
            Self::Constant { c } => Ok(*c),
            Self::Tabulated { samples: tab } => tab.eval(t),
        }
    }

    /// `A(t)`, an antiderivative of `a`.
    pub fn antiderivative(&self, t: f64) -> Result<f64> {
        positive_time(t)?;
        match self {
            Self::PowerLaw { mu } => Ok(if *mu == 0.0 { 0.0 } else { mu * t.ln() }),
            Self::Constant { c } => Ok(c * t),
            Self::Tabulated { samples: tab } => tab.antiderivative(t),
        }
    }

    /// `int_{t1}^{t2} exp(kappa A(t)) dt`.
    ///
    /// Closed form for power-law and constant coefficients, adaptive
    /// quadrature (relative tolerance [`QUADRATURE_REL_TOL`]) otherwise.
    pub fn exp_integral(&self, kappa: f64, t1: f64, t2: f64) -> Result<f64> {
        positive_time(t1)?;
        if !(t1 < t2) {
            return Err(Error::TimeOrdering { t1, t2 });
        }
        if kappa == 0.0 {
            return Ok(t2 - t1);
        }
        match self {
            Self::PowerLaw { mu } => Ok(power_integral(kappa * mu, t1, t2)),
            Self::Constant { c } => {
                let rate = kappa * c;
                if rate == 0.0 {
                    Ok(t2 - t1)
                } else {
                    // e^{rate t1} (e^{rate (t2 - t1)} - 1) / rate
                    Ok((rate * t1).exp() * (rate * (t2 - t1)).exp_m1() / rate)
                }
            }
            Self::Tabulated { samples: tab } => tab.exp_integral(kappa, t1, t2),
        }
    }
}

/// `int_{t1}^{t2} t^eta dt` for `0 < t1 < t2`, continuous through `eta = -1`.
pub(crate) fn power_integral(eta: f64, t1: f64, t2: f64) -> f64 {
    let e = eta + 1.0;
    let log_ratio = ((t2 - t1) / t1).ln_1p();
    if e == 0.0 {
        log_ratio
    } else {
        t1.powf(e) * (e * log_ratio).exp_m1() / e
    }
}

fn positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", format!("time must be positive, got {t}")))
    }
}

/// Samples `(t_i, a_i)` with strictly increasing positive times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct TabulatedCoefficient {
    times: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl TryFrom<Vec<(f64, f64)>> for TabulatedCoefficient {
    type Error = Error;

    fn try_from(samples: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(&samples)
    }
}

impl From<TabulatedCoefficient> for Vec<(f64, f64)> {
    fn from(tab: TabulatedCoefficient) -> Self {
        tab.times.into_iter().zip(tab.values).collect()
    }
}

impl TabulatedCoefficient {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid(
                "a",
                "a tabulated coefficient needs at least two samples",
            ));
        }
        let mut times = Vec::with_capacity(samples.len());
        let mut values = Vec::with_capacity(samples.len());
        for &(t, a) in samples {
            if !(t > 0.0) || !t.is_finite() || !a.is_finite() {
                return Err(invalid("a", format!("bad sample ({t}, {a})")));
            }
            if let Some(&last) = times.last() {
                if !(t > last) {
                    return Err(invalid("a", "sample times must be strictly increasing"));
                }
            }
            times.push(t);
            values.push(a);
        }
        let mut cumulative = vec![0.0; times.len()];
        for i in 1..times.len() {
            cumulative[i] =
                cumulative[i - 1] + 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
        }
        Ok(Self {
            times,
            values,
            cumulative,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().expect("non-empty"))
    }

    fn cell(&self, t: f64) -> Result<usize> {
        let (lo, hi) = self.range();
        if t < lo || t > hi {
            return Err(Error::Domain(format!(
                "t = {t} outside the tabulated range [{lo}, {hi}]"
            )));
        }
        let idx = self.times.partition_point(|&s| s <= t);
        Ok(idx.saturating_sub(1).min(self.times.len() - 2))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let i = self.cell(t)?;
        let s = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        Ok(self.values[i] + s * (self.values[i + 1] - self.values[i]))
    }

    pub fn antiderivative(&self, t: f64) -> Result<f64> {
        let i = self.cell(t)?;
        let h = t - self.times[i];
        let slope = (self.values[i + 1] - self.values[i]) / (self.times[i + 1] - self.times[i]);
        Ok(self.cumulative[i] + self.values[i] * h + 0.5 * slope * h * h)
    }

    fn exp_integral(&self, kappa: f64, t1: f64, t2: f64) -> Result<f64> {
        self.cell(t1)?;
        self.cell(t2)?;
        // Integrate cell by cell so the integrand is smooth on every piece.
        let mut breaks = vec![t1];
        breaks.extend(self.times.iter().copied().filter(|&s| s > t1 && s < t2));
        breaks.push(t2);
        let mut total = 0.0;
        for w in breaks.windows(2) {
            total += quadrature::integrate(
                |t| (kappa * self.antiderivative(t).unwrap_or(f64::NAN)).exp(),
                w[0],
                w[1],
                QUADRATURE_REL_TOL,
                0.0,
            )?;
        }
        Ok(total)
    }
}

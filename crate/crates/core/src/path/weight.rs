use std::fmt;
use std::sync::Arc;

use crate::bounds::TimeCoefficient;
use crate::error::{invalid, Error, Result};
use crate::quadrature;

const CALLABLE_REL_TOL: f64 = 1e-12;

/// Positive weight `w(t)` of the path energy.
#[derive(Clone)]
pub enum WeightFunction {
    /// `w(t) = t^sigma`.
    PowerTime { sigma: f64 },
    /// `w(t) = exp(-m A(t))`.
    ExpOfA { m: f64, a: TimeCoefficient },
    /// Any positive continuous function, integrated numerically.
    Callable(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerTime { sigma } => f.debug_struct("PowerTime").field("sigma", sigma).finish(),
            Self::ExpOfA { m, a } => f
                .debug_struct("ExpOfA")
                .field("m", m)
                .field("a", a)
                .finish(),
            Self::Callable(_) => f.write_str("Callable(..)"),
        }
    }
}

impl WeightFunction {
    /// `w = 1`.
    pub fn unit() -> Self {
        Self::PowerTime { sigma: 0.0 }
    }

    pub fn callable<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self::Callable(Arc::new(f))
    }

    /// `w(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let w = match self {
            Self::PowerTime { sigma } => {
                if *sigma == 0.0 {
                    1.0
                } else {
                    t.powf(*sigma)
                }
            }
            Self::ExpOfA { m, a } => (-m * a.antiderivative(t)?).exp(),
            Self::Callable(f) => f(t),
        };
        if w > 0.0 && w.is_finite() {
            Ok(w)
        } else {
            Err(Error::Domain(format!(
                "weight must be positive and finite, got w({t}) = {w}"
            )))
        }
    }

    /// `int_a^b w(t) dt`, exact for the closed-form variants.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        check_interval(a, b)?;
        match self {
            Self::PowerTime { sigma } => Ok(crate::bounds::power_integral(*sigma, a, b)),
            Self::ExpOfA { m, a: coef } => coef.exp_integral(-m, a, b),
            Self::Callable(_) => quadrature::integrate(
                |t| self.eval(t).unwrap_or(f64::NAN),
                a,
                b,
                CALLABLE_REL_TOL,
                0.0,
            ),
        }
    }

    /// `W(b) - W(a)` where `W' = w^{1/(1-q)}`.
    pub fn big_w_increment(&self, q: f64, a: f64, b: f64) -> Result<f64> {
        if !(q > 1.0) {
            return Err(invalid("q", format!("must exceed 1, got {q}")));
        }
        check_interval(a, b)?;
        let e = 1.0 / (1.0 - q);
        match self {
            Self::PowerTime { sigma } => Ok(crate::bounds::power_integral(sigma * e, a, b)),
            // (e^{-mA})^{1/(1-q)} = e^{m A / (q-1)}
            Self::ExpOfA { m, a: coef } => coef.exp_integral(-m * e, a, b),
            Self::Callable(_) => quadrature::integrate(
                |t| self.eval(t).map(|w| w.powf(e)).unwrap_or(f64::NAN),
                a,
                b,
                CALLABLE_REL_TOL,
                0.0,
            ),
        }
    }

    /// `(min w, max w)` over `[a, b]`.
    ///
    /// Exact (endpoint values) for monotone closed-form weights; sampled on
    /// 4097 equispaced points otherwise.
    pub fn extrema(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        check_interval(a, b)?;
        let monotone = matches!(
            self,
            Self::PowerTime { .. }
                | Self::ExpOfA {
                    a: TimeCoefficient::PowerLaw { .. } | TimeCoefficient::Constant { .. },
                    ..
                }
        );
        let (wa, wb) = (self.eval(a)?, self.eval(b)?);
        if monotone {
            return Ok((wa.min(wb), wa.max(wb)));
        }
        let n = 4096;
        let mut lo = wa.min(wb);
        let mut hi = wa.max(wb);
        for i in 1..n {
            let w = self.eval(a + (b - a) * i as f64 / n as f64)?;
            lo = lo.min(w);
            hi = hi.max(w);
        }
        Ok((lo, hi))
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && a < b && b.is_finite() {
        Ok(())
    } else {
        Err(Error::TimeOrdering { t1: a, t2: b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_quadrature() {
        let weights = [
            WeightFunction::PowerTime { sigma: 1.3 },
            WeightFunction::ExpOfA {
                m: -1.0,
                a: TimeCoefficient::power_law(0.75).unwrap(),
            },
            WeightFunction::ExpOfA {
                m: 0.5,
                a: TimeCoefficient::constant(2.0).unwrap(),
            },
        ];
        for w in &weights {
            let numeric = w.clone();
            let f = move |t: f64| numeric.eval(t).unwrap();
            let callable = WeightFunction::callable(f);
            for &q in &[1.5, 2.0, 3.0] {
                let a = w.big_w_increment(q, 0.5, 2.5).unwrap();
                let b = callable.big_w_increment(q, 0.5, 2.5).unwrap();
                assert!((a - b).abs() < 1e-11 * a.abs(), "{w:?} q = {q}");
            }
            let a = w.integral(0.5, 2.5).unwrap();
            let b = callable.integral(0.5, 2.5).unwrap();
            assert!((a - b).abs() < 1e-11 * a.abs());
        }
    }

    #[test]
    fn nonpositive_weight_is_a_domain_error() {
        let w = WeightFunction::callable(|t| 1.0 - t);
        assert!(w.eval(2.0).is_err());
        assert!(w.integral(0.5, 2.0).is_err());
    }

    #[test]
    fn extrema_of_a_hump() {
        let w = WeightFunction::callable(|t| 1.0 + (-(t - 1.0) * (t - 1.0)).exp());
        let (lo, hi) = w.extrema(0.5, 2.0).unwrap();
        assert!((hi - 2.0).abs() < 1e-6);
        assert!((lo - (1.0 + (-1.0f64).exp())).abs() < 1e-12);
    }
}

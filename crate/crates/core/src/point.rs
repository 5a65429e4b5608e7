use crate::error::{invalid, Error, Result};

/// A point `(x, t)` of space-time with `t > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimePoint {
    x: Vec<f64>,
    t: f64,
}

impl SpacetimePoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(invalid("x", "spatial dimension must be at least 1"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("x", "coordinates must be finite"));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(invalid(
                "t",
                format!("time must be positive and finite, got {t}"),
            ));
        }
        Ok(Self { x, t })
    }

    /// One-dimensional convenience constructor.
    pub fn scalar(x: f64, t: f64) -> Result<Self> {
        Self::new(vec![x], t)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Euclidean distance between the spatial parts.
    pub fn distance(&self, other: &SpacetimePoint) -> f64 {
        euclidean_distance(&self.x, &other.x)
    }
}

pub(crate) fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

/// Checks a pair for a two-point inequality: same dimension and `t1 < t2`.
pub(crate) fn ordered_pair(p1: &SpacetimePoint, p2: &SpacetimePoint) -> Result<()> {
    if p1.dim() != p2.dim() {
        return Err(Error::Shape(format!(
            "points have dimensions {} and {}",
            p1.dim(),
            p2.dim()
        )));
    }
    if !(p1.t < p2.t) {
        return Err(Error::TimeOrdering { t1: p1.t, t2: p2.t });
    }
    Ok(())
}

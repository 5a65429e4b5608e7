use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Which of the three cylinders attached to a center and radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CylinderKind {
    /// `B_{2R} x (t0 - R^2, t0 + R^2)`.
    Full,
    /// `B_{R/2} x (t0 + 3R^2/4, t0 + R^2)`.
    Plus,
    /// `B_{R/2} x (t0 - 3R^2/4, t0 - R^2/4)`.
    Minus,
}

/// A parabolic cylinder around `(x0, t0)`.
///
/// Membership uses the closed cylinder; suprema and infima of continuous
/// fields do not distinguish it from the open one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCylinder {
    pub center: Vec<f64>,
    pub t0: f64,
    pub radius: f64,
    pub kind: CylinderKind,
}

impl ParabolicCylinder {
    pub fn new(center: Vec<f64>, t0: f64, radius: f64, kind: CylinderKind) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("center", "needs at least one coordinate"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("R", format!("must be positive, got {radius}")));
        }
        if !t0.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("center", "coordinates must be finite"));
        }
        Ok(Self {
            center,
            t0,
            radius,
            kind,
        })
    }

    pub fn full(center: Vec<f64>, t0: f64, radius: f64) -> Result<Self> {
        Self::new(center, t0, radius, CylinderKind::Full)
    }

    /// The same center and radius with another kind.
    pub fn with_kind(&self, kind: CylinderKind) -> Self {
        Self {
            kind,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn spatial_radius(&self) -> f64 {
        match self.kind {
            CylinderKind::Full => 2.0 * self.radius,
            CylinderKind::Plus | CylinderKind::Minus => 0.5 * self.radius,
        }
    }

    /// Closed time interval.
    pub fn time_interval(&self) -> [f64; 2] {
        let r2 = self.radius * self.radius;
        match self.kind {
            CylinderKind::Full => [self.t0 - r2, self.t0 + r2],
            CylinderKind::Plus => [self.t0 + 0.75 * r2, self.t0 + r2],
            CylinderKind::Minus => [self.t0 - 0.75 * r2, self.t0 - 0.25 * r2],
        }
    }

    pub fn contains_space(&self, x: &[f64]) -> bool {
        let rho = self.spatial_radius();
        let d2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum();
        d2 <= rho * rho
    }

    pub fn contains_time(&self, t: f64) -> bool {
        let [lo, hi] = self.time_interval();
        lo <= t && t <= hi
    }

    pub fn contains(&self, x: &[f64], t: f64) -> bool {
        x.len() == self.dim() && self.contains_space(x) && self.contains_time(t)
    }
}

/// Axis-aligned space-time box `prod [lower_a, upper_a] x [t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub t: [f64; 2],
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, t: [f64; 2]) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Shape(format!(
                "box corners of dimensions {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(a, b)| !(a < b && a.is_finite() && b.is_finite()))
        {
            return Err(invalid("box", "every axis needs lower < upper"));
        }
        if !(t[0] < t[1] && t[0].is_finite() && t[1].is_finite()) {
            return Err(invalid("box", format!("time interval {t:?} is empty")));
        }
        Ok(Self { lower, upper, t })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64], t: f64) -> bool {
        self.contains_space(x) && self.t[0] <= t && t <= self.t[1]
    }

    pub fn contains_space(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (a, b))| a <= v && v <= b)
    }
}

/// `Q' = Omega' x (T2, T3)` inside `Q = Omega x (T1, T4)`, both axis-aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeBox {
    pub outer: AxisBox,
    pub inner: AxisBox,
}

impl SpaceTimeBox {
    pub fn new(outer: AxisBox, inner: AxisBox) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(Error::Shape(
                "inner and outer boxes differ in dimension".into(),
            ));
        }
        let [t1, t4] = outer.t;
        let [t2, t3] = inner.t;
        if !(0.0 < t1 && t1 < t2 && t2 < t3 && t3 < t4) {
            return Err(invalid(
                "times",
                format!("need 0 < T1 < T2 < T3 < T4, got {t1}, {t2}, {t3}, {t4}"),
            ));
        }
        let nested = (0..outer.dim())
            .all(|a| outer.lower[a] <= inner.lower[a] && inner.upper[a] <= outer.upper[a]);
        if !nested {
            return Err(invalid(
                "box",
                "the inner spatial box must lie in the outer one",
            ));
        }
        Ok(Self { outer, inner })
    }

    /// `inf |x - y| + |t - s|^{1/2}` over `(x, t)` in `Q'` and `(y, s)` on the
    /// lateral faces `dOmega x [T1, T4]` or the time faces `{T1, T4} x Omega`.
    ///
    /// For boxes the lateral infimum is the smallest coordinate gap (take
    /// `s = t`) and the time infimum is the square root of the smaller time
    /// gap (take `y = x`).
    pub fn parabolic_distance(&self) -> f64 {
        let (o, i) = (&self.outer, &self.inner);
        let lateral = (0..o.dim())
            .map(|a| (i.lower[a] - o.lower[a]).min(o.upper[a] - i.upper[a]))
            .fold(f64::INFINITY, f64::min);
        let temporal = (i.t[0] - o.t[0]).min(o.t[1] - i.t[1]).sqrt();
        lateral.min(temporal)
    }
}

/// Free-function form of [`SpaceTimeBox::parabolic_distance`].
pub fn parabolic_distance(boxes: &SpaceTimeBox) -> f64 {
    boxes.parabolic_distance()
}

/// Exact checks of `D_{R_j}(z, tau_j) inside D+_{R_{j+1}}(z, tau_{j+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Containment {
    pub j: usize,
    /// `2 R_j = R_{j+1} / 2`.
    pub balls_equal: bool,
    /// `tau_{j+1} + 3/4 R_{j+1}^2 = tau_j - 2 R_j^2`.
    pub lower_identity: bool,
    /// `tau_{j+1} + R_{j+1}^2 = tau_j + 2 R_j^2`.
    pub upper_identity: bool,
    /// `tau_{j+1} + 3/4 R_{j+1}^2 < tau_j - R_j^2`.
    pub lower_strict: bool,
    /// `tau_{j+1} + R_{j+1}^2 > tau_j + R_j^2`.
    pub upper_strict: bool,
}

impl Containment {
    pub fn holds(&self) -> bool {
        self.balls_equal
            && self.lower_identity
            && self.upper_identity
            && self.lower_strict
            && self.upper_strict
    }
}

/// Radii `R_j = 4^j R_0`, `R_0 = delta / 4^{k-1}`, and times
/// `tau_{j+1} = tau_j - 14 R_j^2`, with containment certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedCylinders {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
    pub certificates: Vec<Containment>,
}

impl NestedCylinders {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Cylinder `j` of the given kind.
    pub fn cylinder(&self, j: usize, kind: CylinderKind) -> ParabolicCylinder {
        ParabolicCylinder {
            center: self.center.clone(),
            t0: self.times[j],
            radius: self.radii[j],
            kind,
        }
    }
}

fn rational(name: &'static str, v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| invalid(name, format!("must be finite, got {v}")))
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `k` nested cylinders around `(z, tau0)`; the certificates are computed
/// in exact rational arithmetic from the binary values of the inputs.
pub fn nested_cylinders(z: &[f64], tau0: f64, delta: f64, k: usize) -> Result<NestedCylinders> {
    if k == 0 {
        return Err(invalid("k", "needs at least one cylinder"));
    }
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    if z.is_empty() || z.iter().any(|v| !v.is_finite()) {
        return Err(invalid("z", "needs finite coordinates"));
    }
    let four = BigRational::from_integer(4.into());
    let mut r = rational("delta", delta)?;
    for _ in 1..k {
        r /= &four;
    }
    let mut tau = rational("tau0", tau0)?;
    let (mut radii, mut taus) = (vec![r.clone()], vec![tau.clone()]);
    for _ in 1..k {
        tau = &tau - BigRational::from_integer(14.into()) * &r * &r;
        r = &r * &four;
        radii.push(r.clone());
        taus.push(tau.clone());
    }
    let quarter3 = BigRational::new(3.into(), 4.into());
    let two = BigRational::from_integer(2.into());
    let mut certificates = Vec::with_capacity(k - 1);
    for j in 0..k.saturating_sub(1) {
        let (rj, rn) = (&radii[j], &radii[j + 1]);
        let (tj, tn) = (&taus[j], &taus[j + 1]);
        let (rj2, rn2) = (rj * rj, rn * rn);
        let low = tn + &quarter3 * &rn2;
        let high = tn + &rn2;
        let c = Containment {
            j,
            balls_equal: (&two * rj - rn / &two).is_zero(),
            lower_identity: low == tj - &two * &rj2,
            upper_identity: high == tj + &two * &rj2,
            lower_strict: low < tj - &rj2,
            upper_strict: high > tj + &rj2,
        };
        if !c.holds() {
            return Err(Error::Internal(format!(
                "nested cylinder containment failed: {c:?}"
            )));
        }
        certificates.push(c);
    }
    Ok(NestedCylinders {
        center: z.to_vec(),
        radii: radii.iter().map(to_f64).collect(),
        times: taus.iter().map(to_f64).collect(),
        certificates,
    })
}

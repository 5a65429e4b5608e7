use serde::{Deserialize, Serialize};

use super::weight::WeightFunction;
use crate::error::{invalid, Error, Result};
use crate::quadrature;

/// Cells whose speed is below this contribute nothing to derivatives.
pub const DEGENERATE_SPEED: f64 = 1e-14;

/// Piecewise-linear path `x: [t1, t2] -> R^d` through its knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath {
    knots: Vec<f64>,
    /// Row-major `knots.len() x dim`.
    values: Vec<f64>,
    dim: usize,
}

impl DiscretePath {
    pub fn new(knots: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("knots", "a path needs at least two knots"));
        }
        if knots.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) || knots.iter().any(|t| !t.is_finite()) {
            return Err(invalid(
                "knots",
                "knot times must be finite and strictly increasing",
            ));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::Shape(
                "all knot values must share one positive dimension".into(),
            ));
        }
        let values: Vec<f64> = values.into_iter().flatten().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "knot values must be finite"));
        }
        Ok(Self { knots, values, dim })
    }

    /// Samples `f` at the given knots.
    pub fn from_fn<F: FnMut(f64) -> Vec<f64>>(knots: Vec<f64>, mut f: F) -> Result<Self> {
        let values = knots.iter().map(|&t| f(t)).collect();
        Self::new(knots, values)
    }

    /// Equispaced knots `t1 = s_0 < ... < s_{n-1} = t2`.
    pub fn uniform_knots(t1: f64, t2: f64, n: usize) -> Vec<f64> {
        let mut knots: Vec<f64> = (0..n)
            .map(|i| t1 + (t2 - t1) * i as f64 / (n - 1) as f64)
            .collect();
        knots[n - 1] = t2;
        knots
    }

    /// The straight line from `x1` to `x2` sampled at `n` uniform knots.
    pub fn straight_line(t1: f64, t2: f64, x1: &[f64], x2: &[f64], n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", "a path needs at least two knots"));
        }
        if x1.len() != x2.len() {
            return Err(Error::Shape("endpoints have different dimensions".into()));
        }
        let knots = Self::uniform_knots(t1, t2, n);
        Self::from_fn(knots, |t| {
            let s = (t - t1) / (t2 - t1);
            if t == t2 {
                x2.to_vec()
            } else {
                x1.iter().zip(x2).map(|(a, b)| a + s * (b - a)).collect()
            }
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn value_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn flat_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn start(&self) -> &[f64] {
        self.value(0)
    }

    pub fn end(&self) -> &[f64] {
        self.value(self.len() - 1)
    }

    /// Linear interpolation at `t`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let (t1, t2) = (self.knots[0], self.knots[self.len() - 1]);
        if !(t1..=t2).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [{t1}, {t2}]")));
        }
        let i = self
            .knots
            .partition_point(|&s| s <= t)
            .saturating_sub(1)
            .min(self.len() - 2);
        let s = (t - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        Ok(self
            .value(i)
            .iter()
            .zip(self.value(i + 1))
            .map(|(a, b)| a + s * (b - a))
            .collect())
    }

    /// Velocity on cell `i`.
    pub fn velocity(&self, i: usize) -> Vec<f64> {
        let dt = self.knots[i + 1] - self.knots[i];
        self.value(i)
            .iter()
            .zip(self.value(i + 1))
            .map(|(a, b)| (b - a) / dt)
            .collect()
    }

    /// `lambda x` knot-wise.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= lambda);
        out
    }

    /// `a x + b y` knot-wise; both paths must share knots.
    pub fn combine(&self, a: f64, other: &DiscretePath, b: f64) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v = a * *v + b * w;
        }
        Ok(out)
    }

    pub(crate) fn same_shape(&self, other: &DiscretePath) -> Result<()> {
        if self.knots != other.knots || self.dim != other.dim {
            return Err(Error::Shape("paths must share knots and dimension".into()));
        }
        Ok(())
    }

    /// `int_cell w` for every cell.
    pub fn cell_weights(&self, w: &WeightFunction) -> Result<Vec<f64>> {
        self.knots
            .windows(2)
            .map(|c| w.integral(c[0], c[1]))
            .collect()
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(invalid("q", format!("must exceed 1, got {q}")))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `E(x) = (1/q) sum_cells |dx/dt|^q int_cell w`.
pub fn functional_e(path: &DiscretePath, w: &WeightFunction, q: f64) -> Result<f64> {
    check_q(q)?;
    let cells = path.cell_weights(w)?;
    Ok(energy_with_cells(path, &cells, q))
}

pub(crate) fn energy_with_cells(path: &DiscretePath, cells: &[f64], q: f64) -> f64 {
    let total: f64 = (0..path.len() - 1)
        .map(|i| norm(&path.velocity(i)).powf(q) * cells[i])
        .sum();
    total / q
}

/// Directional derivative `int |v'|^{q-2} v' . h' w dt` of `E` at `v`.
pub fn gateaux(v: &DiscretePath, h: &DiscretePath, w: &WeightFunction, q: f64) -> Result<f64> {
    check_q(q)?;
    v.same_shape(h)?;
    let tol = 1e-12 * (1.0 + norm(h.flat()));
    if norm(h.start()) > tol || norm(h.end()) > tol {
        return Err(invalid("h", "direction must vanish at both endpoints"));
    }
    let cells = v.cell_weights(w)?;
    let mut total = 0.0;
    for i in 0..v.len() - 1 {
        let vd = v.velocity(i);
        let speed = norm(&vd);
        if speed < DEGENERATE_SPEED {
            continue;
        }
        let hd = h.velocity(i);
        let dot: f64 = vd.iter().zip(&hd).map(|(a, b)| a * b).sum();
        total += speed.powf(q - 2.0) * dot * cells[i];
    }
    Ok(total)
}

/// Outcome of [`poincare_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    /// `||x||_{q,w}`.
    pub lhs: f64,
    /// `C ||x'||_{q,w}`.
    pub rhs: f64,
    /// `C = C2 C3 / C1`.
    pub constant: f64,
    pub holds: bool,
}

/// Checks `||x||_{q,w} <= C ||x'||_{q,w}` with `C1^q = min w`, `C2^q = max w`
/// and `C3 = q^{-1/q} (t2 - t1)`.
pub fn poincare_check(x: &DiscretePath, q: f64, w: &WeightFunction) -> Result<PoincareReport> {
    check_q(q)?;
    let scale = 1.0 + x.flat().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm(x.start()) > 1e-12 * scale || norm(x.end()) > 1e-12 * scale {
        return Err(invalid("x", "path must vanish at both endpoints"));
    }
    let knots = x.knots();
    let (t1, t2) = (knots[0], knots[knots.len() - 1]);
    let mut int_x = 0.0;
    for i in 0..x.len() - 1 {
        let (a, b) = (knots[i], knots[i + 1]);
        let (xa, xb) = (x.value(i), x.value(i + 1));
        if norm(xa) == 0.0 && norm(xb) == 0.0 {
            continue;
        }
        int_x += quadrature::integrate(
            |t| {
                let s = (t - a) / (b - a);
                let r: Vec<f64> = xa.iter().zip(xb).map(|(p, q)| p + s * (q - p)).collect();
                norm(&r).powf(q) * w.eval(t).unwrap_or(f64::NAN)
            },
            a,
            b,
            1e-10,
            1e-300,
        )?;
    }
    let cells = x.cell_weights(w)?;
    let int_xd = q * energy_with_cells(x, &cells, q);
    let (wmin, wmax) = w.extrema(t1, t2)?;
    let c1 = wmin.powf(1.0 / q);
    let c2 = wmax.powf(1.0 / q);
    let c3 = q.powf(-1.0 / q) * (t2 - t1);
    let constant = c2 * c3 / c1;
    let lhs = int_x.powf(1.0 / q);
    let rhs = constant * int_xd.powf(1.0 / q);
    Ok(PoincareReport {
        lhs,
        rhs,
        constant,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

use serde::{Deserialize, Serialize};

use super::discrete::{energy_with_cells, DiscretePath, DEGENERATE_SPEED};
use super::weight::WeightFunction;
use crate::error::{invalid, Error, Result};

fn check_problem(q: f64, t1: f64, t2: f64, x1: &[f64], x2: &[f64]) -> Result<()> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(invalid("q", format!("must exceed 1, got {q}")));
    }
    if !(t1 > 0.0 && t1 < t2 && t2.is_finite()) {
        return Err(Error::TimeOrdering { t1, t2 });
    }
    if x1.is_empty() || x1.len() != x2.len() {
        return Err(Error::Shape(
            "endpoints must share a positive dimension".into(),
        ));
    }
    Ok(())
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    crate::point::euclidean_distance(a, b)
}

/// `min E = |x2 - x1|^q / (q (W(t2) - W(t1))^{q-1})`.
pub fn closed_form_min(
    q: f64,
    w: &WeightFunction,
    t1: f64,
    t2: f64,
    x1: &[f64],
    x2: &[f64],
) -> Result<f64> {
    check_problem(q, t1, t2, x1, x2)?;
    let dw = w.big_w_increment(q, t1, t2)?;
    if !(dw > 0.0) {
        return Err(Error::Domain(format!(
            "W(t2) - W(t1) = {dw} is not positive"
        )));
    }
    let dist = distance(x1, x2);
    if dist == 0.0 {
        return Ok(0.0);
    }
    Ok(dist.powf(q) / (q * dw.powf(q - 1.0)))
}

/// The minimizer `v(t) = D + B W(t)`, with `W(t1) = 0` as reference.
#[derive(Debug, Clone)]
pub struct OptimalPath {
    q: f64,
    w: WeightFunction,
    t1: f64,
    t2: f64,
    x1: Vec<f64>,
    x2: Vec<f64>,
    /// `B = (x2 - x1) / (W(t2) - W(t1))`.
    b: Vec<f64>,
}

impl OptimalPath {
    pub fn slope(&self) -> &[f64] {
        &self.b
    }

    /// `v(t)`; reproduces the endpoints exactly.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        if t == self.t1 {
            return Ok(self.x1.clone());
        }
        if t == self.t2 {
            return Ok(self.x2.clone());
        }
        if !(t > self.t1 && t < self.t2) {
            return Err(Error::Domain(format!(
                "t = {t} outside [{}, {}]",
                self.t1, self.t2
            )));
        }
        let big_w = self.w.big_w_increment(self.q, self.t1, t)?;
        Ok(self
            .x1
            .iter()
            .zip(&self.b)
            .map(|(d, b)| d + b * big_w)
            .collect())
    }

    /// Samples the path at the given knots, which must span `[t1, t2]`.
    pub fn sample(&self, knots: Vec<f64>) -> Result<DiscretePath> {
        if knots.first() != Some(&self.t1) || knots.last() != Some(&self.t2) {
            return Err(Error::Shape("knots must start at t1 and end at t2".into()));
        }
        let values = knots
            .iter()
            .map(|&t| self.eval(t))
            .collect::<Result<Vec<_>>>()?;
        DiscretePath::new(knots, values)
    }
}

/// The minimizer of `E` with fixed endpoints.
pub fn optimal_path(
    q: f64,
    w: &WeightFunction,
    t1: f64,
    t2: f64,
    x1: &[f64],
    x2: &[f64],
) -> Result<OptimalPath> {
    check_problem(q, t1, t2, x1, x2)?;
    let dw = w.big_w_increment(q, t1, t2)?;
    if !(dw > 0.0) {
        return Err(Error::Domain(format!(
            "W(t2) - W(t1) = {dw} is not positive"
        )));
    }
    Ok(OptimalPath {
        q,
        w: w.clone(),
        t1,
        t2,
        x1: x1.to_vec(),
        x2: x2.to_vec(),
        b: x1.iter().zip(x2).map(|(a, b)| (b - a) / dw).collect(),
    })
}

/// Knots with equal increments of `W`, on which the minimizer is linear.
pub fn w_uniform_knots(q: f64, w: &WeightFunction, t1: f64, t2: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(invalid("n", "at least two knots are needed"));
    }
    let total = w.big_w_increment(q, t1, t2)?;
    let mut knots = Vec::with_capacity(n);
    knots.push(t1);
    let mut lo = t1;
    for i in 1..n - 1 {
        let target = total * i as f64 / (n - 1) as f64;
        // W is strictly increasing: bisection from the previous knot.
        let (mut a, mut b) = (lo, t2);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if w.big_w_increment(q, t1, mid)? < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        let t = 0.5 * (a + b);
        knots.push(t);
        lo = t;
    }
    knots.push(t2);
    if knots.windows(2).any(|k| !(k[0] < k[1])) {
        return Err(Error::Domain(
            "W-uniform knots are not strictly increasing".into(),
        ));
    }
    Ok(knots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnotSpacing {
    #[default]
    Uniform,
    /// Equal increments of `W`.
    WUniform,
}

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    /// Number of knots `N`.
    pub knots: usize,
    /// Sup-norm tolerance on the gradient.
    pub tol: f64,
    pub max_iters: usize,
    pub spacing: KnotSpacing,
    /// Starting path; defaults to the straight line. Its knots are used as is.
    pub initial: Option<DiscretePath>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            knots: 200,
            tol: 1e-8,
            max_iters: 100_000,
            spacing: KnotSpacing::Uniform,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizationResult {
    pub value: f64,
    pub path: DiscretePath,
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm of the final gradient.
    pub gradient_norm: f64,
    /// `value - closed_form_min`.
    pub gap_to_closed_form: Option<f64>,
}

/// Gradient of `E` with respect to the interior knot values, row-major.
fn gradient(path: &DiscretePath, cells: &[f64], q: f64, out: &mut [f64]) {
    let d = path.dim();
    let n = path.len();
    out.iter_mut().for_each(|g| *g = 0.0);
    let knots = path.knots();
    for i in 0..n - 1 {
        let dt = knots[i + 1] - knots[i];
        let v = path.velocity(i);
        let speed = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if speed < DEGENERATE_SPEED {
            continue;
        }
        let factor = speed.powf(q - 2.0) * cells[i] / dt;
        for k in 0..d {
            let flux = factor * v[k];
            // dE/dx_i gets -flux, dE/dx_{i+1} gets +flux (interior knots only).
            if i >= 1 {
                out[(i - 1) * d + k] -= flux;
            }
            if i < n - 2 {
                out[i * d + k] += flux;
            }
        }
    }
}

/// Solves `K y = g` per coordinate, `K` the weighted stiffness matrix
/// `sum_cells (c_i / dt_i^2) (e_i - e_{i+1})(e_i - e_{i+1})^T` on interior knots.
fn precondition(knots: &[f64], cells: &[f64], d: usize, g: &[f64], out: &mut [f64]) {
    let m = knots.len() - 2;
    let stiff: Vec<f64> = (0..knots.len() - 1)
        .map(|i| cells[i] / ((knots[i + 1] - knots[i]) * (knots[i + 1] - knots[i])))
        .collect();
    let mut c_prime = vec![0.0; m];
    let mut d_prime = vec![0.0; m];
    for k in 0..d {
        // Thomas algorithm; diagonal stiff[j] + stiff[j+1], off-diagonal -stiff[j+1].
        for j in 0..m {
            let diag = stiff[j] + stiff[j + 1];
            let lower = if j > 0 { -stiff[j] } else { 0.0 };
            let upper = -stiff[j + 1];
            let denom = diag - lower * if j > 0 { c_prime[j - 1] } else { 0.0 };
            c_prime[j] = upper / denom;
            let prev = if j > 0 { d_prime[j - 1] } else { 0.0 };
            d_prime[j] = (g[j * d + k] - lower * prev) / denom;
        }
        for j in (0..m).rev() {
            let next = if j + 1 < m { out[(j + 1) * d + k] } else { 0.0 };
            out[j * d + k] = d_prime[j] - c_prime[j] * next;
        }
    }
}

/// Minimizes the discrete energy over interior knot values.
///
/// Steepest descent in the weighted `H^1` metric: the gradient is
/// preconditioned by the stiffness matrix of `int |h'|^2 w`. The step along
/// each direction is found from the sign change of the directional
/// derivative, which stays accurate after energy differences have sunk below
/// roundoff. For `q = 2` the first step is exact.
#[allow(clippy::too_many_arguments)]
pub fn numeric_minimize(
    q: f64,
    w: &WeightFunction,
    t1: f64,
    t2: f64,
    x1: &[f64],
    x2: &[f64],
    options: &MinimizeOptions,
) -> Result<MinimizationResult> {
    check_problem(q, t1, t2, x1, x2)?;
    let mut path = match &options.initial {
        Some(p) => {
            let knots = p.knots();
            if knots[0] != t1 || knots[knots.len() - 1] != t2 {
                return Err(Error::Shape("initial path must span [t1, t2]".into()));
            }
            if p.start() != x1 || p.end() != x2 {
                return Err(Error::Shape(
                    "initial path must have the given endpoints".into(),
                ));
            }
            p.clone()
        }
        None => {
            if options.knots < 8 {
                return Err(invalid(
                    "knots",
                    format!("need at least 8, got {}", options.knots),
                ));
            }
            let knots = match options.spacing {
                KnotSpacing::Uniform => DiscretePath::uniform_knots(t1, t2, options.knots),
                KnotSpacing::WUniform => w_uniform_knots(q, w, t1, t2, options.knots)?,
            };
            DiscretePath::from_fn(knots, |t| {
                let s = (t - t1) / (t2 - t1);
                x1.iter().zip(x2).map(|(a, b)| a + s * (b - a)).collect()
            })?
        }
    };
    let cells = path.cell_weights(w)?;
    let d = path.dim();
    let interior = (path.len() - 2) * d;
    let mut grad = vec![0.0; interior];
    let mut dir = vec![0.0; interior];
    let mut trial = path.clone();
    let mut trial_grad = vec![0.0; interior];
    let mut step = 1.0f64;
    let mut iterations = 0;
    let mut converged = false;
    let mut gnorm;
    // phi'(alpha) for phi(alpha) = E(x - alpha dir).
    let mut line_slope =
        |path: &DiscretePath, trial: &mut DiscretePath, dir: &[f64], alpha: f64| {
            {
                let base = &path.flat()[d..d + interior];
                let target = &mut trial.flat_mut()[d..d + interior];
                for ((t, b), p) in target.iter_mut().zip(base).zip(dir) {
                    *t = b - alpha * p;
                }
            }
            gradient(trial, &cells, q, &mut trial_grad);
            -trial_grad.iter().zip(dir).map(|(g, p)| g * p).sum::<f64>()
        };
    loop {
        gradient(&path, &cells, q, &mut grad);
        gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gnorm <= options.tol || interior == 0 {
            converged = true;
            break;
        }
        if iterations >= options.max_iters {
            break;
        }
        precondition(path.knots(), &cells, d, &grad, &mut dir);
        let slope0 = -grad.iter().zip(&dir).map(|(g, p)| g * p).sum::<f64>();
        if !(slope0 < 0.0) {
            break;
        }
        iterations += 1;
        // E is convex along the line, so phi' is nondecreasing: bracket its
        // sign change, then refine by regula falsi (Illinois variant).
        let target = 0.1 * slope0.abs();
        let (mut lo, mut f_lo) = (0.0, slope0);
        let mut alpha = step;
        let mut f = line_slope(&path, &mut trial, &dir, alpha);
        let mut expansions = 0;
        while f < -target && expansions < 60 {
            lo = alpha;
            f_lo = f;
            alpha *= 2.0;
            f = line_slope(&path, &mut trial, &dir, alpha);
            expansions += 1;
        }
        let (mut hi, mut f_hi) = (alpha, f);
        let mut side = 0i8;
        let mut refinements = 0;
        while f.abs() > target && refinements < 100 {
            alpha = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if !(alpha > lo && alpha < hi) {
                alpha = 0.5 * (lo + hi);
            }
            f = line_slope(&path, &mut trial, &dir, alpha);
            if f < 0.0 {
                lo = alpha;
                f_lo = f;
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = alpha;
                f_hi = f;
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            }
            refinements += 1;
        }
        if f.abs() > target && lo == 0.0 {
            // No usable step along this direction.
            break;
        }
        if f.abs() > target {
            alpha = lo;
            line_slope(&path, &mut trial, &dir, alpha);
        }
        std::mem::swap(&mut path, &mut trial);
        trial.flat_mut().copy_from_slice(path.flat());
        step = alpha;
    }
    // Endpoints are never touched; restore them bit-exactly anyway.
    let last = path.len() - 1;
    path.value_mut(0).copy_from_slice(x1);
    path.value_mut(last).copy_from_slice(x2);
    let value = energy_with_cells(&path, &cells, q);
    let gap = closed_form_min(q, w, t1, t2, x1, x2)
        .ok()
        .map(|m| value - m);
    Ok(MinimizationResult {
        value,
        path,
        iterations,
        converged,
        gradient_norm: gnorm,
        gap_to_closed_form: gap,
    })
}

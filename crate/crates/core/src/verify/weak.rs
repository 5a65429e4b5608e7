use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pde::GridSolution;

/// `b(z) = exp(1 - 1/(1 - z^2))` on `|z| < 1`, zero outside; `b(0) = 1`.
fn bump(z: f64) -> (f64, f64) {
    if z.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let s = 1.0 - z * z;
    let b = (1.0 - 1.0 / s).exp();
    (b, -2.0 * z / (s * s) * b)
}

/// Smooth test function `prod_a b((x_a - c_a)/r) b((t - tau)/s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpFunction {
    pub center: Vec<f64>,
    pub radius: f64,
    pub t_center: f64,
    pub t_radius: f64,
}

impl BumpFunction {
    /// `(phi, grad phi, phi_t)`.
    pub fn eval(&self, x: &[f64], t: f64) -> (f64, Vec<f64>, f64) {
        let parts: Vec<(f64, f64)> = x
            .iter()
            .zip(&self.center)
            .map(|(xa, ca)| bump((xa - ca) / self.radius))
            .collect();
        let (bt, dbt) = bump((t - self.t_center) / self.t_radius);
        let space: f64 = parts.iter().map(|p| p.0).product();
        let grad = (0..parts.len())
            .map(|a| {
                let others: f64 = parts
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| *b != a)
                    .map(|(_, p)| p.0)
                    .product();
                parts[a].1 / self.radius * others * bt
            })
            .collect();
        (space * bt, grad, space * dbt / self.t_radius)
    }

    /// Errors unless the support, plus one node for centered differences, lies inside the grid.
    fn check_support(&self, grid: &GridSolution) -> Result<()> {
        if self.center.len() != grid.dim() {
            return Err(Error::Shape(format!(
                "test function of dimension {} on a {}-d grid",
                self.center.len(),
                grid.dim()
            )));
        }
        if !(self.radius > 0.0 && self.t_radius > 0.0) {
            return Err(invalid("radius", "test function radii must be positive"));
        }
        let inner = grid.half_width() - grid.dx();
        let times = grid.times();
        let (t0, t1) = (times[0], times[times.len() - 1]);
        let inside = self
            .center
            .iter()
            .all(|c| c - self.radius >= -inner && c + self.radius <= inner)
            && self.t_center - self.t_radius >= t0
            && self.t_center + self.t_radius <= t1;
        if inside {
            Ok(())
        } else {
            Err(Error::Configuration(format!(
                "test function support {self:?} touches the boundary of the grid"
            )))
        }
    }

    /// `count` bumps with random centers and radii inside the interior of `grid`.
    pub fn random_set(grid: &GridSolution, count: usize, seed: u64) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inner = grid.half_width() - 2.0 * grid.dx();
        let times = grid.times();
        let (t0, t1) = (times[0], times[times.len() - 1]);
        let span = t1 - t0;
        (0..count)
            .map(|_| {
                let radius = inner * rng.gen_range(0.15..0.35);
                let center = (0..grid.dim())
                    .map(|_| rng.gen_range(-(inner - radius)..=(inner - radius)))
                    .collect();
                let t_radius = span * rng.gen_range(0.2..0.45);
                let t_center = rng.gen_range((t0 + t_radius)..=(t1 - t_radius));
                Self {
                    center,
                    radius,
                    t_center,
                    t_radius,
                }
            })
            .collect()
    }
}

/// The three integrals of the weak form for one test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakFormTerms {
    /// `int f phi_t`.
    pub time: f64,
    /// `-gamma int f |grad f|^{p-2} grad f . grad phi`.
    pub flux: f64,
    /// `(1 - gamma) int |grad f|^p phi`.
    pub source: f64,
}

impl WeakFormTerms {
    pub fn sum(&self) -> f64 {
        self.time + self.flux + self.source
    }

    pub fn scale(&self) -> f64 {
        self.time.abs() + self.flux.abs() + self.source.abs()
    }
}

/// `p` with `gamma = (p-2)/(p-1)`.
fn exponent_from_gamma(gamma: f64) -> Result<f64> {
    if !(gamma < 1.0 && gamma.is_finite()) {
        return Err(invalid("gamma", format!("must be below 1, got {gamma}")));
    }
    Ok((2.0 - gamma) / (1.0 - gamma))
}

/// Weak-form integrals for `f = u^gamma / gamma` (`log u` when `gamma = 0`), by
/// node sums in space and the trapezoid rule over saved snapshots.
///
/// `gamma f` is evaluated as `u^gamma`, which stays finite at `gamma = 0`.
pub fn weak_form_terms(
    grid: &GridSolution,
    gamma: f64,
    phi: &BumpFunction,
) -> Result<WeakFormTerms> {
    let p = exponent_from_gamma(gamma)?;
    phi.check_support(grid)?;
    let (d, h) = (grid.dim(), grid.dx());
    let volume = grid.cell_volume();
    let times = grid.times();
    let transform = |u: f64| {
        if gamma == 0.0 {
            u.ln()
        } else {
            u.powf(gamma) / gamma
        }
    };
    let nodes: Vec<usize> = (0..grid.node_count())
        .filter(|&i| {
            grid.position(i)
                .iter()
                .zip(&phi.center)
                .all(|(x, c)| (x - c).abs() < phi.radius)
        })
        .collect();
    let mut terms = WeakFormTerms {
        time: 0.0,
        flux: 0.0,
        source: 0.0,
    };
    for k in 0..times.len() {
        let t = times[k];
        if (t - phi.t_center).abs() >= phi.t_radius {
            continue;
        }
        let w = 0.5 * (times[(k + 1).min(times.len() - 1)] - times[k.saturating_sub(1)]);
        let u = grid.snapshot(k);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for &i in &nodes {
            let (val, grad_phi, phi_t) = phi.eval(&grid.position(i), t);
            if val == 0.0 && phi_t == 0.0 {
                continue;
            }
            let mut grad_f = Vec::with_capacity(d);
            for ax in 0..d {
                let s = grid.stride(ax);
                let (lo, hi) = (u[i - s], u[i + s]);
                if !(lo > 0.0 && hi > 0.0 && u[i] > 0.0) {
                    return Err(Error::Domain(format!(
                        "u must be positive on the test-function support, found 0 near node {i} at t = {t}"
                    )));
                }
                grad_f.push((transform(hi) - transform(lo)) / (2.0 * h));
            }
            let g2: f64 = grad_f.iter().map(|g| g * g).sum();
            let g = g2.sqrt();
            let gamma_f = if gamma == 0.0 { 1.0 } else { u[i].powf(gamma) };
            let dot: f64 = grad_f.iter().zip(&grad_phi).map(|(x, y)| x * y).sum();
            let coef = if g2 == 0.0 { 0.0 } else { g.powf(p - 2.0) };
            a += transform(u[i]) * phi_t;
            b -= gamma_f * coef * dot;
            c += (1.0 - gamma) * g.powf(p) * val;
        }
        terms.time += w * a * volume;
        terms.flux += w * b * volume;
        terms.source += w * c * volume;
    }
    Ok(terms)
}

/// `max |time + flux + source|` over the test set.
pub fn weak_form_residual(grid: &GridSolution, gamma: f64, tests: &[BumpFunction]) -> Result<f64> {
    tests
        .iter()
        .map(|phi| weak_form_terms(grid, gamma, phi).map(|t| t.sum().abs()))
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
}

/// `max |sum| / (|time| + |flux| + |source|)` over the test set.
pub fn scaled_weak_form_residual(
    grid: &GridSolution,
    gamma: f64,
    tests: &[BumpFunction],
) -> Result<f64> {
    tests
        .iter()
        .map(|phi| {
            weak_form_terms(grid, gamma, phi).map(|t| {
                let s = t.scale();
                if s == 0.0 {
                    0.0
                } else {
                    t.sum().abs() / s
                }
            })
        })
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
}

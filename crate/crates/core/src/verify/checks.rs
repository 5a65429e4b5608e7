use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{AnalyticField, SamplePlan, Solution};
use super::report::{Inequality, Outcome, SampleRecord, VerificationReport};
use crate::bounds::{heat_as_bound, pdiff_bound, pme_bound, HarnackBound, PdiffParams, PmeParams};
use crate::error::{invalid, Error, Result};
use crate::pde::GridSolution;
use crate::point::{norm_sq, SpacetimePoint};

/// Nodal values, centered derivatives and the time derivative at one grid sample.
struct Probe<'a> {
    grid: &'a GridSolution,
    node: usize,
    k: usize,
}

impl Probe<'_> {
    fn field(&self) -> &[f64] {
        self.grid.snapshot(self.k)
    }

    fn u(&self) -> f64 {
        self.field()[self.node]
    }

    /// Values of `node +- stride` along every axis.
    fn neighbours(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let f = self.field();
        (0..self.grid.dim()).map(move |a| {
            let s = self.grid.stride(a);
            (f[self.node - s], f[self.node + s])
        })
    }

    fn grad_sq(&self) -> f64 {
        let h = self.grid.dx();
        self.neighbours()
            .map(|(m, p)| {
                let g = (p - m) / (2.0 * h);
                g * g
            })
            .sum()
    }

    fn ut(&self) -> f64 {
        let times = self.grid.times();
        let (a, b) = (
            self.grid.snapshot(self.k - 1),
            self.grid.snapshot(self.k + 1),
        );
        (b[self.node] - a[self.node]) / (times[self.k + 1] - times[self.k - 1])
    }

    /// Five-point (or 2d+1-point) Laplacian of `g(u)`.
    fn lap_of<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let h = self.grid.dx();
        let c = g(self.u());
        self.neighbours()
            .map(|(m, p)| (g(p) - 2.0 * c + g(m)) / (h * h))
            .sum()
    }

    /// Distance to the zero set of `f = g(u)` by linear extrapolation, `f / |grad f|`.
    fn front_distance<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let h = self.grid.dx();
        let grad: f64 = self
            .neighbours()
            .map(|(m, p)| {
                let d = (g(p) - g(m)) / (2.0 * h);
                d * d
            })
            .sum::<f64>()
            .sqrt();
        g(self.u()) / grad
    }

    fn stencil_positive(&self) -> bool {
        self.u() > 0.0 && self.neighbours().all(|(m, p)| m > 0.0 && p > 0.0)
    }

    fn point(&self) -> (Vec<f64>, f64) {
        (self.grid.position(self.node), self.grid.times()[self.k])
    }
}

/// Elapsed time since the plan's origin; `None` at or before it.
fn elapsed(plan: &SamplePlan, t: f64) -> Option<f64> {
    let e = t - plan.time_origin;
    (e > 0.0).then_some(e)
}

fn grid_tolerance(plan: &SamplePlan, grid: &GridSolution) -> (f64, f64) {
    let dt = grid
        .times()
        .windows(2)
        .fold(0.0f64, |m, w| m.max(w[1] - w[0]));
    let c = plan.tolerance_constant;
    (c * (grid.dx() * grid.dx() + dt), c)
}

fn record(x: Vec<f64>, t: f64, margin: f64) -> Outcome {
    Outcome::Margin(SampleRecord {
        x,
        t,
        x2: None,
        t2: None,
        margin,
        sharpness: None,
    })
}

/// Runs a single-point check over the plan's samples.
fn point_check<A, G>(
    inequality: Inequality,
    solution: Solution<'_>,
    plan: &SamplePlan,
    grid_radius: usize,
    analytic: A,
    on_grid: G,
) -> Result<VerificationReport>
where
    A: Fn(&dyn AnalyticField, &[f64], f64, f64) -> Result<Option<f64>> + Sync,
    G: Fn(&Probe<'_>, f64) -> Option<f64> + Sync,
{
    plan.validate(&solution)?;
    let mut rng = plan.rng();
    match solution {
        Solution::Analytic(field) => {
            let points = plan.analytic_points(field.dim(), &mut rng);
            let outcomes = points
                .into_par_iter()
                .map(|(x, t)| {
                    let Some(s) = elapsed(plan, t) else {
                        return Ok(Outcome::Excluded);
                    };
                    Ok(match analytic(field, &x, t, s)? {
                        Some(m) => record(x, t, m),
                        None => Outcome::Excluded,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(VerificationReport::reduce(
                inequality,
                outcomes,
                plan.analytic_tolerance,
                None,
            ))
        }
        Solution::Grid(grid) => {
            let samples = plan.grid_points(grid, grid_radius, &mut rng)?;
            let outcomes = samples
                .into_par_iter()
                .map(|(node, k)| {
                    let probe = Probe { grid, node, k };
                    let Some(s) = elapsed(plan, grid.times()[k]) else {
                        return Outcome::Excluded;
                    };
                    match on_grid(&probe, s) {
                        Some(m) => {
                            let (x, t) = probe.point();
                            record(x, t, m)
                        }
                        None => Outcome::Excluded,
                    }
                })
                .collect();
            let (tol, c) = grid_tolerance(plan, grid);
            Ok(VerificationReport::reduce(
                inequality,
                outcomes,
                tol,
                Some(c),
            ))
        }
    }
}

/// `d/(2t) - (|grad u|^2/u^2 - u_t/u) >= 0` for positive heat solutions.
pub fn li_yau_check<'a>(
    solution: impl Into<Solution<'a>>,
    plan: &SamplePlan,
) -> Result<VerificationReport> {
    let solution = solution.into();
    let d = solution.dim() as f64;
    point_check(
        Inequality::LiYau,
        solution,
        plan,
        1,
        |field, x, t, s| {
            let v = field.derivatives(x, t)?;
            if v.u <= 0.0 {
                return Ok(None);
            }
            Ok(Some(
                d / (2.0 * s) - (norm_sq(&v.grad) / (v.u * v.u) - v.ut / v.u),
            ))
        },
        |probe, t| {
            let u = probe.u();
            if u <= 0.0 {
                return None;
            }
            Some(d / (2.0 * t) - (probe.grad_sq() / (u * u) - probe.ut() / u))
        },
    )
}

/// `Delta f + k/t >= 0` with `f = (M/(M-1)) u^{M-1}` (`f = log u` at `M = 1`).
pub fn aronson_benilan_check<'a>(
    solution: impl Into<Solution<'a>>,
    m: f64,
    plan: &SamplePlan,
) -> Result<VerificationReport> {
    let solution = solution.into();
    let params = PmeParams::new(m, solution.dim())?;
    let k = params.k();
    let c = m / (m - 1.0);
    point_check(
        Inequality::AronsonBenilan,
        solution,
        plan,
        1,
        |field, x, t, s| {
            let v = field.derivatives(x, t)?;
            if v.u <= 0.0 {
                return Ok(None);
            }
            let g2 = norm_sq(&v.grad);
            let lap_f = if m == 1.0 {
                v.lap / v.u - g2 / (v.u * v.u)
            } else if let Some(exact) = field.pressure_laplacian(m, x, t) {
                exact?
            } else {
                c * (m - 1.0) * (v.u.powf(m - 2.0) * v.lap + (m - 2.0) * v.u.powf(m - 3.0) * g2)
            };
            Ok(Some(lap_f + k / s))
        },
        |probe, t| {
            // stencils near the free boundary are skipped like those at the box edge
            if !probe.stencil_positive() {
                return None;
            }
            if m > 1.0
                && probe.front_distance(|u| c * u.powf(m - 1.0))
                    < plan.front_band.max(2.0 * probe.grid.dx())
            {
                return None;
            }
            let lap_f = if m == 1.0 {
                probe.lap_of(f64::ln)
            } else {
                probe.lap_of(|u| c * u.powf(m - 1.0))
            };
            Some(lap_f + k / t)
        },
    )
}

/// `div(|grad f|^{p-2} grad f) + K/t >= 0` with `f = u^gamma / gamma` (`log u` at `p = 2`).
///
/// Analytic solutions are supported at `p = 2` only; grids use the
/// staggered-face flux.
pub fn esteban_vazquez_check<'a>(
    solution: impl Into<Solution<'a>>,
    p: f64,
    k: Option<f64>,
    plan: &SamplePlan,
) -> Result<VerificationReport> {
    let solution = solution.into();
    let params = PdiffParams::new(p, solution.dim(), k)?;
    let (big_k, gamma) = (params.k(), params.gamma());
    if p != 2.0 && matches!(solution, Solution::Analytic(_)) {
        return Err(Error::Unsupported(
            "analytic p-divergence needs second derivatives; use a grid solution for p != 2".into(),
        ));
    }
    let transform = move |u: f64| {
        if gamma == 0.0 {
            u.ln()
        } else {
            u.powf(gamma) / gamma
        }
    };
    point_check(
        Inequality::EstebanVazquez,
        solution,
        plan,
        1,
        |field, x, t, s| {
            let v = field.derivatives(x, t)?;
            if v.u <= 0.0 {
                return Ok(None);
            }
            Ok(Some(
                v.lap / v.u - norm_sq(&v.grad) / (v.u * v.u) + big_k / s,
            ))
        },
        |probe, t| {
            if probe.u() <= 0.0 || (gamma <= 0.0 && !face_stencil_positive(probe)) {
                return None;
            }
            Some(p_divergence(probe, p, &transform) + big_k / t)
        },
    )
}

fn face_stencil_positive(probe: &Probe<'_>) -> bool {
    let (grid, f) = (probe.grid, probe.field());
    let d = grid.dim();
    (0..d).all(|a| {
        let s = grid.stride(a);
        [probe.node - s, probe.node, probe.node + s]
            .iter()
            .all(|&j| {
                f[j] > 0.0
                    && (0..d).filter(|&b| b != a).all(|b| {
                        let sb = grid.stride(b);
                        f[j - sb] > 0.0 && f[j + sb] > 0.0
                    })
            })
    })
}

/// Staggered-face `div(|grad f|^{p-2} grad f)` at an interior node.
fn p_divergence<T: Fn(f64) -> f64>(probe: &Probe<'_>, p: f64, transform: &T) -> f64 {
    let (grid, u) = (probe.grid, probe.field());
    let (d, h) = (grid.dim(), grid.dx());
    let f = |j: usize| transform(u[j]);
    // centered derivative of f along b at a node that is interior along b
    let centered = |j: usize, b: usize| {
        let s = grid.stride(b);
        (f(j + s) - f(j - s)) / (2.0 * h)
    };
    let face_flux = |lo: usize, hi: usize, a: usize| {
        let g = (f(hi) - f(lo)) / h;
        if p == 2.0 {
            return g;
        }
        let mut g2 = g * g;
        for b in (0..d).filter(|&b| b != a) {
            let tb = 0.5 * (centered(lo, b) + centered(hi, b));
            g2 += tb * tb;
        }
        if g2 == 0.0 {
            0.0
        } else {
            g2.powf(0.5 * (p - 2.0)) * g
        }
    };
    (0..d)
        .map(|a| {
            let s = grid.stride(a);
            let i = probe.node;
            (face_flux(i, i + s, a) - face_flux(i - s, i, a)) / h
        })
        .sum()
}

/// `u_t <= -u/((p-2) t)`; carries no Harnack conclusion.
pub fn benilan_crandall_check<'a>(
    solution: impl Into<Solution<'a>>,
    p: f64,
    plan: &SamplePlan,
) -> Result<VerificationReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("must exceed 1, got {p}")));
    }
    if p == 2.0 {
        return Err(invalid("p", "the coefficient 1/(p-2) is singular at p = 2"));
    }
    let mut report = point_check(
        Inequality::BenilanCrandall,
        solution.into(),
        plan,
        0,
        |field, x, t, s| {
            let v = field.derivatives(x, t)?;
            if v.u <= 0.0 {
                return Ok(None);
            }
            Ok(Some(-v.u / ((p - 2.0) * s) - v.ut))
        },
        |probe, t| {
            let u = probe.u();
            if u <= 0.0 {
                return None;
            }
            Some(-u / ((p - 2.0) * t) - probe.ut())
        },
    )?;
    report.harnack_conclusion = false;
    Ok(report)
}

/// Which Harnack inequality a pair check evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundProducer {
    Heat,
    Pme(PmeParams),
    Pdiff(PdiffParams),
}

impl BoundProducer {
    fn inequality(&self) -> Inequality {
        match self {
            Self::Heat => Inequality::HarnackHeat,
            Self::Pme(_) => Inequality::HarnackPme,
            Self::Pdiff(_) => Inequality::HarnackPdiff,
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Self::Heat => None,
            Self::Pme(p) => Some(p.dim()),
            Self::Pdiff(p) => Some(p.dim()),
        }
    }

    pub fn bound(&self, p1: &SpacetimePoint, p2: &SpacetimePoint, u1: f64) -> Result<HarnackBound> {
        match self {
            Self::Heat => heat_as_bound(p1.dim(), p1, p2, u1),
            Self::Pme(params) => pme_bound(params, p1, p2, u1),
            Self::Pdiff(params) => pdiff_bound(params, p1, p2, u1),
        }
    }
}

fn pair_outcome(
    plan: &SamplePlan,
    producer: &BoundProducer,
    (x1, t1): (Vec<f64>, f64),
    (x2, t2): (Vec<f64>, f64),
    u1: f64,
    u2: f64,
) -> Result<Outcome> {
    let (Some(s1), Some(s2)) = (elapsed(plan, t1), elapsed(plan, t2)) else {
        return Ok(Outcome::Excluded);
    };
    if !(u1 > 0.0) {
        return Ok(Outcome::Excluded);
    }
    let p1 = SpacetimePoint::new(x1, s1)?;
    let p2 = SpacetimePoint::new(x2, s2)?;
    let bound = producer.bound(&p1, &p2, u1)?;
    if !bound.parenthesis_nonneg {
        return Ok(Outcome::Flagged);
    }
    Ok(Outcome::Margin(SampleRecord {
        x: p1.x().to_vec(),
        t: t1,
        x2: Some(p2.x().to_vec()),
        t2: Some(t2),
        margin: bound.margin(u2),
        sharpness: Some(bound.sharpness(u2)),
    }))
}

/// Two-point Harnack inequality on admissible pairs; margin is taken in the bound's power.
pub fn harnack_check<'a>(
    solution: impl Into<Solution<'a>>,
    producer: &BoundProducer,
    plan: &SamplePlan,
) -> Result<VerificationReport> {
    let solution = solution.into();
    plan.validate(&solution)?;
    if let Some(d) = producer.dim() {
        if d != solution.dim() {
            return Err(Error::Shape(format!(
                "bound for d = {d} applied to a {}-d solution",
                solution.dim()
            )));
        }
    }
    let mut rng = plan.rng();
    let inequality = producer.inequality();
    match solution {
        Solution::Analytic(field) => {
            let pairs = plan.analytic_pairs(field.dim(), &mut rng);
            let outcomes = pairs
                .into_par_iter()
                .map(|[a, b]| {
                    let u1 = field.derivatives(&a.0, a.1)?.u;
                    let u2 = field.derivatives(&b.0, b.1)?.u;
                    pair_outcome(plan, producer, a, b, u1, u2)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(VerificationReport::reduce(
                inequality,
                outcomes,
                plan.analytic_tolerance,
                None,
            ))
        }
        Solution::Grid(grid) => {
            let pairs = plan.grid_pairs(grid, &mut rng)?;
            let outcomes = pairs
                .into_par_iter()
                .map(|[(n1, k1), (n2, k2)]| {
                    let a = (grid.position(n1), grid.times()[k1]);
                    let b = (grid.position(n2), grid.times()[k2]);
                    pair_outcome(
                        plan,
                        producer,
                        a,
                        b,
                        grid.snapshot(k1)[n1],
                        grid.snapshot(k2)[n2],
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let (tol, c) = grid_tolerance(plan, grid);
            Ok(VerificationReport::reduce(
                inequality,
                outcomes,
                tol,
                Some(c),
            ))
        }
    }
}

/// Grid-tolerance constant that a two-level refinement requires.
///
/// Each level contributes `max(0, -worst_margin) / (dx^2 + dt)`; the result
/// is the largest of them, so both levels pass at that constant.
pub fn calibrate_tolerance_constant(levels: &[(f64, f64, f64)]) -> f64 {
    levels
        .iter()
        .map(|&(worst, dx, dt)| (-worst).max(0.0) / (dx * dx + dt))
        .fold(0.0, f64::max)
}

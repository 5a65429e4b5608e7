use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::ExactSolution;
use super::grid::{axis_nodes, Equation, GridSolution, StepRecord};
use crate::bounds::PmeParams;
use crate::error::{invalid, Error, Result};

/// Grids with fewer nodes are stepped sequentially.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Initial field at `t_start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Exact {
        solution: ExactSolution,
    },
    Constant {
        value: f64,
    },
    /// `offset + slope . x`.
    Linear {
        slope: Vec<f64>,
        offset: f64,
    },
    /// Node values in flat order (last axis fastest).
    Field {
        values: Vec<f64>,
    },
}

/// Boundary treatment on the faces of `[-L, L]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Dirichlet values from the exact initial solution at every step.
    Exact,
    /// `u = 0` on the boundary.
    #[default]
    Homogeneous,
    /// Boundary nodes keep their initial values.
    Frozen,
    /// Zero flux through the boundary.
    Neumann,
}

fn default_t_start() -> f64 {
    1.0
}
fn default_cfl() -> f64 {
    0.5
}
fn default_epsilon() -> f64 {
    1e-8
}
fn default_save_every() -> usize {
    1
}
fn default_max_steps() -> usize {
    20_000_000
}

/// Explicit finite-difference run on a truncated box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dim: usize,
    /// Half-width `L`; defaults to `6 sqrt(t_end)`.
    #[serde(default)]
    pub half_width: Option<f64>,
    pub dx: f64,
    #[serde(default = "default_t_start")]
    pub t_start: f64,
    pub t_end: f64,
    /// Safety factor in `(0, 1)` applied to the stability limit.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub boundary: BoundaryCondition,
    /// Regularization of `|grad u|^{p-2}` for p-diffusion.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub initial: InitialData,
    /// Keep every `save_every`-th step (the last step is always kept).
    #[serde(default = "default_save_every")]
    pub save_every: usize,
    /// Fixed step; rejected if it exceeds the stability limit at any step.
    #[serde(default)]
    pub fixed_dt: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

impl SolverConfig {
    /// Defaults for everything but the data, the spacing and the final time.
    pub fn new(dim: usize, initial: InitialData, dx: f64, t_end: f64) -> Self {
        Self {
            dim,
            half_width: None,
            dx,
            t_start: default_t_start(),
            t_end,
            cfl: default_cfl(),
            boundary: BoundaryCondition::default(),
            epsilon: default_epsilon(),
            initial,
            save_every: default_save_every(),
            fixed_dt: None,
            max_steps: default_max_steps(),
        }
    }

    /// Heat-kernel data in `d` dimensions with exact Dirichlet data.
    pub fn heat_kernel(dim: usize, dx: f64, t_end: f64) -> Self {
        let mut cfg = Self::new(
            dim,
            InitialData::Exact {
                solution: ExactSolution::heat_kernel(dim),
            },
            dx,
            t_end,
        );
        cfg.boundary = BoundaryCondition::Exact;
        cfg
    }

    pub fn effective_half_width(&self) -> f64 {
        self.half_width.unwrap_or(6.0 * self.t_end.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Configuration(m));
        if self.dim == 0 {
            return bad("dimension must be at least 1".into());
        }
        if !(self.t_start > 0.0 && self.t_start.is_finite()) {
            return bad(format!("t_start must be positive, got {}", self.t_start));
        }
        if !(self.t_end > self.t_start && self.t_end.is_finite()) {
            return bad(format!(
                "t_end = {} must exceed t_start = {}",
                self.t_end, self.t_start
            ));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("CFL factor must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return bad(format!("dx must be positive, got {}", self.dx));
        }
        let l = self.effective_half_width();
        if !(l > 0.0 && l.is_finite()) {
            return bad(format!("half-width must be positive, got {l}"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be nonnegative, got {}", self.epsilon));
        }
        if self.save_every == 0 {
            return bad("save_every must be at least 1".into());
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("fixed_dt must be positive, got {dt}"));
            }
        }
        match &self.initial {
            InitialData::Exact { solution } => {
                solution.validate()?;
                if solution.dim() != self.dim {
                    return bad(format!(
                        "exact data of dimension {} for a {}-d grid",
                        solution.dim(),
                        self.dim
                    ));
                }
            }
            InitialData::Constant { value } if !(*value >= 0.0 && value.is_finite()) => {
                return bad(format!("constant data must be nonnegative, got {value}"));
            }
            InitialData::Linear { slope, offset }
                if slope.len() != self.dim
                    || slope.iter().chain([offset]).any(|v| !v.is_finite()) =>
            {
                return bad(format!("linear data needs {} finite slopes", self.dim));
            }
            _ => {}
        }
        if self.boundary == BoundaryCondition::Exact
            && !matches!(self.initial, InitialData::Exact { .. })
        {
            return bad("exact boundary data requires an exact initial solution".into());
        }
        Ok(())
    }
}

/// Explicit scheme for `u_t = Delta u`.
pub fn solve_heat(config: &SolverConfig) -> Result<GridSolution> {
    run(Equation::Heat, config)
}

/// Explicit scheme for `u_t = Delta u^M`, stepping `u` with `Delta` applied to `u^M`.
pub fn solve_pme(m: f64, config: &SolverConfig) -> Result<GridSolution> {
    PmeParams::new(m, config.dim)?;
    run(Equation::Pme { m }, config)
}

/// Explicit scheme for `u_t = div((|grad u|^2 + eps^2)^{(p-2)/2} grad u)`.
pub fn solve_pdiff(p: f64, config: &SolverConfig) -> Result<GridSolution> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("must exceed 1, got {p}")));
    }
    if p < 2.0 && config.epsilon == 0.0 {
        return Err(Error::Configuration(
            "p < 2 needs a positive regularization epsilon".into(),
        ));
    }
    run(
        Equation::Pdiff {
            p,
            epsilon: config.epsilon,
        },
        config,
    )
}

/// Index arithmetic shared by the stepping loops.
struct Layout {
    dim: usize,
    n: usize,
    strides: Vec<usize>,
}

impl Layout {
    fn coord(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.n
    }

    fn on_boundary(&self, flat: usize) -> bool {
        (0..self.dim).any(|a| {
            let c = self.coord(flat, a);
            c == 0 || c == self.n - 1
        })
    }

    /// Derivative along `axis` at a node: centered inside, one-sided at the ends.
    fn node_derivative(&self, u: &[f64], flat: usize, axis: usize, dx: f64) -> f64 {
        let (c, s) = (self.coord(flat, axis), self.strides[axis]);
        if c == 0 {
            (u[flat + s] - u[flat]) / dx
        } else if c == self.n - 1 {
            (u[flat] - u[flat - s]) / dx
        } else {
            (u[flat + s] - u[flat - s]) / (2.0 * dx)
        }
    }
}

enum Flux {
    Linear,
    Power { m: f64 },
    PLaplace { half_exp: f64, eps2: f64 },
}

fn run(equation: Equation, config: &SolverConfig) -> Result<GridSolution> {
    config.validate()?;
    let (dim, dx) = (config.dim, config.dx);
    let n = axis_nodes(config.effective_half_width(), dx)?;
    let shell = GridSolution::assemble(equation, dim, n, dx, vec![], vec![], vec![], None, None);
    let count = shell.node_count();
    let layout = Layout {
        dim,
        n,
        strides: (0..dim).map(|a| shell.stride(a)).collect(),
    };

    let exact = match &config.initial {
        InitialData::Exact { solution } => Some(solution.clone()),
        _ => None,
    };
    let mut u: Vec<f64> = match &config.initial {
        InitialData::Exact { solution } => (0..count)
            .map(|i| solution.value(&shell.position(i), config.t_start))
            .collect::<Result<_>>()?,
        InitialData::Constant { value } => vec![*value; count],
        InitialData::Linear { slope, offset } => (0..count)
            .map(|i| {
                offset
                    + shell
                        .position(i)
                        .iter()
                        .zip(slope)
                        .map(|(x, s)| x * s)
                        .sum::<f64>()
            })
            .collect(),
        InitialData::Field { values } => {
            if values.len() != count {
                return Err(Error::Configuration(format!(
                    "initial field has {} values, the grid has {count} nodes",
                    values.len()
                )));
            }
            values.clone()
        }
    };
    if u.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Domain(
            "initial data must be finite and nonnegative".into(),
        ));
    }

    let dirichlet = config.boundary != BoundaryCondition::Neumann;
    let boundary_nodes: Vec<usize> = (0..count).filter(|&i| layout.on_boundary(i)).collect();
    let boundary_positions: Vec<Vec<f64>> = match config.boundary {
        BoundaryCondition::Exact => boundary_nodes.iter().map(|&i| shell.position(i)).collect(),
        _ => vec![],
    };
    let frozen: Vec<f64> = boundary_nodes.iter().map(|&i| u[i]).collect();
    let apply_boundary = |field: &mut [f64], t: f64| -> Result<()> {
        match config.boundary {
            BoundaryCondition::Exact => {
                let sol = exact.as_ref().expect("validated");
                for (&i, x) in boundary_nodes.iter().zip(&boundary_positions) {
                    field[i] = sol.value(x, t)?;
                }
            }
            BoundaryCondition::Homogeneous => boundary_nodes.iter().for_each(|&i| field[i] = 0.0),
            BoundaryCondition::Frozen => boundary_nodes
                .iter()
                .zip(&frozen)
                .for_each(|(&i, &v)| field[i] = v),
            BoundaryCondition::Neumann => {}
        }
        Ok(())
    };
    apply_boundary(&mut u, config.t_start)?;

    let flux_kind = match equation {
        Equation::Pme { m } if m != 1.0 => Flux::Power { m },
        Equation::Pdiff { p, epsilon } => Flux::PLaplace {
            half_exp: 0.5 * (p - 2.0),
            eps2: epsilon * epsilon,
        },
        _ => Flux::Linear,
    };
    let base_dt = config.cfl * dx * dx;
    let two_d = 2.0 * dim as f64;
    let volume = shell.cell_volume();

    let mut times = vec![config.t_start];
    let mut fields = vec![u.clone()];
    let mut steps = Vec::new();
    let mut t = config.t_start;
    let mut phi = vec![0.0; count];
    let mut faces: Vec<Vec<f64>> = vec![vec![0.0; count]; dim];
    let mut next = vec![0.0; count];

    while t < config.t_end {
        if steps.len() >= config.max_steps {
            return Err(Error::NonConvergence(format!(
                "reached the step budget of {} at t = {t}",
                config.max_steps
            )));
        }
        // face fluxes F_{i+1/2} along each axis and the stability scale
        let scale = match flux_kind {
            Flux::Linear => {
                for (a, face) in faces.iter_mut().enumerate() {
                    let s = layout.strides[a];
                    fill(face, |i| {
                        if layout.coord(i, a) + 1 < n {
                            (u[i + s] - u[i]) / dx
                        } else {
                            0.0
                        }
                    });
                }
                1.0
            }
            Flux::Power { m } => {
                fill(&mut phi, |i| u[i].powf(m));
                for (a, face) in faces.iter_mut().enumerate() {
                    let s = layout.strides[a];
                    fill(face, |i| {
                        if layout.coord(i, a) + 1 < n {
                            (phi[i + s] - phi[i]) / dx
                        } else {
                            0.0
                        }
                    });
                }
                pme_scale(&u, &phi, m, &layout)
            }
            Flux::PLaplace { half_exp, eps2 } => {
                let mut max_coef = 0.0f64;
                for a in 0..dim {
                    let s = layout.strides[a];
                    let coefs: Vec<(f64, f64)> = map(count, |i| {
                        if layout.coord(i, a) + 1 >= n {
                            return (0.0, 0.0);
                        }
                        let g = (u[i + s] - u[i]) / dx;
                        let mut g2 = g * g;
                        for b in (0..dim).filter(|&b| b != a) {
                            let tb = 0.5
                                * (layout.node_derivative(&u, i, b, dx)
                                    + layout.node_derivative(&u, i + s, b, dx));
                            g2 += tb * tb;
                        }
                        let coef = (g2 + eps2).powf(half_exp);
                        (coef * g, coef)
                    });
                    for (f, (flux, coef)) in faces[a].iter_mut().zip(coefs) {
                        *f = flux;
                        max_coef = max_coef.max(coef);
                    }
                }
                (2.0 * half_exp + 1.0).max(1.0) * max_coef
            }
        };
        if !scale.is_finite() {
            return Err(Error::NonConvergence(format!(
                "stability limit blew up at t = {t}"
            )));
        }
        let limit = base_dt / (two_d * scale);
        let remaining = config.t_end - t;
        let dt = match config.fixed_dt {
            Some(fixed) => {
                if fixed > limit * (1.0 + 1e-12) {
                    return Err(Error::Configuration(format!(
                        "fixed dt = {fixed} exceeds the stability limit {limit} at t = {t}"
                    )));
                }
                fixed.min(remaining)
            }
            None => limit.min(remaining),
        };
        let t_new = if dt >= remaining {
            config.t_end
        } else {
            t + dt
        };

        fill(&mut next, |i| {
            if dirichlet && layout.on_boundary(i) {
                return u[i];
            }
            let mut div = 0.0;
            for (a, face) in faces.iter().enumerate() {
                let (c, s) = (layout.coord(i, a), layout.strides[a]);
                let plus = if c + 1 < n { face[i] } else { 0.0 };
                let minus = if c > 0 { face[i - s] } else { 0.0 };
                div += plus - minus;
            }
            u[i] + dt * div / dx
        });
        std::mem::swap(&mut u, &mut next);
        apply_boundary(&mut u, t_new)?;

        let mut clamped = 0.0;
        for v in u.iter_mut() {
            if *v < 0.0 {
                clamped -= *v;
                *v = 0.0;
            } else if !v.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "non-finite value at t = {t_new}"
                )));
            }
        }
        t = t_new;
        steps.push(StepRecord {
            t,
            dt,
            mass: u.iter().sum::<f64>() * volume,
            clamped: clamped * volume,
        });
        if steps.len() % config.save_every == 0 || t >= config.t_end {
            times.push(t);
            fields.push(u.clone());
        }
    }

    Ok(GridSolution::assemble(
        equation,
        dim,
        n,
        dx,
        times,
        fields,
        steps,
        exact,
        Some(config.clone()),
    ))
}

/// `max M u^{M-1}` for `M >= 1`; the largest secant slope of `u^M` across faces for `M < 1`.
fn pme_scale(u: &[f64], phi: &[f64], m: f64, layout: &Layout) -> f64 {
    if m >= 1.0 {
        return u.iter().fold(0.0f64, |acc, v| acc.max(m * v.powf(m - 1.0)));
    }
    let mut scale = 0.0f64;
    for i in 0..u.len() {
        for a in 0..layout.dim {
            if layout.coord(i, a) + 1 < layout.n {
                let j = i + layout.strides[a];
                let slope = if u[j] != u[i] {
                    (phi[j] - phi[i]) / (u[j] - u[i])
                } else if u[i] > 0.0 {
                    m * u[i].powf(m - 1.0)
                } else {
                    0.0
                };
                scale = scale.max(slope);
            }
        }
    }
    scale
}

fn fill<F: Fn(usize) -> f64 + Sync>(out: &mut [f64], f: F) {
    if out.len() >= PARALLEL_THRESHOLD {
        out.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
    } else {
        out.iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
    }
}

fn map<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    if count >= PARALLEL_THRESHOLD {
        (0..count).into_par_iter().map(f).collect()
    } else {
        (0..count).map(f).collect()
    }
}

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::svg::{Chart, Series};
use super::{opt, overlay, Context, Status};
use crate::error::{Error, Result};
use crate::pde::{
    solve_heat, solve_pdiff, solve_pme, BoundaryCondition, ExactSolution, GridSolution,
    InitialData, SolverConfig,
};

/// Columns of `solve.csv`.
pub const SOLVE_CSV_HEADER: [&str; 11] = [
    "equation",
    "d",
    "dx",
    "nodes",
    "snapshots",
    "steps",
    "t_end",
    "initial_mass",
    "final_mass",
    "l1_error",
    "max_relative_clamp",
];

/// Columns of `refine.csv`; `observed_order` is empty on the coarsest level.
pub const REFINE_CSV_HEADER: [&str; 6] = [
    "level",
    "dx",
    "nodes",
    "steps",
    "l1_error",
    "observed_order",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveEquation {
    Heat,
    Pme,
    Pdiff,
}

impl SolveEquation {
    fn name(self) -> &'static str {
        match self {
            Self::Heat => "heat",
            Self::Pme => "pme",
            Self::Pdiff => "pdiff",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryArg {
    Exact,
    Homogeneous,
    Frozen,
    Neumann,
}

impl From<BoundaryArg> for BoundaryCondition {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Exact => Self::Exact,
            BoundaryArg::Homogeneous => Self::Homogeneous,
            BoundaryArg::Frozen => Self::Frozen,
            BoundaryArg::Neumann => Self::Neumann,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveCmd {
    #[arg(value_enum)]
    pub equation: SolveEquation,
    #[command(flatten)]
    pub params: SolveParams,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveParams {
    #[arg(long)]
    pub d: Option<usize>,
    /// Grid spacing (coarsest level of a refinement study).
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Half-width L of the box [-L, L]^d.
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Regularization of the p-Laplacian.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Barenblatt constant.
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub save_every: Option<usize>,
    #[arg(long)]
    pub fixed_dt: Option<f64>,
    /// Step budget; running out of it is reported as non-convergence.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Number of levels dx, dx/2, ... of a refinement study.
    #[arg(long)]
    pub refine: Option<usize>,
    /// Initial data (config file only); defaults to the exact solution of the equation.
    #[arg(skip)]
    pub initial: Option<InitialData>,
}

const COMMON: [&str; 11] = [
    "d",
    "dx",
    "t_start",
    "t_end",
    "half_width",
    "cfl",
    "boundary",
    "save_every",
    "fixed_dt",
    "max_steps",
    "refine",
];

fn allowed(eq: SolveEquation) -> Vec<&'static str> {
    let extra: &[&str] = match eq {
        SolveEquation::Heat => &["initial"],
        SolveEquation::Pme => &["M", "c0", "initial"],
        SolveEquation::Pdiff => &["p", "epsilon", "initial"],
    };
    COMMON.iter().chain(extra).copied().collect()
}

/// Solver configuration for one level, before the spacing is set.
pub fn solver_config(eq: SolveEquation, p: &SolveParams) -> Result<SolverConfig> {
    let d = p.d.unwrap_or(1);
    let t_end = p.t_end.unwrap_or(2.0);
    let (initial, boundary) = match eq {
        SolveEquation::Heat => (ExactSolution::heat_kernel(d), BoundaryArg::Exact),
        SolveEquation::Pme => (
            ExactSolution::Barenblatt {
                d,
                m: p.m.unwrap_or(2.0),
                c0: p.c0.unwrap_or(1.0),
            },
            BoundaryArg::Exact,
        ),
        SolveEquation::Pdiff => (ExactSolution::heat_kernel(d), BoundaryArg::Homogeneous),
    };
    let initial = p
        .initial
        .clone()
        .unwrap_or(InitialData::Exact { solution: initial });
    let mut cfg = SolverConfig::new(d, initial, p.dx.unwrap_or(0.1), t_end);
    cfg.boundary = p.boundary.unwrap_or(boundary).into();
    cfg.half_width = p.half_width;
    if let Some(v) = p.t_start {
        cfg.t_start = v;
    }
    if let Some(v) = p.cfl {
        cfg.cfl = v;
    }
    if let Some(v) = p.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = p.save_every {
        cfg.save_every = v;
    }
    cfg.fixed_dt = p.fixed_dt;
    if let Some(v) = p.max_steps {
        cfg.max_steps = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn solve(eq: SolveEquation, p: &SolveParams, cfg: &SolverConfig) -> Result<GridSolution> {
    match eq {
        SolveEquation::Heat => solve_heat(cfg),
        SolveEquation::Pme => solve_pme(p.m.unwrap_or(2.0), cfg),
        SolveEquation::Pdiff => solve_pdiff(p.p.unwrap_or(3.0), cfg),
    }
}

pub(super) fn run(cmd: &SolveCmd, block: Option<&SolveParams>, ctx: &Context) -> Result<Status> {
    let name = cmd.equation.name();
    let p = overlay(
        &cmd.params,
        block,
        &allowed(cmd.equation),
        &format!("solve {name}"),
    )?;
    let cfg = solver_config(cmd.equation, &p)?;
    match p.refine {
        None => single(cmd.equation, &p, &cfg, ctx),
        Some(0) => Err(Error::Configuration(
            "`refine` needs at least one level".into(),
        )),
        Some(levels) => refinement(cmd.equation, &p, &cfg, levels, ctx),
    }
}

fn single(eq: SolveEquation, p: &SolveParams, cfg: &SolverConfig, ctx: &Context) -> Result<Status> {
    let grid = solve(eq, p, cfg)?;
    let last = grid.snapshot_count() - 1;
    let l1 = grid.final_l1_error();
    println!(
        "{}: {} nodes, {} steps, final mass {} (initial {})",
        eq.name(),
        grid.node_count(),
        grid.steps().len(),
        grid.mass(last),
        grid.initial_mass()
    );
    if let Some(e) = l1 {
        println!("L1 error at t = {}: {e:e}", grid.times()[last]);
    }
    let row = vec![
        eq.name().to_string(),
        grid.dim().to_string(),
        crate::compact(grid.dx()),
        grid.node_count().to_string(),
        grid.snapshot_count().to_string(),
        grid.steps().len().to_string(),
        crate::compact(grid.times()[last]),
        crate::compact(grid.initial_mass()),
        crate::compact(grid.mass(last)),
        opt(l1),
        crate::compact(grid.max_relative_clamp()),
    ];
    ctx.out.csv("solve.csv", &SOLVE_CSV_HEADER, &[row])?;
    let (csv_path, json_path) = grid.export(&ctx.out.path("")?, "solution")?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    if grid.dim() == 1 {
        let profile = |k: usize| {
            (0..grid.node_count())
                .map(|i| (grid.coordinate(i), grid.snapshot(k)[i]))
                .collect()
        };
        ctx.out.plot(
            "profile.svg",
            &Chart::new("Solution profile", "x", "u")
                .with(Series::new(format!("t = {}", grid.times()[0]), profile(0)))
                .with(Series::new(
                    format!("t = {}", grid.times()[last]),
                    profile(last),
                )),
        );
    }
    Ok(Status::Clean)
}

fn refinement(
    eq: SolveEquation,
    p: &SolveParams,
    base: &SolverConfig,
    levels: usize,
    ctx: &Context,
) -> Result<Status> {
    let mut rows = Vec::with_capacity(levels);
    let mut curve = Vec::with_capacity(levels);
    let mut previous: Option<f64> = None;
    for level in 0..levels {
        let mut cfg = base.clone();
        cfg.dx = base.dx / f64::powi(2.0, level as i32);
        // Only the final field is needed.
        cfg.save_every = usize::MAX;
        let grid = solve(eq, p, &cfg)?;
        let err = grid.final_l1_error().ok_or_else(|| {
            Error::Configuration(
                "a refinement study needs initial data whose exact solution solves the equation"
                    .into(),
            )
        })?;
        let order = previous.map(|e| (e / err).log2());
        println!(
            "level {level}: dx = {}, L1 error = {err:e}{}",
            cfg.dx,
            order.map(|o| format!(", order {o:.3}")).unwrap_or_default()
        );
        rows.push(vec![
            level.to_string(),
            crate::compact(cfg.dx),
            grid.node_count().to_string(),
            grid.steps().len().to_string(),
            crate::compact(err),
            opt(order),
        ]);
        curve.push((cfg.dx, err));
        previous = Some(err);
    }
    let path = ctx.out.csv("refine.csv", &REFINE_CSV_HEADER, &rows)?;
    println!("wrote {}", path.display());
    ctx.out.plot(
        "refine.svg",
        &Chart::new("L1 error under refinement", "dx", "L1 error")
            .log_log()
            .with(Series::new(eq.name(), curve)),
    );
    Ok(Status::Clean)
}

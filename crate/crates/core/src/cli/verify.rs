use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::svg::{Chart, Series};
use super::{overlay, range_pair, Context, Status};
use crate::bounds::{PdiffParams, PmeParams};
use crate::error::{Error, Result};
use crate::pde::{
    solve_heat, solve_pdiff, solve_pme, BoundaryCondition, ExactSolution, GridSolution,
    InitialData, SolverConfig,
};
use crate::point::SpacetimePoint;
use crate::verify::{
    aronson_benilan_check, benilan_crandall_check, esteban_vazquez_check, harnack_check,
    li_yau_check, scaled_weak_form_residual, write_reports_csv, write_reports_json, BoundProducer,
    BumpFunction, SamplePlan, Solution, VerificationReport,
};

/// Columns of `weak.csv`.
pub const WEAK_CSV_HEADER: [&str; 6] = [
    "p",
    "gamma",
    "dx",
    "bumps",
    "scaled_residual",
    "max_residual",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyCheck {
    /// `Delta log u + d/(2t) >= 0` for the heat equation.
    Liyau,
    /// `Delta f + k/t >= 0` for the porous medium pressure.
    AronsonBenilan,
    /// p-diffusion gradient estimate.
    EstebanVazquez,
    /// `u_t <= -u/((p-2)t)` for fast p-diffusion.
    BenilanCrandall,
    /// Two-point Harnack inequality on admissible pairs.
    Harnack,
    /// Weak-form identity of the transformed p-diffusion equation.
    WeakForm,
}

impl VerifyCheck {
    fn name(self) -> &'static str {
        match self {
            Self::Liyau => "liyau",
            Self::AronsonBenilan => "aronson-benilan",
            Self::EstebanVazquez => "esteban-vazquez",
            Self::BenilanCrandall => "benilan-crandall",
            Self::Harnack => "harnack",
            Self::WeakForm => "weak-form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Oracle {
    /// Closed-form heat kernel.
    HeatKernel,
    /// Closed-form Barenblatt profile.
    Barenblatt,
    /// Finite-difference solution.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundArg {
    Heat,
    Pme,
    Pdiff,
}

#[derive(Debug, Args)]
pub struct VerifyCmd {
    #[arg(value_enum)]
    pub check: VerifyCheck,
    #[command(flatten)]
    pub params: VerifyParams,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    #[arg(long, value_enum)]
    pub oracle: Option<Oracle>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<f64>,
    /// Harnack bound to test.
    #[arg(long, value_enum)]
    pub bound: Option<BoundArg>,
    /// Single-point samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Two-point samples.
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x_range: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub t_range: Option<Vec<f64>>,
    #[arg(long)]
    pub dt_min: Option<f64>,
    #[arg(long)]
    pub max_pair_distance: Option<f64>,
    #[arg(long)]
    pub max_pair_gap: Option<f64>,
    #[arg(long)]
    pub time_origin: Option<f64>,
    #[arg(long)]
    pub front_band: Option<f64>,
    #[arg(long)]
    pub tolerance_constant: Option<f64>,
    #[arg(long)]
    pub analytic_tolerance: Option<f64>,
    /// Grid spacing of the grid oracle.
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub save_every: Option<usize>,
    /// Number of random test functions of the weak form.
    #[arg(long)]
    pub bumps: Option<usize>,
    /// Largest accepted scaled weak-form residual.
    #[arg(long)]
    pub max_residual: Option<f64>,
}

const SAMPLING: [&str; 11] = [
    "oracle",
    "d",
    "x_range",
    "t_range",
    "dt_min",
    "time_origin",
    "front_band",
    "tolerance_constant",
    "analytic_tolerance",
    "samples",
    "pairs",
];
const GRID: [&str; 4] = ["dx", "t_end", "half_width", "save_every"];

fn allowed(check: VerifyCheck) -> Vec<&'static str> {
    let extra: &[&str] = match check {
        VerifyCheck::Liyau => &[],
        VerifyCheck::AronsonBenilan => &["M", "c0"],
        VerifyCheck::EstebanVazquez => &["p", "K", "epsilon"],
        VerifyCheck::BenilanCrandall => &["p", "epsilon"],
        VerifyCheck::Harnack => &[
            "bound",
            "M",
            "c0",
            "p",
            "K",
            "epsilon",
            "max_pair_distance",
            "max_pair_gap",
        ],
        VerifyCheck::WeakForm => {
            return ["d", "p", "epsilon", "bumps", "max_residual"]
                .iter()
                .chain(&GRID)
                .copied()
                .collect();
        }
    };
    SAMPLING.iter().chain(&GRID).chain(extra).copied().collect()
}

/// Which equation a grid oracle solves.
#[derive(Debug, Clone, Copy, PartialEq)]
enum GridKind {
    Heat,
    Barenblatt { m: f64, c0: f64 },
    Pdiff { p: f64 },
}

fn build_grid(kind: GridKind, d: usize, p: &VerifyParams) -> Result<GridSolution> {
    let dx = p.dx.unwrap_or(0.05);
    let t_end = p.t_end.unwrap_or(2.0);
    let mut cfg = SolverConfig::heat_kernel(d, dx, t_end);
    cfg.half_width = p.half_width;
    if let Some(s) = p.save_every {
        cfg.save_every = s;
    }
    match kind {
        GridKind::Heat => solve_heat(&cfg),
        GridKind::Barenblatt { m, c0 } => {
            cfg.initial = InitialData::Exact {
                solution: ExactSolution::Barenblatt { d, m, c0 },
            };
            cfg.half_width = Some(p.half_width.unwrap_or(8.0));
            solve_pme(m, &cfg)
        }
        GridKind::Pdiff { p: exponent } => {
            cfg.boundary = BoundaryCondition::Homogeneous;
            cfg.epsilon = p
                .epsilon
                .unwrap_or(if exponent < 2.0 { 1e-3 } else { 1e-8 });
            if exponent < 2.0 && p.half_width.is_none() {
                cfg.half_width = Some(4.0);
            }
            solve_pdiff(exponent, &cfg)
        }
    }
}

enum Oracled {
    Exact(ExactSolution),
    Grid(GridSolution),
}

impl Oracled {
    fn solution(&self) -> Solution<'_> {
        match self {
            Self::Exact(e) => Solution::from(e),
            Self::Grid(g) => Solution::from(g),
        }
    }
}

/// Resolved oracle and sampling plan for a point or pair check.
fn prepare(
    p: &VerifyParams,
    default_oracle: Oracle,
    kind: GridKind,
    seed: u64,
) -> Result<(Oracled, SamplePlan)> {
    let d = p.d.unwrap_or(1);
    let oracle = p.oracle.unwrap_or(default_oracle);
    let points = p.samples.unwrap_or(1000);
    let pairs = p.pairs.unwrap_or(10_000);
    let (solution, mut plan) = match oracle {
        Oracle::HeatKernel | Oracle::Barenblatt => {
            let exact = match (oracle, kind) {
                (Oracle::HeatKernel, GridKind::Heat) => ExactSolution::heat_kernel(d),
                (Oracle::Barenblatt, GridKind::Barenblatt { m, c0 }) => {
                    ExactSolution::Barenblatt { d, m, c0 }
                }
                (Oracle::HeatKernel, GridKind::Pdiff { p: 2.0 }) => ExactSolution::heat_kernel(d),
                _ => {
                    return Err(Error::Configuration(format!(
                        "the {} oracle does not solve the equation of this check",
                        if oracle == Oracle::HeatKernel {
                            "heat-kernel"
                        } else {
                            "barenblatt"
                        }
                    )))
                }
            };
            let plan = SamplePlan::analytic(
                points,
                pairs,
                seed,
                range_pair(&p.x_range, "x_range", [-5.0, 5.0])?,
                range_pair(&p.t_range, "t_range", [0.1, 10.0])?,
            );
            (Oracled::Exact(exact), plan)
        }
        Oracle::Grid => {
            let grid = build_grid(kind, d, p)?;
            let mut plan = SamplePlan::grid(points, pairs, seed);
            // Heat-kernel data with exact boundary values are accurate only away from the faces.
            let core = if kind == GridKind::Heat {
                [-3.0, 3.0]
            } else {
                plan.x_range
            };
            plan.x_range = range_pair(&p.x_range, "x_range", core)?;
            plan.t_range = range_pair(&p.t_range, "t_range", plan.t_range)?;
            if matches!(kind, GridKind::Pdiff { .. }) {
                // Gaussian data at t_start is not a self-similar solution from t = 0.
                plan.time_origin = grid.times()[0];
            }
            (Oracled::Grid(grid), plan)
        }
    };
    if let Some(v) = p.dt_min {
        plan.dt_min = v;
    }
    plan.max_pair_distance = p.max_pair_distance;
    plan.max_pair_gap = p.max_pair_gap;
    if let Some(v) = p.time_origin {
        plan.time_origin = v;
    }
    if let Some(v) = p.front_band {
        plan.front_band = v;
    }
    if let Some(v) = p.tolerance_constant {
        plan.tolerance_constant = v;
    }
    if let Some(v) = p.analytic_tolerance {
        plan.analytic_tolerance = v;
    }
    Ok((solution, plan))
}

fn bound_kind(p: &VerifyParams) -> BoundArg {
    p.bound.unwrap_or(match p.oracle {
        Some(Oracle::Barenblatt) => BoundArg::Pme,
        _ => BoundArg::Heat,
    })
}

pub(super) fn run(cmd: &VerifyCmd, block: Option<&VerifyParams>, ctx: &Context) -> Result<Status> {
    let name = cmd.check.name();
    let p = overlay(
        &cmd.params,
        block,
        &allowed(cmd.check),
        &format!("verify {name}"),
    )?;
    let d = p.d.unwrap_or(1);
    let m = p.m.unwrap_or(2.0);
    let c0 = p.c0.unwrap_or(1.0);
    let report = match cmd.check {
        VerifyCheck::WeakForm => return weak_form(&p, ctx),
        VerifyCheck::Liyau => {
            let (sol, plan) = prepare(&p, Oracle::HeatKernel, GridKind::Heat, ctx.seed)?;
            li_yau_check(sol.solution(), &plan)?
        }
        VerifyCheck::AronsonBenilan => {
            let (sol, plan) = prepare(
                &p,
                Oracle::Barenblatt,
                GridKind::Barenblatt { m, c0 },
                ctx.seed,
            )?;
            aronson_benilan_check(sol.solution(), m, &plan)?
        }
        VerifyCheck::EstebanVazquez => {
            let exponent = p.p.unwrap_or(3.0);
            let default = if exponent == 2.0 {
                Oracle::HeatKernel
            } else {
                Oracle::Grid
            };
            let (sol, plan) = prepare(&p, default, GridKind::Pdiff { p: exponent }, ctx.seed)?;
            esteban_vazquez_check(sol.solution(), exponent, p.k, &plan)?
        }
        VerifyCheck::BenilanCrandall => {
            let exponent = p.p.unwrap_or(1.5);
            let (sol, plan) = prepare(&p, Oracle::Grid, GridKind::Pdiff { p: exponent }, ctx.seed)?;
            benilan_crandall_check(sol.solution(), exponent, &plan)?
        }
        VerifyCheck::Harnack => {
            let (producer, kind, default) = match bound_kind(&p) {
                BoundArg::Heat => (BoundProducer::Heat, GridKind::Heat, Oracle::HeatKernel),
                BoundArg::Pme => (
                    BoundProducer::Pme(PmeParams::new(m, d)?),
                    GridKind::Barenblatt { m, c0 },
                    Oracle::Barenblatt,
                ),
                BoundArg::Pdiff => {
                    let exponent = p.p.unwrap_or(3.0);
                    (
                        BoundProducer::Pdiff(PdiffParams::new(exponent, d, p.k)?),
                        GridKind::Pdiff { p: exponent },
                        Oracle::Grid,
                    )
                }
            };
            let (sol, plan) = prepare(&p, default, kind, ctx.seed)?;
            if let Oracled::Exact(exact) = &sol {
                plot_bound_curve(ctx, exact, &producer, &plan);
            }
            harnack_check(sol.solution(), &producer, &plan)?
        }
    };
    summarize(&report);
    let reports = [report];
    write_reports_csv(&ctx.out.path("reports.csv")?, &reports)?;
    write_reports_json(&ctx.out.path("reports.json")?, &reports)?;
    println!("wrote {}", ctx.out.path("reports.csv")?.display());
    Ok(Status::from_violations(!reports[0].passed()))
}

fn summarize(r: &VerificationReport) {
    println!(
        "{}: {} samples, {} violations, {} within tolerance {:e}, {} excluded, {} flagged",
        r.inequality, r.samples, r.violations, r.tolerated, r.tolerance, r.excluded, r.flagged
    );
    println!("worst margin: {:e}", r.worst_margin);
    if let Some(s) = r.sharpness {
        println!(
            "sharpness: min {} mean {} max {}",
            crate::compact(s.min),
            crate::compact(s.mean),
            crate::compact(s.max)
        );
    }
    if !r.harnack_conclusion {
        println!("note: this inequality yields no Harnack inequality");
    }
}

/// Bound and exact value at `(x2, t_hi)` from `(0, t_lo)` along the first axis.
fn plot_bound_curve(
    ctx: &Context,
    exact: &ExactSolution,
    producer: &BoundProducer,
    plan: &SamplePlan,
) {
    let d = exact.dim();
    let [lo, hi] = plan.x_range;
    let [t1, t2] = plan.t_range;
    let Ok(p1) = SpacetimePoint::new(vec![0.0; d], t1) else {
        return;
    };
    let Ok(u1) = exact.value(p1.x(), t1) else {
        return;
    };
    let (mut actual, mut bound) = (Vec::new(), Vec::new());
    for i in 0..=200 {
        let x = lo + (hi - lo) * i as f64 / 200.0;
        let mut x2 = vec![0.0; d];
        x2[0] = x;
        let Ok(p2) = SpacetimePoint::new(x2, t2) else {
            continue;
        };
        if let (Ok(u2), Ok(b)) = (exact.value(p2.x(), t2), producer.bound(&p1, &p2, u1)) {
            actual.push((x, u2));
            if let Some(r) = b.root {
                bound.push((x, r));
            }
        }
    }
    ctx.out.plot(
        "harnack.svg",
        &Chart::new(
            format!("Harnack bound from (0, {t1}) at t = {t2}"),
            "x2",
            "u",
        )
        .with(Series::new("u(x2, t2)", actual))
        .with(Series::new("bound", bound)),
    );
}

fn weak_form(p: &VerifyParams, ctx: &Context) -> Result<Status> {
    let d = p.d.unwrap_or(1);
    let exponent = p.p.unwrap_or(2.0);
    let gamma = (exponent - 2.0) / (exponent - 1.0);
    let mut q = p.clone();
    q.half_width = Some(p.half_width.unwrap_or(6.0));
    let kind = if exponent == 2.0 {
        GridKind::Heat
    } else {
        GridKind::Pdiff { p: exponent }
    };
    let grid = build_grid(kind, d, &q)?;
    let count = p.bumps.unwrap_or(20);
    let bumps = BumpFunction::random_set(&grid, count, ctx.seed);
    let residual = scaled_weak_form_residual(&grid, gamma, &bumps)?;
    let max = p.max_residual.unwrap_or(1e-2);
    println!(
        "scaled weak-form residual over {} bumps: {residual:e} (limit {max:e})",
        bumps.len()
    );
    let row = vec![
        crate::compact(exponent),
        crate::compact(gamma),
        crate::compact(grid.dx()),
        bumps.len().to_string(),
        crate::compact(residual),
        crate::compact(max),
    ];
    let path = ctx.out.csv("weak.csv", &WEAK_CSV_HEADER, &[row])?;
    println!("wrote {}", path.display());
    Ok(Status::from_violations(!(residual <= max)))
}

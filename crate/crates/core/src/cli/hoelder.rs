use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::svg::{Chart, Series};
use super::{overlay, range_pair, Context, Status};
use crate::error::{Error, Result};
use crate::moser::{
    chain_oscillations, empirical_holder_quotient, estimate_harnack_constant, holder_bound,
    iteration_delta, nested_cylinders, oscillation_inequality_check, sup_norm, AxisBox,
    HoelderParams, SpaceTimeBox, MIN_HARNACK_CONSTANT,
};
use crate::pde::{solve_heat, SolverConfig};

/// Columns of `hoelder.csv`.
pub const HOELDER_CSV_HEADER: [&str; 11] = [
    "c",
    "zeta",
    "nu",
    "d_qqp",
    "delta",
    "sup_norm",
    "holder_bound",
    "quotient",
    "cylinders",
    "oscillation_failures",
    "worst_ratio",
];

/// Columns of `cylinders.csv`; `x` is `;`-separated in several dimensions.
pub const CYLINDER_CSV_HEADER: [&str; 9] = [
    "x",
    "t",
    "radius",
    "harnack_estimate",
    "omega",
    "omega_plus",
    "zeta",
    "tolerance",
    "holds",
];

/// Columns of `chain.csv`: `omega_j` on `D_{R_j}`, `omega_plus_next` on `D+_{R_{j+1}}`.
pub const CHAIN_CSV_HEADER: [&str; 6] = [
    "j",
    "radius",
    "tau",
    "omega",
    "omega_plus_next",
    "certified",
];

#[derive(Debug, Args)]
pub struct HoelderCmd {
    #[command(flatten)]
    pub params: HoelderParamsBlock,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoelderParamsBlock {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub save_every: Option<usize>,
    /// Spatial interval of Q on every axis.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub q_x: Option<Vec<f64>>,
    /// Time interval (T1, T4) of Q.
    #[arg(long, value_delimiter = ',')]
    pub q_t: Option<Vec<f64>>,
    /// Spatial interval of Q' on every axis.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub qp_x: Option<Vec<f64>>,
    /// Time interval (T2, T3) of Q'.
    #[arg(long, value_delimiter = ',')]
    pub qp_t: Option<Vec<f64>>,
    /// Random cylinders used to estimate C and test the oscillation inequality.
    #[arg(long)]
    pub cylinders: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub r_range: Option<Vec<f64>>,
    /// Random pairs of the empirical Hölder quotient.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Harnack constant; estimated from the cylinders when absent.
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: Option<f64>,
    /// Length of a nested cylinder chain centered in Q'.
    #[arg(long)]
    pub chain_k: Option<usize>,
    /// Largest chain radius; defaults to d(Q, Q')/64.
    #[arg(long)]
    pub chain_delta: Option<f64>,
}

const ALLOWED: [&str; 14] = [
    "d",
    "dx",
    "t_end",
    "save_every",
    "q_x",
    "q_t",
    "qp_x",
    "qp_t",
    "cylinders",
    "r_range",
    "pairs",
    "C",
    "chain_k",
    "chain_delta",
];

struct Sampled {
    x: Vec<f64>,
    t: f64,
    radius: f64,
    estimate: f64,
}

pub(super) fn run(
    cmd: &HoelderCmd,
    block: Option<&HoelderParamsBlock>,
    ctx: &Context,
) -> Result<Status> {
    let p = overlay(&cmd.params, block, &ALLOWED, "hoelder")?;
    let d = p.d.unwrap_or(1);
    let t_end = p.t_end.unwrap_or(2.0);
    let q_x = range_pair(&p.q_x, "q_x", [-4.0, 4.0])?;
    let q_t = range_pair(&p.q_t, "q_t", [1.1, 1.9])?;
    let qp_x = range_pair(&p.qp_x, "qp_x", [-2.0, 2.0])?;
    let qp_t = range_pair(&p.qp_t, "qp_t", [1.3, 1.7])?;
    let [r_lo, r_hi] = range_pair(&p.r_range, "r_range", [0.1, 0.3])?;
    if !(0.0 < r_lo && r_lo <= r_hi) {
        return Err(Error::Configuration(format!(
            "r_range must satisfy 0 < lo <= hi, got {r_lo},{r_hi}"
        )));
    }
    let boxes = SpaceTimeBox::new(
        AxisBox::new(vec![q_x[0]; d], vec![q_x[1]; d], q_t)?,
        AxisBox::new(vec![qp_x[0]; d], vec![qp_x[1]; d], qp_t)?,
    )?;
    let fits = (q_x[1] - q_x[0] > 4.0 * r_hi) && (q_t[1] - q_t[0] > 2.0 * r_hi * r_hi);
    if !fits {
        return Err(Error::Configuration(
            "cylinders of the largest radius do not fit in Q".into(),
        ));
    }

    let mut cfg = SolverConfig::heat_kernel(d, p.dx.unwrap_or(0.02), t_end);
    cfg.save_every = p.save_every.unwrap_or(5);
    let grid = solve_heat(&cfg)?;
    println!(
        "heat grid: {} nodes, {} snapshots",
        grid.node_count(),
        grid.snapshot_count()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut sampled = Vec::new();
    for _ in 0..p.cylinders.unwrap_or(100) {
        let radius = if r_lo < r_hi {
            rng.gen_range(r_lo..r_hi)
        } else {
            r_lo
        };
        let x: Vec<f64> = (0..d)
            .map(|_| rng.gen_range(q_x[0] + 2.0 * radius..q_x[1] - 2.0 * radius))
            .collect();
        let t = rng.gen_range(q_t[0] + radius * radius..q_t[1] - radius * radius);
        let estimate = estimate_harnack_constant(&grid, &x, t, radius)?;
        sampled.push(Sampled {
            x,
            t,
            radius,
            estimate,
        });
    }
    let c = match p.c {
        Some(c) => c,
        None => sampled
            .iter()
            .map(|s| s.estimate)
            .fold(MIN_HARNACK_CONSTANT, f64::max),
    };
    let params = HoelderParams::new(c)?;
    println!("C = {c}, zeta = {}, nu = {}", params.zeta(), params.nu());

    let mut rows = Vec::with_capacity(sampled.len());
    let (mut failures, mut worst_ratio) = (0usize, 0.0f64);
    let mut ratios = Vec::with_capacity(sampled.len());
    for s in &sampled {
        let check = oscillation_inequality_check(&grid, &s.x, s.t, s.radius, c)?;
        if !check.holds {
            failures += 1;
        }
        if check.omega > 0.0 {
            let ratio = check.omega_plus / check.omega;
            worst_ratio = worst_ratio.max(ratio);
            ratios.push((s.radius, ratio));
        }
        rows.push(vec![
            super::join(&s.x),
            crate::compact(s.t),
            crate::compact(s.radius),
            crate::compact(s.estimate),
            crate::compact(check.omega),
            crate::compact(check.omega_plus),
            crate::compact(check.zeta),
            crate::compact(check.tolerance),
            check.holds.to_string(),
        ]);
    }
    ctx.out.csv("cylinders.csv", &CYLINDER_CSV_HEADER, &rows)?;
    println!(
        "oscillation inequality: {failures} failures over {} cylinders, worst omega+/omega = {worst_ratio}",
        sampled.len()
    );
    ratios.sort_by(|a, b| a.0.total_cmp(&b.0));
    let zeta_line = ratios.iter().map(|&(r, _)| (r, params.zeta())).collect();
    ctx.out.plot(
        "oscillation.svg",
        &Chart::new("One-step oscillation decay", "R", "omega+ / omega")
            .with(Series::new("observed", ratios))
            .with(Series::new("zeta", zeta_line)),
    );

    let d_qqp = boxes.parabolic_distance();
    let delta = iteration_delta(d_qqp);
    let sup = sup_norm(&grid, &boxes.outer)?;
    let bound = holder_bound(c, d_qqp, sup)?;
    let quotient = empirical_holder_quotient(
        &grid,
        &boxes.inner,
        params.nu(),
        p.pairs.unwrap_or(10_000),
        ctx.seed,
    )?;
    println!("d(Q, Q') = {d_qqp}, sup |u| = {sup}");
    println!("Hölder quotient {quotient} against bound {bound}");

    if let Some(k) = p.chain_k {
        let center: Vec<f64> = vec![0.5 * (qp_x[0] + qp_x[1]); d];
        let nested = nested_cylinders(&center, qp_t[1], p.chain_delta.unwrap_or(delta), k)?;
        let pairs = chain_oscillations(&grid, &nested)?;
        let mut chain_rows = Vec::with_capacity(nested.len());
        let (mut inner_curve, mut outer_curve) = (Vec::new(), Vec::new());
        for j in 0..nested.len() {
            let (omega, plus) = pairs
                .get(j)
                .copied()
                .map_or((None, None), |(a, b)| (Some(a), Some(b)));
            if let (Some(a), Some(b)) = (omega, plus) {
                inner_curve.push((j as f64, a));
                outer_curve.push((j as f64, b));
            }
            chain_rows.push(vec![
                j.to_string(),
                crate::compact(nested.radii[j]),
                crate::compact(nested.times[j]),
                super::opt(omega),
                super::opt(plus),
                nested
                    .certificates
                    .get(j)
                    .map(|c| c.holds().to_string())
                    .unwrap_or_default(),
            ]);
        }
        ctx.out.csv("chain.csv", &CHAIN_CSV_HEADER, &chain_rows)?;
        println!("nested chain of {k} cylinders certified");
        ctx.out.plot(
            "chain.svg",
            &Chart::new("Oscillations along the nested chain", "j", "oscillation")
                .with(Series::new("omega on D_j", inner_curve))
                .with(Series::new("omega+ on D+_(j+1)", outer_curve)),
        );
    }

    let summary = vec![
        crate::compact(c),
        crate::compact(params.zeta()),
        crate::compact(params.nu()),
        crate::compact(d_qqp),
        crate::compact(delta),
        crate::compact(sup),
        crate::compact(bound),
        crate::compact(quotient),
        sampled.len().to_string(),
        failures.to_string(),
        crate::compact(worst_ratio),
    ];
    let path = ctx
        .out
        .csv("hoelder.csv", &HOELDER_CSV_HEADER, &[summary])?;
    println!("wrote {}", path.display());
    Ok(Status::from_violations(
        failures > 0 || !(quotient <= bound),
    ))
}

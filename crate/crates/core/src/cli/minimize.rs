use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::svg::{Chart, Series};
use super::{opt, overlay, Context, Status};
use crate::bounds::TimeCoefficient;
use crate::error::{Error, Result};
use crate::path::{
    closed_form_min, numeric_minimize, optimal_path, KnotSpacing, MinimizeOptions, WeightFunction,
};

/// Columns of `minimize.csv`.
pub const MINIMIZE_CSV_HEADER: [&str; 11] = [
    "q",
    "d",
    "t1",
    "t2",
    "knots",
    "value",
    "closed_form",
    "relative_gap",
    "iterations",
    "converged",
    "gradient_norm",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    /// `w = 1`.
    One,
    /// `w = t^sigma`.
    Power,
    /// `w = exp(-m mu ln t) = t^{-m mu}`.
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingArg {
    Uniform,
    WUniform,
}

#[derive(Debug, Args)]
pub struct MinimizeCmd {
    #[command(flatten)]
    pub params: MinimizeParams,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeParams {
    /// Exponent q > 1 of the energy.
    #[arg(long)]
    pub q: Option<f64>,
    /// Start point (default 0).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x1: Option<Vec<f64>>,
    /// End point (default 1).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x2: Option<Vec<f64>>,
    /// Start time (default 1).
    #[arg(long)]
    pub t1: Option<f64>,
    /// End time (default 2).
    #[arg(long)]
    pub t2: Option<f64>,
    #[arg(long, value_enum)]
    pub w: Option<WeightKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub knots: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingArg>,
}

const ALLOWED: [&str; 13] = [
    "q",
    "x1",
    "x2",
    "t1",
    "t2",
    "w",
    "sigma",
    "m",
    "mu",
    "knots",
    "tol",
    "max_iters",
    "spacing",
];

fn weight(p: &MinimizeParams) -> Result<WeightFunction> {
    let w = p.w.unwrap_or(WeightKind::One);
    let unused = |name: &str, v: Option<f64>| match v {
        Some(_) => Err(Error::Configuration(format!(
            "`{name}` has no effect for this weight"
        ))),
        None => Ok(()),
    };
    match w {
        WeightKind::One => {
            unused("sigma", p.sigma)?;
            unused("m", p.m)?;
            unused("mu", p.mu)?;
            Ok(WeightFunction::unit())
        }
        WeightKind::Power => {
            unused("m", p.m)?;
            unused("mu", p.mu)?;
            Ok(WeightFunction::PowerTime {
                sigma: p.sigma.unwrap_or(0.0),
            })
        }
        WeightKind::Exp => {
            unused("sigma", p.sigma)?;
            Ok(WeightFunction::ExpOfA {
                m: p.m.unwrap_or(1.0),
                a: TimeCoefficient::power_law(p.mu.unwrap_or(0.0))?,
            })
        }
    }
}

pub(super) fn run(
    cmd: &MinimizeCmd,
    block: Option<&MinimizeParams>,
    ctx: &Context,
) -> Result<Status> {
    let p = overlay(&cmd.params, block, &ALLOWED, "minimize")?;
    let q = p.q.unwrap_or(2.0);
    let x1 = p.x1.clone().unwrap_or_else(|| vec![0.0]);
    let x2 = p.x2.clone().unwrap_or_else(|| vec![1.0; x1.len()]);
    let (t1, t2) = (p.t1.unwrap_or(1.0), p.t2.unwrap_or(2.0));
    let w = weight(&p)?;
    let defaults = MinimizeOptions::default();
    let options = MinimizeOptions {
        knots: p.knots.unwrap_or(defaults.knots),
        tol: p.tol.unwrap_or(defaults.tol),
        max_iters: p.max_iters.unwrap_or(defaults.max_iters),
        spacing: match p.spacing.unwrap_or(SpacingArg::Uniform) {
            SpacingArg::Uniform => KnotSpacing::Uniform,
            SpacingArg::WUniform => KnotSpacing::WUniform,
        },
        initial: None,
    };
    let exact = closed_form_min(q, &w, t1, t2, &x1, &x2)?;
    let result = numeric_minimize(q, &w, t1, t2, &x1, &x2, &options)?;
    let optimal = optimal_path(q, &w, t1, t2, &x1, &x2)?;
    println!("numeric minimum: {}", crate::compact(result.value));
    println!("closed form:     {exact}");
    if let Some(gap) = result.gap_to_closed_form {
        println!("relative gap:    {gap:e}");
    }
    println!(
        "iterations: {} (converged: {})",
        result.iterations, result.converged
    );

    let summary = vec![
        crate::compact(q),
        x1.len().to_string(),
        crate::compact(t1),
        crate::compact(t2),
        options.knots.to_string(),
        crate::compact(result.value),
        crate::compact(exact),
        opt(result.gap_to_closed_form),
        result.iterations.to_string(),
        result.converged.to_string(),
        crate::compact(result.gradient_norm),
    ];
    ctx.out
        .csv("minimize.csv", &MINIMIZE_CSV_HEADER, &[summary])?;

    let dim = x1.len();
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|a| format!("x_{a}")));
    header.extend((1..=dim).map(|a| format!("optimal_{a}")));
    let mut rows = Vec::with_capacity(result.path.len());
    let (mut numeric_curve, mut exact_curve) = (Vec::new(), Vec::new());
    for (i, &t) in result.path.knots().iter().enumerate() {
        let v = result.path.value(i);
        let o = optimal.eval(t)?;
        numeric_curve.push((t, v[0]));
        exact_curve.push((t, o[0]));
        let mut row = vec![crate::compact(t)];
        row.extend(v.iter().map(f64::to_string));
        row.extend(o.iter().map(f64::to_string));
        rows.push(row);
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let path = ctx.out.csv("path.csv", &header_refs, &rows)?;
    println!("wrote {}", path.display());
    ctx.out.plot(
        "path.svg",
        &Chart::new("Minimizing path, first coordinate", "t", "x_1")
            .with(Series::new("numeric", numeric_curve))
            .with(Series::new("closed form", exact_curve)),
    );

    if !result.converged {
        return Err(Error::NonConvergence(format!(
            "minimizer stopped after {} iterations with gradient norm {:e}",
            result.iterations, result.gradient_norm
        )));
    }
    Ok(Status::Clean)
}

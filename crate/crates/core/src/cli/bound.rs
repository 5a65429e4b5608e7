use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::{join, opt, overlay, required, Context, Status};
use crate::bounds::{
    heat_as_bound, lower_bound, pdiff_bound, pme_bound, upper_bound, BoundCase, Direction,
    EstimateParams, HarnackBound, PdiffParams, PmeParams, Relation, TimeCoefficient,
};
use crate::error::Result;
use crate::point::SpacetimePoint;

/// Columns of `bound.csv`; coordinates are `;`-separated.
pub const BOUND_CSV_HEADER: [&str; 13] = [
    "kind",
    "d",
    "x1",
    "t1",
    "x2",
    "t2",
    "u1",
    "value",
    "power",
    "relation",
    "case",
    "parenthesis_nonneg",
    "root",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    /// Gradient estimate with constants C, p, r and coefficient a(t).
    General,
    /// Heat equation.
    Heat,
    /// Porous medium equation.
    Pme,
    /// p-diffusion equation.
    Pdiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientKind {
    /// `a(t) = mu / t`.
    PowerLaw,
    /// `a(t) = a_value`.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Debug, Args)]
pub struct BoundCmd {
    #[arg(value_enum)]
    pub kind: BoundKind,
    #[command(flatten)]
    pub params: BoundParams,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    /// Space dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// First point, comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x1: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x2: Option<Vec<f64>>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    /// Value of the solution (or of f) at the first point.
    #[arg(long)]
    pub u1: Option<f64>,
    /// Constant of the gradient estimate.
    #[arg(long = "C", allow_negative_numbers = true)]
    #[serde(rename = "C")]
    pub c: Option<f64>,
    /// Gradient exponent (general) or p-diffusion exponent (pdiff).
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long, value_enum)]
    pub a: Option<CoefficientKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a_value: Option<f64>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Porous medium exponent.
    #[arg(long = "M", allow_negative_numbers = true)]
    #[serde(rename = "M")]
    pub m: Option<f64>,
    /// Constant K of the p-diffusion estimate.
    #[arg(long = "K", allow_negative_numbers = true)]
    #[serde(rename = "K")]
    pub k: Option<f64>,
}

const POINTS: [&str; 5] = ["x1", "x2", "t1", "t2", "u1"];

fn allowed(kind: BoundKind) -> Vec<&'static str> {
    let extra: &[&str] = match kind {
        BoundKind::General => &["C", "p", "r", "a", "mu", "a_value", "direction"],
        BoundKind::Heat => &["d"],
        BoundKind::Pme => &["d", "M"],
        BoundKind::Pdiff => &["d", "p", "K"],
    };
    POINTS.iter().chain(extra).copied().collect()
}

fn kind_name(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::General => "general",
        BoundKind::Heat => "heat",
        BoundKind::Pme => "pme",
        BoundKind::Pdiff => "pdiff",
    }
}

fn case_tag(case: BoundCase) -> &'static str {
    match case {
        BoundCase::CaseI => "case_i",
        BoundCase::CaseII => "case_ii",
        BoundCase::CaseIII => "case_iii",
        BoundCase::NonnegR0 => "nonneg_r0",
    }
}

fn relation_tag(rel: Relation) -> &'static str {
    match rel {
        Relation::AtLeast => ">=",
        Relation::AtMost => "<=",
    }
}

/// Evaluates the selected bound from resolved parameters.
pub fn evaluate(
    kind: BoundKind,
    p: &BoundParams,
) -> Result<(SpacetimePoint, SpacetimePoint, f64, HarnackBound)> {
    let x1 = required(p.x1.clone(), "x1")?;
    let x2 = required(p.x2.clone(), "x2")?;
    let p1 = SpacetimePoint::new(x1, required(p.t1, "t1")?)?;
    let p2 = SpacetimePoint::new(x2, required(p.t2, "t2")?)?;
    let u1 = required(p.u1, "u1")?;
    let d = p.d.unwrap_or(p1.dim());
    let bound = match kind {
        BoundKind::General => {
            let a = match p.a.unwrap_or(CoefficientKind::PowerLaw) {
                CoefficientKind::PowerLaw => TimeCoefficient::power_law(p.mu.unwrap_or(0.0))?,
                CoefficientKind::Constant => {
                    TimeCoefficient::constant(required(p.a_value, "a_value")?)?
                }
            };
            let (c, pp, r) = (
                required(p.c, "C")?,
                required(p.p, "p")?,
                required(p.r, "r")?,
            );
            match p.direction.unwrap_or(DirectionArg::Forward) {
                DirectionArg::Forward => lower_bound(
                    &EstimateParams::new(c, pp, r, a, Direction::Forward)?,
                    &p1,
                    &p2,
                    u1,
                )?,
                DirectionArg::Backward => upper_bound(
                    &EstimateParams::new(c, pp, r, a, Direction::Backward)?,
                    &p1,
                    &p2,
                    u1,
                )?,
            }
        }
        BoundKind::Heat => heat_as_bound(d, &p1, &p2, u1)?,
        BoundKind::Pme => pme_bound(&PmeParams::new(required(p.m, "M")?, d)?, &p1, &p2, u1)?,
        BoundKind::Pdiff => pdiff_bound(
            &PdiffParams::new(required(p.p, "p")?, d, p.k)?,
            &p1,
            &p2,
            u1,
        )?,
    };
    Ok((p1, p2, u1, bound))
}

pub(super) fn run(cmd: &BoundCmd, block: Option<&BoundParams>, ctx: &Context) -> Result<Status> {
    let name = kind_name(cmd.kind);
    let params = overlay(
        &cmd.params,
        block,
        &allowed(cmd.kind),
        &format!("bound {name}"),
    )?;
    let (p1, p2, u1, b) = evaluate(cmd.kind, &params)?;
    let d = params.d.unwrap_or(p1.dim());
    println!(
        "bound: u2^{} {} {}",
        b.power,
        relation_tag(b.relation),
        crate::compact(b.value)
    );
    if let Some(root) = b.root {
        println!(
            "root form: u2 {} {}",
            relation_tag(b.root_relation),
            crate::compact(root)
        );
    }
    println!("case: {}", case_tag(b.case));
    println!("valid: {}", b.parenthesis_nonneg);
    let row = vec![
        name.to_string(),
        d.to_string(),
        join(p1.x()),
        crate::compact(p1.t()),
        join(p2.x()),
        crate::compact(p2.t()),
        crate::compact(u1),
        crate::compact(b.value),
        crate::compact(b.power),
        relation_tag(b.relation).to_string(),
        case_tag(b.case).to_string(),
        b.parenthesis_nonneg.to_string(),
        opt(b.root),
    ];
    let path = ctx.out.csv("bound.csv", &BOUND_CSV_HEADER, &[row])?;
    println!("wrote {}", path.display());
    Ok(Status::Clean)
}

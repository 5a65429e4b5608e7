use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cylinder::{AxisBox, CylinderKind, NestedCylinders, ParabolicCylinder};
use super::holder::HoelderParams;
use crate::error::{invalid, Error, Result};
use crate::pde::GridSolution;

/// Grid nodes and snapshots of a region.
struct Region {
    nodes: Vec<usize>,
    snaps: Vec<usize>,
}

impl Region {
    fn is_empty(&self) -> bool {
        self.nodes.is_empty() || self.snaps.is_empty()
    }

    fn values<'a>(&'a self, grid: &'a GridSolution) -> impl Iterator<Item = f64> + 'a {
        self.snaps
            .iter()
            .flat_map(move |&k| self.nodes.iter().map(move |&i| grid.snapshot(k)[i]))
    }

    fn extrema(&self, grid: &GridSolution) -> (f64, f64) {
        self.values(grid)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Axis index range of coordinates in `[lo, hi]`.
fn axis_range(grid: &GridSolution, lo: f64, hi: f64) -> std::ops::Range<usize> {
    let n = grid.axis_len();
    let first = (0..n).find(|&i| grid.coordinate(i) >= lo).unwrap_or(n);
    let end = (0..n)
        .rev()
        .find(|&i| grid.coordinate(i) <= hi)
        .map_or(0, |i| i + 1);
    first..end.max(first)
}

fn nodes_in_box(
    grid: &GridSolution,
    lower: &[f64],
    upper: &[f64],
    keep: impl Fn(&[f64]) -> bool,
) -> Vec<usize> {
    let ranges: Vec<_> = (0..grid.dim())
        .map(|a| axis_range(grid, lower[a], upper[a]))
        .collect();
    if ranges.iter().any(|r| r.is_empty()) {
        return Vec::new();
    }
    let mut idx: Vec<usize> = ranges.iter().map(|r| r.start).collect();
    let mut out = Vec::new();
    loop {
        let flat = grid.flat_index(&idx);
        if keep(&grid.position(flat)) {
            out.push(flat);
        }
        // odometer over the product of ranges, last axis fastest
        let mut a = grid.dim();
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < ranges[a].end {
                break;
            }
            idx[a] = ranges[a].start;
        }
    }
}

fn snaps_in(grid: &GridSolution, [lo, hi]: [f64; 2]) -> Vec<usize> {
    (0..grid.snapshot_count())
        .filter(|&k| {
            let t = grid.times()[k];
            lo <= t && t <= hi
        })
        .collect()
}

fn check_dim(grid: &GridSolution, d: usize) -> Result<()> {
    if d == grid.dim() {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "{d}-d region on a {}-d grid",
            grid.dim()
        )))
    }
}

fn cylinder_region(grid: &GridSolution, cyl: &ParabolicCylinder) -> Result<Region> {
    check_dim(grid, cyl.dim())?;
    let rho = cyl.spatial_radius();
    let lower: Vec<f64> = cyl.center.iter().map(|c| c - rho).collect();
    let upper: Vec<f64> = cyl.center.iter().map(|c| c + rho).collect();
    Ok(Region {
        nodes: nodes_in_box(grid, &lower, &upper, |x| cyl.contains_space(x)),
        snaps: snaps_in(grid, cyl.time_interval()),
    })
}

fn box_region(grid: &GridSolution, b: &AxisBox) -> Result<Region> {
    check_dim(grid, b.dim())?;
    Ok(Region {
        nodes: nodes_in_box(grid, &b.lower, &b.upper, |_| true),
        snaps: snaps_in(grid, b.t),
    })
}

/// Errors unless the closed cylinder lies inside the grid's space-time box.
fn require_inside(grid: &GridSolution, cyl: &ParabolicCylinder) -> Result<()> {
    check_dim(grid, cyl.dim())?;
    let l = grid.half_width();
    let rho = cyl.spatial_radius();
    let [lo, hi] = cyl.time_interval();
    let times = grid.times();
    let inside = cyl.center.iter().all(|c| c - rho >= -l && c + rho <= l)
        && lo >= times[0]
        && hi <= times[times.len() - 1];
    if inside {
        Ok(())
    } else {
        Err(Error::EmptyRegion(format!(
            "cylinder of radius {} at ({:?}, {}) is not inside the grid",
            cyl.radius, cyl.center, cyl.t0
        )))
    }
}

/// Errors unless the box lies inside the grid's space-time box.
fn require_box_inside(grid: &GridSolution, b: &AxisBox) -> Result<()> {
    check_dim(grid, b.dim())?;
    let l = grid.half_width();
    let times = grid.times();
    let inside = b.lower.iter().all(|&v| v >= -l)
        && b.upper.iter().all(|&v| v <= l)
        && b.t[0] >= times[0]
        && b.t[1] <= times[times.len() - 1];
    if inside {
        Ok(())
    } else {
        Err(Error::EmptyRegion(format!(
            "box {b:?} is not inside the grid"
        )))
    }
}

fn nonempty(region: Region, what: &str) -> Result<Region> {
    if region.is_empty() {
        Err(Error::EmptyRegion(format!(
            "{what} contains no grid node at a saved time"
        )))
    } else {
        Ok(region)
    }
}

/// `max - min` of the nodal values inside the cylinder.
pub fn oscillation(grid: &GridSolution, cyl: &ParabolicCylinder) -> Result<f64> {
    let region = nonempty(cylinder_region(grid, cyl)?, "cylinder")?;
    let (lo, hi) = region.extrema(grid);
    Ok(hi - lo)
}

/// `sup_Q |u|` over the nodes of a box.
pub fn sup_norm(grid: &GridSolution, b: &AxisBox) -> Result<f64> {
    let region = nonempty(box_region(grid, b)?, "box")?;
    Ok(region.values(grid).fold(0.0, |m, v| m.max(v.abs())))
}

/// Largest jump between neighbouring nodes or saved times inside a region.
fn largest_jump(grid: &GridSolution, region: &Region) -> f64 {
    let strides: Vec<usize> = (0..grid.dim()).map(|a| grid.stride(a)).collect();
    let n = grid.node_count();
    let mut jump = 0.0f64;
    for (pos, &k) in region.snaps.iter().enumerate() {
        let u = grid.snapshot(k);
        let next = region.snaps.get(pos + 1).map(|&k2| grid.snapshot(k2));
        for &i in &region.nodes {
            for &s in &strides {
                if i + s < n {
                    jump = jump.max((u[i + s] - u[i]).abs());
                }
            }
            if let Some(v) = next {
                jump = jump.max((v[i] - u[i]).abs());
            }
        }
    }
    jump
}

/// Outcome of `omega+ <= zeta omega` at one cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationCheck {
    pub omega: f64,
    pub omega_plus: f64,
    pub zeta: f64,
    /// `2 zeta` times the largest one-cell jump inside the full cylinder.
    pub tolerance: f64,
    pub holds: bool,
}

/// Compares the oscillation over `D+_R` with `zeta = (C-1)/C` times that over `D_R`.
///
/// Grid extrema understate the true oscillation of `D_R` by at most two
/// one-cell jumps, which is the slack allowed.
pub fn oscillation_inequality_check(
    grid: &GridSolution,
    x0: &[f64],
    t0: f64,
    radius: f64,
    c: f64,
) -> Result<OscillationCheck> {
    let params = HoelderParams::new(c)?;
    let full = ParabolicCylinder::full(x0.to_vec(), t0, radius)?;
    require_inside(grid, &full)?;
    let region = nonempty(cylinder_region(grid, &full)?, "cylinder")?;
    let (lo, hi) = region.extrema(grid);
    let omega_plus = oscillation(grid, &full.with_kind(CylinderKind::Plus))?;
    let omega = hi - lo;
    let zeta = params.zeta();
    let tolerance = 2.0 * zeta * largest_jump(grid, &region);
    Ok(OscillationCheck {
        omega,
        omega_plus,
        zeta,
        tolerance,
        holds: omega_plus <= zeta * omega + tolerance,
    })
}

/// `sup_{D-_R} u / inf_{D+_R} u`, the smallest constant for this cylinder;
/// `+inf` when the infimum vanishes.
pub fn estimate_harnack_constant(
    grid: &GridSolution,
    x0: &[f64],
    t0: f64,
    radius: f64,
) -> Result<f64> {
    let full = ParabolicCylinder::full(x0.to_vec(), t0, radius)?;
    require_inside(grid, &full)?;
    let (lo, _) = nonempty(cylinder_region(grid, &full)?, "cylinder")?.extrema(grid);
    if lo < 0.0 {
        return Err(Error::Domain(format!(
            "the field takes the negative value {lo} in the cylinder"
        )));
    }
    let minus = nonempty(
        cylinder_region(grid, &full.with_kind(CylinderKind::Minus))?,
        "D-",
    )?;
    let plus = nonempty(
        cylinder_region(grid, &full.with_kind(CylinderKind::Plus))?,
        "D+",
    )?;
    let (_, sup_minus) = minus.extrema(grid);
    let (inf_plus, _) = plus.extrema(grid);
    if inf_plus == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(sup_minus / inf_plus)
}

/// `(omega_j, omega+_{j+1})` along a nested sequence; the first never exceeds the second.
pub fn chain_oscillations(
    grid: &GridSolution,
    nested: &NestedCylinders,
) -> Result<Vec<(f64, f64)>> {
    (0..nested.len().saturating_sub(1))
        .map(|j| {
            let inner = oscillation(grid, &nested.cylinder(j, CylinderKind::Full))?;
            let outer = oscillation(grid, &nested.cylinder(j + 1, CylinderKind::Plus))?;
            Ok((inner, outer))
        })
        .collect()
}

/// `max |u(x,t) - u(y,s)| / (|x - y| + |t - s|^{1/2})^nu` over sampled node
/// pairs of `Q'`: `pair_count` random distinct pairs plus every pair of
/// neighbours along an axis or in time.
pub fn empirical_holder_quotient(
    grid: &GridSolution,
    qp: &AxisBox,
    nu: f64,
    pair_count: usize,
    seed: u64,
) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(invalid("nu", format!("must be positive, got {nu}")));
    }
    require_box_inside(grid, qp)?;
    let region = box_region(grid, qp)?;
    let total = region.nodes.len() * region.snaps.len();
    if total < 2 {
        return Err(Error::EmptyRegion(format!(
            "Q' holds {total} grid point(s); need two"
        )));
    }
    let point = |flat: usize| {
        (
            region.nodes[flat % region.nodes.len()],
            region.snaps[flat / region.nodes.len()],
        )
    };
    let quotient = |(i, k): (usize, usize), (j, l): (usize, usize)| {
        let (x, y) = (grid.position(i), grid.position(j));
        let dist: f64 = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let dt = (grid.times()[k] - grid.times()[l]).abs();
        let du = (grid.snapshot(k)[i] - grid.snapshot(l)[j]).abs();
        du / (dist + dt.sqrt()).powf(nu)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random: Vec<(usize, usize)> = (0..pair_count)
        .map(|_| {
            let a = rng.gen_range(0..total);
            let mut b = rng.gen_range(0..total - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect();
    let random_max = random
        .par_iter()
        .map(|&(a, b)| quotient(point(a), point(b)))
        .reduce(|| 0.0, f64::max);
    let in_nodes = |flat: usize| region.nodes.binary_search(&flat).is_ok();
    let n = grid.node_count();
    let neighbour_max = (0..total)
        .into_par_iter()
        .map(|flat| {
            let (i, k) = point(flat);
            let pos = flat / region.nodes.len();
            let mut best = 0.0f64;
            for a in 0..grid.dim() {
                let s = grid.stride(a);
                if i + s < n && grid.multi_index(i)[a] + 1 < grid.axis_len() && in_nodes(i + s) {
                    best = best.max(quotient((i, k), (i + s, k)));
                }
            }
            if let Some(&l) = region.snaps.get(pos + 1) {
                best = best.max(quotient((i, k), (i, l)));
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(random_max.max(neighbour_max))
}

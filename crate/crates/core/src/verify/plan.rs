use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::{Derivatives, ExactSolution, GridSolution};

/// A solution known in closed form, with analytic derivatives.
pub trait AnalyticField: Sync {
    fn dim(&self) -> usize;

    /// `u`, `grad u`, `u_t` and `Delta u` at `(x, t)`.
    fn derivatives(&self, x: &[f64], t: f64) -> Result<Derivatives>;

    /// Exact `Delta f` of the pressure `f = (M/(M-1)) u^{M-1}`, when known.
    fn pressure_laplacian(&self, _m: f64, _x: &[f64], _t: f64) -> Option<Result<f64>> {
        None
    }
}

impl AnalyticField for ExactSolution {
    fn dim(&self) -> usize {
        ExactSolution::dim(self)
    }

    fn derivatives(&self, x: &[f64], t: f64) -> Result<Derivatives> {
        self.eval(x, t)
    }

    fn pressure_laplacian(&self, m: f64, x: &[f64], t: f64) -> Option<Result<f64>> {
        match self {
            ExactSolution::Barenblatt { d, m: bm, c0 } if *bm == m => {
                Some(crate::pde::barenblatt_eval(*d, m, *c0, x, t).map(|b| b.lap_f))
            }
            _ => None,
        }
    }
}

/// Where the checks read `u` from.
#[derive(Clone, Copy)]
pub enum Solution<'a> {
    Analytic(&'a dyn AnalyticField),
    Grid(&'a GridSolution),
}

impl<'a> From<&'a ExactSolution> for Solution<'a> {
    fn from(e: &'a ExactSolution) -> Self {
        Solution::Analytic(e)
    }
}

impl<'a> From<&'a GridSolution> for Solution<'a> {
    fn from(g: &'a GridSolution) -> Self {
        Solution::Grid(g)
    }
}

impl Solution<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Solution::Analytic(a) => a.dim(),
            Solution::Grid(g) => g.dim(),
        }
    }
}

/// Point source of a sample plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSource {
    /// Uniform random `(x, t)` in the plan's box, evaluated analytically.
    Analytic,
    /// Grid nodes and saved snapshots inside the plan's box.
    GridNodes,
}

fn default_dt_min() -> f64 {
    1e-3
}
fn default_front_band() -> f64 {
    0.4
}
fn default_analytic_tolerance() -> f64 {
    1e-8
}
fn default_tolerance_constant() -> f64 {
    10.0
}

/// Sampling of points and admissible pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    pub source: PointSource,
    /// Single-point samples.
    pub points: usize,
    /// Two-point samples for Harnack checks.
    pub pairs: usize,
    pub seed: u64,
    /// Every coordinate is drawn from (or restricted to) this interval.
    pub x_range: [f64; 2],
    pub t_range: [f64; 2],
    /// Smallest admissible `t2 - t1`.
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    /// Draw `x2` within this distance of `x1` (analytic pairs).
    #[serde(default)]
    pub max_pair_distance: Option<f64>,
    /// Draw `t2` within this gap after `t1` (analytic pairs).
    #[serde(default)]
    pub max_pair_gap: Option<f64>,
    /// Time at which the evolution started; estimates use `t - time_origin`.
    #[serde(default)]
    pub time_origin: f64,
    /// Grid samples of degenerate equations closer than this to the numerical
    /// free boundary are skipped; the front is smeared over a few cells.
    #[serde(default = "default_front_band")]
    pub front_band: f64,
    #[serde(default = "default_analytic_tolerance")]
    pub analytic_tolerance: f64,
    /// `c` in the grid tolerance `c (dx^2 + dt)`.
    #[serde(default = "default_tolerance_constant")]
    pub tolerance_constant: f64,
}

impl SamplePlan {
    pub fn analytic(
        points: usize,
        pairs: usize,
        seed: u64,
        x_range: [f64; 2],
        t_range: [f64; 2],
    ) -> Self {
        Self {
            source: PointSource::Analytic,
            points,
            pairs,
            seed,
            x_range,
            t_range,
            dt_min: default_dt_min(),
            max_pair_distance: None,
            max_pair_gap: None,
            time_origin: 0.0,
            front_band: default_front_band(),
            analytic_tolerance: default_analytic_tolerance(),
            tolerance_constant: default_tolerance_constant(),
        }
    }

    /// Grid-node plan covering the whole box and time span.
    pub fn grid(points: usize, pairs: usize, seed: u64) -> Self {
        Self {
            source: PointSource::GridNodes,
            x_range: [f64::NEG_INFINITY, f64::INFINITY],
            t_range: [0.0, f64::INFINITY],
            ..Self::analytic(points, pairs, seed, [0.0, 0.0], [0.0, 0.0])
        }
    }

    pub fn validate(&self, solution: &Solution<'_>) -> Result<()> {
        let bad = |m: String| Err(Error::Configuration(m));
        match (self.source, solution) {
            (PointSource::Analytic, Solution::Analytic(_))
            | (PointSource::GridNodes, Solution::Grid(_)) => {}
            _ => return bad("the plan's point source does not match the solution".into()),
        }
        if !(self.x_range[0] <= self.x_range[1]) {
            return bad(format!("x_range {:?} is empty", self.x_range));
        }
        if !(self.t_range[0] >= 0.0 && self.t_range[0] <= self.t_range[1]) {
            return bad(format!(
                "t_range {:?} must be a nonnegative interval",
                self.t_range
            ));
        }
        if self.source == PointSource::Analytic
            && (!(self.t_range[0] > self.time_origin)
                || !self.t_range[1].is_finite()
                || !self.x_range.iter().all(|v| v.is_finite()))
        {
            return bad("analytic sampling needs a finite box with t > time_origin".into());
        }
        if !(self.time_origin >= 0.0 && self.time_origin.is_finite()) {
            return bad(format!(
                "time_origin must be nonnegative, got {}",
                self.time_origin
            ));
        }
        if !(self.front_band >= 0.0) {
            return bad(format!(
                "front_band must be nonnegative, got {}",
                self.front_band
            ));
        }
        if !(self.dt_min > 0.0) {
            return bad(format!("dt_min must be positive, got {}", self.dt_min));
        }
        if let Some(gap) = self.max_pair_gap {
            if !(gap >= self.dt_min) {
                return bad(format!(
                    "max_pair_gap {gap} is below dt_min {}",
                    self.dt_min
                ));
            }
        }
        if self.max_pair_distance.is_some_and(|r| !(r >= 0.0)) {
            return bad("max_pair_distance must be nonnegative".into());
        }
        if !(self.analytic_tolerance >= 0.0 && self.tolerance_constant >= 0.0) {
            return bad("tolerances must be nonnegative".into());
        }
        Ok(())
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Random analytic points `(x, t)`.
    pub(crate) fn analytic_points(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<(Vec<f64>, f64)> {
        (0..self.points)
            .map(|_| {
                let x = (0..d).map(|_| self.draw_x(rng)).collect();
                (x, self.draw(rng, self.t_range))
            })
            .collect()
    }

    /// Random admissible analytic pairs.
    pub(crate) fn analytic_pairs(
        &self,
        d: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<[(Vec<f64>, f64); 2]> {
        let [lo, hi] = self.t_range;
        (0..self.pairs)
            .map(|_| {
                let x1: Vec<f64> = (0..d).map(|_| self.draw_x(rng)).collect();
                let x2: Vec<f64> = match self.max_pair_distance {
                    Some(r) => {
                        let dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
                        let len = r * rng.gen::<f64>();
                        x1.iter()
                            .zip(&dir)
                            .map(|(a, v)| a + len * v / norm)
                            .collect()
                    }
                    None => (0..d).map(|_| self.draw_x(rng)).collect(),
                };
                let (t1, t2) = match self.max_pair_gap {
                    Some(gap) => {
                        let t1 = self.draw(rng, [lo, (hi - self.dt_min).max(lo)]);
                        (t1, t1 + self.draw(rng, [self.dt_min, gap]))
                    }
                    None => loop {
                        let (a, b) = (self.draw(rng, self.t_range), self.draw(rng, self.t_range));
                        let (t1, t2) = if a < b { (a, b) } else { (b, a) };
                        if t2 - t1 >= self.dt_min {
                            break (t1, t2);
                        }
                    },
                };
                [(x1, t1), (x2, t2)]
            })
            .collect()
    }

    fn draw_x(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.draw(rng, self.x_range)
    }

    fn draw(&self, rng: &mut ChaCha8Rng, [a, b]: [f64; 2]) -> f64 {
        if a == b {
            a
        } else {
            rng.gen_range(a..b)
        }
    }

    /// Interior nodes at least `radius` nodes from the boundary, inside `x_range`.
    pub(crate) fn grid_nodes(&self, grid: &GridSolution, radius: usize) -> Vec<usize> {
        (0..grid.node_count())
            .filter(|&i| grid.boundary_distance(i) >= radius)
            .filter(|&i| {
                grid.position(i)
                    .iter()
                    .all(|x| *x >= self.x_range[0] && *x <= self.x_range[1])
            })
            .collect()
    }

    /// Snapshot indices with both neighbours saved, inside `t_range`.
    pub(crate) fn grid_snapshots(&self, grid: &GridSolution) -> Vec<usize> {
        let times = grid.times();
        (1..times.len().saturating_sub(1))
            .filter(|&k| times[k] >= self.t_range[0] && times[k] <= self.t_range[1])
            .collect()
    }

    /// `(node, snapshot)` samples: all candidates if few, else `points` distinct ones.
    pub(crate) fn grid_points(
        &self,
        grid: &GridSolution,
        radius: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<(usize, usize)>> {
        let nodes = self.grid_nodes(grid, radius);
        let snaps = self.grid_snapshots(grid);
        let total = nodes.len() * snaps.len();
        if total == 0 {
            return Err(Error::EmptyRegion(
                "no interior grid node and snapshot inside the plan's box".into(),
            ));
        }
        let pick = |flat: usize| (nodes[flat % nodes.len()], snaps[flat / nodes.len()]);
        if self.points >= total {
            return Ok((0..total).map(pick).collect());
        }
        let mut chosen = index::sample(rng, total, self.points).into_vec();
        chosen.sort_unstable();
        Ok(chosen.into_iter().map(pick).collect())
    }

    /// Random admissible `((node1, snap1), (node2, snap2))` pairs on a grid.
    pub(crate) fn grid_pairs(
        &self,
        grid: &GridSolution,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<[(usize, usize); 2]>> {
        let nodes = self.grid_nodes(grid, 1);
        let times = grid.times();
        let snaps: Vec<usize> = (0..times.len())
            .filter(|&k| times[k] >= self.t_range[0] && times[k] <= self.t_range[1])
            .collect();
        let (first, last) = match (snaps.first(), snaps.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                return Err(Error::EmptyRegion(
                    "no snapshot inside the plan's time range".into(),
                ))
            }
        };
        if nodes.is_empty() || times[last] - times[first] < self.dt_min {
            return Err(Error::EmptyRegion(
                "the grid has no admissible pair inside the plan's box".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.pairs);
        while out.len() < self.pairs {
            let (a, b) = (
                snaps[rng.gen_range(0..snaps.len())],
                snaps[rng.gen_range(0..snaps.len())],
            );
            let (k1, k2) = if a < b { (a, b) } else { (b, a) };
            if times[k2] - times[k1] < self.dt_min {
                continue;
            }
            let n1 = nodes[rng.gen_range(0..nodes.len())];
            let n2 = nodes[rng.gen_range(0..nodes.len())];
            out.push([(n1, k1), (n2, k2)]);
        }
        Ok(out)
    }
}

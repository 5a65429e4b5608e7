use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::exact::ExactSolution;
use super::solver::SolverConfig;
use crate::error::{invalid, Error, Result};

/// Equation a grid field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Equation {
    Heat,
    Pme {
        m: f64,
    },
    Pdiff {
        p: f64,
        epsilon: f64,
    },
    /// A field sampled from a formula rather than produced by a solver.
    Sampled,
}

/// Diagnostics of one explicit time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Time after the step.
    pub t: f64,
    pub dt: f64,
    /// `sum u dx^d` after the step.
    pub mass: f64,
    /// Mass removed by clamping negative values to zero.
    pub clamped: f64,
}

/// Uniform tensor grid on `[-L, L]^d` with saved time snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    equation: Equation,
    dim: usize,
    /// Nodes per axis.
    n: usize,
    dx: f64,
    half_width: f64,
    times: Vec<f64>,
    fields: Vec<Vec<f64>>,
    steps: Vec<StepRecord>,
    initial_mass: f64,
    reference: Option<ExactSolution>,
    config: Option<SolverConfig>,
}

/// Node count per axis for a box of half-width `l`, widened to an even number
/// of cells so the origin is a node and halving `dx` nests the grids.
pub(crate) fn axis_nodes(l: f64, dx: f64) -> Result<usize> {
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(invalid("dx", format!("must be positive, got {dx}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(invalid("L", format!("must be positive, got {l}")));
    }
    let cells = 2.0 * (l / dx - 1e-9).ceil().max(1.0);
    if cells > 1e7 {
        return Err(Error::Configuration(format!(
            "{cells} cells per axis is too many"
        )));
    }
    Ok(cells as usize + 1)
}

impl GridSolution {
    pub(crate) fn assemble(
        equation: Equation,
        dim: usize,
        n: usize,
        dx: f64,
        times: Vec<f64>,
        fields: Vec<Vec<f64>>,
        steps: Vec<StepRecord>,
        reference: Option<ExactSolution>,
        config: Option<SolverConfig>,
    ) -> Self {
        let mut out = Self {
            equation,
            dim,
            n,
            dx,
            half_width: 0.5 * (n - 1) as f64 * dx,
            times,
            fields,
            steps,
            initial_mass: 0.0,
            reference,
            config,
        };
        out.initial_mass = out.mass(0);
        out
    }

    /// Samples `f(x, t)` on the grid covering `[-L, L]^d` at the given times.
    pub fn from_fn<F: Fn(&[f64], f64) -> f64>(
        dim: usize,
        half_width: f64,
        dx: f64,
        times: &[f64],
        f: F,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("d", "dimension must be at least 1"));
        }
        if times.is_empty() || times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid(
                "times",
                "need at least one strictly increasing time",
            ));
        }
        let n = axis_nodes(half_width, dx)?;
        let shell = Self::assemble(
            Equation::Sampled,
            dim,
            n,
            dx,
            vec![],
            vec![],
            vec![],
            None,
            None,
        );
        let mut fields = Vec::with_capacity(times.len());
        for &t in times {
            let field: Vec<f64> = (0..shell.node_count())
                .map(|i| f(&shell.position(i), t))
                .collect();
            if field.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!(
                    "sampled field is not finite at t = {t}"
                )));
            }
            fields.push(field);
        }
        Ok(Self::assemble(
            Equation::Sampled,
            dim,
            n,
            dx,
            times.to_vec(),
            fields,
            vec![],
            None,
            None,
        ))
    }

    pub fn equation(&self) -> Equation {
        self.equation
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per axis.
    pub fn axis_len(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn node_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshot_count(&self) -> usize {
        self.times.len()
    }

    pub fn snapshot(&self, k: usize) -> &[f64] {
        &self.fields[k]
    }

    pub fn final_field(&self) -> &[f64] {
        &self.fields[self.fields.len() - 1]
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// The exact solution used for initial or boundary data, if any.
    pub fn reference(&self) -> Option<&ExactSolution> {
        self.reference.as_ref()
    }

    pub fn config(&self) -> Option<&SolverConfig> {
        self.config.as_ref()
    }

    /// Coordinate of index `i` along any axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx
    }

    /// Multi-index of a flat node index; the last axis varies fastest.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Flat-index step along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    pub fn position(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .map(|i| self.coordinate(i))
            .collect()
    }

    /// Smallest distance (in nodes) from the node to the boundary of the box.
    pub fn boundary_distance(&self, flat: usize) -> usize {
        self.multi_index(flat)
            .into_iter()
            .map(|i| i.min(self.n - 1 - i))
            .min()
            .unwrap_or(0)
    }

    /// `sum u dx^d` of snapshot `k`.
    pub fn mass(&self, k: usize) -> f64 {
        self.fields
            .get(k)
            .map_or(0.0, |f| f.iter().sum::<f64>() * self.cell_volume())
    }

    pub fn initial_mass(&self) -> f64 {
        self.initial_mass
    }

    pub(crate) fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    /// `sum |u - exact| dx^d` at snapshot `k`.
    pub fn l1_error(&self, exact: &ExactSolution, k: usize) -> Result<f64> {
        if exact.dim() != self.dim {
            return Err(Error::Shape(format!(
                "exact solution of dimension {} on a {}-d grid",
                exact.dim(),
                self.dim
            )));
        }
        let t = self.times[k];
        let mut total = 0.0;
        for (i, u) in self.fields[k].iter().enumerate() {
            total += (u - exact.value(&self.position(i), t)?).abs();
        }
        Ok(total * self.cell_volume())
    }

    /// Final-time L1 error against the reference, when the reference solves the equation.
    pub fn final_l1_error(&self) -> Option<f64> {
        let exact = self.reference.as_ref()?;
        if !exact.solves(&self.equation) {
            return None;
        }
        self.l1_error(exact, self.fields.len() - 1).ok()
    }

    /// Largest per-step clamped mass relative to the initial mass.
    pub fn max_relative_clamp(&self) -> f64 {
        let scale = self.initial_mass.abs().max(f64::MIN_POSITIVE);
        self.steps.iter().fold(0.0, |m, s| m.max(s.clamped / scale))
    }

    /// Writes every saved snapshot as CSV (`x,t,u` or `x1,..,xd,t,u`).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = if self.dim == 1 {
            vec!["x".into()]
        } else {
            (1..=self.dim).map(|a| format!("x{a}")).collect()
        };
        header.push("t".into());
        header.push("u".into());
        w.write_record(&header)?;
        for (t, field) in self.times.iter().zip(&self.fields) {
            for (i, u) in field.iter().enumerate() {
                let mut row: Vec<String> = self
                    .position(i)
                    .iter()
                    .map(|x| crate::compact(*x))
                    .collect();
                row.push(crate::compact(*t));
                row.push(crate::compact(*u));
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Grid, equation tag and configuration echo.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "equation": self.equation,
            "dim": self.dim,
            "nodes_per_axis": self.n,
            "dx": self.dx,
            "half_width": self.half_width,
            "times": self.times,
            "steps": self.steps.len(),
            "initial_mass": self.initial_mass,
            "final_mass": self.mass(self.fields.len().saturating_sub(1)),
            "max_relative_clamp": self.max_relative_clamp(),
            "final_l1_error": self.final_l1_error(),
            "reference": self.reference,
            "config": self.config,
        })
    }

    /// Writes `<stem>.csv` and the `<stem>.json` sidecar into `dir`.
    pub fn export(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        self.write_csv(&csv_path)?;
        fs::write(&json_path, serde_json::to_string_pretty(&self.metadata())?)?;
        Ok((csv_path, json_path))
    }
}
